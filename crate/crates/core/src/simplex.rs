//! Exact-rational primal simplex on a dense tableau.
//!
//! Solves `max c·x` subject to `A x <= b`, `x >= 0`, with `b >= 0` so the
//! slack basis is feasible from the start. Pivoting follows Bland's rule
//! (lowest-index entering column, lowest-index leaving basic variable among
//! ratio ties), which cannot cycle and makes the final basis a deterministic
//! function of the input order.

use num_traits::{Signed, Zero};

use crate::error::{GrovesError, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    objective: Vec<Rational>,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpSolution {
    Optimal { value: Rational, x: Vec<Rational> },
    Unbounded,
}

impl LinearProgram {
    /// Maximize `objective · x`.
    pub fn new(objective: Vec<Rational>) -> Self {
        Self {
            objective,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn var_count(&self) -> usize {
        self.objective.len()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Adds `coeffs · x <= bound`.
    pub fn add_le(&mut self, coeffs: Vec<Rational>, bound: Rational) -> Result<()> {
        if coeffs.len() != self.objective.len() {
            return Err(GrovesError::Lp(format!(
                "row has {} coefficients, program has {} variables",
                coeffs.len(),
                self.objective.len()
            )));
        }
        if bound.is_negative() {
            return Err(GrovesError::Lp(
                "negative right-hand side; the origin must be feasible".into(),
            ));
        }
        self.rows.push(coeffs);
        self.rhs.push(bound);
        Ok(())
    }

    pub fn solve(&self) -> Result<LpSolution> {
        Tableau::new(self).run()
    }
}

struct Tableau {
    vars: usize,
    /// rows × (vars + slacks + 1); last column is the right-hand side
    cells: Vec<Vec<Rational>>,
    /// reduced costs, negated objective at start; last entry is `-value`
    cost: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let vars = lp.objective.len();
        let m = lp.rows.len();
        let width = vars + m + 1;
        let cells = lp
            .rows
            .iter()
            .zip(&lp.rhs)
            .enumerate()
            .map(|(r, (row, b))| {
                let mut line = vec![Rational::zero(); width];
                line[..vars].clone_from_slice(row);
                line[vars + r] = Rational::from_integer(1.into());
                line[width - 1] = b.clone();
                line
            })
            .collect();
        let mut cost = vec![Rational::zero(); width];
        for (j, c) in lp.objective.iter().enumerate() {
            cost[j] = -c.clone();
        }
        Self {
            vars,
            cells,
            cost,
            basis: (vars..vars + m).collect(),
        }
    }

    fn run(mut self) -> Result<LpSolution> {
        let width = self.cost.len();
        while let Some(enter) = (0..width - 1).find(|&j| self.cost[j].is_negative()) {
            let mut leave: Option<(usize, Rational)> = None;
            for (r, line) in self.cells.iter().enumerate() {
                let a = &line[enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &line[width - 1] / a;
                let better = match &leave {
                    None => true,
                    Some((best_r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*best_r])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return Ok(LpSolution::Unbounded);
            };
            self.pivot(row, enter);
        }
        let mut x = vec![Rational::zero(); self.vars];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.vars {
                x[b] = self.cells[r][width - 1].clone();
            }
        }
        Ok(LpSolution::Optimal {
            value: self.cost[width - 1].clone(),
            x,
        })
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.cells[row][col].clone();
        for v in self.cells[row].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        let pivot_line = self.cells[row].clone();
        let nonzero: Vec<usize> = (0..pivot_line.len())
            .filter(|&j| !pivot_line[j].is_zero())
            .collect();
        let eliminate = |line: &mut Vec<Rational>| {
            let f = line[col].clone();
            if f.is_zero() {
                return;
            }
            for &j in &nonzero {
                line[j] -= &f * &pivot_line[j];
            }
        };
        for (r, line) in self.cells.iter_mut().enumerate() {
            if r != row {
                eliminate(line);
            }
        }
        eliminate(&mut self.cost);
        self.basis[row] = col;
    }
}
