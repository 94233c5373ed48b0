//! Exact classification of linear rebate mechanisms in the unit-demand
//! auction.
//!
//! For `t_i = t_i^VCG + a_0 + Σ_j a_j [θ_{-i}]_j`, the total tax is an affine
//! function of the sorted full profile `s_1 >= ... >= s_n`:
//! `T = C_0 + Σ_j C_j s_j`. Every agent's `θ_{-i}` is `s` with one slot
//! removed, so the worst case for one fixed `θ_{-i}` is the removed value at
//! a boundary or tied with a neighbour. That gives `n + 1` affine forms in
//! `θ_{-i}` whose common nonpositivity is exactly feasibility.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::auction::{oel_coefficients, OelIndex};
use crate::error::{GrovesError, Result};
use crate::mechanism::RebateCoefficients;
use crate::rational::{int, Rational};
use crate::setting::AuctionSetting;

/// `C_0, C_1, ..., C_n` of the total tax on the sorted profile.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TotalCoefficients(Vec<Rational>);

impl TotalCoefficients {
    /// From `C_0..C_n`.
    pub fn from_vec(c: Vec<Rational>) -> Self {
        Self(c)
    }

    pub fn constant(&self) -> &Rational {
        &self.0[0]
    }

    /// `C_j`, 1-based.
    pub fn slot(&self, j: usize) -> &Rational {
        &self.0[j]
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    /// `T` at a full profile sorted in descending order.
    pub fn eval_sorted(&self, sorted: &[Rational]) -> Rational {
        let mut acc = self.0[0].clone();
        for (c, s) in self.0[1..].iter().zip(sorted) {
            acc += c * s;
        }
        acc
    }
}

pub fn total_coefficients(
    setting: &AuctionSetting,
    coeffs: &RebateCoefficients,
) -> Result<TotalCoefficients> {
    let n = setting.n();
    let m = setting.m();
    if coeffs.agent_count() != n {
        return Err(GrovesError::InvalidSetting(format!(
            "linear rebate sized for {} agents, setting has {n}",
            coeffs.agent_count()
        )));
    }
    let mut c = vec![Rational::zero(); n + 1];
    c[0] = int(n as i64) * coeffs.constant();
    for (j, cj) in c.iter_mut().enumerate().skip(1) {
        if j >= 2 {
            *cj += int(j as i64 - 1) * coeffs.slope(j - 1);
        }
        if j < n {
            *cj += int((n - j) as i64) * coeffs.slope(j);
        }
    }
    c[m + 1] -= int(m as i64);
    Ok(TotalCoefficients(c))
}

/// `constant + Σ coeffs[j] x_j` over `x = θ_{-i}` sorted descending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineForm {
    pub constant: Rational,
    pub coeffs: Vec<Rational>,
}

impl AffineForm {
    pub fn eval(&self, x: &[Rational]) -> Rational {
        let mut acc = self.constant.clone();
        for (c, v) in self.coeffs.iter().zip(x) {
            acc += c * v;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                write!(f, " + ({c})·x{}", j + 1)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum Slot {
    Const(bool), // true = U, false = L
    Var(usize),
}

fn slots(n: usize, e: usize) -> Vec<Slot> {
    let vars = (0..n - 1).map(Slot::Var);
    if e == 0 {
        std::iter::once(Slot::Const(true)).chain(vars).collect()
    } else if e == n {
        vars.chain(std::iter::once(Slot::Const(false))).collect()
    } else {
        let mut v: Vec<Slot> = (0..e).map(Slot::Var).collect();
        v.push(Slot::Var(e - 1));
        v.extend((e..n - 1).map(Slot::Var));
        v
    }
}

/// The full sorted profile obtained by inserting the boundary value of
/// expression `e` into `x`.
pub fn boundary_profile(setting: &AuctionSetting, e: usize, x: &[Rational]) -> Vec<Rational> {
    slots(setting.n(), e)
        .into_iter()
        .map(|s| match s {
            Slot::Const(true) => setting.upper().clone(),
            Slot::Const(false) => setting.lower().clone(),
            Slot::Var(j) => x[j].clone(),
        })
        .collect()
}

/// Expression `e` (0..=n): `T` with agent `i`'s own value at `U` (e = 0),
/// at `L` (e = n), or tied with `x_e` (otherwise).
pub fn boundary_expressions(
    setting: &AuctionSetting,
    total: &TotalCoefficients,
) -> Vec<AffineForm> {
    let n = setting.n();
    (0..=n)
        .map(|e| {
            let mut form = AffineForm {
                constant: total.constant().clone(),
                coeffs: vec![Rational::zero(); n - 1],
            };
            for (pos, s) in slots(n, e).into_iter().enumerate() {
                let c = total.slot(pos + 1);
                match s {
                    Slot::Const(true) => form.constant += c * setting.upper(),
                    Slot::Const(false) => form.constant += c * setting.lower(),
                    Slot::Var(j) => form.coeffs[j] += c,
                }
            }
            form
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Classification {
    /// Runs a deficit at `witness` (a full profile sorted descending).
    Infeasible {
        witness: Vec<Rational>,
        total: Rational,
    },
    /// Feasible with one boundary expression identically zero; equals the
    /// OEL mechanism of that index.
    UndominatedOel(OelIndex),
    /// Feasible with every boundary expression strictly negative at
    /// `witness` (a `θ_{-i}` sorted descending). Any rebate increase up to
    /// `slack / n` at that point keeps the mechanism feasible.
    Dominated {
        slack: Rational,
        witness: Vec<Rational>,
    },
}

fn vertices(setting: &AuctionSetting) -> Vec<Vec<Rational>> {
    let k = setting.n() - 1;
    (0..=k)
        .rev()
        .map(|p| {
            let mut v = vec![setting.upper().clone(); p];
            v.extend(std::iter::repeat_n(setting.lower().clone(), k - p));
            v
        })
        .collect()
}

fn barycenter(points: &[Vec<Rational>]) -> Vec<Rational> {
    let count = int(points.len() as i64);
    (0..points[0].len())
        .map(|j| points.iter().map(|p| &p[j]).sum::<Rational>() / &count)
        .collect()
}

/// Feasible / undominated / dominated, decided exactly.
///
/// The forms are affine on the simplex of sorted `θ_{-i}`, whose vertices are
/// `(U,..,U,L,..,L)`, so checking the vertices decides feasibility. A
/// feasible mechanism with no form identically zero has a point where all
/// forms are strictly negative; the barycenter of the vertices is one.
pub fn classify_linear(
    setting: &AuctionSetting,
    coeffs: &RebateCoefficients,
) -> Result<Classification> {
    let total = total_coefficients(setting, coeffs)?;
    let forms = boundary_expressions(setting, &total);
    let verts = vertices(setting);

    let mut worst: Option<(Rational, usize, usize)> = None;
    for (vi, v) in verts.iter().enumerate() {
        for (e, f) in forms.iter().enumerate() {
            let val = f.eval(v);
            if val.is_positive() && worst.as_ref().is_none_or(|(w, _, _)| val > *w) {
                worst = Some((val, vi, e));
            }
        }
    }
    if let Some((val, vi, e)) = worst {
        return Ok(Classification::Infeasible {
            witness: boundary_profile(setting, e, &verts[vi]),
            total: val,
        });
    }

    if let Some(e) = forms.iter().position(AffineForm::is_zero) {
        let idx = OelIndex::new(setting, e).map_err(|err| {
            GrovesError::Internal(format!(
                "feasible mechanism vanishes on expression {e}: {err}"
            ))
        })?;
        if oel_coefficients(setting, idx)? != *coeffs {
            return Err(GrovesError::Internal(format!(
                "feasible mechanism vanishes on expression {e} but differs from OEL k={e}"
            )));
        }
        return Ok(Classification::UndominatedOel(idx));
    }

    let mut candidates = verts.clone();
    candidates.push(barycenter(&verts));
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    for x in candidates {
        let peak = forms.iter().map(|f| f.eval(&x)).max().expect("n + 1 forms");
        let slack = -peak;
        if best.as_ref().is_none_or(|(b, _)| slack > *b) {
            best = Some((slack, x));
        }
    }
    let (slack, witness) = best.expect("at least one candidate");
    if !slack.is_positive() {
        return Err(GrovesError::Internal(
            "feasible mechanism without a vanishing expression has no slack".into(),
        ));
    }
    Ok(Classification::Dominated { slack, witness })
}
