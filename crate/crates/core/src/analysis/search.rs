//! Grid-restricted searches for anonymous rebate improvements, solved exactly.
//!
//! Unknowns are `Δ(x)` for every multiset `x` of `n - 1` grid points; agent
//! `i` at profile `θ` receives `Δ(θ_{-i})` on top of the baseline. Both
//! programs keep the improved mechanism feasible at every grid profile.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::analysis::dominance::scan;
use crate::error::{GrovesError, Result};
use crate::mechanism::{Evaluator, Mechanism, RebateTable};
use crate::profile::{GridSpec, Multiset};
use crate::rational::{int, Rational};
use crate::setting::Setting;
use crate::simplex::{LinearProgram, LpSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpStatus {
    /// The baseline is already optimal on the grid (optimum zero).
    NoImprovement,
    /// A strictly positive improvement was found.
    Improved,
    /// The objective can grow without limit.
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpOutcome {
    /// Optimal objective: summed over all ordered grid profiles and agents.
    pub optimum: Option<Rational>,
    /// The optimal `Δ`, one entry per grid multiset, when `status` is
    /// `Improved`.
    pub improvement: Option<RebateTable>,
    pub status: LpStatus,
    pub variables: usize,
    pub constraints: usize,
}

impl LpOutcome {
    /// `baseline` plus the optimal `Δ`.
    pub fn improved_mechanism(&self, baseline: &Mechanism) -> Option<Mechanism> {
        self.improvement.as_ref().map(|delta| Mechanism::Augmented {
            base: Box::new(baseline.clone()),
            delta: delta.clone(),
        })
    }
}

/// One grid profile: multiset index of each agent's `θ_{-i}`, its taxes.
struct ProfileRow {
    keys: Vec<usize>,
    taxes: Vec<Rational>,
    label: String,
}

struct Collected {
    multisets: Vec<Multiset>,
    rows: Vec<ProfileRow>,
}

fn collect(setting: &Setting, mechanism: &Mechanism, grid: &GridSpec) -> Result<Collected> {
    let n = setting.n();
    let ev = Evaluator::new(setting, mechanism)?;
    let multisets = grid.multisets(n - 1);
    let index: BTreeMap<&Multiset, usize> =
        multisets.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let scanned = scan(setting, grid, |p| {
        let taxes = ev.taxes(p)?;
        let keys = (0..n)
            .map(|i| Ok(index[&p.others(i)?]))
            .collect::<Result<Vec<_>>>()?;
        Ok((keys, taxes))
    })?;
    let rows = scanned
        .into_iter()
        .map(|(p, (keys, taxes))| ProfileRow {
            keys,
            taxes,
            label: p.to_string(),
        })
        .collect();
    Ok(Collected { multisets, rows })
}

fn check_baseline(rows: &[ProfileRow], pay_only: bool) -> Result<()> {
    for r in rows {
        if r.taxes.iter().sum::<Rational>().is_positive() {
            return Err(GrovesError::BaselineInfeasible(r.label.clone()));
        }
    }
    if pay_only {
        for r in rows {
            if let Some(agent) = r.taxes.iter().position(Signed::is_positive) {
                return Err(GrovesError::BaselineNotPayOnly {
                    profile: r.label.clone(),
                    agent,
                });
            }
        }
    }
    Ok(())
}

/// Feasibility rows `Σ_i Δ(θ_{-i}) <= -T(θ)`, deduplicated by their sparse
/// coefficient pattern (tightest bound kept), in first-seen order.
fn feasibility_rows(rows: &[ProfileRow]) -> Vec<(Vec<(usize, i64)>, Rational)> {
    let mut order: Vec<Vec<(usize, i64)>> = Vec::new();
    let mut bound: BTreeMap<Vec<(usize, i64)>, Rational> = BTreeMap::new();
    for r in rows {
        let mut counts: BTreeMap<usize, i64> = BTreeMap::new();
        for &k in &r.keys {
            *counts.entry(k).or_insert(0) += 1;
        }
        let pattern: Vec<(usize, i64)> = counts.into_iter().collect();
        let rhs = -r.taxes.iter().sum::<Rational>();
        match bound.get_mut(&pattern) {
            Some(b) => {
                if rhs < *b {
                    *b = rhs;
                }
            }
            None => {
                order.push(pattern.clone());
                bound.insert(pattern, rhs);
            }
        }
    }
    order
        .into_iter()
        .map(|p| {
            let b = bound[&p].clone();
            (p, b)
        })
        .collect()
}

/// How often each multiset occurs as some `θ_{-i}` over all ordered profiles.
fn weights(rows: &[ProfileRow], vars: usize) -> Vec<Rational> {
    let mut w = vec![0i64; vars];
    for r in rows {
        for &k in &r.keys {
            w[k] += 1;
        }
    }
    w.into_iter().map(int).collect()
}

fn finish(
    solution: LpSolution,
    multisets: &[Multiset],
    delta_of: impl Fn(&[Rational], usize) -> Rational,
    variables: usize,
    constraints: usize,
) -> Result<LpOutcome> {
    match solution {
        LpSolution::Unbounded => Ok(LpOutcome {
            optimum: None,
            improvement: None,
            status: LpStatus::Unbounded,
            variables,
            constraints,
        }),
        LpSolution::Optimal { value, x } => {
            if value.is_negative() {
                return Err(GrovesError::Internal(format!(
                    "optimum {value} below the feasible origin"
                )));
            }
            if value.is_zero() {
                return Ok(LpOutcome {
                    optimum: Some(value),
                    improvement: None,
                    status: LpStatus::NoImprovement,
                    variables,
                    constraints,
                });
            }
            let mut table = RebateTable::new();
            for (i, key) in multisets.iter().enumerate() {
                table.insert(key.as_slice().to_vec(), delta_of(&x, i))?;
            }
            Ok(LpOutcome {
                optimum: Some(value),
                improvement: Some(table),
                status: LpStatus::Improved,
                variables,
                constraints,
            })
        }
    }
}

/// Maximizes the summed tax increase `Σ_θ Σ_i Δ(θ_{-i})` subject to the
/// improved mechanism staying feasible and collecting no less revenue sum
/// than zero extra at each profile (`Σ_i Δ(θ_{-i}) >= 0`). `Δ` is free, so
/// individual agents may lose; a positive optimum shows the baseline is not
/// welfare undominated on the grid.
pub fn search_welfare_improvement(
    setting: &Setting,
    mechanism: &Mechanism,
    grid: &GridSpec,
) -> Result<LpOutcome> {
    let data = collect(setting, mechanism, grid)?;
    check_baseline(&data.rows, false)?;
    let v = data.multisets.len();
    let w = weights(&data.rows, v);
    // Δ = p - q; columns [p_0..p_v, q_0..q_v]
    let mut objective = w.clone();
    objective.extend(w.iter().map(|c| -c.clone()));
    let mut lp = LinearProgram::new(objective);
    for (pattern, rhs) in feasibility_rows(&data.rows) {
        let mut up = vec![Rational::zero(); 2 * v];
        for &(k, c) in &pattern {
            up[k] = int(c);
            up[v + k] = int(-c);
        }
        let down: Vec<Rational> = up.iter().map(|c| -c.clone()).collect();
        lp.add_le(up, rhs)?;
        lp.add_le(down, Rational::zero())?;
    }
    let (vars, rows) = (lp.var_count(), lp.row_count());
    finish(
        lp.solve()?,
        &data.multisets,
        |x, i| &x[i] - &x[v + i],
        vars,
        rows,
    )
}

/// Maximizes `Σ_θ Σ_i Δ(θ_{-i})` over `Δ >= 0`, so every agent is weakly
/// better off, subject to feasibility. With `pay_only`, additionally keeps
/// every improved tax nonpositive. A positive optimum shows the baseline is
/// dominated on the grid.
pub fn search_dominance_improvement(
    setting: &Setting,
    mechanism: &Mechanism,
    grid: &GridSpec,
    pay_only: bool,
) -> Result<LpOutcome> {
    let data = collect(setting, mechanism, grid)?;
    check_baseline(&data.rows, pay_only)?;
    let v = data.multisets.len();
    let mut lp = LinearProgram::new(weights(&data.rows, v));
    for (pattern, rhs) in feasibility_rows(&data.rows) {
        let mut row = vec![Rational::zero(); v];
        for &(k, c) in &pattern {
            row[k] = int(c);
        }
        lp.add_le(row, rhs)?;
    }
    if pay_only {
        let mut cap: Vec<Option<Rational>> = vec![None; v];
        for r in &data.rows {
            for (&k, t) in r.keys.iter().zip(&r.taxes) {
                let room = -t.clone();
                if cap[k].as_ref().is_none_or(|c| room < *c) {
                    cap[k] = Some(room);
                }
            }
        }
        for (k, c) in cap.into_iter().enumerate() {
            let mut row = vec![Rational::zero(); v];
            row[k] = int(1);
            lp.add_le(row, c.expect("every multiset occurs at some profile"))?;
        }
    }
    let (vars, rows) = (lp.var_count(), lp.row_count());
    finish(
        lp.solve()?,
        &data.multisets,
        |x, i| x[i].clone(),
        vars,
        rows,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::dominance::{check_feasible, compare, Verdict};
    use crate::auction::OelIndex;
    use crate::fixtures;
    use crate::setting::AuctionSetting;

    #[test]
    fn vcg_single_item_is_dominated() {
        let s: Setting = AuctionSetting::new(3, 1, int(0), int(2)).unwrap().into();
        let g = GridSpec::uniform(&s, 3).unwrap();
        let out = search_dominance_improvement(&s, &Mechanism::Vcg, &g, false).unwrap();
        assert_eq!(out.status, LpStatus::Improved);
        let better = out.improved_mechanism(&Mechanism::Vcg).unwrap();
        assert!(check_feasible(&s, &better, &g).unwrap().holds);
        let cmp = compare(&s, &Mechanism::Vcg, &better, &g).unwrap();
        assert_eq!(cmp.dominates, Verdict::Yes);
    }

    #[test]
    fn oel_has_no_dominance_improvement() {
        let a = AuctionSetting::new(3, 1, int(0), int(2)).unwrap();
        let s: Setting = a.clone().into();
        let g = GridSpec::uniform(&s, 3).unwrap();
        for idx in OelIndex::all(&a) {
            let out = search_dominance_improvement(&s, &Mechanism::Oel(idx), &g, false).unwrap();
            assert_eq!(out.status, LpStatus::NoImprovement, "k={}", idx.k());
            assert_eq!(out.optimum, Some(Rational::zero()));
        }
    }

    #[test]
    fn fixture_r_welfare_improvable() {
        let s = fixtures::table_setting();
        let g = fixtures::table_grid();
        let base = Mechanism::Tabular(fixtures::table_r());
        let out = search_welfare_improvement(&s, &base, &g).unwrap();
        assert_eq!(out.status, LpStatus::Improved);
        let better = out.improved_mechanism(&base).unwrap();
        assert!(check_feasible(&s, &better, &g).unwrap().holds);
        let cmp = compare(&s, &base, &better, &g).unwrap();
        assert_eq!(cmp.welfare_dominates, Verdict::Yes);
    }

    #[test]
    fn infeasible_baseline_rejected() {
        let s: Setting = AuctionSetting::new(3, 1, int(0), int(2)).unwrap().into();
        let g = GridSpec::uniform(&s, 3).unwrap();
        let bad = Mechanism::Linear(crate::mechanism::RebateCoefficients::new(
            int(1),
            vec![int(0); 2],
        ));
        assert!(matches!(
            search_dominance_improvement(&s, &bad, &g, false),
            Err(GrovesError::BaselineInfeasible(_))
        ));
        assert!(matches!(
            search_welfare_improvement(&s, &bad, &g),
            Err(GrovesError::BaselineInfeasible(_))
        ));
    }
}
