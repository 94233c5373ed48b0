//! Mechanism-to-mechanism transformations.
//!
//! * BCGC: `t_i^BCGC(θ) = t_i(θ) - S_i(θ_{-i}) / n`, where
//!   `S_i(θ_{-i}) = max_{θ'_i} T(θ'_i, θ_{-i})` is the largest total tax agent
//!   `i` could induce. The result is always feasible, and weakly better for
//!   every agent whenever the input was feasible.
//! * Anonymization: averages a family of per-agent rebates over agents and
//!   over every ordering of the other reports, producing one
//!   permutation-independent rebate.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{GrovesError, Result};
use crate::mechanism::{AgentRebateTable, Evaluator, Mechanism, RebateTable, SurplusStrategy};
use crate::profile::{GridSpec, Multiset, TypeProfile};
use crate::public_project;
use crate::rational::{int, Rational};
use crate::setting::Setting;

/// The exact strategy needs a total tax that is piecewise linear in one
/// agent's report with known kinks.
pub(crate) fn check_exact_support(inner: &Mechanism) -> Result<()> {
    match inner {
        Mechanism::Vcg | Mechanism::Linear(_) | Mechanism::Oel(_) => Ok(()),
        other => Err(GrovesError::UnsupportedStrategy(format!(
            "exact BCGC surplus is available for vcg, linear and oel mechanisms, not {}; \
             use a grid strategy",
            other.label()
        ))),
    }
}

/// Candidate reports for agent `agent` that contain every kink of the total
/// tax of a VCG-plus-linear-rebate mechanism. Sorted and deduplicated.
pub fn exact_candidates(setting: &Setting, agent: usize, others: &[Rational]) -> Vec<Rational> {
    let (lo, hi) = setting.type_bounds();
    let mut out: Vec<Rational> = match setting {
        Setting::Auction(_) => vec![lo.clone(), hi.clone()],
        Setting::PublicProject(p) => public_project::pp_breakpoints(p, agent, others),
    };
    // order statistics of the others move when the sweep passes their values
    out.extend(others.iter().filter(|v| **v >= lo && **v <= hi).cloned());
    out.sort();
    out.dedup();
    out
}

pub(crate) fn surplus_with(
    inner: &Evaluator<'_>,
    agent: usize,
    others: &[Rational],
    strategy: &SurplusStrategy,
) -> Result<Rational> {
    let candidates = match strategy {
        SurplusStrategy::Exact => exact_candidates(inner.setting(), agent, others),
        SurplusStrategy::Grid(g) => g.points().to_vec(),
    };
    let mut best: Option<Rational> = None;
    for y in candidates {
        let total = inner.total_tax(&TypeProfile::insert(others, agent, y))?;
        if best.as_ref().is_none_or(|b| total > *b) {
            best = Some(total);
        }
    }
    Ok(best.expect("candidate sets are never empty"))
}

/// `S_i(θ_{-i})` of `mechanism` for agent `agent`; `others` in agent order.
pub fn bcgc_surplus(
    setting: &Setting,
    mechanism: &Mechanism,
    agent: usize,
    others: &[Rational],
    strategy: &SurplusStrategy,
) -> Result<Rational> {
    let n = setting.n();
    if agent >= n {
        return Err(GrovesError::IndexOutOfRange {
            index: agent + 1,
            len: n,
        });
    }
    if others.len() != n - 1 {
        return Err(GrovesError::InvalidProfile(format!(
            "expected {} other types, got {}",
            n - 1,
            others.len()
        )));
    }
    // validates bounds of the others
    TypeProfile::new(
        setting,
        TypeProfile::insert(others, agent, setting.type_bounds().0)
            .values()
            .to_vec(),
    )?;
    if *strategy == SurplusStrategy::Exact {
        check_exact_support(mechanism)?;
    }
    let inner = Evaluator::new(setting, mechanism)?;
    surplus_with(&inner, agent, others, strategy)
}

/// The BCGC-transformed mechanism, validated against `setting`.
pub fn bcgc_transform(
    setting: &Setting,
    mechanism: &Mechanism,
    strategy: SurplusStrategy,
) -> Result<Mechanism> {
    let out = Mechanism::Bcgc {
        inner: Box::new(mechanism.clone()),
        strategy,
    };
    Evaluator::new(setting, &out)?;
    Ok(out)
}

/// `S_i` tabulated for one agent over every ordered tuple of other reports
/// on a grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurplusFunction {
    pub agent: usize,
    pub values: BTreeMap<Vec<Rational>, Rational>,
}

impl SurplusFunction {
    pub fn tabulate(
        setting: &Setting,
        mechanism: &Mechanism,
        agent: usize,
        grid: &GridSpec,
        strategy: &SurplusStrategy,
    ) -> Result<Self> {
        if *strategy == SurplusStrategy::Exact {
            check_exact_support(mechanism)?;
        }
        let inner = Evaluator::new(setting, mechanism)?;
        let mut values = BTreeMap::new();
        for others in grid.profiles(setting.n() - 1) {
            let s = surplus_with(&inner, agent, others.values(), strategy)?;
            values.insert(others.values().to_vec(), s);
        }
        Ok(Self { agent, values })
    }

    pub fn max(&self) -> Option<&Rational> {
        self.values.values().max()
    }
}

/// Permutation-averaged anonymous rebate of a per-agent family:
/// `h'(x) = (1/n!) Σ_{π ∈ Π(n-1)} Σ_j h_j(x^π)`.
///
/// Averaging runs over the distinct arrangements of each multiset. Every
/// arrangement is hit by the same number of raw permutations, so the mean
/// over arrangements equals the mean over permutations.
pub fn anonymize(tables: &[AgentRebateTable]) -> Result<RebateTable> {
    let n = tables.len();
    if n < 2 {
        return Err(GrovesError::InconsistentTables(format!(
            "need one table per agent for at least 2 agents, got {n}"
        )));
    }
    let domain: BTreeSet<&Vec<Rational>> = tables[0].keys().collect();
    if domain.is_empty() {
        return Err(GrovesError::InconsistentTables("tables are empty".into()));
    }
    if let Some(bad) = domain.iter().find(|k| k.len() != n - 1) {
        return Err(GrovesError::InconsistentTables(format!(
            "key of length {} in a family of {n} agents",
            bad.len()
        )));
    }
    for (j, t) in tables.iter().enumerate().skip(1) {
        if t.len() != domain.len() || t.keys().any(|k| !domain.contains(k)) {
            return Err(GrovesError::InconsistentTables(format!(
                "table of agent {} is defined on a different domain than agent 1",
                j + 1
            )));
        }
    }
    let canon: BTreeSet<Multiset> = domain
        .iter()
        .map(|k| Multiset::from_values((*k).clone()))
        .collect();
    let scale = int(n as i64);
    let mut out = RebateTable::new();
    for key in canon {
        let arrangements = key.arrangements();
        let mut sum = Rational::from_integer(0.into());
        for y in &arrangements {
            for t in tables {
                sum += t.get(y).map_err(|_| {
                    GrovesError::InconsistentTables(format!(
                        "domain is not closed under permutation: missing ({})",
                        crate::profile::join_exact(y)
                    ))
                })?;
            }
        }
        let value = sum / (&scale * int(arrangements.len() as i64));
        out.insert(key.into_vec(), value)?;
    }
    Ok(out)
}
