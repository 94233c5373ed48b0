//! Groves mechanisms described by their rebate relative to VCG, and their
//! pointwise evaluation.
//!
//! Every mechanism charges `t_i(θ) = t_i^VCG(θ) + h_i(θ_{-i})`. The rebate
//! never reads agent `i`'s own report, which is what makes each variant a
//! Groves mechanism. Most variants use one anonymous `h` evaluated on the
//! canonical multiset of the others' reports. Two are per-agent:
//! [`Mechanism::PerAgent`], and BCGC over unequal cost shares.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::auction::{self, OelIndex};
use crate::error::{GrovesError, Result};
use crate::profile::{join_exact, GridSpec, Multiset, TypeProfile};
use crate::public_project;
use crate::rational::{int, Rational};
use crate::setting::Setting;
use crate::transforms;

/// Constant plus one slope per order statistic of the others' reports:
/// `r(θ_{-i}) = a_0 + Σ_{j=1}^{n-1} a_j [θ_{-i}]_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RebateCoefficients {
    constant: Rational,
    slopes: Vec<Rational>,
}

impl RebateCoefficients {
    pub fn new(constant: Rational, slopes: Vec<Rational>) -> Self {
        Self { constant, slopes }
    }

    /// From `[a_0, a_1, .., a_{n-1}]`; needs at least `a_0` and one slope.
    pub fn from_vec(mut all: Vec<Rational>) -> Result<Self> {
        if all.len() < 2 {
            return Err(GrovesError::Parse(format!(
                "linear rebate needs a constant and at least one slope, got {} values",
                all.len()
            )));
        }
        let slopes = all.split_off(1);
        Ok(Self {
            constant: all.pop().expect("length checked"),
            slopes,
        })
    }

    /// Zero rebate for `n` agents; the mechanism it induces is VCG.
    pub fn zero(n: usize) -> Self {
        Self {
            constant: Rational::zero(),
            slopes: vec![Rational::zero(); n.saturating_sub(1)],
        }
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn slopes(&self) -> &[Rational] {
        &self.slopes
    }

    /// `a_j` for `1 <= j <= n-1`.
    pub fn slope(&self, j: usize) -> &Rational {
        &self.slopes[j - 1]
    }

    /// Number of agents the coefficients are sized for.
    pub fn agent_count(&self) -> usize {
        self.slopes.len() + 1
    }

    pub fn to_vec(&self) -> Vec<Rational> {
        std::iter::once(self.constant.clone())
            .chain(self.slopes.iter().cloned())
            .collect()
    }
}

/// Anonymous rebate given by value on canonical multisets.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct RebateTable {
    entries: BTreeMap<Multiset, Rational>,
}

impl RebateTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts under the canonical ordering of `others`. All keys must have
    /// the same length.
    pub fn insert(&mut self, others: Vec<Rational>, value: Rational) -> Result<Option<Rational>> {
        let key = Multiset::from_values(others);
        if let Some(existing) = self.entries.keys().next() {
            if existing.len() != key.len() {
                return Err(GrovesError::InconsistentTables(format!(
                    "key ({key}) has length {}, table keys have length {}",
                    key.len(),
                    existing.len()
                )));
            }
        }
        Ok(self.entries.insert(key, value))
    }

    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<Rational>, Rational)>,
    {
        let mut table = Self::new();
        for (k, v) in entries {
            table.insert(k, v)?;
        }
        Ok(table)
    }

    /// Lookup after canonicalizing `others`.
    pub fn get(&self, others: &[Rational]) -> Result<&Rational> {
        let key = Multiset::from_values(others.to_vec());
        self.get_canonical(&key)
    }

    pub fn get_canonical(&self, key: &Multiset) -> Result<&Rational> {
        self.entries
            .get(key)
            .ok_or_else(|| GrovesError::MissingTableKey(key.to_string()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Length of each key, if the table is non-empty.
    pub fn tuple_len(&self) -> Option<usize> {
        self.entries.keys().next().map(Multiset::len)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Multiset, &Rational)> {
        self.entries.iter()
    }

    /// Pointwise sum with another table on the union of keys; absent keys
    /// count as zero.
    pub fn plus(&self, other: &RebateTable) -> RebateTable {
        let mut entries = self.entries.clone();
        for (k, v) in &other.entries {
            *entries.entry(k.clone()).or_insert_with(Rational::zero) += v;
        }
        RebateTable { entries }
    }
}

/// One agent's rebate as a function of the ordered tuple of the others'
/// reports (agent order, skipping the agent itself). Need not be
/// permutation independent.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct AgentRebateTable {
    entries: BTreeMap<Vec<Rational>, Rational>,
}

impl AgentRebateTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, others: Vec<Rational>, value: Rational) -> Option<Rational> {
        self.entries.insert(others, value)
    }

    pub fn get(&self, others: &[Rational]) -> Result<&Rational> {
        self.entries
            .get(others)
            .ok_or_else(|| GrovesError::MissingTableKey(join_exact(others)))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &Vec<Rational>> {
        self.entries.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<Rational>, &Rational)> {
        self.entries.iter()
    }

    /// Table holding `f(tuple)` for every ordered tuple of `len` grid points.
    pub fn tabulate(
        grid: &GridSpec,
        len: usize,
        mut f: impl FnMut(&[Rational]) -> Rational,
    ) -> Self {
        let entries = grid
            .profiles(len)
            .map(|p| {
                let v = f(p.values());
                (p.values().to_vec(), v)
            })
            .collect();
        Self { entries }
    }
}

/// How the BCGC surplus `max_{θ'_i} T(θ'_i, θ_{-i})` is maximized.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SurplusStrategy {
    /// Over the exact breakpoints of the piecewise-linear total tax.
    Exact,
    /// Over the points of a grid only; a lower bound on the exact value.
    Grid(GridSpec),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Mechanism {
    Vcg,
    Linear(RebateCoefficients),
    Oel(OelIndex),
    Tabular(RebateTable),
    PerAgent(Vec<AgentRebateTable>),
    Bcgc {
        inner: Box<Mechanism>,
        strategy: SurplusStrategy,
    },
    /// `base` with an extra anonymous rebate `delta` added for every agent.
    Augmented {
        base: Box<Mechanism>,
        delta: RebateTable,
    },
}

impl Mechanism {
    /// BCGC transform of `inner` with the exact surplus.
    pub fn bcgc(inner: Mechanism) -> Self {
        Mechanism::Bcgc {
            inner: Box::new(inner),
            strategy: SurplusStrategy::Exact,
        }
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        match self {
            Mechanism::Vcg => "vcg".into(),
            Mechanism::Linear(c) => format!("linear:{}", join_exact(&c.to_vec())),
            Mechanism::Oel(idx) => format!("oel:k={}", idx.k()),
            Mechanism::Tabular(t) => format!("table[{} entries]", t.len()),
            Mechanism::PerAgent(t) => format!("per-agent[{} tables]", t.len()),
            Mechanism::Bcgc { inner, strategy } => match strategy {
                SurplusStrategy::Exact => format!("bcgc:{}", inner.label()),
                SurplusStrategy::Grid(g) => format!("bcgc[grid {}]:{}", g.len(), inner.label()),
            },
            Mechanism::Augmented { base, delta } => {
                format!("{}+table[{} entries]", base.label(), delta.len())
            }
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Decision {
    /// Winning agents (0-based, ascending).
    Allocation(Vec<usize>),
    /// Whether the public project is built.
    Project(bool),
}

/// Outcome of a mechanism at one profile. `total_tax` is the exact sum of
/// `taxes`, and `welfare` is the sum of valuations plus `total_tax`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TaxReport {
    pub decision: Decision,
    pub taxes: Vec<Rational>,
    pub total_tax: Rational,
    pub utilities: Vec<Rational>,
    pub welfare: Rational,
}

enum Prepared<'a> {
    Vcg,
    Linear(RebateCoefficients),
    Tabular(&'a RebateTable),
    PerAgent(&'a [AgentRebateTable]),
    Bcgc {
        inner: Box<Evaluator<'a>>,
        strategy: &'a SurplusStrategy,
    },
    Augmented {
        base: Box<Evaluator<'a>>,
        delta: &'a RebateTable,
    },
}

/// A mechanism bound to a setting, validated once and reused across
/// profiles. OEL indices are resolved to coefficients here.
pub struct Evaluator<'a> {
    setting: &'a Setting,
    mechanism: &'a Mechanism,
    prepared: Prepared<'a>,
}

impl<'a> Evaluator<'a> {
    pub fn new(setting: &'a Setting, mechanism: &'a Mechanism) -> Result<Self> {
        let n = setting.n();
        let prepared = match mechanism {
            Mechanism::Vcg => Prepared::Vcg,
            Mechanism::Linear(c) => {
                if c.agent_count() != n {
                    return Err(GrovesError::InvalidSetting(format!(
                        "linear rebate sized for {} agents, setting has {n}",
                        c.agent_count()
                    )));
                }
                Prepared::Linear(c.clone())
            }
            Mechanism::Oel(idx) => {
                let auction = setting.as_auction().map_err(|_| {
                    GrovesError::DomainMismatch("OEL mechanisms exist only for auctions".into())
                })?;
                Prepared::Linear(auction::oel_coefficients(auction, *idx)?)
            }
            Mechanism::Tabular(t) => {
                if let Some(len) = t.tuple_len() {
                    if len != n - 1 {
                        return Err(GrovesError::InvalidSetting(format!(
                            "rebate table keyed by {len}-tuples, setting needs {}",
                            n - 1
                        )));
                    }
                }
                Prepared::Tabular(t)
            }
            Mechanism::PerAgent(tables) => {
                if tables.len() != n {
                    return Err(GrovesError::InconsistentTables(format!(
                        "{} per-agent tables for {n} agents",
                        tables.len()
                    )));
                }
                Prepared::PerAgent(tables)
            }
            Mechanism::Bcgc { inner, strategy } => {
                if *strategy == SurplusStrategy::Exact {
                    transforms::check_exact_support(inner)?;
                }
                Prepared::Bcgc {
                    inner: Box::new(Evaluator::new(setting, inner)?),
                    strategy,
                }
            }
            Mechanism::Augmented { base, delta } => {
                if let Some(len) = delta.tuple_len() {
                    if len != n - 1 {
                        return Err(GrovesError::InvalidSetting(format!(
                            "rebate table keyed by {len}-tuples, setting needs {}",
                            n - 1
                        )));
                    }
                }
                Prepared::Augmented {
                    base: Box::new(Evaluator::new(setting, base)?),
                    delta,
                }
            }
        };
        Ok(Self {
            setting,
            mechanism,
            prepared,
        })
    }

    pub fn setting(&self) -> &'a Setting {
        self.setting
    }

    pub fn mechanism(&self) -> &'a Mechanism {
        self.mechanism
    }

    /// `h_i(θ_{-i})`: agent `agent`'s tax minus its VCG tax.
    pub fn rebate(&self, profile: &TypeProfile, agent: usize) -> Result<Rational> {
        let others = profile.exclude(agent)?;
        self.rebate_from_others(&others, agent)
    }

    pub(crate) fn rebate_from_others(&self, others: &[Rational], agent: usize) -> Result<Rational> {
        match &self.prepared {
            Prepared::Vcg => Ok(Rational::zero()),
            Prepared::Linear(c) => {
                let key = Multiset::from_values(others.to_vec());
                Ok(auction::linear_rebate_sorted(c, key.as_slice()))
            }
            Prepared::Tabular(t) => t.get(others).cloned(),
            Prepared::PerAgent(tables) => tables[agent].get(others).cloned(),
            Prepared::Bcgc { inner, strategy } => {
                let base = inner.rebate_from_others(others, agent)?;
                let surplus = transforms::surplus_with(inner, agent, others, strategy)?;
                Ok(base - surplus / int(self.setting.n() as i64))
            }
            Prepared::Augmented { base, delta } => {
                Ok(base.rebate_from_others(others, agent)? + delta.get(others)?)
            }
        }
    }

    pub fn taxes(&self, profile: &TypeProfile) -> Result<Vec<Rational>> {
        let mut taxes = vcg_taxes(self.setting, profile);
        if matches!(self.prepared, Prepared::Vcg) {
            return Ok(taxes);
        }
        for (i, t) in taxes.iter_mut().enumerate() {
            *t += self.rebate(profile, i)?;
        }
        Ok(taxes)
    }

    pub fn total_tax(&self, profile: &TypeProfile) -> Result<Rational> {
        Ok(self.taxes(profile)?.into_iter().sum())
    }

    pub fn report(&self, profile: &TypeProfile) -> Result<TaxReport> {
        let taxes = self.taxes(profile)?;
        let (decision, valuations) = decide(self.setting, profile);
        let total_tax: Rational = taxes.iter().sum();
        let utilities: Vec<Rational> = valuations.iter().zip(&taxes).map(|(v, t)| v + t).collect();
        let welfare = valuations.iter().sum::<Rational>() + &total_tax;
        Ok(TaxReport {
            decision,
            taxes,
            total_tax,
            utilities,
            welfare,
        })
    }
}

/// Efficient decision and each agent's valuation of it.
pub fn decide(setting: &Setting, profile: &TypeProfile) -> (Decision, Vec<Rational>) {
    match setting {
        Setting::Auction(a) => {
            let winners = auction::efficient_allocation(a, profile);
            let mut vals = vec![Rational::zero(); profile.len()];
            for &w in &winners {
                vals[w] = profile.value(w).clone();
            }
            (Decision::Allocation(winners), vals)
        }
        Setting::PublicProject(p) => {
            let built = public_project::pp_decision(p, profile);
            (
                Decision::Project(built),
                public_project::valuations(p, profile.values()),
            )
        }
    }
}

/// VCG taxes in either domain.
pub fn vcg_taxes(setting: &Setting, profile: &TypeProfile) -> Vec<Rational> {
    match setting {
        Setting::Auction(a) => auction::vcg_tax(a, profile),
        Setting::PublicProject(p) => public_project::pp_vcg_tax(p, profile),
    }
}

/// One-shot evaluation of `mechanism` at `profile`.
pub fn evaluate(
    setting: &Setting,
    mechanism: &Mechanism,
    profile: &TypeProfile,
) -> Result<TaxReport> {
    Evaluator::new(setting, mechanism)?.report(profile)
}
