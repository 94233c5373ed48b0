use std::cmp::Ordering;

use num_traits::Signed;
use rayon::prelude::*;

use crate::error::Result;
use crate::mechanism::{Evaluator, Mechanism};
use crate::profile::{GridSpec, TypeProfile};
use crate::rational::Rational;
use crate::setting::Setting;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Yes,
    No,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Verdict::Yes
    }
}

/// A profile, optionally an agent at it, and the quantity that made it a
/// witness (a tax difference, a total tax, or an individual tax).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Witness {
    pub profile: TypeProfile,
    pub agent: Option<usize>,
    pub value: Rational,
}

/// Whether mechanism B dominates / welfare dominates mechanism A over a grid.
///
/// Witnesses are the lexicographically first profiles (first agent within a
/// profile) where the relevant inequality is strict in B's favour
/// (`strict_*`) or fails (`violation_*`). Witness values are `B - A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceResult {
    pub dominates: Verdict,
    pub welfare_dominates: Verdict,
    pub equal: bool,
    /// First `(θ, i)` with `t^B_i(θ) > t^A_i(θ)`.
    pub strict_witness: Option<Witness>,
    /// First `(θ, i)` with `t^B_i(θ) < t^A_i(θ)`.
    pub violation_witness: Option<Witness>,
    /// First `θ` with `Σ t^B(θ) > Σ t^A(θ)`.
    pub welfare_strict_witness: Option<Witness>,
    /// First `θ` with `Σ t^B(θ) < Σ t^A(θ)`.
    pub welfare_violation_witness: Option<Witness>,
    pub profiles_checked: usize,
}

struct ProfileSummary {
    strict: Option<(usize, Rational)>,
    violation: Option<(usize, Rational)>,
    total_diff: Rational,
}

fn summarize(a: &Evaluator<'_>, b: &Evaluator<'_>, p: &TypeProfile) -> Result<ProfileSummary> {
    let ta = a.taxes(p)?;
    let tb = b.taxes(p)?;
    let mut strict = None;
    let mut violation = None;
    let mut total_diff = Rational::from_integer(0.into());
    for (i, (x, y)) in ta.iter().zip(&tb).enumerate() {
        let d = y - x;
        match d.cmp(&Rational::from_integer(0.into())) {
            Ordering::Greater if strict.is_none() => strict = Some((i, d.clone())),
            Ordering::Less if violation.is_none() => violation = Some((i, d.clone())),
            _ => {}
        }
        total_diff += d;
    }
    Ok(ProfileSummary {
        strict,
        violation,
        total_diff,
    })
}

/// Scans every grid profile; returns per-profile results in lexicographic
/// order regardless of how the work was split across threads.
pub(crate) fn scan<T, F>(setting: &Setting, grid: &GridSpec, f: F) -> Result<Vec<(TypeProfile, T)>>
where
    T: Send,
    F: Fn(&TypeProfile) -> Result<T> + Sync,
{
    let n = setting.n();
    (0..grid.profile_count(n))
        .into_par_iter()
        .map(|idx| {
            let p = grid.profile_at(n, idx);
            let out = f(&p)?;
            Ok((p, out))
        })
        .collect()
}

/// Does `b` dominate / welfare dominate `a` on every profile of `grid`?
pub fn compare(
    setting: &Setting,
    a: &Mechanism,
    b: &Mechanism,
    grid: &GridSpec,
) -> Result<DominanceResult> {
    let ea = Evaluator::new(setting, a)?;
    let eb = Evaluator::new(setting, b)?;
    let rows = scan(setting, grid, |p| summarize(&ea, &eb, p))?;
    let profiles_checked = rows.len();

    let mut strict_witness = None;
    let mut violation_witness = None;
    let mut welfare_strict_witness = None;
    let mut welfare_violation_witness = None;
    for (p, s) in rows {
        if strict_witness.is_none() {
            if let Some((i, d)) = &s.strict {
                strict_witness = Some(Witness {
                    profile: p.clone(),
                    agent: Some(*i),
                    value: d.clone(),
                });
            }
        }
        if violation_witness.is_none() {
            if let Some((i, d)) = &s.violation {
                violation_witness = Some(Witness {
                    profile: p.clone(),
                    agent: Some(*i),
                    value: d.clone(),
                });
            }
        }
        if welfare_strict_witness.is_none() && s.total_diff.is_positive() {
            welfare_strict_witness = Some(Witness {
                profile: p.clone(),
                agent: None,
                value: s.total_diff.clone(),
            });
        }
        if welfare_violation_witness.is_none() && s.total_diff.is_negative() {
            welfare_violation_witness = Some(Witness {
                profile: p,
                agent: None,
                value: s.total_diff,
            });
        }
    }
    let dominates = violation_witness.is_none() && strict_witness.is_some();
    let welfare_dominates = welfare_violation_witness.is_none() && welfare_strict_witness.is_some();
    Ok(DominanceResult {
        dominates: Verdict::from_bool(dominates),
        welfare_dominates: Verdict::from_bool(welfare_dominates),
        equal: strict_witness.is_none() && violation_witness.is_none(),
        strict_witness,
        violation_witness,
        welfare_strict_witness,
        welfare_violation_witness,
        profiles_checked,
    })
}

/// Outcome of a universally quantified grid check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridCheck {
    pub holds: bool,
    /// First counterexample in lexicographic order.
    pub witness: Option<Witness>,
    pub profiles_checked: usize,
}

/// `Σ_i t_i(θ) <= 0` on every grid profile. The witness carries the
/// offending total.
pub fn check_feasible(
    setting: &Setting,
    mechanism: &Mechanism,
    grid: &GridSpec,
) -> Result<GridCheck> {
    let ev = Evaluator::new(setting, mechanism)?;
    let rows = scan(setting, grid, |p| ev.total_tax(p))?;
    let profiles_checked = rows.len();
    let witness = rows
        .into_iter()
        .find(|(_, t)| t.is_positive())
        .map(|(profile, value)| Witness {
            profile,
            agent: None,
            value,
        });
    Ok(GridCheck {
        holds: witness.is_none(),
        witness,
        profiles_checked,
    })
}

/// `t_i(θ) <= 0` for every agent and grid profile. The witness carries the
/// positive tax.
pub fn check_pay_only(
    setting: &Setting,
    mechanism: &Mechanism,
    grid: &GridSpec,
) -> Result<GridCheck> {
    let ev = Evaluator::new(setting, mechanism)?;
    let rows = scan(setting, grid, |p| {
        Ok(ev
            .taxes(p)?
            .into_iter()
            .enumerate()
            .find(|(_, t)| t.is_positive()))
    })?;
    let profiles_checked = rows.len();
    let witness = rows.into_iter().find_map(|(profile, hit)| {
        hit.map(|(agent, value)| Witness {
            profile,
            agent: Some(agent),
            value,
        })
    });
    Ok(GridCheck {
        holds: witness.is_none(),
        witness,
        profiles_checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auction::OelIndex;
    use crate::fixtures;
    use crate::mechanism::RebateCoefficients;
    use crate::rational::{int, rat};
    use crate::setting::{AuctionSetting, PublicProjectSetting};

    #[test]
    fn self_comparison_is_equal() {
        let s = fixtures::table_setting();
        let g = fixtures::table_grid();
        let m = Mechanism::Tabular(fixtures::table_r());
        let r = compare(&s, &m, &m, &g).unwrap();
        assert!(r.equal);
        assert_eq!(r.dominates, Verdict::No);
        assert_eq!(r.welfare_dominates, Verdict::No);
        assert!(r.strict_witness.is_none() && r.violation_witness.is_none());
        assert_eq!(r.profiles_checked, 256);
    }

    #[test]
    fn fixture_pair_welfare_but_not_dominance() {
        let s = fixtures::table_setting();
        let g = fixtures::table_grid();
        let t = Mechanism::Tabular(fixtures::table_r());
        let tp = Mechanism::Tabular(fixtures::table_r_prime());
        let r = compare(&s, &t, &tp, &g).unwrap();
        assert_eq!(r.welfare_dominates, Verdict::Yes);
        assert_eq!(r.dominates, Verdict::No);
        let v = r.violation_witness.unwrap();
        let others = v.profile.others(v.agent.unwrap()).unwrap();
        let key = others.to_string();
        assert!(key == "3,2,1" || key == "3,3,2", "{key}");
        // lexicographically first strict profile
        let w = r.welfare_strict_witness.unwrap();
        assert_eq!(w.profile.to_string(), "0,0,1,2");
        assert_eq!(w.value, rat(5, 12));
    }

    #[test]
    fn bc_dominates_vcg_single_item() {
        let s: Setting = AuctionSetting::new(3, 1, int(0), int(2)).unwrap().into();
        let g = GridSpec::uniform(&s, 3).unwrap();
        let r = compare(&s, &Mechanism::Vcg, &Mechanism::bcgc(Mechanism::Vcg), &g).unwrap();
        assert_eq!(r.dominates, Verdict::Yes);
        assert_eq!(r.welfare_dominates, Verdict::Yes);
    }

    #[test]
    fn feasibility_checks() {
        let s: Setting = AuctionSetting::new(4, 1, int(0), int(3)).unwrap().into();
        let g = GridSpec::uniform(&s, 4).unwrap();
        assert!(check_feasible(&s, &Mechanism::Vcg, &g).unwrap().holds);
        for idx in OelIndex::all(s.as_auction().unwrap()) {
            assert!(check_feasible(&s, &Mechanism::Oel(idx), &g).unwrap().holds);
        }
        let constant = Mechanism::Linear(RebateCoefficients::new(int(1), vec![int(0); 3]));
        let c = check_feasible(&s, &constant, &g).unwrap();
        assert!(!c.holds);
        let w = c.witness.unwrap();
        // VCG revenue is zero there, so the rebates of 1 each show up in full
        assert_eq!(w.profile.to_string(), "0,0,0,0");
        assert_eq!(w.value, int(4));
    }

    #[test]
    fn pay_only_checks() {
        let pp: Setting = PublicProjectSetting::new(int(100), vec![int(10), int(40), int(50)])
            .unwrap()
            .into();
        let g = GridSpec::uniform(&pp, 11).unwrap();
        assert!(check_pay_only(&pp, &Mechanism::Vcg, &g).unwrap().holds);
        let bc = check_pay_only(&pp, &Mechanism::bcgc(Mechanism::Vcg), &g).unwrap();
        assert!(!bc.holds);
        let w = bc.witness.unwrap();
        assert!(w.value.is_positive());
    }
}
