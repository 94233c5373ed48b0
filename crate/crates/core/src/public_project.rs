//! Public project provision with (possibly unequal) cost shares. Agent `i`
//! values decision `d` at `d (θ_i - c_i)`.

use num_traits::{Signed, Zero};

use crate::error::{GrovesError, Result};
use crate::profile::TypeProfile;
use crate::rational::{int, Rational};
use crate::setting::PublicProjectSetting;

/// Build iff the declared total reaches the cost (weak inequality).
pub fn pp_decision(setting: &PublicProjectSetting, profile: &TypeProfile) -> bool {
    decision_of(setting, profile.values())
}

fn decision_of(setting: &PublicProjectSetting, values: &[Rational]) -> bool {
    values.iter().sum::<Rational>() >= *setting.cost()
}

fn value_of(
    setting: &PublicProjectSetting,
    built: bool,
    agent: usize,
    theta: &Rational,
) -> Rational {
    if built {
        theta - setting.share(agent)
    } else {
        Rational::zero()
    }
}

/// `max_d Σ_{j≠i} v_j(d, θ_j)` = `max(0, Σ_{j≠i} (θ_j - c_j))`.
fn best_without(setting: &PublicProjectSetting, values: &[Rational], agent: usize) -> Rational {
    let s: Rational = values
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != agent)
        .map(|(j, v)| v - setting.share(j))
        .sum();
    if s.is_positive() {
        s
    } else {
        Rational::zero()
    }
}

pub(crate) fn vcg_taxes_of(setting: &PublicProjectSetting, values: &[Rational]) -> Vec<Rational> {
    let built = decision_of(setting, values);
    let vals: Vec<Rational> = values
        .iter()
        .enumerate()
        .map(|(j, v)| value_of(setting, built, j, v))
        .collect();
    let welfare: Rational = vals.iter().sum();
    (0..values.len())
        .map(|i| &welfare - &vals[i] - best_without(setting, values, i))
        .collect()
}

/// Clarke taxes; nonzero only for pivotal agents and never positive.
pub fn pp_vcg_tax(setting: &PublicProjectSetting, profile: &TypeProfile) -> Vec<Rational> {
    vcg_taxes_of(setting, profile.values())
}

/// Utilities `v_i(f(θ), θ_i)` before taxes.
pub(crate) fn valuations(setting: &PublicProjectSetting, values: &[Rational]) -> Vec<Rational> {
    let built = decision_of(setting, values);
    values
        .iter()
        .enumerate()
        .map(|(j, v)| value_of(setting, built, j, v))
        .collect()
}

/// Every point in `[0, c]` where the VCG total tax can kink as agent
/// `agent`'s report sweeps the interval: the endpoints, the efficiency
/// threshold, and each other agent's pivotality threshold. Sorted, deduplicated.
pub fn pp_breakpoints(
    setting: &PublicProjectSetting,
    agent: usize,
    others: &[Rational],
) -> Vec<Rational> {
    let c = setting.cost();
    let others_sum: Rational = others.iter().sum();
    let mut out = vec![Rational::zero(), c.clone(), c - &others_sum];
    let full_index = |pos: usize| if pos < agent { pos } else { pos + 1 };
    for (pos, theta_k) in others.iter().enumerate() {
        let k = full_index(pos);
        // agent k is pivotal once θ'_i + Σ_{j∉{i,k}} θ_j crosses c - c_k
        out.push(c - setting.share(k) - (&others_sum - theta_k));
    }
    let zero = Rational::zero();
    out.retain(|x| *x >= zero && x <= c);
    out.sort();
    out.dedup();
    out
}

/// The bracket of the BC surplus at a full profile:
/// `(n-1) Σ_k v_k(f(θ'), θ'_k) - Σ_k max_d Σ_{j≠k} v_j(d, θ'_j)`.
pub fn pp_surplus_bracket(setting: &PublicProjectSetting, values: &[Rational]) -> Rational {
    let n = values.len();
    let welfare: Rational = valuations(setting, values).iter().sum();
    let best: Rational = (0..n).map(|k| best_without(setting, values, k)).sum();
    int(n as i64 - 1) * welfare - best
}

/// `S_i^BCGC(θ_{-i})` for VCG: the exact maximum of the bracket over
/// `θ'_i ∈ [0, c]`, taken over the breakpoints of the piecewise-linear sweep.
/// `others` lists the other agents' valuations in agent order.
pub fn pp_bcgc_surplus(
    setting: &PublicProjectSetting,
    agent: usize,
    others: &[Rational],
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
            "expected {} other valuations, got {}",
            n - 1,
            others.len()
        )));
    }
    let c = setting.cost();
    if let Some(bad) = others.iter().find(|v| v.is_negative() || *v > c) {
        return Err(GrovesError::InvalidProfile(format!(
            "valuation {bad} outside [0, {c}]"
        )));
    }
    let best = pp_breakpoints(setting, agent, others)
        .into_iter()
        .map(|y| {
            let full = TypeProfile::insert(others, agent, y);
            pp_surplus_bracket(setting, full.values())
        })
        .max()
        .expect("breakpoints always include 0 and c");
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::setting::Setting;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn unequal_shares() -> PublicProjectSetting {
        PublicProjectSetting::new(int(100), ints(&[10, 40, 50])).unwrap()
    }

    fn profile(s: &PublicProjectSetting, v: &[i64]) -> TypeProfile {
        TypeProfile::new(&Setting::PublicProject(s.clone()), ints(v)).unwrap()
    }

    /// Clarke tax by brute force over d ∈ {0, 1}.
    fn clarke_oracle(s: &PublicProjectSetting, v: &[i64]) -> Vec<Rational> {
        let theta = ints(v);
        let welfare = |d: i64, skip: Option<usize>| -> Rational {
            (0..theta.len())
                .filter(|&j| Some(j) != skip)
                .map(|j| int(d) * (&theta[j] - s.share(j)))
                .sum()
        };
        let f = if welfare(1, None) >= welfare(0, None) {
            1
        } else {
            0
        };
        (0..theta.len())
            .map(|i| welfare(f, Some(i)) - welfare(0, Some(i)).max(welfare(1, Some(i))))
            .collect()
    }

    #[test]
    fn decision_examples() {
        let eq = PublicProjectSetting::equal_shares(3, int(3)).unwrap();
        assert!(pp_decision(&eq, &profile(&eq, &[1, 1, 1])));
        assert!(!pp_decision(&eq, &profile(&eq, &[0, 0, 0])));
        assert!(pp_decision(
            &unequal_shares(),
            &profile(&unequal_shares(), &[40, 10, 70])
        ));
    }

    #[test]
    fn vcg_examples() {
        let eq = PublicProjectSetting::equal_shares(3, int(3)).unwrap();
        assert_eq!(
            pp_vcg_tax(&eq, &profile(&eq, &[3, 0, 0])),
            ints(&[-2, 0, 0])
        );
        // built, nobody pivotal
        assert_eq!(pp_vcg_tax(&eq, &profile(&eq, &[2, 2, 2])), ints(&[0, 0, 0]));
        let s = unequal_shares();
        assert_eq!(pp_vcg_tax(&s, &profile(&s, &[0, 10, 70]))[0], int(0));
    }

    #[test]
    fn vcg_matches_brute_force_oracle() {
        let settings = [
            unequal_shares(),
            PublicProjectSetting::equal_shares(3, int(100)).unwrap(),
        ];
        for s in &settings {
            for a in (0..=100).step_by(10) {
                for b in (0..=100).step_by(20) {
                    for c in (0..=100).step_by(25) {
                        let v = [a, b, c];
                        let taxes = pp_vcg_tax(s, &profile(s, &v));
                        assert_eq!(taxes, clarke_oracle(s, &v), "{v:?}");
                        assert!(taxes.iter().all(|t| !t.is_positive()));
                    }
                }
            }
        }
    }

    #[test]
    fn surplus_examples() {
        let s = unequal_shares();
        assert_eq!(pp_bcgc_surplus(&s, 0, &ints(&[10, 70])).unwrap(), int(-10));
        let eq = PublicProjectSetting::equal_shares(3, int(3)).unwrap();
        for a in 0..=3 {
            for b in 0..=3 {
                assert_eq!(pp_bcgc_surplus(&eq, 1, &ints(&[a, b])).unwrap(), int(0));
            }
        }
        assert!(pp_bcgc_surplus(&s, 3, &ints(&[10, 70])).is_err());
        assert!(pp_bcgc_surplus(&s, 0, &ints(&[10])).is_err());
        assert!(pp_bcgc_surplus(&s, 0, &ints(&[10, 170])).is_err());
    }

    #[test]
    fn surplus_dominates_dense_sweep() {
        // exact breakpoint maximum is never beaten by a fine sweep, and the
        // sweep attains it whenever a breakpoint lies on the sweep lattice
        let s = unequal_shares();
        for (a, b) in [(10, 70), (0, 0), (45, 5), (100, 100), (33, 61)] {
            let others = ints(&[a, b]);
            let exact = pp_bcgc_surplus(&s, 0, &others).unwrap();
            let mut best: Option<Rational> = None;
            for step in 0..=400 {
                let y = rat(step, 4);
                let full = TypeProfile::insert(&others, 0, y);
                let v = pp_surplus_bracket(&s, full.values());
                assert!(v <= exact);
                best = Some(best.map_or(v.clone(), |b: Rational| b.max(v)));
            }
            assert_eq!(best.unwrap(), exact, "others {a},{b}");
        }
    }

    #[test]
    fn breakpoints_clip_to_interval() {
        let s = unequal_shares();
        let bp = pp_breakpoints(&s, 0, &ints(&[10, 70]));
        // {0, 100, 20, 100-40-70<0 dropped, 100-50-10=40}
        assert_eq!(bp, ints(&[0, 20, 40, 100]));
    }
}
