#![allow(dead_code)]

use groves_core::analysis::{check_feasible, compare, total_coefficients};
use groves_core::mechanism::{decide, Decision, Evaluator};
use groves_core::rational::{int, rat};
use groves_core::{
    anonymize, AgentRebateTable, AuctionSetting, GridSpec, Mechanism, Rational, RebateCoefficients,
    RebateTable, Setting, TypeProfile,
};
use num_traits::{Signed, Zero};
use rand::Rng;

pub type Check = std::result::Result<(), String>;

pub fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

pub fn auction(n: usize, m: usize, lo: i64, hi: i64) -> Setting {
    AuctionSetting::new(n, m, int(lo), int(hi)).unwrap().into()
}

/// Value to an agent of true type `theta` for a decision.
fn value_for(setting: &Setting, decision: &Decision, agent: usize, theta: &Rational) -> Rational {
    match (setting, decision) {
        (Setting::Auction(_), Decision::Allocation(w)) => {
            if w.contains(&agent) {
                theta.clone()
            } else {
                Rational::zero()
            }
        }
        (Setting::PublicProject(p), Decision::Project(built)) => {
            if *built {
                theta - p.share(agent)
            } else {
                Rational::zero()
            }
        }
        _ => unreachable!("decision from another domain"),
    }
}

/// No agent gains by misreporting any grid value at any grid profile.
pub fn strategy_proof(setting: &Setting, mech: &Mechanism, grid: &GridSpec) -> Check {
    let ev = Evaluator::new(setting, mech).map_err(|e| e.to_string())?;
    let n = setting.n();
    for p in grid.profiles(n) {
        let (_, vals) = decide(setting, &p);
        let taxes = ev.taxes(&p).map_err(|e| e.to_string())?;
        for i in 0..n {
            let truthful = &vals[i] + &taxes[i];
            for y in grid.points() {
                let mut lie = p.values().to_vec();
                lie[i] = y.clone();
                let lie = TypeProfile::new(setting, lie).unwrap();
                let (dl, _) = decide(setting, &lie);
                let tl = ev.taxes(&lie).map_err(|e| e.to_string())?;
                let gained = value_for(setting, &dl, i, p.value(i)) + &tl[i];
                if gained > truthful {
                    return Err(format!(
                        "{}: agent {i} at ({p}) gains by reporting {y}",
                        mech.label()
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Random rational with denominator in 1..=den and magnitude at most `span`.
pub fn random_rational<R: Rng>(rng: &mut R, span: i64, den: i64) -> Rational {
    let q = rng.random_range(1..=den);
    rat(rng.random_range(-span * q..=span * q), q)
}

pub fn random_coefficients<R: Rng>(rng: &mut R, n: usize) -> RebateCoefficients {
    RebateCoefficients::new(
        random_rational(rng, 3, 6),
        (0..n - 1).map(|_| random_rational(rng, 2, 6)).collect(),
    )
}

/// `Σ_i t_i(θ)` equals `C_0 + Σ_j C_j [θ]_j` at one profile.
pub fn ledger_identity(setting: &Setting, a: &RebateCoefficients, p: &TypeProfile) -> Check {
    let auction = setting.as_auction().unwrap();
    let c = total_coefficients(auction, a).map_err(|e| e.to_string())?;
    let sorted = p.sorted_desc();
    let mut ledger = c.constant().clone();
    for (j, s) in sorted.iter().enumerate() {
        ledger += c.slot(j + 1) * s;
    }
    let direct = groves_core::evaluate(setting, &Mechanism::Linear(a.clone()), p)
        .map_err(|e| e.to_string())?
        .total_tax;
    if ledger == direct {
        Ok(())
    } else {
        Err(format!("ledger {ledger} vs direct {direct} at ({p})"))
    }
}

pub fn random_profile<R: Rng>(rng: &mut R, setting: &Setting) -> TypeProfile {
    let (lo, hi) = setting.type_bounds();
    let values = (0..setting.n())
        .map(|_| {
            let q = rng.random_range(1..=8i64);
            let t = rat(rng.random_range(0..=q), q);
            &lo + (&hi - &lo) * t
        })
        .collect();
    TypeProfile::new(setting, values).unwrap()
}

pub fn ledger_pairs<R: Rng>(rng: &mut R, count: usize) -> Check {
    for _ in 0..count {
        let n = rng.random_range(2..=6);
        let m = rng.random_range(1..n);
        let s = auction(n, m, rng.random_range(-2..=1), rng.random_range(2..=5));
        let a = random_coefficients(rng, n);
        let p = random_profile(rng, &s);
        ledger_identity(&s, &a, &p)?;
    }
    Ok(())
}

/// BCGC output is feasible on the grid; for a feasible input it weakly
/// improves every agent (coincides or dominates).
pub fn note_one(
    setting: &Setting,
    inner: &Mechanism,
    strategy_grid: &GridSpec,
    grid: &GridSpec,
) -> Check {
    let exact_ok = Evaluator::new(setting, &Mechanism::bcgc(inner.clone())).is_ok();
    let bc = if exact_ok {
        Mechanism::bcgc(inner.clone())
    } else {
        Mechanism::Bcgc {
            inner: Box::new(inner.clone()),
            strategy: groves_core::SurplusStrategy::Grid(strategy_grid.clone()),
        }
    };
    let feas = check_feasible(setting, &bc, grid).map_err(|e| e.to_string())?;
    if !feas.holds {
        return Err(format!("{} runs a deficit: {:?}", bc.label(), feas.witness));
    }
    let inner_feasible = check_feasible(setting, inner, grid)
        .map_err(|e| e.to_string())?
        .holds;
    if inner_feasible {
        let cmp = compare(setting, inner, &bc, grid).map_err(|e| e.to_string())?;
        if let Some(w) = cmp.violation_witness {
            return Err(format!(
                "{} hurts agent {:?} at ({})",
                bc.label(),
                w.agent,
                w.profile
            ));
        }
    }
    Ok(())
}

/// Random per-agent rebate family on every ordered tuple of `grid`.
pub fn random_family<R: Rng>(rng: &mut R, n: usize, grid: &GridSpec) -> Vec<AgentRebateTable> {
    (0..n)
        .map(|_| {
            let mut t = AgentRebateTable::new();
            for y in grid.profiles(n - 1) {
                t.insert(y.values().to_vec(), random_rational(rng, 2, 4));
            }
            t
        })
        .collect()
}

fn max_total(setting: &Setting, mech: &Mechanism, grid: &GridSpec) -> Rational {
    let ev = Evaluator::new(setting, mech).unwrap();
    grid.profiles(setting.n())
        .map(|p| ev.total_tax(&p).unwrap())
        .max()
        .unwrap()
}

fn shift(family: &[AgentRebateTable], by: &Rational) -> Vec<AgentRebateTable> {
    family
        .iter()
        .map(|t| {
            let mut out = AgentRebateTable::new();
            for (k, v) in t.iter() {
                out.insert(k.clone(), v + by);
            }
            out
        })
        .collect()
}

/// Anonymization keeps feasibility, and anything welfare dominated by the
/// family stays welfare dominated by its anonymization.
pub fn averaging_family<R: Rng>(rng: &mut R, setting: &Setting, grid: &GridSpec) -> Check {
    let n = setting.n();
    let raw = random_family(rng, n, grid);
    let peak = max_total(setting, &Mechanism::PerAgent(raw.clone()), grid);
    let family = shift(&raw, &(-peak / int(n as i64)));
    let h = Mechanism::PerAgent(family.clone());
    if !check_feasible(setting, &h, grid).unwrap().holds {
        return Err("shifted family should be feasible".into());
    }
    let anon = anonymize(&family).map_err(|e| e.to_string())?;
    let h_prime = Mechanism::Tabular(anon);
    let f = check_feasible(setting, &h_prime, grid).unwrap();
    if !f.holds {
        return Err(format!(
            "anonymized family runs a deficit at {:?}",
            f.witness
        ));
    }

    // anonymous h0 below every h_j on every arrangement, strictly somewhere
    let mut h0 = RebateTable::new();
    let multisets = grid.multisets(n - 1);
    let bump = rng.random_range(0..multisets.len());
    for (idx, x) in multisets.iter().enumerate() {
        let floor = x
            .arrangements()
            .iter()
            .flat_map(|y| family.iter().map(move |t| t.get(y).unwrap().clone()))
            .min()
            .unwrap();
        let drop = if idx == bump {
            rat(1, 3)
        } else {
            rat(rng.random_range(0..=2), 5)
        };
        h0.insert(x.as_slice().to_vec(), floor - drop).unwrap();
    }
    let h0 = Mechanism::Tabular(h0);
    let before = compare(setting, &h0, &h, grid).unwrap();
    if !before.welfare_dominates.is_yes() {
        return Err("constructed h0 is not welfare dominated by the family".into());
    }
    let after = compare(setting, &h0, &h_prime, grid).unwrap();
    if !after.welfare_dominates.is_yes() {
        return Err(format!(
            "h0 not welfare dominated by anonymized family: {after:?}"
        ));
    }
    Ok(())
}

/// The total rebate of the anonymized family at `θ` is the family's total
/// averaged over all permutations of `θ`.
pub fn averaging_identity(
    setting: &Setting,
    family: &[AgentRebateTable],
    p: &TypeProfile,
) -> Check {
    let n = setting.n();
    let anon = anonymize(family).map_err(|e| e.to_string())?;
    let lhs: Rational = (0..n)
        .map(|i| anon.get(&p.exclude(i).unwrap()).unwrap().clone())
        .sum();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sum = Rational::zero();
    let mut count = 0i64;
    loop {
        let permuted: Vec<Rational> = perm.iter().map(|&k| p.value(k).clone()).collect();
        let q = TypeProfile::new(setting, permuted).unwrap();
        for (i, t) in family.iter().enumerate() {
            sum += t.get(&q.exclude(i).unwrap()).unwrap();
        }
        count += 1;
        if !next_perm(&mut perm) {
            break;
        }
    }
    let rhs = sum / int(count);
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!(
            "anonymized total {lhs} vs permutation average {rhs} at ({p})"
        ))
    }
}

fn next_perm(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

pub fn positive(r: &Rational) -> bool {
    r.is_positive()
}
