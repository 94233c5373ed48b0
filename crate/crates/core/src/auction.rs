//! Multi-unit auctions with unit demand: efficient allocation, VCG taxes,
//! linear rebates and the OEL redistribution family.

use num_traits::Zero;

use crate::error::{GrovesError, Result};
use crate::mechanism::RebateCoefficients;
use crate::profile::{sorted_desc, TypeProfile};
use crate::rational::{binomial, int, Rational};
use crate::setting::AuctionSetting;

/// The `m` highest bidders win one unit each; ties go to the lower index.
/// Returned indices are 0-based and ascending.
pub fn efficient_allocation(setting: &AuctionSetting, profile: &TypeProfile) -> Vec<usize> {
    let values = profile.values();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].cmp(&values[a]).then(a.cmp(&b)));
    let mut winners = order[..setting.m()].to_vec();
    winners.sort_unstable();
    winners
}

/// Clarke taxes: each winner pays the `(m+1)`-th highest bid overall, which
/// equals `[θ_{-i}]_m` for a winner; losers pay nothing.
pub fn vcg_tax(setting: &AuctionSetting, profile: &TypeProfile) -> Vec<Rational> {
    let sorted = profile.sorted_desc();
    let price = -sorted[setting.m()].clone();
    let mut taxes = vec![Rational::zero(); profile.len()];
    for w in efficient_allocation(setting, profile) {
        taxes[w] = price.clone();
    }
    taxes
}

/// `a_0 + Σ_j a_j [others]_j`, evaluated on the sorted tuple.
pub fn linear_rebate(coeffs: &RebateCoefficients, others: &[Rational]) -> Result<Rational> {
    if others.len() != coeffs.slopes().len() {
        return Err(GrovesError::InvalidProfile(format!(
            "rebate expects {} other types, got {}",
            coeffs.slopes().len(),
            others.len()
        )));
    }
    Ok(linear_rebate_sorted(coeffs, &sorted_desc(others)))
}

pub(crate) fn linear_rebate_sorted(coeffs: &RebateCoefficients, sorted: &[Rational]) -> Rational {
    let mut acc = coeffs.constant().clone();
    for (a, s) in coeffs.slopes().iter().zip(sorted) {
        if !a.is_zero() {
            acc += a * s;
        }
    }
    acc
}

/// Index of an OEL mechanism: `0 <= k <= n` with `k - m` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OelIndex {
    k: usize,
}

impl OelIndex {
    pub fn new(setting: &AuctionSetting, k: usize) -> Result<Self> {
        validate_oel(setting, k)?;
        Ok(Self { k })
    }

    /// Unvalidated index; checked again whenever coefficients are built.
    pub fn raw(k: usize) -> Self {
        Self { k }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Every valid index for the setting, ascending.
    pub fn all(setting: &AuctionSetting) -> Vec<OelIndex> {
        (0..=setting.n())
            .filter(|&k| validate_oel(setting, k).is_ok())
            .map(|k| OelIndex { k })
            .collect()
    }

    /// The index whose OEL mechanism is Bailey-Cavallo.
    pub fn bailey_cavallo(setting: &AuctionSetting) -> Self {
        Self { k: setting.m() + 1 }
    }
}

fn validate_oel(setting: &AuctionSetting, k: usize) -> Result<()> {
    let (n, m) = (setting.n(), setting.m());
    if k > n {
        return Err(GrovesError::InvalidOelIndex {
            k,
            n,
            m,
            reason: "k must lie in 0..=n",
        });
    }
    if (k as i64 - m as i64).rem_euclid(2) != 1 {
        return Err(GrovesError::InvalidOelIndex {
            k,
            n,
            m,
            reason: "k - m must be odd",
        });
    }
    Ok(())
}

pub type OelCoefficients = RebateCoefficients;

fn sign(exp: i64) -> Rational {
    if exp.rem_euclid(2) == 0 {
        int(1)
    } else {
        int(-1)
    }
}

fn ratio(num: num_bigint::BigInt, den: num_bigint::BigInt) -> Rational {
    Rational::new(num, den)
}

/// Slope for positions `i <= m` (cases `k = 0` and `1 <= k <= m`).
fn upper_slope(n: i64, m: i64, i: i64) -> Rational {
    sign(m - i) * ratio(binomial(n - i - 1, n - m - 1), binomial(m - 1, i - 1))
}

/// Slope for positions `i >= m + 1` (cases `m + 1 <= k <= n`).
fn lower_slope(n: i64, m: i64, i: i64) -> Rational {
    sign(m - i - 1) * ratio(binomial(i - 1, m - 1), binomial(n - m - 1, n - i - 1))
}

/// Coefficients `c_0..c_{n-1}` of the OEL mechanism with index `k`.
pub fn oel_coefficients(setting: &AuctionSetting, idx: OelIndex) -> Result<OelCoefficients> {
    validate_oel(setting, idx.k)?;
    let n = setting.n() as i64;
    let m = setting.m() as i64;
    let k = idx.k as i64;
    let share = Rational::new(m.into(), n.into());
    let mut slopes = vec![Rational::zero(); (n - 1) as usize];
    let mut constant = Rational::zero();

    if k == 0 {
        let mut sum = Rational::zero();
        for i in 1..=m {
            let c = upper_slope(n, m, i);
            sum += &c;
            slopes[(i - 1) as usize] = c;
        }
        constant = setting.upper() * &share - setting.upper() * sum;
    } else if k <= m {
        let mut sum = Rational::zero();
        for i in (k + 1)..=m {
            let c = upper_slope(n, m, i);
            sum += &c;
            slopes[(i - 1) as usize] = c;
        }
        slopes[(k - 1) as usize] = &share - sum;
    } else if k < n {
        let mut sum = Rational::zero();
        for i in (m + 1)..k {
            let c = lower_slope(n, m, i);
            sum += &c;
            slopes[(i - 1) as usize] = c;
        }
        slopes[(k - 1) as usize] = &share - sum;
    } else {
        let mut sum = Rational::zero();
        for i in (m + 1)..n {
            let c = lower_slope(n, m, i);
            sum += &c;
            slopes[(i - 1) as usize] = c;
        }
        constant = setting.lower() * &share - setting.lower() * sum;
    }
    Ok(RebateCoefficients::new(constant, slopes))
}

/// `t_i = t_i^VCG + r(θ_{-i})` with the OEL coefficients.
pub fn oel_tax(
    setting: &AuctionSetting,
    idx: OelIndex,
    profile: &TypeProfile,
) -> Result<Vec<Rational>> {
    let coeffs = oel_coefficients(setting, idx)?;
    let mut taxes = vcg_tax(setting, profile);
    for (i, t) in taxes.iter_mut().enumerate() {
        *t += linear_rebate(&coeffs, &profile.exclude(i)?)?;
    }
    Ok(taxes)
}

/// True exactly on the profiles where the OEL total tax vanishes:
/// `[θ]_1 = U` for `k = 0`, `[θ]_k = [θ]_{k+1}` for `1 <= k <= n-1`, and
/// `[θ]_n = L` for `k = n`.
pub fn oel_zero_boundary(setting: &AuctionSetting, idx: OelIndex, profile: &TypeProfile) -> bool {
    let sorted = profile.sorted_desc();
    let n = setting.n();
    match idx.k {
        0 => sorted[0] == *setting.upper(),
        k if k == n => sorted[n - 1] == *setting.lower(),
        k if k < n => sorted[k - 1] == sorted[k],
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::setting::Setting;

    fn setting(n: usize, m: usize, l: i64, u: i64) -> AuctionSetting {
        AuctionSetting::new(n, m, int(l), int(u)).unwrap()
    }

    fn profile(s: &AuctionSetting, v: &[i64]) -> TypeProfile {
        TypeProfile::new(
            &Setting::Auction(s.clone()),
            v.iter().map(|&x| int(x)).collect(),
        )
        .unwrap()
    }

    /// Clarke tax straight from the definition: others' welfare under the
    /// chosen allocation minus their best welfare without agent i.
    fn clarke_oracle(s: &AuctionSetting, values: &[i64]) -> Vec<Rational> {
        let n = values.len();
        let p = profile(s, values);
        let winners = efficient_allocation(s, &p);
        (0..n)
            .map(|i| {
                let with: i64 = winners
                    .iter()
                    .filter(|&&w| w != i)
                    .map(|&w| values[w])
                    .sum();
                let mut others: Vec<i64> = (0..n).filter(|&j| j != i).map(|j| values[j]).collect();
                others.sort_unstable_by(|a, b| b.cmp(a));
                let without: i64 = others.iter().take(s.m()).sum();
                int(with - without)
            })
            .collect()
    }

    #[test]
    fn allocation_examples() {
        let s = setting(3, 1, 0, 5);
        assert_eq!(efficient_allocation(&s, &profile(&s, &[3, 2, 1])), vec![0]);
        let s = setting(4, 1, 0, 5);
        assert_eq!(
            efficient_allocation(&s, &profile(&s, &[2, 3, 3, 1])),
            vec![1]
        );
        let s = setting(4, 2, 0, 5);
        assert_eq!(
            efficient_allocation(&s, &profile(&s, &[1, 1, 1, 1])),
            vec![0, 1]
        );
    }

    #[test]
    fn vcg_examples() {
        let s = setting(3, 1, 0, 5);
        assert_eq!(
            vcg_tax(&s, &profile(&s, &[3, 2, 1])),
            vec![int(-2), int(0), int(0)]
        );
        let s = setting(4, 1, 0, 5);
        let total: Rational = vcg_tax(&s, &profile(&s, &[3, 2, 2, 2])).iter().sum();
        assert_eq!(total, int(-2));
        let total: Rational = vcg_tax(&s, &profile(&s, &[4, 4, 4, 4])).iter().sum();
        assert_eq!(total, int(-4));
    }

    #[test]
    fn vcg_matches_clarke_oracle_exhaustively() {
        for (n, m) in [(3, 1), (3, 2), (4, 1), (4, 2), (4, 3)] {
            let s = setting(n, m, 0, 3);
            let grid: Vec<i64> = (0..=3).collect();
            let total = 4usize.pow(n as u32);
            for idx in 0..total {
                let mut x = idx;
                let values: Vec<i64> = (0..n)
                    .map(|_| {
                        let v = grid[x % 4];
                        x /= 4;
                        v
                    })
                    .collect();
                let p = profile(&s, &values);
                let taxes = vcg_tax(&s, &p);
                assert_eq!(taxes, clarke_oracle(&s, &values), "{values:?}");
                let sum: Rational = taxes.iter().sum();
                assert_eq!(sum, -int(m as i64) * p.sorted_stat(m + 1).unwrap());
            }
        }
    }

    #[test]
    fn linear_rebate_examples() {
        // BC for m = 1, n = 4: (1/4) times the second-highest other bid
        let bc = RebateCoefficients::new(int(0), vec![int(0), rat(1, 4), int(0)]);
        assert_eq!(
            linear_rebate(&bc, &[int(1), int(7), int(3)]).unwrap(),
            rat(3, 4)
        );
        let zero = RebateCoefficients::zero(4);
        assert_eq!(
            linear_rebate(&zero, &[int(1), int(7), int(3)]).unwrap(),
            int(0)
        );
        let constant = RebateCoefficients::new(int(1), vec![int(0); 3]);
        assert_eq!(
            linear_rebate(&constant, &[int(0), int(0), int(2)]).unwrap(),
            int(1)
        );
        assert!(linear_rebate(&constant, &[int(0)]).is_err());
    }

    #[test]
    fn oel_index_parity_and_range() {
        let s = setting(4, 1, 0, 3);
        assert!(OelIndex::new(&s, 0).is_ok());
        assert!(OelIndex::new(&s, 2).is_ok());
        assert!(OelIndex::new(&s, 4).is_ok());
        assert!(matches!(
            OelIndex::new(&s, 1),
            Err(GrovesError::InvalidOelIndex { .. })
        ));
        assert!(OelIndex::new(&s, 5).is_err());
        assert!(oel_coefficients(&s, OelIndex::raw(3)).is_err());
        let ks: Vec<usize> = OelIndex::all(&s).iter().map(|i| i.k()).collect();
        assert_eq!(ks, vec![0, 2, 4]);
        let s = setting(5, 2, 0, 3);
        let ks: Vec<usize> = OelIndex::all(&s).iter().map(|i| i.k()).collect();
        assert_eq!(ks, vec![1, 3, 5]);
    }

    #[test]
    fn oel_coefficient_examples() {
        let s = AuctionSetting::new(4, 1, int(2), int(3)).unwrap();
        let bc = oel_coefficients(&s, OelIndex::raw(2)).unwrap();
        assert_eq!(bc.constant(), &int(0));
        assert_eq!(bc.slopes(), &[int(0), rat(1, 4), int(0)][..]);

        let k0 = oel_coefficients(&s, OelIndex::raw(0)).unwrap();
        assert_eq!(k0.slopes(), &[int(1), int(0), int(0)][..]);
        assert_eq!(k0.constant(), &(rat(-3, 4) * int(3)));

        let k4 = oel_coefficients(&s, OelIndex::raw(4)).unwrap();
        assert_eq!(k4.slopes(), &[int(0), rat(1, 2), int(-1)][..]);
        assert_eq!(k4.constant(), &(rat(3, 4) * int(2)));
    }

    #[test]
    fn bailey_cavallo_index_has_single_slope() {
        for n in 2..=8 {
            for m in 1..n {
                let s = setting(n, m, 0, 1);
                let c = oel_coefficients(&s, OelIndex::bailey_cavallo(&s)).unwrap();
                assert!(c.constant().is_zero());
                for (j, a) in c.slopes().iter().enumerate() {
                    let expected = if j + 1 == m + 1 {
                        rat(m as i64, n as i64)
                    } else {
                        int(0)
                    };
                    assert_eq!(a, &expected, "n={n} m={m} j={}", j + 1);
                }
            }
        }
    }

    #[test]
    fn oel_tax_examples() {
        let s = setting(4, 1, 0, 3);
        let taxes = oel_tax(&s, OelIndex::raw(2), &profile(&s, &[3, 2, 2, 2])).unwrap();
        assert_eq!(taxes.iter().sum::<Rational>(), int(0));
        let taxes = oel_tax(&s, OelIndex::raw(2), &profile(&s, &[3, 2, 1, 0])).unwrap();
        // -(1/2)([θ]_2 - [θ]_3)
        assert_eq!(taxes.iter().sum::<Rational>(), rat(-1, 2));
        let taxes = oel_tax(&s, OelIndex::raw(0), &profile(&s, &[1, 3, 0, 2])).unwrap();
        assert_eq!(taxes.iter().sum::<Rational>(), int(0));
        let taxes = oel_tax(&s, OelIndex::raw(4), &profile(&s, &[1, 3, 0, 2])).unwrap();
        assert_eq!(taxes.iter().sum::<Rational>(), int(0));
        assert!(oel_tax(&s, OelIndex::raw(1), &profile(&s, &[1, 3, 0, 2])).is_err());
    }

    #[test]
    fn zero_boundary_examples() {
        let s = setting(4, 1, 0, 3);
        assert!(oel_zero_boundary(
            &s,
            OelIndex::raw(2),
            &profile(&s, &[3, 2, 2, 0])
        ));
        assert!(oel_zero_boundary(
            &s,
            OelIndex::raw(0),
            &profile(&s, &[3, 3, 3, 3])
        ));
        assert!(!oel_zero_boundary(
            &s,
            OelIndex::raw(2),
            &profile(&s, &[3, 2, 1, 0])
        ));
        assert!(oel_zero_boundary(
            &s,
            OelIndex::raw(4),
            &profile(&s, &[3, 2, 1, 0])
        ));
        assert!(!oel_zero_boundary(
            &s,
            OelIndex::raw(0),
            &profile(&s, &[2, 2, 1, 0])
        ));
    }
}
