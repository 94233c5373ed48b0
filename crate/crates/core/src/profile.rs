//! Type profiles, canonical multisets of reports, and finite grids over the
//! type interval.

use std::fmt;

use crate::error::{GrovesError, Result};
use crate::rational::{to_exact_string, Rational};
use crate::setting::Setting;

/// Announced types `θ_1..θ_n`, validated against the setting's bounds.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeProfile {
    values: Vec<Rational>,
}

impl TypeProfile {
    pub fn new(setting: &Setting, values: Vec<Rational>) -> Result<Self> {
        if values.len() != setting.n() {
            return Err(GrovesError::InvalidProfile(format!(
                "expected {} types, got {}",
                setting.n(),
                values.len()
            )));
        }
        let (lo, hi) = setting.type_bounds();
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| **v < lo || **v > hi)
        {
            return Err(GrovesError::InvalidProfile(format!(
                "type of agent {} is {}, outside [{}, {}]",
                i + 1,
                to_exact_string(v),
                to_exact_string(&lo),
                to_exact_string(&hi)
            )));
        }
        Ok(Self { values })
    }

    /// Caller guarantees length and bounds (grid enumeration, candidate
    /// insertion inside the admitted interval).
    pub(crate) fn from_trusted(values: Vec<Rational>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, agent: usize) -> &Rational {
        &self.values[agent]
    }

    /// Values sorted non-increasing.
    pub fn sorted_desc(&self) -> Vec<Rational> {
        sorted_desc(&self.values)
    }

    /// `[θ]_j`: the j-th highest value (1-based, counting multiplicity).
    pub fn sorted_stat(&self, j: usize) -> Result<Rational> {
        sorted_stat(&self.values, j)
    }

    /// `θ_{-i}`: the other agents' types in agent order.
    pub fn exclude(&self, agent: usize) -> Result<Vec<Rational>> {
        if agent >= self.values.len() {
            return Err(GrovesError::IndexOutOfRange {
                index: agent + 1,
                len: self.values.len(),
            });
        }
        Ok(exclude(&self.values, agent))
    }

    /// Canonical (descending) multiset of the other agents' types.
    pub fn others(&self, agent: usize) -> Result<Multiset> {
        self.exclude(agent).map(Multiset::from_values)
    }

    /// Rebuilds a full profile by placing `value` at position `agent` among
    /// `others` (given in agent order).
    pub(crate) fn insert(others: &[Rational], agent: usize, value: Rational) -> Self {
        let mut values = Vec::with_capacity(others.len() + 1);
        values.extend_from_slice(&others[..agent]);
        values.push(value);
        values.extend_from_slice(&others[agent..]);
        Self { values }
    }
}

impl fmt::Display for TypeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", join_exact(&self.values))
    }
}

pub(crate) fn sorted_desc(values: &[Rational]) -> Vec<Rational> {
    let mut v = values.to_vec();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

pub(crate) fn sorted_stat(values: &[Rational], j: usize) -> Result<Rational> {
    if j == 0 || j > values.len() {
        return Err(GrovesError::IndexOutOfRange {
            index: j,
            len: values.len(),
        });
    }
    Ok(sorted_desc(values).swap_remove(j - 1))
}

pub(crate) fn exclude(values: &[Rational], agent: usize) -> Vec<Rational> {
    values
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != agent)
        .map(|(_, v)| v.clone())
        .collect()
}

/// Compact `"3,2,2"` style rendering with exact fractions where needed.
pub fn join_exact(values: &[Rational]) -> String {
    values
        .iter()
        .map(|v| {
            if v.is_integer() {
                v.numer().to_string()
            } else {
                to_exact_string(v)
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

/// A multiset of reports in canonical descending order. Anonymous rebates
/// are functions of this, so permutation independence holds by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multiset(Vec<Rational>);

impl Multiset {
    pub fn from_values(mut values: Vec<Rational>) -> Self {
        values.sort_unstable_by(|a, b| b.cmp(a));
        Multiset(values)
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<Rational> {
        self.0
    }

    /// Number of distinct arrangements, `len! / Π mult!`.
    pub fn arrangement_count(&self) -> u128 {
        let mut total: u128 = 1;
        let mut placed: u128 = 0;
        let mut run: u128 = 0;
        for (idx, v) in self.0.iter().enumerate() {
            if idx > 0 && self.0[idx - 1] == *v {
                run += 1;
            } else {
                run = 1;
            }
            placed += 1;
            // running product of binomials keeps the value integral
            total = total * placed / run;
        }
        total
    }

    /// All distinct orderings, in lexicographic order of the ascending sort.
    pub fn arrangements(&self) -> Vec<Vec<Rational>> {
        let mut current: Vec<Rational> = self.0.iter().rev().cloned().collect();
        let mut out = vec![current.clone()];
        while next_permutation(&mut current) {
            out.push(current.clone());
        }
        out
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", join_exact(&self.0))
    }
}

/// Advances to the next lexicographic permutation; duplicates are skipped
/// naturally. Returns `false` once the sequence is non-increasing.
pub(crate) fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Finite discretization of the type interval. Strictly increasing, and the
/// first and last points are the interval endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridSpec {
    points: Vec<Rational>,
}

impl GridSpec {
    pub fn new(setting: &Setting, points: Vec<Rational>) -> Result<Self> {
        if points.len() < 2 {
            return Err(GrovesError::InvalidGrid(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GrovesError::InvalidGrid(
                "points must be strictly increasing".into(),
            ));
        }
        let (lo, hi) = setting.type_bounds();
        if points[0] != lo || points[points.len() - 1] != hi {
            return Err(GrovesError::InvalidGrid(format!(
                "grid must span [{}, {}] exactly",
                to_exact_string(&lo),
                to_exact_string(&hi)
            )));
        }
        Ok(Self { points })
    }

    /// `count` evenly spaced points from the lower to the upper bound.
    pub fn uniform(setting: &Setting, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(GrovesError::InvalidGrid(format!(
                "need at least 2 points, got {count}"
            )));
        }
        let (lo, hi) = setting.type_bounds();
        let step = (&hi - &lo) / Rational::from_integer((count as i64 - 1).into());
        let points = (0..count)
            .map(|i| &lo + &step * Rational::from_integer((i as i64).into()))
            .collect();
        Self::new(setting, points)
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of ordered profiles of `n` agents on the grid.
    pub fn profile_count(&self, n: usize) -> usize {
        self.points.len().pow(n as u32)
    }

    /// The `index`-th profile in lexicographic order (last agent varies
    /// fastest).
    pub fn profile_at(&self, n: usize, mut index: usize) -> TypeProfile {
        let k = self.points.len();
        let mut values = vec![self.points[0].clone(); n];
        for slot in values.iter_mut().rev() {
            *slot = self.points[index % k].clone();
            index /= k;
        }
        TypeProfile::from_trusted(values)
    }

    /// All ordered profiles in lexicographic order.
    pub fn profiles(&self, n: usize) -> impl Iterator<Item = TypeProfile> + '_ {
        (0..self.profile_count(n)).map(move |i| self.profile_at(n, i))
    }

    /// All multisets of `size` grid points, each in canonical descending
    /// order; the list is sorted ascending.
    pub fn multisets(&self, size: usize) -> Vec<Multiset> {
        let mut out = Vec::new();
        let mut idx = vec![0usize; size];
        let k = self.points.len();
        loop {
            // idx is non-decreasing; map to descending values
            let values = idx.iter().rev().map(|&i| self.points[i].clone()).collect();
            out.push(Multiset(values));
            let mut pos = size;
            loop {
                if pos == 0 {
                    out.sort();
                    return out;
                }
                pos -= 1;
                if idx[pos] + 1 < k {
                    idx[pos] += 1;
                    let v = idx[pos];
                    for slot in idx.iter_mut().skip(pos + 1) {
                        *slot = v;
                    }
                    break;
                }
            }
        }
    }
}
