use num_traits::{Signed, Zero};

use crate::error::{GrovesError, Result};
use crate::rational::{int, to_exact_string, Rational};

/// Multi-unit auction with unit demand: `n` bidders, `m` identical units,
/// bids bounded to `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AuctionSetting {
    n: usize,
    m: usize,
    lower: Rational,
    upper: Rational,
}

impl AuctionSetting {
    pub fn new(n: usize, m: usize, lower: Rational, upper: Rational) -> Result<Self> {
        if n < 2 {
            return Err(GrovesError::InvalidSetting(format!(
                "auction needs at least 2 agents, got {n}"
            )));
        }
        if m < 1 || m > n - 1 {
            return Err(GrovesError::InvalidSetting(format!(
                "unit count m={m} must satisfy 1 <= m <= n-1 = {}",
                n - 1
            )));
        }
        if lower >= upper {
            return Err(GrovesError::InvalidSetting(format!(
                "bid bounds need L < U, got L={} U={}",
                to_exact_string(&lower),
                to_exact_string(&upper)
            )));
        }
        Ok(Self { n, m, lower, upper })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn lower(&self) -> &Rational {
        &self.lower
    }

    pub fn upper(&self) -> &Rational {
        &self.upper
    }
}

/// Binary public project of cost `c`, split into strictly positive shares
/// that sum to `c` exactly. Valuations live in `[0, c]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PublicProjectSetting {
    cost: Rational,
    shares: Vec<Rational>,
}

impl PublicProjectSetting {
    pub fn new(cost: Rational, shares: Vec<Rational>) -> Result<Self> {
        if shares.len() < 2 {
            return Err(GrovesError::InvalidSetting(format!(
                "public project needs at least 2 agents, got {}",
                shares.len()
            )));
        }
        if !cost.is_positive() {
            return Err(GrovesError::InvalidSetting(format!(
                "project cost must be positive, got {}",
                to_exact_string(&cost)
            )));
        }
        if let Some(bad) = shares.iter().find(|s| !s.is_positive()) {
            return Err(GrovesError::InvalidSetting(format!(
                "cost shares must be positive, got {}",
                to_exact_string(bad)
            )));
        }
        let total: Rational = shares.iter().sum();
        if total != cost {
            return Err(GrovesError::InvalidSetting(format!(
                "cost shares sum to {} but the cost is {}",
                to_exact_string(&total),
                to_exact_string(&cost)
            )));
        }
        Ok(Self { cost, shares })
    }

    /// Every agent carries `c / n`.
    pub fn equal_shares(n: usize, cost: Rational) -> Result<Self> {
        if n < 2 {
            return Err(GrovesError::InvalidSetting(format!(
                "public project needs at least 2 agents, got {n}"
            )));
        }
        let share = &cost / int(n as i64);
        Self::new(cost, vec![share; n])
    }

    pub fn n(&self) -> usize {
        self.shares.len()
    }

    pub fn cost(&self) -> &Rational {
        &self.cost
    }

    pub fn shares(&self) -> &[Rational] {
        &self.shares
    }

    pub fn share(&self, agent: usize) -> &Rational {
        &self.shares[agent]
    }

    pub fn is_equal_share(&self) -> bool {
        self.shares.windows(2).all(|w| w[0] == w[1])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Setting {
    Auction(AuctionSetting),
    PublicProject(PublicProjectSetting),
}

impl Setting {
    pub fn n(&self) -> usize {
        match self {
            Setting::Auction(a) => a.n(),
            Setting::PublicProject(p) => p.n(),
        }
    }

    /// Closed interval every agent's type must lie in.
    pub fn type_bounds(&self) -> (Rational, Rational) {
        match self {
            Setting::Auction(a) => (a.lower().clone(), a.upper().clone()),
            Setting::PublicProject(p) => (Rational::zero(), p.cost().clone()),
        }
    }

    pub fn as_auction(&self) -> Result<&AuctionSetting> {
        match self {
            Setting::Auction(a) => Ok(a),
            Setting::PublicProject(_) => Err(GrovesError::DomainMismatch(
                "operation requires the auction domain".into(),
            )),
        }
    }

    pub fn as_public_project(&self) -> Result<&PublicProjectSetting> {
        match self {
            Setting::PublicProject(p) => Ok(p),
            Setting::Auction(_) => Err(GrovesError::DomainMismatch(
                "operation requires the public project domain".into(),
            )),
        }
    }

    pub fn domain_name(&self) -> &'static str {
        match self {
            Setting::Auction(_) => "auction",
            Setting::PublicProject(_) => "public",
        }
    }
}

impl From<AuctionSetting> for Setting {
    fn from(s: AuctionSetting) -> Self {
        Setting::Auction(s)
    }
}

impl From<PublicProjectSetting> for Setting {
    fn from(s: PublicProjectSetting) -> Self {
        Setting::PublicProject(s)
    }
}
