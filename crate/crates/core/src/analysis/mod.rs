//! Dominance checks, the linear-mechanism ledger, and LP searches.

pub mod dominance;
pub mod ledger;
pub mod search;

pub use dominance::{
    check_feasible, check_pay_only, compare, DominanceResult, GridCheck, Verdict, Witness,
};
pub use ledger::{
    boundary_expressions, boundary_profile, classify_linear, total_coefficients, AffineForm,
    Classification, TotalCoefficients,
};
pub use search::{search_dominance_improvement, search_welfare_improvement, LpOutcome, LpStatus};
