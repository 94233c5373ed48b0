//! Groves mechanisms with exact rational arithmetic: VCG, linear and OEL
//! rebates for unit-demand auctions, the public project problem, the BCGC
//! transform, anonymization, and dominance analysis.

pub mod analysis;
pub mod auction;
pub mod error;
pub mod fixtures;
pub mod mechanism;
pub mod profile;
pub mod public_project;
pub mod rational;
pub mod setting;
pub mod simplex;
pub mod transforms;

pub use auction::{
    efficient_allocation, linear_rebate, oel_coefficients, oel_tax, vcg_tax, OelCoefficients,
    OelIndex,
};
pub use error::{GrovesError, Result};
pub use mechanism::{
    decide, evaluate, vcg_taxes, AgentRebateTable, Decision, Evaluator, Mechanism,
    RebateCoefficients, RebateTable, SurplusStrategy, TaxReport,
};
pub use profile::{GridSpec, Multiset, TypeProfile};
pub use public_project::{pp_bcgc_surplus, pp_decision, pp_vcg_tax};
pub use rational::{parse_rational, to_exact_string, Rational};
pub use setting::{AuctionSetting, PublicProjectSetting, Setting};
pub use transforms::{anonymize, bcgc_surplus, bcgc_transform, SurplusFunction};
