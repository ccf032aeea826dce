//! Statistical inference for the Hirsch h-index.
//!
//! Point estimation of the h-index from a scholar's citation counts, a fully
//! nonparametric variance estimator, large-sample confidence sets for the
//! theoretical h-index and for `E[Ĥ]`, and Šidák-simultaneous pairwise
//! comparisons between scholars. Exact finite-sample moments under known
//! citation models and Monte Carlo experiments check the large-sample
//! approximations.

pub mod binomial;
pub mod confidence;
pub mod error;
pub mod mc;
pub mod models;
pub mod moments;
pub mod survival;
pub mod variance;

pub use binomial::{binom_upper_tail, p_hat_j};
pub use confidence::{
    confidence_interval_eh, confidence_set_h, group_orderings, nearest_integer, normal_quantile,
    pairwise_intervals_eh, pairwise_sets_h, ranking_summary, ranking_summary_eh, sidak_plan,
    IntegerConfidenceSet, PairwiseComparison, RealConfidenceInterval, SidakPlan, StrictOrdering,
};
pub use error::{Error, Result};
pub use models::{rng_stream, SurvivalModel};
pub use moments::{exact_expectation, exact_moments, exact_variance, p_j, MomentPair};
pub use survival::{
    empirical_h_max_form, empirical_h_sum_form, empirical_survival, theoretical_h, CitationSample,
    EmpiricalSurvival, Survival,
};
pub use variance::{estimate, v_hat, HEstimate};
