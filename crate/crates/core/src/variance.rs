//! Nonparametric plug-in variance estimator for the empirical h-index.
//!
//! The estimator replaces `S` by `Ŝ` in the exact variance of `Ĥ` and truncates
//! both sums at `m = min(3Ĥ, n)`:
//!
//! ```text
//! V̂ = Σ_{j=1}^{m} p̂_j (1 - p̂_j) + 2 Σ_{l=2}^{m} Σ_{j=1}^{l-1} p̂_l (1 - p̂_j)
//! ```

use crate::binomial::p_hat_j;
use crate::moments::variance_from_tail_probabilities;
use crate::survival::{empirical_h_sum_form, CitationSample};

#[derive(Debug, Clone, PartialEq)]
pub struct HEstimate {
    pub scholar_id: String,
    pub n: u64,
    pub h_hat: u64,
    pub v_hat: f64,
}

/// Upper summation limit `min(3Ĥ, n)`.
pub fn truncation_limit(h_hat: u64, n: u64) -> u64 {
    h_hat.saturating_mul(3).min(n)
}

/// `p̂_1, ..., p̂_m` for `m = min(3Ĥ, n)`.
pub fn truncated_p_hat(sample: &CitationSample) -> Vec<f64> {
    let m = truncation_limit(empirical_h_sum_form(sample), sample.n());
    (1..=m as i64)
        .map(|j| p_hat_j(sample, j).expect("j <= m <= n"))
        .collect()
}

pub fn v_hat(sample: &CitationSample) -> f64 {
    variance_from_tail_probabilities(&truncated_p_hat(sample))
}

pub fn estimate(sample: &CitationSample) -> HEstimate {
    HEstimate {
        scholar_id: sample.scholar_id().to_string(),
        n: sample.n(),
        h_hat: empirical_h_sum_form(sample),
        v_hat: v_hat(sample),
    }
}
