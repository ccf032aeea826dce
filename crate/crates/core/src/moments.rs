//! Exact finite-sample moments of the empirical h-index under a known
//! citation model.

use crate::binomial::binom_upper_tail;
use crate::error::{Error, Result};
use crate::survival::Survival;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentPair {
    pub n: u64,
    pub expectation: f64,
    pub variance: f64,
}

/// `p_j = P(Bin(n, S(j-1)) >= j)`, the probability that at least `j` of `n`
/// papers receive at least `j` citations.
pub fn p_j<S: Survival + ?Sized>(model: &S, n: u64, j: i64) -> Result<f64> {
    if j < 1 || j as u64 > n {
        return Err(Error::IndexOutOfRange { j, n });
    }
    binom_upper_tail(n, model.survival(j - 1).clamp(0.0, 1.0), j)
}

/// `p_1, ..., p_n`.
pub fn p_vector<S: Survival + ?Sized>(model: &S, n: u64) -> Vec<f64> {
    (1..=n as i64)
        .map(|j| p_j(model, n, j).expect("j is in range"))
        .collect()
}

pub fn exact_expectation<S: Survival + ?Sized>(model: &S, n: u64) -> f64 {
    p_vector(model, n).iter().sum()
}

pub fn exact_variance<S: Survival + ?Sized>(model: &S, n: u64) -> f64 {
    variance_from_tail_probabilities(&p_vector(model, n))
}

pub fn exact_moments<S: Survival + ?Sized>(model: &S, n: u64) -> MomentPair {
    let p = p_vector(model, n);
    MomentPair {
        n,
        expectation: p.iter().sum(),
        variance: variance_from_tail_probabilities(&p),
    }
}

/// `Σ_j p_j(1 - p_j) + 2 Σ_{l>=2} Σ_{j<l} p_l(1 - p_j)` in one pass, carrying
/// the prefix sum of `1 - p_j`.
pub(crate) fn variance_from_tail_probabilities(p: &[f64]) -> f64 {
    let mut diagonal = 0.0;
    let mut cross = 0.0;
    let mut prefix_complement = 0.0;
    for &pl in p {
        diagonal += pl * (1.0 - pl);
        cross += pl * prefix_complement;
        prefix_complement += 1.0 - pl;
    }
    (diagonal + 2.0 * cross).max(0.0)
}
