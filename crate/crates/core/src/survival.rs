//! Citation samples, the empirical survival function and the h-index
//! functionals built on top of it.

use crate::error::{Error, Result};

/// Integer-supported survival function `S(x) = P(X > x)`.
///
/// Implementations must return 1 for every `x < 0` and be nonincreasing.
pub trait Survival {
    fn survival(&self, x: i64) -> f64;
}

impl<T: Survival + ?Sized> Survival for &T {
    fn survival(&self, x: i64) -> f64 {
        (**self).survival(x)
    }
}

/// One scholar's per-paper citation counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitationSample {
    scholar_id: String,
    counts: Vec<u64>,
}

impl CitationSample {
    pub fn new(scholar_id: impl Into<String>, counts: Vec<u64>) -> Result<Self> {
        let scholar_id = scholar_id.into();
        if counts.is_empty() {
            return Err(Error::EmptySample(scholar_id));
        }
        Ok(Self { scholar_id, counts })
    }

    pub fn scholar_id(&self) -> &str {
        &self.scholar_id
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of papers.
    pub fn n(&self) -> u64 {
        self.counts.len() as u64
    }

    /// Number of papers with strictly more than `x` citations.
    pub fn count_exceeding(&self, x: i64) -> u64 {
        if x < 0 {
            return self.n();
        }
        let x = x as u64;
        self.counts.iter().filter(|&&c| c > x).count() as u64
    }

    pub fn max_count(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }
}

/// Empirical survival function of a [`CitationSample`].
///
/// Holds a sorted copy of the counts so each evaluation is a binary search.
#[derive(Debug, Clone)]
pub struct EmpiricalSurvival {
    sorted: Vec<u64>,
}

impl EmpiricalSurvival {
    pub fn new(sample: &CitationSample) -> Self {
        let mut sorted = sample.counts.clone();
        sorted.sort_unstable();
        Self { sorted }
    }

    pub fn n(&self) -> u64 {
        self.sorted.len() as u64
    }

    /// `n * Ŝ(x)`, the number of counts strictly greater than `x`.
    pub fn exceeding(&self, x: i64) -> u64 {
        if x < 0 {
            return self.n();
        }
        let x = x as u64;
        let at_most = self.sorted.partition_point(|&c| c <= x);
        (self.sorted.len() - at_most) as u64
    }
}

impl Survival for EmpiricalSurvival {
    fn survival(&self, x: i64) -> f64 {
        self.exceeding(x) as f64 / self.n() as f64
    }
}

/// `Ŝ(x)`: the fraction of papers with more than `x` citations.
pub fn empirical_survival(sample: &CitationSample, x: i64) -> f64 {
    sample.count_exceeding(x) as f64 / sample.n() as f64
}

/// Largest `j` such that at least `j` papers have at least `j` citations each,
/// or 0 when no such `j` exists.
pub fn empirical_h_max_form(sample: &CitationSample) -> u64 {
    let mut sorted = sample.counts.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut h = 0;
    for (i, &c) in sorted.iter().enumerate() {
        let j = i as u64 + 1;
        if c >= j {
            h = j;
        } else {
            break;
        }
    }
    h
}

/// Sum of indicators `1[Ŝ(j-1) >= j/n]` over `j = 1..=n`.
///
/// Works on a histogram of counts capped at `n`, so no sort is needed.
pub fn empirical_h_sum_form(sample: &CitationSample) -> u64 {
    let n = sample.counts.len();
    // hist[c] = number of papers with exactly min(c, n) citations
    let mut hist = vec![0u64; n + 1];
    for &c in &sample.counts {
        hist[(c.min(n as u64)) as usize] += 1;
    }
    // at_least = #{i : X_i >= j} = n * Ŝ(j - 1), built from the top down
    let mut at_least = vec![0u64; n + 2];
    for j in (0..=n).rev() {
        at_least[j] = at_least[j + 1] + hist[j];
    }
    (1..=n).filter(|&j| at_least[j] >= j as u64).count() as u64
}

/// Theoretical h-index `Σ_{j=1}^{n} 1[S(j-1) >= j/n]` for a given number of papers.
pub fn theoretical_h<S: Survival + ?Sized>(model: &S, n: u64) -> u64 {
    let nf = n as f64;
    (1..=n)
        .filter(|&j| model.survival(j as i64 - 1) >= j as f64 / nf)
        .count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(counts: &[u64]) -> CitationSample {
        CitationSample::new("s", counts.to_vec()).unwrap()
    }

    struct Geometric;
    impl Survival for Geometric {
        fn survival(&self, x: i64) -> f64 {
            0.5f64.powi((x + 1) as i32)
        }
    }

    struct Const(f64, i64);
    impl Survival for Const {
        fn survival(&self, x: i64) -> f64 {
            if x < 0 {
                1.0
            } else if x < self.1 {
                self.0
            } else {
                0.0
            }
        }
    }

    #[test]
    fn empty_sample_is_rejected() {
        assert_eq!(
            CitationSample::new("a", vec![]),
            Err(Error::EmptySample("a".into()))
        );
    }

    #[test]
    fn empirical_survival_examples() {
        let s = sample(&[3, 0, 6, 1, 5]);
        assert_eq!(empirical_survival(&s, 2), 3.0 / 5.0);
        assert_eq!(empirical_survival(&s, -1), 1.0);
        assert_eq!(empirical_survival(&s, -7), 1.0);
        assert_eq!(empirical_survival(&s, 6), 0.0);

        let e = EmpiricalSurvival::new(&s);
        for x in -2..10 {
            assert_eq!(e.survival(x), empirical_survival(&s, x));
        }
    }

    #[test]
    fn h_index_examples() {
        let s = sample(&[3, 0, 6, 1, 5]);
        assert_eq!(empirical_h_max_form(&s), 3);
        assert_eq!(empirical_h_sum_form(&s), 3);

        let zeros = sample(&[0, 0, 0]);
        assert_eq!(empirical_h_max_form(&zeros), 0);
        assert_eq!(empirical_h_sum_form(&zeros), 0);

        let tens = sample(&[10; 10]);
        assert_eq!(empirical_h_max_form(&tens), 10);
        assert_eq!(empirical_h_sum_form(&tens), 10);

        assert_eq!(empirical_h_sum_form(&sample(&[1])), 1);
        assert_eq!(empirical_h_sum_form(&sample(&[0])), 0);
        assert_eq!(empirical_h_max_form(&sample(&[u64::MAX, 2])), 2);
    }

    #[test]
    fn theoretical_h_examples() {
        assert_eq!(theoretical_h(&Geometric, 10), 2);
        assert_eq!(theoretical_h(&Const(0.0, 0), 25), 0);
        assert_eq!(theoretical_h(&Const(1.0, 7), 7), 7);
    }

    #[test]
    fn theoretical_h_of_empirical_survival_is_empirical_h() {
        let s = sample(&[12, 3, 3, 0, 9, 4, 4, 1, 27, 5]);
        let e = EmpiricalSurvival::new(&s);
        assert_eq!(theoretical_h(&e, s.n()), empirical_h_sum_form(&s));
    }
}
