//! Upper binomial tails `P(Bin(n, p) >= j)`.
//!
//! Small `n` sums the pmf directly in log space. Larger `n` goes through the
//! regularized incomplete beta identity `P(Bin(n, p) >= j) = I_p(j, n - j + 1)`,
//! evaluated by continued fraction with a saddle-point pmf prefactor.

use crate::error::{Error, Result};
use crate::survival::CitationSample;

const DIRECT_SUM_MAX_N: u64 = 64;
const CF_MAX_ITER: usize = 20_000;
const CF_TINY: f64 = 1e-300;

/// `P(Bin(n, p) >= j)`.
///
/// Returns exactly 1 for `j <= 0` and exactly 0 for `j > n`.
pub fn binom_upper_tail(n: u64, p: f64, j: i64) -> Result<f64> {
    if n == 0 {
        return Err(Error::NonPositiveTrials);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    if j <= 0 {
        return Ok(1.0);
    }
    let j = j as u64;
    if j > n {
        return Ok(0.0);
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let tail = if n <= DIRECT_SUM_MAX_N {
        direct_upper_tail(n, p, j)
    } else {
        incomplete_beta_upper_tail(n, p, j)
    };
    Ok(tail.clamp(0.0, 1.0))
}

/// Plug-in estimate `p̂_j = P(Bin(n, Ŝ(j-1)) >= j)`.
pub fn p_hat_j(sample: &CitationSample, j: i64) -> Result<f64> {
    let n = sample.n();
    if j < 1 || j as u64 > n {
        return Err(Error::IndexOutOfRange { j, n });
    }
    let s = sample.count_exceeding(j - 1) as f64 / n as f64;
    binom_upper_tail(n, s, j)
}

fn ln_factorial(k: u64) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// Sums pmf terms `k = j..=n` from both ends toward the mode, so the smallest
/// terms are accumulated first.
fn direct_upper_tail(n: u64, p: f64, j: u64) -> f64 {
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let ln_n_fact = ln_factorial(n);
    let mut ln_fact = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0;
    ln_fact.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        ln_fact.push(acc);
    }
    debug_assert!((acc - ln_n_fact).abs() < 1e-9);
    let term = |k: u64| {
        let ln_pmf = ln_n_fact - ln_fact[k as usize] - ln_fact[(n - k) as usize]
            + k as f64 * ln_p
            + (n - k) as f64 * ln_q;
        ln_pmf.exp()
    };

    let mode = (((n + 1) as f64 * p).floor() as u64).clamp(j, n);
    let mut sum = 0.0;
    for k in (mode + 1..=n).rev() {
        sum += term(k);
    }
    for k in j..=mode {
        sum += term(k);
    }
    sum
}

/// `I_p(j, n - j + 1)` by Lentz's continued fraction, using the symmetry
/// relation when `p` lies above the mean of the beta density.
fn incomplete_beta_upper_tail(n: u64, p: f64, j: u64) -> f64 {
    let a = j as f64;
    let b = (n - j + 1) as f64;
    if p < (a + 1.0) / (a + b + 2.0) {
        // x^a (1-x)^b / (a B(a, b)) = pmf(j) * (1 - p)
        let front = binom_pmf(j, n, p) * (1.0 - p);
        front * beta_continued_fraction(a, b, p)
    } else {
        // 1 - I_{1-p}(b, a); the prefactor is pmf(j - 1) * p
        let front = binom_pmf(j - 1, n, p) * p;
        1.0 - front * beta_continued_fraction(b, a, 1.0 - p)
    }
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() <= f64::EPSILON {
            break;
        }
    }
    h
}

/// Binomial pmf by Loader's saddle-point expansion, accurate to a few ulps
/// for any `n`.
pub(crate) fn binom_pmf(k: u64, n: u64, p: f64) -> f64 {
    let q = 1.0 - p;
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if q == 0.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let nf = n as f64;
    if k == 0 {
        let lc = if p < 0.1 {
            -bd0(nf, nf * q) - nf * p
        } else {
            nf * q.ln()
        };
        return lc.exp();
    }
    if k == n {
        let lc = if q < 0.1 {
            -bd0(nf, nf * p) - nf * q
        } else {
            nf * p.ln()
        };
        return lc.exp();
    }
    let kf = k as f64;
    let lc = stirlerr(n) - stirlerr(k) - stirlerr(n - k) - bd0(kf, nf * p) - bd0(nf - kf, nf * q);
    let lf = std::f64::consts::TAU.ln() + kf.ln() + (-kf / nf).ln_1p();
    (lc - 0.5 * lf).exp()
}

/// `ln(n!) - ln(sqrt(2 pi n) (n/e)^n)`.
fn stirlerr(n: u64) -> f64 {
    const SMALL: [f64; 16] = [
        0.0,
        0.081_061_466_795_327_258_22,
        0.041_340_695_955_409_294_09,
        0.027_677_925_684_998_339_15,
        0.020_790_672_103_765_093_11,
        0.016_644_691_189_821_192_16,
        0.013_876_128_823_070_747_99,
        0.011_896_709_945_891_770_10,
        0.010_411_265_261_972_096_50,
        0.009_255_462_182_712_732_918,
        0.008_330_563_433_362_871_256,
        0.007_573_675_487_951_840_795,
        0.006_942_840_107_209_529_866,
        0.006_408_994_188_004_207_068,
        0.005_951_370_112_758_847_736,
        0.005_554_733_551_962_801_371,
    ];
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15 {
        return SMALL[n as usize];
    }
    let nf = n as f64;
    let nn = nf * nf;
    if n > 500 {
        (S0 - S1 / nn) / nf
    } else if n > 80 {
        (S0 - (S1 - S2 / nn) / nn) / nf
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / nf
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / nf
    }
}

/// Deviance term `x ln(x / np) + np - x`, stable when `x` is close to `np`.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / np).ln() + np - x
    }
}
