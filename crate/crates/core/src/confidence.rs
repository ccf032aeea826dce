//! Large-sample confidence sets for `h` and intervals for `E[Ĥ]`, single
//! scholar and Šidák-simultaneous pairwise.

use std::fmt;

use crate::error::{Error, Result};
use crate::variance::HEstimate;

/// Contiguous integer range `{lo, ..., hi}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegerConfidenceSet {
    pub lo: i64,
    pub hi: i64,
    pub level: f64,
}

impl IntegerConfidenceSet {
    pub fn contains(&self, x: i64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> i64 {
        self.hi - self.lo
    }
}

impl fmt::Display for IntegerConfidenceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, ..., {}}}", self.lo, self.hi)
    }
}

/// Open real interval `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealConfidenceInterval {
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
}

impl RealConfidenceInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl fmt::Display for RealConfidenceInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.2}, {:.2})", self.lo, self.hi)
    }
}

/// Per-comparison level for `k` scholars compared pairwise at overall error `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidakPlan {
    pub k: usize,
    pub k_star: usize,
    pub gamma: f64,
    /// Quantile level `(1 + (1 - gamma)^(1/k_star)) / 2`.
    pub gamma_star: f64,
}

/// One entry of a pairwise comparison table, for `h_j - h_l` with `j < l`
/// (both 1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseComparison<T> {
    pub j: usize,
    pub l: usize,
    pub set: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrictOrdering {
    pub higher: usize,
    pub lower: usize,
}

impl fmt::Display for StrictOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h_{} > h_{}", self.higher, self.lower)
    }
}

/// Integer closest to `x`, ties away from zero.
pub fn nearest_integer(x: f64) -> i64 {
    x.round() as i64
}

/// Standard normal quantile by Wichura's AS 241 (PPND16), relative accuracy
/// about 1e-16.
pub fn normal_quantile(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::LevelOutOfRange(q));
    }
    const A: [f64; 8] = [
        3.387_132_872_796_366_608,
        1.331_416_678_917_843_774_5e2,
        1.971_590_950_306_551_442_7e3,
        1.373_169_376_550_946_112_5e4,
        4.592_195_393_154_987_145_7e4,
        6.726_577_092_700_870_085_3e4,
        3.343_057_558_358_812_810_5e4,
        2.509_080_928_730_122_672_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091_125_2e1,
        6.871_870_074_920_579_083e2,
        5.394_196_021_424_751_107_7e3,
        2.121_379_430_158_659_586_7e4,
        3.930_789_580_009_271_061e4,
        2.872_908_573_572_194_267_4e4,
        5.226_495_278_852_854_561e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_577_34,
        4.630_337_846_156_545_295_9,
        5.769_497_221_460_691_405_5,
        3.647_848_324_763_204_605_04,
        1.270_458_252_452_368_382_58,
        2.417_807_251_774_506_117_7e-1,
        2.272_384_498_926_918_458_33e-2,
        7.745_450_142_783_414_076_4e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_758_821_87,
        1.676_384_830_183_803_849_4,
        6.897_673_349_851_000_045_5e-1,
        1.481_039_764_274_800_745_9e-1,
        1.519_866_656_361_645_719_66e-2,
        5.475_938_084_995_344_946e-4,
        1.050_750_071_644_416_843_24e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103_777_2,
        5.463_784_911_164_114_369_9,
        1.784_826_539_917_291_335_8,
        2.965_605_718_285_048_912_3e-1,
        2.653_218_952_657_612_309_3e-2,
        1.242_660_947_388_078_438_6e-3,
        2.711_555_568_743_487_578_15e-5,
        2.010_334_399_292_288_132_65e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_879_376_9e-1,
        1.369_298_809_227_358_053_1e-1,
        1.487_536_129_085_061_485_25e-2,
        7.868_691_311_456_132_591e-4,
        1.846_318_317_510_054_681_8e-5,
        1.421_511_758_316_445_888_7e-7,
        2.044_263_103_389_939_785_64e-15,
    ];

    fn ratio(num: &[f64; 8], den: &[f64; 8], x: f64) -> f64 {
        let horner = |c: &[f64; 8]| c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci);
        horner(num) / horner(den)
    }

    let centred = q - 0.5;
    if centred.abs() <= 0.425 {
        let r = 0.180_625 - centred * centred;
        return Ok(centred * ratio(&A, &B, r));
    }
    let tail = if centred < 0.0 { q } else { 1.0 - q };
    let mut r = (-tail.ln()).sqrt();
    let z = if r <= 5.0 {
        r -= 1.6;
        ratio(&C, &D, r)
    } else {
        r -= 5.0;
        ratio(&E, &F, r)
    };
    Ok(if centred < 0.0 { -z } else { z })
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::LevelOutOfRange(gamma))
    }
}

fn half_width(v_hat: f64, z: f64) -> f64 {
    z * v_hat.max(0.0).sqrt()
}

/// Confidence set for the theoretical h-index at level `1 - gamma`, with the
/// lower bound clamped at zero.
pub fn confidence_set_h(est: &HEstimate, gamma: f64) -> Result<IntegerConfidenceSet> {
    check_gamma(gamma)?;
    let z = normal_quantile(1.0 - gamma / 2.0)?;
    let w = half_width(est.v_hat, z);
    let h = est.h_hat as f64;
    Ok(IntegerConfidenceSet {
        lo: nearest_integer(h - w).max(0),
        hi: nearest_integer(h + w),
        level: 1.0 - gamma,
    })
}

/// Open interval for `E[Ĥ]` at level `1 - gamma`; neither rounded nor clamped.
pub fn confidence_interval_eh(est: &HEstimate, gamma: f64) -> Result<RealConfidenceInterval> {
    check_gamma(gamma)?;
    let z = normal_quantile(1.0 - gamma / 2.0)?;
    let w = half_width(est.v_hat, z);
    let h = est.h_hat as f64;
    Ok(RealConfidenceInterval {
        lo: h - w,
        hi: h + w,
        level: 1.0 - gamma,
    })
}

pub fn sidak_plan(k: usize, gamma: f64) -> Result<SidakPlan> {
    if k < 2 {
        return Err(Error::TooFewScholars(k));
    }
    check_gamma(gamma)?;
    let k_star = k * (k - 1) / 2;
    let gamma_star = (1.0 + (1.0 - gamma).powf(1.0 / k_star as f64)) / 2.0;
    Ok(SidakPlan {
        k,
        k_star,
        gamma,
        gamma_star,
    })
}

fn pairwise<T>(
    estimates: &[HEstimate],
    gamma: f64,
    build: impl Fn(f64, f64, f64) -> T,
) -> Result<(SidakPlan, Vec<PairwiseComparison<T>>)> {
    let plan = sidak_plan(estimates.len(), gamma)?;
    let z = normal_quantile(plan.gamma_star)?;
    let mut out = Vec::with_capacity(plan.k_star);
    for (a, ej) in estimates.iter().enumerate() {
        for (b, el) in estimates.iter().enumerate().skip(a + 1) {
            let diff = ej.h_hat as f64 - el.h_hat as f64;
            let w = half_width(ej.v_hat + el.v_hat, z);
            out.push(PairwiseComparison {
                j: a + 1,
                l: b + 1,
                set: build(diff, w, 1.0 - gamma),
            });
        }
    }
    Ok((plan, out))
}

/// Simultaneous confidence sets for `h_j - h_l`, `j < l`, ordered by `j` then
/// `l`. Scholars are assumed independent, so `V̂_jl = V̂_j + V̂_l`.
pub fn pairwise_sets_h(
    estimates: &[HEstimate],
    gamma: f64,
) -> Result<(SidakPlan, Vec<PairwiseComparison<IntegerConfidenceSet>>)> {
    pairwise(estimates, gamma, |diff, w, level| IntegerConfidenceSet {
        lo: nearest_integer(diff - w),
        hi: nearest_integer(diff + w),
        level,
    })
}

/// Simultaneous open intervals for `E[Ĥ_j] - E[Ĥ_l]`.
pub fn pairwise_intervals_eh(
    estimates: &[HEstimate],
    gamma: f64,
) -> Result<(SidakPlan, Vec<PairwiseComparison<RealConfidenceInterval>>)> {
    pairwise(estimates, gamma, |diff, w, level| RealConfidenceInterval {
        lo: diff - w,
        hi: diff + w,
        level,
    })
}

/// Orderings implied by the pairwise sets that exclude zero. Pairs whose set
/// contains zero are not separable and produce nothing.
pub fn ranking_summary(pairwise: &[PairwiseComparison<IntegerConfidenceSet>]) -> Vec<StrictOrdering> {
    pairwise
        .iter()
        .filter_map(|c| {
            if c.set.lo > 0 {
                Some(StrictOrdering {
                    higher: c.j,
                    lower: c.l,
                })
            } else if c.set.hi < 0 {
                Some(StrictOrdering {
                    higher: c.l,
                    lower: c.j,
                })
            } else {
                None
            }
        })
        .collect()
}

/// Same as [`ranking_summary`] for real intervals: separable when zero lies
/// outside the open interval.
pub fn ranking_summary_eh(
    pairwise: &[PairwiseComparison<RealConfidenceInterval>],
) -> Vec<StrictOrdering> {
    pairwise
        .iter()
        .filter_map(|c| {
            if c.set.lo >= 0.0 && c.set.hi > 0.0 {
                Some(StrictOrdering {
                    higher: c.j,
                    lower: c.l,
                })
            } else if c.set.hi <= 0.0 && c.set.lo < 0.0 {
                Some(StrictOrdering {
                    higher: c.l,
                    lower: c.j,
                })
            } else {
                None
            }
        })
        .collect()
}

/// Groups orderings by the higher index: `h_1 > h_8, h_9, h_10`.
pub fn group_orderings(orderings: &[StrictOrdering]) -> Vec<String> {
    let mut grouped: Vec<(usize, Vec<usize>)> = Vec::new();
    for o in orderings {
        match grouped.iter_mut().find(|(h, _)| *h == o.higher) {
            Some((_, lowers)) => lowers.push(o.lower),
            None => grouped.push((o.higher, vec![o.lower])),
        }
    }
    grouped
        .into_iter()
        .map(|(h, lowers)| {
            let lowers: Vec<String> = lowers.iter().map(|l| format!("h_{l}")).collect();
            format!("h_{h} > {}", lowers.join(", "))
        })
        .collect()
}
