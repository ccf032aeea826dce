//! Monte Carlo and enumeration experiments: coverage of the confidence sets,
//! consistency of the variance estimator, and exact bias tables.
//!
//! Each replicate draws from its own random stream, derived from the root
//! seed with [`rng_stream`]. Replicates run in parallel, but results are
//! collected in replicate order and reduced sequentially, so a report is a
//! pure function of its config regardless of the thread count.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;

use crate::confidence::{confidence_interval_eh, confidence_set_h};
use crate::error::{Error, Result};
use crate::models::{rng_stream, ConditionCheck, SurvivalModel};
use crate::moments::exact_moments;
use crate::survival::{theoretical_h, Survival};
use crate::variance::estimate;

pub const MIN_REPS: usize = 100;
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// Theoretical h-index, covered by the integer set.
    H,
    /// `E[Ĥ]`, covered by the open real interval.
    ExpectedH,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::H => "h",
            Target::ExpectedH => "eh",
        })
    }
}

impl FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "h" => Ok(Target::H),
            "eh" => Ok(Target::ExpectedH),
            other => Err(Error::InvalidConfig {
                key: "target".into(),
                reason: format!("expected `h` or `eh`, got `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Experiment {
    #[default]
    Coverage,
    Consistency,
    Bias,
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "coverage" => Ok(Experiment::Coverage),
            "consistency" => Ok(Experiment::Consistency),
            "bias" => Ok(Experiment::Bias),
            other => Err(Error::InvalidConfig {
                key: "experiment".into(),
                reason: format!("expected coverage, consistency or bias, got `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: SurvivalModel,
    pub n_grid: Vec<u64>,
    pub reps: usize,
    pub gamma: f64,
    pub root_seed: u64,
    pub target: Target,
    pub experiment: Experiment,
    /// Worker threads; `None` uses rayon's global pool.
    pub threads: Option<usize>,
}

fn config_error(key: &str, reason: impl Into<String>) -> Error {
    Error::InvalidConfig {
        key: key.into(),
        reason: reason.into(),
    }
}

impl ExperimentConfig {
    pub fn new(model: SurvivalModel, n_grid: Vec<u64>, reps: usize, gamma: f64, root_seed: u64) -> Result<Self> {
        let cfg = Self {
            model,
            n_grid,
            reps,
            gamma,
            root_seed,
            target: Target::H,
            experiment: Experiment::Coverage,
            threads: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_target(mut self, target: Target) -> Self {
        self.target = target;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < MIN_REPS {
            return Err(config_error("reps", format!("must be at least {MIN_REPS}, got {}", self.reps)));
        }
        if self.n_grid.is_empty() {
            return Err(config_error("n_grid", "must not be empty"));
        }
        if self.n_grid[0] == 0 {
            return Err(config_error("n_grid", "sample sizes must be positive"));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_error("n_grid", "must be strictly increasing"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(config_error("gamma", format!("must lie in (0, 1), got {}", self.gamma)));
        }
        if self.threads == Some(0) {
            return Err(config_error("threads", "must be positive"));
        }
        Ok(())
    }

    /// Parses a `key=value` file. Blank lines and `#` comments are ignored.
    ///
    /// Keys: `model` (required), `n_grid` (required, comma separated),
    /// `reps` (default 1000), `gamma` (default 0.05), `seed` (default 0),
    /// `target` (`h` or `eh`, default `h`), `experiment` (`coverage`,
    /// `consistency` or `bias`, default `coverage`), `threads`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut model = None;
        let mut n_grid = None;
        let mut reps = 1000usize;
        let mut gamma = 0.05;
        let mut seed = 0u64;
        let mut target = Target::H;
        let mut experiment = Experiment::Coverage;
        let mut threads = None;
        let mut seen = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_error(line, format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key.to_string()) {
                return Err(config_error(key, "given more than once"));
            }
            seen.push(key.to_string());
            let bad = |what: &str| config_error(key, format!("{what}: `{value}`"));
            match key {
                "model" => model = Some(value.parse::<SurvivalModel>().map_err(|e| config_error("model", e.to_string()))?),
                "n_grid" => {
                    n_grid = Some(
                        value
                            .split(',')
                            .map(|v| v.trim().parse::<u64>())
                            .collect::<std::result::Result<Vec<_>, _>>()
                            .map_err(|_| bad("expected comma-separated positive integers"))?,
                    )
                }
                "reps" => reps = value.parse().map_err(|_| bad("expected an integer"))?,
                "gamma" => gamma = value.parse().map_err(|_| bad("expected a number"))?,
                "seed" => seed = value.parse().map_err(|_| bad("expected an unsigned integer"))?,
                "target" => target = value.parse()?,
                "experiment" => experiment = value.parse()?,
                "threads" => threads = Some(value.parse().map_err(|_| bad("expected an integer"))?),
                other => return Err(config_error(other, "unknown key")),
            }
        }
        let cfg = Self {
            model: model.ok_or_else(|| config_error("model", "missing"))?,
            n_grid: n_grid.ok_or_else(|| config_error("n_grid", "missing"))?,
            reps,
            gamma,
            root_seed: seed,
            target,
            experiment,
            threads,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn stream_index(cell: usize, rep: usize) -> u64 {
        ((cell as u64) << 32) | rep as u64
    }

    /// Runs `f` for every replicate of cell `cell`, returning results in
    /// replicate order.
    fn replicates<T, F>(&self, cell: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut rand_chacha::ChaCha8Rng) -> T + Sync,
    {
        let work = || {
            (0..self.reps)
                .into_par_iter()
                .map(|rep| {
                    let mut rng = rng_stream(self.root_seed, Self::stream_index(cell, rep));
                    f(&mut rng)
                })
                .collect()
        };
        match self.threads {
            Some(t) => rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .expect("thread pool")
                .install(work),
            None => work(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageCell {
    pub model: String,
    pub n: u64,
    pub reps: usize,
    pub gamma: f64,
    pub target: Target,
    pub theoretical_h: u64,
    pub coverage: f64,
    pub mean_width: f64,
    pub mean_h_hat: f64,
    pub exact_e: f64,
    pub exact_var: f64,
    pub mean_v_hat: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub cells: Vec<CoverageCell>,
}

pub const COVERAGE_CSV_HEADER: &str =
    "model,n,reps,gamma,target,coverage,mean_width,mean_h_hat,exact_e,exact_var,mean_v_hat";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl CoverageReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(COVERAGE_CSV_HEADER);
        out.push('\n');
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
                csv_field(&c.model),
                c.n,
                c.reps,
                c.gamma,
                c.target,
                c.coverage,
                c.mean_width,
                c.mean_h_hat,
                c.exact_e,
                c.exact_var,
                c.mean_v_hat
            );
        }
        out
    }
}

struct Replicate {
    h_hat: u64,
    v_hat: f64,
    covered: bool,
    width: f64,
}

/// Empirical coverage of `C` (target `h`) or `C'` (target `E[Ĥ]`) per sample size.
pub fn run_coverage(config: &ExperimentConfig) -> Result<CoverageReport> {
    config.validate()?;
    let model = &config.model;
    let mut cells = Vec::with_capacity(config.n_grid.len());
    for (cell, &n) in config.n_grid.iter().enumerate() {
        let h = theoretical_h(model, n);
        let moments = exact_moments(model, n);
        let reps = config.replicates(cell, |rng| {
            let sample = model.draw_sample("mc", n, rng).expect("n > 0");
            let est = estimate(&sample);
            match config.target {
                Target::H => {
                    let set = confidence_set_h(&est, config.gamma).expect("gamma validated");
                    Replicate {
                        h_hat: est.h_hat,
                        v_hat: est.v_hat,
                        covered: set.contains(h as i64),
                        width: set.width() as f64,
                    }
                }
                Target::ExpectedH => {
                    let iv = confidence_interval_eh(&est, config.gamma).expect("gamma validated");
                    Replicate {
                        h_hat: est.h_hat,
                        v_hat: est.v_hat,
                        covered: iv.contains(moments.expectation),
                        width: iv.width(),
                    }
                }
            }
        });
        let r = reps.len() as f64;
        let mut hits = 0usize;
        let (mut width, mut h_hat, mut v_hat) = (0.0, 0.0, 0.0);
        for rep in &reps {
            hits += rep.covered as usize;
            width += rep.width;
            h_hat += rep.h_hat as f64;
            v_hat += rep.v_hat;
        }
        cells.push(CoverageCell {
            model: model.to_string(),
            n,
            reps: config.reps,
            gamma: config.gamma,
            target: config.target,
            theoretical_h: h,
            coverage: hits as f64 / r,
            mean_width: width / r,
            mean_h_hat: h_hat / r,
            exact_e: moments.expectation,
            exact_var: moments.variance,
            mean_v_hat: v_hat / r,
        });
    }
    Ok(CoverageReport { cells })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioSummary {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

impl RatioSummary {
    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyRow {
    pub n: u64,
    pub exact_var: f64,
    /// `None` when `Var[Ĥ] = 0` and the ratio is undefined.
    pub ratio: Option<RatioSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub model: String,
    pub reps: usize,
    pub condition: ConditionCheck,
    pub rows: Vec<ConsistencyRow>,
}

impl ConsistencyReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,n,reps,condition4,exact_var,median_ratio,q1_ratio,q3_ratio,iqr_ratio\n");
        for row in &self.rows {
            let stats = match &row.ratio {
                Some(r) => format!("{:.6},{:.6},{:.6},{:.6}", r.median, r.q1, r.q3, r.iqr()),
                None => ",,,".to_string(),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{:.6},{}",
                csv_field(&self.model),
                row.n,
                self.reps,
                self.condition.holds,
                row.exact_var,
                stats
            );
        }
        out
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Distribution of `V̂ / Var[Ĥ]` per sample size.
pub fn run_consistency(config: &ExperimentConfig) -> Result<ConsistencyReport> {
    config.validate()?;
    let model = &config.model;
    let mut rows = Vec::with_capacity(config.n_grid.len());
    for (cell, &n) in config.n_grid.iter().enumerate() {
        let var = exact_moments(model, n).variance;
        let ratio = if var > 0.0 {
            let mut ratios = config.replicates(cell, |rng| {
                let sample = model.draw_sample("mc", n, rng).expect("n > 0");
                estimate(&sample).v_hat / var
            });
            ratios.sort_by(f64::total_cmp);
            Some(RatioSummary {
                median: quantile_sorted(&ratios, 0.5),
                q1: quantile_sorted(&ratios, 0.25),
                q3: quantile_sorted(&ratios, 0.75),
            })
        } else {
            None
        };
        rows.push(ConsistencyRow { n, exact_var: var, ratio });
    }
    Ok(ConsistencyReport {
        model: model.to_string(),
        reps: config.reps,
        condition: model.satisfies_condition4(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasRow {
    pub n: u64,
    pub h: u64,
    pub expectation: f64,
    /// `E[Ĥ] / h`; `None` when `h = 0`.
    pub ratio: Option<f64>,
}

/// Exact `(h, E[Ĥ], E[Ĥ]/h)` per sample size; no simulation involved.
pub fn run_bias<S: Survival + Sync + ?Sized>(model: &S, n_grid: &[u64]) -> Vec<BiasRow> {
    n_grid
        .iter()
        .map(|&n| {
            let h = theoretical_h(model, n);
            let expectation = exact_moments(model, n).expectation;
            BiasRow {
                n,
                h,
                expectation,
                ratio: (h > 0).then(|| expectation / h as f64),
            }
        })
        .collect()
}

pub fn bias_csv(model: &str, rows: &[BiasRow]) -> String {
    let mut out = String::from("model,n,h,exact_e,ratio\n");
    for r in rows {
        let ratio = r.ratio.map(|x| format!("{x:.6}")).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{:.6},{}", csv_field(model), r.n, r.h, r.expectation, ratio);
    }
    out
}

/// Exact distribution of `Ĥ` for `n` i.i.d. draws from a finite pmf.
#[derive(Debug, Clone, PartialEq)]
pub struct HDistribution {
    /// `pmf[h] = P(Ĥ = h)` for `h = 0..=n`.
    pub pmf: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
}

/// Enumerates all `s^n` outcome vectors of a finite-support model.
pub fn enumeration_oracle(model: &SurvivalModel, n: u64) -> Result<HDistribution> {
    let SurvivalModel::FiniteSupport(finite) = model else {
        return Err(Error::InvalidModel(
            "enumeration requires a finite-support model".into(),
        ));
    };
    if n == 0 {
        return Err(Error::NonPositiveTrials);
    }
    let probs = finite.probabilities();
    let s = probs.len();
    let outcomes = (s as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if outcomes > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            outcomes,
            limit: ENUMERATION_LIMIT,
        });
    }
    let n = n as usize;
    let mut pmf = vec![0.0; n + 1];
    let mut digits = vec![0usize; n];
    loop {
        let weight: f64 = digits.iter().map(|&d| probs[d]).product();
        if weight > 0.0 {
            // Hirsch's definition, straight from the counts.
            let h = (1..=n)
                .rev()
                .find(|&j| digits.iter().filter(|&&c| c >= j).count() >= j)
                .unwrap_or(0);
            pmf[h] += weight;
        }
        let mut pos = 0;
        loop {
            if pos == n {
                let mean: f64 = pmf.iter().enumerate().map(|(h, p)| h as f64 * p).sum();
                let variance = pmf
                    .iter()
                    .enumerate()
                    .map(|(h, p)| (h as f64 - mean).powi(2) * p)
                    .sum();
                return Ok(HDistribution { pmf, mean, variance });
            }
            digits[pos] += 1;
            if digits[pos] < s {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// Anderson–Darling statistic of `values` against the standard normal.
pub fn anderson_darling_standard_normal(values: &[f64]) -> f64 {
    let mut x = values.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len();
    let nf = n as f64;
    let cdf = |z: f64| 0.5 * erfc(-z / std::f64::consts::SQRT_2);
    let mut s = 0.0;
    for i in 0..n {
        let fi = cdf(x[i]).clamp(1e-300, 1.0 - 1e-16);
        let fr = cdf(x[n - 1 - i]).clamp(1e-300, 1.0 - 1e-16);
        s += (2 * i + 1) as f64 * (fi.ln() + (1.0 - fr).ln());
    }
    -nf - s / nf
}

/// Complementary error function, Numerical Recipes' Chebyshev fit
/// (relative error below 1.2e-7), adequate for goodness-of-fit screens.
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let poly = -z * z - 1.265_512_23
        + t * (1.000_023_68
            + t * (0.374_091_96
                + t * (0.096_784_18
                    + t * (-0.186_288_06
                        + t * (0.278_868_07
                            + t * (-1.135_203_98
                                + t * (1.488_515_87 + t * (-0.822_152_23 + t * 0.170_872_77))))))));
    let r = t * poly.exp();
    if x >= 0.0 {
        r
    } else {
        2.0 - r
    }
}
