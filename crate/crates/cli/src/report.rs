//! Table-shaped reports: per-scholar estimates and pairwise comparisons.

use std::fmt::Write as _;
use std::str::FromStr;

use hindex_core::mc::Target;
use hindex_core::{
    confidence_interval_eh, confidence_set_h, estimate, group_orderings, pairwise_intervals_eh,
    pairwise_sets_h, ranking_summary, ranking_summary_eh, HEstimate, SidakPlan, StrictOrdering,
};
use serde::Serialize;

use crate::dataset::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Markdown,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "markdown" | "md" => Ok(Self::Markdown),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown output format `{other}`")),
        }
    }
}

/// A confidence region rendered as text: `{lo, ..., hi}` for `h`, `(lo, hi)` for `E[Ĥ]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub lo: f64,
    pub hi: f64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRow {
    pub scholar_id: String,
    pub n: u64,
    pub h_hat: u64,
    pub v_hat: f64,
    pub region: Region,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub gamma: f64,
    pub target: String,
    pub rows: Vec<EstimateRow>,
}

fn region(est: &HEstimate, gamma: f64, target: Target) -> anyhow::Result<Region> {
    Ok(match target {
        Target::H => {
            let c = confidence_set_h(est, gamma)?;
            Region {
                lo: c.lo as f64,
                hi: c.hi as f64,
                text: c.to_string(),
            }
        }
        Target::ExpectedH => {
            let c = confidence_interval_eh(est, gamma)?;
            Region {
                lo: c.lo,
                hi: c.hi,
                text: c.to_string(),
            }
        }
    })
}

fn region_header(target: Target) -> &'static str {
    match target {
        Target::H => "C",
        Target::ExpectedH => "C'",
    }
}

/// Sorted by `Ĥ` descending, ties by id.
pub fn estimate_report(estimates: &[HEstimate], gamma: f64, target: Target) -> anyhow::Result<EstimateReport> {
    let mut sorted: Vec<&HEstimate> = estimates.iter().collect();
    sorted.sort_by(|a, b| b.h_hat.cmp(&a.h_hat).then_with(|| a.scholar_id.cmp(&b.scholar_id)));
    let rows = sorted
        .into_iter()
        .map(|e| {
            Ok(EstimateRow {
                scholar_id: e.scholar_id.clone(),
                n: e.n,
                h_hat: e.h_hat,
                v_hat: e.v_hat,
                region: region(e, gamma, target)?,
            })
        })
        .collect::<anyhow::Result<_>>()?;
    Ok(EstimateReport {
        gamma,
        target: target.to_string(),
        rows,
    })
}

pub fn estimates_of(dataset: &Dataset) -> Vec<HEstimate> {
    dataset.scholars.iter().map(estimate).collect()
}

pub fn cmd_estimate(dataset: &Dataset, gamma: f64, target: Target, format: OutputFormat) -> anyhow::Result<String> {
    let report = estimate_report(&estimates_of(dataset), gamma, target)?;
    Ok(render_estimates(&report, target, format))
}

fn csv_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

pub fn render_estimates(report: &EstimateReport, target: Target, format: OutputFormat) -> String {
    let c = region_header(target);
    match format {
        OutputFormat::Markdown => {
            let mut out = format!("| scholar | n | h_hat | v_hat | {c} |\n|---|---:|---:|---:|---|\n");
            for r in &report.rows {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {:.4} | {} |",
                    r.scholar_id, r.n, r.h_hat, r.v_hat, r.region.text
                );
            }
            out
        }
        OutputFormat::Csv => csv_string(|w| {
            w.write_record(["scholar_id", "n", "h_hat", "v_hat", "lo", "hi"])?;
            for r in &report.rows {
                w.write_record([
                    r.scholar_id.clone(),
                    r.n.to_string(),
                    r.h_hat.to_string(),
                    format!("{:.4}", r.v_hat),
                    endpoint(r.region.lo, target),
                    endpoint(r.region.hi, target),
                ])?;
            }
            Ok(())
        }),
        OutputFormat::Json => json(report),
    }
}

fn endpoint(x: f64, target: Target) -> String {
    match target {
        Target::H => format!("{x}"),
        Target::ExpectedH => format!("{x:.2}"),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRow {
    pub j: usize,
    pub l: usize,
    pub label: String,
    pub region: Region,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub k: usize,
    pub k_star: usize,
    pub gamma: f64,
    pub gamma_star: f64,
    pub target: String,
    /// Scholar ids; `h_1` is `scholars[0]`.
    pub scholars: Vec<String>,
    pub pairs: Vec<PairRow>,
    #[serde(skip)]
    pub orderings: Vec<StrictOrdering>,
    pub ranking: Vec<String>,
    pub not_separable: Vec<String>,
}

/// Pairwise sets in input order, `h_1 - h_2, h_1 - h_3, ..., h_{k-1} - h_k`.
pub fn compare_report(estimates: &[HEstimate], gamma: f64, target: Target) -> anyhow::Result<CompareReport> {
    let (plan, pairs, orderings): (SidakPlan, Vec<PairRow>, Vec<StrictOrdering>) = match target {
        Target::H => {
            let (plan, sets) = pairwise_sets_h(estimates, gamma)?;
            let orderings = ranking_summary(&sets);
            let rows = sets
                .iter()
                .map(|c| PairRow {
                    j: c.j,
                    l: c.l,
                    label: format!("h_{} - h_{}", c.j, c.l),
                    region: Region {
                        lo: c.set.lo as f64,
                        hi: c.set.hi as f64,
                        text: c.set.to_string(),
                    },
                })
                .collect();
            (plan, rows, orderings)
        }
        Target::ExpectedH => {
            let (plan, sets) = pairwise_intervals_eh(estimates, gamma)?;
            let orderings = ranking_summary_eh(&sets);
            let rows = sets
                .iter()
                .map(|c| PairRow {
                    j: c.j,
                    l: c.l,
                    label: format!("h_{} - h_{}", c.j, c.l),
                    region: Region {
                        lo: c.set.lo,
                        hi: c.set.hi,
                        text: c.set.to_string(),
                    },
                })
                .collect();
            (plan, rows, orderings)
        }
    };
    let not_separable = pairs
        .iter()
        .filter(|p| !orderings.iter().any(|o| (o.higher, o.lower) == (p.j, p.l) || (o.higher, o.lower) == (p.l, p.j)))
        .map(|p| p.label.clone())
        .collect();
    Ok(CompareReport {
        k: plan.k,
        k_star: plan.k_star,
        gamma: plan.gamma,
        gamma_star: plan.gamma_star,
        target: target.to_string(),
        scholars: estimates.iter().map(|e| e.scholar_id.clone()).collect(),
        pairs,
        ranking: group_orderings(&orderings),
        orderings,
        not_separable,
    })
}

pub fn cmd_compare(estimates: &[HEstimate], gamma: f64, target: Target, format: OutputFormat) -> anyhow::Result<String> {
    let report = compare_report(estimates, gamma, target)?;
    Ok(render_compare(&report, format))
}

pub fn render_compare(report: &CompareReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Markdown => {
            let mut out = format!(
                "k = {}, k* = {}, gamma = {}, gamma* = {:.8}\n\n",
                report.k, report.k_star, report.gamma, report.gamma_star
            );
            for (i, id) in report.scholars.iter().enumerate() {
                let _ = writeln!(out, "h_{} = {}", i + 1, id);
            }
            out.push_str("\n| pair | set |\n|---|---|\n");
            for p in &report.pairs {
                let _ = writeln!(out, "| {} | {} |", p.label, p.region.text);
            }
            out.push('\n');
            if report.ranking.is_empty() {
                out.push_str("ranking: not separable\n");
            } else {
                for line in &report.ranking {
                    let _ = writeln!(out, "ranking: {line}");
                }
                if !report.not_separable.is_empty() {
                    let _ = writeln!(out, "not separable: {}", report.not_separable.join(", "));
                }
            }
            out
        }
        OutputFormat::Csv => csv_string(|w| {
            w.write_record(["j", "l", "scholar_j", "scholar_l", "lo", "hi", "ordering"])?;
            let target = if report.target == "eh" { Target::ExpectedH } else { Target::H };
            for p in &report.pairs {
                let ordering = report
                    .orderings
                    .iter()
                    .find(|o| (o.higher, o.lower) == (p.j, p.l) || (o.higher, o.lower) == (p.l, p.j))
                    .map(|o| o.to_string())
                    .unwrap_or_default();
                w.write_record([
                    p.j.to_string(),
                    p.l.to_string(),
                    report.scholars[p.j - 1].clone(),
                    report.scholars[p.l - 1].clone(),
                    endpoint(p.region.lo, target),
                    endpoint(p.region.hi, target),
                    ordering,
                ])?;
            }
            Ok(())
        }),
        OutputFormat::Json => json(report),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hindex_core::CitationSample;
    use std::path::PathBuf;

    fn dataset(scholars: Vec<(&str, Vec<u64>)>) -> Dataset {
        Dataset {
            scholars: scholars
                .into_iter()
                .map(|(id, c)| CitationSample::new(id, c).unwrap())
                .collect(),
            source: PathBuf::from("mem"),
            format: crate::dataset::InputFormat::Csv,
        }
    }

    #[test]
    fn estimate_row_for_one_zero() {
        let out = cmd_estimate(&dataset(vec![("a", vec![1, 0])]), 0.05, Target::H, OutputFormat::Markdown).unwrap();
        assert!(out.contains("| a | 2 | 1 | 0.1875 | {0, ..., 2} |"), "{out}");

        let out = cmd_estimate(&dataset(vec![("a", vec![1, 0])]), 0.05, Target::ExpectedH, OutputFormat::Markdown)
            .unwrap();
        assert!(out.contains("| a | 2 | 1 | 0.1875 | (0.15, 1.85) |"), "{out}");
    }

    #[test]
    fn all_zero_scholar_and_empty_dataset() {
        let out = cmd_estimate(&dataset(vec![("z", vec![0, 0, 0])]), 0.05, Target::H, OutputFormat::Csv).unwrap();
        assert_eq!(out, "scholar_id,n,h_hat,v_hat,lo,hi\nz,3,0,0.0000,0,0\n");

        let empty = dataset(vec![]);
        let out = cmd_estimate(&empty, 0.05, Target::H, OutputFormat::Csv).unwrap();
        assert_eq!(out, "scholar_id,n,h_hat,v_hat,lo,hi\n");
        let out = cmd_estimate(&empty, 0.05, Target::H, OutputFormat::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn rows_sorted_by_h_then_id() {
        let d = dataset(vec![("b", vec![1]), ("c", vec![5, 5, 5]), ("a", vec![1])]);
        let report = estimate_report(&estimates_of(&d), 0.05, Target::H).unwrap();
        let ids: Vec<&str> = report.rows.iter().map(|r| r.scholar_id.as_str()).collect();
        assert_eq!(ids, ["c", "a", "b"]);
    }

    #[test]
    fn two_identical_scholars_are_not_separable() {
        let d = dataset(vec![("a", vec![3, 3, 3, 1]), ("b", vec![3, 3, 3, 1])]);
        let out = cmd_compare(&estimates_of(&d), 0.05, Target::H, OutputFormat::Markdown).unwrap();
        assert!(out.starts_with("k = 2, k* = 1, gamma = 0.05, gamma* = 0.97500000\n"), "{out}");
        assert!(out.contains("ranking: not separable"), "{out}");
        let report = compare_report(&estimates_of(&d), 0.05, Target::H).unwrap();
        assert_eq!(report.pairs.len(), 1);
        assert!(report.pairs[0].region.lo <= 0.0 && report.pairs[0].region.hi >= 0.0);
    }

    #[test]
    fn compare_needs_two_scholars() {
        let d = dataset(vec![("a", vec![1])]);
        assert!(cmd_compare(&estimates_of(&d), 0.05, Target::H, OutputFormat::Markdown).is_err());
    }

    #[test]
    fn separated_pair_is_ranked() {
        let e = |id: &str, h| HEstimate { scholar_id: id.into(), n: 100, h_hat: h, v_hat: 1.0 };
        let report = compare_report(&[e("a", 5), e("b", 30), e("c", 6)], 0.05, Target::H).unwrap();
        assert_eq!(report.ranking, ["h_2 > h_1, h_3"]);
        assert_eq!(report.not_separable, ["h_1 - h_3"]);
        let csv = render_compare(&report, OutputFormat::Csv);
        assert!(csv.contains("1,2,a,b,"), "{csv}");
        assert!(csv.lines().nth(1).unwrap().ends_with("h_2 > h_1"), "{csv}");
    }
}
