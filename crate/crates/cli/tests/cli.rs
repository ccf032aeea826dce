use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hindex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hindex")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/economics_estimates.csv")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn estimate_markdown_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "c.csv", "scholar_id,citations\na,1\na,0\nz,0\n");
    let out = hindex(&["estimate", input.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("| a | 2 | 1 | 0.1875 | {0, ..., 2} |"), "{text}");
    assert!(text.contains("| z | 1 | 0 | 0.0000 | {0, ..., 0} |"), "{text}");
}

#[test]
fn estimate_json_input_and_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "d.json", r#"{"a":[4,4,4,4,1]}"#);
    let out = hindex(&["estimate", input.to_str().unwrap(), "--format", "json", "--target", "eh"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["target"], "eh");
    assert_eq!(v["rows"][0]["h_hat"], 4);
}

#[test]
fn empty_dataset_gives_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "e.json", "{}");
    let out = hindex(&["estimate", input.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "scholar_id,n,h_hat,v_hat,lo,hi\n");
}

#[test]
fn malformed_input_fails_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.csv", "scholar_id,citations\na,2\na,-1\n");
    let report = dir.path().join("report.md");
    let out = hindex(&["estimate", input.to_str().unwrap(), "--out", report.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("line 3"), "{err}");
    assert!(!report.exists());
}

#[test]
fn compare_fixture_reports_all_pairs_and_ranking() {
    let out = hindex(&["compare", "--estimates", fixture().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("k = 10, k* = 45, gamma = 0.05, gamma* = 0.99943040\n"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("| h_")).count(), 45);
    assert!(text.contains("| h_1 - h_2 | {-14, ..., 14} |"));
    assert!(text.contains("| h_1 - h_10 | {13, ..., 31} |"));
    assert!(text.contains("ranking: h_1 > h_8, h_9, h_10"), "{text}");
    assert!(text.contains("h_1 = Ostrom"));
}

#[test]
fn compare_needs_two_scholars() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "one.csv", "scholar_id,citations\na,1\n");
    let out = hindex(&["compare", input.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("2 scholars") || stderr(&out).contains("scholars"), "{}", stderr(&out));
}

#[test]
fn simulate_writes_csv_and_reports_bad_keys() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.cfg", "model = geometric:p=0.2\nn_grid = 20, 40\nreps = 100\nseed = 5\n");
    let out_csv = dir.path().join("out.csv");
    let out = hindex(&["simulate", good.to_str().unwrap(), "--out", out_csv.to_str().unwrap(), "--threads", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(&out_csv).unwrap();
    assert!(csv.starts_with("model,n,reps,gamma,target,coverage"), "{csv}");
    assert_eq!(csv.lines().count(), 3);

    let missing = write(dir.path(), "missing.cfg", "n_grid = 20\n");
    let target = dir.path().join("never.csv");
    let out = hindex(&["simulate", missing.to_str().unwrap(), "--out", target.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("model"), "{}", stderr(&out));
    assert!(!target.exists());

    let unknown = write(dir.path(), "unknown.cfg", "model = geometric:p=0.2\nn_grid = 20\nwidth = 3\n");
    let out = hindex(&["simulate", unknown.to_str().unwrap(), "--out", target.to_str().unwrap()]);
    assert!(stderr(&out).contains("width"), "{}", stderr(&out));
    assert!(!target.exists());
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(leftovers.len(), 4, "{leftovers:?}");
}

#[test]
fn simulate_seed_override_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.cfg", "model = pareto:alpha=1.5\nn_grid = 60\nreps = 200\nseed = 1\n");
    let run = |name: &str, seed: Option<&str>| {
        let out = dir.path().join(name);
        let mut args = vec!["simulate", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
        if let Some(s) = seed {
            args.extend(["--seed", s]);
        }
        assert!(hindex(&args).status.success());
        std::fs::read_to_string(out).unwrap()
    };
    assert_eq!(run("a.csv", None), run("b.csv", Some("1")));
    assert_ne!(run("c.csv", None), run("d.csv", Some("2")));
}

#[test]
fn bias_and_consistency_experiments() {
    let dir = tempfile::tempdir().unwrap();
    let bias = write(dir.path(), "b.cfg", "model = pareto:alpha=2\nn_grid = 100, 1000\nexperiment = bias\n");
    let out = dir.path().join("bias.csv");
    assert!(hindex(&["simulate", bias.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("model,n,h,exact_e,ratio\n"), "{text}");

    let cons = write(
        dir.path(),
        "c.cfg",
        "model = pareto:alpha=1.5\nn_grid = 100\nreps = 100\nexperiment = consistency\n",
    );
    let out = dir.path().join("cons.csv");
    assert!(hindex(&["simulate", cons.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.success());
    assert!(std::fs::read_to_string(&out).unwrap().contains("median_ratio"));
}
