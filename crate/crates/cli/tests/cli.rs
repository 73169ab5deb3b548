use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn dualsys() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dualsys"))
}

fn bundled_csv() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/table1.csv")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn binomial_run_prints_decile_rows() {
    let out = dualsys()
        .args(["run", "--model", "binomial", "--total-min", "337", "--total-max", "5850", "--data"])
        .arg(bundled_csv())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let quantiles: Vec<u64> = stdout
        .lines()
        .find(|l| l.starts_with("Quantile"))
        .unwrap()
        .split_whitespace()
        .skip(1)
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(quantiles.len(), 9);
    assert!(quantiles[4].abs_diff(1155) <= 40, "{quantiles:?}");
    assert!(stdout.lines().any(|l| l.starts_with("Probability") && l.contains("0.5")));
}

#[test]
fn report_and_posterior_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dualsys()
        .args(["run", "--model", "simple", "--emit", "report_json,posterior_csv,figure_data", "--output-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);

    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("report_simple.json")).unwrap()).unwrap();
    assert_eq!(report["model"], "simple");
    assert_eq!(report["prior"]["total_max"], 25_000);
    assert_eq!(report["deciles"].as_object().unwrap().len(), 9);
    assert!(report.get("runtime_ms").is_none());
    assert!(report["config"].get("p_points").is_none());
    let median = report["median"].as_u64().unwrap();
    assert_eq!(report["deciles"]["0.5"].as_u64().unwrap(), median);
    assert!(median.abs_diff(5837) <= 500);

    let csv = std::fs::read_to_string(dir.path().join("posterior_simple.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("total,log_weight,prob"));
    let mut total_prob = 0.0;
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        total_prob += fields[2].parse::<f64>().unwrap();
        rows += 1;
    }
    assert_eq!(rows, 25_000 - 337 + 1);
    assert!((total_prob - 1.0).abs() < 1e-9, "{total_prob}");

    let figure = std::fs::read_to_string(dir.path().join("figure_simple.csv")).unwrap();
    assert!(figure.starts_with("total,probability\n337,"));
}

#[test]
fn timing_flag_adds_runtime() {
    let dir = tempfile::tempdir().unwrap();
    dualsys()
        .args(["run", "--model", "binomial", "--timing", "--emit", "report_json", "--output-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("report_binomial.json")).unwrap()).unwrap();
    assert!(report["runtime_ms"].is_u64());
}

#[test]
fn combinomial_grid_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dualsys()
        .args(["run", "--model", "combinomial", "--p-points", "60", "--nu-min", "-1", "--nu-points", "13"])
        .args(["--total-max", "1500", "--emit", "report_json", "--output-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("report_combinomial.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["p_points"], 60);
    assert_eq!(report["config"]["nu_min"], -1.0);
    assert_eq!(report["config"]["nu_points"], 13);
}

#[test]
fn missing_data_file_exits_3() {
    let out = dualsys()
        .args(["run", "--model", "simple", "--data", "/definitely/not/here.csv"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn forbidden_cell_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "mentioned_other,letters,count\n1,0,5\n0,0,9\n").unwrap();
    let out = dualsys().args(["run", "--model", "binomial", "--data"]).arg(&path).output().unwrap();
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 3"));
}

#[test]
fn bad_configuration_exits_2() {
    let cases: [&[&str]; 5] = [
        &["run", "--model", "binomial", "--p-points", "100"],
        &["run", "--model", "simple", "--total-min", "10"],
        &["run", "--model", "simple", "--total-min", "900", "--total-max", "800"],
        &["run", "--model", "combinomial", "--nu-points", "1"],
        &["run", "--model", "poisson"],
    ];
    for args in cases {
        let out = dualsys().args(args).output().unwrap();
        assert_eq!(code(&out), 2, "{args:?}");
    }
    let out = dualsys()
        .env("DUALSYS_THREADS", "zero")
        .args(["run", "--model", "binomial"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn thread_cap_does_not_change_results() {
    let run = |threads: &str| {
        dualsys()
            .env("DUALSYS_THREADS", threads)
            .args(["run", "--model", "combinomial", "--p-points", "40", "--nu-points", "9", "--total-max", "2000"])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn figure3_panels() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig3.csv");
    let out = dualsys().args(["figure3", "--out"]).arg(&path).output().unwrap();
    assert_eq!(code(&out), 0);
    let body = std::fs::read_to_string(&path).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("panel_p,panel_nu,j,probability"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 12 * 6);
    for panel in rows.chunks(6) {
        let total: f64 = panel.iter().map(|r| r[3].parse::<f64>().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-11, "{panel:?}");
        assert!(panel.iter().all(|r| r[0] == panel[0][0] && r[1] == panel[0][1]));
    }
}

#[test]
fn figure3_single_binomial_panel() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    let out = dualsys()
        .args(["figure3", "--p", "0.5", "--nu", "1", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let body = std::fs::read_to_string(&path).unwrap();
    let probs: Vec<f64> = body.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    let expected = [1.0, 5.0, 10.0, 10.0, 5.0, 1.0].map(|c| c / 32.0);
    for (p, e) in probs.iter().zip(expected) {
        assert!((p - e).abs() < 1e-12);
    }
}

#[test]
fn figure3_rejects_empty_or_invalid_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    for args in [["--p", ""], ["--p", "1.5"]] {
        let out = dualsys().arg("figure3").args(args).arg("--out").arg(&path).output().unwrap();
        assert_eq!(code(&out), 2, "{args:?}");
    }
}

#[test]
fn figure3_unwritable_output_exits_4() {
    let out = dualsys()
        .args(["figure3", "--out", "/definitely/not/here/fig3.csv"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 4);
}

#[test]
fn demographics_outputs() {
    let out = dualsys().arg("demographics").output().unwrap();
    assert_eq!(code(&out), 0);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["rounded"]["low"], 3600.0);
    assert_eq!(json["rounded"]["high"], 5850.0);
    assert_eq!(json["raw"]["low"], 3597.6);
    assert_eq!(json["raw"]["high"], 5846.1);
    assert_eq!(json["segments"].as_array().unwrap().len(), 2);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("demo.json");
    let out = dualsys()
        .args(["demographics", "--segment", "200000:10", "--rate-low", "0", "--rate-high", "0", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(json["rounded"]["low"], 0.0);
    assert_eq!(json["rounded"]["high"], 0.0);
    assert_eq!(json["segments"].as_array().unwrap().len(), 1);
    assert_eq!(json["segments"][0]["person_years"], 2_000_000.0);
}

#[test]
fn self_check_passes() {
    let out = dualsys().args(["self-check", "--points", "1024"]).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(code(&out), 0, "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 7);
}

#[test]
fn coarse_self_check_fails_with_runtime_exit() {
    // 512 points under-resolves the binomial kernel at n = 50.
    let out = dualsys().args(["self-check", "--points", "512"]).output().unwrap();
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL  binomial model, n = 50"));
}
