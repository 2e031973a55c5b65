use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use icc_core::geom::Polygon2D;
use icc_region::output::read_csv;
use icc_region::{execute, Mode, RunConfig, Verdict};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_icc-region");

fn reference_json(mode: &str, extra: &str) -> String {
    format!(
        r#"{{
            "channel": {{"p1": 6, "p2": 1.5, "a12": 0.74, "a21": 0.74, "k": 4}},
            "mode": "{mode}",
            "k_values": [1, 4]{extra}
        }}"#
    )
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn relay_mode_with_unseen_relay() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"channel": {"p1": 6, "p2": 1.5, "a12": 0.74, "a21": 0, "k": 2}, "mode": "relay"}"#,
    );
    let out = dir.path().join("out");
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = std::fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(
        report.contains(&format!("{:.6}", 0.5 * 7f64.log2())),
        "{report}"
    );
}

#[test]
fn coarse_region_mode() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &reference_json("region", ""));
    let out = dir.path().join("out");
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--resolution",
        "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("[pass] slope audit"), "{text}");
    let rows = read_csv(&out.join("region_K4.csv")).unwrap();
    assert!(rows.len() >= 3);
    assert!(out.join("region.svg").exists());
}

#[test]
fn csv_rows_lie_on_the_hull() {
    let dir = TempDir::new().unwrap();
    let mut cfg = RunConfig::from_json(&reference_json("compare", "")).unwrap();
    cfg.sweep.resolution = 3;
    cfg.baseline_resolution = 5;
    cfg.output_dir = Some(dir.path().to_path_buf());
    let report = execute(&cfg).unwrap();
    for name in ["hk", "region_K1", "region_K4", "gvbc"] {
        let region = report.region(name).unwrap();
        let rows = read_csv(&dir.path().join(format!("{name}.csv"))).unwrap();
        assert_eq!(rows.len(), region.vertices().len());
        let hull: &Polygon2D = &region.hull;
        for (row, v) in rows.iter().zip(region.vertices()) {
            assert!((row.r1 - v.r1).abs() <= 1e-6 && (row.r2 - v.r2).abs() <= 1e-6);
            assert!(hull.distance_to(*row) <= 1e-6);
        }
    }
    assert!(dir.path().join("compare.svg").exists());
    for c in report.checks.iter().filter(|c| c.name.contains("inside")) {
        assert_eq!(c.verdict, Verdict::Pass, "{c:?}");
    }
}

#[test]
fn flags_override_the_file() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        &reference_json("compare", r#", "output_dir": "ignored""#),
    );
    let out = dir.path().join("flags");
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--mode",
        "hk",
        "--resolution",
        "3",
        "--no-plot",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.join("hk.csv").exists());
    assert!(!out.join("hk.svg").exists());
    assert!(!dir.path().join("ignored").exists());
}

#[test]
fn repeated_runs_are_identical() {
    let dir = TempDir::new().unwrap();
    let mut outputs = Vec::new();
    for run_id in 0..2 {
        let mut cfg = RunConfig::from_json(&reference_json("compare", "")).unwrap();
        cfg.sweep.resolution = 3;
        cfg.baseline_resolution = 5;
        cfg.output_dir = Some(dir.path().join(format!("run{run_id}")));
        execute(&cfg).unwrap();
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(cfg.output_dir.unwrap())
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|x| x == "csv" || x == "svg"))
            .map(|p| {
                (
                    p.file_name().unwrap().to_string_lossy().into_owned(),
                    std::fs::read(&p).unwrap(),
                )
            })
            .collect();
        files.sort();
        outputs.push(files);
    }
    assert_eq!(outputs[0].len(), 5);
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn invalid_config_exits_with_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        &reference_json("compare", "").replace("\"p1\": 6", "\"p1\": -6"),
    );
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(
        err.starts_with("error kind=validation field=channel.p1 "),
        "{err}"
    );

    let cfg = write_config(
        dir.path(),
        r#"{"channel": {"p1": 6, "p2": 1.5, "a12": 0.74, "a21": 0.74}, "mode": "compare"}"#,
    );
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("field=k_values"));

    let cfg = write_config(
        dir.path(),
        r#"{"channel": {"p1": 6, "p2": 1.5, "a12": 0.74, "a21": 0.74}, "mode": "warp"}"#,
    );
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("field=mode"));

    let o = run(&["--config", cfg.to_str().unwrap(), "--resolution", "many"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error kind=validation field=args"));
}

#[test]
fn io_failures_exit_with_4() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.json");
    let o = run(&[
        "--config",
        missing.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).starts_with("error kind=io "));

    // A regular file where the output directory should be.
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "x").unwrap();
    let cfg = write_config(dir.path(), &reference_json("hk", ""));
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        blocker.join("sub").to_str().unwrap(),
        "--resolution",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn every_mode_runs() {
    let dir = TempDir::new().unwrap();
    for mode in [Mode::Region, Mode::Hk, Mode::Gvbc, Mode::Relay, Mode::Ideal] {
        let mut cfg = RunConfig::from_json(&reference_json("region", "")).unwrap();
        cfg.mode = mode;
        cfg.sweep.resolution = 3;
        cfg.output_dir = Some(dir.path().join(mode.name()));
        let report = execute(&cfg).unwrap();
        assert!(
            report.all_checks().all(|c| c.verdict != Verdict::Fail),
            "{}",
            report.render()
        );
    }
}
