use std::path::Path;
use std::process::{Command, Output};

use num_complex::Complex64;
use tvstat::io::{decode_signal, parse_filter_json, parse_graph_json, parse_jpsd_csv};

fn tvstat(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tvstat"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = tvstat(dir, args);
    assert!(
        out.status.success(),
        "`tvstat {}` failed: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn signal(dir: &Path, name: &str) -> tvstat::TimeVertexSignal {
    decode_signal(&std::fs::read(dir.join(name)).unwrap()).unwrap()
}

fn setup(dir: &Path) {
    ok(dir, &["graph", "gen", "--kind", "er", "--n", "10", "--p", "0.5", "--seed", "7", "--out", "g.json"]);
    ok(dir, &["filter", "gen", "--graph", "g.json", "--m", "12", "--l1", "3", "--l2", "2", "--seed", "1", "--out", "h.json"]);
    ok(
        dir,
        &["jwss", "synth", "--graph", "g.json", "--filter", "h.json", "--m", "12", "--q", "3", "--seed", "2", "--out-dir", "x", "--real", "--truth", "truth.csv"],
    );
}

#[test]
fn graph_gen_writes_a_readable_graph() {
    let dir = tempfile::tempdir().unwrap();
    let out = tvstat(dir.path(), &["graph", "gen", "--kind", "er", "--n", "100", "--p", "0.1", "--seed", "7", "--out", "g.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let g = parse_graph_json(&std::fs::read_to_string(dir.path().join("g.json")).unwrap()).unwrap();
    assert_eq!(g.n_vertices(), 100);
    assert!(g.is_connected());
}

#[test]
fn missing_flag_is_a_validation_error_with_usage() {
    let dir = tempfile::tempdir().unwrap();
    let out = tvstat(dir.path(), &["graph", "gen", "--kind", "er", "--out", "g.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("Usage"), "{}", stderr(&out));
    assert!(!dir.path().join("g.json").exists());
}

#[test]
fn mismatched_dimensions_report_geometry_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    setup(p);
    ok(p, &["graph", "gen", "--kind", "ws", "--n", "12", "--seed", "1", "--out", "g12.json"]);
    let out = tvstat(p, &["jpsd", "estimate", "--method", "gbm", "--graph", "g12.json", "--signal", "x/x_0.csv", "--out", "t.csv"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.starts_with("error kind=GeometryError msg="), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);

    std::fs::write(p.join("short.csv"), "1,2\n3,4\n").unwrap();
    let out = tvstat(p, &["jpsd", "estimate", "--method", "gwm", "--graph", "g.json", "--signal", "x/x_0.csv", "--signal", "short.csv", "--out", "t.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("kind=GeometryError"));
}

#[test]
fn numeric_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = tvstat(dir.path(), &["graph", "gen", "--kind", "er", "--n", "40", "--p", "0.001", "--out", "g.json"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("kind=ConnectivityError"));
}

#[test]
fn bad_values_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let out = tvstat(p, &["sim", "sweep", "--axis", "nonsense", "--out", "s.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("kind=InvalidParameterError"));
    let out = tvstat(p, &["transform", "jft", "--graph", "nope.json", "--signal", "x.csv", "--out", "y.tvsg"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("kind=IoError"));
}

#[test]
fn help_lists_every_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[(&[&str], &[&str])] = &[
        (&["graph", "gen"], &["--kind", "--n", "--p", "--k-ring", "--beta", "--seed", "--out", "--threads"]),
        (&["transform", "jft"], &["--graph", "--signal", "--out"]),
        (&["transform", "ijft"], &["--graph", "--signal", "--out"]),
        (&["translate"], &["--graph", "--signal", "--upsilon", "--theta", "--out"]),
        (&["filter", "gen"], &["--graph", "--m", "--l1", "--l2", "--taps", "--seed", "--out"]),
        (&["filter", "apply"], &["--graph", "--filter", "--signal", "--out"]),
        (&["jwss", "synth"], &["--graph", "--filter", "--m", "--q", "--seed", "--out-dir", "--real", "--truth"]),
        (
            &["jpsd", "estimate"],
            &["--method", "--graph", "--signal", "--L", "--hop", "--k2", "--bandwidth", "--gain", "--raw-gwm", "--seed", "--out"],
        ),
        (&["sim", "sweep"], &["--config", "--axis", "--trials", "--seed", "--method", "--timing", "--out"]),
        (
            &["features", "build"],
            &["--manifest", "--frame-ms", "--snr-db", "--gamma", "--kappa-global", "--kappa-local", "--knn", "--no-zscore", "--seed", "--out"],
        ),
    ];
    for (cmd, flags) in cases {
        let mut args = cmd.to_vec();
        args.push("--help");
        let out = tvstat(dir.path(), &args);
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8_lossy(&out.stdout);
        for f in *flags {
            assert!(text.contains(f), "{cmd:?} help lacks {f}");
        }
    }
}

#[test]
fn transform_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    setup(p);
    ok(p, &["transform", "jft", "--graph", "g.json", "--signal", "x/x_0.csv", "--out", "xh.tvsg"]);
    ok(p, &["transform", "ijft", "--graph", "g.json", "--signal", "xh.tvsg", "--out", "back.tvsg"]);
    let x = signal(p, "x/x_0.csv");
    let back = signal(p, "back.tvsg");
    assert!((back.data() - x.data()).norm() < 1e-10 * x.data().norm());

    // complex output cannot go to CSV
    let out = tvstat(p, &["transform", "jft", "--graph", "g.json", "--signal", "x/x_0.csv", "--out", "xh.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn translation_preserves_energy() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    setup(p);
    ok(p, &["translate", "--graph", "g.json", "--signal", "x/x_1.csv", "--upsilon", "-3", "--theta", "2", "--out", "t.tvsg"]);
    let x = signal(p, "x/x_1.csv");
    let t = signal(p, "t.tvsg");
    assert!((t.frobenius_norm() / x.frobenius_norm() - 1.0).abs() < 1e-10);
}

#[test]
fn filter_apply_of_a_delta_filter_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    setup(p);
    std::fs::write(p.join("delta.json"), r#"{"l1": 1, "l2": 1, "taps_re": [[1.0]], "taps_im": [[0.0]]}"#).unwrap();
    ok(p, &["filter", "apply", "--graph", "g.json", "--filter", "delta.json", "--signal", "x/x_2.csv", "--out", "y.tvsg"]);
    let x = signal(p, "x/x_2.csv");
    let y = signal(p, "y.tvsg");
    assert!((y.data() - x.data()).norm() < 1e-12 * x.data().norm());
    let h = parse_filter_json(&std::fs::read_to_string(p.join("h.json")).unwrap()).unwrap();
    assert_eq!((h.l1(), h.l2()), (3, 2));
}

#[test]
fn estimates_read_back_against_the_truth() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    setup(p);
    let truth = parse_jpsd_csv(&std::fs::read_to_string(p.join("truth.csv")).unwrap()).unwrap();
    assert_eq!((truth.n, truth.m), (10, 12));
    ok(p, &["jpsd", "estimate", "--method", "gbm", "--graph", "g.json", "--signal", "x/x_0.csv", "--signal", "x/x_1.csv", "--signal", "x/x_2.csv", "--out", "gbm.csv"]);
    ok(p, &["jpsd", "estimate", "--method", "gwm", "--graph", "g.json", "--signal", "x/x_0.csv", "--L", "6", "--k2", "2", "--out", "gwm.csv"]);
    ok(p, &["jpsd", "estimate", "--method", "gwm", "--graph", "g.json", "--signal", "x/x_0.csv", "--L", "6", "--raw-gwm", "--out", "raw.csv"]);
    for f in ["gbm.csv", "gwm.csv", "raw.csv"] {
        let t = parse_jpsd_csv(&std::fs::read_to_string(p.join(f)).unwrap()).unwrap();
        assert_eq!(t.theta.len(), truth.theta.len());
        assert!(t.theta.as_slice().iter().all(|v| *v >= 0.0 && v.is_finite()));
    }
    // GBM from one realization is exactly |jft|^2
    ok(p, &["jpsd", "estimate", "--method", "gbm", "--graph", "g.json", "--signal", "x/x_0.csv", "--out", "one.csv"]);
    ok(p, &["transform", "jft", "--graph", "g.json", "--signal", "x/x_0.csv", "--out", "xh.tvsg"]);
    let one = parse_jpsd_csv(&std::fs::read_to_string(p.join("one.csv")).unwrap()).unwrap();
    let xh = signal(p, "xh.tvsg");
    for (j, v) in one.theta.as_slice().iter().enumerate() {
        let z: Complex64 = xh.data()[(j % 10, j / 10)];
        assert!((z.norm_sqr() - v).abs() < 1e-10 * (1.0 + v));
    }
}

#[test]
fn complex_synthesis_writes_binary_realizations() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    setup(p);
    ok(p, &["jwss", "synth", "--graph", "g.json", "--filter", "h.json", "--m", "12", "--q", "2", "--out-dir", "cx"]);
    let x = signal(p, "cx/x_1.tvsg");
    assert_eq!(x.shape(), (10, 12));
    assert!(!x.is_real());
}

#[test]
fn sweep_is_deterministic_and_timing_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("cfg.json"), r#"{"n": 8, "p": 0.6, "m": 8, "l1": 2, "l2": 2, "window_len": 4, "k2": 2, "trials": 3, "q_values": [1, 4]}"#).unwrap();
    ok(p, &["--threads", "1", "sim", "sweep", "--config", "cfg.json", "--axis", "q", "--out", "a.csv"]);
    ok(p, &["sim", "sweep", "--config", "cfg.json", "--axis", "q", "--out", "b.csv"]);
    let a = std::fs::read_to_string(p.join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read_to_string(p.join("b.csv")).unwrap());
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "axis_value,nmse,bias,std,wall_time_s,trials");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1,") && lines[1].ends_with(",,3"), "{}", lines[1]);

    ok(p, &["sim", "sweep", "--config", "cfg.json", "--axis", "q", "--trials", "2", "--method", "gbm", "--timing", "--out", "c.csv"]);
    let c = std::fs::read_to_string(p.join("c.csv")).unwrap();
    let row: Vec<&str> = c.lines().nth(1).unwrap().split(',').collect();
    assert!(row[4].parse::<f64>().unwrap() >= 0.0);
    assert_eq!(row[5], "2");
}

#[test]
fn features_build_standardizes_columns() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::create_dir(p.join("rec")).unwrap();
    std::fs::write(
        p.join("layout.json"),
        r#"{"channels": [{"name": "a", "coord": [0, 0]}, {"name": "b", "coord": [1, 0]}, {"name": "c", "coord": [0, 1]}], "glb_pairs": [["a", "b"]]}"#,
    )
    .unwrap();
    let mut samples = Vec::new();
    for s in 0..4 {
        let rows: Vec<String> = (0..3)
            .map(|ch| (0..40).map(|t| format!("{}", ((t * (ch + 1) * (s + 2)) % 7) as f64)).collect::<Vec<_>>().join(","))
            .collect();
        std::fs::write(p.join(format!("rec/s{s}.csv")), rows.join("\n")).unwrap();
        samples.push(format!(r#"{{"path": "rec/s{s}.csv", "label": {}}}"#, s % 2));
    }
    std::fs::write(
        p.join("manifest.json"),
        format!(r#"{{"samples": [{}], "rate_hz": 100, "layout": "layout.json"}}"#, samples.join(",")),
    )
    .unwrap();
    // run from elsewhere: manifest paths resolve against the manifest
    ok(Path::new("/"), &["features", "build", "--manifest", p.join("manifest.json").to_str().unwrap(), "--frame-ms", "100", "--out", p.join("f.csv").to_str().unwrap()]);
    let text = std::fs::read_to_string(p.join("f.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), 1 + 3 * 10);
    assert_eq!(header[0], "label");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').skip(1).map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    for c in 0..30 {
        let mean: f64 = rows.iter().map(|r| r[c]).sum::<f64>() / 4.0;
        assert!(mean.abs() < 1e-9);
    }

    std::fs::write(p.join("rec/s0.csv"), "0,0,0,0\n0,0,0,0\n0,0,0,0\n").unwrap();
    let out = tvstat(p, &["features", "build", "--manifest", "manifest.json", "--frame-ms", "20", "--snr-db", "5", "--out", "g.csv"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("kind=NotDefinedError"));
}
