use std::path::Path;
use std::process::{Command, Output};

fn qdot(args: &[&str], dir: &Path, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qdot"));
    cmd.args(args).current_dir(dir).env_remove("QDOT_CONFIG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn qdot")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("JSON output")
}

#[test]
fn pt_limit_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdot(&["pt-limit", "--M", "2"], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let block = &v["blocks"][0];
    assert_eq!(block["sign"], "+");
    assert!((block["v"][0][0].as_f64().unwrap() - 0.86165).abs() < 1e-5);
    assert!((block["v"][0][1].as_f64().unwrap() - 0.39166).abs() < 1e-5);
    assert_eq!(v["rows"][0]["label"], "psi_<^(2,+)");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn entangle_benchmark() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdot(&["entangle", "--m", "2", "--lambda", "2", "--wl", "1.65", "--dimension", "2d"], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["measure"].as_f64().unwrap() - 0.6265).abs() < 2e-3);
    assert_eq!((v["S"].as_i64(), v["M_S"].as_i64(), v["nmax"].as_i64()), (Some(0), Some(0), Some(8)));
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn transform_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdot(&["transform", "--ncm", "0", "--mcm", "0", "--n", "0", "--m", "0"], dir.path(), &[]);
    assert_eq!(stdout(&out), "n1,m1,nz1,n2,m2,nz2,amplitude\n0,0,0,0,0,0,1\n");
    let out = qdot(&["transform", "--ncm", "0", "--mcm", "0", "--n", "0", "--m", "-1"], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 3);
}

#[test]
fn config_resolution_order() {
    let dir = tempfile::tempdir().unwrap();
    let measure = |out: &Output| json(out)["measure"].as_f64().unwrap();
    let base = qdot(&["entangle", "--m", "0", "--wl", "0.5"], dir.path(), &[]);
    let weak = qdot(&["entangle", "--m", "0", "--wl", "0.5", "--lambda", "0.5"], dir.path(), &[]);

    std::fs::write(dir.path().join("dot.cfg"), "lambda = 0.5\n").unwrap();
    let from_cwd = qdot(&["entangle", "--m", "0", "--wl", "0.5"], dir.path(), &[]);
    assert_eq!(measure(&from_cwd), measure(&weak));

    let env_cfg = dir.path().join("env.cfg");
    std::fs::write(&env_cfg, "lambda = 2\n").unwrap();
    let from_env = qdot(&["entangle", "--m", "0", "--wl", "0.5"], dir.path(), &[("QDOT_CONFIG", env_cfg.to_str().unwrap())]);
    assert_eq!(measure(&from_env), measure(&base));

    let flag_wins = qdot(&["entangle", "--m", "0", "--wl", "0.5", "--lambda", "2"], dir.path(), &[]);
    assert_eq!(measure(&flag_wins), measure(&base));

    std::fs::write(dir.path().join("bad.cfg"), "lambda = 1\ncolour = blue\n").unwrap();
    let bad = qdot(&["entangle", "--m", "0", "--config", "bad.cfg"], dir.path(), &[]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 2"));
}

#[test]
fn three_d_from_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("dot.cfg"), "wz_ratio = 2\n").unwrap();
    let out = qdot(&["entangle", "--m", "0", "--wl", "1"], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["nzmax"].as_i64(), Some(6));
    let out = qdot(&["entangle", "--m", "0", "--dimension", "3d", "--wz-ratio", "inf"], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(qdot(&["spectrum", "--wl", "1:0:0.1"], dir.path(), &[]).status.code(), Some(2));
    assert_eq!(qdot(&["estimate", "--input", "missing.csv"], dir.path(), &[]).status.code(), Some(2));
    let out = qdot(&["ground-state", "--wl", "2.5", "--m-max", "1"], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m_max"));
}

#[test]
fn addition_energy_feeds_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdot(&["addition-energy", "--grid", "1.55:1.75:0.01", "--out", "ea.csv"], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("ea.csv")).unwrap();
    assert!(text.starts_with("wl_ratio,E_a,m,M_S\n1.55,"));

    let est = qdot(&["estimate", "--input", "ea.csv"], dir.path(), &[]);
    assert_eq!(est.status.code(), Some(0), "{}", String::from_utf8_lossy(&est.stderr));
    let body = stdout(&est);
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("wl_ratio,F,b1_sq,b0,measure_0th,measure_1st"));
    let row: Vec<f64> = lines.find(|l| l.starts_with("1.65,")).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row[4], 0.625);
    assert!((row[5] - 0.6261).abs() < 5e-4);
}

#[test]
fn estimate_outside_first_order_regime() {
    let dir = tempfile::tempdir().unwrap();
    // E_a falling steeply: F far outside the real-root region
    let rows: String = (1..=5).map(|k| format!("{},{},0,0\n", 0.1 * f64::from(k), -10.0 * f64::from(k))).collect();
    std::fs::write(dir.path().join("ea.csv"), format!("wl_ratio,E_a,m,M_S\n{rows}")).unwrap();
    let out = qdot(&["estimate", "--input", "ea.csv"], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("first-order regime"));
}

#[test]
fn deterministic_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["scan-entangle", "--wl", "0:2:0.1", "--nmax", "6"];
    let a = qdot(&args, dir.path(), &[]);
    let b = qdot(&args, dir.path(), &[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 22);
    assert!(text.lines().nth(1).unwrap().starts_with("0,0,0,0,"));
}

#[test]
fn scan_entangle_jumps_at_segment_boundaries() {
    let dir = tempfile::tempdir().unwrap();
    let seg = stdout(&qdot(&["ground-state", "--wl", "0:3:0.05"], dir.path(), &[]));
    let bounds: Vec<f64> = seg.lines().skip(2).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(bounds.len() >= 3);
    let scan = stdout(&qdot(&["scan-entangle", "--wl", "0:3:0.05"], dir.path(), &[]));
    let rows: Vec<(f64, i32, f64)> = scan
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[4].parse().unwrap())
        })
        .collect();
    for w in rows.windows(2) {
        if w[0].1 != w[1].1 {
            assert!(bounds.iter().any(|&b| w[0].0 < b && b < w[1].0), "label change between {} and {}", w[0].0, w[1].0);
        } else {
            assert!((w[1].2 - w[0].2).abs() < 0.05);
        }
    }
}

#[test]
fn spectrum_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdot(&["spectrum", "--wl", "0:0.2:0.1", "--m-max", "3", "--lambda", "0", "--g-star", "0"], dir.path(), &[]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("wl_ratio,m,S,M_S,E_total"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 12);
    // noninteracting: E = (m + 2)Ω − ω_L m
    assert_eq!(rows[2], "0,2,0,0,4");
}
