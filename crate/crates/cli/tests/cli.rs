use std::process::{Command, Output};

fn tmode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmode"))
        .args(args)
        .output()
        .expect("failed to launch tmode")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .expect("header")
        .split(',')
        .map(str::to_owned)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect();
    (header, rows)
}

#[test]
fn mode_value_single_point() {
    let out = tmode(&[
        "mode-value",
        "--k",
        "1,2,3",
        "--nu",
        "2",
        "--precision",
        "full",
    ]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(header, ["k", "nu", "mode_value", "gaussian_mode_value"]);
    assert_eq!(rows.len(), 3);
    let c3: f64 = rows[2][2].parse().unwrap();
    assert!((c3 / 0.084404654639728694021 - 1.0).abs() < 1e-14);
    let c2: f64 = rows[1][2].parse().unwrap();
    assert!((c2 * 2.0 * std::f64::consts::PI - 1.0).abs() < 1e-15);
}

#[test]
fn mode_value_default_grid_has_200_points_per_k() {
    let out = tmode(&["mode-value", "--k", "1,3"]);
    assert!(out.status.success());
    let (_, rows) = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 400);
    assert_eq!(rows[0][1], "0.1");
    assert_eq!(rows[199][1], "30");
}

#[test]
fn mode_value_accepts_infinite_nu() {
    let out = tmode(&["mode-value", "--k", "2", "--nu", "inf"]);
    assert!(out.status.success());
    let (_, rows) = csv_rows(&stdout(&out));
    assert_eq!(rows[0][1], "inf");
    assert_eq!(rows[0][2], rows[0][3]);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["table1", "--n-mc", "5000", "--seed", "7"][..],
        &[
            "sample", "--nu", "5", "--k", "3", "--n", "2000", "--seed", "9",
        ][..],
    ] {
        let a = tmode(args);
        let b = tmode(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn table1_matches_published_values() {
    let out = tmode(&["table1"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(header, ["nu", "k", "probability", "reference", "matches"]);
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r[4] == "true"));
    assert_eq!(rows[12][0], "inf");
    assert_eq!(rows[12][3], "0.079656");
}

#[test]
fn table1_with_monte_carlo_columns() {
    let out = tmode(&["table1", "--n-mc", "50000", "--format", "json"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "table1");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 16);
    assert!(rows[0]["mc_estimate"].is_number());
    assert_eq!(rows[12]["nu"], "inf");
}

#[test]
fn verify_passes_and_rejects_small_k_max() {
    let out = tmode(&["verify", "--k-max", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = csv_rows(&stdout(&out));
    let observed: Vec<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(
        observed,
        [
            "increasing",
            "constant",
            "decreasing",
            "decreasing",
            "decreasing"
        ]
    );

    let out = tmode(&["verify", "--k-max", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn verify_reports_mismatch_with_exit_one() {
    // A tolerance this large declares every dimension constant.
    let out = tmode(&["verify", "--k-max", "3", "--tol", "1e6"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("k=1"), "{err}");
    assert!(err.contains("k=3"), "{err}");
}

#[test]
fn moments_sweep() {
    let out = tmode(&[
        "moments",
        "--nu1",
        "5",
        "--nu2",
        "10",
        "--k",
        "3",
        "--m",
        "2",
        "--precision",
        "full",
    ]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(
        header[..5],
        [
            "k",
            "m",
            "moment_ratio",
            "radial_moment_quotient",
            "kurtosis_ratio"
        ]
    );
    assert_eq!(rows.len(), 10);
    for r in &rows {
        let ratio: f64 = r[2].parse().unwrap();
        let quotient: f64 = r[3].parse().unwrap();
        let kurt: f64 = r[4].parse().unwrap();
        assert!((ratio - 4.0 / 3.0).abs() < 1e-14);
        assert!((quotient - ratio).abs() < 1e-13);
        assert!((kurt - 2.25).abs() < 1e-13);
    }
}

#[test]
fn moments_leave_kurtosis_blank_without_fourth_moment() {
    let out = tmode(&[
        "moments", "--nu1", "3", "--nu2", "inf", "--k", "2", "--m", "1",
    ]);
    assert!(out.status.success());
    let (_, rows) = csv_rows(&stdout(&out));
    assert!(rows.iter().all(|r| r[4].is_empty()));
}

#[test]
fn moments_nonexistent_is_usage_error() {
    let out = tmode(&[
        "moments", "--nu1", "2", "--nu2", "10", "--k", "3", "--m", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn density_profile_all_dofs() {
    let out = tmode(&["density-profile", "--k", "3"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(header, ["nu", "k", "t", "density"]);
    assert_eq!(rows.len(), 4 * 401);
    let peak = &rows[200];
    assert_eq!(peak[2], "0");
    let nus: Vec<&str> = rows.iter().step_by(401).map(|r| r[0].as_str()).collect();
    assert_eq!(nus, ["1", "2", "10", "inf"]);
}

#[test]
fn sample_summary_and_draws() {
    let out = tmode(&["sample", "--nu", "inf", "--k", "2", "--n", "4", "--draws"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(header, ["index", "x1", "x2"]);
    assert_eq!(rows.len(), 4);

    let out = tmode(&[
        "sample", "--nu", "6", "--k", "3", "--n", "200000", "--radius", "1",
    ]);
    assert!(out.status.success());
    let (_, rows) = csv_rows(&stdout(&out));
    let est: f64 = rows[0][2].parse().unwrap();
    let se: f64 = rows[0][3].parse().unwrap();
    let exact: f64 = rows[0][4].parse().unwrap();
    assert!((est - exact).abs() < 4.0 * se);
}

#[test]
fn output_file_option() {
    let dir = std::env::temp_dir().join(format!("tmode-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("mode.json");
    let out = tmode(&[
        "mode-value",
        "--k",
        "4",
        "--nu",
        "3",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["rows"][0]["k"], 4);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bad_arguments_exit_two() {
    for args in [
        &["mode-value", "--k", "0", "--nu", "1"][..],
        &["mode-value", "--k", "2", "--nu", "-1"][..],
        &["mode-value", "--k", "2", "--grid", "5:1:10"][..],
        &["density-profile", "--k", "2", "--nu", "zero"][..],
        &["sample", "--nu", "3", "--k", "2", "--radius", "-1"][..],
        &["no-such-command"][..],
    ] {
        let out = tmode(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

fn column(rows: &[Vec<String>], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn mode_value_grid_shapes() {
    let out = tmode(&["mode-value", "--k", "2", "--nu", "7", "--precision", "full"]);
    let (_, rows) = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    let c: f64 = rows[0][2].parse().unwrap();
    assert!((c * 2.0 * std::f64::consts::PI - 1.0).abs() < 1e-15);

    for (k, increasing) in [("1", true), ("4", false)] {
        let out = tmode(&[
            "mode-value",
            "--k",
            k,
            "--grid",
            "0.1:100:50",
            "--log",
            "--precision",
            "full",
        ]);
        assert!(out.status.success());
        let (_, rows) = csv_rows(&stdout(&out));
        assert_eq!(rows.len(), 50);
        let values = column(&rows, 2);
        assert!(
            values.windows(2).all(|w| (w[1] > w[0]) == increasing),
            "k = {k}"
        );
    }
}

#[test]
fn density_profile_peaks() {
    let one_over_pi = 1.0 / std::f64::consts::PI;
    let out = tmode(&[
        "density-profile",
        "--nu",
        "1",
        "--k",
        "1",
        "--axis-range",
        "-1:1:3",
        "--precision",
        "full",
    ]);
    let (_, rows) = csv_rows(&stdout(&out));
    let f: f64 = rows[1][3].parse().unwrap();
    assert!((f / one_over_pi - 1.0).abs() < 1e-15);

    let out = tmode(&[
        "density-profile",
        "--nu",
        "inf",
        "--k",
        "2",
        "--axis-range",
        "-1:1:3",
        "--precision",
        "full",
    ]);
    let (_, rows) = csv_rows(&stdout(&out));
    let f: f64 = rows[1][3].parse().unwrap();
    assert!((f * 2.0 * std::f64::consts::PI - 1.0).abs() < 1e-15);

    let out = tmode(&[
        "density-profile",
        "--nu",
        "all",
        "--k",
        "3",
        "--axis-range",
        "-1:1:3",
        "--precision",
        "full",
    ]);
    let (_, rows) = csv_rows(&stdout(&out));
    let peaks: Vec<f64> = rows
        .iter()
        .filter(|r| r[2] == "0")
        .map(|r| r[3].parse().unwrap())
        .collect();
    assert_eq!(peaks.len(), 4);
    assert!(peaks.windows(2).all(|w| w[0] > w[1]), "{peaks:?}");
}

#[test]
fn table1_monte_carlo_one_million() {
    let out = tmode(&["table1", "--n-mc", "1000000", "--seed", "42"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = csv_rows(&stdout(&out));
    let z = header.iter().position(|h| h == "mc_z").unwrap();
    for r in &rows {
        let score: f64 = r[z].parse().unwrap();
        assert!(score <= 4.0, "{r:?}");
    }
}

#[test]
fn verify_k_max_ten() {
    let out = tmode(&["verify", "--k-max", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 10);
    let fd = header.iter().position(|h| h == "max_fd_residual").unwrap();
    assert!(column(&rows, fd).iter().all(|&r| r <= 1e-5));
    assert!(rows[3..].iter().all(|r| r[2] == "decreasing"));
}

#[test]
fn moments_identity_and_existence() {
    let out = tmode(&[
        "moments",
        "--nu1",
        "7.5",
        "--nu2",
        "7.5",
        "--k",
        "4",
        "--m",
        "3",
        "--precision",
        "full",
    ]);
    assert!(out.status.success());
    let (_, rows) = csv_rows(&stdout(&out));
    assert!(column(&rows, 2).iter().all(|&v| v == 1.0));
    assert!(column(&rows, 4).iter().all(|&v| (v - 1.0).abs() < 1e-14));

    let out = tmode(&[
        "moments", "--nu1", "5", "--nu2", "10", "--k", "3", "--m", "6",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not exist"));
}
