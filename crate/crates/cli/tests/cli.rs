use std::process::{Command, Output};

fn weylpt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weylpt")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

#[test]
fn bad_arguments_exit_with_two() {
    for args in [
        &["qsolve", "--max-order", "4"][..],
        &["qsolve", "--max-order", "9"],
        &["hermitian", "--max-order", "3"],
        &["observables", "--max-order", "4"],
        &["spectrum", "--dim", "10"],
        &["spectrum", "--levels", "0"],
        &["energy", "--dim", "5"],
        &["density", "--points", "1"],
        &["spectrum", "--m", "-1"],
        &["spectrum", "--M", "2", "--mu", "3"],
        &["no-such-command"],
        &["qsolve", "--bogus"],
    ] {
        let o = weylpt(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn computation_failure_exits_with_one() {
    let o = weylpt(&["density", "--xmin", "-3", "--xmax", "3", "--points", "11"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid"));
}

#[test]
fn thread_cap_must_be_positive() {
    let o = Command::new(env!("CARGO_BIN_EXE_weylpt"))
        .args(["qsolve", "--max-order", "1"])
        .env("WEYLPT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn qsolve_order_one_text() {
    let o = weylpt(&["qsolve", "--max-order", "1"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("# weylpt "));
    assert!(s.contains("Q1 = (-4/3)*M^-4*T[3,0] + (-2)*M^-2*T[1,2]"), "{s}");
    assert!(s.contains("residual [H0,Q1] - rhs1: 0"));
    assert!(s.contains("Q1: matches"));
}

#[test]
fn qsolve_order_seven_has_four_zero_residuals() {
    let s = stdout(&weylpt(&["qsolve"]));
    for k in [1, 3, 5, 7] {
        assert!(s.contains(&format!("residual [H0,Q{k}] - rhs{k}: 0")), "Q{k}");
    }
    assert!(s.contains("Q5: 6 coefficient(s) differ"));
    assert!(s.contains("Q7: 18 coefficient(s) differ"));
}

#[test]
fn json_documents_parse_and_carry_the_version() {
    for args in [
        &["qsolve", "--max-order", "3"][..],
        &["hermitian", "--max-order", "4"],
        &["observables", "--max-order", "2"],
        &["classical"],
        &["energy", "--n-max", "3"],
        &["spectrum"],
        &["density", "--points", "401"],
    ] {
        let mut full = args.to_vec();
        full.extend(["--format", "json"]);
        let o = weylpt(&full);
        assert!(o.status.success(), "{args:?}");
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).expect("json");
        assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
        assert_eq!(v["command"], args[0]);
    }
}

#[test]
fn csv_headers() {
    let cases = [
        (&["qsolve", "--max-order", "1"][..], "object,order,r_s,params,re,im"),
        (&["classical"], "eps_order,p_power,x_power,params,re,im"),
        (&["energy", "--n-max", "2"], "n,E_exact_sym_at_params,E_printed_formula,diff,E_matrix_oracle"),
        (&["spectrum"], "index,re,im,dim,eps"),
        (&["density", "--points", "401"], "x,rho"),
    ];
    for (args, header) in cases {
        let mut full = args.to_vec();
        full.extend(["--format", "csv"]);
        let s = stdout(&weylpt(&full));
        assert_eq!(s.lines().next(), Some(header), "{args:?}");
    }
}

#[test]
fn spectrum_at_zero_coupling_is_the_oscillator() {
    let s = stdout(&weylpt(&["spectrum", "--eps", "0", "--format", "csv"]));
    for (n, line) in s.lines().skip(1).enumerate() {
        let re: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((re - (n as f64 + 0.5)).abs() < 1e-12, "{line}");
    }
}

#[test]
fn physical_units_scale_the_spectrum() {
    // At ε = 0 the levels are ħω(n + ½) with ω = μ/√m.
    let s = stdout(&weylpt(&["spectrum", "--eps", "0", "--m", "4", "--mu", "2", "--hbar", "0.5", "--format", "csv"]));
    let omega = 2.0 / 4f64.sqrt();
    for (n, line) in s.lines().skip(1).enumerate() {
        let re: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((re - 0.5 * omega * (n as f64 + 0.5)).abs() < 1e-12, "{line}");
    }
}

#[test]
fn density_integrates_to_one() {
    let o = weylpt(&["density", "--n", "2", "--eps", "0.05", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["integral"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert_eq!(v["rho"].as_array().unwrap().len(), 2001);
}

#[test]
fn energy_reports_the_missing_factor() {
    let s = stdout(&weylpt(&["energy", "--n-max", "3"]));
    assert!(s.contains("lacks a factor M^-2"));
    assert!(s.contains("M^-4 block matches printed (30n^2+30n+11)/(8M^4): yes"));
}

#[test]
fn classical_prints_the_mass_function() {
    let s = stdout(&weylpt(&["classical"]));
    assert!(s.contains("M(x_c) = m/(1 + (6)*mu^-4*eps^2*x_c^2) + O(eps^4)"), "{s}");
}

#[test]
fn output_is_deterministic_across_runs_and_thread_counts() {
    for args in [&["energy", "--n-max", "8"][..], &["density", "--n", "1", "--points", "501"], &["qsolve"]] {
        let a = weylpt(args);
        let b = Command::new(env!("CARGO_BIN_EXE_weylpt")).args(args).env("WEYLPT_THREADS", "1").output().unwrap();
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.stdout, weylpt(args).stdout, "{args:?}");
    }
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.json");
    let o = weylpt(&["qsolve", "--max-order", "1", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["generators"].as_array().unwrap().len(), 1);
}

#[test]
fn verify_passes() {
    let o = weylpt(&["verify", "--format", "csv"]);
    let s = stdout(&o);
    assert_eq!(s.lines().next(), Some("check_name,value,expected_order,pass"));
    assert!(o.status.success(), "{s}");
    assert!(s.lines().skip(1).all(|l| l.ends_with(",true")));
}
