use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_phasefront");

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.toml"))
}

fn golden(name: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn phasefront(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn simulate(config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["simulate", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    phasefront(&args)
}

fn read(dir: &Path, file: &str) -> String {
    fs::read_to_string(dir.join(file)).unwrap()
}

/// Data rows of a CSV, split into fields.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows(text).iter().map(|r| r[i].parse().unwrap()).collect()
}

fn assert_csv_close(actual: &str, expected: &str, rel: f64) {
    let (a, e) = (actual.lines().collect::<Vec<_>>(), expected.lines().collect::<Vec<_>>());
    assert_eq!(a.len(), e.len());
    assert_eq!(a[0], e[0]);
    for (ra, re) in a[1..].iter().zip(&e[1..]) {
        for (x, y) in ra.split(',').zip(re.split(',')) {
            let (x, y): (f64, f64) = (x.parse().unwrap(), y.parse().unwrap());
            assert!((x - y).abs() <= rel * (1.0 + y.abs()), "{x} vs {y} in {ra}");
        }
    }
}

#[test]
fn constant_state_produces_no_events() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate(&fixture("constant"), dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read(dir.path(), "events.csv").trim(), "t,x,kind,incoming,outgoing,delta_L_xi,delta_Q,delta_F,solver");
    let snaps = read(dir.path(), "snapshots.csv");
    let r = rows(&snaps);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][1], "-inf");
    assert_eq!(column(&snaps, "lambda"), vec![0.5]);
}

#[test]
fn every_output_has_its_header() {
    let dir = tempfile::tempdir().unwrap();
    assert!(simulate(&fixture("riemann"), dir.path(), &[]).status.success());
    assert!(read(dir.path(), "snapshots.csv").starts_with("t,x_cell_left,v,u,lambda\n"));
    let f = read(dir.path(), "functionals.csv");
    let header = f.lines().next().unwrap();
    assert!(header.starts_with("event_index,t,L,L_cd,L_np,Q,L_xi,F,max_live_order,tilde_F_1,"));
    assert!(header.ends_with(",tilde_F_8"));
    assert!(rows(&f).iter().all(|r| r.len() == 17));
}

#[test]
fn constant_coefficient_data_have_no_interaction_potential() {
    let dir = tempfile::tempdir().unwrap();
    assert!(simulate(&fixture("single_phase"), dir.path(), &[]).status.success());
    let f = read(dir.path(), "functionals.csv");
    assert!(column(&f, "Q").iter().all(|q| *q == 0.0));
    assert!(column(&f, "L_cd").iter().all(|q| *q == 0.0));
    let events = read(dir.path(), "events.csv");
    assert!(rows(&events).iter().all(|r| r[2] != "contact"));
    assert!(rows(&events).len() > 10);
}

#[test]
fn contact_interactions_decrease_the_functional() {
    let dir = tempfile::tempdir().unwrap();
    assert!(simulate(&fixture("phase_jump"), dir.path(), &[]).status.success());
    let events = read(dir.path(), "events.csv");
    let contacts: Vec<Vec<String>> = rows(&events).into_iter().filter(|r| r[2] == "contact").collect();
    assert!(!contacts.is_empty());
    for r in &contacts {
        let (dq, df): (f64, f64) = (r[6].parse().unwrap(), r[7].parse().unwrap());
        assert!(dq < 0.0 && df < 0.0, "{r:?}");
        assert!(r[3].split(';').any(|w| w.starts_with("2:")) && r[4].split(';').any(|w| w.starts_with("2:")));
    }
    let f = column(&read(dir.path(), "functionals.csv"), "F");
    assert!(f.windows(2).all(|w| w[1] <= w[0] + 1e-9));
}

#[test]
fn two_shocks_merge_and_reflect_a_higher_order_wave() {
    let dir = tempfile::tempdir().unwrap();
    assert!(simulate(&fixture("two_shock"), dir.path(), &[]).status.success());
    let events = rows(&read(dir.path(), "events.csv"));
    assert_eq!(events.len(), 1);
    let e = &events[0];
    assert_eq!(e[2], "same_family");
    let outgoing: Vec<Vec<&str>> = e[4].split(';').map(|w| w.split(':').collect()).collect();
    let merged = outgoing.iter().find(|w| w[0] == "3").unwrap();
    let reflected = outgoing.iter().find(|w| w[0] == "1").unwrap();
    let merged: f64 = merged[1].parse().unwrap();
    assert!((-0.35 - 1e-12..-0.2).contains(&merged), "{merged}");
    assert!(reflected[1].parse::<f64>().unwrap() > 0.0);
    assert_eq!(reflected[2], "2");
}

#[test]
fn infeasible_data_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("big.toml");
    fs::write(
        &cfg,
        "[initial]\nkind = \"riemann\"\nleft = [1.0, 0.0, 0.3]\nright = [6.0, -3.0, 0.9]\n\n[run]\nm = 0.5\n",
    )
    .unwrap();
    let out = simulate(&cfg, &dir.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hypotheses"));
}

#[test]
fn malformed_config_exits_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[initial]\nkind = \"no_such_profile\"\n").unwrap();
    assert_eq!(simulate(&cfg, &dir.path().join("o"), &[]).status.code(), Some(1));
    assert_eq!(simulate(&dir.path().join("missing.toml"), &dir.path().join("o"), &[]).status.code(), Some(1));
}

#[test]
fn runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(simulate(&fixture("random_bv"), a.path(), &[]).status.success());
    assert!(simulate(&fixture("random_bv"), b.path(), &[]).status.success());
    for f in ["snapshots.csv", "events.csv", "functionals.csv", "params.json"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f} differs");
    }
    let c = tempfile::tempdir().unwrap();
    assert!(simulate(&fixture("random_bv"), c.path(), &["--seed", "8"]).status.success());
    assert_ne!(read(a.path(), "snapshots.csv"), read(c.path(), "snapshots.csv"));
}

#[test]
fn command_line_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    assert!(simulate(&fixture("riemann"), dir.path(), &["--t-end", "0.25", "--snapshots", "0.1,0.25"]).status.success());
    let t = column(&read(dir.path(), "snapshots.csv"), "t");
    assert_eq!(t.first(), Some(&0.1));
    assert_eq!(t.last(), Some(&0.25));
}

#[test]
fn params_record_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("o.toml");
    let text = fs::read_to_string(fixture("riemann")).unwrap() + "\n[overrides]\nxi = 1.5\neta = 0.01\n";
    fs::write(&cfg, text).unwrap();
    assert!(simulate(&cfg, &dir.path().join("o"), &[]).status.success());
    let p: Value = serde_json::from_str(&read(&dir.path().join("o"), "params.json")).unwrap();
    let c = &p["constants"];
    assert_eq!(c["xi"]["provenance"], "override");
    assert_eq!(c["xi"]["value"], 1.5);
    assert_eq!(c["eta"]["value"], 0.01);
    assert_eq!(c["K"]["provenance"], "auto");
    assert_eq!(c["rho"]["provenance"], "auto");
    assert_eq!(c["d"]["provenance"], "derived");
    for key in ["scheme", "hypotheses", "data_summary", "initial", "budget", "stats", "l_bound"] {
        assert!(!p[key].is_null(), "missing {key}");
    }
    assert_eq!(p["hypotheses"]["feasible"], true);
}

#[test]
fn riemann_fan_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fan.csv");
    let out = phasefront(&["riemann", "--left", "1,0,0.3", "--right", "1.3,-0.2,0.6", "--csv", csv.to_str().unwrap()]);
    assert!(out.status.success());
    assert_csv_close(&fs::read_to_string(&csv).unwrap(), &golden("riemann_fan.csv"), 1e-12);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1-wave: strength") && text.contains("contact") && text.contains("3-wave"));
}

#[test]
fn riemann_trivial_and_contact_only() {
    let out = phasefront(&["riemann", "--left", "1,0.5,0.3", "--right", "1,0.5,0.3"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "no waves\n");
    let v_r = format!("{}", 2.8 / 1.9);
    let right = format!("{v_r},-0.1,0.6");
    let out = phasefront(&["riemann", "--left", "1,-0.1,0.3", "--right", &right]);
    let text = String::from_utf8(out.stdout).unwrap();
    let waves: Vec<&str> = text.lines().filter(|l| l.contains("-wave")).collect();
    assert_eq!(waves.len(), 1, "{text}");
    assert!(waves[0].starts_with("2-wave"));
}

#[test]
fn riemann_rejects_bad_states() {
    assert_eq!(phasefront(&["riemann", "--left", "1,0", "--right", "1,0,0.3"]).status.code(), Some(1));
    assert_eq!(phasefront(&["riemann", "--left", "-1,0,0.3", "--right", "1,0,0.3"]).status.code(), Some(1));
    assert_eq!(phasefront(&["riemann", "--left", "1,0,1.5", "--right", "1,0,0.3"]).status.code(), Some(1));
}

#[test]
fn damping_table_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = phasefront(&["damping", "--m-max", "2", "--points", "8", "--resolution", "101", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let text = read(dir.path(), "damping.csv");
    assert_csv_close(&text, &golden("damping.csv"), 1e-12);
    let (d, c) = (column(&text, "d"), column(&text, "c"));
    assert!(d.windows(2).all(|w| w[1] > w[0]));
    assert!(d.iter().zip(&c).all(|(d, c)| c <= d && *d < 1.0));
}

#[test]
fn verify_passes_and_reports_injected_faults() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.toml");
    fs::write(&grid, "sweep_samples = 500\nreflected_samples = 5000\nwtv_samples = 1000\n").unwrap();
    let ok = dir.path().join("ok");
    let out = phasefront(&["verify", "--config", grid.to_str().unwrap(), "--out", ok.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report: Value = serde_json::from_str(&read(&ok, "certificates.json")).unwrap();
    assert_eq!(report["passed"], true);

    let bad = dir.path().join("bad");
    let out = phasefront(&["verify", "--config", grid.to_str().unwrap(), "--out", bad.to_str().unwrap(), "--inject-fault"]);
    assert_eq!(out.status.code(), Some(4));
    let report: Value = serde_json::from_str(&read(&bad, "certificates.json")).unwrap();
    assert_eq!(report["passed"], false);
    let failing: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(!failing.is_empty());
    assert!(failing.iter().all(|n| !n.starts_with("wtv")), "{failing:?}");
}
