use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fdjam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdjam")).args(args).output().expect("spawn fdjam")
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    csv::Reader::from_reader(body.as_bytes()).records().map(|r| r.unwrap()).collect()
}

fn csv_column(text: &str, name: &str) -> Vec<f64> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let idx = rdr.headers().unwrap().iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rdr.records().map(|r| r.unwrap()[idx].parse().unwrap()).collect()
}

#[test]
fn optimize_writes_report() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.toml", "[system]\nlambda_e = 1e-5\nepsilon = 0.05\n");
    let out = dir.path().join("opt.json");
    let o = fdjam(&["optimize", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["header"]["command"], "optimize");
    assert!(v["solution"]["omega_s"].as_f64().unwrap() > 0.0);
    assert!(v["solution"]["fd"]["r_c"].as_f64().unwrap() > v["solution"]["fd"]["r_s"].as_f64().unwrap());
    assert!(v["solution"]["hd"]["mu_a"].as_f64().unwrap() > 0.0);
    let c = &v["comparison"];
    let total = c["p_fd"].as_f64().unwrap() + c["p_hd"].as_f64().unwrap();
    assert!(total > 0.0 && total <= 1.0);
}

#[test]
fn invalid_epsilon_exits_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.toml", "[system]\nepsilon = 0.0\n");
    let o = fdjam(&["optimize", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn unknown_config_key_exits_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.toml", "[system]\nlambda = 1e-5\n");
    assert_eq!(fdjam(&["optimize", "--config", s(&cfg)]).status.code(), Some(1));
}

#[test]
fn infeasible_exits_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.toml", "[system]\nlambda_e = 1e200\n");
    let o = fdjam(&["optimize", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn perfect_cancellation_warns() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.toml", "[system]\nlambda_e = 1e-5\nrho_db = -inf\n");
    let o = fdjam(&["optimize", "--config", s(&cfg)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rho = 0"));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["comparison"]["p_hd"].as_f64().unwrap()).abs() < 1e-15);
}

#[test]
fn validate_sop_rows() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "c.toml",
        "[validate_sop]\nd_ab = [10.0]\nlambda_min = 1e-5\nlambda_max = 1e-4\nlambda_points = 3\ninclude_zero = true\nr_cut = 600.0\n",
    );
    let out = dir.path().join("sop.csv");
    let o = fdjam(&["validate-sop", "--config", s(&cfg), "--out", s(&out), "--trials", "4000", "--seed", "7"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# fdjam"));
    let exact = csv_column(&text, "sop_exact");
    let mc = csv_column(&text, "sop_mc");
    let se = csv_column(&text, "mc_stderr");
    assert_eq!(exact.len(), 4);
    assert_eq!(exact[0], 0.0);
    assert_eq!(mc[0], 0.0);
    for i in 1..4 {
        assert!((mc[i] - exact[i]).abs() <= 4.0 * se[i].max(1e-3), "{} vs {}", mc[i], exact[i]);
    }
}

#[test]
fn validate_sop_without_mc() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.toml", "[validate_sop]\nlambda_points = 4\n");
    let o = fdjam(&["validate-sop", "--config", s(&cfg), "--trials", "0", "--d-ab", "1,5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&String::from_utf8_lossy(&o.stdout));
    assert_eq!(rows.len(), 8);
}

#[test]
fn sweep_scheme_dominance() {
    let dir = TempDir::new().unwrap();
    for eps in [0.05, 0.3] {
        let cfg = write_config(
            &dir,
            "c.toml",
            &format!("[system]\nlambda_e = 1e-5\nepsilon = {eps}\np_b_max_dbm = 10.0\nrho_db = -70.0\n"),
        );
        let o = fdjam(&[
            "sweep", "--config", s(&cfg), "--variable", "p_a_max", "--min", "-10", "--max", "20", "--steps", "4",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let text = String::from_utf8_lossy(&o.stdout);
        let os = csv_column(&text, "omega_s");
        let fd = csv_column(&text, "omega_fd_comp");
        let hd = csv_column(&text, "omega_hd_comp");
        assert_eq!(os.len(), 4);
        for i in 0..os.len() {
            assert!(os[i] >= fd[i] - 1e-12 && os[i] >= hd[i] - 1e-12);
        }
        assert!(os.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{os:?}");
    }
}

#[test]
fn sweep_self_interference_shifts_modes() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.toml", "[system]\nlambda_e = 1e-5\np_a_max_dbm = 10.0\np_b_max_dbm = 30.0\n");
    let o = fdjam(&["sweep", "--config", s(&cfg), "--variable", "rho", "--min", "-110", "--max", "-50", "--steps", "7"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    let p_fd = csv_column(&text, "p_fd");
    let p_hd = csv_column(&text, "p_hd");
    let os = csv_column(&text, "omega_s");
    assert!(p_fd.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{p_fd:?}");
    assert!(p_hd.windows(2).all(|w| w[1] >= w[0] - 1e-9), "{p_hd:?}");
    assert!(os.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{os:?}");
}

#[test]
fn sweep_forced_threshold_crossover() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "c.toml",
        "[system]\nlambda_e = 1e-5\nepsilon = 0.05\np_b_max_dbm = 10.0\nrho_db = -70.0\n",
    );
    let o = fdjam(&["sweep", "--config", s(&cfg), "--variable", "mu_b", "--min", "-100", "--max", "-40", "--steps", "7"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    let fd = csv_column(&text, "omega_fd_comp");
    let hd = csv_column(&text, "omega_hd_comp");
    let mu = csv_column(&text, "mu_b_db");
    assert!((mu[0] + 100.0).abs() < 1e-9 && (mu[6] + 40.0).abs() < 1e-9);
    // Low thresholds favour FD; once jamming is rarely allowed HD wins.
    assert!(fd[0] > hd[0]);
    assert!(hd[6] > fd[6]);
}

#[test]
fn sweep_rejects_bad_spec() {
    let o = fdjam(&["sweep", "--variable", "epsilon", "--min", "0.5", "--max", "0.1", "--steps", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_from_solution_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "c.toml",
        "[system]\nlambda_e = 1e-4\nd_ab = 1.0\nepsilon = 0.1\n[sim]\nr_cut = 200.0\n",
    );
    let sol = dir.path().join("opt.json");
    let o = fdjam(&["optimize", "--config", s(&cfg), "--out", s(&sol)]);
    assert!(o.status.success());
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = fdjam(&[
            "simulate", "--config", s(&cfg), "--solution", s(&sol), "--trials", "5000", "--seed", "11", "--out",
            s(&out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(&out).unwrap()
    };
    let a = run("a.json");
    let b = run("b.json");
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    let r = &v["report"];
    assert_eq!(r["n_slots"], 5000);
    assert_eq!(r["seed"], 11);
    assert_eq!(r["connection_outages"], 0);
    let tp = r["empirical_throughput"]["value"].as_f64().unwrap_or_else(|| r["empirical_throughput"].as_f64().unwrap());
    let pred = v["solution"]["omega_s"].as_f64().unwrap();
    assert!(tp > 0.5 * pred && tp < 1.5 * pred, "{tp} vs {pred}");
}
