//! Acceptance criteria A1–A10. Each test prints one `A# PASS|FAIL` line with
//! the measured figures, then asserts.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fdjam::analytics::{comparison_metrics, sop_approx, sop_exact};
use fdjam::optimizer::{
    mu_a1, mu_a2, omega_tilde_of_y, optimize_with, solve_hd, solve_step1, solve_step2, GridConfig, Step1Result,
};
use fdjam::scalar::log_space;
use fdjam::sim::DEFAULT_R_CUT;
use fdjam::{dbm_to_watts, empirical_sop, run_online, SystemParams};

fn verdict(id: &str, pass: bool, detail: String) {
    println!("{id} {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{id} failed: {detail}");
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn reference() -> SystemParams<f64> {
    SystemParams::reference()
}

/// Wiretap-validation scenario: P_A = 20 dBm, P_B = 30 dBm, R_C - R_S = 3.
const SOP_P_A_DBM: f64 = 20.0;
const SOP_P_B_DBM: f64 = 30.0;
const SOP_RATE_GAP: f64 = 3.0;

fn sop_params(d_ab: f64, lambda_e: f64) -> SystemParams<f64> {
    SystemParams { d_ab, lambda_e, ..reference() }
}

fn sign_changes(v: &[f64]) -> usize {
    let signs: Vec<f64> =
        v.windows(2).map(|w| w[1] - w[0]).filter(|d| *d != 0.0).map(f64::signum).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// A random valid scenario plus a Step-1 operating point `(p_b, mu_b)`.
fn random_case(rng: &mut ChaCha8Rng) -> (SystemParams<f64>, f64, f64) {
    let p = SystemParams {
        alpha: rng.random_range(2.5..5.0),
        d_ab: log_uniform(rng, 0.5, 50.0),
        lambda_e: log_uniform(rng, 1e-6, 1e-3),
        sigma_b2: dbm_to_watts(rng.random_range(-100.0..-80.0)),
        sigma_e2: dbm_to_watts(rng.random_range(-100.0..-80.0)),
        rho: log_uniform(rng, 1e-11, 1e-5),
        epsilon: log_uniform(rng, 1e-3, 0.5),
        p_a_max: dbm_to_watts(rng.random_range(-10.0..30.0)),
        p_b_max: dbm_to_watts(rng.random_range(0.0..30.0)),
    }
    .validate()
    .unwrap();
    let p_b = log_uniform(rng, 1e-4, p.p_b_max);
    let mu_b = log_uniform(rng, 1e-10, 1e-5);
    (p, p_b, mu_b)
}

type Step1Case = (SystemParams<f64>, Step1Result<f64>);

/// Twenty random scenarios with a feasible Step-1 optimum, and how many
/// draws were skipped as infeasible on the way.
fn step1_cases() -> (Vec<Step1Case>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA3);
    let mut out = Vec::new();
    let mut skipped = 0;
    while out.len() < 20 {
        let (p, p_b, mu_b) = random_case(&mut rng);
        match solve_step1(p_b, mu_b, &p) {
            Ok(s) => out.push((p, s)),
            Err(_) => skipped += 1,
        }
    }
    (out, skipped)
}

#[test]
fn a1_approximation_fidelity() {
    let t = Instant::now();
    let (p_a, p_b) = (dbm_to_watts(SOP_P_A_DBM), dbm_to_watts(SOP_P_B_DBM));
    let mut worst = Vec::new();
    for d_ab in [0.2, 10.0, 30.0] {
        let mut max_err = 0.0f64;
        let mut at = 0.0;
        for lambda_e in log_space(1e-6, 1e-2, 25) {
            let p = sop_params(d_ab, lambda_e);
            let e = sop_exact(p_a, p_b, SOP_RATE_GAP, 0.0, &p).unwrap();
            let a = sop_approx(p_a, p_b, SOP_RATE_GAP, 0.0, &p).unwrap();
            if (e - a).abs() > max_err {
                max_err = (e - a).abs();
                at = lambda_e;
            }
        }
        worst.push((d_ab, max_err, at));
    }
    let el = t.elapsed();
    let ok = worst.iter().all(|w| w.1 <= 0.02) && within(el, 30.0);
    let detail = worst
        .iter()
        .map(|(d, e, l)| format!("d_ab={d}: max|exact-approx|={e:.4} at lambda_e={l:.2e}"))
        .collect::<Vec<_>>()
        .join("; ");
    verdict("A1", ok, format!("{detail}; {:.1}s", el.as_secs_f64()));
}

#[test]
fn a2_monte_carlo_oracle() {
    let t = Instant::now();
    let (p_a, p_b) = (dbm_to_watts(SOP_P_A_DBM), dbm_to_watts(SOP_P_B_DBM));
    // Noise alone pushes an eavesdropper below threshold beyond ~350 m here.
    let r_cut = 800.0;
    let mut ok = true;
    let mut detail = Vec::new();
    for (i, lambda_e) in [1e-6, 3e-6, 1e-5, 3e-5, 1e-4].into_iter().enumerate() {
        let p = sop_params(10.0, lambda_e);
        let exact = sop_exact(p_a, p_b, SOP_RATE_GAP, 0.0, &p).unwrap();
        let mc = empirical_sop(p_a, p_b, SOP_RATE_GAP, 0.0, &p, 100_000, r_cut, 100 + i as u64).unwrap();
        let z = (mc.value - exact).abs() / mc.stderr;
        ok &= z <= 3.0;
        detail.push(format!("lambda_e={lambda_e:.0e}: exact={exact:.5} mc={:.5} z={z:.2}", mc.value));
    }
    let el = t.elapsed();
    ok &= within(el, 60.0);
    verdict("A2", ok, format!("{}; {:.1}s", detail.join("; "), el.as_secs_f64()));
}

#[test]
fn a3_step1_root_quality() {
    let t = Instant::now();
    let (cases, skipped) = step1_cases();
    let mut worst_res = 0.0f64;
    let mut bad_profiles = 0;
    for (_, s) in &cases {
        worst_res = worst_res.max(s.residual);
        let prof: Vec<f64> = log_space(1e-9, 2f64.powi(40), 1000)
            .into_iter()
            .map(|y| omega_tilde_of_y(y, s.yz_star, s.u))
            .collect();
        if sign_changes(&prof) != 1 {
            bad_profiles += 1;
        }
    }
    let el = t.elapsed();
    let ok = worst_res <= 1e-9 && bad_profiles == 0 && within(el, 10.0);
    verdict(
        "A3",
        ok,
        format!(
            "{} sets ({skipped} infeasible draws skipped): max residual={worst_res:.2e}, non-unimodal profiles={bad_profiles}; {:.2}s",
            cases.len(),
            el.as_secs_f64()
        ),
    );
}

#[test]
fn a4_threshold_consistency() {
    let (cases, _) = step1_cases();
    let mut worst = 0.0f64;
    for (p, s) in &cases {
        let a1 = mu_a1(s.r_c, s.p_b, s.mu_b, p);
        let a2 = mu_a2(s.r_c, s.r_s, s.p_b, s.mu_b, p).unwrap();
        worst = worst.max((a1 / a2 - 1.0).abs());
    }
    verdict("A4", worst <= 1e-9, format!("{} sets: max |mu_a1/mu_a2 - 1|={worst:.2e}", cases.len()));
}

#[test]
fn a5_step2_root_quality() {
    let t = Instant::now();
    let grid = GridConfig::default();
    let mut interior = Vec::new();
    'search: for alpha in [3.5, 4.0] {
        for epsilon in [0.003, 0.03, 0.1] {
            for (lambda_e, mu_b) in [(1e-5, 1e-9), (1e-4, 1e-8)] {
                let p = SystemParams { alpha, epsilon, lambda_e, p_b_max: 1.0, ..reference() };
                let s2 = solve_step2(mu_b, &p, &grid).unwrap();
                if !s2.capped && !s2.degenerate {
                    interior.push((p, mu_b, s2));
                }
                if interior.len() == 10 {
                    break 'search;
                }
            }
        }
    }
    let mut worst_res = 0.0f64;
    let mut worst_steps = 0.0f64;
    let n_scan = 400;
    for (p, mu_b, s2) in &interior {
        worst_res = worst_res.max(s2.residual.unwrap());
        let scan = log_space(grid.p_b_floor, p.p_b_max, n_scan);
        let best = scan
            .iter()
            .map(|&pb| (pb, solve_step1(pb, *mu_b, p).unwrap().omega_tilde))
            .fold((0.0, f64::MIN), |b, c| if c.1 > b.1 { c } else { b })
            .0;
        let step = (p.p_b_max / grid.p_b_floor).ln() / (n_scan - 1) as f64;
        worst_steps = worst_steps.max((s2.p_b_dagger / best).ln().abs() / step);
    }
    let mut capped_ok = 0;
    let capped_budgets = [1e-3, 3e-4];
    for p_b_max in capped_budgets {
        let p = SystemParams { epsilon: 0.01, p_b_max, ..reference() };
        let s2 = solve_step2(1e-9, &p, &grid).unwrap();
        if s2.capped && s2.p_b_dagger == p_b_max {
            capped_ok += 1;
        }
    }
    let el = t.elapsed();
    let ok = interior.len() == 10
        && worst_res <= 1e-7
        && worst_steps <= 1.0 + 1e-6
        && capped_ok == capped_budgets.len()
        && within(el, 60.0);
    verdict(
        "A5",
        ok,
        format!(
            "{} interior sets: max stationarity residual={worst_res:.2e}, max offset from scan={worst_steps:.3} steps; capped {capped_ok}/{}; {:.1}s",
            interior.len(),
            capped_budgets.len(),
            el.as_secs_f64()
        ),
    );
}

#[test]
fn a6_hd_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA6);
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < 10 {
        let (p, _, mu_b) = random_case(&mut rng);
        let (Ok(hd), Ok(s)) = (solve_hd(mu_b, &p), solve_step1(0.0, mu_b, &p)) else { continue };
        for (a, b) in [(hd.params.r_c, s.r_c), (hd.params.r_s, s.r_s), (hd.params.mu_a, s.mu_a)] {
            worst = worst.max((a / b - 1.0).abs());
        }
        n += 1;
    }
    verdict("A6", worst <= 1e-9, format!("10 sets: max relative gap={worst:.2e}"));
}

#[test]
fn a7_monotonicity() {
    let base = reference();
    let sol = optimize_with(&base, &GridConfig::default(), Default::default()).unwrap().solution;
    let (p_b, mu_b) = (sol.fd.p_b, sol.mu_b);
    let at = |p: SystemParams<f64>| solve_step1(p_b, mu_b, &p).unwrap();
    let r_c: Vec<f64> = [0.01, 0.05, 0.1, 0.3].iter().map(|&epsilon| at(SystemParams { epsilon, ..base }).r_c).collect();
    let by_pa: Vec<f64> = [-10.0, 0.0, 10.0, 20.0]
        .iter()
        .map(|&d| at(SystemParams { p_a_max: dbm_to_watts(d), ..base }).omega_tilde)
        .collect();
    let by_lambda: Vec<f64> =
        [1e-6, 1e-5, 1e-4].iter().map(|&lambda_e| at(SystemParams { lambda_e, ..base }).omega_tilde).collect();
    let ok = r_c.windows(2).all(|w| w[1] <= w[0])
        && by_pa.windows(2).all(|w| w[1] >= w[0])
        && by_lambda.windows(2).all(|w| w[1] <= w[0]);
    verdict(
        "A7",
        ok,
        format!("at p_b={p_b:.3e}, mu_b={mu_b:.3e}: r_c over eps {r_c:.4?}; omega over P_Amax {by_pa:.4?}; omega over lambda_e {by_lambda:.4?}"),
    );
}

#[test]
fn a8_scheme_dominance() {
    let grid = GridConfig::default();
    let mut ok = true;
    let mut strict = 0;
    let mut min_margin = f64::INFINITY;
    for epsilon in [0.05, 0.3] {
        for dbm in [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0] {
            let p = SystemParams {
                lambda_e: 1e-5,
                epsilon,
                p_a_max: dbm_to_watts(dbm),
                p_b_max: dbm_to_watts(10.0),
                rho: 1e-7,
                ..reference()
            };
            let s = optimize_with(&p, &grid, Default::default()).unwrap().solution;
            let c = comparison_metrics(&s, &p);
            let margin = (s.omega_s - c.omega_fd_comp).min(s.omega_s - c.omega_hd_comp);
            ok &= margin >= -1e-12;
            strict += (margin > 1e-12) as usize;
            min_margin = min_margin.min(margin);
        }
    }
    ok &= strict >= 1;
    verdict("A8", ok, format!("14 points: min margin={min_margin:.3e}, strict at {strict}"));
}

struct EndToEnd {
    params: SystemParams<f64>,
    omega_s: f64,
    report: fdjam::SimReport,
}

fn end_to_end(seed: u64) -> EndToEnd {
    let params = SystemParams { d_ab: 0.5, ..reference() };
    let s = optimize_with(&params, &GridConfig::default(), Default::default()).unwrap().solution;
    let report = run_online(&s, &params, 100_000, DEFAULT_R_CUT, seed).unwrap();
    EndToEnd { params, omega_s: s.omega_s, report }
}

#[test]
fn a9_end_to_end() {
    let t = Instant::now();
    let EndToEnd { params, omega_s, report: r } = end_to_end(9);
    let el = t.elapsed();
    let sop_bound = params.epsilon + 3.0 * r.empirical_sop.stderr;
    let tp_gap = (r.empirical_throughput - omega_s).abs();
    let tp_tol = (0.05 * omega_s).max(3.0 * r.throughput_stderr);
    let ok = r.connection_outages == 0
        && r.empirical_sop.value <= sop_bound
        && tp_gap <= tp_tol
        && within(el, 120.0);
    verdict(
        "A9",
        ok,
        format!(
            "{} slots: connection outages={}, SOP={:.4} (bound {sop_bound:.4}), throughput={:.4} vs {omega_s:.4} (tol {tp_tol:.4}); {:.1}s",
            r.n_slots,
            r.connection_outages,
            r.empirical_sop.value,
            r.empirical_throughput,
            el.as_secs_f64()
        ),
    );
}

#[test]
fn a10_determinism() {
    let (p_a, p_b) = (dbm_to_watts(SOP_P_A_DBM), dbm_to_watts(SOP_P_B_DBM));
    let p = sop_params(10.0, 1e-5);
    let sop = || empirical_sop(p_a, p_b, SOP_RATE_GAP, 0.0, &p, 100_000, 800.0, 102).unwrap();
    let first = serde_json::to_string(&sop()).unwrap();
    // Different thread counts must not change the reduction.
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let second = serde_json::to_string(&pool.install(sop)).unwrap();
    let a = serde_json::to_string(&end_to_end(9).report).unwrap();
    let b = serde_json::to_string(&pool.install(|| end_to_end(9)).report).unwrap();
    let ok = first == second && a == b;
    verdict("A10", ok, format!("SOP report identical: {}; simulation report identical: {}", first == second, a == b));
}
