//! Off-line optimization of the switched FD/HD receiver.
//!
//! The FD problem is solved in two nested steps. For a fixed jamming power the
//! rate pair and on-off threshold collapse to a single equation in
//! `Y = 2^{R_C} - 1` (step 1). The resulting throughput is quasi-concave in
//! the jamming power, whose stationary point is located by the sign of the
//! log-derivative (step 2). The HD problem is step 1 without jamming. An outer
//! grid over the mode-switch threshold `mu_B` combines the two.
//!
//! Notation: `U = d^a (s_B + P_B mu_B) / P_Amax`, `q = Y Z = 2^{R_C - R_S} - 1`,
//! `V(Y) = (1 + Y) 2^{-1 / ((1 + Y) U ln 2)} - 1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{fd_mode_probability, hd_mode_probability};
use crate::error::{Error, Result};
use crate::params::{DerivedConstants, FdParams, HdParams, SwitchedSolution, SystemParams};
use crate::roots::{bisect, expand_bracket};
use crate::scalar::{log_space, Scalar};
use crate::units::dbm_to_watts;

/// Step-1 optimum for a fixed `(P_B, mu_B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Step1Result<T = f64> {
    pub p_b: T,
    pub mu_b: T,
    /// `U` at this `(P_B, mu_B)`.
    pub u: T,
    /// Optimal `Y = 2^{R_C} - 1`.
    pub y_star: T,
    /// Optimal `Y Z = 2^{R_C - R_S} - 1`; independent of `Y`.
    pub yz_star: T,
    pub r_c: T,
    pub r_s: T,
    pub mu_a: T,
    /// `R_S e^{-mu_A}`.
    pub omega_tilde: T,
    /// Relative residual of the optimality condition at `y_star`.
    pub residual: T,
    /// Bisection iterations spent on `yz_star` and `y_star` together.
    pub iterations: usize,
}

/// Step-2 optimum over the jamming power for a fixed `mu_B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Step2Result<T = f64> {
    pub p_b_dagger: T,
    /// The stationary point lies above `P_Bmax`.
    pub capped: bool,
    /// Throughput decreases from the grid floor on; `p_b_dagger` is the floor.
    pub degenerate: bool,
    pub step1: Step1Result<T>,
    pub omega_tilde_dagger: T,
    /// Relative residual of the stationarity condition; `None` unless interior.
    pub residual: Option<T>,
}

/// HD optimum. `omega_tilde` excludes the mode probability, `omega_hd`
/// includes it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct HdSolution<T = f64> {
    pub params: HdParams<T>,
    pub q: T,
    pub omega_tilde: T,
    pub omega_hd: T,
    pub iterations: usize,
}

/// Search grids for the jamming power and the mode-switch threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", default)]
pub struct GridConfig<T = f64> {
    /// Smallest positive `mu_B` on the logarithmic grid; `0` is always added.
    pub mu_b_min: T,
    pub mu_b_max: T,
    pub mu_b_points: usize,
    /// Lowest jamming power considered; optima below it are flagged degenerate.
    pub p_b_floor: T,
    pub p_b_points: usize,
}

impl<T: Scalar> Default for GridConfig<T> {
    fn default() -> Self {
        Self {
            mu_b_min: T::lit(1e-10),
            mu_b_max: T::lit(1e-5),
            mu_b_points: 60,
            p_b_floor: dbm_to_watts(T::lit(-10.0)),
            p_b_points: 60,
        }
    }
}

impl<T: Scalar> GridConfig<T> {
    pub fn validate(self) -> Result<Self> {
        if !(self.mu_b_min > T::zero() && self.mu_b_min.is_finite()) {
            return Err(Error::invalid("mu_b_min", "mu_b_min must be positive"));
        }
        if !(self.mu_b_max >= self.mu_b_min && self.mu_b_max.is_finite()) {
            return Err(Error::invalid("mu_b_max", "mu_b_max must be at least mu_b_min"));
        }
        if self.mu_b_points == 0 {
            return Err(Error::invalid("mu_b_points", "need at least one mu_b point"));
        }
        if !(self.p_b_floor > T::zero() && self.p_b_floor.is_finite()) {
            return Err(Error::invalid("p_b_floor", "p_b_floor must be positive"));
        }
        if self.p_b_points < 2 {
            return Err(Error::invalid("p_b_points", "need at least two p_b points"));
        }
        Ok(self)
    }

    /// `{0} ∪ log_space(mu_b_min, mu_b_max, mu_b_points)`, ascending.
    pub fn mu_b_grid(&self) -> Vec<T> {
        let mut g = vec![T::zero()];
        g.extend(log_space(self.mu_b_min, self.mu_b_max, self.mu_b_points));
        g
    }
}

/// Pins `mu_B` and/or `P_B` instead of optimizing them (used by sweeps).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Forced<T = f64> {
    pub mu_b: Option<T>,
    pub p_b: Option<T>,
}

/// Solver diagnostics attached to an optimized solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Diagnostics<T = f64> {
    pub fd_step1_residual: T,
    pub fd_step1_iterations: usize,
    pub fd_stationarity_residual: Option<T>,
    pub fd_mu_a_mismatch: T,
    pub hd_iterations: usize,
    pub mu_b_points: usize,
    pub infeasible_points: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Optimized<T = f64> {
    pub solution: SwitchedSolution<T>,
    pub diagnostics: Diagnostics<T>,
}

/// `V(Y) = (1 + Y) e^{-1/((1+Y) U)} - 1`, evaluated as
/// `(1 + Y) expm1(-a) + Y` to keep digits when `V << Y`.
pub fn v_of_y<T: Scalar>(y: T, u: T) -> T {
    let a = ((T::one() + y) * u).recip();
    (T::one() + y) * (-a).exp_m1() + y
}

/// The SOP-constraint left side as a function of `q = 2^{R_C - R_S} - 1`
/// at full power: `(q P_B / P + 1)^{-1} (q s_E / P)^{-eta}`. Decreasing in `q`.
fn constraint_lhs<T: Scalar>(q: T, p: T, p_b: T, params: &SystemParams<T>, eta: T) -> T {
    (q * p_b / p + T::one()).recip() * (q * params.sigma_e2 / p).powf(-eta)
}

fn search_limits<T: Scalar>() -> (T, T) {
    (T::min_positive_value().sqrt(), T::max_value().sqrt())
}

/// Solves `constraint_lhs(q) = tau` for `q`; this is `Y Z` at the optimum.
fn solve_yz<T: Scalar>(p_b: T, params: &SystemParams<T>, dc: &DerivedConstants<T>) -> Result<(T, usize)> {
    let (lim_lo, lim_hi) = search_limits::<T>();
    let f = |q: T| constraint_lhs(q, params.p_a_max, p_b, params, dc.eta) - dc.tau;
    let (lo, hi) = expand_bracket("rate redundancy", f, T::lit(1e-3), T::lit(1e3), lim_lo, lim_hi)
        .map_err(|_| Error::Infeasible(format!("SOP constraint has no solution (tau = {})", dc.tau)))?;
    let r = bisect("rate redundancy", f, lo, hi, T::zero(), true)?;
    Ok((r.x, r.iterations))
}

/// `mu_A1 = (2^{R_C} - 1) d^a (s_B + P_B mu_B) / P_Amax`: the smallest gain at
/// which full power still supports `R_C` against worst-case SI.
pub fn mu_a1<T: Scalar>(r_c: T, p_b: T, mu_b: T, params: &SystemParams<T>) -> T {
    r_c.exp2_m1() * params.derived(p_b, mu_b).u
}

/// `mu_A2`: the smallest gain at which the rate-adapted transmit power keeps
/// the worst-case SOP at `epsilon`. Found by bisection on the gain, with the
/// SI level at its FD boundary `rho gamma_BB = mu_B`.
pub fn mu_a2<T: Scalar>(r_c: T, r_s: T, p_b: T, mu_b: T, params: &SystemParams<T>) -> Result<T> {
    let dc = params.derived(p_b, mu_b);
    let y = r_c.exp2_m1();
    let q = (r_c - r_s).exp2_m1();
    let scale = y * (params.sigma_b2 + p_b * mu_b) * params.path_loss_inv();
    // Transmit power from rate adaptation is scale / gamma.
    let g = |gamma: T| constraint_lhs(q, scale / gamma, p_b, params, dc.eta) - dc.tau;
    let (lim_lo, lim_hi) = search_limits::<T>();
    let guess = dc.u * y;
    let (lo, hi) = expand_bracket("mu_a2", g, guess * T::lit(0.5), guess * T::lit(2.0), lim_lo, lim_hi)?;
    Ok(bisect("mu_a2", g, lo, hi, T::zero(), true)?.x)
}

/// `Omega~(Y) = log2((1 + Y) / (1 + q)) e^{-U Y}` along the constraint.
pub fn omega_tilde_of_y<T: Scalar>(y: T, yz: T, u: T) -> T {
    (y.log2_1p() - yz.log2_1p()) * (-u * y).exp()
}

/// Step 1: optimal rates and threshold for fixed `(P_B, mu_B)`.
pub fn solve_step1<T: Scalar>(p_b: T, mu_b: T, params: &SystemParams<T>) -> Result<Step1Result<T>> {
    if !(p_b >= T::zero()) || !(mu_b >= T::zero()) {
        return Err(Error::Domain(format!("p_b = {p_b}, mu_b = {mu_b} must be non-negative")));
    }
    let dc = params.derived(p_b, mu_b);
    let (yz, it_q) = solve_yz(p_b, params, &dc)?;

    // V is increasing in Y; the root of V(Y) = yz is the root of the
    // optimality condition lhs(V(Y)) = tau.
    let f = |y: T| v_of_y(y, dc.u) - yz;
    let (lim_lo, lim_hi) = search_limits::<T>();
    let (lo, hi) = expand_bracket("Y", f, T::lit(1e-9), T::lit(2f64.powi(40)), lim_lo, lim_hi)
        .map_err(|e| Error::Infeasible(format!("codeword-rate equation: {e}")))?;
    let root = bisect("Y", f, lo, hi, T::zero(), true)?;
    let y = root.x;

    let v = v_of_y(y, dc.u);
    let residual = if v > T::zero() {
        (constraint_lhs(v, params.p_a_max, p_b, params, dc.eta) / dc.tau - T::one()).abs()
    } else {
        T::infinity()
    };
    let r_c = y.log2_1p();
    let r_s = r_c - yz.log2_1p();
    if !(r_s > T::zero()) {
        return Err(Error::Infeasible(format!(
            "non-positive secrecy rate {r_s} at p_b = {p_b}, tau = {}",
            dc.tau
        )));
    }
    let mu_a = dc.u * y;
    Ok(Step1Result {
        p_b,
        mu_b,
        u: dc.u,
        y_star: y,
        yz_star: yz,
        r_c,
        r_s,
        mu_a,
        omega_tilde: r_s * (-mu_a).exp(),
        residual,
        iterations: it_q + root.iterations,
    })
}

/// The bracket of the step-2 derivative, `d ln Omega~* / d P_B`:
/// `U V^2 (1 + Y) / (W (1 + V)) - varpi Y` with `W = eta P_Amax + (1 + eta) P_B V`.
pub fn step2_derivative_bracket<T: Scalar>(s1: &Step1Result<T>, params: &SystemParams<T>) -> T {
    let dc = params.derived(s1.p_b, s1.mu_b);
    let (y, v, u) = (s1.y_star, s1.yz_star, s1.u);
    let w = dc.eta * params.p_a_max + (T::one() + dc.eta) * s1.p_b * v;
    u * v * v * (T::one() + y) / (w * (T::one() + v)) - dc.varpi * y
}

/// Relative residual of the stationarity equation
/// `varpi Y W (1 + V) = U V^2 (1 + Y)`.
pub fn stationarity_residual<T: Scalar>(s1: &Step1Result<T>, params: &SystemParams<T>) -> T {
    let dc = params.derived(s1.p_b, s1.mu_b);
    let (y, v, u) = (s1.y_star, s1.yz_star, s1.u);
    let w = dc.eta * params.p_a_max + (T::one() + dc.eta) * s1.p_b * v;
    let lhs = dc.varpi * y * w * (T::one() + v);
    let rhs = u * v * v * (T::one() + y);
    (lhs - rhs).abs() / lhs.max(rhs)
}

/// Step 2: optimal jamming power for a fixed `mu_B`.
pub fn solve_step2<T: Scalar>(mu_b: T, params: &SystemParams<T>, grid: &GridConfig<T>) -> Result<Step2Result<T>> {
    if !(params.p_b_max > T::zero()) {
        return Err(Error::Infeasible("FD mode needs p_b_max > 0".into()));
    }
    let done = |p_b: T, capped: bool, degenerate: bool, residual: Option<T>| -> Result<Step2Result<T>> {
        let step1 = solve_step1(p_b, mu_b, params)?;
        Ok(Step2Result {
            p_b_dagger: p_b,
            capped,
            degenerate,
            omega_tilde_dagger: step1.omega_tilde,
            step1,
            residual,
        })
    };
    if grid.p_b_floor >= params.p_b_max {
        return done(params.p_b_max, true, false, None);
    }
    let sign_at = |p_b: T| -> Result<T> {
        let s1 = solve_step1(p_b, mu_b, params)?;
        Ok(step2_derivative_bracket(&s1, params))
    };

    let pts = log_space(grid.p_b_floor, params.p_b_max, grid.p_b_points);
    let mut prev: Option<(T, T)> = None;
    for &p in &pts {
        let b = sign_at(p)?;
        if b < T::zero() {
            return match prev {
                None => done(p, false, true, None),
                Some((p0, _)) => {
                    let mut failure = None;
                    let f = |x: T| match sign_at(x) {
                        Ok(v) => v,
                        Err(e) => {
                            failure.get_or_insert(e);
                            T::nan()
                        }
                    };
                    let r = bisect("jamming power", f, p0, p, T::zero(), true);
                    if let Some(e) = failure {
                        return Err(e);
                    }
                    let p_star = r?.x;
                    let s1 = solve_step1(p_star, mu_b, params)?;
                    let res = stationarity_residual(&s1, params);
                    done(p_star, false, false, Some(res))
                }
            };
        }
        prev = Some((p, b));
    }
    done(params.p_b_max, true, false, None)
}

/// Step 2 with the jamming power pinned instead of optimized.
pub fn step2_at<T: Scalar>(p_b: T, mu_b: T, params: &SystemParams<T>) -> Result<Step2Result<T>> {
    let step1 = solve_step1(p_b, mu_b, params)?;
    Ok(Step2Result {
        p_b_dagger: p_b,
        capped: p_b >= params.p_b_max,
        degenerate: false,
        omega_tilde_dagger: step1.omega_tilde,
        step1,
        residual: None,
    })
}

/// HD optimum: `R_C` from `2^{R_C} (R_C - log2(1 + q)) = P_Amax / (s_B d^a ln 2)`
/// with `q = (P_Amax / s_E) tau^{-a/2}`.
pub fn solve_hd<T: Scalar>(mu_b: T, params: &SystemParams<T>) -> Result<HdSolution<T>> {
    let dc = params.derived(T::zero(), T::zero());
    let q = params.p_a_max / params.sigma_e2 * dc.tau.powf(-params.alpha * T::lit(0.5));
    let l = q.log2_1p();
    if !(q > T::zero() && q.is_finite()) {
        return Err(Error::Infeasible(format!("HD redundancy undefined at tau = {}", dc.tau)));
    }
    let k = params.p_a_max / (params.sigma_b2 * params.path_loss_inv() * T::LN_2());
    // Left side is 0 at R_C = l and strictly increasing beyond it.
    let f = |r: T| r.exp2() * (r - l) - k;
    let mut hi = l + T::one();
    while f(hi) < T::zero() {
        hi = l + (hi - l) * T::lit(2.0);
        if !hi.is_finite() {
            return Err(Error::NoSignChange { what: "HD codeword rate", lo: l.as_f64(), hi: f64::INFINITY });
        }
    }
    let root = bisect("HD codeword rate", f, l, hi, T::zero(), false)?;
    let r_c = root.x;
    let r_s = r_c - l;
    if !(r_s > T::zero()) {
        return Err(Error::Infeasible(format!("HD secrecy rate {r_s} <= 0 at tau = {}", dc.tau)));
    }
    let mu_a = r_c.exp2_m1() * dc.u;
    let omega_tilde = r_s * (-mu_a).exp();
    Ok(HdSolution {
        params: HdParams { r_c, r_s, mu_a },
        q,
        omega_tilde,
        omega_hd: omega_tilde * hd_mode_probability(mu_b, params.rho),
        iterations: root.iterations,
    })
}

struct Candidate<T> {
    mu_b: T,
    fd: Step2Result<T>,
    omega_s: T,
    omega_fd: T,
    omega_hd: T,
}

/// Full off-line optimization over `mu_B`.
pub fn optimize<T: Scalar>(params: &SystemParams<T>, grid: &GridConfig<T>) -> Result<SwitchedSolution<T>> {
    optimize_with(params, grid, Forced::default()).map(|o| o.solution)
}

/// [`optimize`] with optional pinned `mu_B`/`P_B` and solver diagnostics.
///
/// The `mu_B` points are evaluated in parallel; the reduction keeps the
/// smallest `mu_B` among equal throughputs.
pub fn optimize_with<T: Scalar>(
    params: &SystemParams<T>,
    grid: &GridConfig<T>,
    forced: Forced<T>,
) -> Result<Optimized<T>> {
    params.validate()?;
    grid.validate()?;
    let mut warnings = Vec::new();
    let hd = solve_hd(T::zero(), params)?;

    if !(params.p_b_max > T::zero()) {
        warnings.push("p_b_max = 0: FD mode unavailable, pure HD solution".to_string());
        let solution = SwitchedSolution {
            mu_b: T::zero(),
            fd: FdParams {
                r_c: hd.params.r_c,
                r_s: hd.params.r_s,
                mu_a: hd.params.mu_a,
                p_b: T::zero(),
            },
            hd: hd.params,
            omega_s: hd.omega_tilde,
            omega_fd: T::zero(),
            omega_hd: hd.omega_tilde,
            fd_degenerate: true,
            fd_capped: false,
        };
        let diagnostics = Diagnostics {
            fd_step1_residual: T::zero(),
            fd_step1_iterations: 0,
            fd_stationarity_residual: None,
            fd_mu_a_mismatch: T::zero(),
            hd_iterations: hd.iterations,
            mu_b_points: 1,
            infeasible_points: 0,
            warnings,
        };
        return Ok(Optimized { solution, diagnostics });
    }

    let mu_grid = match forced.mu_b {
        Some(m) if m >= T::zero() => vec![m],
        Some(m) => return Err(Error::invalid("mu_b", format!("forced mu_b {m} is negative"))),
        None => grid.mu_b_grid(),
    };
    let evaluated: Vec<Result<Candidate<T>>> = mu_grid
        .par_iter()
        .map(|&mu_b| {
            let fd = match forced.p_b {
                Some(p_b) => step2_at(p_b, mu_b, params)?,
                None => solve_step2(mu_b, params, grid)?,
            };
            let omega_fd = fd.omega_tilde_dagger * fd_mode_probability(mu_b, params.rho);
            let omega_hd = hd.omega_tilde * hd_mode_probability(mu_b, params.rho);
            Ok(Candidate {
                mu_b,
                fd,
                omega_s: omega_fd + omega_hd,
                omega_fd,
                omega_hd,
            })
        })
        .collect();

    let mut best: Option<Candidate<T>> = None;
    let mut infeasible = 0;
    let mut last_err = None;
    for (mu_b, c) in mu_grid.iter().zip(evaluated) {
        match c {
            Ok(c) => {
                if best.as_ref().is_none_or(|b| c.omega_s > b.omega_s) {
                    best = Some(c);
                }
            }
            Err(e) => {
                infeasible += 1;
                warnings.push(format!("mu_b = {mu_b}: {e}"));
                last_err = Some(e);
            }
        }
    }
    let best = match best {
        Some(b) => b,
        None => return Err(last_err.unwrap_or_else(|| Error::Infeasible("empty mu_b grid".into()))),
    };
    if params.rho == T::zero() {
        warnings.push("rho = 0: FD mode is selected with probability one for mu_b > 0".to_string());
    }
    if best.fd.degenerate {
        warnings.push(format!(
            "FD optimum below jamming-power floor; reporting p_b = {}",
            best.fd.p_b_dagger
        ));
    }

    let s1 = &best.fd.step1;
    let mismatch = mu_a2(s1.r_c, s1.r_s, s1.p_b, s1.mu_b, params)
        .map(|m2| ((m2 - s1.mu_a) / s1.mu_a).abs())
        .unwrap_or(T::infinity());
    let solution = SwitchedSolution {
        mu_b: best.mu_b,
        fd: FdParams {
            r_c: s1.r_c,
            r_s: s1.r_s,
            mu_a: s1.mu_a,
            p_b: best.fd.p_b_dagger,
        },
        hd: hd.params,
        omega_s: best.omega_s,
        omega_fd: best.omega_fd,
        omega_hd: best.omega_hd,
        fd_degenerate: best.fd.degenerate,
        fd_capped: best.fd.capped,
    };
    let diagnostics = Diagnostics {
        fd_step1_residual: s1.residual,
        fd_step1_iterations: s1.iterations,
        fd_stationarity_residual: best.fd.residual,
        fd_mu_a_mismatch: mismatch,
        hd_iterations: hd.iterations,
        mu_b_points: mu_grid.len(),
        infeasible_points: infeasible,
        warnings,
    };
    Ok(Optimized { solution, diagnostics })
}
