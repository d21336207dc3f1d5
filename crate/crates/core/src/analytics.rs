//! Wiretap-SINR distribution, secrecy outage probability and the per-mode
//! throughput expressions.
//!
//! The best eavesdropper's SINR `phi_e = max_k P_A g_Ak d_Ak^-a / (s_E + P_B g_Bk d_Bk^-a)`
//! over a PPP of intensity `lambda_e` has CDF `F(x) = exp(-lambda_e * I(x))`
//! where `I(x)` is an integral over the plane. The exact form evaluates
//! `I(x)` numerically; the small-distance form collapses Bob onto Alice and
//! integrates it in closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{beta, SwitchedSolution, SystemParams};
use crate::quadrature::{integrate, QuadOptions};
use crate::scalar::Scalar;

/// Mean and per-slot channel state used by the main-link SINR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LinkState<T = f64> {
    pub p_a: T,
    pub p_b: T,
    pub gamma_ab: T,
    pub gamma_bb: T,
}

impl<T: Scalar> LinkState<T> {
    /// Main-channel SINR at Bob, including residual self-interference.
    pub fn phi_b(&self, params: &SystemParams<T>) -> T {
        self.p_a * self.gamma_ab / params.path_loss_inv()
            / (params.sigma_b2 + params.rho * self.p_b * self.gamma_bb)
    }

    pub fn capacity_b(&self, params: &SystemParams<T>) -> T {
        self.phi_b(params).log2_1p()
    }
}

const INNER_REL_TOL: f64 = 1e-10;
const OUTER_REL_TOL: f64 = 1e-8;
const TAIL_TOL: f64 = 1e-10;

fn check_powers<T: Scalar>(p_a: T, p_b: T) -> Result<()> {
    if !(p_a > T::zero()) {
        return Err(Error::Domain(format!("p_a must be positive, got {p_a}")));
    }
    if !(p_b >= T::zero()) {
        return Err(Error::Domain(format!("p_b must be non-negative, got {p_b}")));
    }
    Ok(())
}

fn check_threshold<T: Scalar>(x: T) -> Result<()> {
    if !(x > T::zero()) {
        return Err(Error::Domain(format!("SINR threshold must be positive, got {x}")));
    }
    Ok(())
}

/// Radius beyond which the unjammed tail `lambda pi e^{-c R^a} / (c R^{a-2})`
/// drops below `TAIL_TOL`.
fn truncation_radius<T: Scalar>(c: T, alpha: T, lambda: T) -> T {
    let mut t = T::one();
    loop {
        let r = (t / c).powf(alpha.recip());
        let bound = lambda * T::PI() * (-t).exp() / (c * r.powf(alpha - T::lit(2.0)));
        if bound < T::lit(TAIL_TOL) || t > T::lit(1e4) {
            return r;
        }
        t = t * T::lit(1.5);
    }
}

/// The plane integral `I(x)`, so that `F(x) = exp(-lambda_e I(x))`.
pub fn wiretap_exponent_exact<T: Scalar>(
    x: T,
    p_a: T,
    p_b: T,
    params: &SystemParams<T>,
) -> Result<T> {
    check_threshold(x)?;
    check_powers(p_a, p_b)?;
    let alpha = params.alpha;
    let d = params.d_ab;
    let c = params.sigma_e2 * x / p_a;
    let k = p_b * x / p_a;
    let half_alpha = alpha * T::lit(0.5);
    let r_cut = truncation_radius(c, alpha, params.lambda_e.max(T::lit(1e-30)));

    let inner_opts = QuadOptions {
        abs_tol: T::zero(),
        rel_tol: T::lit(INNER_REL_TOL),
        max_intervals: 4000,
    };
    let outer_opts = QuadOptions {
        abs_tol: T::zero(),
        rel_tol: T::lit(OUTER_REL_TOL),
        max_intervals: 4000,
    };

    // Integral over theta in [0, pi] of 1/(1 + k (r/d_B)^alpha); the
    // jamming dip near Bob (r ~ d, theta ~ 0) has angular width ~ |r-d|/d.
    let mut failure: Option<Error> = None;
    let inner = |r: T, failure: &mut Option<Error>| -> T {
        if k == T::zero() {
            return T::PI();
        }
        let jam = |theta: T| {
            let s = (theta * T::lit(0.5)).sin();
            let db2 = (r - d) * (r - d) + T::lit(4.0) * d * r * s * s;
            let ratio = (r * r / db2).powf(half_alpha);
            if ratio.is_infinite() {
                T::zero()
            } else {
                (T::one() + k * ratio).recip()
            }
        };
        let width = T::lit(4.0) * (r - d).abs() / r.max(d);
        let breaks = [width, width * T::lit(8.0)];
        match integrate(jam, T::zero(), T::PI(), &breaks, &inner_opts) {
            Ok(est) => est.value,
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        }
    };

    let outer = |r: T| -> T {
        let weight = T::lit(2.0) * r * (-c * r.powf(alpha)).exp();
        if weight == T::zero() {
            return T::zero();
        }
        weight * inner(r, &mut failure)
    };

    let breaks: Vec<T> = (-4..=12)
        .map(|i| d * T::lit(2f64.powi(i)))
        .filter(|&b| b < r_cut)
        .collect();
    let est = integrate(outer, T::zero(), r_cut, &breaks, &outer_opts)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(est.value)
}

/// Exact CDF of the best eavesdropper's SINR.
pub fn cdf_phi_e_exact<T: Scalar>(
    x: T,
    p_a: T,
    p_b: T,
    params: &SystemParams<T>,
) -> Result<T> {
    if params.lambda_e == T::zero() {
        check_threshold(x)?;
        check_powers(p_a, p_b)?;
        return Ok(T::one());
    }
    let i = wiretap_exponent_exact(x, p_a, p_b, params)?;
    Ok((-params.lambda_e * i).exp().clamp_prob())
}

/// Closed-form exponent `beta (P_B x / P_A + 1)^-1 (s_E x / P_A)^(-2/a)`.
pub fn wiretap_exponent_approx<T: Scalar>(
    x: T,
    p_a: T,
    p_b: T,
    params: &SystemParams<T>,
) -> Result<T> {
    check_threshold(x)?;
    check_powers(p_a, p_b)?;
    let eta = T::lit(2.0) / params.alpha;
    Ok(beta(params.alpha) / (p_b * x / p_a + T::one())
        * (params.sigma_e2 * x / p_a).powf(-eta))
}

/// Small-distance approximation of the wiretap-SINR CDF.
pub fn cdf_phi_e_approx<T: Scalar>(
    x: T,
    p_a: T,
    p_b: T,
    params: &SystemParams<T>,
) -> Result<T> {
    let i = wiretap_exponent_approx(x, p_a, p_b, params)?;
    Ok((-params.lambda_e * i).exp().clamp_prob())
}

fn rate_gap_threshold<T: Scalar>(r_c: T, r_s: T) -> Result<T> {
    if !(r_s < r_c) {
        return Err(Error::Domain(format!(
            "secrecy rate {r_s} must be below codeword rate {r_c}"
        )));
    }
    Ok((r_c - r_s).exp2_m1())
}

/// Exact secrecy outage probability `P{C_E > R_C - R_S}` at a fixed `P_A`.
pub fn sop_exact<T: Scalar>(
    p_a: T,
    p_b: T,
    r_c: T,
    r_s: T,
    params: &SystemParams<T>,
) -> Result<T> {
    let x = rate_gap_threshold(r_c, r_s)?;
    if params.lambda_e == T::zero() {
        check_powers(p_a, p_b)?;
        return Ok(T::zero());
    }
    let i = wiretap_exponent_exact(x, p_a, p_b, params)?;
    Ok((-(-params.lambda_e * i).exp_m1()).clamp_prob())
}

/// Closed-form secrecy outage probability, accurate for small `d_ab`.
pub fn sop_approx<T: Scalar>(
    p_a: T,
    p_b: T,
    r_c: T,
    r_s: T,
    params: &SystemParams<T>,
) -> Result<T> {
    let x = rate_gap_threshold(r_c, r_s)?;
    let i = wiretap_exponent_approx(x, p_a, p_b, params)?;
    Ok((-(-params.lambda_e * i).exp_m1()).clamp_prob())
}

/// `P{rho gamma_bb <= mu_b}` for `gamma_bb ~ Exp(1)`.
///
/// With `rho = 0` the residual SI vanishes: any positive threshold selects
/// FD with certainty, while `mu_b = 0` keeps the receiver in HD.
pub fn fd_mode_probability<T: Scalar>(mu_b: T, rho: T) -> T {
    if mu_b <= T::zero() {
        return T::zero();
    }
    if rho == T::zero() {
        return T::one();
    }
    (-(-mu_b / rho).exp_m1()).clamp_prob()
}

/// `P{rho gamma_bb > mu_b}`, the complement of [`fd_mode_probability`].
pub fn hd_mode_probability<T: Scalar>(mu_b: T, rho: T) -> T {
    if mu_b <= T::zero() {
        return T::one();
    }
    if rho == T::zero() {
        return T::zero();
    }
    (-mu_b / rho).exp().clamp_prob()
}

/// FD-mode secrecy throughput `R_S e^{-mu_A} (1 - e^{-mu_B / rho})`.
pub fn throughput_fd<T: Scalar>(r_s: T, mu_a: T, mu_b: T, rho: T) -> T {
    r_s * (-mu_a).exp() * fd_mode_probability(mu_b, rho)
}

/// HD-mode secrecy throughput `R_S e^{-mu_A} e^{-mu_B / rho}`.
pub fn throughput_hd<T: Scalar>(r_s: T, mu_a: T, mu_b: T, rho: T) -> T {
    r_s * (-mu_a).exp() * hd_mode_probability(mu_b, rho)
}

/// Single-mode comparison throughputs and per-mode operating probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ComparisonMetrics<T = f64> {
    pub omega_fd_comp: T,
    pub omega_hd_comp: T,
    pub p_fd: T,
    pub p_hd: T,
}

pub fn comparison_metrics<T: Scalar>(
    solution: &SwitchedSolution<T>,
    params: &SystemParams<T>,
) -> ComparisonMetrics<T> {
    let w_fd = fd_mode_probability(solution.mu_b, params.rho);
    let w_hd = hd_mode_probability(solution.mu_b, params.rho);
    let tx_fd = (-solution.fd.mu_a).exp();
    let tx_hd = (-solution.hd.mu_a).exp();
    ComparisonMetrics {
        omega_fd_comp: solution.fd.r_s * tx_fd * w_fd,
        omega_hd_comp: solution.hd.r_s * tx_hd * w_fd,
        p_fd: tx_fd * w_fd,
        p_hd: tx_hd * w_hd,
    }
}
