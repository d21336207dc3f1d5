//! Scenario description, optimized parameter groups, and the constants derived
//! from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::units::dbm_to_watts;

/// Static description of one D2D link scenario. All quantities linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SystemParams<T = f64> {
    /// Path-loss exponent.
    pub alpha: T,
    /// Alice-Bob distance in meters.
    pub d_ab: T,
    /// Eavesdropper PPP intensity per square meter.
    pub lambda_e: T,
    /// Noise power at Bob, watts.
    pub sigma_b2: T,
    /// Noise power at each eavesdropper, watts.
    pub sigma_e2: T,
    /// Self-interference suppression factor in `[0, 1]`.
    pub rho: T,
    /// Secrecy outage probability bound in `(0, 1)`.
    pub epsilon: T,
    /// Alice's power budget, watts.
    pub p_a_max: T,
    /// Bob's jamming power budget, watts.
    pub p_b_max: T,
}

impl<T: Scalar> SystemParams<T> {
    /// The numerical-results scenario: `alpha = 4`, `d_ab = 10 m`,
    /// noise `-90 dBm` at Bob and eavesdroppers. The remaining fields are set
    /// to `lambda_e = 1e-4`, `rho = 1e-7`, `epsilon = 0.1`, and 10 dBm budgets.
    pub fn reference() -> Self {
        Self {
            alpha: T::lit(4.0),
            d_ab: T::lit(10.0),
            lambda_e: T::lit(1e-4),
            sigma_b2: dbm_to_watts(T::lit(-90.0)),
            sigma_e2: dbm_to_watts(T::lit(-90.0)),
            rho: T::lit(1e-7),
            epsilon: T::lit(0.1),
            p_a_max: dbm_to_watts(T::lit(10.0)),
            p_b_max: dbm_to_watts(T::lit(10.0)),
        }
    }

    /// Returns `self` if every field invariant holds, otherwise an error naming
    /// the first violated field.
    pub fn validate(self) -> Result<Self> {
        let all_finite = [
            self.alpha,
            self.d_ab,
            self.lambda_e,
            self.sigma_b2,
            self.sigma_e2,
            self.rho,
            self.epsilon,
            self.p_a_max,
            self.p_b_max,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            let field = self.first_non_finite();
            return Err(Error::invalid(field, "not finite"));
        }
        let zero = T::zero();
        let one = T::one();
        if self.alpha < T::lit(2.0) {
            return Err(Error::invalid("alpha", "alpha below 2"));
        }
        if !(self.epsilon > zero && self.epsilon < one) {
            return Err(Error::invalid("epsilon", "epsilon out of (0,1)"));
        }
        if !(self.rho >= zero && self.rho <= one) {
            return Err(Error::invalid("rho", "rho out of [0,1]"));
        }
        if self.d_ab <= zero {
            return Err(Error::invalid("d_ab", "d_ab must be positive"));
        }
        if self.lambda_e <= zero {
            return Err(Error::invalid("lambda_e", "lambda_e must be positive"));
        }
        if self.sigma_b2 <= zero {
            return Err(Error::invalid("sigma_b2", "sigma_b2 must be positive"));
        }
        if self.sigma_e2 <= zero {
            return Err(Error::invalid("sigma_e2", "sigma_e2 must be positive"));
        }
        if self.p_a_max <= zero {
            return Err(Error::invalid("p_a_max", "p_a_max must be positive"));
        }
        if self.p_b_max < zero {
            return Err(Error::invalid("p_b_max", "p_b_max must be non-negative"));
        }
        Ok(self)
    }

    fn first_non_finite(&self) -> &'static str {
        let named = [
            ("alpha", self.alpha),
            ("d_ab", self.d_ab),
            ("lambda_e", self.lambda_e),
            ("sigma_b2", self.sigma_b2),
            ("sigma_e2", self.sigma_e2),
            ("rho", self.rho),
            ("epsilon", self.epsilon),
            ("p_a_max", self.p_a_max),
            ("p_b_max", self.p_b_max),
        ];
        named
            .iter()
            .find(|(_, v)| !v.is_finite())
            .map(|(n, _)| *n)
            .unwrap_or("unknown")
    }

    /// `d_ab^alpha`.
    #[inline]
    pub fn path_loss_inv(&self) -> T {
        self.d_ab.powf(self.alpha)
    }

    pub fn derived(&self, p_b: T, mu_b: T) -> DerivedConstants<T> {
        DerivedConstants::new(self, p_b, mu_b)
    }
}

/// FD-mode parameter group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FdParams<T = f64> {
    /// Codeword rate, bits/s/Hz.
    pub r_c: T,
    /// Secrecy rate, bits/s/Hz.
    pub r_s: T,
    /// On-off threshold on the main-channel gain.
    pub mu_a: T,
    /// Jamming power, watts.
    pub p_b: T,
}

impl<T: Scalar> FdParams<T> {
    pub fn validate(self, p_b_max: T) -> Result<Self> {
        check_rates(self.r_c, self.r_s, self.mu_a)?;
        if !(self.p_b > T::zero() && self.p_b <= p_b_max) {
            return Err(Error::invalid("p_b", "p_b out of (0, p_b_max]"));
        }
        Ok(self)
    }
}

/// HD-mode parameter group. Jamming power is identically zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct HdParams<T = f64> {
    pub r_c: T,
    pub r_s: T,
    pub mu_a: T,
}

impl<T: Scalar> HdParams<T> {
    pub fn validate(self) -> Result<Self> {
        check_rates(self.r_c, self.r_s, self.mu_a)?;
        Ok(self)
    }
}

fn check_rates<T: Scalar>(r_c: T, r_s: T, mu_a: T) -> Result<()> {
    if !(r_s > T::zero() && r_s < r_c) {
        return Err(Error::invalid("r_s", "rates must satisfy 0 < r_s < r_c"));
    }
    if !(mu_a > T::zero()) {
        return Err(Error::invalid("mu_a", "mu_a must be positive"));
    }
    Ok(())
}

/// Complete off-line output: both parameter groups, the mode-switch threshold
/// and the predicted throughput split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SwitchedSolution<T = f64> {
    /// Mode-switch threshold on the residual SI level `rho * gamma_bb`.
    pub mu_b: T,
    pub fd: FdParams<T>,
    pub hd: HdParams<T>,
    pub omega_s: T,
    pub omega_fd: T,
    pub omega_hd: T,
    /// The best jamming power was below the grid floor; `fd.p_b` holds the floor.
    #[serde(default)]
    pub fd_degenerate: bool,
    /// The unconstrained jamming power exceeded the budget; `fd.p_b = p_b_max`.
    #[serde(default)]
    pub fd_capped: bool,
}

impl<T: Scalar> SwitchedSolution<T> {
    pub fn validate(self, params: &SystemParams<T>) -> Result<Self> {
        if !(self.mu_b >= T::zero()) {
            return Err(Error::invalid("mu_b", "mu_b must be non-negative"));
        }
        if self.fd_degenerate && params.p_b_max == T::zero() {
            // No jamming budget: the FD group mirrors HD and is never used.
            check_rates(self.fd.r_c, self.fd.r_s, self.fd.mu_a)?;
        } else {
            self.fd.validate(params.p_b_max)?;
        }
        self.hd.validate()?;
        Ok(self)
    }
}

/// Constants that appear throughout the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DerivedConstants<T = f64> {
    /// `(2 pi / alpha) Gamma(2 / alpha)`.
    pub beta: T,
    /// `-ln(1 - epsilon) / (beta lambda_e)`, square meters.
    pub tau: T,
    /// `d_ab^alpha (sigma_b2 + p_b mu_b) / p_a_max`.
    pub u: T,
    /// `d_ab^alpha mu_b / p_a_max`, the derivative of `u` in `p_b`.
    pub varpi: T,
    /// `2 / alpha`.
    pub eta: T,
}

impl<T: Scalar> DerivedConstants<T> {
    pub fn new(params: &SystemParams<T>, p_b: T, mu_b: T) -> Self {
        let beta = beta(params.alpha);
        let tau = -(-params.epsilon).ln_1p() / (beta * params.lambda_e);
        let dpow = params.path_loss_inv();
        Self {
            beta,
            tau,
            u: dpow * (params.sigma_b2 + p_b * mu_b) / params.p_a_max,
            varpi: dpow * mu_b / params.p_a_max,
            eta: T::lit(2.0) / params.alpha,
        }
    }
}

/// `(2 pi / alpha) Gamma(2 / alpha)`.
pub fn beta<T: Scalar>(alpha: T) -> T {
    let eta = T::lit(2.0) / alpha;
    T::PI() * eta * eta.gamma_fn()
}
