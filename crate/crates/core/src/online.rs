//! Per-slot transmission decision from the off-line solution and the
//! instantaneous main-channel and self-interference gains.

use serde::{Deserialize, Serialize};

use crate::params::{SwitchedSolution, SystemParams};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub enum Action<T = f64> {
    Silent,
    TransmitFd { p_a: T, p_b: T },
    TransmitHd { p_a: T },
}

impl<T: Scalar> Action<T> {
    pub fn is_transmitting(&self) -> bool {
        !matches!(self, Action::Silent)
    }
}

/// Chooses the mode and Alice's power for one slot.
///
/// Bob jams when `rho gamma_bb <= mu_b` (ties go to FD). Alice transmits only
/// if `gamma_ab` clears the active mode's on-off threshold, with just enough
/// power for Bob's capacity to equal that mode's codeword rate.
pub fn decide<T: Scalar>(
    gamma_ab: T,
    gamma_bb: T,
    solution: &SwitchedSolution<T>,
    params: &SystemParams<T>,
) -> Action<T> {
    let dpow = params.path_loss_inv();
    let si = params.rho * gamma_bb;
    if solution.mu_b > T::zero() && si <= solution.mu_b {
        let fd = &solution.fd;
        if gamma_ab >= fd.mu_a && gamma_ab > T::zero() {
            let p_a = fd.r_c.exp2_m1() * (params.sigma_b2 + si * fd.p_b) * dpow / gamma_ab;
            return Action::TransmitFd { p_a, p_b: fd.p_b };
        }
        return Action::Silent;
    }
    let hd = &solution.hd;
    if gamma_ab >= hd.mu_a && gamma_ab > T::zero() {
        let p_a = hd.r_c.exp2_m1() * params.sigma_b2 * dpow / gamma_ab;
        return Action::TransmitHd { p_a };
    }
    Action::Silent
}
