//! Monte Carlo validation at the SINR level.
//!
//! Eavesdroppers form a PPP on a disk of radius `r_cut` around Alice; all
//! channel power gains are Exp(1) (Rayleigh fading). Every trial or slot `i`
//! draws from its own ChaCha8 stream `i` under the master seed, so results
//! are independent of evaluation order and thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::LinkState;
use crate::error::{Error, Result};
use crate::online::{decide, Action};
use crate::params::{SwitchedSolution, SystemParams};
use crate::scalar::Scalar;

/// Default PPP truncation radius, meters.
pub const DEFAULT_R_CUT: f64 = 2000.0;

/// Relative slack when checking Bob's capacity against the codeword rate.
const CONNECTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eve {
    pub d_ak: f64,
    pub theta_k: f64,
    pub gamma_ak: f64,
    pub gamma_bk: f64,
}

impl Eve {
    /// Distance to Bob, who sits at `(d_ab, 0)`.
    pub fn d_bk(&self, d_ab: f64) -> f64 {
        (d_ab * d_ab + self.d_ak * self.d_ak - 2.0 * d_ab * self.d_ak * self.theta_k.cos())
            .max(0.0)
            .sqrt()
    }

    pub fn sinr<T: Scalar>(&self, p_a: f64, p_b: f64, params: &SystemParams<T>) -> f64 {
        let alpha = params.alpha.as_f64();
        let signal = p_a * self.gamma_ak * self.d_ak.powf(-alpha);
        let jam = if p_b > 0.0 {
            p_b * self.gamma_bk * self.d_bk(params.d_ab.as_f64()).powf(-alpha)
        } else {
            0.0
        };
        let sinr = signal / (params.sigma_e2.as_f64() + jam);
        if sinr.is_nan() { 0.0 } else { sinr }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EveField {
    pub r_cut: f64,
    pub eves: Vec<Eve>,
}

impl EveField {
    /// SINR of the strongest eavesdropper; zero for an empty field.
    pub fn best_sinr<T: Scalar>(&self, p_a: f64, p_b: f64, params: &SystemParams<T>) -> f64 {
        self.eves
            .iter()
            .map(|e| e.sinr(p_a, p_b, params))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelDraw {
    pub gamma_ab: f64,
    pub gamma_bb: f64,
}

/// A probability estimated from Bernoulli trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub hits: u64,
    pub trials: u64,
}

impl Estimate {
    fn binomial(hits: u64, trials: u64) -> Self {
        if trials == 0 {
            return Self { value: 0.0, stderr: 0.0, hits, trials };
        }
        let p = hits as f64 / trials as f64;
        Self {
            value: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            hits,
            trials,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ModeCounts {
    pub fd: u64,
    pub hd: u64,
    pub silent: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub n_slots: u64,
    pub seed: u64,
    pub r_cut: f64,
    pub mode_counts: ModeCounts,
    /// Secrecy outage rate among transmitting slots.
    pub empirical_sop: Estimate,
    pub empirical_tx_prob: Estimate,
    pub empirical_throughput: f64,
    pub throughput_stderr: f64,
    /// Slots where Bob's capacity fell short of the codeword rate.
    pub connection_outages: u64,
    /// Slots where the rate-adapted power exceeded the budget and was clamped.
    pub power_clamps: u64,
}

fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Exp(1) by inversion; `1 - u` lies in `(0, 1]`.
fn exp1<R: Rng>(rng: &mut R) -> f64 {
    -(1.0 - rng.random::<f64>()).ln()
}

fn poisson_count<R: Rng>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

fn draw_eve<R: Rng>(r_cut: f64, rng: &mut R) -> Eve {
    let s = rng.random::<f64>() * r_cut * r_cut;
    let theta = rng.random::<f64>() * std::f64::consts::TAU;
    Eve {
        d_ak: s.sqrt(),
        theta_k: theta,
        gamma_ak: exp1(rng),
        gamma_bk: exp1(rng),
    }
}

/// Samples `count` then each eavesdropper in turn, stopping early once one
/// exceeds `threshold`. Consumes the stream identically to
/// [`sample_eve_field`] up to the stopping point.
fn any_eve_exceeds<T: Scalar, R: Rng>(
    threshold: f64,
    p_a: f64,
    p_b: f64,
    params: &SystemParams<T>,
    r_cut: f64,
    rng: &mut R,
) -> bool {
    let lambda = params.lambda_e.as_f64();
    let n = poisson_count(lambda * std::f64::consts::PI * r_cut * r_cut, rng);
    (0..n).any(|_| draw_eve(r_cut, rng).sinr(p_a, p_b, params) > threshold)
}

fn check_r_cut(r_cut: f64) -> Result<()> {
    if !(r_cut > 0.0 && r_cut.is_finite()) {
        return Err(Error::Domain(format!("r_cut must be positive, got {r_cut}")));
    }
    Ok(())
}

/// One PPP realization on the disk of radius `r_cut` around Alice.
pub fn sample_eve_field<T: Scalar>(params: &SystemParams<T>, r_cut: f64, seed: u64) -> Result<EveField> {
    check_r_cut(r_cut)?;
    let mut rng = stream_rng(seed, 0);
    Ok(sample_field_from(params, r_cut, &mut rng))
}

fn sample_field_from<T: Scalar, R: Rng>(params: &SystemParams<T>, r_cut: f64, rng: &mut R) -> EveField {
    let lambda = params.lambda_e.as_f64();
    let n = poisson_count(lambda * std::f64::consts::PI * r_cut * r_cut, rng);
    EveField {
        r_cut,
        eves: (0..n).map(|_| draw_eve(r_cut, rng)).collect(),
    }
}

pub fn sample_channel<R: Rng>(rng: &mut R) -> ChannelDraw {
    ChannelDraw {
        gamma_ab: exp1(rng),
        gamma_bb: exp1(rng),
    }
}

/// Fraction of PPP realizations in which some eavesdropper's SINR exceeds
/// `2^{r_c - r_s} - 1` at fixed transmit powers.
#[allow(clippy::too_many_arguments)]
pub fn empirical_sop<T: Scalar>(
    p_a: T,
    p_b: T,
    r_c: T,
    r_s: T,
    params: &SystemParams<T>,
    n_trials: u64,
    r_cut: f64,
    seed: u64,
) -> Result<Estimate> {
    check_r_cut(r_cut)?;
    if n_trials == 0 {
        return Err(Error::Domain("n_trials must be at least 1".into()));
    }
    if !(r_s <= r_c) {
        return Err(Error::Domain(format!("secrecy rate {r_s} exceeds codeword rate {r_c}")));
    }
    let threshold = (r_c - r_s).exp2_m1().as_f64();
    let (pa, pb) = (p_a.as_f64(), p_b.as_f64());
    let hits: u64 = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            any_eve_exceeds(threshold, pa, pb, params, r_cut, &mut rng) as u64
        })
        .sum();
    Ok(Estimate::binomial(hits, n_trials))
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    fd: u64,
    hd: u64,
    silent: u64,
    secrecy_outages: u64,
    connection_outages: u64,
    power_clamps: u64,
}

impl Tally {
    fn merge(self, o: Self) -> Self {
        Self {
            fd: self.fd + o.fd,
            hd: self.hd + o.hd,
            silent: self.silent + o.silent,
            secrecy_outages: self.secrecy_outages + o.secrecy_outages,
            connection_outages: self.connection_outages + o.connection_outages,
            power_clamps: self.power_clamps + o.power_clamps,
        }
    }
}

fn run_slot<T: Scalar>(
    solution: &SwitchedSolution<T>,
    params: &SystemParams<T>,
    r_cut: f64,
    rng: &mut ChaCha8Rng,
) -> Tally {
    let ch = sample_channel(rng);
    let action = decide(T::lit(ch.gamma_ab), T::lit(ch.gamma_bb), solution, params);
    let mut t = Tally::default();
    let (p_a, p_b, r_c, r_s) = match action {
        Action::Silent => {
            t.silent = 1;
            return t;
        }
        Action::TransmitFd { p_a, p_b } => {
            t.fd = 1;
            (p_a, p_b, solution.fd.r_c, solution.fd.r_s)
        }
        Action::TransmitHd { p_a } => {
            t.hd = 1;
            (p_a, T::zero(), solution.hd.r_c, solution.hd.r_s)
        }
    };
    let p_a = if p_a > params.p_a_max * T::lit(1.0 + CONNECTION_TOL) {
        t.power_clamps = 1;
        params.p_a_max
    } else {
        p_a
    };
    let link = LinkState {
        p_a,
        p_b,
        gamma_ab: T::lit(ch.gamma_ab),
        gamma_bb: T::lit(ch.gamma_bb),
    };
    if link.capacity_b(params) < r_c * T::lit(1.0 - CONNECTION_TOL) {
        t.connection_outages = 1;
    }
    let threshold = (r_c - r_s).exp2_m1().as_f64();
    if any_eve_exceeds(threshold, p_a.as_f64(), p_b.as_f64(), params, r_cut, rng) {
        t.secrecy_outages = 1;
    }
    t
}

/// Runs the on-line policy for `n_slots` independent slots.
pub fn run_online<T: Scalar>(
    solution: &SwitchedSolution<T>,
    params: &SystemParams<T>,
    n_slots: u64,
    r_cut: f64,
    seed: u64,
) -> Result<SimReport> {
    check_r_cut(r_cut)?;
    solution.validate(params)?;
    if n_slots == 0 {
        return Err(Error::Domain("n_slots must be at least 1".into()));
    }
    let t = (0..n_slots)
        .into_par_iter()
        .map(|i| run_slot(solution, params, r_cut, &mut stream_rng(seed, i)))
        .reduce(Tally::default, Tally::merge);

    let tx = t.fd + t.hd;
    let n = n_slots as f64;
    // Per-slot reward is R_S of the active mode (zero when silent or on a
    // connection outage, which the policy rules out).
    let (rs_fd, rs_hd) = (solution.fd.r_s.as_f64(), solution.hd.r_s.as_f64());
    let mean = (t.fd as f64 * rs_fd + t.hd as f64 * rs_hd) / n;
    let second = (t.fd as f64 * rs_fd * rs_fd + t.hd as f64 * rs_hd * rs_hd) / n;
    let throughput_stderr = ((second - mean * mean).max(0.0) / n).sqrt();
    Ok(SimReport {
        n_slots,
        seed,
        r_cut,
        mode_counts: ModeCounts { fd: t.fd, hd: t.hd, silent: t.silent },
        empirical_sop: Estimate::binomial(t.secrecy_outages, tx),
        empirical_tx_prob: Estimate::binomial(tx, n_slots),
        empirical_throughput: mean,
        throughput_stderr,
        connection_outages: t.connection_outages,
        power_clamps: t.power_clamps,
    })
}
