//! TOML run configuration.
//!
//! Powers are given in dBm, the dimensionless SI quantities `rho` and `mu_b`
//! in dB relative to one (`-70` means `1e-7`), distances in meters and the
//! eavesdropper intensity per square meter. `-inf` is accepted wherever a dB
//! value may legitimately be zero in linear terms. Every section and key is
//! optional; omitted keys take the reference-scenario defaults.
//!
//! ```toml
//! [system]
//! alpha = 4.0
//! d_ab = 10.0
//! lambda_e = 1e-4
//! sigma_b2_dbm = -90.0
//! sigma_e2_dbm = -90.0
//! rho_db = -70.0
//! epsilon = 0.1
//! p_a_max_dbm = 10.0
//! p_b_max_dbm = 10.0
//!
//! [grid]
//! mu_b_min_db = -100.0
//! mu_b_max_db = -50.0
//! mu_b_points = 60
//! p_b_floor_dbm = -10.0
//! p_b_points = 60
//!
//! [sim]
//! r_cut = 2000.0
//! slots = 100000
//! trials = 100000
//! seed = 1
//!
//! [validate_sop]
//! d_ab = [0.2, 10.0, 30.0]
//! lambda_min = 1e-6
//! lambda_max = 1e-2
//! lambda_points = 25
//! include_zero = false
//! p_a_dbm = 20.0
//! p_b_dbm = 30.0
//! rate_gap = 3.0
//! r_cut = 2000.0
//!
//! [sweep]
//! variable = "p_a_max"
//! min = -10.0
//! max = 20.0
//! steps = 7
//! scale = "dB"
//! fixed = { epsilon = 0.05 }
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::GridConfig;
use crate::params::SystemParams;
use crate::scalar::{lin_space, log_space};
use crate::sim::DEFAULT_R_CUT;
use crate::units::{db_to_linear, dbm_to_watts, linear_to_db, watts_to_dbm};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub system: SystemSection,
    pub grid: GridSection,
    pub sim: SimSection,
    pub validate_sop: ValidateSopSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemSection {
    pub alpha: f64,
    pub d_ab: f64,
    pub lambda_e: f64,
    pub sigma_b2_dbm: f64,
    pub sigma_e2_dbm: f64,
    pub rho_db: f64,
    pub epsilon: f64,
    pub p_a_max_dbm: f64,
    pub p_b_max_dbm: f64,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self::from_params(&SystemParams::reference())
    }
}

impl SystemSection {
    pub fn from_params(p: &SystemParams<f64>) -> Self {
        Self {
            alpha: p.alpha,
            d_ab: p.d_ab,
            lambda_e: p.lambda_e,
            sigma_b2_dbm: watts_to_dbm(p.sigma_b2),
            sigma_e2_dbm: watts_to_dbm(p.sigma_e2),
            rho_db: linear_to_db(p.rho),
            epsilon: p.epsilon,
            p_a_max_dbm: watts_to_dbm(p.p_a_max),
            p_b_max_dbm: watts_to_dbm(p.p_b_max),
        }
    }

    /// Linear parameters without validation.
    pub fn to_params_unchecked(&self) -> SystemParams<f64> {
        SystemParams {
            alpha: self.alpha,
            d_ab: self.d_ab,
            lambda_e: self.lambda_e,
            sigma_b2: dbm_to_watts(self.sigma_b2_dbm),
            sigma_e2: dbm_to_watts(self.sigma_e2_dbm),
            rho: db_to_linear(self.rho_db),
            epsilon: self.epsilon,
            p_a_max: dbm_to_watts(self.p_a_max_dbm),
            p_b_max: dbm_to_watts(self.p_b_max_dbm),
        }
    }

    pub fn to_params(&self) -> Result<SystemParams<f64>> {
        self.to_params_unchecked().validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub mu_b_min_db: f64,
    pub mu_b_max_db: f64,
    pub mu_b_points: usize,
    pub p_b_floor_dbm: f64,
    pub p_b_points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        let g = GridConfig::<f64>::default();
        Self {
            mu_b_min_db: linear_to_db(g.mu_b_min),
            mu_b_max_db: linear_to_db(g.mu_b_max),
            mu_b_points: g.mu_b_points,
            p_b_floor_dbm: watts_to_dbm(g.p_b_floor),
            p_b_points: g.p_b_points,
        }
    }
}

impl GridSection {
    pub fn to_grid(&self) -> Result<GridConfig<f64>> {
        GridConfig {
            mu_b_min: db_to_linear(self.mu_b_min_db),
            mu_b_max: db_to_linear(self.mu_b_max_db),
            mu_b_points: self.mu_b_points,
            p_b_floor: dbm_to_watts(self.p_b_floor_dbm),
            p_b_points: self.p_b_points,
        }
        .validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    pub r_cut: f64,
    /// Slots for `simulate`.
    pub slots: u64,
    /// PPP realizations per point for `validate-sop`.
    pub trials: u64,
    pub seed: u64,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            r_cut: DEFAULT_R_CUT,
            slots: 100_000,
            trials: 100_000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateSopSection {
    pub d_ab: Vec<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_points: usize,
    /// Prepend a `lambda_e = 0` row.
    pub include_zero: bool,
    pub p_a_dbm: f64,
    pub p_b_dbm: f64,
    /// `R_C - R_S`, bits/s/Hz.
    pub rate_gap: f64,
    pub r_cut: f64,
}

impl Default for ValidateSopSection {
    fn default() -> Self {
        Self {
            d_ab: vec![0.2, 10.0, 30.0],
            lambda_min: 1e-6,
            lambda_max: 1e-2,
            lambda_points: 25,
            include_zero: false,
            p_a_dbm: 20.0,
            p_b_dbm: 30.0,
            rate_gap: 3.0,
            r_cut: DEFAULT_R_CUT,
        }
    }
}

impl ValidateSopSection {
    pub fn lambdas(&self) -> Result<Vec<f64>> {
        if !(self.lambda_min > 0.0 && self.lambda_max >= self.lambda_min) || self.lambda_points == 0 {
            return Err(Error::invalid("validate_sop.lambda", "need 0 < lambda_min <= lambda_max and lambda_points >= 1"));
        }
        if self.d_ab.is_empty() || self.d_ab.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::invalid("validate_sop.d_ab", "need at least one positive distance"));
        }
        if !(self.rate_gap > 0.0) {
            return Err(Error::invalid("validate_sop.rate_gap", "rate_gap must be positive"));
        }
        let mut v = if self.include_zero { vec![0.0] } else { Vec::new() };
        v.extend(log_space(self.lambda_min, self.lambda_max, self.lambda_points));
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scale {
    #[serde(rename = "linear")]
    Linear,
    #[serde(rename = "log")]
    Log,
    /// Points evenly spaced in dB (dBm for powers).
    #[serde(rename = "dB", alias = "db")]
    Db,
}

/// Quantities a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Alpha,
    DAb,
    LambdaE,
    SigmaB2,
    SigmaE2,
    Rho,
    Epsilon,
    PAMax,
    PBMax,
    /// Forces the mode-switch threshold instead of optimizing it.
    MuB,
    /// Forces the FD jamming power instead of optimizing it.
    PB,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            Self::Alpha => "alpha",
            Self::DAb => "d_ab",
            Self::LambdaE => "lambda_e",
            Self::SigmaB2 => "sigma_b2",
            Self::SigmaE2 => "sigma_e2",
            Self::Rho => "rho",
            Self::Epsilon => "epsilon",
            Self::PAMax => "p_a_max",
            Self::PBMax => "p_b_max",
            Self::MuB => "mu_b",
            Self::PB => "p_b",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        const ALL: [SweepVariable; 11] = [
            SweepVariable::Alpha,
            SweepVariable::DAb,
            SweepVariable::LambdaE,
            SweepVariable::SigmaB2,
            SweepVariable::SigmaE2,
            SweepVariable::Rho,
            SweepVariable::Epsilon,
            SweepVariable::PAMax,
            SweepVariable::PBMax,
            SweepVariable::MuB,
            SweepVariable::PB,
        ];
        ALL.into_iter()
            .find(|v| v.name() == name)
            .ok_or_else(|| Error::Config(format!("unknown sweep variable `{name}`")))
    }

    /// Watts-valued variables use dBm on the dB scale.
    pub fn is_power(self) -> bool {
        matches!(self, Self::SigmaB2 | Self::SigmaE2 | Self::PAMax | Self::PBMax | Self::PB)
    }

    /// The scale its config value is written in: dB for powers, `rho` and
    /// `mu_b`, linear otherwise.
    pub fn default_scale(self) -> Scale {
        if self.is_power() || matches!(self, Self::Rho | Self::MuB) { Scale::Db } else { Scale::Linear }
    }

    fn value_from_db(self, db: f64) -> f64 {
        if self.is_power() { dbm_to_watts(db) } else { db_to_linear(db) }
    }

    fn value_from_config(self, x: f64) -> f64 {
        match self {
            _ if self.is_power() => dbm_to_watts(x),
            Self::Rho | Self::MuB => db_to_linear(x),
            _ => x,
        }
    }

    fn to_db(self, x: f64) -> f64 {
        if self.is_power() { watts_to_dbm(x) } else { linear_to_db(x) }
    }
}

/// One swept variable with its range. With `scale = "dB"`, `min`/`max` are
/// in dB (dBm for powers); otherwise they are linear values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub scale: Scale,
    /// Extra fixed values in config units (dBm for powers, dB for `rho` and
    /// `mu_b`, linear otherwise), applied before sweeping.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fixed: BTreeMap<String, f64>,
}

/// One resolved sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub value_db: Option<f64>,
    pub params: SystemParams<f64>,
    pub forced_mu_b: Option<f64>,
    pub forced_p_b: Option<f64>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<SweepVariable> {
        let var = SweepVariable::parse(&self.variable)?;
        if !(self.min < self.max) {
            return Err(Error::invalid("sweep.min", "sweep needs min < max"));
        }
        if self.steps < 2 {
            return Err(Error::invalid("sweep.steps", "sweep needs at least 2 steps"));
        }
        if self.scale == Scale::Log && !(self.min > 0.0) {
            return Err(Error::invalid("sweep.min", "log scale needs min > 0"));
        }
        for name in self.fixed.keys() {
            SweepVariable::parse(name)?;
        }
        Ok(var)
    }

    fn to_linear(&self, var: SweepVariable, x: f64) -> f64 {
        match self.scale {
            Scale::Db => var.value_from_db(x),
            _ => x,
        }
    }

    /// Expands the sweep over `base` into concrete points, in sweep order.
    pub fn points(&self, base: &SystemParams<f64>) -> Result<Vec<SweepPoint>> {
        let var = self.validate()?;
        let mut fixed = *base;
        let mut forced_mu_b = None;
        let mut forced_p_b = None;
        for (name, &x) in &self.fixed {
            let v = SweepVariable::parse(name)?;
            apply(v, v.value_from_config(x), &mut fixed, &mut forced_mu_b, &mut forced_p_b);
        }
        let raw = match self.scale {
            Scale::Linear | Scale::Db => lin_space(self.min, self.max, self.steps),
            Scale::Log => log_space(self.min, self.max, self.steps),
        };
        raw.into_iter()
            .map(|x| {
                let value = self.to_linear(var, x);
                let mut params = fixed;
                let (mut mu_b, mut p_b) = (forced_mu_b, forced_p_b);
                apply(var, value, &mut params, &mut mu_b, &mut p_b);
                Ok(SweepPoint {
                    value,
                    value_db: (value > 0.0).then(|| var.to_db(value)),
                    params,
                    forced_mu_b: mu_b,
                    forced_p_b: p_b,
                })
            })
            .collect()
    }
}

fn apply(
    v: SweepVariable,
    x: f64,
    p: &mut SystemParams<f64>,
    mu_b: &mut Option<f64>,
    p_b: &mut Option<f64>,
) {
    match v {
        SweepVariable::Alpha => p.alpha = x,
        SweepVariable::DAb => p.d_ab = x,
        SweepVariable::LambdaE => p.lambda_e = x,
        SweepVariable::SigmaB2 => p.sigma_b2 = x,
        SweepVariable::SigmaE2 => p.sigma_e2 = x,
        SweepVariable::Rho => p.rho = x,
        SweepVariable::Epsilon => p.epsilon = x,
        SweepVariable::PAMax => p.p_a_max = x,
        SweepVariable::PBMax => p.p_b_max = x,
        SweepVariable::MuB => *mu_b = Some(x),
        SweepVariable::PB => *p_b = Some(x),
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_reference() {
        let c = Config::parse("").unwrap();
        let p = c.system.to_params().unwrap();
        let r = SystemParams::<f64>::reference();
        for (a, b) in [
            (p.alpha, r.alpha),
            (p.sigma_b2, r.sigma_b2),
            (p.rho, r.rho),
            (p.p_a_max, r.p_a_max),
            (p.epsilon, r.epsilon),
        ] {
            assert!((a / b - 1.0).abs() < 1e-12, "{a} vs {b}");
        }
        let g = c.grid.to_grid().unwrap();
        assert!((g.p_b_floor - 1e-4).abs() < 1e-16);
    }

    #[test]
    fn db_fields_convert() {
        let c = Config::parse("[system]\nrho_db = -70\np_b_max_dbm = -inf\n").unwrap();
        let p = c.system.to_params().unwrap();
        assert!((p.rho - 1e-7).abs() < 1e-20);
        assert_eq!(p.p_b_max, 0.0);
    }

    #[test]
    fn errors_carry_context() {
        let e = Config::parse("[system]\nepsilon = \"x\"\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let e = Config::parse("[system]\nbogus = 1\n").unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
        let c = Config::parse("[system]\nepsilon = 0\n").unwrap();
        assert!(matches!(c.system.to_params(), Err(Error::InvalidParameter { field: "epsilon", .. })));
    }

    #[test]
    fn toml_round_trip() {
        let c = Config::parse("[sweep]\nvariable = \"rho\"\nmin = -90\nmax = -50\nsteps = 5\nscale = \"dB\"\n").unwrap();
        assert_eq!(Config::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn sweep_points_in_db() {
        let spec = SweepSpec {
            variable: "p_a_max".into(),
            min: -10.0,
            max: 20.0,
            steps: 7,
            scale: Scale::Db,
            fixed: [("epsilon".to_string(), 0.05), ("mu_b".to_string(), -80.0)].into(),
        };
        let pts = spec.points(&SystemParams::reference()).unwrap();
        assert_eq!(pts.len(), 7);
        assert!((pts[0].params.p_a_max - 1e-4).abs() < 1e-18);
        assert!((pts[6].params.p_a_max - 0.1).abs() < 1e-15);
        assert!((pts[3].value_db.unwrap() - 5.0).abs() < 1e-12);
        assert!(pts
            .iter()
            .all(|p| p.params.epsilon == 0.05 && (p.forced_mu_b.unwrap() / 1e-8 - 1.0).abs() < 1e-12));
    }

    #[test]
    fn sweep_validation() {
        let mut spec = SweepSpec {
            variable: "nope".into(),
            min: 0.0,
            max: 1.0,
            steps: 3,
            scale: Scale::Linear,
            fixed: BTreeMap::new(),
        };
        assert!(matches!(spec.validate(), Err(Error::Config(_))));
        spec.variable = "epsilon".into();
        spec.steps = 1;
        assert!(spec.validate().is_err());
        spec.steps = 3;
        spec.scale = Scale::Log;
        assert!(spec.validate().is_err());
        spec.min = 0.01;
        assert_eq!(spec.validate().unwrap(), SweepVariable::Epsilon);
    }
}
