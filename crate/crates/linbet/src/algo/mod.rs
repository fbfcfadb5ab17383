//! Sequential decision policies behind one select/update interface: MENU and
//! TOFU plus the MoM and CRT baseline reconstructions.

mod baselines;
mod ellipsoid;
mod menu;
mod tofu;

pub use baselines::{Crt, CrtParams, Mom, MomParams, mom_schedule};
pub use ellipsoid::ConfidenceEllipsoid;
pub use menu::{Menu, MenuParams, menu_schedule, menu_min_horizon};
pub use tofu::{Tofu, TofuParams, TruncationConvention};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::env::BanditInstance;
use crate::error::{Error, Result};

/// One decision policy. Epoch policies (MENU, MoM) pull the selected arm
/// several times per decision; per-round policies pull once.
pub trait Policy: Send {
    fn kind(&self) -> AlgoKind;
    /// Rounds consumed by one decision (k for MENU, k_m for MoM, 1 otherwise).
    fn pulls_per_decision(&self) -> u64;
    /// Number of decisions available within the horizon.
    fn num_decisions(&self) -> u64;
    /// Optimistic arm choice for the next decision.
    fn select(&self, arms: &[DVector<f64>]) -> Result<usize>;
    /// Fold the observed payoffs for the pulled arm into the state. The slice
    /// length must equal `pulls_per_decision()`.
    fn update(&mut self, arm: &DVector<f64>, payoffs: &[f64]) -> Result<()>;
    fn ellipsoid(&self) -> &ConfidenceEllipsoid;
    /// Whether theta* sits inside the current confidence region. Test/audit
    /// surface only; the policy itself never sees theta*.
    fn certify(&self, theta_star: &DVector<f64>) -> Result<bool> {
        self.ellipsoid().contains(theta_star)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgoKind {
    Menu,
    Tofu,
    Mom,
    Crt,
}

impl AlgoKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlgoKind::Menu => "menu",
            AlgoKind::Tofu => "tofu",
            AlgoKind::Mom => "mom",
            AlgoKind::Crt => "crt",
        }
    }

    pub fn parse(s: &str) -> Result<AlgoKind> {
        match s.to_ascii_lowercase().as_str() {
            "menu" => Ok(AlgoKind::Menu),
            "tofu" => Ok(AlgoKind::Tofu),
            "mom" => Ok(AlgoKind::Mom),
            "crt" => Ok(AlgoKind::Crt),
            other => Err(Error::invalid_config(format!("unknown algorithm {other:?}"))),
        }
    }
}

impl std::fmt::Display for AlgoKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A numeric parameter that may defer to the instance ("auto"/"from-instance").
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutoOr {
    Value(f64),
    Keyword(String),
}

impl Default for AutoOr {
    fn default() -> Self {
        AutoOr::Keyword("auto".into())
    }
}

impl AutoOr {
    fn resolve(&self, from_instance: Option<f64>, what: &str) -> Result<f64> {
        match self {
            AutoOr::Value(v) => Ok(*v),
            AutoOr::Keyword(k) if k == "auto" || k == "from-instance" => from_instance
                .ok_or_else(|| {
                    Error::invalid_config(format!("instance declares no {what} to inherit"))
                }),
            AutoOr::Keyword(k) => Err(Error::invalid_config(format!(
                "unknown keyword {k:?} for {what} (expected \"auto\" or \"from-instance\")"
            ))),
        }
    }
}

fn default_lambda() -> f64 {
    1.0
}

fn default_delta() -> f64 {
    0.1
}

fn default_c_mom() -> f64 {
    1.0
}

fn default_c_crt() -> f64 {
    4.0
}

/// Algorithm configuration as accepted on the wire.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgoConfig {
    pub algo: AlgoKind,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(rename = "S", default)]
    pub s: AutoOr,
    #[serde(default)]
    pub moment_bound: AutoOr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// MoM radius constant (reconstruction knob).
    #[serde(default = "default_c_mom")]
    pub c_mom: f64,
    /// CRT radius constant (reconstruction knob).
    #[serde(default = "default_c_crt")]
    pub c_crt: f64,
    /// MoM group count override.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mom_groups: Option<usize>,
    #[serde(default)]
    pub truncation_convention: TruncationConvention,
}

impl AlgoConfig {
    pub fn new(algo: AlgoKind) -> AlgoConfig {
        AlgoConfig {
            algo,
            lambda: default_lambda(),
            delta: default_delta(),
            s: AutoOr::default(),
            moment_bound: AutoOr::default(),
            epsilon: None,
            c_mom: default_c_mom(),
            c_crt: default_c_crt(),
            mom_groups: None,
            truncation_convention: TruncationConvention::default(),
        }
    }

    /// Instantiate the policy for an instance and horizon.
    pub fn build(&self, instance: &BanditInstance, horizon: u64) -> Result<Box<dyn Policy>> {
        if !(self.lambda > 0.0) {
            return Err(Error::invalid_config("lambda must be positive"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid_config("delta must lie in (0, 1)"));
        }
        let epsilon = self.epsilon.unwrap_or(instance.epsilon);
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::invalid_config("epsilon must lie in (0, 1]"));
        }
        let s = self.s.resolve(Some(instance.s_bound), "S bound")?;
        let d = instance.dim();
        match self.algo {
            AlgoKind::Menu => {
                let c = self.moment_bound.resolve(instance.bound_c, "central moment bound c")?;
                Ok(Box::new(Menu::new(MenuParams {
                    dim: d,
                    c,
                    epsilon,
                    delta: self.delta,
                    lambda: self.lambda,
                    s,
                    horizon,
                })?))
            }
            AlgoKind::Tofu => {
                let b = self.moment_bound.resolve(instance.bound_b, "raw moment bound b")?;
                Ok(Box::new(Tofu::new(TofuParams {
                    dim: d,
                    b,
                    epsilon,
                    delta: self.delta,
                    lambda: self.lambda,
                    s,
                    horizon,
                    convention: self.truncation_convention,
                })?))
            }
            AlgoKind::Mom => {
                let c = self.moment_bound.resolve(instance.bound_c, "central moment bound c")?;
                Ok(Box::new(Mom::new(MomParams {
                    dim: d,
                    c,
                    epsilon,
                    delta: self.delta,
                    lambda: self.lambda,
                    s,
                    horizon,
                    radius_constant: self.c_mom,
                    groups: self.mom_groups,
                })?))
            }
            AlgoKind::Crt => {
                let b = self.moment_bound.resolve(instance.bound_b, "raw moment bound b")?;
                Ok(Box::new(Crt::new(CrtParams {
                    dim: d,
                    b,
                    epsilon,
                    delta: self.delta,
                    lambda: self.lambda,
                    s,
                    horizon,
                    radius_constant: self.c_crt,
                    arm_bound: instance.d_bound,
                })?))
            }
        }
    }
}

/// Lower median: the ceil(m/2)-th smallest of m values.
pub(crate) fn lower_median(values: &mut [f64]) -> f64 {
    debug_assert!(!values.is_empty());
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values[values.len().div_ceil(2) - 1]
}
