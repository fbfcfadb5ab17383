//! TOFU: per-dimension truncation of the full payoff history through the
//! weight rows `u_i` of `V^{-1/2} X^T`, re-trimmed every round.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::algo::{AlgoKind, ConfidenceEllipsoid, Policy};
use crate::error::{Error, Result};
use crate::linalg::DesignState;

/// Which printed form of the truncation to follow. `Proof` uses the
/// two-sided indicator and the (1/(1+eps))-exponent threshold from the
/// confidence-ellipsoid argument (with a delta/T union over rounds);
/// `AlgorithmLine4` restores the literal one-sided pseudocode form.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TruncationConvention {
    #[default]
    #[serde(rename = "proof")]
    Proof,
    #[serde(rename = "literal")]
    AlgorithmLine4,
}

#[derive(Debug, Clone)]
pub struct TofuParams {
    pub dim: usize,
    /// Raw (1+eps)-moment bound.
    pub b: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub lambda: f64,
    pub s: f64,
    pub horizon: u64,
    pub convention: TruncationConvention,
}

pub struct Tofu {
    params: TofuParams,
    design: DesignState,
    history_arms: Vec<DVector<f64>>,
    history_payoffs: Vec<f64>,
    ellipsoid: ConfidenceEllipsoid,
}

impl Tofu {
    pub fn new(params: TofuParams) -> Result<Tofu> {
        if params.horizon == 0 {
            return Err(Error::invalid_config("horizon must be positive"));
        }
        let design = DesignState::new(params.dim, params.lambda)?;
        let ellipsoid = ConfidenceEllipsoid::initial(params.dim, params.lambda, params.s);
        Ok(Tofu {
            params,
            design,
            history_arms: Vec::new(),
            history_payoffs: Vec::new(),
            ellipsoid,
        })
    }

    /// Truncation level at round t.
    pub fn truncation_level(&self, t: u64) -> f64 {
        let p = &self.params;
        let t_exp = (t as f64).powf((1.0 - p.epsilon) / (2.0 * (1.0 + p.epsilon)));
        match p.convention {
            TruncationConvention::Proof => {
                let log = (2.0 * p.dim as f64 * p.horizon as f64 / p.delta).ln();
                (p.b / log).powf(1.0 / (1.0 + p.epsilon)) * t_exp
            }
            TruncationConvention::AlgorithmLine4 => {
                let log = (2.0 * p.horizon as f64 / p.delta).ln();
                (p.b / log).powf(1.0 / p.epsilon) * t_exp
            }
        }
    }

    /// Radius at round t.
    pub fn beta(&self, t: u64) -> f64 {
        let p = &self.params;
        let log = (2.0 * p.dim as f64 * p.horizon as f64 / p.delta).ln();
        4.0 * (p.dim as f64).sqrt()
            * p.b.powf(1.0 / (1.0 + p.epsilon))
            * log.powf(p.epsilon / (1.0 + p.epsilon))
            * (t as f64).powf((1.0 - p.epsilon) / (2.0 * (1.0 + p.epsilon)))
            + p.lambda.sqrt() * p.s
    }

    fn keep(&self, weighted: f64, level: f64) -> bool {
        match self.params.convention {
            TruncationConvention::Proof => weighted.abs() <= level,
            TruncationConvention::AlgorithmLine4 => weighted <= level,
        }
    }
}

impl Policy for Tofu {
    fn kind(&self) -> AlgoKind {
        AlgoKind::Tofu
    }

    fn pulls_per_decision(&self) -> u64 {
        1
    }

    fn num_decisions(&self) -> u64 {
        self.params.horizon
    }

    fn select(&self, arms: &[DVector<f64>]) -> Result<usize> {
        self.ellipsoid.select_optimistic_arm(arms)
    }

    fn update(&mut self, arm: &DVector<f64>, payoffs: &[f64]) -> Result<()> {
        let [payoff] = payoffs else {
            return Err(Error::invalid_input("TOFU consumes exactly one payoff per round"));
        };
        if !payoff.is_finite() {
            return Err(Error::invalid_input("non-finite payoff"));
        }
        self.design.update(arm)?;
        self.history_arms.push(arm.clone());
        self.history_payoffs.push(*payoff);
        let t = self.design.count();
        let level = self.truncation_level(t);

        // rows of V^{-1/2} X^T via the shared inverse square root; one
        // matrix-matrix product per round keeps the O(t d^2) recompute cheap
        let m = self.design.inv_sqrt()?;
        let d = self.params.dim;
        let x_hist = nalgebra::DMatrix::from_columns(&self.history_arms);
        let u = &m * x_hist; // u[(i, tau)] = i-th weight of arm tau
        // z_i = u_i^T Y_i^dagger with the per-dimension truncation
        let mut z = DVector::zeros(d);
        for i in 0..d {
            let mut acc = 0.0;
            for (tau, &y) in self.history_payoffs.iter().enumerate() {
                let w = u[(i, tau)] * y;
                if self.keep(w, level) {
                    acc += w;
                }
            }
            z[i] = acc;
        }
        let center = &m * z;
        let beta = self.beta(t);
        self.ellipsoid = ConfidenceEllipsoid::new(
            center,
            beta,
            self.design.matrix().clone(),
            self.design.inverse().clone(),
        );
        Ok(())
    }

    fn ellipsoid(&self) -> &ConfidenceEllipsoid {
        &self.ellipsoid
    }
}
