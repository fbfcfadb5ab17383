//! MENU: median of means over per-group least-squares estimates. Each epoch
//! pulls the optimistic arm k times, maintains k payoff-weighted running sums,
//! recomputes the k ridge estimates and keeps the one whose median distance to
//! the others is smallest.

use nalgebra::DVector;

use crate::algo::{AlgoKind, ConfidenceEllipsoid, Policy, lower_median};
use crate::error::{Error, Result};
use crate::linalg::{DesignState, weighted_norm};

#[derive(Debug, Clone)]
pub struct MenuParams {
    pub dim: usize,
    /// Central (1+eps)-moment bound.
    pub c: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub lambda: f64,
    pub s: f64,
    pub horizon: u64,
}

/// Epoch schedule: k = ceil(24 log(e T / delta)) pulls per epoch over
/// N = floor(T / k) epochs.
pub fn menu_schedule(horizon: u64, delta: f64) -> (u64, u64) {
    let k = (24.0 * (std::f64::consts::E * horizon as f64 / delta).ln()).ceil() as u64;
    (k, horizon / k)
}

/// Smallest admissible horizon: T >= 256 + 24 log(e / delta).
pub fn menu_min_horizon(delta: f64) -> f64 {
    256.0 + 24.0 * (std::f64::consts::E / delta).ln()
}

pub struct Menu {
    params: MenuParams,
    k: u64,
    n_epochs: u64,
    epoch: u64,
    design: DesignState,
    group_sums: Vec<DVector<f64>>,
    ellipsoid: ConfidenceEllipsoid,
}

impl Menu {
    pub fn new(params: MenuParams) -> Result<Menu> {
        let min_t = menu_min_horizon(params.delta);
        if (params.horizon as f64) < min_t {
            return Err(Error::invalid_config(format!(
                "horizon {} below the MENU requirement T >= 256 + 24 log(e/delta) = {min_t:.2}",
                params.horizon
            )));
        }
        let (k, n_epochs) = menu_schedule(params.horizon, params.delta);
        let design = DesignState::new(params.dim, params.lambda)?;
        let ellipsoid = ConfidenceEllipsoid::initial(params.dim, params.lambda, params.s);
        Ok(Menu {
            group_sums: vec![DVector::zeros(params.dim); k as usize],
            params,
            k,
            n_epochs,
            epoch: 0,
            design,
            ellipsoid,
        })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn epochs(&self) -> u64 {
        self.n_epochs
    }

    /// Ridge estimate for group j from its running sum.
    pub fn group_estimate(&self, j: usize) -> Result<DVector<f64>> {
        let sum = self
            .group_sums
            .get(j)
            .ok_or_else(|| Error::invalid_input(format!("group index {j} out of range")))?;
        self.design.ridge_solve(sum)
    }

    /// Radius after epoch n: 3 ((9 d c)^(1/(1+eps)) n^((1-eps)/(2(1+eps))) + sqrt(lambda) S).
    pub fn beta(&self, epoch: u64) -> f64 {
        let p = &self.params;
        let exp = 1.0 / (1.0 + p.epsilon);
        let n_exp = (1.0 - p.epsilon) / (2.0 * (1.0 + p.epsilon));
        3.0 * ((9.0 * p.dim as f64 * p.c).powf(exp) * (epoch as f64).powf(n_exp)
            + p.lambda.sqrt() * p.s)
    }

    /// Group estimates, the per-estimate median distances, and the selected
    /// index. Exposed for the median-of-means property suite.
    pub fn median_select(
        design: &DesignState,
        estimates: &[DVector<f64>],
    ) -> Result<(usize, Vec<f64>)> {
        let k = estimates.len();
        if k < 2 {
            return Err(Error::invalid_input("need at least two group estimates"));
        }
        let mut dist = vec![vec![0.0f64; k]; k];
        for j in 0..k {
            for s in (j + 1)..k {
                let d = weighted_norm(design.matrix(), &(&estimates[j] - &estimates[s]))?;
                dist[j][s] = d;
                dist[s][j] = d;
            }
        }
        let mut radii = Vec::with_capacity(k);
        for j in 0..k {
            let mut others: Vec<f64> = (0..k).filter(|&s| s != j).map(|s| dist[j][s]).collect();
            radii.push(lower_median(&mut others));
        }
        let mut best = 0usize;
        for j in 1..k {
            if radii[j] < radii[best] {
                best = j;
            }
        }
        Ok((best, radii))
    }
}

impl Policy for Menu {
    fn kind(&self) -> AlgoKind {
        AlgoKind::Menu
    }

    fn pulls_per_decision(&self) -> u64 {
        self.k
    }

    fn num_decisions(&self) -> u64 {
        self.n_epochs
    }

    fn select(&self, arms: &[DVector<f64>]) -> Result<usize> {
        self.ellipsoid.select_optimistic_arm(arms)
    }

    fn update(&mut self, arm: &DVector<f64>, payoffs: &[f64]) -> Result<()> {
        if payoffs.len() as u64 != self.k {
            return Err(Error::invalid_input(format!(
                "MENU expects exactly k = {} payoffs per epoch, got {}",
                self.k,
                payoffs.len()
            )));
        }
        if payoffs.iter().any(|y| !y.is_finite()) {
            return Err(Error::invalid_input("non-finite payoff"));
        }
        self.design.update(arm)?;
        self.epoch += 1;
        let mut estimates = Vec::with_capacity(self.k as usize);
        for (j, &y) in payoffs.iter().enumerate() {
            self.group_sums[j] += y * arm;
            estimates.push(self.design.ridge_solve(&self.group_sums[j])?);
        }
        let (k_star, _) = Menu::median_select(&self.design, &estimates)?;
        let beta = self.beta(self.epoch);
        self.ellipsoid = ConfidenceEllipsoid::new(
            estimates[k_star].clone(),
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
