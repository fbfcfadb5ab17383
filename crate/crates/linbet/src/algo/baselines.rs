//! Baseline reconstructions: MoM (median of means over observed payoffs, one
//! LSE per epoch) and CRT (confidence region with a single trim of each
//! payoff at observation time). The internal constants are not published; the
//! defaults realize the advertised regret orders and stay configurable.

use nalgebra::DVector;

use crate::algo::{AlgoKind, ConfidenceEllipsoid, Policy, lower_median};
use crate::error::{Error, Result};
use crate::linalg::DesignState;

#[derive(Debug, Clone)]
pub struct MomParams {
    pub dim: usize,
    /// Central (1+eps)-moment bound.
    pub c: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub lambda: f64,
    pub s: f64,
    pub horizon: u64,
    /// Radius constant C_mom (default 1).
    pub radius_constant: f64,
    /// Group count override; defaults to min(k_m, ceil(8 log(T/delta))).
    pub groups: Option<usize>,
}

/// MoM epoch schedule: N_m = ceil(T^(2 eps/(1+3 eps))) epochs of
/// k_m = floor(T / N_m) pulls.
pub fn mom_schedule(horizon: u64, epsilon: f64) -> (u64, u64) {
    let n = (horizon as f64)
        .powf(2.0 * epsilon / (1.0 + 3.0 * epsilon))
        .ceil() as u64;
    let k = horizon / n;
    (n.min(horizon), k.max(1))
}

pub struct Mom {
    params: MomParams,
    n_epochs: u64,
    pulls: u64,
    groups: usize,
    epoch: u64,
    design: DesignState,
    sum: DVector<f64>,
    ellipsoid: ConfidenceEllipsoid,
}

impl Mom {
    pub fn new(params: MomParams) -> Result<Mom> {
        if params.horizon == 0 {
            return Err(Error::invalid_config("horizon must be positive"));
        }
        let (n_epochs, pulls) = mom_schedule(params.horizon, params.epsilon);
        let default_groups =
            ((8.0 * (params.horizon as f64 / params.delta).ln()).ceil() as usize).max(1);
        let groups = params.groups.unwrap_or(default_groups).min(pulls as usize).max(1);
        let design = DesignState::new(params.dim, params.lambda)?;
        let ellipsoid = ConfidenceEllipsoid::initial(params.dim, params.lambda, params.s);
        Ok(Mom {
            sum: DVector::zeros(params.dim),
            params,
            n_epochs,
            pulls,
            groups,
            epoch: 0,
            design,
            ellipsoid,
        })
    }

    pub fn epochs(&self) -> u64 {
        self.n_epochs
    }

    pub fn pulls(&self) -> u64 {
        self.pulls
    }

    pub fn groups(&self) -> usize {
        self.groups
    }

    pub fn beta(&self, epoch: u64) -> f64 {
        let p = &self.params;
        p.radius_constant
            * (12.0 * p.c).powf(1.0 / (1.0 + p.epsilon))
            * (self.groups as f64 / self.pulls as f64).powf(p.epsilon / (1.0 + p.epsilon))
            * (epoch as f64).sqrt()
            + p.lambda.sqrt() * p.s
    }

    /// Median of group means over one epoch's payoffs; the remainder beyond
    /// m * floor(k_m / m) is discarded.
    pub fn intermediate_payoff(&self, payoffs: &[f64]) -> f64 {
        let g = (payoffs.len() / self.groups).max(1);
        let mut means: Vec<f64> = (0..self.groups.min(payoffs.len()))
            .map(|j| payoffs[j * g..(j + 1) * g].iter().sum::<f64>() / g as f64)
            .collect();
        lower_median(&mut means)
    }
}

impl Policy for Mom {
    fn kind(&self) -> AlgoKind {
        AlgoKind::Mom
    }

    fn pulls_per_decision(&self) -> u64 {
        self.pulls
    }

    fn num_decisions(&self) -> u64 {
        self.n_epochs
    }

    fn select(&self, arms: &[DVector<f64>]) -> Result<usize> {
        self.ellipsoid.select_optimistic_arm(arms)
    }

    fn update(&mut self, arm: &DVector<f64>, payoffs: &[f64]) -> Result<()> {
        if payoffs.len() as u64 != self.pulls {
            return Err(Error::invalid_input(format!(
                "MoM expects exactly k_m = {} payoffs per epoch, got {}",
                self.pulls,
                payoffs.len()
            )));
        }
        if payoffs.iter().any(|y| !y.is_finite()) {
            return Err(Error::invalid_input("non-finite payoff"));
        }
        let level = self.intermediate_payoff(payoffs);
        self.design.update(arm)?;
        self.epoch += 1;
        self.sum += level * arm;
        let center = self.design.ridge_solve(&self.sum)?;
        let beta = self.beta(self.epoch);
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

#[derive(Debug, Clone)]
pub struct CrtParams {
    pub dim: usize,
    /// Raw (1+eps)-moment bound.
    pub b: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub lambda: f64,
    pub s: f64,
    pub horizon: u64,
    /// Radius constant C_crt (default 4).
    pub radius_constant: f64,
    /// Arm-norm bound D, used in the radius's log factor.
    pub arm_bound: f64,
}

pub struct Crt {
    params: CrtParams,
    t: u64,
    design: DesignState,
    sum: DVector<f64>,
    ellipsoid: ConfidenceEllipsoid,
}

impl Crt {
    pub fn new(params: CrtParams) -> Result<Crt> {
        if params.horizon == 0 {
            return Err(Error::invalid_config("horizon must be positive"));
        }
        let design = DesignState::new(params.dim, params.lambda)?;
        let ellipsoid = ConfidenceEllipsoid::initial(params.dim, params.lambda, params.s);
        Ok(Crt { sum: DVector::zeros(params.dim), params, t: 0, design, ellipsoid })
    }

    /// Trim level B_t = (b t / log(2T/delta))^(1/(1+eps)), nondecreasing in t.
    pub fn trim_level(&self, t: u64) -> f64 {
        let p = &self.params;
        let log = (2.0 * p.horizon as f64 / p.delta).ln();
        (p.b * t as f64 / log).powf(1.0 / (1.0 + p.epsilon))
    }

    pub fn beta(&self, t: u64) -> f64 {
        let p = &self.params;
        let log = (2.0 * p.horizon as f64 / p.delta).ln();
        let design_log =
            (1.0 + t as f64 * p.arm_bound * p.arm_bound / (p.lambda * p.dim as f64)).ln();
        p.radius_constant
            * p.b.powf(1.0 / (1.0 + p.epsilon))
            * log.powf(p.epsilon / (1.0 + p.epsilon))
            * (t as f64).powf((1.0 - p.epsilon) / (2.0 * (1.0 + p.epsilon)))
            * (design_log * p.dim as f64).sqrt()
            + p.lambda.sqrt() * p.s
    }
}

impl Policy for Crt {
    fn kind(&self) -> AlgoKind {
        AlgoKind::Crt
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
            return Err(Error::invalid_input("CRT consumes exactly one payoff per round"));
        };
        if !payoff.is_finite() {
            return Err(Error::invalid_input("non-finite payoff"));
        }
        self.t += 1;
        let trimmed = if payoff.abs() <= self.trim_level(self.t) { *payoff } else { 0.0 };
        self.design.update(arm)?;
        self.sum += trimmed * arm;
        let center = self.design.ridge_solve(&self.sum)?;
        let beta = self.beta(self.t);
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

#[cfg(test)]
mod tests {
    use super::*;

    fn mom_params(horizon: u64, epsilon: f64) -> MomParams {
        MomParams {
            dim: 3,
            c: 3.0,
            epsilon,
            delta: 0.1,
            lambda: 1.0,
            s: 3f64.sqrt(),
            horizon,
            radius_constant: 1.0,
            groups: None,
        }
    }

    fn crt_params(horizon: u64) -> CrtParams {
        CrtParams {
            dim: 3,
            b: 7.72,
            epsilon: 0.5,
            delta: 0.1,
            lambda: 1.0,
            s: 3f64.sqrt(),
            horizon,
            radius_constant: 4.0,
            arm_bound: 3f64.sqrt(),
        }
    }

    #[test]
    fn mom_schedule_formula() {
        // eps = 1: N = ceil(sqrt(20000)) = 142, k = floor(20000/142) = 140
        let (n, k) = mom_schedule(20_000, 1.0);
        assert_eq!(n, 142);
        assert_eq!(k, 140);
        assert!(n * k <= 20_000);
    }

    #[test]
    fn mom_constant_payoffs_give_constant_level() {
        let mom = Mom::new(mom_params(20_000, 1.0)).unwrap();
        let payoffs = vec![7.25; mom.pulls() as usize];
        assert_eq!(mom.intermediate_payoff(&payoffs), 7.25);
    }

    #[test]
    fn mom_lower_median_hand_case() {
        // horizon 16 at eps=1 gives N=4 epochs of k_m=4 pulls
        let mut p = mom_params(16, 1.0);
        p.groups = Some(2);
        let mom = Mom::new(p).unwrap();
        assert_eq!(mom.pulls(), 4);
        // {0,0,0,100} in two groups of two: means {0, 50}, lower median 0
        assert_eq!(mom.intermediate_payoff(&[0.0, 0.0, 0.0, 100.0]), 0.0);
    }

    #[test]
    fn mom_wrong_count_rejected() {
        let mut mom = Mom::new(mom_params(20_000, 1.0)).unwrap();
        assert!(mom.update(&DVector::zeros(3), &[1.0]).is_err());
    }

    #[test]
    fn mom_beta_nondecreasing() {
        let mom = Mom::new(mom_params(20_000, 0.5)).unwrap();
        let mut prev = 0.0;
        for n in 1..=mom.epochs() {
            let b = mom.beta(n);
            assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn crt_small_payoff_stored_unmodified() {
        let mut crt = Crt::new(crt_params(10_000)).unwrap();
        let arm = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let y = 0.9 * crt.trim_level(1); // below the round-1 threshold
        crt.update(&arm, &[y]).unwrap();
        // V = diag(2,1,1); center = V^-1 (y,0,0) = (y/2,0,0)
        assert!((crt.ellipsoid().center()[0] - y / 2.0).abs() < 1e-12);
    }

    #[test]
    fn crt_large_payoff_zeroed() {
        let mut crt = Crt::new(crt_params(10_000)).unwrap();
        let arm = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let level = crt.trim_level(1);
        crt.update(&arm, &[level * 10.0]).unwrap();
        assert!(crt.ellipsoid().center().norm() < 1e-12);
    }

    #[test]
    fn crt_trim_level_nondecreasing() {
        let crt = Crt::new(crt_params(10_000)).unwrap();
        let mut prev = 0.0;
        for t in 1..=10_000 {
            let b = crt.trim_level(t);
            assert!(b >= prev, "trim level decreased at t = {t}");
            prev = b;
        }
    }

    #[test]
    fn crt_trim_is_never_revisited() {
        let mut crt = Crt::new(crt_params(10_000)).unwrap();
        let arm = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let big = crt.trim_level(1) * 4.0;
        crt.update(&arm, &[big]).unwrap();
        // later rounds raise B_t above `big`, but the zeroed payoff stays zeroed
        for _ in 0..200 {
            crt.update(&arm, &[0.0]).unwrap();
        }
        assert!(crt.trim_level(crt.t) > big);
        assert!(crt.ellipsoid().center().norm() < 1e-12);
    }
}
