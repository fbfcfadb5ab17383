//! Simulated heavy-tailed bandit worlds: the synthetic Student-t and Pareto
//! instances, and the two-point Bernoulli construction used for lower-bound
//! experiments. Instances carry the a priori bounds (D, S, L, b, c) the
//! policies are allowed to know.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Payoff noise attached to an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NoiseModel {
    /// Additive Student-t noise: payoff = <x, theta> + location + scale * t_nu.
    StudentT { dof: f64, location: f64, scale: f64 },
    /// Multiplicative Pareto payoff with per-arm scale chosen so the mean is
    /// <x, theta>: s_m = <x, theta> * (alpha - 1) / alpha (= mean/2 at alpha=2).
    Pareto { shape: f64 },
    /// Two-point payoff in {0, (1/delta)^(1/eps)} with mean <x, theta>.
    LowerBoundBernoulli { delta: f64, epsilon: f64 },
}

/// One simulated LinBET world: a fixed finite arm set, the hidden parameter,
/// a noise model and the moment bounds handed to the algorithms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BanditInstance {
    pub dataset: String,
    pub arms: Vec<DVector<f64>>,
    pub theta_star: DVector<f64>,
    pub noise: NoiseModel,
    pub epsilon: f64,
    /// Raw (1+eps)-moment bound, when declared.
    pub bound_b: Option<f64>,
    /// Central (1+eps)-moment bound, when declared.
    pub bound_c: Option<f64>,
    /// Arm-norm bound.
    pub d_bound: f64,
    /// Bound on ||theta*||_2.
    pub s_bound: f64,
    /// Bound on |<x, theta*>|.
    pub l_bound: f64,
}

/// Instance spec as accepted on the wire: a named dataset or a custom build.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSpec {
    Dataset {
        dataset: String,
    },
    Custom {
        n_arms: usize,
        d: usize,
        noise: NoiseModel,
        epsilon: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        moment_bound: Option<f64>,
    },
}

/// Lower-bound construction: theta* pairs from {(2D,D),(D,2D)} and a grid
/// discretization of the pair-sum simplex.
#[derive(Debug, Clone)]
pub struct LowerBoundInstance {
    pub dim: usize,
    pub delta_gap: f64,
    pub instance: BanditInstance,
}

/// Outcome of a Monte Carlo moment-bound audit.
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub empirical_moment: f64,
    pub declared_bound: f64,
    pub pass: bool,
    /// Exact moment, available for the lower-bound environment.
    pub analytic_moment: Option<f64>,
}

/// Pareto grid resolution per coordinate pair (values 0, 1/8, ..., 1).
const LB_GRID_POINTS: usize = 9;
/// Cap on the discretized lower-bound arm set.
const LB_MAX_ARMS: usize = 4096;

impl BanditInstance {
    /// Build an instance from a spec, deterministically in `seed`.
    pub fn generate(spec: &InstanceSpec, seed: u64) -> Result<BanditInstance> {
        match spec {
            InstanceSpec::Dataset { dataset } => {
                let (n_arms, d, noise, epsilon) = match dataset.to_ascii_lowercase().as_str() {
                    "s1" => (20, 10, NoiseModel::student_t_standard(), 1.0),
                    "s2" => (100, 20, NoiseModel::student_t_standard(), 1.0),
                    "s3" => (20, 10, NoiseModel::Pareto { shape: 2.0 }, 0.5),
                    "s4" => (100, 20, NoiseModel::Pareto { shape: 2.0 }, 0.5),
                    other => {
                        return Err(Error::invalid_config(format!("unknown dataset id {other:?}")))
                    }
                };
                Self::generate_uniform(dataset, n_arms, d, noise, epsilon, None, seed)
            }
            InstanceSpec::Custom {
                n_arms,
                d,
                noise,
                epsilon,
                moment_bound,
            } => Self::generate_uniform(
                "custom",
                *n_arms,
                *d,
                noise.clone(),
                *epsilon,
                *moment_bound,
                seed,
            ),
        }
    }

    fn generate_uniform(
        dataset: &str,
        n_arms: usize,
        d: usize,
        noise: NoiseModel,
        epsilon: f64,
        moment_override: Option<f64>,
        seed: u64,
    ) -> Result<BanditInstance> {
        if n_arms == 0 || d == 0 {
            return Err(Error::invalid_config("n_arms and d must be positive"));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::invalid_config("epsilon must lie in (0, 1]"));
        }
        noise.check_moment_exists(epsilon)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let arms: Vec<DVector<f64>> = (0..n_arms)
            .map(|_| DVector::from_fn(d, |_, _| rng.random::<f64>()))
            .collect();
        let theta_star = DVector::from_fn(d, |_, _| rng.random::<f64>());
        let sqrt_d = (d as f64).sqrt();
        let l_bound = arms
            .iter()
            .map(|x| x.dot(&theta_star).abs())
            .fold(0.0, f64::max);

        let (bound_b, bound_c) = match (&noise, moment_override) {
            (NoiseModel::StudentT { .. }, Some(c)) => (None, Some(c)),
            (NoiseModel::StudentT { dof, location, scale }, None) => {
                let c = student_t_central_moment_bound(*dof, *location, *scale, epsilon)?;
                (None, Some(c))
            }
            (NoiseModel::Pareto { .. }, Some(b)) => (Some(b), None),
            (NoiseModel::Pareto { shape }, None) => {
                let b = arms
                    .iter()
                    .map(|x| pareto_raw_moment(x.dot(&theta_star), *shape, epsilon))
                    .fold(0.0, f64::max);
                (Some(b), None)
            }
            (NoiseModel::LowerBoundBernoulli { delta, .. }, _) => {
                let b = arms
                    .iter()
                    .map(|x| x.dot(&theta_star) / delta)
                    .fold(0.0, f64::max);
                (Some(b), None)
            }
        };

        Ok(BanditInstance {
            dataset: dataset.to_string(),
            arms,
            theta_star,
            noise,
            epsilon,
            bound_b,
            bound_c,
            d_bound: sqrt_d,
            s_bound: sqrt_d,
            l_bound,
        })
    }

    pub fn n_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn dim(&self) -> usize {
        self.theta_star.len()
    }

    /// Expected payoff of an arm.
    pub fn mean_payoff(&self, arm_index: usize) -> f64 {
        self.arms[arm_index].dot(&self.theta_star)
    }

    /// Draw one stochastic payoff for an arm.
    pub fn sample_payoff(&self, arm_index: usize, rng: &mut impl Rng) -> Result<f64> {
        if arm_index >= self.arms.len() {
            return Err(Error::invalid_input(format!(
                "arm index {arm_index} out of range ({} arms)",
                self.arms.len()
            )));
        }
        let mean = self.mean_payoff(arm_index);
        match &self.noise {
            NoiseModel::StudentT { dof, location, scale } => {
                let z: f64 = StandardNormal.sample(rng);
                let chi = ChiSquared::new(*dof)
                    .map_err(|e| Error::invalid_config(format!("chi-square dof: {e}")))?;
                let w: f64 = chi.sample(rng);
                Ok(mean + location + scale * z * (dof / w).sqrt())
            }
            NoiseModel::Pareto { shape } => {
                let u: f64 = rng.random();
                Ok(pareto_inverse_cdf(mean, *shape, u))
            }
            NoiseModel::LowerBoundBernoulli { delta, epsilon } => {
                let p = delta.powf(1.0 / epsilon) * mean;
                if p > 1.0 {
                    return Err(Error::invalid_config(format!(
                        "lower-bound success probability {p} exceeds 1"
                    )));
                }
                let u: f64 = rng.random();
                Ok(if u < p { (1.0 / delta).powf(1.0 / epsilon) } else { 0.0 })
            }
        }
    }

    /// Best arm and its expected payoff; ties break to the lowest index.
    pub fn optimal_value(&self) -> Result<(usize, f64)> {
        if self.arms.is_empty() {
            return Err(Error::invalid_input("empty arm set"));
        }
        let mut best = 0usize;
        let mut best_val = self.mean_payoff(0);
        for i in 1..self.arms.len() {
            let v = self.mean_payoff(i);
            if v > best_val {
                best = i;
                best_val = v;
            }
        }
        Ok((best, best_val))
    }

    /// Monte Carlo audit of the declared moment bound: estimates the max over
    /// arms of the declared (raw or central) (1+eps)-moment and compares it
    /// against the declared bound with a 5x relative-standard-error allowance.
    pub fn verify_moment_bound(&self, n_samples: usize, rng: &mut impl Rng) -> Result<MomentReport> {
        if n_samples < 10_000 {
            return Err(Error::invalid_input("need at least 10^4 samples"));
        }
        let p = 1.0 + self.epsilon;
        let (declared, central) = match (self.bound_b, self.bound_c) {
            (Some(b), _) => (b, false),
            (None, Some(c)) => (c, true),
            (None, None) => {
                return Err(Error::invalid_config("instance declares no moment bound"))
            }
        };
        let mut max_moment = 0.0f64;
        let mut max_rse = 0.0f64;
        for idx in 0..self.arms.len() {
            let mean = self.mean_payoff(idx);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..n_samples {
                let y = self.sample_payoff(idx, rng)?;
                let v = if central { (y - mean).abs().powf(p) } else { y.abs().powf(p) };
                sum += v;
                sum_sq += v * v;
            }
            let n = n_samples as f64;
            let est = sum / n;
            let var = (sum_sq / n - est * est).max(0.0);
            let rse = if est > 0.0 { (var / n).sqrt() / est } else { 0.0 };
            if est > max_moment {
                max_moment = est;
                max_rse = rse;
            }
        }
        let analytic = match &self.noise {
            NoiseModel::LowerBoundBernoulli { delta, .. } => Some(
                self.arms
                    .iter()
                    .map(|x| x.dot(&self.theta_star) / delta)
                    .fold(0.0, f64::max),
            ),
            _ => None,
        };
        Ok(MomentReport {
            empirical_moment: max_moment,
            declared_bound: declared,
            pass: max_moment <= declared * (1.0 + 5.0 * max_rse),
            analytic_moment: analytic,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<BanditInstance> {
        Ok(serde_json::from_str(json)?)
    }
}

impl NoiseModel {
    pub fn student_t_standard() -> NoiseModel {
        NoiseModel::StudentT { dof: 3.0, location: 0.0, scale: 1.0 }
    }

    fn check_moment_exists(&self, epsilon: f64) -> Result<()> {
        match self {
            NoiseModel::StudentT { dof, .. } => {
                if *dof <= 1.0 + epsilon {
                    return Err(Error::invalid_config(
                        "student-t dof must exceed 1+epsilon for the moment to exist",
                    ));
                }
            }
            NoiseModel::Pareto { shape } => {
                if *shape <= 1.0 + epsilon {
                    return Err(Error::invalid_config(
                        "pareto shape must exceed 1+epsilon for the moment to exist",
                    ));
                }
            }
            NoiseModel::LowerBoundBernoulli { delta, epsilon: eps } => {
                if !(*delta > 0.0) {
                    return Err(Error::invalid_config("delta must be positive"));
                }
                if *delta > (0.5f64).powf(eps / (1.0 + eps)) {
                    return Err(Error::invalid_config(
                        "delta exceeds (1/2)^(eps/(1+eps))",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Central (1+eps)-moment bound for location/scale Student-t noise. Closed
/// form at eps = 1 (finite variance); other eps need an explicit bound.
fn student_t_central_moment_bound(dof: f64, location: f64, scale: f64, epsilon: f64) -> Result<f64> {
    if (epsilon - 1.0).abs() < 1e-12 {
        if dof <= 2.0 {
            return Err(Error::invalid_config("student-t variance needs dof > 2"));
        }
        Ok(location * location + scale * scale * dof / (dof - 2.0))
    } else {
        Err(Error::invalid_config(
            "student-t moment bound has no closed form here for eps != 1; pass moment_bound",
        ))
    }
}

/// E[y^(1+eps)] for a Pareto payoff with the stated mean.
fn pareto_raw_moment(mean: f64, shape: f64, epsilon: f64) -> f64 {
    let s = pareto_scale(mean, shape);
    shape * s.powf(1.0 + epsilon) / (shape - 1.0 - epsilon)
}

/// Scale making the Pareto mean equal `mean`: s = mean*(alpha-1)/alpha.
fn pareto_scale(mean: f64, shape: f64) -> f64 {
    mean * (shape - 1.0) / shape
}

/// Inverse-CDF Pareto draw: s * (1-u)^(-1/alpha).
pub(crate) fn pareto_inverse_cdf(mean: f64, shape: f64, u: f64) -> f64 {
    pareto_scale(mean, shape) * (1.0 - u).powf(-1.0 / shape)
}

/// Build the lower-bound environment: delta = T^(-eps/(1+eps))/12 (clamped),
/// theta* pairs uniform over {(2D,D),(D,2D)}, arms on a 9-point grid per pair.
pub fn lower_bound_instance(
    d: usize,
    epsilon: f64,
    horizon: u64,
    seed: u64,
) -> Result<LowerBoundInstance> {
    if d == 0 || d % 2 != 0 {
        return Err(Error::invalid_input(
            "lower-bound dimension must be even and positive (drop one dimension for odd d)",
        ));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::invalid_input("epsilon must lie in (0, 1]"));
    }
    let t_min = (d as f64 / 12.0).powf(epsilon / (1.0 + epsilon));
    if (horizon as f64) < t_min {
        return Err(Error::invalid_input(format!(
            "horizon {horizon} below the (d/12)^(eps/(1+eps)) = {t_min:.4} requirement"
        )));
    }
    let raw_delta = (horizon as f64).powf(-epsilon / (1.0 + epsilon)) / 12.0;
    let cap = (1.0 / d as f64).min((0.5f64).powf(epsilon / (1.0 + epsilon)));
    let delta = raw_delta.min(cap);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = d / 2;
    let mut theta = DVector::zeros(d);
    for i in 0..pairs {
        if rng.random::<bool>() {
            theta[2 * i] = 2.0 * delta;
            theta[2 * i + 1] = delta;
        } else {
            theta[2 * i] = delta;
            theta[2 * i + 1] = 2.0 * delta;
        }
    }

    let grid: Vec<f64> = (0..LB_GRID_POINTS)
        .map(|i| i as f64 / (LB_GRID_POINTS - 1) as f64)
        .collect();
    let total = (LB_GRID_POINTS as f64).powi(pairs as i32);
    let arms: Vec<DVector<f64>> = if total <= LB_MAX_ARMS as f64 {
        // full cross product over the per-pair grid
        (0..total as usize)
            .map(|idx| {
                let mut x = DVector::zeros(d);
                let mut rest = idx;
                for i in 0..pairs {
                    let v = grid[rest % LB_GRID_POINTS];
                    rest /= LB_GRID_POINTS;
                    x[2 * i] = v;
                    x[2 * i + 1] = 1.0 - v;
                }
                x
            })
            .collect()
    } else {
        (0..LB_MAX_ARMS)
            .map(|_| {
                let mut x = DVector::zeros(d);
                for i in 0..pairs {
                    let v = grid[rng.random_range(0..LB_GRID_POINTS)];
                    x[2 * i] = v;
                    x[2 * i + 1] = 1.0 - v;
                }
                x
            })
            .collect()
    };

    let l_bound = 1.0; // theta.x <= d*delta <= 1 by the delta <= 1/d clamp
    let b = d as f64;
    // central moment via |y-mu|^(1+eps) <= 2^eps (|y|^(1+eps) + |mu|^(1+eps))
    let c = (2.0f64).powf(epsilon) * (b + 1.0);
    let instance = BanditInstance {
        dataset: format!("lowerbound-d{d}"),
        arms,
        theta_star: theta,
        noise: NoiseModel::LowerBoundBernoulli { delta, epsilon },
        epsilon,
        bound_b: Some(b),
        bound_c: Some(c),
        d_bound: (pairs as f64).sqrt(),
        s_bound: delta * (2.5 * d as f64).sqrt(),
        l_bound,
    };
    Ok(LowerBoundInstance { dim: d, delta_gap: delta, instance })
}

/// Theoretical expected-regret floor (d/192) * T^(1/(1+eps)).
pub fn lower_bound_floor(d: usize, epsilon: f64, horizon: u64) -> f64 {
    d as f64 / 192.0 * (horizon as f64).powf(1.0 / (1.0 + epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::rep_rng;

    #[test]
    fn s1_matches_table_row() {
        let spec = InstanceSpec::Dataset { dataset: "s1".into() };
        let inst = BanditInstance::generate(&spec, 1).unwrap();
        assert_eq!(inst.n_arms(), 20);
        assert_eq!(inst.dim(), 10);
        assert_eq!(inst.noise, NoiseModel::student_t_standard());
        assert_eq!(inst.bound_c, Some(3.0));
        assert_eq!(inst.bound_b, None);
        assert_eq!(inst.epsilon, 1.0);
        assert!((inst.d_bound - 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn s4_matches_table_row() {
        let spec = InstanceSpec::Dataset { dataset: "S4".into() };
        let inst = BanditInstance::generate(&spec, 1).unwrap();
        assert_eq!(inst.n_arms(), 100);
        assert_eq!(inst.dim(), 20);
        assert_eq!(inst.noise, NoiseModel::Pareto { shape: 2.0 });
        assert_eq!(inst.epsilon, 0.5);
        assert!(inst.bound_b.is_some());
        // b = max over arms of 4 * s_m^1.5 with s_m = mean/2
        let expected = inst
            .arms
            .iter()
            .map(|x| {
                let s = x.dot(&inst.theta_star) / 2.0;
                4.0 * s.powf(1.5)
            })
            .fold(0.0, f64::max);
        assert!((inst.bound_b.unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn unknown_dataset_rejected() {
        let spec = InstanceSpec::Dataset { dataset: "s9".into() };
        assert!(matches!(
            BanditInstance::generate(&spec, 1),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn generation_is_deterministic_in_seed() {
        let spec = InstanceSpec::Dataset { dataset: "s2".into() };
        let a = BanditInstance::generate(&spec, 42).unwrap();
        let b = BanditInstance::generate(&spec, 42).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let c = BanditInstance::generate(&spec, 43).unwrap();
        assert_ne!(a.to_json().unwrap(), c.to_json().unwrap());
    }

    #[test]
    fn pareto_inverse_cdf_hand_value() {
        // alpha=2, mean 3.10 so s_m = 1.55; u = 0.75 maps to payoff 3.10
        let y = pareto_inverse_cdf(3.10, 2.0, 0.75);
        assert!((y - 3.10).abs() < 1e-12);
    }

    #[test]
    fn pareto_mean_identity_monte_carlo() {
        let spec = InstanceSpec::Dataset { dataset: "s3".into() };
        let inst = BanditInstance::generate(&spec, 5).unwrap();
        let mut rng = rep_rng(5, 0);
        let idx = 3;
        let mean = inst.mean_payoff(idx);
        let n = 200_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let y = inst.sample_payoff(idx, &mut rng).unwrap();
            sum += y;
            sumsq += y * y;
        }
        let m = sum / n as f64;
        let se = ((sumsq / n as f64 - m * m) / n as f64).sqrt();
        assert!((m - mean).abs() < 4.0 * se, "mean {m} vs {mean} (se {se})");
    }

    #[test]
    fn student_t_mean_and_second_moment() {
        let spec = InstanceSpec::Dataset { dataset: "s1".into() };
        let inst = BanditInstance::generate(&spec, 9).unwrap();
        let mut rng = rep_rng(9, 0);
        let idx = 0;
        let mean = inst.mean_payoff(idx);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sum_c2 = 0.0;
        for _ in 0..n {
            let y = inst.sample_payoff(idx, &mut rng).unwrap();
            sum += y;
            let d = y - mean;
            sum_c2 += d * d;
        }
        let m = sum / n as f64;
        // t(3) variance is 3; the standard error of the sample mean is about sqrt(3/n)
        let se = (3.0 / n as f64).sqrt();
        assert!((m - mean).abs() < 4.0 * se, "mean {m} vs {mean}");
        let c2 = sum_c2 / n as f64;
        assert!((c2 - 3.0).abs() < 0.4, "central second moment {c2}");
    }

    #[test]
    fn lower_bound_two_point_arithmetic() {
        let inst = BanditInstance {
            dataset: "lb".into(),
            arms: vec![DVector::from_vec(vec![1.0, 0.0])],
            theta_star: DVector::from_vec(vec![1.0, 0.5]),
            noise: NoiseModel::LowerBoundBernoulli { delta: 0.25, epsilon: 1.0 },
            epsilon: 1.0,
            bound_b: Some(4.0),
            bound_c: None,
            d_bound: 1.0,
            s_bound: 2.0,
            l_bound: 1.0,
        };
        let mut rng = rep_rng(1, 0);
        let n = 200_000;
        let mut hits = 0u64;
        for _ in 0..n {
            let y = inst.sample_payoff(0, &mut rng).unwrap();
            assert!(y == 0.0 || (y - 4.0).abs() < 1e-12);
            if y > 0.0 {
                hits += 1;
            }
        }
        let p = hits as f64 / n as f64;
        assert!((p - 0.25).abs() < 0.01, "hit rate {p}");
    }

    #[test]
    fn optimal_value_basis_arms() {
        let inst = BanditInstance {
            dataset: "t".into(),
            arms: vec![
                DVector::from_vec(vec![1.0, 0.0]),
                DVector::from_vec(vec![0.0, 1.0]),
            ],
            theta_star: DVector::from_vec(vec![1.0, 0.0]),
            noise: NoiseModel::student_t_standard(),
            epsilon: 1.0,
            bound_b: None,
            bound_c: Some(3.0),
            d_bound: 1.0,
            s_bound: 1.0,
            l_bound: 1.0,
        };
        assert_eq!(inst.optimal_value().unwrap(), (0, 1.0));
    }

    #[test]
    fn optimal_value_tie_breaks_low() {
        let arm = DVector::from_vec(vec![0.5, 0.5]);
        let inst = BanditInstance {
            dataset: "t".into(),
            arms: vec![arm.clone(), arm.clone(), arm],
            theta_star: DVector::from_vec(vec![1.0, 1.0]),
            noise: NoiseModel::student_t_standard(),
            epsilon: 1.0,
            bound_b: None,
            bound_c: Some(3.0),
            d_bound: 1.0,
            s_bound: 2.0,
            l_bound: 1.0,
        };
        assert_eq!(inst.optimal_value().unwrap().0, 0);
    }

    #[test]
    fn optimal_value_matches_scan_oracle() {
        let spec = InstanceSpec::Dataset { dataset: "s2".into() };
        let inst = BanditInstance::generate(&spec, 17).unwrap();
        let (idx, val) = inst.optimal_value().unwrap();
        let oracle = (0..inst.n_arms())
            .map(|i| (i, inst.mean_payoff(i)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        assert_eq!(idx, oracle.0);
        assert!((val - oracle.1).abs() < 1e-15);
    }

    #[test]
    fn lower_bound_instance_delta_formula() {
        let lb = lower_bound_instance(2, 1.0, 10_000, 1).unwrap();
        assert!((lb.delta_gap - 1e-2 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_grid_contains_endpoints() {
        let lb = lower_bound_instance(2, 1.0, 10_000, 1).unwrap();
        let has = |a: f64, b: f64| {
            lb.instance
                .arms
                .iter()
                .any(|x| (x[0] - a).abs() < 1e-15 && (x[1] - b).abs() < 1e-15)
        };
        assert!(has(1.0, 0.0));
        assert!(has(0.0, 1.0));
        assert_eq!(lb.instance.n_arms(), 9);
    }

    #[test]
    fn lower_bound_pair_sums_exact() {
        let lb = lower_bound_instance(6, 0.5, 10_000, 3).unwrap();
        for x in &lb.instance.arms {
            for i in 0..3 {
                assert_eq!(x[2 * i] + x[2 * i + 1], 1.0);
                assert!(x[2 * i] >= 0.0 && x[2 * i + 1] >= 0.0);
            }
        }
        // theta pairs are (2D,D) or (D,2D)
        let d = lb.delta_gap;
        for i in 0..3 {
            let pair = (lb.instance.theta_star[2 * i], lb.instance.theta_star[2 * i + 1]);
            assert!(pair == (2.0 * d, d) || pair == (d, 2.0 * d));
        }
    }

    #[test]
    fn lower_bound_subsampled_when_grid_explodes() {
        let lb = lower_bound_instance(10, 0.5, 10_000, 3).unwrap();
        assert_eq!(lb.instance.n_arms(), LB_MAX_ARMS);
    }

    #[test]
    fn lower_bound_odd_dim_rejected() {
        assert!(matches!(
            lower_bound_instance(3, 1.0, 100, 1),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn lower_bound_analytic_moment_at_most_d() {
        let lb = lower_bound_instance(2, 1.0, 10_000, 7).unwrap();
        let mut rng = rep_rng(7, 0);
        let report = lb.instance.verify_moment_bound(10_000, &mut rng).unwrap();
        let analytic = report.analytic_moment.unwrap();
        assert!(analytic <= 2.0 + 1e-12);
        assert!(report.pass);
    }

    #[test]
    fn instance_spec_json_shapes() {
        let s: InstanceSpec = serde_json::from_str(r#"{"dataset": "S1"}"#).unwrap();
        assert!(matches!(s, InstanceSpec::Dataset { .. }));
        let c: InstanceSpec = serde_json::from_str(
            r#"{"n_arms": 5, "d": 3, "noise": {"type": "pareto", "shape": 2.0}, "epsilon": 0.5}"#,
        )
        .unwrap();
        assert!(matches!(c, InstanceSpec::Custom { .. }));
        let inst = BanditInstance::generate(&c, 11).unwrap();
        let round = BanditInstance::from_json(&inst.to_json().unwrap()).unwrap();
        assert_eq!(inst.theta_star, round.theta_star);
    }
}
