//! Fast self-check suites behind the `validate` CLI command. Each suite is a
//! cheap invariant battery (seconds, not minutes) over the core numerics.

use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use crate::algo::{AlgoConfig, AlgoKind, Menu, MenuParams, Mom, MomParams, Policy};
use crate::env::{BanditInstance, InstanceSpec};
use crate::error::{Error, Result};
use crate::linalg::DesignState;
use crate::seeding::rep_rng;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

pub const SUITES: &[&str] = &["weights", "noclip", "mom", "ellipsoid", "moments"];

/// Run one named suite.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    let checks = match name {
        "weights" => suite_weights(seed),
        "noclip" => suite_noclip(seed),
        "mom" => suite_mom(seed),
        "ellipsoid" => suite_ellipsoid(seed),
        "moments" => suite_moments(seed),
        other => {
            return Err(Error::invalid_config(format!(
                "unknown validation suite {other:?} (available: {})",
                SUITES.join(", ")
            )))
        }
    }?;
    Ok(SuiteReport {
        suite: name.to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// Run every suite.
pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>> {
    SUITES.iter().map(|s| run_suite(s, seed)).collect()
}

fn check(name: &str, passed: bool, detail: String) -> CheckReport {
    CheckReport { name: name.to_string(), passed, detail }
}

/// Weighted-norm identities of V^{-1/2}: M V M = I and the norm bound
/// sum_i ||u_i||^2 = sum_tau ||x_tau||^2_{V^-1} <= d.
fn suite_weights(seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = rep_rng(seed, 0);
    let d = 6;
    let mut design = DesignState::new(d, 1.0)?;
    let mut arms = Vec::new();
    for _ in 0..300 {
        let x = DVector::from_fn(d, |_, _| rng.random::<f64>());
        design.update(&x)?;
        arms.push(x);
    }
    let m = design.inv_sqrt()?;
    let ident = &m * design.matrix() * &m;
    let err = (&ident - nalgebra::DMatrix::identity(d, d)).abs().max();
    let mut out = vec![check(
        "inv_sqrt_identity",
        err < 1e-8,
        format!("|M V M - I|_max = {err:.3e}"),
    )];
    let total: f64 = arms
        .iter()
        .map(|x| {
            let u = &m * x;
            u.norm_squared()
        })
        .sum();
    // sum_tau ||V^-1/2 x_tau||^2 = tr(V^-1 (V - lambda I)) <= d
    out.push(check(
        "weight_row_mass",
        total <= d as f64 + 1e-9,
        format!("sum ||u||^2 = {total:.6} <= d = {d}"),
    ));
    Ok(out)
}

/// With a huge truncation threshold TOFU's center must equal the ridge LSE.
fn suite_noclip(seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = rep_rng(seed, 1);
    let d = 4;
    let mut cfg = AlgoConfig::new(AlgoKind::Tofu);
    cfg.moment_bound = crate::algo::AutoOr::Value(1e12);
    cfg.s = crate::algo::AutoOr::Value(2.0);
    cfg.epsilon = Some(0.5);
    let inst = BanditInstance::generate(
        &InstanceSpec::Custom {
            n_arms: 8,
            d,
            noise: crate::env::NoiseModel::Pareto { shape: 2.0 },
            epsilon: 0.5,
            moment_bound: Some(1e12),
        },
        seed,
    )?;
    let mut policy = cfg.build(&inst, 100)?;
    let mut v = nalgebra::DMatrix::identity(d, d);
    let mut s = DVector::zeros(d);
    for _ in 0..60 {
        let idx = policy.select(&inst.arms)?;
        let y = inst.sample_payoff(idx, &mut rng)?;
        let x = &inst.arms[idx];
        v += x * x.transpose();
        s += y * x;
        policy.update(x, &[y])?;
    }
    let lse = v
        .try_inverse()
        .ok_or_else(|| Error::internal("singular design"))?
        * s;
    let err = (policy.ellipsoid().center() - lse).norm();
    Ok(vec![check(
        "noclip_matches_ridge",
        err < 1e-7,
        format!("|center - LSE| = {err:.3e}"),
    )])
}

/// Median-of-means robustness: one corrupted group cannot move the estimate,
/// and the median estimate is one of the group estimates for MENU.
fn suite_mom(seed: u64) -> Result<Vec<CheckReport>> {
    let d = 3;
    let mut out = Vec::new();

    // MoM: payoffs with one wild group still give the clean lower median
    let mut mom = Mom::new(MomParams {
        dim: d,
        c: 1.0,
        epsilon: 1.0,
        delta: 0.1,
        lambda: 1.0,
        s: 2.0,
        horizon: 16,
        radius_constant: 1.0,
        groups: Some(2),
    })?;
    let arm = DVector::from_vec(vec![1.0, 0.0, 0.0]);
    let pulls = mom.pulls() as usize;
    let mut payoffs = vec![1.0; pulls];
    payoffs[pulls - 1] = 1e9; // poisons exactly one of the two groups
    mom.update(&arm, &payoffs)?;
    let c0 = mom.ellipsoid().center()[0];
    out.push(check(
        "mom_outlier_immune",
        (c0 - 0.5).abs() < 1e-9,
        format!("center[0] = {c0} (clean group mean 1, ridge shrink to 1/2)"),
    ));

    // MENU: selected estimate is one of the k group estimates
    let mut rng = rep_rng(seed, 2);
    let mut menu = Menu::new(MenuParams {
        dim: d,
        c: 3.0,
        epsilon: 1.0,
        delta: 0.1,
        lambda: 1.0,
        s: 2.0,
        horizon: 400,
    })?;
    let k = menu.k() as usize;
    for _ in 0..3 {
        let x = DVector::from_fn(d, |_, _| rng.random::<f64>());
        let ys: Vec<f64> = (0..k).map(|_| rng.random_range(-3.0..3.0)).collect();
        menu.update(&x, &ys)?;
    }
    let center = menu.ellipsoid().center().clone();
    let is_estimate = (0..k).any(|j| {
        menu.group_estimate(j)
            .map(|e| (e - &center).norm() < 1e-10)
            .unwrap_or(false)
    });
    out.push(check(
        "menu_center_is_group_estimate",
        is_estimate,
        "selected center equals one of the k group estimates".into(),
    ));
    Ok(out)
}

/// Ellipsoid geometry: the optimistic value dominates every member's value.
fn suite_ellipsoid(seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = rep_rng(seed, 3);
    let d = 4;
    let mut design = DesignState::new(d, 1.0)?;
    for _ in 0..40 {
        let x = DVector::from_fn(d, |_, _| rng.random::<f64>());
        design.update(&x)?;
    }
    let center = DVector::from_fn(d, |_, _| rng.random::<f64>());
    let ell = crate::algo::ConfidenceEllipsoid::new(
        center.clone(),
        1.5,
        design.matrix().clone(),
        design.inverse().clone(),
    );
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for _ in 0..500 {
        let x = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
        let opt = ell.optimistic_value(&x)?;
        // random member: center + beta * V^{-1/2} unit
        let raw = DVector::from_fn(d, |_, _| rng.random_range(-1.0f64..1.0));
        let dir = design.inv_sqrt()? * raw;
        let n = crate::linalg::weighted_norm(design.matrix(), &dir)?;
        if n == 0.0 {
            continue;
        }
        let member = &center + dir * (1.5 * rng.random::<f64>() / n);
        let val = x.dot(&member);
        worst = worst.max(val - opt);
        if val > opt + 1e-9 {
            ok = false;
        }
    }
    Ok(vec![check(
        "optimism_dominates_members",
        ok,
        format!("max member excess over optimistic value = {worst:.3e}"),
    )])
}

/// Monte Carlo moment audit of every named dataset.
fn suite_moments(seed: u64) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for ds in ["s1", "s3"] {
        let inst = BanditInstance::generate(
            &InstanceSpec::Dataset { dataset: ds.into() },
            seed,
        )?;
        let mut rng = rep_rng(seed, 4);
        let report = inst.verify_moment_bound(20_000, &mut rng)?;
        out.push(check(
            &format!("moment_bound_{ds}"),
            report.pass,
            format!(
                "empirical {:.4} vs declared {:.4}",
                report.empirical_moment, report.declared_bound
            ),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        for report in run_all(12345).unwrap() {
            for c in &report.checks {
                assert!(c.passed, "{}::{} failed: {}", report.suite, c.name, c.detail);
            }
            assert!(report.passed);
        }
    }

    #[test]
    fn unknown_suite_rejected() {
        assert!(run_suite("nope", 1).is_err());
    }
}
