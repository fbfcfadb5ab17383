//! Seeded multi-repetition experiment runner: plays a policy against an
//! instance, records per-round payoff and pseudo-regret curves, and
//! aggregates repetitions into mean +/- std bands.

mod csv_io;
mod fit;
mod plot;

pub use csv_io::{read_aggregate_csv, runs_csv_string, write_aggregate_csv, write_runs_csv};
pub use fit::{FitResult, fit_scaling_exponent};
pub use plot::{PlotMetric, emit_plot};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algo::AlgoConfig;
use crate::env::BanditInstance;
use crate::error::{Error, Result};
use crate::seeding;

/// One repetition's trajectory. Cumulative arrays are exact prefix sums of
/// the per-round values; pseudo-regret is the expected-payoff gap
/// sum_t <x* - x_t, theta*> and is nondecreasing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub dataset: String,
    pub algo: String,
    pub rep: u32,
    pub seed: u64,
    pub arms: Vec<u32>,
    pub payoffs: Vec<f64>,
    pub cum_payoff: Vec<f64>,
    pub cum_regret: Vec<f64>,
    pub wall_time_s: f64,
}

impl RunRecord {
    pub fn rounds(&self) -> usize {
        self.payoffs.len()
    }

    pub fn final_regret(&self) -> f64 {
        self.cum_regret.last().copied().unwrap_or(0.0)
    }

    pub fn final_payoff(&self) -> f64 {
        self.cum_payoff.last().copied().unwrap_or(0.0)
    }
}

/// Pointwise mean and population standard deviation across repetitions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateCurve {
    pub dataset: String,
    pub algo: String,
    pub reps: u32,
    pub mean_cum_payoff: Vec<f64>,
    pub std_cum_payoff: Vec<f64>,
    pub mean_cum_regret: Vec<f64>,
    pub std_cum_regret: Vec<f64>,
}

impl AggregateCurve {
    pub fn rounds(&self) -> usize {
        self.mean_cum_payoff.len()
    }

    pub fn final_mean_payoff(&self) -> f64 {
        self.mean_cum_payoff.last().copied().unwrap_or(0.0)
    }

    pub fn final_mean_regret(&self) -> f64 {
        self.mean_cum_regret.last().copied().unwrap_or(0.0)
    }

    pub fn final_std_payoff(&self) -> f64 {
        self.std_cum_payoff.last().copied().unwrap_or(0.0)
    }
}

/// Play one repetition to its effective horizon (N*k rounds for epoch
/// policies, T for per-round policies).
pub fn run_single(
    instance: &BanditInstance,
    config: &AlgoConfig,
    horizon: u64,
    rep: u32,
    root_seed: u64,
) -> Result<RunRecord> {
    let start = std::time::Instant::now();
    let mut policy = config.build(instance, horizon)?;
    let (_, opt_val) = instance.optimal_value()?;
    let pulls = policy.pulls_per_decision();
    let decisions = policy.num_decisions();
    let effective = (pulls * decisions) as usize;

    let mut arms = Vec::with_capacity(effective);
    let mut payoffs = Vec::with_capacity(effective);
    let mut cum_payoff = Vec::with_capacity(effective);
    let mut cum_regret = Vec::with_capacity(effective);
    let mut total_payoff = 0.0;
    let mut total_regret = 0.0;
    let mut round: u64 = 0;

    for _ in 0..decisions {
        let idx = policy.select(&instance.arms)?;
        let gap = opt_val - instance.mean_payoff(idx);
        let mut epoch_payoffs = Vec::with_capacity(pulls as usize);
        for _ in 0..pulls {
            let mut rng = seeding::round_rng(root_seed, rep as u64, round);
            let y = instance.sample_payoff(idx, &mut rng)?;
            arms.push(idx as u32);
            payoffs.push(y);
            total_payoff += y;
            total_regret += gap;
            cum_payoff.push(total_payoff);
            cum_regret.push(total_regret);
            epoch_payoffs.push(y);
            round += 1;
        }
        policy.update(&instance.arms[idx], &epoch_payoffs)?;
    }

    Ok(RunRecord {
        dataset: instance.dataset.clone(),
        algo: config.algo.as_str().to_string(),
        rep,
        seed: seeding::derive_seed(root_seed, rep as u64),
        arms,
        payoffs,
        cum_payoff,
        cum_regret,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Run `reps` independent repetitions in parallel, deterministically in
/// `root_seed`.
pub fn run_experiment(
    instance: &BanditInstance,
    config: &AlgoConfig,
    horizon: u64,
    reps: u32,
    root_seed: u64,
) -> Result<Vec<RunRecord>> {
    // fail fast on config errors before spawning work
    config.build(instance, horizon)?;
    (0..reps)
        .into_par_iter()
        .map(|rep| run_single(instance, config, horizon, rep, root_seed))
        .collect()
}

/// Pointwise mean and population std across records sharing one config.
pub fn aggregate(records: &[RunRecord]) -> Result<AggregateCurve> {
    let first = records
        .first()
        .ok_or_else(|| Error::invalid_input("no records to aggregate"))?;
    let rounds = first.rounds();
    for r in records {
        if r.dataset != first.dataset || r.algo != first.algo || r.rounds() != rounds {
            return Err(Error::invalid_input(
                "records mix datasets, algorithms or horizons",
            ));
        }
    }
    let n = records.len() as f64;
    let mut curve = AggregateCurve {
        dataset: first.dataset.clone(),
        algo: first.algo.clone(),
        reps: records.len() as u32,
        mean_cum_payoff: vec![0.0; rounds],
        std_cum_payoff: vec![0.0; rounds],
        mean_cum_regret: vec![0.0; rounds],
        std_cum_regret: vec![0.0; rounds],
    };
    for t in 0..rounds {
        let mut mp = 0.0;
        let mut mr = 0.0;
        for r in records {
            mp += r.cum_payoff[t];
            mr += r.cum_regret[t];
        }
        mp /= n;
        mr /= n;
        let mut vp = 0.0;
        let mut vr = 0.0;
        for r in records {
            vp += (r.cum_payoff[t] - mp).powi(2);
            vr += (r.cum_regret[t] - mr).powi(2);
        }
        curve.mean_cum_payoff[t] = mp;
        curve.mean_cum_regret[t] = mr;
        curve.std_cum_payoff[t] = (vp / n).sqrt();
        curve.std_cum_regret[t] = (vr / n).sqrt();
    }
    Ok(curve)
}
