//! CSV export/import for run trajectories and aggregate curves. Floats are
//! written with 17 significant digits so a read-back is bit-exact.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::{AggregateCurve, RunRecord};

pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Per-round trajectories, one row per (rep, round).
pub fn write_runs_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    write_runs(&mut w, records)?;
    w.flush()?;
    Ok(())
}

/// Same rows as `write_runs_csv`, returned as a string.
pub fn runs_csv_string(records: &[RunRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_runs(&mut buf, records)?;
    String::from_utf8(buf).map_err(|e| Error::internal(format!("non-UTF8 CSV: {e}")))
}

fn write_runs<W: Write>(mut w: W, records: &[RunRecord]) -> Result<()> {
    writeln!(w, "dataset,algo,rep,seed,t,arm,payoff,cum_payoff,cum_regret")?;
    for r in records {
        for t in 0..r.rounds() {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                r.dataset,
                r.algo,
                r.rep,
                r.seed,
                t + 1,
                r.arms[t],
                fmt_f64(r.payoffs[t]),
                fmt_f64(r.cum_payoff[t]),
                fmt_f64(r.cum_regret[t]),
            )?;
        }
    }
    Ok(())
}

/// Aggregate curves, one row per (dataset, algo, round).
pub fn write_aggregate_csv(path: &Path, curves: &[AggregateCurve]) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        w,
        "dataset,algo,t,mean_cum_payoff,std_cum_payoff,mean_cum_regret,std_cum_regret,reps"
    )?;
    for c in curves {
        for t in 0..c.rounds() {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                c.dataset,
                c.algo,
                t + 1,
                fmt_f64(c.mean_cum_payoff[t]),
                fmt_f64(c.std_cum_payoff[t]),
                fmt_f64(c.mean_cum_regret[t]),
                fmt_f64(c.std_cum_regret[t]),
                c.reps,
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read back aggregate curves, grouped by (dataset, algo) in file order.
pub fn read_aggregate_csv(path: &Path) -> Result<Vec<AggregateCurve>> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::invalid_input("empty aggregate CSV"))??;
    if header.trim()
        != "dataset,algo,t,mean_cum_payoff,std_cum_payoff,mean_cum_regret,std_cum_regret,reps"
    {
        return Err(Error::invalid_input(format!(
            "unexpected aggregate CSV header: {header}"
        )));
    }
    let mut order: Vec<(String, String)> = Vec::new();
    let mut curves: BTreeMap<(String, String), AggregateCurve> = BTreeMap::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::invalid_input(format!(
                "aggregate CSV row {} has {} fields, expected 8",
                lineno + 2,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| Error::invalid_input(format!("bad float {s:?}: {e}")))
        };
        let key = (fields[0].to_string(), fields[1].to_string());
        let t: usize = fields[2]
            .parse()
            .map_err(|e| Error::invalid_input(format!("bad round index: {e}")))?;
        let reps: u32 = fields[7]
            .parse()
            .map_err(|e| Error::invalid_input(format!("bad reps count: {e}")))?;
        let entry = curves.entry(key.clone()).or_insert_with(|| {
            order.push(key.clone());
            AggregateCurve {
                dataset: key.0.clone(),
                algo: key.1.clone(),
                reps,
                mean_cum_payoff: Vec::new(),
                std_cum_payoff: Vec::new(),
                mean_cum_regret: Vec::new(),
                std_cum_regret: Vec::new(),
            }
        });
        if t != entry.rounds() + 1 {
            return Err(Error::invalid_input(format!(
                "non-contiguous round index {t} for {}/{}",
                entry.dataset, entry.algo
            )));
        }
        entry.mean_cum_payoff.push(parse(fields[3])?);
        entry.std_cum_payoff.push(parse(fields[4])?);
        entry.mean_cum_regret.push(parse(fields[5])?);
        entry.std_cum_regret.push(parse(fields[6])?);
    }
    Ok(order
        .into_iter()
        .map(|k| curves.remove(&k).unwrap())
        .collect())
}
