use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{max_speed, SimConfig};
use super::io::{write_diagnostics, write_snapshot};
use super::step::step;
use crate::error::{Error, Result};
use crate::generic::{pair, State};
use crate::thermomech::Model;

/// One line of the diagnostics CSV; column order is fixed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    #[serde(rename = "E_total")]
    pub e_total: f64,
    #[serde(rename = "S_total")]
    pub s_total: f64,
    #[serde(rename = "E_drift_rel")]
    pub e_drift_rel: f64,
    #[serde(rename = "S_production_rate")]
    pub s_production_rate: f64,
    pub power_residual: f64,
    pub min_theta: f64,
    #[serde(rename = "min_detF")]
    pub min_det_f: f64,
    pub max_speed: f64,
}

pub fn diagnostics(model: &Model<f64>, q: &State<f64>, t: f64, e0: Option<f64>) -> Result<DiagnosticsRow> {
    let e = model.total_energy(q)?;
    let e0 = e0.unwrap_or(e);
    let (de, ds) = model.differentials(q)?;
    let r = model.rhs(q)?;
    let theta = model.temperature(q)?;
    let (v, _) = model.velocity_and_density(q)?;
    Ok(DiagnosticsRow {
        t,
        e_total: e,
        s_total: model.total_entropy(q)?,
        e_drift_rel: (e - e0) / e0.abs(),
        s_production_rate: pair(&ds, &r)?,
        power_residual: pair(&de, &r)?,
        min_theta: theta.data().iter().copied().fold(f64::INFINITY, f64::min),
        min_det_f: (0..q.grid().len()).map(|k| q.f.matrix_at(k).det()).fold(f64::INFINITY, f64::min),
        max_speed: max_speed(&v),
    })
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub final_state: State<f64>,
    pub final_time: f64,
    pub diagnostics: Vec<DiagnosticsRow>,
    /// sidecar paths, in write order
    pub snapshots: Vec<PathBuf>,
}

/// Integrates from the configured initial state. With `out` set, writes
/// `diagnostics.csv` and snapshots there. On a failed step the diagnostics
/// gathered so far and a snapshot of the last good state are still written.
pub fn run(config: &SimConfig, out: Option<&Path>) -> Result<RunOutput> {
    config.validate()?;
    let model = config.model;
    let q0 = config.initial_state()?;
    let hash = config.hash();
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let (n_steps, last_dt) = config.schedule();
    let mut q = q0;
    let mut t = 0.0;
    let first = diagnostics(&model, &q, t, None)?;
    let e0 = first.e_total;
    let mut rows = vec![first];
    let mut snaps = Vec::new();
    if let Some(dir) = out {
        snaps.push(write_snapshot(dir, 0, t, &q, &hash)?);
    }
    let every = config.output.snapshot_every;
    for i in 1..=n_steps {
        let dt = if i == n_steps { last_dt } else { config.dt };
        match step(&model, &q, dt, config.scheme) {
            Ok(next) => q = next,
            Err(source) => {
                if let Some(dir) = out {
                    write_diagnostics(&dir.join("diagnostics.csv"), &rows)?;
                    write_snapshot(dir, i - 1, t, &q, &hash)?;
                }
                return Err(Error::StepFailed {
                    t,
                    dt,
                    source: Box::new(source),
                });
            }
        }
        t = if i == n_steps { config.t_end } else { i as f64 * config.dt };
        rows.push(diagnostics(&model, &q, t, Some(e0))?);
        if let Some(dir) = out {
            if i == n_steps || (every > 0 && i % every == 0) {
                snaps.push(write_snapshot(dir, i, t, &q, &hash)?);
            }
        }
    }
    if let Some(dir) = out {
        write_diagnostics(&dir.join("diagnostics.csv"), &rows)?;
    }
    Ok(RunOutput {
        final_state: q,
        final_time: t,
        diagnostics: rows,
        snapshots: snaps,
    })
}
