use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field_calculus::{sample_sum, Grid, Kind, Preset, TensorField};
use crate::generic::{State, ThermalRole};
use crate::thermomech::Model;

/// Time integrator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Euler,
    #[default]
    Rk4,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
    #[serde(default = "two_pi")]
    pub length: f64,
}

fn two_pi() -> f64 {
    std::f64::consts::TAU
}

/// Initial data as perturbations of the rest state: v = Σ presets,
/// F = I + Σ, F_p = I + Σ, θ = θ_ref + Σ. The thermal variable τ is derived
/// from θ for the configured role, and π = ρv.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialConditions {
    pub velocity: Vec<Preset>,
    pub deformation: Vec<Preset>,
    pub plastic: Vec<Preset>,
    pub temperature: Vec<Preset>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    /// snapshot every this many steps (the initial and final states are always written); 0 = only those two
    pub snapshot_every: usize,
    /// overridden by the command line
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub grid: GridSpec,
    #[serde(default)]
    pub model: Model<f64>,
    #[serde(default = "entropy")]
    pub role: ThermalRole,
    #[serde(default)]
    pub initial: InitialConditions,
    pub t_end: f64,
    pub dt: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub seed: u64,
}

fn entropy() -> ThermalRole {
    ThermalRole::Entropy
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: SimConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::Config(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        self.make_grid()?;
        self.model.material.validate()?;
        self.model.dissipation.validate()?;
        Ok(())
    }

    pub fn make_grid(&self) -> Result<Grid<f64>> {
        Grid::new(self.grid.dim, self.grid.n, self.grid.length).map_err(|e| Error::Config(e.to_string()))
    }

    /// Number of steps and the size of the last one (shortened to land on t_end).
    pub fn schedule(&self) -> (usize, f64) {
        let ratio = self.t_end / self.dt;
        let whole = ratio.round();
        if (ratio - whole).abs() <= 1e-9 * ratio.max(1.0) {
            (whole as usize, self.dt)
        } else {
            let n = ratio.ceil() as usize;
            (n, self.t_end - (n - 1) as f64 * self.dt)
        }
    }

    /// SHA-256 of the canonical JSON serialization, hex encoded.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(canon.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn initial_state(&self) -> Result<State<f64>> {
        let g = self.make_grid()?;
        let m = &self.model;
        let field = |kind: Kind, presets: &[Preset], k: u64| -> Result<TensorField<f64>> {
            sample_sum(g, kind, presets, self.seed.wrapping_mul(4).wrapping_add(k))
                .map_err(|e| Error::Config(format!("initial condition: {e}")))
        };
        let v = field(Kind::Vector, &self.initial.velocity, 0)?;
        let f = TensorField::identity(g, Kind::TwoPoint)?.add(&field(Kind::TwoPoint, &self.initial.deformation, 1)?)?;
        let fp = TensorField::identity(g, Kind::IntensiveMatrix)?.add(&field(Kind::IntensiveMatrix, &self.initial.plastic, 2)?)?;
        let theta = field(Kind::IntensiveScalar, &self.initial.temperature, 3)?.map(|x| x + m.material.theta_ref);
        if let Some(k) = theta.data().iter().position(|&t| !(t > 0.0)) {
            return Err(Error::Config(format!("initial temperature {} <= 0 at node {k}", theta.data()[k])));
        }
        let mut q = State::new(
            TensorField::zeros(g, Kind::Momentum),
            f,
            fp,
            TensorField::zeros(g, Kind::ExtensiveScalar),
            ThermalRole::Entropy,
        )?;
        q.check_admissible()?;
        let (_, rho) = m.velocity_and_density(&q)?;
        q.pi = v.scaled_by(&rho.retag(Kind::IntensiveScalar))?.retag(Kind::Momentum);
        let mat = &m.material;
        q.tau = TensorField::from_raw(
            g,
            Kind::ExtensiveScalar,
            theta.data().iter().map(|&t| mat.c_v * (t / mat.theta_ref).ln()).collect(),
        );
        let q = m.convert_role(&q, self.role)?;
        m.points(&q)?;
        Ok(q)
    }

    /// Advisory explicit step bound from the elastic wave speed and the viscosity.
    pub fn advisory_dt(&self, q: &State<f64>) -> Result<f64> {
        let g = q.grid();
        let h = g.spacing();
        let (v, rho) = self.model.velocity_and_density(q)?;
        let rho_min = rho.data().iter().copied().fold(f64::INFINITY, f64::min);
        let vmax = max_speed(&v);
        let mat = &self.model.material;
        let c = ((mat.lambda + 2.0 * mat.mu) / rho_min).sqrt();
        // centered differences over 2h; classical RK4 is stable up to |λ dt| ≈ 2.8 on the imaginary axis
        let wave = 2.8 * h / (c + vmax);
        let dis = &self.model.dissipation;
        let nu = ((2.0 * dis.mu_v + dis.lambda_v) / rho_min).max(dis.kappa_heat / mat.c_v);
        let visc = if nu > 0.0 { 2.0 * h * h / (nu * g.dim() as f64) } else { f64::INFINITY };
        Ok(wave.min(visc))
    }
}

pub(crate) fn max_speed(v: &TensorField<f64>) -> f64 {
    let d = v.dim();
    (0..v.grid().len())
        .map(|k| (0..d).map(|i| v.component(i)[k].powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

