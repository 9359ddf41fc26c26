use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field_calculus::{inner, Grid, Kind, TensorField};
use crate::scalar::Real;

/// What the fourth state variable τ means.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThermalRole {
    /// τ = s, entropy density
    Entropy,
    /// τ = e, internal energy density
    InternalEnergy,
}

/// q = (π, F, F_p, τ). Also used for tangent vectors δq, which need not be
/// physically admissible.
#[derive(Clone, Debug, PartialEq)]
pub struct State<T> {
    pub pi: TensorField<T>,
    pub f: TensorField<T>,
    pub fp: TensorField<T>,
    pub tau: TensorField<T>,
    pub role: ThermalRole,
}

/// ζ = (v, Ξ_e, Ξ_p, κ), dual to a state direction.
#[derive(Clone, Debug, PartialEq)]
pub struct CotState<T> {
    pub v: TensorField<T>,
    pub xi_e: TensorField<T>,
    pub xi_p: TensorField<T>,
    pub kappa: TensorField<T>,
}

/// Galilean-invariant driving forces η = (η_m, η_p, η_t).
#[derive(Clone, Debug, PartialEq)]
pub struct EtaForces<T> {
    /// symmetric
    pub eta_m: TensorField<T>,
    pub eta_p: TensorField<T>,
    pub eta_t: TensorField<T>,
}

fn check_block<T: Real>(what: &str, f: &TensorField<T>, kind: Kind, grid: &Grid<T>) -> Result<()> {
    grid.ensure_same(f.grid())?;
    if f.kind() != kind {
        return Err(Error::ShapeMismatch(format!(
            "{what} must be {kind:?}, got {:?}",
            f.kind()
        )));
    }
    Ok(())
}

impl<T: Real> State<T> {
    pub fn new(
        pi: TensorField<T>,
        f: TensorField<T>,
        fp: TensorField<T>,
        tau: TensorField<T>,
        role: ThermalRole,
    ) -> Result<Self> {
        let g = *pi.grid();
        check_block("π", &pi, Kind::Momentum, &g)?;
        check_block("F", &f, Kind::TwoPoint, &g)?;
        check_block("F_p", &fp, Kind::IntensiveMatrix, &g)?;
        check_block("τ", &tau, Kind::ExtensiveScalar, &g)?;
        Ok(State {
            pi,
            f,
            fp,
            tau,
            role,
        })
    }

    pub fn zeros(grid: Grid<T>, role: ThermalRole) -> Self {
        State {
            pi: TensorField::zeros(grid, Kind::Momentum),
            f: TensorField::zeros(grid, Kind::TwoPoint),
            fp: TensorField::zeros(grid, Kind::IntensiveMatrix),
            tau: TensorField::zeros(grid, Kind::ExtensiveScalar),
            role,
        }
    }

    pub fn grid(&self) -> &Grid<T> {
        self.pi.grid()
    }

    fn zip(&self, o: &Self, f: impl Fn(&TensorField<T>, &TensorField<T>) -> Result<TensorField<T>>) -> Result<Self> {
        Ok(State {
            pi: f(&self.pi, &o.pi)?,
            f: f(&self.f, &o.f)?,
            fp: f(&self.fp, &o.fp)?,
            tau: f(&self.tau, &o.tau)?,
            role: self.role,
        })
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a.sub(b))
    }

    /// self + alpha · o
    pub fn axpy(&self, alpha: T, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a.axpy(alpha, b))
    }

    pub fn scale(&self, alpha: T) -> Self {
        State {
            pi: self.pi.scale(alpha),
            f: self.f.scale(alpha),
            fp: self.fp.scale(alpha),
            tau: self.tau.scale(alpha),
            role: self.role,
        }
    }

    pub fn blocks(&self) -> [&TensorField<T>; 4] {
        [&self.pi, &self.f, &self.fp, &self.tau]
    }

    /// sqrt of the sum of squared block L² norms
    pub fn l2_norm(&self) -> T {
        self.blocks()
            .iter()
            .map(|b| b.l2_norm().powi(2))
            .sum::<T>()
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.blocks().iter().fold(T::zero(), |m, b| m.max(b.max_abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.blocks().iter().all(|b| b.is_finite())
    }

    /// det F > 0 and det F_p > 0 at every node, all samples finite.
    pub fn check_admissible(&self) -> Result<()> {
        for (what, b) in [("π", &self.pi), ("F", &self.f), ("F_p", &self.fp), ("τ", &self.tau)] {
            if let Some(i) = b.data().iter().position(|x| !x.is_finite()) {
                return Err(Error::InvalidState {
                    what: match what {
                        "π" => "non-finite momentum",
                        "F" => "non-finite F",
                        "F_p" => "non-finite F_p",
                        _ => "non-finite tau",
                    },
                    node: i % self.grid().len(),
                    value: b.data()[i].to_f64_lossy(),
                });
            }
        }
        for node in 0..self.grid().len() {
            let df = self.f.matrix_at(node).det();
            if !(df > T::zero()) {
                return Err(Error::InvalidState {
                    what: "det F <= 0",
                    node,
                    value: df.to_f64_lossy(),
                });
            }
            let dp = self.fp.matrix_at(node).det();
            if !(dp > T::zero()) {
                return Err(Error::InvalidState {
                    what: "det F_p <= 0",
                    node,
                    value: dp.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }
}

impl<T: Real> CotState<T> {
    pub fn new(v: TensorField<T>, xi_e: TensorField<T>, xi_p: TensorField<T>, kappa: TensorField<T>) -> Result<Self> {
        let g = *v.grid();
        check_block("v", &v, Kind::Vector, &g)?;
        check_block("Ξ_e", &xi_e, Kind::TwoPoint, &g)?;
        check_block("Ξ_p", &xi_p, Kind::IntensiveMatrix, &g)?;
        check_block("κ", &kappa, Kind::IntensiveScalar, &g)?;
        Ok(CotState { v, xi_e, xi_p, kappa })
    }

    pub fn zeros(grid: Grid<T>) -> Self {
        CotState {
            v: TensorField::zeros(grid, Kind::Vector),
            xi_e: TensorField::zeros(grid, Kind::TwoPoint),
            xi_p: TensorField::zeros(grid, Kind::IntensiveMatrix),
            kappa: TensorField::zeros(grid, Kind::IntensiveScalar),
        }
    }

    /// (0, 0, 0, 1)
    pub fn e_tau(grid: Grid<T>) -> Self {
        let mut z = Self::zeros(grid);
        z.kappa = TensorField::constant(grid, Kind::IntensiveScalar, &[T::one()]).expect("finite");
        z
    }

    pub fn grid(&self) -> &Grid<T> {
        self.v.grid()
    }

    pub fn blocks(&self) -> [&TensorField<T>; 4] {
        [&self.v, &self.xi_e, &self.xi_p, &self.kappa]
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Ok(CotState {
            v: self.v.add(&o.v)?,
            xi_e: self.xi_e.add(&o.xi_e)?,
            xi_p: self.xi_p.add(&o.xi_p)?,
            kappa: self.kappa.add(&o.kappa)?,
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        Ok(CotState {
            v: self.v.sub(&o.v)?,
            xi_e: self.xi_e.sub(&o.xi_e)?,
            xi_p: self.xi_p.sub(&o.xi_p)?,
            kappa: self.kappa.sub(&o.kappa)?,
        })
    }

    pub fn scale(&self, alpha: T) -> Self {
        CotState {
            v: self.v.scale(alpha),
            xi_e: self.xi_e.scale(alpha),
            xi_p: self.xi_p.scale(alpha),
            kappa: self.kappa.scale(alpha),
        }
    }

    pub fn l2_norm(&self) -> T {
        self.blocks()
            .iter()
            .map(|b| b.l2_norm().powi(2))
            .sum::<T>()
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.blocks().iter().fold(T::zero(), |m, b| m.max(b.max_abs()))
    }
}

impl<T: Real> EtaForces<T> {
    pub fn zeros(grid: Grid<T>) -> Self {
        EtaForces {
            eta_m: TensorField::zeros(grid, Kind::OpVC),
            eta_p: TensorField::zeros(grid, Kind::IntensiveMatrix),
            eta_t: TensorField::zeros(grid, Kind::IntensiveScalar),
        }
    }

    pub fn scale(&self, alpha: T) -> Self {
        EtaForces {
            eta_m: self.eta_m.scale(alpha),
            eta_p: self.eta_p.scale(alpha),
            eta_t: self.eta_t.scale(alpha),
        }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        Ok(EtaForces {
            eta_m: self.eta_m.sub(&o.eta_m)?,
            eta_p: self.eta_p.sub(&o.eta_p)?,
            eta_t: self.eta_t.sub(&o.eta_t)?,
        })
    }

    pub fn max_abs(&self) -> T {
        [&self.eta_m, &self.eta_p, &self.eta_t]
            .iter()
            .fold(T::zero(), |m, b| m.max(b.max_abs()))
    }

    pub fn l2_norm(&self) -> T {
        [&self.eta_m, &self.eta_p, &self.eta_t]
            .iter()
            .map(|b| b.l2_norm().powi(2))
            .sum::<T>()
            .sqrt()
    }
}

/// ⟨ζ, δq⟩: block-wise rectangle-rule pairings, summed.
pub fn pair<T: Real>(zeta: &CotState<T>, dq: &State<T>) -> Result<T> {
    Ok(inner(&zeta.v, &dq.pi)?
        + inner(&zeta.xi_e, &dq.f)?
        + inner(&zeta.xi_p, &dq.fp)?
        + inner(&zeta.kappa, &dq.tau)?)
}

/// ⟨η₁, η₂⟩ on driving forces.
pub fn pair_eta<T: Real>(a: &EtaForces<T>, b: &EtaForces<T>) -> Result<T> {
    Ok(inner(&a.eta_m, &b.eta_m)? + inner(&a.eta_p, &b.eta_p)? + inner(&a.eta_t, &b.eta_t)?)
}
