use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::material::{DissipationSpec, MaterialModel, PointEval};
use crate::error::{Error, Result};
use crate::field_calculus::{d_axis, div_components, dot, sample_field, Grid, Kind, Mat, Preset, TensorField};
use crate::generic::{CotState, EtaForces, Functionals, State, ThermalRole};
use crate::scalar::Real;

/// Material plus dissipation: the complete constitutive description.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct Model<T> {
    pub material: MaterialModel<T>,
    pub dissipation: DissipationSpec<T>,
}

impl<T: Real> Default for Model<T> {
    fn default() -> Self {
        Model {
            material: MaterialModel::default(),
            dissipation: DissipationSpec::default(),
        }
    }
}

/// Stresses and thermodynamic fields at a state.
#[derive(Clone, Debug)]
pub struct Stresses<T> {
    /// Σ_e^F, two-point
    pub sigma_e: TensorField<T>,
    /// Σ_p^F
    pub sigma_p: TensorField<T>,
    /// Σ_e^F F* + ΨI
    pub cauchy: TensorField<T>,
    pub theta: TensorField<T>,
    pub psi: TensorField<T>,
}

pub(crate) fn matrix_field<T: Real>(g: Grid<T>, kind: Kind, f: impl Fn(usize) -> Mat<T> + Sync) -> TensorField<T> {
    TensorField::from_matrices(g, kind, f)
}

pub(crate) fn scalar_field<T: Real>(g: Grid<T>, kind: Kind, f: impl Fn(usize) -> T + Sync) -> TensorField<T> {
    TensorField::from_raw(g, kind, (0..g.len()).into_par_iter().map(&f).collect())
}

impl<T: Real> Model<T> {
    pub fn new(material: MaterialModel<T>, dissipation: DissipationSpec<T>) -> Result<Self> {
        material.validate()?;
        dissipation.validate()?;
        Ok(Model { material, dissipation })
    }

    /// Same material with every dissipation coefficient zero.
    pub fn conservative(&self) -> Self {
        Model {
            material: self.material,
            dissipation: DissipationSpec::none(),
        }
    }

    /// Pointwise constitutive evaluation; the first failing node (in node order) is reported.
    pub fn points(&self, q: &State<T>) -> Result<Vec<PointEval<T>>> {
        let n = q.grid().len();
        let res: Vec<Result<PointEval<T>>> = (0..n)
            .into_par_iter()
            .map(|k| self.material.eval(k, &q.f.matrix_at(k), &q.fp.matrix_at(k), q.tau.data()[k], q.role))
            .collect();
        res.into_iter().collect()
    }

    /// (v, ρ) with ρ = ρ_ref / det F and v = π/ρ.
    pub fn velocity_and_density(&self, q: &State<T>) -> Result<(TensorField<T>, TensorField<T>)> {
        let g = *q.grid();
        let n = g.len();
        let dets: Vec<T> = (0..n).into_par_iter().map(|k| q.f.matrix_at(k).det()).collect();
        if let Some(k) = dets.iter().position(|&j| !(j > T::zero())) {
            return Err(Error::InvalidState {
                what: "det F <= 0",
                node: k,
                value: dets[k].to_f64_lossy(),
            });
        }
        let rho: Vec<T> = dets.iter().map(|&j| self.material.rho_ref / j).collect();
        let d = g.dim();
        let mut v = Vec::with_capacity(d * n);
        for i in 0..d {
            v.extend(q.pi.component(i).iter().zip(&rho).map(|(&p, &r)| p / r));
        }
        Ok((
            TensorField::from_raw(g, Kind::Vector, v),
            TensorField::from_raw(g, Kind::ExtensiveScalar, rho),
        ))
    }

    pub fn temperature(&self, q: &State<T>) -> Result<TensorField<T>> {
        let pts = self.points(q)?;
        Ok(scalar_field(*q.grid(), Kind::IntensiveScalar, |k| pts[k].theta))
    }

    /// Pointwise |π|²/(2ρ) + E(F, F_p, τ).
    pub fn energy_density(&self, q: &State<T>) -> Result<TensorField<T>> {
        let pts = self.points(q)?;
        let (v, rho) = self.velocity_and_density(q)?;
        let d = q.grid().dim();
        let half = T::lit(0.5);
        Ok(scalar_field(*q.grid(), Kind::ExtensiveScalar, |k| {
            let mut v2 = T::zero();
            for i in 0..d {
                v2 += v.component(i)[k] * v.component(i)[k];
            }
            half * rho.data()[k] * v2 + pts[k].e
        }))
    }

    pub fn total_energy(&self, q: &State<T>) -> Result<T> {
        let e = self.energy_density(q)?;
        Ok(q.grid().cell_volume() * e.data().iter().copied().sum::<T>())
    }

    pub fn total_entropy(&self, q: &State<T>) -> Result<T> {
        let s = self.entropy_density(q)?;
        Ok(q.grid().cell_volume() * s.data().iter().copied().sum::<T>())
    }

    fn de_from(&self, q: &State<T>, pts: &[PointEval<T>]) -> Result<CotState<T>> {
        let g = *q.grid();
        let d = g.dim();
        let (v, rho) = self.velocity_and_density(q)?;
        let half = T::lit(0.5);
        // kinetic part: ∂_F (det F |π|²/(2ρ_ref)) = (ρ|v|²/2) F^{-T}
        let xi_e = matrix_field(g, Kind::TwoPoint, |k| {
            let mut v2 = T::zero();
            for i in 0..d {
                v2 += v.component(i)[k] * v.component(i)[k];
            }
            let kin = half * rho.data()[k] * v2;
            let finv_t = q.f.matrix_at(k).inverse().expect("det F > 0 checked").transpose();
            pts[k].de_f + finv_t.scale(kin)
        });
        Ok(CotState {
            v,
            xi_e,
            xi_p: matrix_field(g, Kind::IntensiveMatrix, |k| pts[k].de_fp),
            kappa: scalar_field(g, Kind::IntensiveScalar, |k| pts[k].de_tau),
        })
    }

    fn ds_from(&self, q: &State<T>, pts: &[PointEval<T>]) -> CotState<T> {
        let g = *q.grid();
        CotState {
            v: TensorField::zeros(g, Kind::Vector),
            xi_e: matrix_field(g, Kind::TwoPoint, |k| pts[k].ds_f),
            xi_p: matrix_field(g, Kind::IntensiveMatrix, |k| pts[k].ds_fp),
            kappa: scalar_field(g, Kind::IntensiveScalar, |k| pts[k].ds_tau),
        }
    }

    /// (DE, DS)
    pub fn differentials(&self, q: &State<T>) -> Result<(CotState<T>, CotState<T>)> {
        let pts = self.points(q)?;
        Ok((self.de_from(q, &pts)?, self.ds_from(q, &pts)))
    }

    pub fn stresses(&self, q: &State<T>) -> Result<Stresses<T>> {
        let pts = self.points(q)?;
        let g = *q.grid();
        let d = g.dim();
        Ok(Stresses {
            sigma_e: matrix_field(g, Kind::TwoPoint, |k| pts[k].sigma_e()),
            sigma_p: matrix_field(g, Kind::IntensiveMatrix, |k| pts[k].sigma_p()),
            cauchy: matrix_field(g, Kind::OpCV, |k| {
                pts[k].sigma_e() * q.f.matrix_at(k).transpose() + Mat::identity(d).scale(pts[k].free_energy())
            }),
            theta: scalar_field(g, Kind::IntensiveScalar, |k| pts[k].theta),
            psi: scalar_field(g, Kind::ExtensiveScalar, |k| pts[k].free_energy()),
        })
    }

    /// max over nodes of the asymmetry of ∂_FE F* and ∂_FS F*.
    pub fn frame_residuals(&self, q: &State<T>) -> Result<T> {
        let pts = self.points(q)?;
        Ok((0..q.grid().len())
            .map(|k| {
                let ft = q.f.matrix_at(k).transpose();
                (pts[k].de_f * ft).asymmetry().max((pts[k].ds_f * ft).asymmetry())
            })
            .fold(T::zero(), T::max))
    }

    /// The same physical state expressed with the other thermal variable.
    pub fn convert_role(&self, q: &State<T>, role: ThermalRole) -> Result<State<T>> {
        if role == q.role {
            return Ok(q.clone());
        }
        let pts = self.points(q)?;
        let tau = scalar_field(*q.grid(), Kind::ExtensiveScalar, |k| match role {
            ThermalRole::Entropy => pts[k].s,
            ThermalRole::InternalEnergy => pts[k].e,
        });
        Ok(State {
            pi: q.pi.clone(),
            f: q.f.clone(),
            fp: q.fp.clone(),
            tau,
            role,
        })
    }

    /// π = 0, F = F_p = I and uniform temperature θ.
    pub fn rest_state(&self, grid: Grid<T>, role: ThermalRole, theta: T) -> Result<State<T>> {
        let m = &self.material;
        let s = m.c_v * (theta / m.theta_ref).ln();
        let id = Mat::identity(grid.dim());
        let tau = m.convert_tau(0, &id, &id, s, ThermalRole::Entropy, role)?;
        State::new(
            TensorField::zeros(grid, Kind::Momentum),
            TensorField::identity(grid, Kind::TwoPoint)?,
            TensorField::identity(grid, Kind::IntensiveMatrix)?,
            TensorField::constant(grid, Kind::ExtensiveScalar, &[tau])?,
            role,
        )
    }

    /// A smooth admissible state near the rest state at temperature θ_ref:
    /// band-limited random perturbations of relative size `amplitude` in every
    /// field, built in the entropy variable and converted to `role`.
    pub fn smooth_state(&self, grid: Grid<T>, seed: u64, amplitude: T, role: ThermalRole) -> Result<State<T>> {
        let pert = |kind: Kind, k: u64| -> Result<TensorField<T>> {
            sample_field(
                grid,
                kind,
                &Preset::FourierRandom {
                    seed: Some(seed.wrapping_mul(4).wrapping_add(k)),
                    max_mode: 1,
                    amplitude: amplitude.to_f64_lossy(),
                },
            )
        };
        let rest = self.rest_state(grid, ThermalRole::Entropy, self.material.theta_ref)?;
        let q = State::new(
            pert(Kind::Momentum, 0)?.scale(self.material.rho_ref),
            rest.f.add(&pert(Kind::TwoPoint, 1)?.scale(T::lit(0.2)))?,
            rest.fp.add(&pert(Kind::IntensiveMatrix, 2)?.scale(T::lit(0.1)))?,
            rest.tau.add(&pert(Kind::ExtensiveScalar, 3)?.scale(self.material.c_v * T::lit(0.5)))?,
            ThermalRole::Entropy,
        )?;
        q.check_admissible()?;
        self.convert_role(&q, role)
    }

    fn heat_flux(&self, eta_t: &TensorField<T>, pts: &[PointEval<T>]) -> Vec<Vec<T>> {
        let g = *eta_t.grid();
        let kappa = self.dissipation.kappa_heat;
        (0..g.dim())
            .map(|i| {
                let mut gi = d_axis(&g, eta_t.data(), i);
                gi.par_iter_mut()
                    .enumerate()
                    .for_each(|(k, x)| *x *= kappa * pts[k].theta * pts[k].theta);
                gi
            })
            .collect()
    }
}

impl<T: Real> Functionals<T> for Model<T> {
    fn energy_differential(&self, q: &State<T>) -> Result<CotState<T>> {
        let pts = self.points(q)?;
        self.de_from(q, &pts)
    }

    fn entropy_differential(&self, q: &State<T>) -> Result<CotState<T>> {
        let pts = self.points(q)?;
        Ok(self.ds_from(q, &pts))
    }

    fn entropy_density(&self, q: &State<T>) -> Result<TensorField<T>> {
        let pts = self.points(q)?;
        Ok(scalar_field(*q.grid(), Kind::ExtensiveScalar, |k| pts[k].s))
    }

    /// ∫ Θ/2 η_m:𝔻η_m + |ΘF_p*η_p|²/(2ν_p) + ½∇η_t·𝕂∇η_t with 𝕂 = κΘ²I.
    fn dual_dissipation(&self, q: &State<T>, eta: &EtaForces<T>) -> Result<T> {
        let pts = self.points(q)?;
        let g = *q.grid();
        let dis = &self.dissipation;
        let half = T::lit(0.5);
        let dens: Vec<T> = (0..g.len())
            .into_par_iter()
            .map(|k| {
                let th = pts[k].theta;
                let em = eta.eta_m.matrix_at(k);
                let mut r = half * th * em.ddot(&dis.viscous(&em));
                if dis.nu_p > T::zero() {
                    let xi = (q.fp.matrix_at(k).transpose() * eta.eta_p.matrix_at(k)).scale(th);
                    r += xi.norm_sq() / (T::lit(2.0) * dis.nu_p);
                }
                r
            })
            .collect();
        let mut heat = T::zero();
        if dis.kappa_heat > T::zero() {
            let flux = self.heat_flux(&eta.eta_t, &pts);
            for (i, fi) in flux.iter().enumerate() {
                heat += dot(fi, &d_axis(&g, eta.eta_t.data(), i));
            }
        }
        Ok(g.cell_volume() * (dens.iter().copied().sum::<T>() + half * heat))
    }

    fn dual_dissipation_gradient(&self, q: &State<T>, eta: &EtaForces<T>) -> Result<EtaForces<T>> {
        let pts = self.points(q)?;
        let g = *q.grid();
        let dis = &self.dissipation;
        let eta_m = matrix_field(g, Kind::OpVC, |k| dis.viscous(&eta.eta_m.matrix_at(k)).scale(pts[k].theta));
        let eta_p = if dis.nu_p > T::zero() {
            matrix_field(g, Kind::IntensiveMatrix, |k| {
                let fp = q.fp.matrix_at(k);
                let th = pts[k].theta;
                (fp * fp.transpose() * eta.eta_p.matrix_at(k)).scale(th * th / dis.nu_p)
            })
        } else {
            TensorField::zeros(g, Kind::IntensiveMatrix)
        };
        let eta_t = if dis.kappa_heat > T::zero() {
            let flux = self.heat_flux(&eta.eta_t, &pts);
            let div = div_components(&g, flux.iter().map(|f| f.as_slice()));
            TensorField::from_raw(g, Kind::IntensiveScalar, div.into_iter().map(|x| -x).collect())
        } else {
            TensorField::zeros(g, Kind::IntensiveScalar)
        };
        Ok(EtaForces { eta_m, eta_p, eta_t })
    }
}
