use rayon::prelude::*;

use super::model::{matrix_field, scalar_field, Model};
use crate::error::{Error, Result};
use crate::field_calculus::{d_axis, diff_op, div_components, strain_rate, DiffMode, Kind, TensorField};
use crate::generic::{j_apply, ne_apply, ne_star_apply, Functionals, State};
use crate::lie::lie_derivative;
use crate::scalar::Real;

/// The three named pieces of the τ-equation.
#[derive(Clone, Debug)]
pub struct ScalarRates<T> {
    /// −v·∇τ − (S div v + ∂_FS F*:D(v))/∂_τS
    pub j_ham_s: TensorField<T>,
    /// (D:𝔻D − (F_pL):∂_{F_p}E)/∂_τE
    pub j_diss_e: TensorField<T>,
    /// −div(𝕂∇(1/Θ))/∂_τE
    pub heat: TensorField<T>,
}

/// Σ_j D_j v_j (D_j applied to a scalar array, v_j pointwise)
fn advect_scalar<T: Real>(v: &TensorField<T>, a: &[T]) -> Vec<T> {
    let g = *v.grid();
    let mut out = vec![T::zero(); g.len()];
    for j in 0..g.dim() {
        let da = d_axis(&g, a, j);
        let vj = v.component(j);
        out.par_iter_mut().enumerate().for_each(|(k, o)| *o += vj[k] * da[k]);
    }
    out
}

impl<T: Real> Model<T> {
    /// V_Ham = J(q)DE(q), the canonical (energy-conserving) form.
    pub fn v_ham(&self, q: &State<T>) -> Result<State<T>> {
        let de = self.energy_differential(q)?;
        j_apply(self, q, &de)
    }

    /// V_Ham evaluated from its simplified closed form; equal to `v_ham` up to
    /// discretization error.
    pub fn v_ham_closed(&self, q: &State<T>) -> Result<State<T>> {
        let g = *q.grid();
        let d = g.dim();
        let n = g.len();
        let pts = self.points(q)?;
        let (v, rho) = self.velocity_and_density(q)?;
        let st = self.stresses(q)?;
        let mut pi = Vec::with_capacity(d * n);
        for i in 0..d {
            let flux: Vec<Vec<T>> = (0..d)
                .map(|j| {
                    (0..n)
                        .map(|k| {
                            st.cauchy.component(i * d + j)[k]
                                - rho.data()[k] * v.component(i)[k] * v.component(j)[k]
                        })
                        .collect()
                })
                .collect();
            pi.extend(div_components(&g, flux.iter().map(|f| f.as_slice())));
        }
        let dv = strain_rate(&v)?;
        let divv = diff_op(&v, DiffMode::DivVector)?;
        let adv = advect_scalar(&v, q.tau.data());
        let tau = scalar_field(g, Kind::ExtensiveScalar, |k| {
            let p = &pts[k];
            let sf = p.ds_f * q.f.matrix_at(k).transpose();
            -adv[k] - (p.s * divv.data()[k] + sf.ddot(&dv.matrix_at(k))) / p.ds_tau
        });
        Ok(State {
            pi: TensorField::from_raw(g, Kind::Momentum, pi),
            f: lie_derivative(&v, &q.f, Some(Kind::TwoPoint))?.neg(),
            fp: lie_derivative(&v, &q.fp, Some(Kind::IntensiveMatrix))?.neg(),
            tau,
            role: q.role,
        })
    }

    /// L_vi.pl = −(Θ/ν_p) F_p* Σ_p^F; zero when plasticity is off.
    pub fn plastic_rate(&self, q: &State<T>) -> Result<TensorField<T>> {
        let g = *q.grid();
        let nu = self.dissipation.nu_p;
        if !(nu > T::zero()) {
            return Ok(TensorField::zeros(g, Kind::IntensiveMatrix));
        }
        let pts = self.points(q)?;
        Ok(matrix_field(g, Kind::IntensiveMatrix, |k| {
            (q.fp.matrix_at(k).transpose() * pts[k].sigma_p()).scale(-pts[k].theta / nu)
        }))
    }

    /// V_diss = N_E ∂_ηR*_simple(q, N_E*DS(q)), the canonical form.
    pub fn v_diss(&self, q: &State<T>) -> Result<State<T>> {
        if self.dissipation.is_none() {
            return Ok(State::zeros(*q.grid(), q.role));
        }
        let ds = self.entropy_differential(q)?;
        let eta = ne_star_apply(self, q, &ds)?;
        let force = self.dual_dissipation_gradient(q, &eta)?;
        ne_apply(self, q, &force)
    }

    /// V_diss from its closed form, with the heat flux written in the
    /// classical Fourier form κ∇θ.
    pub fn v_diss_closed(&self, q: &State<T>) -> Result<State<T>> {
        let g = *q.grid();
        let pts = self.points(q)?;
        let (v, _) = self.velocity_and_density(q)?;
        let dv = strain_rate(&v)?;
        let dis = &self.dissipation;
        let visc = matrix_field(g, Kind::OpVC, |k| dis.viscous(&dv.matrix_at(k)));
        let lp = self.plastic_rate(q)?;
        let fpl = matrix_field(g, Kind::IntensiveMatrix, |k| q.fp.matrix_at(k) * lp.matrix_at(k));
        let theta: Vec<T> = pts.iter().map(|p| p.theta).collect();
        let flux: Vec<Vec<T>> = (0..g.dim())
            .map(|i| d_axis(&g, &theta, i).into_iter().map(|x| dis.kappa_heat * x).collect())
            .collect();
        let fourier = div_components(&g, flux.iter().map(|f| f.as_slice()));
        let tau = scalar_field(g, Kind::ExtensiveScalar, |k| {
            let p = &pts[k];
            (dv.matrix_at(k).ddot(&visc.matrix_at(k)) - fpl.matrix_at(k).ddot(&p.de_fp) + fourier[k]) / p.de_tau
        });
        Ok(State {
            pi: diff_op(&visc, DiffMode::DivMatrixRows)?.retag(Kind::Momentum),
            f: TensorField::zeros(g, Kind::TwoPoint),
            fp: fpl,
            tau,
            role: q.role,
        })
    }

    /// q̇ = V_Ham(q) + V_diss(q)
    pub fn rhs(&self, q: &State<T>) -> Result<State<T>> {
        let ham = self.v_ham(q)?;
        if self.dissipation.is_none() {
            return Ok(ham);
        }
        ham.add(&self.v_diss(q)?)
    }

    pub fn scalar_rates(&self, q: &State<T>) -> Result<ScalarRates<T>> {
        let g = *q.grid();
        let pts = self.points(q)?;
        let (v, _) = self.velocity_and_density(q)?;
        let dv = strain_rate(&v)?;
        let divv = diff_op(&v, DiffMode::DivVector)?;
        let adv = advect_scalar(&v, q.tau.data());
        let dis = &self.dissipation;
        let lp = self.plastic_rate(q)?;
        let j_ham_s = scalar_field(g, Kind::ExtensiveScalar, |k| {
            let p = &pts[k];
            let sf = p.ds_f * q.f.matrix_at(k).transpose();
            -adv[k] - (p.s * divv.data()[k] + sf.ddot(&dv.matrix_at(k))) / p.ds_tau
        });
        let j_diss_e = scalar_field(g, Kind::ExtensiveScalar, |k| {
            let p = &pts[k];
            let d = dv.matrix_at(k);
            let fpl = q.fp.matrix_at(k) * lp.matrix_at(k);
            (d.ddot(&dis.viscous(&d)) - fpl.ddot(&p.de_fp)) / p.de_tau
        });
        let inv_theta: Vec<T> = pts.iter().map(|p| p.theta.recip()).collect();
        let flux: Vec<Vec<T>> = (0..g.dim())
            .map(|i| {
                d_axis(&g, &inv_theta, i)
                    .into_iter()
                    .zip(&pts)
                    .map(|(x, p)| dis.kappa_heat * p.theta * p.theta * x)
                    .collect()
            })
            .collect();
        let div = div_components(&g, flux.iter().map(|f| f.as_slice()));
        let heat = scalar_field(g, Kind::ExtensiveScalar, |k| -div[k] / pts[k].de_tau);
        Ok(ScalarRates { j_ham_s, j_diss_e, heat })
    }

    /// F_e⁻¹(∂_tF_e + 𝔏_vF_e) + (∂_tF_p + 𝔏_vF_p)F_p⁻¹ with F_e = F F_p⁻¹ and ∂_tF_e
    /// from the product rule; plus the frame-indifference residual.
    pub fn kinematic_residuals(&self, q: &State<T>, q_dot: &State<T>) -> Result<(TensorField<T>, T)> {
        let g = *q.grid();
        let n = g.len();
        let inv = |m: crate::field_calculus::Mat<T>, k: usize, what: &'static str| {
            m.inverse().ok_or(Error::InvalidState {
                what,
                node: k,
                value: m.det().to_f64_lossy(),
            })
        };
        let mut fp_inv = Vec::with_capacity(n);
        let mut fe = Vec::with_capacity(n);
        let mut fe_inv = Vec::with_capacity(n);
        for k in 0..n {
            let pi = inv(q.fp.matrix_at(k), k, "singular F_p")?;
            let e = q.f.matrix_at(k) * pi;
            fe_inv.push(inv(e, k, "singular F_e")?);
            fe.push(e);
            fp_inv.push(pi);
        }
        let (v, _) = self.velocity_and_density(q)?;
        let fe_field = matrix_field(g, Kind::TwoPoint, |k| fe[k]);
        let lie_fe = lie_derivative(&v, &fe_field, None)?;
        let lie_fp = lie_derivative(&v, &q.fp, None)?;
        let split = matrix_field(g, Kind::IntensiveMatrix, |k| {
            let fe_dot = q_dot.f.matrix_at(k) * fp_inv[k] - fe[k] * q_dot.fp.matrix_at(k) * fp_inv[k];
            fe_inv[k] * (fe_dot + lie_fe.matrix_at(k)) + (q_dot.fp.matrix_at(k) + lie_fp.matrix_at(k)) * fp_inv[k]
        });
        Ok((split, self.frame_residuals(q)?))
    }

    /// ∂_tρ + div(ρv) with ∂_tρ = −ρ tr(F⁻¹∂_tF) from ρ = ρ_ref/det F.
    pub fn continuity_residual(&self, q: &State<T>, q_dot: &State<T>) -> Result<TensorField<T>> {
        let (v, rho) = self.velocity_and_density(q)?;
        let flux = lie_derivative(&v, &rho, None)?;
        let g = *q.grid();
        Ok(scalar_field(g, Kind::ExtensiveScalar, |k| {
            let finv = q.f.matrix_at(k).inverse().expect("det F > 0 checked");
            -rho.data()[k] * (finv * q_dot.f.matrix_at(k)).trace() + flux.data()[k]
        }))
    }
}
