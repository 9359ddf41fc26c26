use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field_calculus::Mat;
use crate::generic::ThermalRole;
use crate::scalar::Real;

/// Isotropic compressible neo-Hookean elasticity on F_e = F F_p⁻¹, quadratic
/// hardening in F_p and an exponential thermal energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct MaterialModel<T> {
    pub rho_ref: T,
    pub mu: T,
    pub lambda: T,
    pub k_h: T,
    pub c_v: T,
    pub theta_ref: T,
}

impl<T: Real> Default for MaterialModel<T> {
    fn default() -> Self {
        MaterialModel {
            rho_ref: T::one(),
            mu: T::one(),
            lambda: T::one(),
            k_h: T::lit(0.5),
            c_v: T::one(),
            theta_ref: T::one(),
        }
    }
}

/// Coefficients of the quadratic dual dissipation potential.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct DissipationSpec<T> {
    /// shear viscosity
    pub mu_v: T,
    /// bulk viscosity
    pub lambda_v: T,
    /// plastic fluidity denominator; 0 switches plasticity off
    pub nu_p: T,
    /// Fourier conductivity
    pub kappa_heat: T,
}

impl<T: Real> Default for DissipationSpec<T> {
    fn default() -> Self {
        DissipationSpec {
            mu_v: T::lit(0.02),
            lambda_v: T::lit(0.01),
            nu_p: T::one(),
            kappa_heat: T::lit(0.02),
        }
    }
}

impl<T: Real> DissipationSpec<T> {
    pub fn none() -> Self {
        DissipationSpec {
            mu_v: T::zero(),
            lambda_v: T::zero(),
            nu_p: T::zero(),
            kappa_heat: T::zero(),
        }
    }

    pub fn is_none(&self) -> bool {
        self.mu_v == T::zero() && self.lambda_v == T::zero() && self.nu_p == T::zero() && self.kappa_heat == T::zero()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("mu_v", self.mu_v),
            ("lambda_v", self.lambda_v),
            ("nu_p", self.nu_p),
            ("kappa_heat", self.kappa_heat),
        ] {
            if !(x >= T::zero()) || !x.is_finite() {
                return Err(Error::Config(format!("dissipation coefficient {name} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    /// 𝔻 A = 2μ_v A + λ_v tr(A) I
    pub fn viscous(&self, a: &Mat<T>) -> Mat<T> {
        let tr = self.lambda_v * a.trace();
        let two = T::lit(2.0) * self.mu_v;
        Mat::from_fn(a.dim(), |i, j| {
            let x = two * a.get(i, j);
            if i == j {
                x + tr
            } else {
                x
            }
        })
    }
}

/// Everything the field operators need at one node.
#[derive(Clone, Copy, Debug)]
pub struct PointEval<T> {
    pub e: T,
    pub s: T,
    pub de_f: Mat<T>,
    pub de_fp: Mat<T>,
    pub de_tau: T,
    pub ds_f: Mat<T>,
    pub ds_fp: Mat<T>,
    pub ds_tau: T,
    pub theta: T,
    /// ∂_F W, the stress at fixed temperature
    pub dw_f: Mat<T>,
    /// ∂_{F_p}(W + H)
    pub dwh_fp: Mat<T>,
}

impl<T: Real> PointEval<T> {
    /// Σ_e^F = ∂_FE − Θ∂_FS
    pub fn sigma_e(&self) -> Mat<T> {
        self.de_f - self.ds_f.scale(self.theta)
    }

    /// Σ_p^F = ∂_{F_p}E − Θ∂_{F_p}S
    pub fn sigma_p(&self) -> Mat<T> {
        self.de_fp - self.ds_fp.scale(self.theta)
    }

    /// Ψ = E − ΘS
    pub fn free_energy(&self) -> T {
        self.e - self.theta * self.s
    }
}

struct Mechanical<T> {
    w: T,
    h: T,
    dw_f: Mat<T>,
    dw_fp: Mat<T>,
    dh_fp: Mat<T>,
}

impl<T: Real> MaterialModel<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("rho_ref", self.rho_ref),
            ("c_v", self.c_v),
            ("theta_ref", self.theta_ref),
        ] {
            if !(x > T::zero()) || !x.is_finite() {
                return Err(Error::Config(format!("material parameter {name} must be finite and > 0")));
            }
        }
        for (name, x) in [("mu", self.mu), ("lambda", self.lambda), ("k_h", self.k_h)] {
            if !(x >= T::zero()) || !x.is_finite() {
                return Err(Error::Config(format!("material parameter {name} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    /// Smallest admissible e − W − H in the internal-energy role.
    pub fn thermal_floor(&self) -> T {
        T::lit(1e-10) * self.c_v * self.theta_ref
    }

    fn mechanical(&self, node: usize, f: &Mat<T>, fp: &Mat<T>) -> Result<Mechanical<T>> {
        let d = f.dim();
        let fp_inv = fp.inverse().ok_or(Error::Constitutive {
            what: "singular F_p",
            node,
            value: fp.det().to_f64_lossy(),
        })?;
        let fe = *f * fp_inv;
        let je = fe.det();
        if !(je > T::zero()) {
            return Err(Error::Constitutive {
                what: "det F_e <= 0",
                node,
                value: je.to_f64_lossy(),
            });
        }
        let fe_inv_t = fe.inverse().expect("positive determinant").transpose();
        let ln_j = je.ln();
        let half = T::lit(0.5);
        let w = half * self.mu * (fe.norm_sq() - T::from_usize(d).unwrap()) - self.mu * ln_j
            + half * self.lambda * ln_j * ln_j;
        // ∂W/∂F_e = μF_e + (λ ln J − μ)F_e^{-T}
        let p = fe.scale(self.mu) + fe_inv_t.scale(self.lambda * ln_j - self.mu);
        let fp_inv_t = fp_inv.transpose();
        let dw_f = p * fp_inv_t;
        // dF_e = −F_e dF_p F_p⁻¹
        let dw_fp = -(fe.transpose() * p * fp_inv_t);
        let dev = *fp - Mat::identity(d);
        Ok(Mechanical {
            w,
            h: half * self.k_h * dev.norm_sq(),
            dw_f,
            dw_fp,
            dh_fp: dev.scale(self.k_h),
        })
    }

    /// Densities and first partials at one node.
    pub fn eval(&self, node: usize, f: &Mat<T>, fp: &Mat<T>, tau: T, role: ThermalRole) -> Result<PointEval<T>> {
        let m = self.mechanical(node, f, fp)?;
        let d = f.dim();
        let zero = Mat::zeros(d);
        let dwh_fp = m.dw_fp + m.dh_fp;
        Ok(match role {
            ThermalRole::Entropy => {
                let theta = self.theta_ref * (tau / self.c_v).exp();
                PointEval {
                    e: m.w + m.h + self.c_v * theta,
                    s: tau,
                    de_f: m.dw_f,
                    de_fp: dwh_fp,
                    de_tau: theta,
                    ds_f: zero,
                    ds_fp: zero,
                    ds_tau: T::one(),
                    theta,
                    dw_f: m.dw_f,
                    dwh_fp,
                }
            }
            ThermalRole::InternalEnergy => {
                let u = tau - m.w - m.h;
                let floor = self.thermal_floor();
                if !(u >= floor) {
                    return Err(Error::ThermalFloor {
                        node,
                        margin: u.to_f64_lossy(),
                        floor: floor.to_f64_lossy(),
                    });
                }
                let slope = self.c_v / u;
                PointEval {
                    e: tau,
                    s: self.c_v * (u / (self.c_v * self.theta_ref)).ln(),
                    de_f: zero,
                    de_fp: zero,
                    de_tau: T::one(),
                    ds_f: m.dw_f.scale(-slope),
                    ds_fp: dwh_fp.scale(-slope),
                    ds_tau: slope,
                    theta: u / self.c_v,
                    dw_f: m.dw_f,
                    dwh_fp,
                }
            }
        })
    }

    /// τ in `to` for the same physical point given τ in `from`.
    pub fn convert_tau(&self, node: usize, f: &Mat<T>, fp: &Mat<T>, tau: T, from: ThermalRole, to: ThermalRole) -> Result<T> {
        if from == to {
            return Ok(tau);
        }
        let p = self.eval(node, f, fp, tau, from)?;
        Ok(match to {
            ThermalRole::Entropy => p.s,
            ThermalRole::InternalEnergy => p.e,
        })
    }

    /// ∂_F of the free energy W(F F_p⁻¹) + H(F_p) + f(θ) at fixed θ.
    pub fn isothermal_stress(&self, node: usize, f: &Mat<T>, fp: &Mat<T>) -> Result<Mat<T>> {
        Ok(self.mechanical(node, f, fp)?.dw_f)
    }
}
