//! Flow maps and pull-backs: the independent code path used as an oracle
//! for the stencil-based Lie derivatives.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field_calculus::{Grid, Kind, Mat, TensorField};
use crate::scalar::Real;

pub const DEFAULT_DS: f64 = 1e-3;
pub const DEFAULT_SUBSTEPS: usize = 16;

/// Trigonometric interpolant of a grid field, evaluable off-grid together
/// with its exact gradient. Exact for band-limited data.
#[derive(Clone, Debug)]
pub struct TrigInterpolant<T> {
    dim: usize,
    length: T,
    /// per component: (integer mode, complex coefficient), full (not half) spectrum
    modes: Vec<Vec<([i64; 3], Complex<T>)>>,
}

impl<T: Real> TrigInterpolant<T> {
    pub fn new(a: &TensorField<T>) -> Self {
        let g = *a.grid();
        let modes = (0..a.ncomp())
            .into_par_iter()
            .map(|c| spectrum(&g, a.component(c)))
            .collect();
        TrigInterpolant {
            dim: g.dim(),
            length: g.length(),
            modes,
        }
    }

    pub fn ncomp(&self) -> usize {
        self.modes.len()
    }

    /// Number of retained modes, summed over components.
    pub fn mode_count(&self) -> usize {
        self.modes.iter().map(Vec::len).sum()
    }

    /// Values and gradients (∂_j of component c in `grad[c][j]`) at `x`.
    pub fn eval(&self, x: &[T; 3], val: &mut [T], grad: &mut [[T; 3]]) {
        let w = T::TAU() / self.length;
        for (c, ms) in self.modes.iter().enumerate() {
            let mut v = T::zero();
            let mut gr = [T::zero(); 3];
            for (k, coef) in ms {
                let mut phase = T::zero();
                for i in 0..self.dim {
                    phase += T::lit(k[i] as f64) * x[i];
                }
                let (s, co) = (phase * w).sin_cos();
                // Re(c e^{iθ}) and Re(i c e^{iθ}) = −Im(c e^{iθ})
                let re = coef.re * co - coef.im * s;
                let im = coef.re * s + coef.im * co;
                v += re;
                for i in 0..self.dim {
                    gr[i] -= im * T::lit(k[i] as f64) * w;
                }
            }
            val[c] = v;
            grad[c] = gr;
        }
    }
}

/// Separable naive DFT of one component; keeps coefficients above a relative
/// noise floor and splits Nyquist modes evenly between ±n/2.
fn spectrum<T: Real>(g: &Grid<T>, f: &[T]) -> Vec<([i64; 3], Complex<T>)> {
    let n = g.n();
    let d = g.dim();
    let total = g.len();
    let twiddle: Vec<Complex<T>> = (0..n)
        .map(|m| {
            let th = -T::TAU() * T::lit(m as f64) / T::lit(n as f64);
            Complex::new(th.cos(), th.sin())
        })
        .collect();
    let mut buf: Vec<Complex<T>> = f.iter().map(|&x| Complex::new(x, T::zero())).collect();
    let mut line = vec![Complex::new(T::zero(), T::zero()); n];
    for axis in 0..d {
        let s = g.stride(axis);
        for start in 0..total {
            if !(start / s).is_multiple_of(n) {
                continue;
            }
            for (k, out) in line.iter_mut().enumerate() {
                let mut acc = Complex::new(T::zero(), T::zero());
                for j in 0..n {
                    acc = acc + buf[start + j * s] * twiddle[(j * k) % n];
                }
                *out = acc;
            }
            for (k, v) in line.iter().enumerate() {
                buf[start + k * s] = *v;
            }
        }
    }
    let inv = T::one() / T::lit(total as f64);
    let peak = buf.iter().fold(T::zero(), |m, c| m.max(c.norm())) * inv;
    let floor = T::lit(64.0) * T::epsilon() * peak.max(T::min_positive_value());
    let half = n / 2;
    let mut out = Vec::new();
    for (node, c) in buf.iter().enumerate() {
        let c = *c * inv;
        if c.norm() <= floor {
            continue;
        }
        let idx = g.multi_index(node);
        // expand Nyquist indices into ±n/2 with half weight each
        let mut variants: Vec<([i64; 3], T)> = vec![([0; 3], T::one())];
        for a in 0..d {
            let k = idx[a];
            let mut next = Vec::with_capacity(variants.len() * 2);
            for (m, wgt) in variants {
                if k == half {
                    let mut p = m;
                    p[a] = half as i64;
                    next.push((p, wgt * T::lit(0.5)));
                    let mut q = m;
                    q[a] = -(half as i64);
                    next.push((q, wgt * T::lit(0.5)));
                } else {
                    let mut p = m;
                    p[a] = if k < half { k as i64 } else { k as i64 - n as i64 };
                    next.push((p, wgt));
                }
            }
            variants = next;
        }
        for (m, wgt) in variants {
            out.push((m, c * wgt));
        }
    }
    out
}

/// Sampled diffeomorphism of the torus: image points and Jacobians per node.
#[derive(Clone, Debug)]
pub struct Diffeo<T> {
    grid: Grid<T>,
    /// image point wrapped into [0, L)^d
    points: Vec<[T; 3]>,
    /// number of periods crossed per axis
    winding: Vec<[i64; 3]>,
    jac: Vec<Mat<T>>,
    /// generating flow, if any: (velocity interpolant, pseudo-time, substeps)
    source: Option<(Arc<TrigInterpolant<T>>, T, usize)>,
}

impl<T: Real> Diffeo<T> {
    pub fn identity(grid: Grid<T>) -> Self {
        let n = grid.len();
        Diffeo {
            grid,
            points: (0..n).map(|i| grid.coords(i)).collect(),
            winding: vec![[0; 3]; n],
            jac: vec![Mat::identity(grid.dim()); n],
            source: None,
        }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn point(&self, node: usize) -> [T; 3] {
        self.points[node]
    }

    /// Unwrapped image point (wrapped point plus winding · L).
    pub fn unwrapped_point(&self, node: usize) -> [T; 3] {
        let mut p = self.points[node];
        for a in 0..self.grid.dim() {
            p[a] += T::lit(self.winding[node][a] as f64) * self.grid.length();
        }
        p
    }

    pub fn winding(&self, node: usize) -> [i64; 3] {
        self.winding[node]
    }

    pub fn jacobian(&self, node: usize) -> Mat<T> {
        self.jac[node]
    }

    /// Inverse map, available for diffeomorphisms generated by a flow.
    pub fn inverse(&self) -> Result<Diffeo<T>> {
        match &self.source {
            Some((v, s, steps)) => flow_interp(&self.grid, v.clone(), -*s, *steps),
            None => Err(Error::Unsupported(
                "inverse of a diffeomorphism not generated by a flow".into(),
            )),
        }
    }
}

/// Flow Ψ(s, ·) of the stationary field v, with DΨ from the variational
/// equation, by classical RK4 with `n_steps` substeps.
pub fn flow_map<T: Real>(v: &TensorField<T>, s: T, n_steps: usize) -> Result<Diffeo<T>> {
    v.ensure_kind("flow_map", Kind::Vector)?;
    flow_interp(v.grid(), Arc::new(TrigInterpolant::new(v)), s, n_steps)
}

fn flow_interp<T: Real>(grid: &Grid<T>, vi: Arc<TrigInterpolant<T>>, s: T, n_steps: usize) -> Result<Diffeo<T>> {
    let g = *grid;
    let d = g.dim();
    let n_steps = n_steps.max(1);
    let h = s / T::lit(n_steps as f64);
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    let rhs = |y: &[T; 3], m: &Mat<T>| -> ([T; 3], Mat<T>) {
        let mut val = [T::zero(); 3];
        let mut grad = [[T::zero(); 3]; 3];
        vi.eval(y, &mut val[..d], &mut grad[..d]);
        let jv = Mat::from_fn(d, |i, j| grad[i][j]);
        (val, jv * *m)
    };
    let results: Vec<Result<([T; 3], [i64; 3], Mat<T>)>> = (0..g.len())
        .into_par_iter()
        .map(|node| {
            let mut y = g.coords(node);
            let mut m = Mat::identity(d);
            for _ in 0..n_steps {
                let add = |y: &[T; 3], k: &[T; 3], c: T| {
                    let mut o = *y;
                    for a in 0..d {
                        o[a] += c * k[a];
                    }
                    o
                };
                let (k1, l1) = rhs(&y, &m);
                let (k2, l2) = rhs(&add(&y, &k1, h * half), &(m + l1.scale(h * half)));
                let (k3, l3) = rhs(&add(&y, &k2, h * half), &(m + l2.scale(h * half)));
                let (k4, l4) = rhs(&add(&y, &k3, h), &(m + l3.scale(h)));
                for a in 0..d {
                    y[a] += h * sixth * (k1[a] + T::lit(2.0) * k2[a] + T::lit(2.0) * k3[a] + k4[a]);
                }
                m = m + (l1 + l2.scale(T::lit(2.0)) + l3.scale(T::lit(2.0)) + l4).scale(h * sixth);
                let det = m.det();
                if !(det > T::zero()) {
                    return Err(Error::FlowDegenerate {
                        node,
                        s: s.to_f64_lossy(),
                        det: det.to_f64_lossy(),
                    });
                }
            }
            let mut wind = [0i64; 3];
            let l = g.length();
            for a in 0..d {
                let q = (y[a] / l).floor();
                wind[a] = q.to_f64_lossy() as i64;
                y[a] -= q * l;
            }
            Ok((y, wind, m))
        })
        .collect();
    let mut points = Vec::with_capacity(g.len());
    let mut winding = Vec::with_capacity(g.len());
    let mut jac = Vec::with_capacity(g.len());
    for r in results {
        let (p, w, m) = r?;
        points.push(p);
        winding.push(w);
        jac.push(m);
    }
    Ok(Diffeo {
        grid: g,
        points,
        winding,
        jac,
        source: Some((vi, s, n_steps)),
    })
}

/// Φ*A, sampling A off-grid through its trigonometric interpolant.
pub fn pullback<T: Real>(phi: &Diffeo<T>, a: &TensorField<T>, kind: Kind) -> Result<TensorField<T>> {
    phi.grid.ensure_same(a.grid())?;
    pullback_interp(phi, &TrigInterpolant::new(a), kind)
}

/// Φ_*A = (Φ⁻¹)*A.
pub fn pushforward<T: Real>(phi: &Diffeo<T>, a: &TensorField<T>, kind: Kind) -> Result<TensorField<T>> {
    pullback(&phi.inverse()?, a, kind)
}

fn pullback_interp<T: Real>(phi: &Diffeo<T>, ai: &TrigInterpolant<T>, kind: Kind) -> Result<TensorField<T>> {
    let g = phi.grid;
    let d = g.dim();
    let nc = kind.components(d);
    if ai.ncomp() != nc {
        return Err(Error::ShapeMismatch(format!(
            "{kind:?} has {nc} components, field has {}",
            ai.ncomp()
        )));
    }
    let vals: Vec<Result<[T; 9]>> = (0..g.len())
        .into_par_iter()
        .map(|node| {
            let mut a = [T::zero(); 9];
            let mut grad = [[T::zero(); 3]; 9];
            ai.eval(&phi.points[node], &mut a[..nc], &mut grad[..nc]);
            let m = phi.jac[node];
            let det = m.det();
            let minv = || {
                m.inverse().ok_or(Error::SingularJacobian {
                    node,
                    det: det.to_f64_lossy(),
                })
            };
            let mat = || Mat::from_row_major(d, &a[..d * d]);
            let mut out = [T::zero(); 9];
            match kind {
                Kind::IntensiveScalar | Kind::IntensiveMatrix => out = a,
                Kind::ExtensiveScalar | Kind::RdExtensive => {
                    for c in 0..nc {
                        out[c] = det * a[c];
                    }
                }
                Kind::Vector => out[..3].copy_from_slice(&minv()?.apply(&a[..d])),
                Kind::Covector => out[..3].copy_from_slice(&m.apply_transpose(&a[..d])),
                Kind::Momentum => {
                    let y = m.apply_transpose(&a[..d]);
                    for c in 0..d {
                        out[c] = det * y[c];
                    }
                }
                _ => {
                    let r = match kind {
                        Kind::OpVV => minv()? * mat() * m,
                        Kind::OpVC => m.transpose() * mat() * m,
                        Kind::OpCC => m.transpose() * mat() * minv()?.transpose(),
                        Kind::OpCV => {
                            let mi = minv()?;
                            mi * mat() * mi.transpose()
                        }
                        Kind::TwoPoint => minv()? * mat(),
                        _ => unreachable!(),
                    };
                    r.write_row_major(&mut out[..d * d]);
                }
            }
            Ok(out)
        })
        .collect();
    let n = g.len();
    let mut data = vec![T::zero(); n * nc];
    for (node, r) in vals.into_iter().enumerate() {
        let v = r?;
        for c in 0..nc {
            data[c * n + node] = v[c];
        }
    }
    Ok(TensorField::from_raw(g, kind, data))
}

/// Flows at ±δs for one velocity field, shared across every field and kind
/// differentiated with it.
#[derive(Clone, Debug)]
pub struct FlowOracle<T> {
    ds: T,
    plus: Diffeo<T>,
    minus: Diffeo<T>,
}

impl<T: Real> FlowOracle<T> {
    pub fn new(v: &TensorField<T>, ds: T, n_steps: usize) -> Result<Self> {
        v.ensure_kind("lie_via_flow", Kind::Vector)?;
        if !(ds > T::zero()) {
            return Err(Error::Config("pseudo-time step must be positive".into()));
        }
        let vi = Arc::new(TrigInterpolant::new(v));
        Ok(FlowOracle {
            ds,
            plus: flow_interp(v.grid(), vi.clone(), ds, n_steps)?,
            minus: flow_interp(v.grid(), vi, -ds, n_steps)?,
        })
    }

    /// (Ψ_{+δs}*A − Ψ_{−δs}*A) / (2δs)
    pub fn lie(&self, a: &TensorField<T>, kind: Kind) -> Result<TensorField<T>> {
        self.plus.grid.ensure_same(a.grid())?;
        let ai = TrigInterpolant::new(a);
        let p = pullback_interp(&self.plus, &ai, kind)?;
        let m = pullback_interp(&self.minus, &ai, kind)?;
        Ok(p.sub(&m)?.scale(T::one() / (T::lit(2.0) * self.ds)))
    }
}

/// Oracle Lie derivative d/ds Ψ(s)*A at s = 0 by a central difference in s.
pub fn lie_via_flow<T: Real>(v: &TensorField<T>, a: &TensorField<T>, kind: Kind, ds: T) -> Result<TensorField<T>> {
    FlowOracle::new(v, ds, DEFAULT_SUBSTEPS)?.lie(a, kind)
}
