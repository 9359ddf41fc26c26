use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::field::TensorField;
use super::grid::Grid;
use super::kind::Kind;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Parametric initial data. Several presets listed for one field are summed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Preset {
    /// One value broadcast to every component, or one value per component.
    Constant { value: Vec<f64> },
    /// Real random trigonometric polynomial with modes |k|_∞ ≤ max_mode and
    /// coefficients decaying like 1/|k|². No mean.
    FourierRandom {
        #[serde(default)]
        seed: Option<u64>,
        max_mode: usize,
        amplitude: f64,
    },
    /// amplitude · exp(−|x − center|²/(2 width²)) in every component.
    GaussianBump {
        center: Vec<f64>,
        width: f64,
        amplitude: f64,
        #[serde(default = "yes")]
        periodicized: bool,
    },
    /// First component amplitude · sin(2π x₂/L), the rest zero.
    ShearLayer { amplitude: f64 },
}

fn yes() -> bool {
    true
}

/// Continuum Fourier data behind [`Preset::FourierRandom`]; independent of n.
#[derive(Clone, Debug)]
pub struct FourierSeries<T> {
    dim: usize,
    length: T,
    modes: Vec<[i64; 3]>,
    /// coeffs[c][m] = (cosine, sine) coefficient of mode m in component c
    coeffs: Vec<Vec<(T, T)>>,
}

impl<T: Real> FourierSeries<T> {
    pub fn random(dim: usize, length: T, ncomp: usize, seed: u64, max_mode: usize, amplitude: T) -> Self {
        let modes = half_space_modes(dim, max_mode as i64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..ncomp)
            .map(|_| {
                modes
                    .iter()
                    .map(|k| {
                        let k2 = T::lit((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64);
                        let a = T::lit(rng.gen_range(-1.0..1.0)) * amplitude / k2;
                        let b = T::lit(rng.gen_range(-1.0..1.0)) * amplitude / k2;
                        (a, b)
                    })
                    .collect()
            })
            .collect();
        FourierSeries {
            dim,
            length,
            modes,
            coeffs,
        }
    }

    pub fn eval(&self, c: usize, x: &[T; 3]) -> T {
        let w = T::TAU() / self.length;
        let mut acc = T::zero();
        for (k, &(a, b)) in self.modes.iter().zip(&self.coeffs[c]) {
            let mut phase = T::zero();
            for i in 0..self.dim {
                phase += T::lit(k[i] as f64) * x[i];
            }
            phase *= w;
            acc += a * phase.cos() + b * phase.sin();
        }
        acc
    }

    /// Σ_modes |a| + |b|, maximised over components: a hard bound on |value|.
    pub fn coefficient_bound(&self) -> T {
        self.coeffs
            .iter()
            .map(|cs| cs.iter().map(|&(a, b)| a.abs() + b.abs()).sum::<T>())
            .fold(T::zero(), |m, s| m.max(s))
    }
}

/// Nonzero integer vectors with |k|_∞ ≤ m whose first nonzero entry is positive,
/// in lexicographic order.
fn half_space_modes(dim: usize, m: i64) -> Vec<[i64; 3]> {
    let range = |active: bool| if active { -m..=m } else { 0..=0 };
    let mut out = Vec::new();
    for k0 in range(true) {
        for k1 in range(dim > 1) {
            for k2 in range(dim > 2) {
                let k = [k0, k1, k2];
                if let Some(&first) = k.iter().find(|&&x| x != 0) {
                    if first > 0 {
                        out.push(k);
                    }
                }
            }
        }
    }
    out
}

/// `sample_field` with a fallback seed of 0 for unseeded random presets.
pub fn sample_field<T: Real>(grid: Grid<T>, kind: Kind, preset: &Preset) -> Result<TensorField<T>> {
    sample_field_seeded(grid, kind, preset, 0)
}

/// Samples a preset; `default_seed` is used when a random preset carries no seed.
pub fn sample_field_seeded<T: Real>(
    grid: Grid<T>,
    kind: Kind,
    preset: &Preset,
    default_seed: u64,
) -> Result<TensorField<T>> {
    let d = grid.dim();
    let nc = kind.components(d);
    match preset {
        Preset::Constant { value } => {
            let vals: Vec<T> = value.iter().map(|&x| T::lit(x)).collect();
            TensorField::constant(grid, kind, &vals)
        }
        Preset::FourierRandom {
            seed,
            max_mode,
            amplitude,
        } => {
            if *max_mode == 0 || 2 * max_mode >= grid.n() {
                return Err(Error::ShapeMismatch(format!(
                    "max_mode must be in 1..{} for n = {}",
                    grid.n() / 2,
                    grid.n()
                )));
            }
            let series = FourierSeries::random(
                d,
                grid.length(),
                nc,
                seed.unwrap_or(default_seed),
                *max_mode,
                T::lit(*amplitude),
            );
            finite(TensorField::from_fn(grid, kind, |x, c| series.eval(c, &x)))
        }
        Preset::GaussianBump {
            center,
            width,
            amplitude,
            periodicized,
        } => {
            if center.len() != d {
                return Err(Error::ShapeMismatch(format!(
                    "gaussian center has {} coordinates on a {d}-d grid",
                    center.len()
                )));
            }
            if !(*width > 0.0) {
                return Err(Error::ShapeMismatch("gaussian width must be positive".into()));
            }
            let c: Vec<T> = center.iter().map(|&x| T::lit(x)).collect();
            let (w, a, l) = (T::lit(*width), T::lit(*amplitude), grid.length());
            let images: Vec<[i32; 3]> = if *periodicized {
                let r = |on: bool| if on { -1..=1 } else { 0..=0 };
                let mut v = Vec::new();
                for i in r(true) {
                    for j in r(d > 1) {
                        for k in r(d > 2) {
                            v.push([i, j, k]);
                        }
                    }
                }
                v
            } else {
                vec![[0, 0, 0]]
            };
            finite(TensorField::from_fn(grid, kind, |x, _| {
                let mut acc = T::zero();
                for img in &images {
                    let mut r2 = T::zero();
                    for i in 0..d {
                        let mut dx = x[i] - c[i];
                        if *periodicized {
                            dx += T::lit(img[i] as f64) * l;
                        } else {
                            // minimal image
                            dx = dx - (dx / l).round() * l;
                        }
                        r2 += dx * dx;
                    }
                    acc += (-r2 / (T::lit(2.0) * w * w)).exp();
                }
                a * acc
            }))
        }
        Preset::ShearLayer { amplitude } => {
            if !kind.is_vector_like() || d < 2 {
                return Err(Error::ShapeMismatch(format!(
                    "shear layer needs a rank-1 kind on d >= 2, got {kind:?} on d = {d}"
                )));
            }
            let a = T::lit(*amplitude);
            let w = T::TAU() / grid.length();
            finite(TensorField::from_fn(grid, kind, |x, c| {
                if c == 0 {
                    a * (w * x[1]).sin()
                } else {
                    T::zero()
                }
            }))
        }
    }
}

/// Sum of several presets.
pub fn sample_sum<T: Real>(
    grid: Grid<T>,
    kind: Kind,
    presets: &[Preset],
    default_seed: u64,
) -> Result<TensorField<T>> {
    let mut acc = TensorField::zeros(grid, kind);
    for p in presets {
        acc = acc.add(&sample_field_seeded(grid, kind, p, default_seed)?)?;
    }
    Ok(acc)
}

fn finite<T: Real>(f: TensorField<T>) -> Result<TensorField<T>> {
    let g = *f.grid();
    let k = f.kind();
    TensorField::from_data(g, k, f.into_data())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_calculus::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn constant_preset() {
        let g = make_grid(2, 8, 2.0 * PI).unwrap();
        let f = sample_field(g, Kind::IntensiveScalar, &Preset::Constant { value: vec![3.0] }).unwrap();
        assert!(f.data().iter().all(|&x| x == 3.0));
        let bad = sample_field(g, Kind::Vector, &Preset::Constant { value: vec![1.0, 2.0, 3.0] });
        assert!(bad.is_err());
    }

    #[test]
    fn random_preset_is_deterministic_and_bounded() {
        let g = make_grid(2, 16, 2.0 * PI).unwrap();
        let p = Preset::FourierRandom {
            seed: Some(7),
            max_mode: 3,
            amplitude: 1.0,
        };
        let a = sample_field(g, Kind::Vector, &p).unwrap();
        let b = sample_field(g, Kind::Vector, &p).unwrap();
        assert_eq!(a, b);
        let bound = FourierSeries::random(2, 2.0 * PI, 2, 7, 3, 1.0).coefficient_bound();
        assert!(a.max_abs() <= bound);
        assert!(a.max_abs() > 0.0);
    }

    #[test]
    fn half_space_has_one_of_each_pair() {
        let m = half_space_modes(2, 1);
        assert_eq!(m.len(), 4);
        assert!(m.contains(&[1, -1, 0]));
        assert!(!m.contains(&[-1, 1, 0]));
        assert_eq!(half_space_modes(3, 2).len(), (125 - 1) / 2);
    }

    #[test]
    fn shape_checks() {
        let g = make_grid(2, 16, 1.0).unwrap();
        let bump = Preset::GaussianBump {
            center: vec![0.5],
            width: 0.1,
            amplitude: 1.0,
            periodicized: true,
        };
        assert!(sample_field(g, Kind::IntensiveScalar, &bump).is_err());
        let shear = Preset::ShearLayer { amplitude: 1.0 };
        assert!(sample_field(g, Kind::TwoPoint, &shear).is_err());
        assert!(sample_field(g, Kind::Vector, &shear).is_ok());
    }

    #[test]
    fn preset_json_shape() {
        let p: Preset =
            serde_json::from_str(r#"{"type":"fourier_random","seed":3,"max_mode":2,"amplitude":0.1}"#)
                .unwrap();
        assert!(matches!(p, Preset::FourierRandom { max_mode: 2, .. }));
        assert!(serde_json::from_str::<Preset>(r#"{"type":"shear_layer","amplitude":1,"x":2}"#).is_err());
    }
}
