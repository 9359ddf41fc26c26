use rayon::prelude::*;

use super::grid::Grid;
use super::kind::Kind;
use super::small::Mat;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Grid-sampled tensor field tagged with its variance [`Kind`].
///
/// Storage is structure-of-arrays: component `c` occupies
/// `data[c * N .. (c + 1) * N]` with `N = grid.len()`. Matrix components are
/// numbered row-major, `c = i * d + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField<T> {
    grid: Grid<T>,
    kind: Kind,
    data: Vec<T>,
}

impl<T: Real> TensorField<T> {
    pub fn zeros(grid: Grid<T>, kind: Kind) -> Self {
        let len = grid.len() * kind.components(grid.dim());
        TensorField {
            grid,
            kind,
            data: vec![T::zero(); len],
        }
    }

    /// Checked constructor: length must match the kind and every sample must be finite.
    pub fn from_data(grid: Grid<T>, kind: Kind, data: Vec<T>) -> Result<Self> {
        let want = grid.len() * kind.components(grid.dim());
        if data.len() != want {
            return Err(Error::ShapeMismatch(format!(
                "{kind:?} on {}^{} needs {want} samples, got {}",
                grid.n(),
                grid.dim(),
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidState {
                what: "non-finite sample",
                node: i % grid.len(),
                value: data[i].to_f64_lossy(),
            });
        }
        Ok(TensorField { grid, kind, data })
    }

    pub(crate) fn from_raw(grid: Grid<T>, kind: Kind, data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), grid.len() * kind.components(grid.dim()));
        TensorField { grid, kind, data }
    }

    /// Builds a field from `f(coords, component)`.
    pub fn from_fn(grid: Grid<T>, kind: Kind, f: impl Fn([T; 3], usize) -> T + Sync) -> Self {
        let n = grid.len();
        let nc = kind.components(grid.dim());
        let mut data = vec![T::zero(); n * nc];
        data.par_chunks_mut(n).enumerate().for_each(|(c, chunk)| {
            for (node, out) in chunk.iter_mut().enumerate() {
                *out = f(grid.coords(node), c);
            }
        });
        TensorField { grid, kind, data }
    }

    pub fn constant(grid: Grid<T>, kind: Kind, values: &[T]) -> Result<Self> {
        let nc = kind.components(grid.dim());
        if values.len() != nc && values.len() != 1 {
            return Err(Error::ShapeMismatch(format!(
                "{kind:?} needs 1 or {nc} constant values, got {}",
                values.len()
            )));
        }
        let n = grid.len();
        let mut data = Vec::with_capacity(n * nc);
        for c in 0..nc {
            let v = if values.len() == 1 { values[0] } else { values[c] };
            data.extend(std::iter::repeat_n(v, n));
        }
        Self::from_data(grid, kind, data)
    }

    /// Identity matrix at every node.
    pub fn identity(grid: Grid<T>, kind: Kind) -> Result<Self> {
        if !kind.is_matrix() {
            return Err(Error::KindMismatch {
                op: "identity",
                found: kind,
                expected: "a matrix kind",
            });
        }
        let d = grid.dim();
        let vals: Vec<T> = (0..d * d)
            .map(|c| if c / d == c % d { T::one() } else { T::zero() })
            .collect();
        Self::constant(grid, kind, &vals)
    }

    /// Builds a matrix field node by node.
    pub fn from_matrices(grid: Grid<T>, kind: Kind, f: impl Fn(usize) -> Mat<T> + Sync) -> Self {
        debug_assert!(kind.is_matrix());
        let n = grid.len();
        let d = grid.dim();
        let mats: Vec<Mat<T>> = (0..n).into_par_iter().map(&f).collect();
        let mut data = vec![T::zero(); n * d * d];
        for (node, m) in mats.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    data[(i * d + j) * n + node] = m.get(i, j);
                }
            }
        }
        TensorField { grid, kind, data }
    }

    /// Builds a field with `ncomp` components node by node.
    pub(crate) fn from_nodes(
        grid: Grid<T>,
        kind: Kind,
        f: impl Fn(usize) -> [T; 9] + Sync,
    ) -> Self {
        let n = grid.len();
        let nc = kind.components(grid.dim());
        let vals: Vec<[T; 9]> = (0..n).into_par_iter().map(&f).collect();
        let mut data = vec![T::zero(); n * nc];
        for (node, v) in vals.iter().enumerate() {
            for c in 0..nc {
                data[c * n + node] = v[c];
            }
        }
        TensorField { grid, kind, data }
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn kind(&self) -> Kind {
        self.kind
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    #[inline]
    pub fn ncomp(&self) -> usize {
        self.kind.components(self.grid.dim())
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn component(&self, c: usize) -> &[T] {
        let n = self.grid.len();
        &self.data[c * n..(c + 1) * n]
    }

    #[inline]
    pub(crate) fn component_mut(&mut self, c: usize) -> &mut [T] {
        let n = self.grid.len();
        &mut self.data[c * n..(c + 1) * n]
    }

    #[inline]
    pub fn at(&self, node: usize, c: usize) -> T {
        self.data[c * self.grid.len() + node]
    }

    /// Same samples, different variance tag.
    pub fn with_kind(mut self, kind: Kind) -> Result<Self> {
        if kind.rank() != self.kind.rank() {
            return Err(Error::KindMismatch {
                op: "with_kind",
                found: kind,
                expected: "a kind of equal rank",
            });
        }
        self.kind = kind;
        Ok(self)
    }

    pub(crate) fn retag(mut self, kind: Kind) -> Self {
        debug_assert_eq!(kind.rank(), self.kind.rank());
        self.kind = kind;
        self
    }

    pub fn matrix_at(&self, node: usize) -> Mat<T> {
        debug_assert!(self.kind.is_matrix());
        let d = self.dim();
        Mat::from_fn(d, |i, j| self.at(node, i * d + j))
    }

    pub fn vector_at(&self, node: usize) -> [T; 3] {
        let mut out = [T::zero(); 3];
        for (c, o) in out.iter_mut().enumerate().take(self.ncomp().min(3)) {
            *o = self.at(node, c);
        }
        out
    }

    pub fn ensure_kind(&self, op: &'static str, kind: Kind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::KindMismatch {
                op,
                found: self.kind,
                expected: kind_name(kind),
            })
        }
    }

    fn ensure_compatible(&self, other: &Self) -> Result<()> {
        self.grid.ensure_same(&other.grid)?;
        if self.ncomp() != other.ncomp() {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.kind, other.kind
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        Ok(self.zip_map(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        Ok(self.zip_map(other, |a, b| a - b))
    }

    /// self + alpha * other
    pub fn axpy(&self, alpha: T, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        Ok(self.zip_map(other, |a, b| a + alpha * b))
    }

    pub fn scale(&self, alpha: T) -> Self {
        self.map(|a| a * alpha)
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a)
    }

    pub fn map(&self, f: impl Fn(T) -> T + Sync) -> Self {
        TensorField {
            grid: self.grid,
            kind: self.kind,
            data: self.data.par_iter().map(|&a| f(a)).collect(),
        }
    }

    pub(crate) fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T + Sync) -> Self {
        TensorField {
            grid: self.grid,
            kind: self.kind,
            data: self
                .data
                .par_iter()
                .zip(other.data.par_iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Pointwise product of a scalar field with this field (all components).
    pub fn scaled_by(&self, s: &Self) -> Result<Self> {
        self.grid.ensure_same(&s.grid)?;
        if !s.kind.is_scalar() {
            return Err(Error::KindMismatch {
                op: "scaled_by",
                found: s.kind,
                expected: "a scalar kind",
            });
        }
        let n = self.grid.len();
        let sd = s.data();
        let data = self
            .data
            .par_iter()
            .enumerate()
            .map(|(i, &a)| a * sd[i % n])
            .collect();
        Ok(TensorField::from_raw(self.grid, self.kind, data))
    }

    /// Component `c` as a stand-alone scalar field.
    pub fn scalar_component(&self, c: usize, kind: Kind) -> Self {
        debug_assert!(kind.is_scalar());
        TensorField::from_raw(self.grid, kind, self.component(c).to_vec())
    }

    /// Discrete L² norm sqrt(h^d Σ_nodes Σ_c |a|²).
    pub fn l2_norm(&self) -> T {
        let s: T = self.data.iter().map(|&a| a * a).sum();
        (s * self.grid.cell_volume()).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &a| m.max(a.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|a| a.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&a| a == T::zero())
    }

    /// Field with the transposed matrix at every node (same kind).
    pub fn transposed(&self) -> Self {
        debug_assert!(self.kind.is_matrix());
        let d = self.dim();
        let mut out = self.clone();
        for i in 0..d {
            for j in 0..d {
                out.component_mut(i * d + j)
                    .copy_from_slice(self.component(j * d + i));
            }
        }
        out
    }

    /// Casts between precisions (lossy for f64 → f32).
    pub fn cast<U: Real>(&self) -> TensorField<U> {
        let grid = Grid::new(
            self.grid.dim(),
            self.grid.n(),
            U::lit(self.grid.length().to_f64_lossy()),
        )
        .expect("grid already validated");
        TensorField {
            grid,
            kind: self.kind,
            data: self.data.iter().map(|a| U::lit(a.to_f64_lossy())).collect(),
        }
    }
}

fn kind_name(k: Kind) -> &'static str {
    match k {
        Kind::IntensiveScalar => "IntensiveScalar",
        Kind::ExtensiveScalar => "ExtensiveScalar",
        Kind::Vector => "Vector",
        Kind::Covector => "Covector",
        Kind::Momentum => "Momentum",
        Kind::OpVV => "OpVV",
        Kind::OpVC => "OpVC",
        Kind::OpCC => "OpCC",
        Kind::OpCV => "OpCV",
        Kind::TwoPoint => "TwoPoint",
        Kind::IntensiveMatrix => "IntensiveMatrix",
        Kind::RdExtensive => "RdExtensive",
    }
}
