use crate::error::{Error, Result};
use crate::scalar::Real;

/// Periodic uniform Cartesian lattice on the d-torus `[0, L)^d`.
///
/// Nodes are stored row-major: axis 0 varies slowest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid<T> {
    dim: usize,
    n: usize,
    length: T,
    spacing: T,
}

pub const MIN_POINTS: usize = 8;

/// `make_grid`: validates and builds a grid with `n` points per axis.
pub fn make_grid<T: Real>(dim: usize, n: usize, length: T) -> Result<Grid<T>> {
    Grid::new(dim, n, length)
}

impl<T: Real> Grid<T> {
    pub fn new(dim: usize, n: usize, length: T) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if n < MIN_POINTS || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "need an even point count >= {MIN_POINTS}, got {n}"
            )));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::InvalidGrid(format!("period must be positive, got {length}")));
        }
        let spacing = length / T::from_usize(n).unwrap();
        Ok(Grid {
            dim,
            n,
            length,
            spacing,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn length(&self) -> T {
        self.length
    }

    /// h = L / n
    #[inline]
    pub fn spacing(&self) -> T {
        self.spacing
    }

    /// Number of nodes, n^d.
    #[inline]
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight h^d of the rectangle rule.
    #[inline]
    pub fn cell_volume(&self) -> T {
        self.spacing.powi(self.dim as i32)
    }

    /// |domain| = L^d
    pub fn volume(&self) -> T {
        self.length.powi(self.dim as i32)
    }

    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.dim - 1 - axis) as u32)
    }

    #[inline]
    pub fn axis_index(&self, node: usize, axis: usize) -> usize {
        (node / self.stride(axis)) % self.n
    }

    pub fn multi_index(&self, node: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for (a, slot) in out.iter_mut().enumerate().take(self.dim) {
            *slot = self.axis_index(node, a);
        }
        out
    }

    pub fn node(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .take(self.dim)
            .fold(0, |acc, &i| acc * self.n + (i % self.n))
    }

    /// Cartesian coordinates x_k = k h of a node (unused axes are zero).
    pub fn coords(&self, node: usize) -> [T; 3] {
        let mut x = [T::zero(); 3];
        for (a, xa) in x.iter_mut().enumerate().take(self.dim) {
            *xa = T::from_usize(self.axis_index(node, a)).unwrap() * self.spacing;
        }
        x
    }

    /// Neighbour one step forward along `axis`, wrapping around the torus.
    #[inline]
    pub fn forward(&self, node: usize, axis: usize) -> usize {
        let s = self.stride(axis);
        if (node / s) % self.n == self.n - 1 {
            node + s - self.n * s
        } else {
            node + s
        }
    }

    #[inline]
    pub fn backward(&self, node: usize, axis: usize) -> usize {
        let s = self.stride(axis);
        if (node / s).is_multiple_of(self.n) {
            node + self.n * s - s
        } else {
            node - s
        }
    }

    pub fn same_as(&self, other: &Grid<T>) -> bool {
        self.dim == other.dim && self.n == other.n && self.length == other.length
    }

    pub(crate) fn ensure_same(&self, other: &Grid<T>) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}
