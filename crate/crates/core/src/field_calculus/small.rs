//! Pointwise d×d matrices (d ≤ 3) used by the node kernels.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat<T> {
    dim: usize,
    a: [T; 9],
}

impl<T: Real> Mat<T> {
    pub fn zeros(dim: usize) -> Self {
        debug_assert!((1..=3).contains(&dim));
        Mat {
            dim,
            a: [T::zero(); 9],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.a[i * 3 + i] = T::one();
        }
        m
    }

    /// Builds from a row-major slice of length dim².
    pub fn from_row_major(dim: usize, vals: &[T]) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.a[i * 3 + j] = vals[i * dim + j];
            }
        }
        m
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.a[i * 3 + j] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.a[i * 3 + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.a[i * 3 + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(i, j) * s)
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// A : B = Σ_ij A_ij B_ij
    pub fn ddot(&self, other: &Self) -> T {
        let mut acc = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += self.get(i, j) * other.get(i, j);
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> T {
        self.ddot(self)
    }

    pub fn sym(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.dim, |i, j| half * (self.get(i, j) + self.get(j, i)))
    }

    /// max_ij |A_ij − A_ji|
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn det(&self) -> T {
        let g = |i, j| self.get(i, j);
        match self.dim {
            1 => g(0, 0),
            2 => g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0),
            _ => {
                g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
                    - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                    + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
            }
        }
    }

    /// Inverse by cofactors; `None` when the determinant is zero or not finite.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        let g = |i, j| self.get(i, j);
        let inv_det = T::one() / det;
        let m = match self.dim {
            1 => Self::from_fn(1, |_, _| inv_det),
            2 => Self::from_row_major(
                2,
                &[
                    g(1, 1) * inv_det,
                    -g(0, 1) * inv_det,
                    -g(1, 0) * inv_det,
                    g(0, 0) * inv_det,
                ],
            ),
            _ => {
                let c = |i0: usize, j0: usize| {
                    // cofactor of (i0, j0)
                    let r: Vec<usize> = (0..3).filter(|&r| r != i0).collect();
                    let s: Vec<usize> = (0..3).filter(|&s| s != j0).collect();
                    let minor = g(r[0], s[0]) * g(r[1], s[1]) - g(r[0], s[1]) * g(r[1], s[0]);
                    if (i0 + j0).is_multiple_of(2) {
                        minor
                    } else {
                        -minor
                    }
                };
                // inverse = adj / det, adj_ij = cof_ji
                Self::from_fn(3, |i, j| c(j, i) * inv_det)
            }
        };
        Some(m)
    }

    /// A x
    pub fn apply(&self, x: &[T]) -> [T; 3] {
        let mut y = [T::zero(); 3];
        for (i, yi) in y.iter_mut().enumerate().take(self.dim) {
            let mut acc = T::zero();
            for (j, xj) in x.iter().enumerate().take(self.dim) {
                acc += self.get(i, j) * *xj;
            }
            *yi = acc;
        }
        y
    }

    /// Aᵀ x
    pub fn apply_transpose(&self, x: &[T]) -> [T; 3] {
        let mut y = [T::zero(); 3];
        for (i, yi) in y.iter_mut().enumerate().take(self.dim) {
            let mut acc = T::zero();
            for (j, xj) in x.iter().enumerate().take(self.dim) {
                acc += self.get(j, i) * *xj;
            }
            *yi = acc;
        }
        y
    }

    pub fn write_row_major(&self, out: &mut [T]) {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = self.get(i, j);
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().all(|x| x.is_finite())
    }
}

impl<T: Real> Add for Mat<T> {
    type Output = Mat<T>;
    fn add(self, rhs: Self) -> Self {
        Mat::from_fn(self.dim, |i, j| self.get(i, j) + rhs.get(i, j))
    }
}

impl<T: Real> Sub for Mat<T> {
    type Output = Mat<T>;
    fn sub(self, rhs: Self) -> Self {
        Mat::from_fn(self.dim, |i, j| self.get(i, j) - rhs.get(i, j))
    }
}

impl<T: Real> Neg for Mat<T> {
    type Output = Mat<T>;
    fn neg(self) -> Self {
        Mat::from_fn(self.dim, |i, j| -self.get(i, j))
    }
}

impl<T: Real> Mul for Mat<T> {
    type Output = Mat<T>;
    fn mul(self, rhs: Self) -> Self {
        Mat::from_fn(self.dim, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.dim {
                acc += self.get(i, k) * rhs.get(k, j);
            }
            acc
        })
    }
}
