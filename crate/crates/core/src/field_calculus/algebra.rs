//! Pointwise multilinear algebra in the Cartesian basis (ε_k dual to e_k).
//!
//! A [`Multilinear`] field with signature `(p, q)` takes `p` vector arguments
//! followed by `q` covector arguments; component `[i_1, …, i_{p+q}]` is the
//! value on the basis elements (e_{i_1}, …, ε_{i_{p+q}}), stored row-major.

use super::field::TensorField;
use super::grid::Grid;
use super::kind::Kind;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_RANK: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct Multilinear<T> {
    grid: Grid<T>,
    vector_slots: usize,
    covector_slots: usize,
    data: Vec<T>,
}

/// Whether a matrix kind's row-major storage is the transpose of its
/// multilinear layout. 𝔹 : T → T read as 𝔹[w, α] = ⟨α, 𝔹w⟩ has entry
/// `[j][i] = B_ij`; likewise ℂ[w₁, w₂] = ⟨ℂw₂, w₁⟩.
pub(crate) fn stored_transposed(kind: Kind) -> bool {
    matches!(kind, Kind::OpVV | Kind::OpVC)
}

impl<T: Real> Multilinear<T> {
    pub fn zeros(grid: Grid<T>, vector_slots: usize, covector_slots: usize) -> Result<Self> {
        let rank = vector_slots + covector_slots;
        if rank > MAX_RANK {
            return Err(Error::Unsupported(format!("rank {rank} multilinear field")));
        }
        Ok(Multilinear {
            grid,
            vector_slots,
            covector_slots,
            data: vec![T::zero(); grid.len() * grid.dim().pow(rank as u32)],
        })
    }

    /// Reinterprets a plain tensor kind as a multilinear field.
    pub fn from_field(a: &TensorField<T>) -> Result<Self> {
        let (p, q) = a.kind().signature().ok_or_else(|| {
            Error::VarianceMismatch(format!("{:?} is not a plain multilinear form", a.kind()))
        })?;
        let data = if stored_transposed(a.kind()) {
            a.transposed().into_data()
        } else {
            a.data().to_vec()
        };
        Ok(Multilinear {
            grid: *a.grid(),
            vector_slots: p,
            covector_slots: q,
            data,
        })
    }

    /// Inverse of [`Multilinear::from_field`]; `kind` must carry this signature.
    pub fn to_field(&self, kind: Kind) -> Result<TensorField<T>> {
        if kind.signature() != Some(self.signature()) {
            return Err(Error::VarianceMismatch(format!(
                "signature {:?} cannot be read as {kind:?}",
                self.signature()
            )));
        }
        let f = TensorField::from_raw(self.grid, kind, self.data.clone());
        Ok(if stored_transposed(kind) { f.transposed() } else { f })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.vector_slots, self.covector_slots)
    }

    pub fn rank(&self) -> usize {
        self.vector_slots + self.covector_slots
    }

    pub fn ncomp(&self) -> usize {
        self.grid.dim().pow(self.rank() as u32)
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub(crate) fn from_raw(grid: Grid<T>, p: usize, q: usize, data: Vec<T>) -> Self {
        Multilinear {
            grid,
            vector_slots: p,
            covector_slots: q,
            data,
        }
    }

    pub fn component(&self, c: usize) -> &[T] {
        let n = self.grid.len();
        &self.data[c * n..(c + 1) * n]
    }

    fn component_mut(&mut self, c: usize) -> &mut [T] {
        let n = self.grid.len();
        &mut self.data[c * n..(c + 1) * n]
    }

    /// Component index of a multi-index.
    pub fn flat(&self, idx: &[usize]) -> usize {
        let d = self.grid.dim();
        idx.iter().fold(0, |acc, &i| acc * d + i)
    }

    /// Multi-index of a component index.
    pub fn unflat(&self, mut c: usize) -> [usize; MAX_RANK] {
        let d = self.grid.dim();
        let r = self.rank();
        let mut idx = [0; MAX_RANK];
        for k in (0..r).rev() {
            idx[k] = c % d;
            c /= d;
        }
        idx
    }
}

/// (A ⊗ B)[a-slots, b-slots] = A[a-slots] B[b-slots], reordered so the vector
/// slots of A and then of B come first.
pub fn tensor_product<T: Real>(a: &Multilinear<T>, b: &Multilinear<T>) -> Result<Multilinear<T>> {
    a.grid.ensure_same(&b.grid)?;
    let (pa, qa) = a.signature();
    let (pb, qb) = b.signature();
    let mut out = Multilinear::zeros(a.grid, pa + pb, qa + qb)?;
    let n = a.grid.len();
    for c in 0..out.ncomp() {
        let idx = out.unflat(c);
        // out layout: [vec(a), vec(b), cov(a), cov(b)]
        let mut ia = Vec::with_capacity(pa + qa);
        let mut ib = Vec::with_capacity(pb + qb);
        ia.extend_from_slice(&idx[..pa]);
        ib.extend_from_slice(&idx[pa..pa + pb]);
        ia.extend_from_slice(&idx[pa + pb..pa + pb + qa]);
        ib.extend_from_slice(&idx[pa + pb + qa..pa + pb + qa + qb]);
        let (ca, cb) = (a.flat(&ia), b.flat(&ib));
        let (sa, sb) = (a.component(ca).to_vec(), b.component(cb).to_vec());
        let dst = out.component_mut(c);
        for i in 0..n {
            dst[i] = sa[i] * sb[i];
        }
    }
    Ok(out)
}

/// C^n_m: sums vector slot `n` against covector slot `m` (both 1-based, as in the
/// usual notation).
pub fn contract<T: Real>(a: &Multilinear<T>, n: usize, m: usize) -> Result<Multilinear<T>> {
    let (p, q) = a.signature();
    if n == 0 || n > p {
        return Err(Error::SlotOutOfRange(format!("vector slot {n} of {p}")));
    }
    if m == 0 || m > q {
        return Err(Error::SlotOutOfRange(format!("covector slot {m} of {q}")));
    }
    let d = a.grid.dim();
    let vn = n - 1;
    let cm = p + m - 1;
    let mut out = Multilinear::zeros(a.grid, p - 1, q - 1)?;
    for c in 0..out.ncomp() {
        let oidx = out.unflat(c);
        let mut acc = vec![T::zero(); a.grid.len()];
        for k in 0..d {
            let mut full = Vec::with_capacity(p + q);
            let mut src = oidx[..p + q - 2].iter();
            for s in 0..p + q {
                if s == vn || s == cm {
                    full.push(k);
                } else {
                    full.push(*src.next().unwrap());
                }
            }
            let comp = a.component(a.flat(&full));
            acc.iter_mut().zip(comp).for_each(|(x, &y)| *x += y);
        }
        out.component_mut(c).copy_from_slice(&acc);
    }
    Ok(out)
}

/// i_w A: inserts the vector field `w` into the first vector slot.
pub fn interior_product<T: Real>(w: &TensorField<T>, a: &Multilinear<T>) -> Result<Multilinear<T>> {
    w.ensure_kind("interior_product", Kind::Vector)?;
    a.grid.ensure_same(w.grid())?;
    let (p, q) = a.signature();
    if p == 0 {
        return Err(Error::VarianceMismatch(
            "interior product needs a vector slot".into(),
        ));
    }
    let d = a.grid.dim();
    let mut out = Multilinear::zeros(a.grid, p - 1, q)?;
    for c in 0..out.ncomp() {
        let oidx = out.unflat(c);
        let mut acc = vec![T::zero(); a.grid.len()];
        for k in 0..d {
            let mut full = vec![k];
            full.extend_from_slice(&oidx[..p + q - 1]);
            let comp = a.component(a.flat(&full));
            let wk = w.component(k);
            for i in 0..acc.len() {
                acc[i] += wk[i] * comp[i];
            }
        }
        out.component_mut(c).copy_from_slice(&acc);
    }
    Ok(out)
}

/// Pointwise matrix transpose (kind unchanged).
pub fn transpose<T: Real>(a: &TensorField<T>) -> Result<TensorField<T>> {
    if !a.kind().is_matrix() {
        return Err(Error::KindMismatch {
            op: "transpose",
            found: a.kind(),
            expected: "a matrix kind",
        });
    }
    Ok(a.transposed())
}

/// Pointwise matrix product (AB)_ij = Σ_k A_ik B_kj, tagged `kind`.
pub fn matmul<T: Real>(a: &TensorField<T>, b: &TensorField<T>, kind: Kind) -> Result<TensorField<T>> {
    a.grid().ensure_same(b.grid())?;
    for x in [a, b] {
        if !x.kind().is_matrix() {
            return Err(Error::KindMismatch {
                op: "matmul",
                found: x.kind(),
                expected: "a matrix kind",
            });
        }
    }
    if !kind.is_matrix() {
        return Err(Error::KindMismatch {
            op: "matmul",
            found: kind,
            expected: "a matrix result kind",
        });
    }
    Ok(TensorField::from_matrices(*a.grid(), kind, |node| {
        a.matrix_at(node) * b.matrix_at(node)
    }))
}

/// Pointwise (Aw)_i = Σ_j A_ij w_j, tagged `kind`.
pub fn apply<T: Real>(a: &TensorField<T>, w: &TensorField<T>, kind: Kind) -> Result<TensorField<T>> {
    a.grid().ensure_same(w.grid())?;
    if !a.kind().is_matrix() || !w.kind().is_vector_like() || !kind.is_vector_like() {
        return Err(Error::ShapeMismatch(format!(
            "cannot apply {:?} to {:?} giving {kind:?}",
            a.kind(),
            w.kind()
        )));
    }
    Ok(TensorField::from_nodes(*a.grid(), kind, |node| {
        let y = a.matrix_at(node).apply(&w.vector_at(node));
        let mut out = [T::zero(); 9];
        out[..3].copy_from_slice(&y);
        out
    }))
}
