//! Dense complex Hermitian linear algebra at desk scale.
//!
//! Everything downstream (divergences, measurements, coding experiments)
//! reduces to spectral manipulations of small Hermitian matrices, so this
//! module provides exactly that: a cyclic Jacobi eigensolver for complex
//! Hermitian matrices, matrix functions restricted to the support,
//! spectral projectors onto non-negative eigenspaces, pinching, Kronecker
//! products and partial traces.
//!
//! All operations are pure functions over immutable values; nothing here
//! holds interior mutability, so the types can be shared across threads.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on matrix dimension; this is a desk-scale library.
pub const MAX_DIM: usize = 4096;

/// Default relative tolerance deciding the numerical rank / support of an
/// operator (relative to its largest eigenvalue magnitude).
pub const DEFAULT_TOL_RANK: f64 = 1e-10;

/// Jacobi sweep budget before reporting non-convergence.
const MAX_JACOBI_SWEEPS: usize = 100;

/// Convergence threshold: off-diagonal Frobenius mass below this multiple
/// of the input Frobenius norm stops the sweeps.
const JACOBI_OFF_TOL: f64 = 1e-13;

// ---------------------------------------------------------------------------
// ComplexMatrix
// ---------------------------------------------------------------------------

/// Dense square complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build from a row-major entry vector of length `dim * dim`.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::DimensionTooLarge { dim, max: MAX_DIM });
        }
        if entries.len() != dim * dim {
            return Err(Error::BadEntryCount {
                len: entries.len(),
                expected: dim * dim,
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Convenience constructor from rows of `[re, im]` pairs.
    pub fn from_rows(rows: &[Vec<(f64, f64)>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::BadEntryCount {
                    len: row.len(),
                    expected: dim,
                });
            }
            for &(re, im) in row {
                entries.push(Complex64::new(re, im));
            }
        }
        Self::new(dim, entries)
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let dim = values.len();
        let mut m = Self::zeros(dim);
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, Complex64::new(v, 0.0));
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            dim: self.dim,
            entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            dim: self.dim,
            entries,
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// Plain O(n^3) matrix product; fine at the dimensions this crate targets.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Worst deviation from Hermitian symmetry, max_ij |A_ij - conj(A_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// HermitianMatrix
// ---------------------------------------------------------------------------

/// Complex matrix carrying the Hermitian contract.
///
/// Construction checks `max|A_ij - conj(A_ji)| <= 1e-9 * (1 + max|A|)` and
/// then stores the exactly symmetrized `(A + A^dagger)/2`, so downstream
/// spectral code may assume exact Hermiticity.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let defect = m.hermiticity_defect();
        let tol = 1e-9 * (1.0 + m.max_abs_entry());
        if defect > tol {
            return Err(Error::NotHermitian { deviation: defect });
        }
        Ok(Self::symmetrize(m))
    }

    /// Symmetrize without the tolerance check. Used internally for products
    /// like `B A B` with Hermitian `A`, `B`, which are Hermitian up to
    /// rounding by construction.
    pub(crate) fn symmetrize(m: ComplexMatrix) -> Self {
        let n = m.dim();
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            out.set(i, i, Complex64::new(m.get(i, i).re, 0.0));
            for j in (i + 1)..n {
                let v = (m.get(i, j) + m.get(j, i).conj()) * 0.5;
                out.set(i, j, v);
                out.set(j, i, v.conj());
            }
        }
        Self { inner: out }
    }

    pub fn from_rows(rows: &[Vec<(f64, f64)>]) -> Result<Self> {
        Self::new(ComplexMatrix::from_rows(rows)?)
    }

    pub fn diag(values: &[f64]) -> Self {
        Self {
            inner: ComplexMatrix::diag(values),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: ComplexMatrix::zeros(dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: ComplexMatrix::identity(dim),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner.get(i, j)
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    /// Real trace (the imaginary part is exactly zero by construction).
    pub fn trace(&self) -> f64 {
        self.inner.trace().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            inner: self.inner.add(&other.inner)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            inner: self.inner.sub(&other.inner)?,
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            inner: self.inner.scale(factor),
        }
    }

    /// `tr(A B)`, real for Hermitian `A`, `B`.
    pub fn trace_product(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                // tr(AB) = sum_ij A_ij B_ji; B_ji = conj(B_ij).
                acc += (self.get(i, j) * other.get(i, j).conj()).re;
            }
        }
        Ok(acc)
    }

    /// Conjugation `B A B` (with `B = self` applied on both sides of `a`),
    /// symmetrized to kill rounding noise.
    pub fn sandwich(&self, a: &Self) -> Result<Self> {
        let ba = self.inner.matmul(&a.inner)?;
        let bab = ba.matmul(&self.inner)?;
        Ok(Self::symmetrize(bab))
    }
}

// ---------------------------------------------------------------------------
// Eigendecomposition (cyclic Jacobi)
// ---------------------------------------------------------------------------

/// Spectral decomposition `A = V diag(lambda) V^dagger` with eigenvalues
/// ascending and eigenvectors as the columns of a unitary matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// Rebuild `sum_i f(lambda_i) v_i v_i^dagger` over the selected eigenvalues.
    pub fn assemble(&self, mut weight: impl FnMut(f64) -> f64) -> HermitianMatrix {
        let n = self.eigenvectors.dim();
        let mut out = ComplexMatrix::zeros(n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = weight(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.eigenvectors.get(i, k);
                if vi.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let vj = self.eigenvectors.get(j, k).conj();
                    let v = out.get(i, j) + vi * vj * w;
                    out.set(i, j, v);
                }
            }
        }
        HermitianMatrix::symmetrize(out)
    }

    /// `sum_i select(lambda_i) * <v_i| B |v_i>` for Hermitian `B`.
    pub fn weighted_expectation(
        &self,
        b: &HermitianMatrix,
        mut weight: impl FnMut(f64) -> f64,
    ) -> f64 {
        let n = self.eigenvectors.dim();
        let mut acc = 0.0;
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = weight(lam);
            if w == 0.0 {
                continue;
            }
            let mut quad = 0.0;
            for i in 0..n {
                let vi = self.eigenvectors.get(i, k);
                let mut bv = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    bv += b.get(i, j) * self.eigenvectors.get(j, k);
                }
                quad += (vi.conj() * bv).re;
            }
            acc += w * quad;
        }
        acc
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Largest eigenvalue magnitude (the spectral norm).
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max)
    }
}

/// Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi
/// rotations.
///
/// Each rotation annihilates one off-diagonal entry with a unitary
/// two-plane rotation (a phase absorbing the entry's argument composed
/// with a real Jacobi rotation). Sweeps stop when the off-diagonal
/// Frobenius mass drops below `1e-13 * ||A||_F`, capped at 100 sweeps.
pub fn eig_hermitian(a: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = a.dim();
    let mut m = a.as_matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let norm = m.frobenius_norm();
    let stop = JACOBI_OFF_TOL * norm;

    if n <= 1 || norm == 0.0 {
        let eigenvalues = (0..n).map(|i| m.get(i, i).re).collect();
        return Ok(EigenDecomposition {
            eigenvalues,
            eigenvectors: v,
        });
    }

    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m.get(p, q).norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= stop {
            converged = true;
            break;
        }

        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                let r = apq.norm();
                if r <= 1e-300 {
                    m.set(p, q, Complex64::new(0.0, 0.0));
                    m.set(q, p, Complex64::new(0.0, 0.0));
                    continue;
                }
                let w = apq / r; // unit phase of the pivot entry
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;

                // t = tan(theta) from t^2 + 2*theta*t - 1 = 0 with
                // theta = (app - aqq) / (2r); stable root selection.
                let theta = (app - aqq) / (2.0 * r);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Diagonal update: A'pp = app + t*r, A'qq = aqq - t*r.
                m.set(p, p, Complex64::new(app + t * r, 0.0));
                m.set(q, q, Complex64::new(aqq - t * r, 0.0));
                m.set(p, q, Complex64::new(0.0, 0.0));
                m.set(q, p, Complex64::new(0.0, 0.0));

                // Remaining rows/columns: for j outside {p,q},
                //   A'jp =  c*Ajp + s*conj(w)*Ajq
                //   A'jq = -s*w*Ajp + c*Ajq
                for j in 0..n {
                    if j == p || j == q {
                        continue;
                    }
                    let ajp = m.get(j, p);
                    let ajq = m.get(j, q);
                    let njp = ajp * c + ajq * s * w.conj();
                    let njq = ajp * (-s) * w + ajq * c;
                    m.set(j, p, njp);
                    m.set(p, j, njp.conj());
                    m.set(j, q, njq);
                    m.set(q, j, njq.conj());
                }

                // Accumulate eigenvectors: V <- V * J.
                for j in 0..n {
                    let vjp = v.get(j, p);
                    let vjq = v.get(j, q);
                    v.set(j, p, vjp * c + vjq * s * w.conj());
                    v.set(j, q, vjp * (-s) * w + vjq * c);
                }
            }
        }
    }

    if !converged {
        // One last check: the sweep loop may have converged on its final pass.
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m.get(p, q).norm_sqr();
            }
        }
        if (2.0 * off).sqrt() > stop {
            return Err(Error::NonConvergence {
                sweeps: MAX_JACOBI_SWEEPS,
            });
        }
    }

    // Sort ascending, permuting eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m.get(i, i)
            .re
            .partial_cmp(&m.get(j, j).re)
            .expect("eigenvalues are finite")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m.get(i, i).re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, new_col, v.get(row, old_col));
        }
    }

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: vectors,
    })
}

// ---------------------------------------------------------------------------
// Matrix functions on the support
// ---------------------------------------------------------------------------

/// Apply a scalar function to a positive semi-definite matrix on its
/// support: eigenvalues above `tol_rank * lambda_max` map through `f`,
/// the rest map to zero so the kernel is preserved.
///
/// Errors with `NotPsd` if an eigenvalue falls below `-tol_rank * lambda_max`.
pub fn mat_func_on_support(
    a: &HermitianMatrix,
    f: impl Fn(f64) -> f64,
    tol_rank: f64,
) -> Result<HermitianMatrix> {
    let eig = eig_hermitian(a)?;
    mat_func_from_eig(&eig, f, tol_rank)
}

/// Same as [`mat_func_on_support`] but reusing a precomputed decomposition.
pub fn mat_func_from_eig(
    eig: &EigenDecomposition,
    f: impl Fn(f64) -> f64,
    tol_rank: f64,
) -> Result<HermitianMatrix> {
    let scale = eig.spectral_norm();
    if scale == 0.0 {
        return Ok(HermitianMatrix::zeros(eig.eigenvectors.dim()));
    }
    let threshold = tol_rank * scale;
    let min = eig.min_eigenvalue();
    if min < -threshold {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(eig.assemble(|lam| if lam > threshold { f(lam) } else { 0.0 }))
}

/// Projector onto the support (range) of a positive semi-definite matrix.
pub fn support_projector(a: &HermitianMatrix, tol_rank: f64) -> Result<HermitianMatrix> {
    mat_func_on_support(a, |_| 1.0, tol_rank)
}

/// Orthogonal projector onto the union of eigenspaces of `u` with
/// non-negative eigenvalues. Eigenvalues within `tol_rank * max(1, ||u||)`
/// of zero count as zero and are included.
pub fn proj_nonneg(u: &HermitianMatrix, tol_rank: f64) -> Result<HermitianMatrix> {
    let eig = eig_hermitian(u)?;
    let threshold = tol_rank * eig.spectral_norm().max(1.0);
    Ok(eig.assemble(|lam| if lam >= -threshold { 1.0 } else { 0.0 }))
}

/// Pinching by a projector: `P rho P + (I-P) rho (I-P)`.
///
/// Validates that `proj` is an orthogonal projector before applying it.
pub fn pinch(rho: &HermitianMatrix, proj: &HermitianMatrix) -> Result<HermitianMatrix> {
    if rho.dim() != proj.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: proj.dim(),
        });
    }
    let p2 = proj.as_matrix().matmul(proj.as_matrix())?;
    let deviation = p2.sub(proj.as_matrix())?.frobenius_norm();
    if deviation > 1e-8 * (1.0 + proj.frobenius_norm()) {
        return Err(Error::NotProjector { deviation });
    }
    let comp = HermitianMatrix::identity(proj.dim()).sub(proj)?;
    let pinched = proj.sandwich(rho)?.add(&comp.sandwich(rho)?)?;
    Ok(pinched)
}

// ---------------------------------------------------------------------------
// Tensor products and partial traces
// ---------------------------------------------------------------------------

/// Kronecker product `a (x) b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (da, db) = (a.dim(), b.dim());
    let dim = da * db;
    if dim > MAX_DIM {
        return Err(Error::DimensionTooLarge { dim, max: MAX_DIM });
    }
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..da {
        for j in 0..da {
            let aij = a.get(i, j);
            if aij.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out.set(i * db + k, j * db + l, aij * b.get(k, l));
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of Hermitian matrices (Hermitian again).
pub fn tensor_hermitian(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(HermitianMatrix::symmetrize(tensor(
        a.as_matrix(),
        b.as_matrix(),
    )?))
}

/// Partial trace of an operator on a tensor-product space.
///
/// `dims` lists the local dimension of each slot (their product must equal
/// the matrix dimension); `keep` lists the slot indices retained, in slot
/// order. All other slots are traced out.
pub fn partial_trace(
    ab: &HermitianMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<HermitianMatrix> {
    let total: usize = dims.iter().product();
    if total != ab.dim() {
        return Err(Error::DimensionMismatch {
            expected: ab.dim(),
            got: total,
        });
    }
    if dims.contains(&0) {
        return Err(Error::EmptyInput("zero-dimensional tensor slot"));
    }
    let mut seen = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::InvalidParameter(format!(
                "keep slot {k} out of range for {} slots",
                dims.len()
            )));
        }
        if seen[k] {
            return Err(Error::InvalidParameter(format!("duplicate keep slot {k}")));
        }
        seen[k] = true;
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();

    let kept_dim: usize = keep_sorted.iter().map(|&k| dims[k]).product();
    let mut out = ComplexMatrix::zeros(kept_dim);

    // Mixed-radix digit decomposition per full index, slot 0 most significant.
    let nslots = dims.len();
    let mut strides = vec![1usize; nslots];
    for s in (0..nslots.saturating_sub(1)).rev() {
        strides[s] = strides[s + 1] * dims[s + 1];
    }
    let digits =
        |idx: usize| -> Vec<usize> { (0..nslots).map(|s| (idx / strides[s]) % dims[s]).collect() };
    let kept_index = |dg: &[usize]| -> usize {
        keep_sorted
            .iter()
            .fold(0usize, |acc, &s| acc * dims[s] + dg[s])
    };

    for r in 0..total {
        let dr = digits(r);
        for c in 0..total {
            let dc = digits(c);
            let mut diagonal_on_traced = true;
            for s in 0..nslots {
                if !keep_sorted.contains(&s) && dr[s] != dc[s] {
                    diagonal_on_traced = false;
                    break;
                }
            }
            if !diagonal_on_traced {
                continue;
            }
            let (i, j) = (kept_index(&dr), kept_index(&dc));
            let v = out.get(i, j) + ab.get(r, c);
            out.set(i, j, v);
        }
    }
    Ok(HermitianMatrix::symmetrize(out))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::StreamRng;

    fn random_hermitian(dim: usize, seed: u64) -> HermitianMatrix {
        crate::sampling::random_hermitian(dim, seed)
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn reconstruct(eig: &EigenDecomposition) -> HermitianMatrix {
        eig.assemble(|l| l)
    }

    #[test]
    fn eig_identity_and_pauli_x() {
        let id = HermitianMatrix::identity(2);
        let e = eig_hermitian(&id).unwrap();
        assert_close(e.eigenvalues[0], 1.0, 1e-14);
        assert_close(e.eigenvalues[1], 1.0, 1e-14);

        let x = HermitianMatrix::from_rows(&[
            vec![(0.0, 0.0), (1.0, 0.0)],
            vec![(1.0, 0.0), (0.0, 0.0)],
        ])
        .unwrap();
        let e = eig_hermitian(&x).unwrap();
        assert_close(e.eigenvalues[0], -1.0, 1e-12);
        assert_close(e.eigenvalues[1], 1.0, 1e-12);
    }

    #[test]
    fn eig_reconstruction_random_5x5() {
        let h = random_hermitian(5, 7);
        let e = eig_hermitian(&h).unwrap();
        let back = reconstruct(&e);
        let err = back.sub(&h).unwrap().frobenius_norm();
        assert!(err <= 1e-9 * h.frobenius_norm().max(1.0));
    }

    #[test]
    fn eig_unitarity_of_eigenvectors() {
        let h = random_hermitian(6, 11);
        let e = eig_hermitian(&h).unwrap();
        let vtv = e.eigenvectors.adjoint().matmul(&e.eigenvectors).unwrap();
        let dev = vtv
            .sub(&ComplexMatrix::identity(6))
            .unwrap()
            .max_abs_entry();
        assert!(dev <= 1e-10, "V^dagger V deviates from I by {dev}");
    }

    #[test]
    fn eig_complex_phases() {
        // Pauli Y has genuinely complex entries; spectrum {-1, +1}.
        let y = HermitianMatrix::from_rows(&[
            vec![(0.0, 0.0), (0.0, -1.0)],
            vec![(0.0, 1.0), (0.0, 0.0)],
        ])
        .unwrap();
        let e = eig_hermitian(&y).unwrap();
        assert_close(e.eigenvalues[0], -1.0, 1e-12);
        assert_close(e.eigenvalues[1], 1.0, 1e-12);
    }

    #[test]
    fn hermitian_constructor_rejects_asymmetry() {
        let m =
            ComplexMatrix::from_rows(&[vec![(1.0, 0.0), (0.5, 0.0)], vec![(0.1, 0.0), (1.0, 0.0)]])
                .unwrap();
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn mat_func_inverse_sqrt_examples() {
        let id = HermitianMatrix::identity(3);
        let out = mat_func_on_support(&id, |x| x.powf(-0.5), DEFAULT_TOL_RANK).unwrap();
        assert!(out.sub(&id).unwrap().frobenius_norm() < 1e-12);

        let a = HermitianMatrix::diag(&[4.0, 0.0]);
        let out = mat_func_on_support(&a, |x| x.powf(-0.5), DEFAULT_TOL_RANK).unwrap();
        let expected = HermitianMatrix::diag(&[0.5, 0.0]);
        assert!(out.sub(&expected).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn mat_func_sqrt_squares_back() {
        let mut rng = StreamRng::new(42);
        for _ in 0..20 {
            let rho = crate::sampling::random_density(4, rng.next_u64());
            let h = rho.matrix().clone();
            let root = mat_func_on_support(&h, f64::sqrt, DEFAULT_TOL_RANK).unwrap();
            let sq = root.sandwich(&HermitianMatrix::identity(4)).unwrap();
            let err = sq.sub(&h).unwrap().frobenius_norm();
            assert!(err <= 1e-8, "sqrt(A)^2 != A: {err}");
        }
    }

    #[test]
    fn mat_func_rejects_negative() {
        let a = HermitianMatrix::diag(&[1.0, -0.5]);
        assert!(matches!(
            mat_func_on_support(&a, f64::sqrt, DEFAULT_TOL_RANK),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn mat_func_identity_times_inverse_is_support_projector() {
        let a = HermitianMatrix::diag(&[3.0, 0.5, 0.0]);
        let fwd = mat_func_on_support(&a, |x| x, DEFAULT_TOL_RANK).unwrap();
        let inv = mat_func_on_support(&a, |x| 1.0 / x, DEFAULT_TOL_RANK).unwrap();
        let prod = HermitianMatrix::symmetrize(fwd.as_matrix().matmul(inv.as_matrix()).unwrap());
        let supp = support_projector(&a, DEFAULT_TOL_RANK).unwrap();
        assert!(prod.sub(&supp).unwrap().frobenius_norm() < 1e-10);
    }

    #[test]
    fn proj_nonneg_examples() {
        let z = HermitianMatrix::diag(&[1.0, -1.0]);
        let p = proj_nonneg(&z, DEFAULT_TOL_RANK).unwrap();
        assert!(
            p.sub(&HermitianMatrix::diag(&[1.0, 0.0]))
                .unwrap()
                .frobenius_norm()
                < 1e-12
        );

        // All eigenvalues of the zero matrix are zero, hence non-negative.
        let zero = HermitianMatrix::zeros(3);
        let p = proj_nonneg(&zero, DEFAULT_TOL_RANK).unwrap();
        assert!(
            p.sub(&HermitianMatrix::identity(3))
                .unwrap()
                .frobenius_norm()
                < 1e-12
        );

        let d = HermitianMatrix::diag(&[3.0, -2.0, 0.0]);
        let p = proj_nonneg(&d, DEFAULT_TOL_RANK).unwrap();
        assert!(
            p.sub(&HermitianMatrix::diag(&[1.0, 0.0, 1.0]))
                .unwrap()
                .frobenius_norm()
                < 1e-12
        );
    }

    #[test]
    fn proj_nonneg_is_projector_and_range_is_nonnegative() {
        let mut rng = StreamRng::new(5);
        for _ in 0..50 {
            let h = random_hermitian(5, rng.next_u64());
            let p = proj_nonneg(&h, DEFAULT_TOL_RANK).unwrap();
            let p2 = p.as_matrix().matmul(p.as_matrix()).unwrap();
            let dev = p2.sub(p.as_matrix()).unwrap().frobenius_norm();
            assert!(dev <= 1e-10, "projector defect {dev}");

            // The compression P H P must be positive on the range of P.
            let compressed = p.sandwich(&h).unwrap();
            let min = eig_hermitian(&compressed).unwrap().min_eigenvalue();
            let tol = DEFAULT_TOL_RANK * eig_hermitian(&h).unwrap().spectral_norm().max(1.0);
            assert!(min >= -tol, "P H P has eigenvalue {min} below -{tol}");
        }
    }

    #[test]
    fn pinch_examples() {
        let rho = crate::sampling::random_density(3, 3).matrix().clone();
        let id = HermitianMatrix::identity(3);
        let out = pinch(&rho, &id).unwrap();
        assert!(out.sub(&rho).unwrap().frobenius_norm() < 1e-12);

        // Commuting case: diagonal state, diagonal projector.
        let d = HermitianMatrix::diag(&[0.5, 0.3, 0.2]);
        let p = HermitianMatrix::diag(&[1.0, 0.0, 1.0]);
        let out = pinch(&d, &p).unwrap();
        assert!(out.sub(&d).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn pinch_preserves_trace() {
        let mut rng = StreamRng::new(9);
        for _ in 0..30 {
            let rho = crate::sampling::random_density(4, rng.next_u64())
                .matrix()
                .clone();
            let v = crate::sampling::random_unit_vector(4, rng.next_u64());
            let mut proj = ComplexMatrix::zeros(4);
            for i in 0..4 {
                for j in 0..4 {
                    proj.set(i, j, v[i] * v[j].conj());
                }
            }
            let proj = HermitianMatrix::symmetrize(proj);
            let out = pinch(&rho, &proj).unwrap();
            assert_close(out.trace(), rho.trace(), 1e-12);
            let min = eig_hermitian(&out).unwrap().min_eigenvalue();
            assert!(min >= -1e-10, "pinching broke positivity: {min}");
        }
    }

    #[test]
    fn pinch_rejects_non_projector() {
        let rho = HermitianMatrix::identity(2).scale(0.5);
        let bad = HermitianMatrix::diag(&[0.7, 0.2]);
        assert!(matches!(pinch(&rho, &bad), Err(Error::NotProjector { .. })));
    }

    #[test]
    fn tensor_identity() {
        let i2 = ComplexMatrix::identity(2);
        let t = tensor(&i2, &i2).unwrap();
        assert!(t.sub(&ComplexMatrix::identity(4)).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let a = crate::sampling::random_density(2, 21).matrix().clone();
        let b = crate::sampling::random_density(3, 22).matrix().clone();
        let ab = tensor_hermitian(&a, &b).unwrap();
        let back = partial_trace(&ab, &[2, 3], &[0]).unwrap();
        let err = back.sub(&a).unwrap().frobenius_norm();
        assert!(err < 1e-12, "tr_B(a x b) != a tr(b): {err}");

        let back_b = partial_trace(&ab, &[2, 3], &[1]).unwrap();
        assert!(back_b.sub(&b).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn partial_trace_of_identity() {
        let i4 = HermitianMatrix::identity(4);
        let half = partial_trace(&i4, &[2, 2], &[0]).unwrap();
        let expected = HermitianMatrix::identity(2).scale(2.0);
        assert!(half.sub(&expected).unwrap().frobenius_norm() < 1e-15);
        let other = partial_trace(&i4, &[2, 2], &[1]).unwrap();
        assert!(other.sub(&expected).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let i4 = HermitianMatrix::identity(4);
        assert!(partial_trace(&i4, &[3, 2], &[0]).is_err());
    }

    #[test]
    fn dimension_cap_enforced() {
        let r = ComplexMatrix::new(5000, vec![]);
        assert!(matches!(r, Err(Error::DimensionTooLarge { .. })));
    }

    proptest::proptest! {
        #[test]
        fn eig_reconstructs_arbitrary_hermitian(seed in proptest::prelude::any::<u64>(), dim in 2usize..8) {
            let h = random_hermitian(dim, seed);
            let e = eig_hermitian(&h).unwrap();
            let err = reconstruct(&e).sub(&h).unwrap().frobenius_norm();
            proptest::prop_assert!(err <= 1e-9 * h.frobenius_norm().max(1.0));
            for pair in e.eigenvalues.windows(2) {
                proptest::prop_assert!(pair[0] <= pair[1], "eigenvalues not ascending");
            }
        }

        #[test]
        fn pinch_preserves_trace_and_positivity(seed in proptest::prelude::any::<u64>(), dim in 2usize..6) {
            let rho = crate::sampling::random_density(dim, seed).matrix().clone();
            let proj = {
                let h = random_hermitian(dim, seed ^ 0xfeed);
                proj_nonneg(&h, DEFAULT_TOL_RANK).unwrap()
            };
            let out = pinch(&rho, &proj).unwrap();
            proptest::prop_assert!((out.trace() - rho.trace()).abs() < 1e-12);
            proptest::prop_assert!(eig_hermitian(&out).unwrap().min_eigenvalue() >= -1e-10);
        }
    }
}
