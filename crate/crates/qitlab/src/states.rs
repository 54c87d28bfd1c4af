//! Density matrices, classical-quantum joint states, and POVMs.

use crate::error::{Error, Result};
use crate::matcore::{
    eig_hermitian, support_projector, tensor_hermitian, ComplexMatrix, HermitianMatrix,
};

/// Largest dimension at which a classical-quantum joint state is
/// materialized as an explicit block-diagonal matrix.
pub const MAX_JOINT_DIM: usize = 256;

/// Eigenvalue floor for density-matrix validation.
pub const DENSITY_PSD_TOL: f64 = 1e-9;
/// Trace tolerance for density-matrix validation.
pub const DENSITY_TRACE_TOL: f64 = 1e-9;
/// Per-element positivity tolerance for POVM validation.
pub const POVM_PSD_TOL: f64 = 1e-8;
/// Completeness tolerance: Frobenius distance between the element sum and
/// the declared support projector.
pub const POVM_COMPLETENESS_TOL: f64 = 1e-7;

// ---------------------------------------------------------------------------
// DensityMatrix
// ---------------------------------------------------------------------------

/// Positive semi-definite, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: HermitianMatrix,
}

impl DensityMatrix {
    /// Validating constructor: eigenvalues `>= -1e-9` and `|tr - 1| <= 1e-9`.
    pub fn new(mat: HermitianMatrix) -> Result<Self> {
        let trace = mat.trace();
        if (trace - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(Error::NotNormalized { trace });
        }
        let eig = eig_hermitian(&mat)?;
        let min = eig.min_eigenvalue();
        if min < -DENSITY_PSD_TOL {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(Self { mat })
    }

    /// Constructor for states that are valid by construction (convex
    /// mixtures, marginals, normalized PSD matrices). Skips the eigenvalue
    /// check but still insists on a sane trace.
    pub(crate) fn new_unchecked(mat: HermitianMatrix) -> Self {
        debug_assert!((mat.trace() - 1.0).abs() < 1e-6, "trace {}", mat.trace());
        Self { mat }
    }

    /// Pure computational-basis state |k><k|.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {k} out of range for dim {dim}"
            )));
        }
        let mut values = vec![0.0; dim];
        values[k] = 1.0;
        Ok(Self {
            mat: HermitianMatrix::diag(&values),
        })
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: HermitianMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// Classical (diagonal) state from a probability vector.
    pub fn from_distribution(p: &[f64]) -> Result<Self> {
        validate_distribution(p)?;
        Ok(Self {
            mat: HermitianMatrix::diag(p),
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> HermitianMatrix {
        self.mat
    }
}

pub(crate) fn validate_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::BadDistribution {
            reason: "empty probability vector".into(),
        });
    }
    for (i, &v) in p.iter().enumerate() {
        if !v.is_finite() || v < -1e-12 {
            return Err(Error::BadDistribution {
                reason: format!("entry {i} is {v}"),
            });
        }
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::BadDistribution {
            reason: format!("sum is {s}, expected 1"),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// CQState
// ---------------------------------------------------------------------------

/// Classical-quantum state: a distribution `p_X` together with one
/// conditional density matrix per symbol, all on the same output space.
#[derive(Debug, Clone)]
pub struct CQState {
    probs: Vec<f64>,
    conditionals: Vec<DensityMatrix>,
}

impl CQState {
    pub fn new(probs: Vec<f64>, conditionals: Vec<DensityMatrix>) -> Result<Self> {
        validate_distribution(&probs)?;
        if probs.len() != conditionals.len() {
            return Err(Error::DimensionMismatch {
                expected: probs.len(),
                got: conditionals.len(),
            });
        }
        let dim_b = conditionals
            .first()
            .ok_or(Error::EmptyInput("CQ state with no symbols"))?
            .dim();
        for c in &conditionals {
            if c.dim() != dim_b {
                return Err(Error::DimensionMismatch {
                    expected: dim_b,
                    got: c.dim(),
                });
            }
        }
        Ok(Self {
            probs,
            conditionals,
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn output_dim(&self) -> usize {
        self.conditionals[0].dim()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn conditional(&self, x: usize) -> &DensityMatrix {
        &self.conditionals[x]
    }

    pub fn conditionals(&self) -> &[DensityMatrix] {
        &self.conditionals
    }
}

/// Materialize the block-diagonal joint state: block `x` equals `p(x) rho_x`.
pub fn joint_state(cq: &CQState) -> Result<DensityMatrix> {
    let dim = cq.alphabet_size() * cq.output_dim();
    if dim > MAX_JOINT_DIM {
        return Err(Error::DimensionTooLarge {
            dim,
            max: MAX_JOINT_DIM,
        });
    }
    let d = cq.output_dim();
    let mut m = ComplexMatrix::zeros(dim);
    for (x, (p, rho)) in cq.probs.iter().zip(&cq.conditionals).enumerate() {
        for i in 0..d {
            for j in 0..d {
                m.set(x * d + i, x * d + j, rho.matrix().get(i, j) * *p);
            }
        }
    }
    Ok(DensityMatrix::new_unchecked(HermitianMatrix::symmetrize(m)))
}

/// Marginals of the joint state: `rho_X = diag(p_X)` and
/// `rho_B = sum_x p(x) rho_x`.
pub fn marginals(cq: &CQState) -> (DensityMatrix, DensityMatrix) {
    let rho_x = DensityMatrix::new_unchecked(HermitianMatrix::diag(&cq.probs));
    let mut acc = HermitianMatrix::zeros(cq.output_dim());
    for (p, rho) in cq.probs.iter().zip(&cq.conditionals) {
        acc = acc
            .add(&rho.matrix().scale(*p))
            .expect("conditionals share a dimension");
    }
    (rho_x, DensityMatrix::new_unchecked(acc))
}

/// Product of the marginals, `rho_X (x) rho_B`, as a density matrix on the
/// joint space.
pub fn product_of_marginals(cq: &CQState) -> Result<DensityMatrix> {
    let (rho_x, rho_b) = marginals(cq);
    Ok(DensityMatrix::new_unchecked(tensor_hermitian(
        rho_x.matrix(),
        rho_b.matrix(),
    )?))
}

// ---------------------------------------------------------------------------
// POVM
// ---------------------------------------------------------------------------

/// Indexed family of positive semi-definite operators summing to a declared
/// support projector.
///
/// The support is declared by whichever constructor built the measurement
/// (computed from the conditioning state), never inferred after the fact.
#[derive(Debug, Clone)]
pub struct Povm {
    pub elements: Vec<HermitianMatrix>,
    pub support: HermitianMatrix,
}

/// Outcome of [`validate_povm`]: worst violations per invariant.
#[derive(Debug, Clone)]
pub struct PovmReport {
    /// Most negative eigenvalue found across all elements.
    pub worst_negative_eigenvalue: f64,
    /// Frobenius distance between the element sum and the declared support.
    pub completeness_error: f64,
    pub psd_ok: bool,
    pub completeness_ok: bool,
}

impl PovmReport {
    pub fn passed(&self) -> bool {
        self.psd_ok && self.completeness_ok
    }
}

/// Check every POVM invariant and report the worst violations.
pub fn validate_povm(povm: &Povm) -> Result<PovmReport> {
    let dim = povm.support.dim();
    let mut worst = 0.0f64;
    let mut sum = HermitianMatrix::zeros(dim);
    for e in &povm.elements {
        if e.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: e.dim(),
            });
        }
        let min = eig_hermitian(e)?.min_eigenvalue();
        worst = worst.min(min);
        sum = sum.add(e)?;
    }
    let completeness_error = sum.sub(&povm.support)?.frobenius_norm();
    Ok(PovmReport {
        worst_negative_eigenvalue: worst,
        completeness_error,
        psd_ok: worst >= -POVM_PSD_TOL,
        completeness_ok: completeness_error <= POVM_COMPLETENESS_TOL,
    })
}

/// Projector onto the support of a state's matrix, the usual choice for a
/// declared POVM support.
pub fn state_support(rho: &HermitianMatrix, tol_rank: f64) -> Result<HermitianMatrix> {
    support_projector(rho, tol_rank)
}
