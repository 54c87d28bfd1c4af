//! Entropic quantities: relative entropy `D`, collision divergence `D2`,
//! information variance `V`, the information-spectrum relative entropy
//! `Ds`, the lower bound tying `D2` of a mixture to `Ds`, and an exact
//! classical path for i.i.d. commuting inputs.
//!
//! All logarithms are base 2 and all values are in bits.
//!
//! `Ds^eps(rho || sigma) = sup { R : tr(rho P[rho <= 2^R sigma]) <= eps }`
//! is not monotone in `R` for non-commuting inputs, so the computation
//! scans an explicit candidate set (a uniform grid plus the exact crossing
//! radii, i.e. base-2 logs of the positive generalized eigenvalues of the
//! pencil) and returns the largest admissible candidate, refined by local
//! bisection. Candidates are admitted by the mass strictly above the
//! threshold crossing, which equals the left limit of the trace test; this
//! makes the commuting case land exactly on the classical breakpoints, and
//! every achievability bound downstream is continuous in `R`, so the value
//! remains valid for all of them.

use crate::error::{Error, Result};
use crate::matcore::{
    eig_hermitian, mat_func_from_eig, support_projector, EigenDecomposition, HermitianMatrix,
};
use crate::states::{validate_distribution, DensityMatrix};

use std::collections::BTreeMap;
use std::fmt;

/// Relative mass threshold above which a support violation switches a
/// divergence to its infinite branch.
const SUPPORT_MASS_TOL: f64 = 1e-9;

/// Default resolution (bits) for bucketing log-likelihood ratios in the
/// classical i.i.d. convolution.
pub const DEFAULT_CONVOLUTION_RESOLUTION: f64 = 1.0 / (1u64 << 20) as f64;

/// Largest supported number of i.i.d. copies in the classical convolution.
pub const MAX_IID_COPIES: u64 = 1_000_000;

// ---------------------------------------------------------------------------
// DivergenceValue
// ---------------------------------------------------------------------------

/// A divergence in bits, or the infinite branch triggered by a declared
/// support violation / unbounded supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivergenceValue {
    Finite(f64),
    Infinite,
}

impl DivergenceValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            DivergenceValue::Finite(v) => *v,
            DivergenceValue::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, DivergenceValue::Infinite)
    }

    /// Unwrap the finite branch or fail with `context`.
    pub fn finite_or(&self, context: &str) -> Result<f64> {
        match self {
            DivergenceValue::Finite(v) => Ok(*v),
            DivergenceValue::Infinite => Err(Error::InvalidParameter(format!(
                "{context}: divergence is infinite"
            ))),
        }
    }
}

impl fmt::Display for DivergenceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivergenceValue::Finite(v) => write!(f, "{v}"),
            DivergenceValue::Infinite => write!(f, "inf"),
        }
    }
}

// ---------------------------------------------------------------------------
// Relative entropy and information variance
// ---------------------------------------------------------------------------

fn psd_checked_eig(m: &HermitianMatrix, tol_rank: f64) -> Result<EigenDecomposition> {
    let eig = eig_hermitian(m)?;
    let min = eig.min_eigenvalue();
    if min < -tol_rank * eig.spectral_norm().max(1.0) {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(eig)
}

/// Fraction of `rho`'s mass outside the support of `sigma_eig`.
fn support_deficiency(rho: &HermitianMatrix, sigma_eig: &EigenDecomposition, tol_rank: f64) -> f64 {
    let thr = tol_rank * sigma_eig.spectral_norm();
    let inside = sigma_eig.weighted_expectation(rho, |l| if l > thr { 1.0 } else { 0.0 });
    let total = rho.trace();
    if total <= 0.0 {
        return 0.0;
    }
    ((total - inside) / total).max(0.0)
}

/// Relative entropy `D(rho || sigma) = tr(rho (log rho - log sigma))` in
/// bits, taken on the support of `rho`; infinite when `rho`'s support leaks
/// out of `sigma`'s.
pub fn relative_entropy(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tol_rank: f64,
) -> Result<DivergenceValue> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let sigma_eig = psd_checked_eig(sigma.matrix(), tol_rank)?;
    if support_deficiency(rho.matrix(), &sigma_eig, tol_rank) > SUPPORT_MASS_TOL {
        return Ok(DivergenceValue::Infinite);
    }
    let rho_eig = psd_checked_eig(rho.matrix(), tol_rank)?;
    let thr_r = tol_rank * rho_eig.spectral_norm();
    let entropy_term: f64 = rho_eig
        .eigenvalues
        .iter()
        .filter(|&&l| l > thr_r)
        .map(|&l| l * l.log2())
        .sum();
    let thr_s = tol_rank * sigma_eig.spectral_norm();
    let cross_term =
        sigma_eig.weighted_expectation(rho.matrix(), |l| if l > thr_s { l.log2() } else { 0.0 });
    Ok(DivergenceValue::Finite(entropy_term - cross_term))
}

/// Collision divergence
/// `D2(rho || sigma) = log tr[(sigma^{-1/4} rho sigma^{-1/4})^2]` in bits,
/// with the inverse taken on the support of `sigma`.
///
/// Inputs must be positive semi-definite but need not be normalized.
pub fn collision_divergence(
    rho: &HermitianMatrix,
    sigma: &HermitianMatrix,
    tol_rank: f64,
) -> Result<DivergenceValue> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    psd_checked_eig(rho, tol_rank)?;
    let sigma_eig = psd_checked_eig(sigma, tol_rank)?;
    if rho.trace() <= 0.0 {
        return Err(Error::EmptyInput("collision divergence of a zero state"));
    }
    if support_deficiency(rho, &sigma_eig, tol_rank) > SUPPORT_MASS_TOL {
        return Ok(DivergenceValue::Infinite);
    }
    let quarter_inv = mat_func_from_eig(&sigma_eig, |l| l.powf(-0.25), tol_rank)?;
    let sandwiched = quarter_inv.sandwich(rho)?;
    let collision = sandwiched.frobenius_norm().powi(2);
    Ok(DivergenceValue::Finite(collision.log2()))
}

/// Information variance
/// `V(rho || sigma) = tr(rho (log rho - log sigma - D)^2)` in bits squared.
///
/// Unlike the divergences this is undefined (an error, not infinity) when
/// the support condition fails.
pub fn info_variance(rho: &DensityMatrix, sigma: &DensityMatrix, tol_rank: f64) -> Result<f64> {
    let d = match relative_entropy(rho, sigma, tol_rank)? {
        DivergenceValue::Finite(d) => d,
        DivergenceValue::Infinite => return Err(Error::SupportViolation),
    };
    let log_rho = mat_func_from_eig(&eig_hermitian(rho.matrix())?, f64::log2, tol_rank)?;
    let log_sigma = mat_func_from_eig(&eig_hermitian(sigma.matrix())?, f64::log2, tol_rank)?;
    let shift = HermitianMatrix::identity(rho.dim()).scale(d);
    let x = log_rho.sub(&log_sigma)?.sub(&shift)?;
    let xr = x.as_matrix().matmul(rho.matrix().as_matrix())?;
    let xrx = xr.matmul(x.as_matrix())?;
    Ok(xrx.trace().re.max(0.0))
}

// ---------------------------------------------------------------------------
// Information spectrum relative entropy
// ---------------------------------------------------------------------------

/// Query parameters for the information-spectrum computation.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumQuery {
    /// Mass threshold in (0, 1).
    pub epsilon: f64,
    /// Number of uniform grid candidates added across the search window.
    pub grid_points: usize,
    /// Bisection stops once the bracket is this narrow (bits).
    pub refine_tol: f64,
    /// Extra widening of the search window (bits) on each side.
    pub window_pad: f64,
}

impl SpectrumQuery {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon {epsilon} outside (0, 1)"
            )));
        }
        Ok(Self {
            epsilon,
            grid_points: 4001,
            refine_tol: 1e-4,
            window_pad: 0.0,
        })
    }

    pub fn with_grid_points(mut self, grid_points: usize) -> Result<Self> {
        if grid_points < 3 {
            return Err(Error::InvalidParameter(format!(
                "grid_points {grid_points} < 3"
            )));
        }
        self.grid_points = grid_points;
        Ok(self)
    }

    pub fn with_refine_tol(mut self, refine_tol: f64) -> Result<Self> {
        if refine_tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "refine_tol {refine_tol} must be positive"
            )));
        }
        self.refine_tol = refine_tol;
        Ok(self)
    }

    pub fn with_window_pad(mut self, pad: f64) -> Self {
        self.window_pad = pad.max(0.0);
        self
    }
}

#[derive(Debug, Clone, Copy)]
struct CandidatePoint {
    r: f64,
    /// `tr(rho P[2^r sigma - rho >= 0])`, zero eigenvalues included.
    mass: f64,
    /// Same trace with the zero eigenspace excluded; equals the left limit
    /// of `mass` at a crossing radius.
    mass_strict: f64,
}

/// Precomputed spectrum data for one `(rho, sigma)` pair.
///
/// Building the curve costs one eigendecomposition per candidate; answering
/// a query for some `epsilon` afterwards only pays for the local bisection,
/// so sharing one curve across many `epsilon` values is cheap.
#[derive(Debug, Clone)]
pub struct SpectrumCurve {
    rho: HermitianMatrix,
    sigma: HermitianMatrix,
    tol_rank: f64,
    candidates: Vec<CandidatePoint>,
    /// Limit of the trace test as `R -> infinity`.
    mass_limit: f64,
    /// Set when `sigma` has no support at all (the test mass is 0 for every
    /// `R`, so the supremum is unbounded for any `epsilon`).
    degenerate_infinite: bool,
    /// Fraction of `rho`'s mass outside the support of `sigma`.
    support_deficiency: f64,
}

fn spectrum_mass(
    rho: &HermitianMatrix,
    sigma: &HermitianMatrix,
    r: f64,
    tol_rank: f64,
) -> Result<(f64, f64)> {
    // Work with a positive rescaling of 2^R sigma - rho so that entries
    // stay inside f64 range for any reasonable R.
    let u = if r >= 0.0 {
        sigma.sub(&rho.scale(2f64.powf(-r)))?
    } else {
        sigma.scale(2f64.powf(r)).sub(rho)?
    };
    let eig = eig_hermitian(&u)?;
    let thr = tol_rank * eig.spectral_norm();
    let mass = eig.weighted_expectation(rho, |l| if l >= -thr { 1.0 } else { 0.0 });
    let mass_strict = eig.weighted_expectation(rho, |l| if l > thr { 1.0 } else { 0.0 });
    Ok((mass, mass_strict))
}

impl SpectrumCurve {
    /// Build the candidate set for `rho` (a state) against a positive
    /// semi-definite, not necessarily normalized `sigma`.
    pub fn new(
        rho: &DensityMatrix,
        sigma: &HermitianMatrix,
        grid_points: usize,
        window_pad: f64,
        tol_rank: f64,
    ) -> Result<Self> {
        if rho.dim() != sigma.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                got: sigma.dim(),
            });
        }
        if grid_points < 3 {
            return Err(Error::InvalidParameter(format!(
                "grid_points {grid_points} < 3"
            )));
        }
        let rho_eig = psd_checked_eig(rho.matrix(), tol_rank)?;
        let sigma_eig = psd_checked_eig(sigma, tol_rank)?;

        let thr_s = tol_rank * sigma_eig.spectral_norm();
        let sigma_pos: Vec<f64> = sigma_eig
            .eigenvalues
            .iter()
            .copied()
            .filter(|&l| l > thr_s)
            .collect();
        if sigma_pos.is_empty() {
            return Ok(Self {
                rho: rho.matrix().clone(),
                sigma: sigma.clone(),
                tol_rank,
                candidates: Vec::new(),
                mass_limit: 0.0,
                degenerate_infinite: true,
                support_deficiency: 1.0,
            });
        }
        let thr_r = tol_rank * rho_eig.spectral_norm();
        let rho_pos: Vec<f64> = rho_eig
            .eigenvalues
            .iter()
            .copied()
            .filter(|&l| l > thr_r)
            .collect();
        if rho_pos.is_empty() {
            return Err(Error::EmptyInput("information spectrum of a zero state"));
        }

        let r_lo = rho_pos[0].log2() - sigma_pos.last().unwrap().log2() - 1.0 - window_pad;
        let r_hi = rho_pos.last().unwrap().log2() - sigma_pos[0].log2() + 1.0 + window_pad;

        // Crossing radii: logs of the positive generalized eigenvalues of
        // the pencil (rho, sigma) on the support of sigma.
        let inv_half = mat_func_from_eig(&sigma_eig, |l| l.powf(-0.5), tol_rank)?;
        let pencil = inv_half.sandwich(rho.matrix())?;
        let pencil_eig = eig_hermitian(&pencil)?;
        let mut rs: Vec<f64> = pencil_eig
            .eigenvalues
            .iter()
            .copied()
            .filter(|&mu| mu > 1e-300)
            .map(f64::log2)
            .filter(|r| r.is_finite() && *r >= r_lo && *r <= r_hi)
            .collect();

        let step = (r_hi - r_lo) / (grid_points - 1) as f64;
        for k in 0..grid_points {
            rs.push(r_lo + step * k as f64);
        }
        rs.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
        rs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

        let candidates = rs
            .into_iter()
            .map(|r| {
                let (mass, mass_strict) = spectrum_mass(rho.matrix(), sigma, r, tol_rank)?;
                Ok(CandidatePoint {
                    r,
                    mass,
                    mass_strict,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        // Limit of the trace test for R -> infinity: everything except the
        // part of rho seen inside ker(sigma).
        let q = HermitianMatrix::identity(rho.dim()).sub(&mat_func_from_eig(
            &sigma_eig,
            |_| 1.0,
            tol_rank,
        )?)?;
        let boxed = q.sandwich(rho.matrix())?;
        let boxed_supp = support_projector(&boxed, tol_rank)?;
        let mass_limit = (rho.matrix().trace() - boxed_supp.trace_product(rho.matrix())?).max(0.0);

        let support_deficiency = support_deficiency(rho.matrix(), &sigma_eig, tol_rank);

        Ok(Self {
            rho: rho.matrix().clone(),
            sigma: sigma.clone(),
            tol_rank,
            candidates,
            mass_limit,
            degenerate_infinite: false,
            support_deficiency,
        })
    }

    /// Fraction of the first argument's mass outside the support of the
    /// second. Nonzero deficiency means the supremum may be unbounded; the
    /// computed value is still the supremum of the trace test.
    pub fn support_deficiency(&self) -> f64 {
        self.support_deficiency
    }

    /// Largest admissible candidate for the given `epsilon`, bisection-refined.
    pub fn query(&self, epsilon: f64, refine_tol: f64) -> Result<DivergenceValue> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon {epsilon} outside (0, 1)"
            )));
        }
        if refine_tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "refine_tol {refine_tol} must be positive"
            )));
        }
        if self.degenerate_infinite {
            return Ok(DivergenceValue::Infinite);
        }
        let admissible = |c: &CandidatePoint| c.mass_strict <= epsilon;
        let last_admissible = self.candidates.iter().rposition(admissible);

        let Some(idx) = last_admissible else {
            // The window was not generous enough downward; walk down.
            return self.extend_downward(epsilon, refine_tol);
        };
        if idx == self.candidates.len() - 1 {
            if self.mass_limit <= epsilon {
                return Ok(DivergenceValue::Infinite);
            }
            // Everything in the window is admissible yet the limit is not;
            // the largest candidate is still a valid under-approximation.
            return Ok(DivergenceValue::Finite(self.candidates[idx].r));
        }

        let lo = self.candidates[idx];
        let hi = self.candidates[idx + 1];
        if lo.mass > epsilon {
            // The supremum sits exactly at this crossing radius: admissible
            // from the left, not pointwise. Return the crossing itself.
            return Ok(DivergenceValue::Finite(lo.r));
        }
        let mut lo_r = lo.r;
        let mut hi_r = hi.r;
        while hi_r - lo_r > refine_tol {
            let mid = 0.5 * (lo_r + hi_r);
            let (_, strict) = spectrum_mass(&self.rho, &self.sigma, mid, self.tol_rank)?;
            if strict <= epsilon {
                lo_r = mid;
            } else {
                hi_r = mid;
            }
        }
        Ok(DivergenceValue::Finite(lo_r))
    }

    fn extend_downward(&self, epsilon: f64, refine_tol: f64) -> Result<DivergenceValue> {
        let first = self
            .candidates
            .first()
            .ok_or(Error::EmptyInput("empty candidate set"))?;
        let span = (self.candidates.last().unwrap().r - first.r).max(1.0);
        let mut hi_r = first.r;
        let mut step = span;
        for _ in 0..64 {
            let lo_r = hi_r - step;
            let (_, strict) = spectrum_mass(&self.rho, &self.sigma, lo_r, self.tol_rank)?;
            if strict <= epsilon {
                let mut lo = lo_r;
                let mut hi = hi_r;
                while hi - lo > refine_tol {
                    let mid = 0.5 * (lo + hi);
                    let (_, s) = spectrum_mass(&self.rho, &self.sigma, mid, self.tol_rank)?;
                    if s <= epsilon {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Ok(DivergenceValue::Finite(lo));
            }
            hi_r = lo_r;
            step *= 2.0;
        }
        Err(Error::InvalidParameter(
            "no admissible spectrum radius found".into(),
        ))
    }
}

/// Information spectrum relative entropy `Ds^eps(rho || sigma)` for density
/// matrices.
pub fn info_spectrum(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    query: &SpectrumQuery,
    tol_rank: f64,
) -> Result<DivergenceValue> {
    info_spectrum_psd(rho, sigma.matrix(), query, tol_rank)
}

/// Same computation with an unnormalized positive semi-definite second
/// argument (the definition imposes no normalization on it).
pub fn info_spectrum_psd(
    rho: &DensityMatrix,
    sigma: &HermitianMatrix,
    query: &SpectrumQuery,
    tol_rank: f64,
) -> Result<DivergenceValue> {
    let curve = SpectrumCurve::new(rho, sigma, query.grid_points, query.window_pad, tol_rank)?;
    curve.query(query.epsilon, query.refine_tol)
}

// ---------------------------------------------------------------------------
// Collision-vs-spectrum lower bound
// ---------------------------------------------------------------------------

/// Lower bound on `exp D2(rho || lambda rho + (1 - lambda) sigma)` in terms
/// of the information spectrum:
/// `(1 - eps) * [lambda + (1 - lambda) 2^{-Ds}]^{-1}`.
pub fn collision_vs_spectrum_bound(lambda: f64, epsilon: f64, ds: DivergenceValue) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda {lambda} outside (0, 1)"
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon {epsilon} outside (0, 1)"
        )));
    }
    Ok(match ds {
        DivergenceValue::Infinite => (1.0 - epsilon) / lambda,
        DivergenceValue::Finite(r) => (1.0 - epsilon) / (lambda + (1.0 - lambda) * 2f64.powf(-r)),
    })
}

// ---------------------------------------------------------------------------
// Classical i.i.d. information spectrum via convolution
// ---------------------------------------------------------------------------

/// Exact `Ds^eps(p^{(x) n} || q^{(x) n})` for finite distributions, computed
/// by convolving the distribution of `log2(p(x)/q(x))` under `p`.
///
/// Log-ratio values are bucketed to `resolution` bits; the returned radius
/// is rounded down by the accumulated bucketing error so it always
/// under-approximates the true supremum (and is exact for inputs whose
/// ratios already sit on the bucket lattice, e.g. `p = q`).
pub fn iid_spectrum_classical(
    p: &[f64],
    q: &[f64],
    n: u64,
    epsilon: f64,
) -> Result<DivergenceValue> {
    iid_spectrum_classical_with_resolution(p, q, n, epsilon, DEFAULT_CONVOLUTION_RESOLUTION)
}

pub fn iid_spectrum_classical_with_resolution(
    p: &[f64],
    q: &[f64],
    n: u64,
    epsilon: f64,
    resolution: f64,
) -> Result<DivergenceValue> {
    validate_distribution(p)?;
    validate_distribution(q)?;
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon {epsilon} outside (0, 1)"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if n > MAX_IID_COPIES {
        return Err(Error::EnumerationTooLarge {
            size: n as u128,
            cap: MAX_IID_COPIES as u128,
        });
    }
    if resolution <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "resolution {resolution} must be positive"
        )));
    }

    // Single-letter distribution of the log-likelihood ratio under p.
    let mut base: BTreeMap<i64, f64> = BTreeMap::new();
    let mut quant_err = 0.0f64;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return Err(Error::SupportViolation);
        }
        let ratio = pi.log2() - qi.log2();
        let idx = (ratio / resolution).round();
        if idx.abs() > (i64::MAX / 4) as f64 {
            return Err(Error::InvalidParameter(
                "log-ratio exceeds the bucketable range".into(),
            ));
        }
        let idx = idx as i64;
        quant_err = quant_err.max((ratio - idx as f64 * resolution).abs());
        *base.entry(idx).or_insert(0.0) += pi;
    }

    let dist = convolve_power(&base, n)?;

    // The supremum is the first bucket where the cumulative mass exceeds
    // epsilon; below it the trace test is still <= epsilon.
    let mut cum = 0.0;
    let mut jump_idx = *dist.keys().next_back().expect("distribution is nonempty");
    for (&idx, &mass) in &dist {
        cum += mass;
        if cum > epsilon {
            jump_idx = idx;
            break;
        }
    }
    let value = jump_idx as f64 * resolution - n as f64 * quant_err;
    Ok(DivergenceValue::Finite(value))
}

/// n-fold convolution by binary powering over bucket-indexed distributions.
fn convolve_power(base: &BTreeMap<i64, f64>, n: u64) -> Result<BTreeMap<i64, f64>> {
    const MAX_SUPPORT: usize = 4_000_000;
    let mut acc: Option<BTreeMap<i64, f64>> = None;
    let mut power = base.clone();
    let mut remaining = n;
    loop {
        if remaining & 1 == 1 {
            acc = Some(match acc {
                None => power.clone(),
                Some(a) => convolve(&a, &power, MAX_SUPPORT)?,
            });
        }
        remaining >>= 1;
        if remaining == 0 {
            break;
        }
        power = convolve(&power, &power, MAX_SUPPORT)?;
    }
    Ok(acc.expect("n >= 1"))
}

fn convolve(
    a: &BTreeMap<i64, f64>,
    b: &BTreeMap<i64, f64>,
    cap: usize,
) -> Result<BTreeMap<i64, f64>> {
    // Bound the work, not just the memory: many-valued ratio lattices make
    // the pairwise product explode long before the support cap trips.
    const MAX_OPS: u128 = 2_000_000_000;
    let ops = a.len() as u128 * b.len() as u128;
    if ops > MAX_OPS {
        return Err(Error::EnumerationTooLarge {
            size: ops,
            cap: MAX_OPS,
        });
    }
    let mut out: BTreeMap<i64, f64> = BTreeMap::new();
    for (&ia, &pa) in a {
        for (&ib, &pb) in b {
            *out.entry(ia + ib).or_insert(0.0) += pa * pb;
        }
        if out.len() > cap {
            return Err(Error::EnumerationTooLarge {
                size: out.len() as u128,
                cap: cap as u128,
            });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
