//! Classical data compression with quantum side information.
//!
//! The sender hashes a classical source symbol into one of `M` bins; the
//! receiver, holding a correlated quantum system and the bin index,
//! decodes the symbol with a pretty-good-measurement restricted to the
//! bin. The module computes exact and Monte Carlo average success over
//! random hashes, the collision-divergence lower bound on it, its
//! information-spectrum relaxation, and the bin count guaranteeing a
//! target error.

use crate::divergence::{collision_divergence, DivergenceValue, SpectrumCurve, SpectrumQuery};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, mean_and_stderr, pairwise_sum};
use crate::matcore::{eig_hermitian, mat_func_from_eig, tensor_hermitian, HermitianMatrix};
use crate::sampling::counter_u01;
use crate::states::{joint_state, marginals, CQState, Povm};

/// Cap on `M^|X|`, the number of hash functions enumerated in exact mode.
pub const EXACT_HASH_ENUMERATION_CAP: u128 = 1_000_000;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// A concrete hash assignment `h : X -> {0, .., bin_count - 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashAssignment {
    bins: Vec<usize>,
    bin_count: usize,
}

impl HashAssignment {
    pub fn new(bins: Vec<usize>, bin_count: usize) -> Result<Self> {
        if bins.is_empty() {
            return Err(Error::EmptyInput("hash over an empty alphabet"));
        }
        if bin_count == 0 {
            return Err(Error::EmptyInput("hash with zero bins"));
        }
        if let Some(&bad) = bins.iter().find(|&&b| b >= bin_count) {
            return Err(Error::InvalidParameter(format!(
                "bin index {bad} outside 0..{bin_count}"
            )));
        }
        Ok(Self { bins, bin_count })
    }

    pub fn bin(&self, x: usize) -> usize {
        self.bins[x]
    }

    pub fn bin_count(&self) -> usize {
        self.bin_count
    }

    pub fn alphabet_size(&self) -> usize {
        self.bins.len()
    }

    /// Symbols mapped to bin `m`.
    pub fn members(&self, m: usize) -> Vec<usize> {
        (0..self.bins.len())
            .filter(|&x| self.bins[x] == m)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwMode {
    Exact,
    MonteCarlo { samples: usize },
}

/// A source-coding experiment over uniformly random hash functions.
#[derive(Debug, Clone)]
pub struct SwExperiment {
    pub source: CQState,
    pub bin_count: usize,
    pub mode: SwMode,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool. Affects speed only.
    pub threads: Option<usize>,
}

/// Decoder for one bin: POVM elements aligned with `symbols`.
#[derive(Debug, Clone)]
pub struct BinDecoder {
    pub symbols: Vec<usize>,
    pub povm: Povm,
}

// ---------------------------------------------------------------------------
// Decoding measurements and success probabilities
// ---------------------------------------------------------------------------

/// The receiver's POVM for bin `m`:
/// `F_x = p(x) S_m^{-1/2} rho_x S_m^{-1/2}` over symbols `x` in the bin,
/// where `S_m = sum_{x in bin} p(x) rho_x`. The elements sum to the support
/// projector of `S_m`; an empty bin yields an empty POVM on zero support.
pub fn bob_povm(
    source: &CQState,
    h: &HashAssignment,
    m: usize,
    tol_rank: f64,
) -> Result<BinDecoder> {
    if h.alphabet_size() != source.alphabet_size() {
        return Err(Error::DimensionMismatch {
            expected: source.alphabet_size(),
            got: h.alphabet_size(),
        });
    }
    let d = source.output_dim();
    let symbols = h.members(m);
    if symbols.is_empty() {
        return Ok(BinDecoder {
            symbols,
            povm: Povm {
                elements: Vec::new(),
                support: HermitianMatrix::zeros(d),
            },
        });
    }
    let mut s = HermitianMatrix::zeros(d);
    for &x in &symbols {
        s = s.add(&source.conditional(x).matrix().scale(source.probs()[x]))?;
    }
    let s_eig = eig_hermitian(&s)?;
    let inv_half = mat_func_from_eig(&s_eig, |l| l.powf(-0.5), tol_rank)?;
    let support = mat_func_from_eig(&s_eig, |_| 1.0, tol_rank)?;
    let elements = symbols
        .iter()
        .map(|&x| {
            Ok(inv_half
                .sandwich(source.conditional(x).matrix())?
                .scale(source.probs()[x]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BinDecoder {
        symbols,
        povm: Povm { elements, support },
    })
}

/// Average success probability of the scheme under a fixed hash:
/// `sum_x p(x) tr(rho_x F_x^{h(x)})`.
pub fn sw_success_probability(source: &CQState, h: &HashAssignment, tol_rank: f64) -> Result<f64> {
    let mut acc = 0.0;
    for m in 0..h.bin_count() {
        let decoder = bob_povm(source, h, m, tol_rank)?;
        for (&x, element) in decoder.symbols.iter().zip(&decoder.povm.elements) {
            acc += source.probs()[x] * element.trace_product(source.conditional(x).matrix())?;
        }
    }
    Ok(acc)
}

fn decode_hash(index: usize, alphabet: usize, bin_count: usize) -> Vec<usize> {
    let mut idx = index;
    let mut bins = Vec::with_capacity(alphabet);
    for _ in 0..alphabet {
        bins.push(idx % bin_count);
        idx /= bin_count;
    }
    bins
}

/// Expected success probability over all `M^|X|` hash functions, each
/// symbol's bin uniform and independent.
pub fn sw_expected_success_exact(exp: &SwExperiment, tol_rank: f64) -> Result<f64> {
    let alphabet = exp.source.alphabet_size();
    if exp.bin_count == 0 {
        return Err(Error::EmptyInput("bin count must be at least 1"));
    }
    let total = (exp.bin_count as u128)
        .checked_pow(alphabet as u32)
        .filter(|&t| t <= EXACT_HASH_ENUMERATION_CAP)
        .ok_or(Error::EnumerationTooLarge {
            size: (exp.bin_count as u128).saturating_pow(alphabet as u32),
            cap: EXACT_HASH_ENUMERATION_CAP,
        })?;
    let values = map_indexed(total as usize, exp.threads, |index| {
        let h = HashAssignment::new(decode_hash(index, alphabet, exp.bin_count), exp.bin_count)?;
        sw_success_probability(&exp.source, &h, tol_rank)
    })?;
    Ok(pairwise_sum(&values) / total as f64)
}

/// Monte Carlo `(mean, stderr)` over seeded random hashes; the bin of
/// symbol `x` in sample `i` is a pure function of `(seed, i, x)`.
pub fn sw_expected_success_mc(exp: &SwExperiment, tol_rank: f64) -> Result<(f64, f64)> {
    let samples = match exp.mode {
        SwMode::MonteCarlo { samples } if samples >= 1 => samples,
        SwMode::MonteCarlo { .. } => {
            return Err(Error::InvalidParameter("samples must be at least 1".into()))
        }
        SwMode::Exact => {
            return Err(Error::InvalidParameter(
                "experiment mode is exact, not monte-carlo".into(),
            ))
        }
    };
    if exp.bin_count == 0 {
        return Err(Error::EmptyInput("bin count must be at least 1"));
    }
    let alphabet = exp.source.alphabet_size();
    let values = map_indexed(samples, exp.threads, |i| {
        let bins: Vec<usize> = (0..alphabet)
            .map(|x| {
                let u = counter_u01(exp.seed, i as u64, x as u64);
                ((u * exp.bin_count as f64) as usize).min(exp.bin_count - 1)
            })
            .collect();
        let h = HashAssignment::new(bins, exp.bin_count)?;
        sw_success_probability(&exp.source, &h, tol_rank)
    })?;
    Ok(mean_and_stderr(&values))
}

// ---------------------------------------------------------------------------
// One-shot bounds
// ---------------------------------------------------------------------------

/// The lower bound pair for hash coding with `M` bins.
#[derive(Debug)]
pub struct SwSuccessBound {
    /// `exp D2(rho_XB || (1 - 1/M) rho_XB + (1/M) I_X (x) rho_B)`.
    pub tight: f64,
    bin_count: usize,
    curve: SpectrumCurve,
    refine_tol: f64,
}

impl SwSuccessBound {
    /// Information-spectrum relaxation
    /// `(1 - eps) / (1 + M^{-1} 2^{-Ds^eps(rho_XB || I_X (x) rho_B)})`.
    pub fn relaxed(&self, epsilon: f64) -> Result<f64> {
        let ds = self.curve.query(epsilon, self.refine_tol)?;
        let tail = match ds {
            DivergenceValue::Infinite => 0.0,
            DivergenceValue::Finite(r) => 2f64.powf(-r) / self.bin_count as f64,
        };
        Ok((1.0 - epsilon) / (1.0 + tail))
    }
}

/// One-shot lower bounds on the expected success probability with `M` bins.
pub fn sw_success_lower_bound(
    source: &CQState,
    bin_count: usize,
    query: &SpectrumQuery,
    tol_rank: f64,
) -> Result<SwSuccessBound> {
    if bin_count == 0 {
        return Err(Error::EmptyInput("bin count must be at least 1"));
    }
    let rho_xb = joint_state(source)?;
    let (_, rho_b) = marginals(source);
    let id_x = HermitianMatrix::identity(source.alphabet_size());
    let id_rho_b = tensor_hermitian(&id_x, rho_b.matrix())?;
    let m = bin_count as f64;
    let mix = rho_xb
        .matrix()
        .scale(1.0 - 1.0 / m)
        .add(&id_rho_b.scale(1.0 / m))?;
    let d2 = collision_divergence(rho_xb.matrix(), &mix, tol_rank)?
        .finite_or("hash-coding collision bound")?;
    // The second argument is unnormalized (trace |X|); widen the candidate
    // window accordingly.
    let pad = (source.alphabet_size() as f64).log2() + query.window_pad;
    let curve = SpectrumCurve::new(&rho_xb, &id_rho_b, query.grid_points, pad, tol_rank)?;
    Ok(SwSuccessBound {
        tight: 2f64.powf(d2),
        bin_count,
        curve,
        refine_tol: query.refine_tol,
    })
}

/// Bin count sufficient for error at most `epsilon`:
/// `ceil(2^{-Ds^delta(rho_XB || I_X (x) rho_B) - log2(eps - delta)})`.
pub fn sw_message_count(source: &CQState, epsilon: f64, delta: f64, tol_rank: f64) -> Result<u64> {
    let query = SpectrumQuery::new(delta)?;
    let rho_xb = joint_state(source)?;
    let (_, rho_b) = marginals(source);
    let id_x = HermitianMatrix::identity(source.alphabet_size());
    let id_rho_b = tensor_hermitian(&id_x, rho_b.matrix())?;
    let pad = (source.alphabet_size() as f64).log2();
    let curve = SpectrumCurve::new(&rho_xb, &id_rho_b, query.grid_points, pad, tol_rank)?;
    let ds = curve.query(delta, query.refine_tol)?;
    sw_message_count_from_spectrum(ds, epsilon, delta)
}

/// The bin-count formula alone, for a known spectrum value.
pub fn sw_message_count_from_spectrum(
    ds: DivergenceValue,
    epsilon: f64,
    delta: f64,
) -> Result<u64> {
    if !(epsilon > delta && delta > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < delta < epsilon < 1, got delta {delta}, epsilon {epsilon}"
        )));
    }
    let r = match ds {
        DivergenceValue::Finite(r) => r,
        DivergenceValue::Infinite => return Ok(1),
    };
    let value = 2f64.powf(-r) / (epsilon - delta);
    if !value.is_finite() || value >= u64::MAX as f64 {
        return Err(Error::InvalidParameter(
            "required bin count overflows".into(),
        ));
    }
    Ok((value.ceil() as u64).max(1))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
