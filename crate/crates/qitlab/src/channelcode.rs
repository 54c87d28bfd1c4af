//! Classical-quantum channel coding with pretty-good-measurement decoding.
//!
//! A channel maps input symbols to output states. Random codebooks are
//! decoded with the pretty good measurement; the module computes the exact
//! (enumerated) or Monte Carlo expected success probability, the one-shot
//! lower bound on it in terms of collision divergence, the message count
//! guaranteed by the information-spectrum bound, and the channel's
//! capacity and dispersion.

use crate::divergence::{
    collision_divergence, info_spectrum, relative_entropy, DivergenceValue, SpectrumQuery,
};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, mean_and_stderr, pairwise_sum};
use crate::matcore::{eig_hermitian, mat_func_from_eig, HermitianMatrix};
use crate::sampling::counter_u01;
use crate::states::{
    joint_state, product_of_marginals, validate_distribution, CQState, DensityMatrix, Povm,
};

/// Cap on `|X|^M`, the number of codebooks enumerated in exact mode.
pub const EXACT_ENUMERATION_CAP: u128 = 1_000_000;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Classical-quantum channel: input symbol `x` produces output state `rho_x`.
#[derive(Debug, Clone)]
pub struct CQChannel {
    states: Vec<DensityMatrix>,
}

impl CQChannel {
    pub fn new(states: Vec<DensityMatrix>) -> Result<Self> {
        let dim = states
            .first()
            .ok_or(Error::EmptyInput("channel with no input symbols"))?
            .dim();
        for s in &states {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.dim(),
                });
            }
        }
        Ok(Self { states })
    }

    pub fn alphabet_size(&self) -> usize {
        self.states.len()
    }

    pub fn output_dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn state(&self, x: usize) -> &DensityMatrix {
        &self.states[x]
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    /// Joint state of the channel driven by `input_dist`.
    pub fn cq_state(&self, input_dist: &[f64]) -> Result<CQState> {
        if input_dist.len() != self.alphabet_size() {
            return Err(Error::DimensionMismatch {
                expected: self.alphabet_size(),
                got: input_dist.len(),
            });
        }
        CQState::new(input_dist.to_vec(), self.states.clone())
    }
}

/// A list of codewords; message `m` is encoded as `codewords[m]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    codewords: Vec<usize>,
}

impl Codebook {
    pub fn new(codewords: Vec<usize>, alphabet_size: usize) -> Result<Self> {
        if codewords.is_empty() {
            return Err(Error::EmptyInput("empty codebook"));
        }
        if let Some(&bad) = codewords.iter().find(|&&x| x >= alphabet_size) {
            return Err(Error::InvalidParameter(format!(
                "codeword symbol {bad} outside alphabet of size {alphabet_size}"
            )));
        }
        Ok(Self { codewords })
    }

    pub fn message_count(&self) -> usize {
        self.codewords.len()
    }

    pub fn codewords(&self) -> &[usize] {
        &self.codewords
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentMode {
    /// Average over every codebook, weighted by its sampling probability.
    Exact,
    /// Seeded Monte Carlo over i.i.d. codebooks.
    MonteCarlo { samples: usize },
}

/// A channel-coding experiment: codewords drawn i.i.d. from `input_dist`.
#[derive(Debug, Clone)]
pub struct CodingExperiment {
    pub channel: CQChannel,
    pub input_dist: Vec<f64>,
    pub message_count: usize,
    pub mode: ExperimentMode,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool. Affects speed only.
    pub threads: Option<usize>,
}

impl CodingExperiment {
    fn validate(&self) -> Result<()> {
        validate_distribution(&self.input_dist)?;
        if self.input_dist.len() != self.channel.alphabet_size() {
            return Err(Error::DimensionMismatch {
                expected: self.channel.alphabet_size(),
                got: self.input_dist.len(),
            });
        }
        if self.message_count == 0 {
            return Err(Error::EmptyInput("message count must be at least 1"));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Pretty good measurement and decoding
// ---------------------------------------------------------------------------

/// Pretty good measurement for a family of signal states:
/// `E_m = S^{-1/2} rho_m S^{-1/2}` with `S` the sum of the signals and the
/// inverse square root taken on the support of `S`. The elements sum to the
/// support projector of `S`, which the returned POVM declares.
pub fn pgm(signals: &[HermitianMatrix], tol_rank: f64) -> Result<Povm> {
    let first = signals
        .first()
        .ok_or(Error::EmptyInput("pretty good measurement of no signals"))?;
    let dim = first.dim();
    let mut sum = HermitianMatrix::zeros(dim);
    for s in signals {
        let eig = eig_hermitian(s)?;
        let min = eig.min_eigenvalue();
        if min < -tol_rank * eig.spectral_norm().max(1.0) {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        sum = sum.add(s)?;
    }
    if sum.trace() <= 0.0 {
        return Err(Error::EmptyInput("all signal states are zero"));
    }
    let sum_eig = eig_hermitian(&sum)?;
    let inv_half = mat_func_from_eig(&sum_eig, |l| l.powf(-0.5), tol_rank)?;
    let support = mat_func_from_eig(&sum_eig, |_| 1.0, tol_rank)?;
    let elements = signals
        .iter()
        .map(|s| inv_half.sandwich(s))
        .collect::<Result<Vec<_>>>()?;
    Ok(Povm { elements, support })
}

/// Success probability of pretty-good-measurement decoding for one codebook:
/// `(1/M) sum_m tr(E_m rho_{x_m})`.
pub fn success_probability(channel: &CQChannel, codebook: &Codebook, tol_rank: f64) -> Result<f64> {
    let signals: Vec<HermitianMatrix> = codebook
        .codewords()
        .iter()
        .map(|&x| channel.state(x).matrix().clone())
        .collect();
    let povm = pgm(&signals, tol_rank)?;
    let m = codebook.message_count() as f64;
    let mut acc = 0.0;
    for (element, signal) in povm.elements.iter().zip(&signals) {
        acc += element.trace_product(signal)?;
    }
    Ok(acc / m)
}

fn decode_codebook(index: usize, message_count: usize, alphabet: usize) -> Vec<usize> {
    let mut idx = index;
    let mut words = Vec::with_capacity(message_count);
    for _ in 0..message_count {
        words.push(idx % alphabet);
        idx /= alphabet;
    }
    words
}

/// Expected success probability by full enumeration of all `|X|^M`
/// codebooks, weighted by the i.i.d. sampling probability of each.
pub fn expected_success_exact(exp: &CodingExperiment, tol_rank: f64) -> Result<f64> {
    exp.validate()?;
    let alphabet = exp.channel.alphabet_size();
    let total = (alphabet as u128)
        .checked_pow(exp.message_count as u32)
        .filter(|&t| t <= EXACT_ENUMERATION_CAP)
        .ok_or(Error::EnumerationTooLarge {
            size: (alphabet as u128).saturating_pow(exp.message_count as u32),
            cap: EXACT_ENUMERATION_CAP,
        })?;

    let contributions = map_indexed(total as usize, exp.threads, |index| {
        let words = decode_codebook(index, exp.message_count, alphabet);
        let weight: f64 = words.iter().map(|&x| exp.input_dist[x]).product();
        if weight == 0.0 {
            return Ok(0.0);
        }
        let codebook = Codebook::new(words, alphabet)?;
        Ok(weight * success_probability(&exp.channel, &codebook, tol_rank)?)
    })?;
    Ok(pairwise_sum(&contributions))
}

/// Inverse-CDF draw of a symbol from `dist` at uniform variate `u`.
fn draw_symbol(dist: &[f64], u: f64) -> usize {
    let mut cum = 0.0;
    for (x, &p) in dist.iter().enumerate() {
        cum += p;
        if u < cum {
            return x;
        }
    }
    dist.len() - 1
}

/// Monte Carlo estimate `(mean, stderr)` of the expected success
/// probability over seeded i.i.d. codebooks.
///
/// Codeword `m` of sample `i` is a pure function of `(seed, i, m)`, so the
/// estimate is bit-identical for any thread count.
pub fn expected_success_mc(exp: &CodingExperiment, tol_rank: f64) -> Result<(f64, f64)> {
    exp.validate()?;
    let samples = match exp.mode {
        ExperimentMode::MonteCarlo { samples } if samples >= 1 => samples,
        ExperimentMode::MonteCarlo { .. } => {
            return Err(Error::InvalidParameter("samples must be at least 1".into()))
        }
        ExperimentMode::Exact => {
            return Err(Error::InvalidParameter(
                "experiment mode is exact, not monte-carlo".into(),
            ))
        }
    };
    let alphabet = exp.channel.alphabet_size();
    let values = map_indexed(samples, exp.threads, |i| {
        let words: Vec<usize> = (0..exp.message_count)
            .map(|m| draw_symbol(&exp.input_dist, counter_u01(exp.seed, i as u64, m as u64)))
            .collect();
        let codebook = Codebook::new(words, alphabet)?;
        success_probability(&exp.channel, &codebook, tol_rank)
    })?;
    Ok(mean_and_stderr(&values))
}

// ---------------------------------------------------------------------------
// One-shot bounds
// ---------------------------------------------------------------------------

/// One-shot lower bound on the expected success probability of
/// pretty-good-measurement decoding with `M` random codewords:
/// `(1/M) * exp D2(rho_XB || (1/M) rho_XB + (1 - 1/M) rho_X (x) rho_B)`.
pub fn pgm_success_lower_bound(
    channel: &CQChannel,
    input_dist: &[f64],
    message_count: usize,
    tol_rank: f64,
) -> Result<f64> {
    if message_count == 0 {
        return Err(Error::EmptyInput("message count must be at least 1"));
    }
    let cq = channel.cq_state(input_dist)?;
    let rho_xb = joint_state(&cq)?;
    let product = product_of_marginals(&cq)?;
    let m = message_count as f64;
    let mix = rho_xb
        .matrix()
        .scale(1.0 / m)
        .add(&product.matrix().scale(1.0 - 1.0 / m))?;
    let d2 = collision_divergence(rho_xb.matrix(), &mix, tol_rank)?
        .finite_or("collision bound for a classical-quantum state")?;
    Ok(2f64.powf(d2) / m)
}

/// Message count achievable with average error at most `epsilon`:
/// `floor((eps - delta)/(1 - eps) * 2^{Ds^delta(rho_XB || rho_X x rho_B)} + 1)`.
pub fn achievable_message_count(
    channel: &CQChannel,
    input_dist: &[f64],
    epsilon: f64,
    delta: f64,
    tol_rank: f64,
) -> Result<u64> {
    let cq = channel.cq_state(input_dist)?;
    let rho_xb = joint_state(&cq)?;
    let product = product_of_marginals(&cq)?;
    let query = SpectrumQuery::new(delta)?;
    let ds = info_spectrum(&rho_xb, &product, &query, tol_rank)?;
    message_count_from_spectrum(ds, epsilon, delta)
}

/// The message-count formula alone, for a known spectrum value.
pub fn message_count_from_spectrum(ds: DivergenceValue, epsilon: f64, delta: f64) -> Result<u64> {
    if !(epsilon > delta && delta > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < delta < epsilon < 1, got delta {delta}, epsilon {epsilon}"
        )));
    }
    let r = match ds {
        DivergenceValue::Finite(r) => r,
        DivergenceValue::Infinite => return Ok(u64::MAX),
    };
    let value = (epsilon - delta) / (1.0 - epsilon) * 2f64.powf(r) + 1.0;
    if !value.is_finite() || value >= u64::MAX as f64 {
        return Ok(u64::MAX);
    }
    Ok((value.floor() as u64).max(1))
}

// ---------------------------------------------------------------------------
// Capacity, dispersion, second-order rate
// ---------------------------------------------------------------------------

/// Holevo information `I(X;B) = D(rho_XB || rho_X (x) rho_B)` in bits.
pub fn holevo_information(channel: &CQChannel, input_dist: &[f64], tol_rank: f64) -> Result<f64> {
    let cq = channel.cq_state(input_dist)?;
    let rho_xb = joint_state(&cq)?;
    let product = product_of_marginals(&cq)?;
    relative_entropy(&rho_xb, &product, tol_rank)?
        .finite_or("mutual information of a classical-quantum state")
}

/// Von Neumann entropy in bits.
fn entropy_bits(rho: &DensityMatrix, tol_rank: f64) -> Result<f64> {
    let eig = eig_hermitian(rho.matrix())?;
    let thr = tol_rank * eig.spectral_norm();
    Ok(-eig
        .eigenvalues
        .iter()
        .filter(|&&l| l > thr)
        .map(|&l| l * l.log2())
        .sum::<f64>())
}

/// Fast mutual-information evaluator `H(rho_B) - sum_x p(x) H(rho_x)` used
/// inside the capacity grid scan; algebraically equal to
/// [`holevo_information`].
fn mutual_information_fast(
    channel: &CQChannel,
    conditional_entropies: &[f64],
    input_dist: &[f64],
    tol_rank: f64,
) -> Result<f64> {
    let mut avg = HermitianMatrix::zeros(channel.output_dim());
    let mut cond = 0.0;
    for (x, &p) in input_dist.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        avg = avg.add(&channel.state(x).matrix().scale(p))?;
        cond += p * conditional_entropies[x];
    }
    let avg = DensityMatrix::new_unchecked(avg);
    Ok(entropy_bits(&avg, tol_rank)? - cond)
}

/// Capacity and dispersion report from a simplex grid search.
#[derive(Debug, Clone)]
pub struct CapacityReport {
    /// Best mutual information found (bits).
    pub capacity: f64,
    /// Minimal information variance over the near-capacity input set.
    pub dispersion: f64,
    /// Input distributions achieving capacity within `tol_cap`.
    pub maximizers: Vec<Vec<f64>>,
    /// Width of the near-capacity band used to form the maximizer set.
    pub tol_cap: f64,
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            let mut v = Vec::with_capacity(parts);
            v.push(first);
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

/// Capacity `C = max_p I(X;B)` over a simplex grid with step
/// `1/grid_resolution`, locally refined; dispersion
/// `V = min V(rho_XB || rho_X (x) rho_B)` over the near-capacity set.
pub fn capacity_and_dispersion(
    channel: &CQChannel,
    grid_resolution: usize,
    tol_rank: f64,
) -> Result<CapacityReport> {
    const MAX_ALPHABET: usize = 4;
    const TOL_CAP: f64 = 1e-6;
    let k = channel.alphabet_size();
    if k > MAX_ALPHABET {
        return Err(Error::InvalidParameter(format!(
            "alphabet size {k} exceeds grid-search cap {MAX_ALPHABET}"
        )));
    }
    if grid_resolution < 2 {
        return Err(Error::InvalidParameter(
            "grid resolution must be at least 2".into(),
        ));
    }
    let cond_entropy: Vec<f64> = channel
        .states()
        .iter()
        .map(|s| entropy_bits(s, tol_rank))
        .collect::<Result<Vec<_>>>()?;

    let grid = compositions(grid_resolution, k);
    let mut best = f64::NEG_INFINITY;
    let mut scored: Vec<(Vec<f64>, f64)> = Vec::with_capacity(grid.len());
    for counts in &grid {
        let p: Vec<f64> = counts
            .iter()
            .map(|&c| c as f64 / grid_resolution as f64)
            .collect();
        let i = mutual_information_fast(channel, &cond_entropy, &p, tol_rank)?;
        if i > best {
            best = i;
        }
        scored.push((p, i));
    }

    // Local refinement around the best grid point: greedy pairwise mass
    // transfer with a shrinking step.
    let mut best_p = scored
        .iter()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap()
        .0
        .clone();
    let mut best_i = best;
    let mut step = 0.5 / grid_resolution as f64;
    let mut moves = 0usize;
    while step > 1e-9 && moves < 20_000 {
        let mut improved = false;
        'outer: for i in 0..k {
            if best_p[i] < step {
                continue;
            }
            for j in 0..k {
                if i == j {
                    continue;
                }
                let mut cand = best_p.clone();
                cand[i] -= step;
                cand[j] += step;
                let value = mutual_information_fast(channel, &cond_entropy, &cand, tol_rank)?;
                moves += 1;
                if value > best_i + 1e-14 {
                    best_p = cand;
                    best_i = value;
                    improved = true;
                    break 'outer;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    let capacity = best_i;
    let mut maximizers: Vec<Vec<f64>> = scored
        .into_iter()
        .filter(|(_, i)| capacity - *i <= TOL_CAP)
        .map(|(p, _)| p)
        .collect();
    if maximizers
        .iter()
        .all(|p| p.iter().zip(&best_p).any(|(a, b)| (a - b).abs() > 1e-12))
    {
        maximizers.push(best_p.clone());
    }

    let mut dispersion = f64::INFINITY;
    for p in &maximizers {
        let cq = channel.cq_state(p)?;
        let rho_xb = joint_state(&cq)?;
        let product = product_of_marginals(&cq)?;
        let v = crate::divergence::info_variance(&rho_xb, &product, tol_rank)?;
        dispersion = dispersion.min(v);
    }
    Ok(CapacityReport {
        capacity,
        dispersion,
        maximizers,
        tol_cap: TOL_CAP,
    })
}

/// Second-order achievable rate `n C + sqrt(n V) * Phi^{-1}(eps)` in bits.
pub fn second_order_achievable_rate(
    channel: &CQChannel,
    n: u64,
    epsilon: f64,
    grid_resolution: usize,
    tol_rank: f64,
) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "epsilon {epsilon} outside (0, 1/2)"
        )));
    }
    let report = capacity_and_dispersion(channel, grid_resolution, tol_rank)?;
    crate::asympt::second_order_estimate(report.capacity, report.dispersion, n, epsilon)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
