//! Deterministic random instance generation.
//!
//! Two flavours live here:
//!
//! * [`StreamRng`], a sequential SplitMix64 stream for building random test
//!   instances (Hermitian matrices, density matrices, channels) from a seed;
//! * [`counter_u64`] / [`counter_u01`], a splittable counter-based generator
//!   keyed by `(seed, index_a, index_b)`. Monte Carlo experiments draw every
//!   variate through it, so results never depend on the parallel schedule.
//!
//! Everything is self-contained so that seeded outputs stay bit-identical
//! across platforms and dependency upgrades.

use num_complex::Complex64;

use crate::matcore::{ComplexMatrix, HermitianMatrix};
use crate::states::{CQState, DensityMatrix};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based generator: a pure function of `(seed, a, b)`.
pub fn counter_u64(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = mix64(seed ^ GOLDEN_GAMMA);
    z = mix64(z ^ a.wrapping_mul(0xA24B_AED4_963E_E407));
    z = mix64(z ^ b.wrapping_mul(0x9FB2_1C65_1E98_DF25));
    z
}

/// Uniform variate in `[0, 1)` from the counter-based generator.
pub fn counter_u01(seed: u64, a: u64, b: u64) -> f64 {
    (counter_u64(seed, a, b) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sequential SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct StreamRng {
    state: u64,
}

impl StreamRng {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller.
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = self.next_f64().max(f64::MIN_POSITIVE);
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn next_complex_gaussian(&mut self) -> Complex64 {
        Complex64::new(self.next_gaussian(), self.next_gaussian())
    }
}

/// Complex Ginibre matrix: i.i.d. standard complex Gaussian entries.
fn ginibre(dim: usize, rng: &mut StreamRng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            m.set(i, j, rng.next_complex_gaussian());
        }
    }
    m
}

/// Random Hermitian matrix `(G + G^dagger)/2` with Gaussian entries.
pub fn random_hermitian(dim: usize, seed: u64) -> HermitianMatrix {
    let mut rng = StreamRng::new(seed);
    let g = ginibre(dim, &mut rng);
    HermitianMatrix::symmetrize(g)
}

/// Random unnormalized positive semi-definite matrix `G G^dagger`.
pub fn random_psd(dim: usize, seed: u64) -> HermitianMatrix {
    let mut rng = StreamRng::new(seed);
    let g = ginibre(dim, &mut rng);
    HermitianMatrix::symmetrize(g.matmul(&g.adjoint()).expect("same dim"))
}

/// Random full-rank density matrix `G G^dagger / tr(G G^dagger)` (Ginibre ensemble).
pub fn random_density(dim: usize, seed: u64) -> DensityMatrix {
    let psd = random_psd(dim, seed);
    let tr = psd.trace();
    DensityMatrix::new_unchecked(psd.scale(1.0 / tr))
}

/// Random pure-state density matrix.
pub fn random_pure_density(dim: usize, seed: u64) -> DensityMatrix {
    let v = random_unit_vector(dim, seed);
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            m.set(i, j, v[i] * v[j].conj());
        }
    }
    DensityMatrix::new_unchecked(HermitianMatrix::symmetrize(m))
}

/// Haar-like random unit vector (Gaussian direction).
pub fn random_unit_vector(dim: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = StreamRng::new(seed);
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| rng.next_complex_gaussian()).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.iter().map(|z| z / norm).collect();
        }
    }
}

/// Random unitary matrix: modified Gram-Schmidt on a Ginibre matrix.
#[allow(clippy::needless_range_loop)]
pub fn random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = StreamRng::new(seed);
    let g = ginibre(dim, &mut rng);
    // Columns of g, orthonormalized in order.
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|j| (0..dim).map(|i| g.get(i, j)).collect())
        .collect();
    for j in 0..dim {
        for k in 0..j {
            let proj: Complex64 = (0..dim).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..dim {
                let correction = proj * cols[k][i];
                cols[j][i] -= correction;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // Ginibre columns are almost surely independent; renormalize.
        for i in 0..dim {
            cols[j][i] /= norm;
        }
    }
    let mut u = ComplexMatrix::zeros(dim);
    for j in 0..dim {
        for i in 0..dim {
            u.set(i, j, cols[j][i]);
        }
    }
    u
}

/// Random probability vector (normalized uniform weights, floored away from zero).
pub fn random_distribution(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = StreamRng::new(seed);
    let mut p: Vec<f64> = (0..len).map(|_| rng.next_f64() + 1e-3).collect();
    let s: f64 = p.iter().sum();
    for v in &mut p {
        *v /= s;
    }
    p
}

/// Random classical-quantum state with full-rank conditionals.
pub fn random_cq_state(alphabet: usize, dim_b: usize, seed: u64) -> CQState {
    let probs = random_distribution(alphabet, seed ^ 0x5bd1);
    let conditionals = (0..alphabet)
        .map(|x| random_density(dim_b, counter_u64(seed, 0x7e57, x as u64)))
        .collect();
    CQState::new(probs, conditionals).expect("sampled CQ state is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counter_rng_is_pure() {
        assert_eq!(counter_u64(7, 1, 2), counter_u64(7, 1, 2));
        assert_ne!(counter_u64(7, 1, 2), counter_u64(7, 2, 1));
        assert_ne!(counter_u64(7, 1, 2), counter_u64(8, 1, 2));
        let u = counter_u01(3, 5, 9);
        assert!((0.0..1.0).contains(&u));
    }

    #[test]
    fn random_density_is_normalized() {
        let rho = random_density(4, 1);
        assert!((rho.matrix().trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let u = random_unitary(5, 77);
        let utu = u.adjoint().matmul(&u).unwrap();
        let dev = utu
            .sub(&ComplexMatrix::identity(5))
            .unwrap()
            .max_abs_entry();
        assert!(dev < 1e-12, "U^dagger U deviates by {dev}");
    }

    #[test]
    fn gaussian_moments_are_sane() {
        let mut rng = StreamRng::new(2024);
        let n = 20_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let z = rng.next_gaussian();
            sum += z;
            sumsq += z * z;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.05, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }
}
