//! One-shot asymmetric hypothesis testing.
//!
//! Discriminating a state `rho` from an alternative `sigma` with the
//! two-outcome measurement built from the inverse square root of
//! `rho + M sigma`, where the positive trade-off parameter `M` tilts the
//! test toward one error type. Choosing `M` from the information spectrum
//! at mass `eps` yields a type I error at most `2 eps` and a type II error
//! at most `2^{-Ds - log2 eps}`.

use crate::divergence::{DivergenceValue, SpectrumCurve, SpectrumQuery};
use crate::error::{Error, Result};
use crate::matcore::{mat_func_on_support, support_projector, HermitianMatrix};
use crate::states::{DensityMatrix, Povm};

/// A discrimination instance: the two hypotheses and the trade-off
/// parameter `M > 0`.
#[derive(Debug, Clone)]
pub struct HypothesisInstance {
    rho: DensityMatrix,
    sigma: DensityMatrix,
    trade_off: f64,
}

impl HypothesisInstance {
    pub fn new(rho: DensityMatrix, sigma: DensityMatrix, trade_off: f64) -> Result<Self> {
        if rho.dim() != sigma.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                got: sigma.dim(),
            });
        }
        if !(trade_off > 0.0 && trade_off.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "trade-off parameter {trade_off} must be positive and finite"
            )));
        }
        Ok(Self {
            rho,
            sigma,
            trade_off,
        })
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn sigma(&self) -> &DensityMatrix {
        &self.sigma
    }

    pub fn trade_off(&self) -> f64 {
        self.trade_off
    }
}

/// The two-outcome test POVM:
/// `F_rho = K^{-1/2} rho K^{-1/2}` and `F_sigma = M K^{-1/2} sigma K^{-1/2}`
/// with `K = rho + M sigma`; the declared support is the projector onto
/// `supp(K)`. Element order: `[F_rho, F_sigma]`.
pub fn build_ht_povm(inst: &HypothesisInstance, tol_rank: f64) -> Result<Povm> {
    let k = inst
        .rho
        .matrix()
        .add(&inst.sigma.matrix().scale(inst.trade_off))?;
    let inv_half = mat_func_on_support(&k, |l| l.powf(-0.5), tol_rank)?;
    let f_rho = inv_half.sandwich(inst.rho.matrix())?;
    let f_sigma = inv_half
        .sandwich(inst.sigma.matrix())?
        .scale(inst.trade_off);
    let support = support_projector(&k, tol_rank)?;
    Ok(Povm {
        elements: vec![f_rho, f_sigma],
        support,
    })
}

/// Measured `(type I, type II)` error probabilities of the test.
///
/// Any trace mass of `rho` outside the support of `rho + M sigma` counts
/// as "declare sigma" (type I); up to tolerance that mass is zero because
/// `supp(rho)` lies inside `supp(rho + M sigma)`.
pub fn error_probabilities(inst: &HypothesisInstance, tol_rank: f64) -> Result<(f64, f64)> {
    let povm = build_ht_povm(inst, tol_rank)?;
    error_probabilities_for(inst, &povm)
}

fn error_probabilities_for(inst: &HypothesisInstance, povm: &Povm) -> Result<(f64, f64)> {
    let outside = 1.0 - povm.support.trace_product(inst.rho.matrix())?;
    let type_i = povm.elements[1].trace_product(inst.rho.matrix())? + outside.max(0.0);
    let type_ii = povm.elements[0].trace_product(inst.sigma.matrix())?;
    Ok((type_i, type_ii))
}

/// Outcome of the one-shot bound.
#[derive(Debug, Clone)]
pub enum OneShotHtBound {
    /// The generic case: `M = 2^{Ds + log2 eps}`, claimed bounds, and the
    /// errors measured on the constructed test.
    Standard {
        trade_off: f64,
        type_i_bound: f64,
        type_ii_bound: f64,
        type_i: f64,
        type_ii: f64,
    },
    /// The spectrum is unbounded (e.g. orthogonal supports): projecting
    /// onto the part of `rho`'s support inside `ker(sigma)` gives a test
    /// with zero type II error and type I error at most `eps`.
    PerfectDiscrimination { type_i: f64, type_ii: f64 },
}

impl OneShotHtBound {
    pub fn measured_errors(&self) -> (f64, f64) {
        match self {
            OneShotHtBound::Standard {
                type_i, type_ii, ..
            } => (*type_i, *type_ii),
            OneShotHtBound::PerfectDiscrimination { type_i, type_ii } => (*type_i, *type_ii),
        }
    }
}

/// One-shot hypothesis-testing bound at mass threshold `query.epsilon`.
///
/// Sets `M = 2^{Ds^eps(rho||sigma) + log2 eps}`, builds the test, and
/// returns the claimed bounds (`2 eps` on type I, `2^{-Ds - log2 eps}` on
/// type II) together with the measured error probabilities.
pub fn oneshot_ht_bound(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    query: &SpectrumQuery,
    tol_rank: f64,
) -> Result<OneShotHtBound> {
    let eps = query.epsilon;
    let curve = SpectrumCurve::new(
        rho,
        sigma.matrix(),
        query.grid_points,
        query.window_pad,
        tol_rank,
    )?;
    let ds = curve.query(eps, query.refine_tol)?;
    match ds {
        DivergenceValue::Infinite => {
            let (type_i, type_ii) = perfect_discrimination_errors(rho, sigma, tol_rank)?;
            Ok(OneShotHtBound::PerfectDiscrimination { type_i, type_ii })
        }
        DivergenceValue::Finite(r) => {
            let trade_off = eps * 2f64.powf(r);
            if !(trade_off.is_finite() && trade_off > 0.0 && trade_off < 1e100) {
                return Err(Error::InvalidParameter(format!(
                    "trade-off parameter 2^({r} + log2 {eps}) out of range"
                )));
            }
            let inst = HypothesisInstance::new(rho.clone(), sigma.clone(), trade_off)?;
            let (type_i, type_ii) = error_probabilities(&inst, tol_rank)?;
            Ok(OneShotHtBound::Standard {
                trade_off,
                type_i_bound: 2.0 * eps,
                type_ii_bound: 2f64.powf(-r) / eps,
                type_i,
                type_ii,
            })
        }
    }
}

/// Test `{P, I - P}` with `P` the projector onto `supp(rho)` inside
/// `ker(sigma)`; its type II error vanishes identically.
fn perfect_discrimination_errors(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tol_rank: f64,
) -> Result<(f64, f64)> {
    let sigma_supp = support_projector(sigma.matrix(), tol_rank)?;
    let q = HermitianMatrix::identity(rho.dim()).sub(&sigma_supp)?;
    let boxed = q.sandwich(rho.matrix())?;
    let p = support_projector(&boxed, tol_rank)?;
    let type_i = (1.0 - p.trace_product(rho.matrix())?).clamp(0.0, 1.0);
    let type_ii = p.trace_product(sigma.matrix())?.clamp(0.0, 1.0);
    Ok((type_i, type_ii))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::collision_divergence;
    use crate::matcore::DEFAULT_TOL_RANK as TOL;
    use crate::sampling;
    use crate::states::validate_povm;

    #[test]
    fn orthogonal_hypotheses_are_perfectly_distinguished() {
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        let sigma = DensityMatrix::basis_state(2, 1).unwrap();
        let inst = HypothesisInstance::new(rho.clone(), sigma.clone(), 2.0).unwrap();
        let povm = build_ht_povm(&inst, TOL).unwrap();
        assert!(povm.elements[0].sub(rho.matrix()).unwrap().frobenius_norm() < 1e-9);
        assert!(
            povm.elements[1]
                .sub(sigma.matrix())
                .unwrap()
                .frobenius_norm()
                < 1e-9
        );
        let (t1, t2) = error_probabilities(&inst, TOL).unwrap();
        assert!(t1.abs() < 1e-10 && t2.abs() < 1e-10);
    }

    #[test]
    fn identical_hypotheses_split_by_trade_off() {
        let rho = sampling::random_density(3, 10);
        let m = 1.5;
        let inst = HypothesisInstance::new(rho.clone(), rho.clone(), m).unwrap();
        let povm = build_ht_povm(&inst, TOL).unwrap();
        let expected_rho = povm.support.scale(1.0 / (1.0 + m));
        assert!(
            povm.elements[0]
                .sub(&expected_rho)
                .unwrap()
                .frobenius_norm()
                < 1e-8
        );
        let (t1, t2) = error_probabilities(&inst, TOL).unwrap();
        assert!((t1 - m / (1.0 + m)).abs() < 1e-9);
        assert!((t2 - 1.0 / (1.0 + m)).abs() < 1e-9);
    }

    #[test]
    fn completeness_and_sigma_element_identity() {
        let mut rng = sampling::StreamRng::new(14);
        for _ in 0..20 {
            let rho = sampling::random_density(2, rng.next_u64());
            let sigma = sampling::random_density(2, rng.next_u64());
            let m = 0.25 + 4.0 * rng.next_f64();
            let inst = HypothesisInstance::new(rho.clone(), sigma.clone(), m).unwrap();
            let povm = build_ht_povm(&inst, TOL).unwrap();
            let report = validate_povm(&povm).unwrap();
            assert!(report.passed(), "{report:?}");
            assert!(report.completeness_error < 1e-7);

            // F_sigma also equals the inverse square root of M^{-1} rho + sigma
            // sandwiching sigma directly.
            let k_alt = rho.matrix().scale(1.0 / m).add(sigma.matrix()).unwrap();
            let inv_half = mat_func_on_support(&k_alt, |l| l.powf(-0.5), TOL).unwrap();
            let f_sigma_alt = inv_half.sandwich(sigma.matrix()).unwrap();
            let dev = povm.elements[1].sub(&f_sigma_alt).unwrap().frobenius_norm();
            assert!(dev < 1e-8, "two forms of the sigma element differ by {dev}");
        }
    }

    #[test]
    fn proof_identities_hold() {
        let mut rng = sampling::StreamRng::new(21);
        for _ in 0..25 {
            let rho = sampling::random_density(3, rng.next_u64());
            let sigma = sampling::random_density(3, rng.next_u64());
            let m = 0.1 + 3.0 * rng.next_f64();
            let inst = HypothesisInstance::new(rho.clone(), sigma.clone(), m).unwrap();
            let (t1, t2) = error_probabilities(&inst, TOL).unwrap();

            let k = rho.matrix().add(&sigma.matrix().scale(m)).unwrap();
            let d2 = collision_divergence(rho.matrix(), &k, TOL)
                .unwrap()
                .finite_or("support holds")
                .unwrap();
            assert!(
                ((1.0 - t1) - 2f64.powf(d2)).abs() < 1e-9,
                "type I identity violated"
            );

            let k2 = rho.matrix().scale(1.0 / m).add(sigma.matrix()).unwrap();
            let d2 = collision_divergence(sigma.matrix(), &k2, TOL)
                .unwrap()
                .finite_or("support holds")
                .unwrap();
            assert!(
                ((1.0 - t2) - 2f64.powf(d2)).abs() < 1e-9,
                "type II identity violated"
            );
            assert!(
                1.0 - t2 >= 1.0 / (1.0 + 1.0 / m) - 1e-8,
                "positivity floor violated"
            );
        }
    }

    #[test]
    fn oneshot_bound_orthogonal_gives_perfect_certificate() {
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        let sigma = DensityMatrix::basis_state(2, 1).unwrap();
        let q = SpectrumQuery::new(0.2)
            .unwrap()
            .with_grid_points(51)
            .unwrap();
        match oneshot_ht_bound(&rho, &sigma, &q, TOL).unwrap() {
            OneShotHtBound::PerfectDiscrimination { type_i, type_ii } => {
                assert!(type_i.abs() < 1e-12);
                assert!(type_ii.abs() < 1e-12);
            }
            other => panic!("expected perfect discrimination, got {other:?}"),
        }
    }

    #[test]
    fn oneshot_bound_identical_states() {
        let rho = sampling::random_density(2, 3);
        let q = SpectrumQuery::new(0.25)
            .unwrap()
            .with_grid_points(101)
            .unwrap();
        match oneshot_ht_bound(&rho, &rho, &q, TOL).unwrap() {
            OneShotHtBound::Standard {
                trade_off,
                type_ii,
                type_i,
                ..
            } => {
                assert!((trade_off - 0.25).abs() < 1e-9, "M = {trade_off}");
                assert!((type_ii - 0.8).abs() < 1e-9, "type II = {type_ii}");
                assert!((type_i - 0.2).abs() < 1e-9, "type I = {type_i}");
            }
            other => panic!("expected standard bound, got {other:?}"),
        }
    }

    #[test]
    fn oneshot_bound_holds_on_random_pairs() {
        let mut rng = sampling::StreamRng::new(31);
        for trial in 0..30 {
            let dim = 2 + trial % 3;
            let rho = sampling::random_density(dim, rng.next_u64());
            let sigma = sampling::random_density(dim, rng.next_u64());
            let eps = 0.05 + 0.4 * rng.next_f64();
            let q = SpectrumQuery::new(eps)
                .unwrap()
                .with_grid_points(101)
                .unwrap();
            match oneshot_ht_bound(&rho, &sigma, &q, TOL).unwrap() {
                OneShotHtBound::Standard {
                    type_i,
                    type_ii,
                    type_i_bound,
                    type_ii_bound,
                    ..
                } => {
                    assert!(
                        type_i <= type_i_bound + 1e-8,
                        "trial {trial}: type I {type_i} > {type_i_bound}"
                    );
                    assert!(
                        type_ii <= type_ii_bound + 1e-8,
                        "trial {trial}: type II {type_ii} > {type_ii_bound}"
                    );
                }
                OneShotHtBound::PerfectDiscrimination { .. } => {
                    panic!("full-rank states cannot have unbounded spectrum")
                }
            }
        }
    }
}
