//! # qitlab
//!
//! A numerical laboratory for one-shot quantum information theory at desk
//! scale, built around dense complex Hermitian linear algebra.
//!
//! What it computes:
//!
//! - **Divergences**: relative entropy `D`, collision divergence `D2`
//!   (order-2 sandwiched Renyi), information variance `V`, and the
//!   information-spectrum relative entropy `Ds` with an exact classical
//!   i.i.d. path by convolution ([`divergence`]).
//! - **Channel coding**: random codebooks decoded by the pretty good
//!   measurement, enumerated and Monte Carlo success probabilities, the
//!   collision-divergence lower bound, achievable message counts, channel
//!   capacity and dispersion ([`channelcode`]).
//! - **Hypothesis testing**: the two-outcome test built from
//!   `(rho + M sigma)^{-1/2}` with both error types and the one-shot bound
//!   ([`hyptest`]).
//! - **Source coding with quantum side information**: random hashing with
//!   bin-wise pretty-good-measurement decoding and its one-shot bounds
//!   ([`sidecomp`]).
//! - **Second-order asymptotics**: normal CDF/quantile and
//!   `n D + sqrt(n V) Phi^{-1}(eps)` rate estimates ([`asympt`]).
//!
//! Everything reduces to spectral computations in [`matcore`], a
//! dependency-free cyclic Jacobi eigensolver for complex Hermitian
//! matrices. All logarithms are base 2; divergences are reported in bits.
//!
//! Determinism: random instances and Monte Carlo experiments derive every
//! variate from explicit seeds through splittable counter-based generators
//! ([`sampling`]), so results are bit-identical across runs and thread
//! counts.

#![forbid(unsafe_code)]

pub mod asympt;
pub mod channelcode;
pub mod divergence;
mod error;
mod exec;
pub mod hyptest;
pub mod matcore;
pub mod sampling;
pub mod sidecomp;
pub mod states;

pub use error::{Error, Result};
