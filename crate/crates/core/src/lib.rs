//! Exact and floating-point tools for the probability measure built from
//! Stern's diatomic sequence.
//!
//! The values `s(2^n), ..., s(2^{n+1} - 1)` sum to `3^n`, so after
//! normalisation they are the weights of a pure point probability measure
//! `μ_n` on the dyadic grid `m / 2^n` of the unit torus. The measures `μ_n`
//! converge weakly to a purely singular continuous measure `μ`. This crate
//! provides:
//!
//! * [`sequence`]: the sequence itself (recursion and 2-regular linear
//!   representation), block sums, the summatory function and a brute-force
//!   joint spectral radius estimate for the representation matrices.
//! * [`fourier`]: the level measures `μ_n` with exact weights and the
//!   Fourier-Bohr coefficients of `μ_n` and `μ` as Riesz-type products.
//! * [`dilation`]: the exact solution of the two-scale dilation equation at
//!   dyadic points, the distribution function `F` and interval masses.
//! * [`wiener`]: averaged squared coefficients (Wiener's criterion), the
//!   decay inequalities, moment tables and atom estimates.
//! * [`acceptance`]: the end-to-end verification battery shared by the test
//!   suite and the `stern verify` command.

pub mod acceptance;
pub mod dilation;
pub mod dyadic;
mod error;
pub mod figures;
pub mod fourier;
pub mod sequence;
pub mod wiener;

pub use dilation::{AugMatrix, Dilation, FValue, HolderEstimate};
pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use fourier::{FourierCache, FourierSettings, LevelMeasure};
pub use sequence::{LinearRep, SternMemo};
pub use wiener::{AppendixSeries, MomentEntry, WienerSeries};

/// The golden ratio `(1 + √5) / 2`.
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

/// Hölder exponent `log₂(3/τ)` of the distribution function.
pub fn holder_exponent() -> f64 {
    (3.0 / GOLDEN_RATIO).log2()
}
