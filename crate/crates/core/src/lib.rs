//! Spectral toolkit for the symmetrized lag-τ auto-cross covariance matrix
//!
//! ```text
//! M_n(τ) = (1/2T) Σ_{j=1}^{T} ( e_j e*_{j+τ} + e_{j+τ} e*_j )
//! ```
//!
//! built from an `n × (T+τ)` panel of i.i.d. standardized innovations. The
//! crate covers the whole pipeline from seeded noise to verification:
//!
//! - [`noise`]: counter-based seeded innovation panels and the
//!   truncate/centre/rescale preprocessing step.
//! - [`matrices`]: exact-Hermitian builders for `M_n(τ)`, the dynamic factor
//!   observation panel and `Φ_n(τ)`.
//! - [`eig`]: Householder tridiagonalisation plus implicit QL for dense
//!   complex Hermitian matrices, and empirical spectral distributions.
//! - [`lsd`]: the closed-form limiting law `F_c` (density, boundary `d(c)`,
//!   atom, CDF, Stieltjes branches) and the Marčenko–Pastur reference.
//! - [`analysis`]: Kolmogorov distances, Monte Carlo extreme-eigenvalue
//!   verification and factor-order detection.
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats, the
//! parallel harness and the CLI live in the `lagspec` companion crate.
#![no_std]
#![warn(missing_debug_implementations, rust_2018_idioms)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod cubic;
pub mod eig;
mod error;
pub mod lsd;
pub mod matrices;
pub mod noise;
pub mod quad;

pub use error::{Error, Result};

/// Double precision complex scalar used throughout.
pub type C64 = num_complex::Complex64;
