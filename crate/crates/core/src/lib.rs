//! Time-frequency toolkit: discrete Wigner-Ville distributions, ambiguity
//! functions, kernel-filtered quadratic TFDs, covariance moments and
//! uncertainty checks, and SL(2,R) generator actions on sampled signals.
//!
//! All continuous integrals are Riemann sums on a uniform lattice. Signals are
//! assumed negligible outside the sampled window; nothing enforces that.
//!
//! Grid conventions used throughout:
//!
//! * time `t[n] = t0 + n / fs`, `n = 0..N`
//! * signal spectrum `f[k] = (k - N/2) * fs / N`
//! * WVD frequency axis `f[k] = (k - N/2) * fs / (2N)` (half-lag lattice)
//! * delay `tau[m] = 2 (m - N/2) / fs`, Doppler `nu[l] = (l - N/2) * fs / N`

pub mod ambiguity;
pub mod error;
pub(crate) mod fft;
pub mod io;
pub mod kernels;
pub mod moments;
pub mod signal;
pub mod symplectic;
pub mod tfd;
pub mod wigner;

pub use ambiguity::AmbGrid;
pub use error::{Result, TfError};
pub use kernels::{Kernel, KernelKind, KernelSpec};
pub use moments::{CovarianceMatrix, UncertaintyReport};
pub use signal::{SampledSignal, SignalKind, SignalSpec};
pub use symplectic::{GeneratorWord, Sl2Matrix, Token};
pub use tfd::Tfd;
pub use wigner::TfGrid;

pub use num_complex::Complex64;

/// Effective Planck constant for the e^{-j 2 pi f t} convention. With this
/// value hbar^2 / 4 equals the Heisenberg constant 1 / (16 pi^2).
pub const HBAR_EFF: f64 = 1.0 / (2.0 * std::f64::consts::PI);
