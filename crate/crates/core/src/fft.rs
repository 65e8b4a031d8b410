//! Thin wrappers over rustfft for the centered-index transforms used by the
//! grid code.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Sign {
    /// kernel e^{-j 2 pi ...}
    Negative,
    /// kernel e^{+j 2 pi ...}, unnormalized
    Positive,
}

pub(crate) fn plan(n: usize, sign: Sign) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    match sign {
        Sign::Negative => planner.plan_fft_forward(n),
        Sign::Positive => planner.plan_fft_inverse(n),
    }
}

/// Plain unnormalized DFT in place.
pub(crate) fn transform(buf: &mut [Complex64], sign: Sign) {
    plan(buf.len(), sign).process(buf);
}

/// `y[k] = sum_j x[j] exp(s j 2 pi (j - h)(k - h) / N)` with `h = N/2`,
/// i.e. a DFT whose input and output indices are both centered on `h`.
pub(crate) fn centered(fft: &dyn Fft<f64>, buf: &mut [Complex64]) {
    let n = buf.len();
    debug_assert!(n.is_multiple_of(2));
    alternate(buf);
    fft.process(buf);
    alternate(buf);
    // exp(s j 2 pi h^2 / N) = exp(s j pi N / 2) = (-1)^(N/2) for even N
    if (n / 2) % 2 == 1 {
        buf.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Multiply by (-1)^j.
pub(crate) fn alternate(buf: &mut [Complex64]) {
    buf.iter_mut().skip(1).step_by(2).for_each(|v| *v = -*v);
}
