//! General quadratic TFDs `rho = F{ F^-1{ g * A } }`, computed through the
//! ambiguity domain, plus marginals and grid scans.

use crate::ambiguity::{ambiguity_from_wvd, apply_kernel, wvd_from_ambiguity};
use crate::error::{Result, TfError};
use crate::kernels::{is_freq_marginal, is_time_marginal, Kernel};
use crate::signal::SampledSignal;
use crate::wigner::{self, wvd, TfGrid};
use num_complex::Complex64;

/// Imaginary residue allowed for kernels that should give a real TFD.
pub const REAL_RESIDUE_TOL: f64 = 1e-8;

/// A kernel-filtered distribution with its provenance.
#[derive(Clone, Debug)]
pub struct Tfd {
    /// Real part, used for moments.
    pub grid: TfGrid,
    /// Full complex grid (Rihaczek-type kernels are genuinely complex).
    pub complex: TfGrid<Complex64>,
    pub imag_residue: f64,
    pub kernel_name: String,
    pub time_marginal: bool,
    pub freq_marginal: bool,
}

impl Tfd {
    pub fn is_marginal(&self) -> bool {
        self.time_marginal && self.freq_marginal
    }
}

pub fn compute_tfd(a: &SampledSignal, g: &Kernel) -> Result<Tfd> {
    let w = wvd(a)?;
    let amb = ambiguity_from_wvd(&w);
    let filtered = apply_kernel(&amb, g)?;
    let complex = wvd_from_ambiguity(&filtered);
    let imag_residue = complex.imag_residue();
    if g.yields_real_tfd() && imag_residue > REAL_RESIDUE_TOL {
        return Err(TfError::ImaginaryResidue(imag_residue));
    }
    Ok(Tfd {
        grid: complex.re(),
        imag_residue,
        kernel_name: g.name().to_string(),
        time_marginal: is_time_marginal(g, &amb.nu_axis),
        freq_marginal: is_freq_marginal(g, &amb.tau_axis),
        complex,
    })
}

/// `sum_k rho[n,k] df`.
pub fn time_marginal(rho: &TfGrid) -> Vec<f64> {
    wigner::time_marginal(rho)
}

/// `sum_n rho[n,k] dt`.
pub fn freq_marginal(rho: &TfGrid) -> Vec<f64> {
    wigner::freq_marginal(rho)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinScan {
    pub value: f64,
    pub t: f64,
    pub f: f64,
}

/// Exact grid minimum and where it sits.
pub fn min_scan(rho: &TfGrid) -> MinScan {
    let mut best = MinScan {
        value: f64::INFINITY,
        t: f64::NAN,
        f: f64::NAN,
    };
    for ((n, k), &v) in rho.values.indexed_iter() {
        if v < best.value {
            best = MinScan {
                value: v,
                t: rho.t_axis[n],
                f: rho.f_axis[k],
            };
        }
    }
    best
}
