#![allow(dead_code)]

use rand::Rng;
use tfkit::signal::{generate, half_bin_spectrum};
use tfkit::{SampledSignal, SignalKind, SignalSpec, Sl2Matrix, TfGrid};

pub const N: usize = 1024;
pub const FS: f64 = 32.0;

pub fn gaussian() -> SampledSignal {
    generate(&SignalSpec::gaussian(N, FS, 1.0)).unwrap()
}

pub fn lfm_chirp(rate: f64) -> SampledSignal {
    generate(
        &SignalSpec::new(SignalKind::LfmChirp, N, FS)
            .param("width", 1.0)
            .param("rate", rate),
    )
    .unwrap()
}

pub fn two_component(sep_f: f64) -> SampledSignal {
    generate(
        &SignalSpec::new(SignalKind::TwoComponent, N, FS)
            .param("width", 1.0)
            .param("sep_t", 3.0)
            .param("sep_f", sep_f),
    )
    .unwrap()
}

/// `sum |rho_t - |a|^2| dt / ||a||^2`.
pub fn time_marginal_error(rho: &TfGrid, a: &SampledSignal) -> f64 {
    let m = tfkit::tfd::time_marginal(rho);
    let err: f64 = m
        .iter()
        .zip(a.samples())
        .map(|(x, s)| (x - s.norm_sqr()).abs())
        .sum();
    err * a.dt() / a.energy()
}

/// `sum |rho_f - |A|^2| df / ||a||^2` on the distribution's frequency axis.
pub fn freq_marginal_error(rho: &TfGrid, a: &SampledSignal) -> f64 {
    let m = tfkit::tfd::freq_marginal(rho);
    let spec = half_bin_spectrum(a);
    let err: f64 = m
        .iter()
        .zip(&spec)
        .map(|(x, s)| (x - s.norm_sqr()).abs())
        .sum();
    err * rho.df() / a.energy()
}

/// Uniform entries in [-3, 3] with `d` solved from the determinant; rejects
/// draws where `d` leaves the box.
pub fn random_sl2<R: Rng>(rng: &mut R) -> Sl2Matrix {
    loop {
        let (a, b, c) = (
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
        );
        if f64::abs(a) < 1e-3 {
            continue;
        }
        let d = (1.0 + b * c) / a;
        if d.abs() <= 3.0 {
            if let Ok(m) = Sl2Matrix::new(a, b, c, d) {
                return m;
            }
        }
    }
}
