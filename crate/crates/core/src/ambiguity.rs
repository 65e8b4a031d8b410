//! Symmetric ambiguity function on the (delay, Doppler) lattice dual to the
//! WVD grid, and ambiguity-domain filtering.
//!
//! `A(tau, nu) = int a(t + tau/2) conj(a(t - tau/2)) exp(j 2 pi nu t) dt` and
//! `W(t, f) = int int A(tau, nu) exp(-j 2 pi (nu t + f tau)) dtau dnu`.
//! On the lattice, `tau[m] = 2 (m - N/2) / fs` and `nu[l] = (l - N/2) fs / N`,
//! and both directions are exact discrete transforms of each other.

use std::f64::consts::PI;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, TfError};
use crate::fft::{self, Sign};
use crate::kernels::Kernel;
use crate::signal::SampledSignal;
use crate::wigner::{wvd_freq_axis, TfGrid};

/// Complex values over (delay, Doppler); `values[[m, l]]` is delay `m`,
/// Doppler `l`. `t0` is the time origin of the dual TF grid, which fixes the
/// Doppler phase.
#[derive(Clone, Debug, PartialEq)]
pub struct AmbGrid {
    pub values: Array2<Complex64>,
    pub tau_axis: Vec<f64>,
    pub nu_axis: Vec<f64>,
    pub sample_rate: f64,
    pub t0: f64,
}

pub fn tau_axis(n: usize, sample_rate: f64) -> Vec<f64> {
    let h = (n / 2) as f64;
    (0..n).map(|m| 2.0 * (m as f64 - h) / sample_rate).collect()
}

pub fn nu_axis(n: usize, sample_rate: f64) -> Vec<f64> {
    let h = (n / 2) as f64;
    (0..n)
        .map(|l| (l as f64 - h) * sample_rate / n as f64)
        .collect()
}

impl AmbGrid {
    pub fn n(&self) -> usize {
        self.tau_axis.len()
    }

    /// Index of (tau = 0, nu = 0).
    pub fn center(&self) -> (usize, usize) {
        (self.n() / 2, self.n() / 2)
    }

    pub fn at_origin(&self) -> Complex64 {
        self.values[self.center()]
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.norm()))
    }

    /// `sum sum |A|^2`.
    pub fn volume(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> AmbGrid {
        AmbGrid {
            values: self.values.mapv(f),
            ..self.clone_axes()
        }
    }

    fn clone_axes(&self) -> AmbGrid {
        AmbGrid {
            values: Array2::zeros((0, 0)),
            tau_axis: self.tau_axis.clone(),
            nu_axis: self.nu_axis.clone(),
            sample_rate: self.sample_rate,
            t0: self.t0,
        }
    }

    /// `max |A(-tau,-nu) - conj A(tau,nu)|` over indices whose mirror is on the
    /// grid, relative to the peak.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for m in 1..n {
            for l in 1..n {
                let d = self.values[[n - m, n - l]] - self.values[[m, l]].conj();
                worst = worst.max(d.norm());
            }
        }
        worst / self.peak().max(f64::MIN_POSITIVE)
    }

    /// Max absolute difference relative to this grid's peak.
    pub fn max_diff(&self, other: &AmbGrid) -> f64 {
        let d = self
            .values
            .iter()
            .zip(other.values.iter())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()));
        d / self.peak().max(f64::MIN_POSITIVE)
    }
}

/// Lag products `r[n, m]` (delay `m` as a column) to `A[m, l]`.
fn lag_to_ambiguity(lags: Array2<Complex64>, sample_rate: f64, t0: f64) -> AmbGrid {
    let n = lags.nrows();
    let dt = 1.0 / sample_rate;
    let nus = nu_axis(n, sample_rate);
    let phase: Vec<Complex64> = nus
        .iter()
        .map(|&nu| dt * Complex64::from_polar(1.0, 2.0 * PI * nu * t0))
        .collect();
    let inv = fft::plan(n, Sign::Positive);
    // values[[m, l]]: transpose so each delay is a contiguous row
    let mut values = lags.reversed_axes().as_standard_layout().into_owned();
    values
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .for_each(|mut row| {
            let mut buf = row.to_vec();
            fft::alternate(&mut buf);
            inv.process(&mut buf);
            row.iter_mut()
                .zip(buf)
                .zip(&phase)
                .for_each(|((dst, v), p)| *dst = v * p);
        });
    AmbGrid {
        values,
        tau_axis: tau_axis(n, sample_rate),
        nu_axis: nus,
        sample_rate,
        t0,
    }
}

/// `A[m, l]` back to lag products `r[n, m]` (time as rows).
fn ambiguity_to_lag(a: &AmbGrid) -> Array2<Complex64> {
    let n = a.n();
    let dnu = a.sample_rate / n as f64;
    let phase: Vec<Complex64> = a
        .nu_axis
        .iter()
        .map(|&nu| dnu * Complex64::from_polar(1.0, -2.0 * PI * nu * a.t0))
        .collect();
    let fwd = fft::plan(n, Sign::Negative);
    let mut by_delay = a.values.clone();
    by_delay
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .for_each(|mut row| {
            let mut buf: Vec<Complex64> = row.iter().zip(&phase).map(|(v, p)| v * p).collect();
            fwd.process(&mut buf);
            fft::alternate(&mut buf);
            row.iter_mut().zip(buf).for_each(|(dst, v)| *dst = v);
        });
    by_delay.reversed_axes().as_standard_layout().into_owned()
}

/// Exact discrete transform of a TF grid to the ambiguity domain.
pub fn ambiguity_from_wvd<T>(w: &TfGrid<T>) -> AmbGrid
where
    T: Copy + Into<Complex64> + Send + Sync,
{
    let n = w.n();
    let df = w.df();
    let inv = fft::plan(n, Sign::Positive);
    let mut lags = w.values.mapv(|v| v.into());
    lags.axis_iter_mut(Axis(0))
        .into_par_iter()
        .for_each(|mut row| {
            let mut buf = row.to_vec();
            fft::centered(inv.as_ref(), &mut buf);
            row.iter_mut().zip(buf).for_each(|(dst, v)| *dst = v * df);
        });
    lag_to_ambiguity(lags, w.sample_rate, w.t0())
}

/// Inverse of [`ambiguity_from_wvd`]. The result is complex in general; for
/// Hermitian-symmetric input the imaginary part is round-off.
pub fn wvd_from_ambiguity(a: &AmbGrid) -> TfGrid<Complex64> {
    let n = a.n();
    let dtau = 2.0 / a.sample_rate;
    let fwd = fft::plan(n, Sign::Negative);
    let mut values = ambiguity_to_lag(a);
    values
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .for_each(|mut row| {
            let mut buf = row.to_vec();
            fft::centered(fwd.as_ref(), &mut buf);
            row.iter_mut().zip(buf).for_each(|(dst, v)| *dst = v * dtau);
        });
    TfGrid {
        values,
        t_axis: (0..n).map(|i| a.t0 + i as f64 / a.sample_rate).collect(),
        f_axis: wvd_freq_axis(n, a.sample_rate),
        sample_rate: a.sample_rate,
    }
}

/// Ambiguity function straight from the lag products
/// `a[n + m'] conj(a[n - m'])` at even sample lags `2m'`, without going
/// through the WVD.
pub fn direct_ambiguity(a: &SampledSignal) -> AmbGrid {
    let n = a.len();
    let h = n / 2;
    let s = a.samples();
    let mut lags = Array2::<Complex64>::zeros((n, n));
    for row in 0..n {
        let reach = row.min(n - 1 - row);
        for m in 0..=reach {
            lags[[row, h + m]] = s[row + m] * s[row - m].conj();
            if m > 0 {
                lags[[row, h - m]] = s[row - m] * s[row + m].conj();
            }
        }
    }
    lag_to_ambiguity(lags, a.sample_rate(), a.t0())
}

/// Single-point evaluation `dt * sum_n a[n+m] conj(a[n-m]) exp(j 2 pi nu t_n)`
/// for a delay of `2m` samples and any Doppler `nu`.
pub fn ambiguity_at(a: &SampledSignal, lag: isize, nu: f64) -> Complex64 {
    let n = a.len() as isize;
    let s = a.samples();
    (0..n)
        .filter(|&i| i + lag >= 0 && i + lag < n && i - lag >= 0 && i - lag < n)
        .map(|i| {
            s[(i + lag) as usize]
                * s[(i - lag) as usize].conj()
                * Complex64::from_polar(1.0, 2.0 * PI * nu * a.time(i as usize))
        })
        .sum::<Complex64>()
        * a.dt()
}

/// Pointwise product `g(tau, nu) A(tau, nu)`.
pub fn apply_kernel(a: &AmbGrid, g: &Kernel) -> Result<AmbGrid> {
    let mut out = a.clone();
    for (m, &tau) in a.tau_axis.iter().enumerate() {
        for (l, &nu) in a.nu_axis.iter().enumerate() {
            let k = g
                .evaluate(tau, nu)
                .ok_or_else(|| TfError::KernelUndefined {
                    name: g.name().to_string(),
                    tau,
                    nu,
                })?;
            out.values[[m, l]] *= k;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelSpec;
    use crate::signal::{generate, SignalKind, SignalSpec};
    use crate::wigner::wvd;

    fn unit_gaussian() -> SampledSignal {
        generate(&SignalSpec::gaussian(1024, 32.0, 1.0)).unwrap()
    }

    #[test]
    fn gaussian_ambiguity_matches_closed_form_on_axes() {
        let g = unit_gaussian();
        let a = ambiguity_from_wvd(&wvd(&g).unwrap());
        let (cm, cl) = a.center();
        assert!((a.at_origin() - Complex64::new(1.0, 0.0)).norm() < 1e-8);
        for (m, &tau) in a.tau_axis.iter().enumerate() {
            let want = (-PI * tau * tau / 2.0).exp();
            if want > 1e-6 {
                assert!((a.values[[m, cl]].norm() - want).abs() < 1e-4 * want);
            }
        }
        for (l, &nu) in a.nu_axis.iter().enumerate() {
            let want = (-PI * nu * nu / 2.0).exp();
            if want > 1e-6 {
                assert!((a.values[[cm, l]].norm() - want).abs() < 1e-4 * want);
            }
        }
    }

    #[test]
    fn direct_path_agrees_with_transform_path() {
        let x = generate(
            &SignalSpec::new(SignalKind::LfmChirp, 256, 16.0)
                .param("width", 1.0)
                .param("rate", 1.0)
                .param("t0", -7.0),
        )
        .unwrap();
        let via_wvd = ambiguity_from_wvd(&wvd(&x).unwrap());
        let direct = direct_ambiguity(&x);
        assert!(direct.max_diff(&via_wvd) < 1e-8);
        for (lag, l) in [(0isize, 128usize), (3, 140), (-5, 100), (10, 7)] {
            let m = (128 + lag) as usize;
            let p = ambiguity_at(&x, lag, direct.nu_axis[l]);
            assert!((p - direct.values[[m, l]]).norm() < 1e-10);
        }
    }

    #[test]
    fn tone_ambiguity_sits_on_zero_doppler_with_linear_phase() {
        let f0 = 2.0;
        let x = generate(&SignalSpec::new(SignalKind::Tone, 256, 16.0).param("fc", f0)).unwrap();
        let a = direct_ambiguity(&x);
        let (cm, cl) = a.center();
        let on_line: f64 = a.values.column(cl).iter().map(|v| v.norm_sqr()).sum();
        assert!(on_line > 0.2 * a.volume());
        // A(tau, 0) = exp(j 2 pi f0 tau) * overlap(tau)
        for dm in [1usize, 2, 5, 9] {
            let v = a.values[[cm + dm, cl]];
            let tau = a.tau_axis[cm + dm];
            let want = Complex64::from_polar(1.0, 2.0 * PI * f0 * tau);
            assert!((v / v.norm() - want).norm() < 1e-9);
        }
    }

    #[test]
    fn zero_signal_and_zero_kernel_give_zero_grid() {
        let z = SampledSignal::centered(vec![Complex64::new(0.0, 0.0); 32], 4.0).unwrap();
        assert!(direct_ambiguity(&z).values.iter().all(|v| v.norm() == 0.0));
        let g = unit_gaussian();
        let a = ambiguity_from_wvd(&wvd(&g).unwrap());
        let zero = Kernel::constant("zero", Complex64::new(0.0, 0.0));
        assert!(apply_kernel(&a, &zero)
            .unwrap()
            .values
            .iter()
            .all(|v| v.norm() == 0.0));
        let one = KernelSpec::parse("wigner").unwrap().build_for(&g).unwrap();
        assert_eq!(apply_kernel(&a, &one).unwrap(), a);
    }

    #[test]
    fn self_ambiguity_is_hermitian_and_peaks_at_origin() {
        let x = generate(
            &SignalSpec::new(SignalKind::TwoComponent, 256, 16.0)
                .param("width", 1.0)
                .param("sep_t", 3.0)
                .param("sep_f", 1.0),
        )
        .unwrap();
        let a = ambiguity_from_wvd(&wvd(&x).unwrap());
        assert!(a.hermitian_defect() < 1e-10);
        let origin = a.at_origin().re;
        assert!(a.values.iter().all(|v| v.norm() <= origin * (1.0 + 1e-10)));
    }
}
