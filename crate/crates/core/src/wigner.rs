//! Discrete Wigner-Ville distribution on the half-lag lattice, the cross
//! distribution, and Gaussian smoothing.
//!
//! `W[n,k] = 2 dt * sum_m a[n+m] conj(a[n-m]) exp(-j 2 pi m (k - N/2) / N)`,
//! zero outside the record. Lag `m` is a delay of `2m` samples, so bin `k`
//! sits at `f[k] = (k - N/2) fs / (2N)` and the grid spans `[-fs/4, fs/4)`.
//! Both marginals are then plain sums over the grid.

use std::f64::consts::PI;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, TfError};
use crate::fft::{self, Sign};
use crate::signal::SampledSignal;

/// Values over a (time, frequency) lattice; `values[[n, k]]` is time `n`,
/// frequency `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TfGrid<T = f64> {
    pub values: Array2<T>,
    pub t_axis: Vec<f64>,
    pub f_axis: Vec<f64>,
    pub sample_rate: f64,
}

/// `(k - N/2) fs / (2N)`.
pub fn wvd_freq_axis(n: usize, sample_rate: f64) -> Vec<f64> {
    let h = (n / 2) as f64;
    (0..n)
        .map(|k| (k as f64 - h) * sample_rate / (2 * n) as f64)
        .collect()
}

impl<T> TfGrid<T> {
    pub fn n(&self) -> usize {
        self.t_axis.len()
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate
    }

    pub fn df(&self) -> f64 {
        self.sample_rate / (2 * self.n()) as f64
    }

    /// Riemann cell `dt * df = 1 / (2N)`.
    pub fn cell(&self) -> f64 {
        self.dt() * self.df()
    }

    pub fn t0(&self) -> f64 {
        self.t_axis[0]
    }

    fn with_values<U>(&self, values: Array2<U>) -> TfGrid<U> {
        TfGrid {
            values,
            t_axis: self.t_axis.clone(),
            f_axis: self.f_axis.clone(),
            sample_rate: self.sample_rate,
        }
    }
}

impl TfGrid<f64> {
    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `sum sum W dt df`.
    pub fn mass(&self) -> f64 {
        self.values.sum() * self.cell()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> TfGrid {
        self.with_values(self.values.mapv(f))
    }

    pub fn to_complex(&self) -> TfGrid<Complex64> {
        self.with_values(self.values.mapv(|v| Complex64::new(v, 0.0)))
    }

    /// Max absolute difference relative to this grid's peak.
    pub fn max_diff(&self, other: &TfGrid) -> f64 {
        let d = self
            .values
            .iter()
            .zip(other.values.iter())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        d / self.peak().max(f64::MIN_POSITIVE)
    }
}

impl TfGrid<Complex64> {
    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.norm()))
    }

    pub fn re(&self) -> TfGrid {
        self.with_values(self.values.mapv(|v| v.re))
    }

    /// Largest imaginary part relative to the peak magnitude.
    pub fn imag_residue(&self) -> f64 {
        let peak = self.peak();
        if peak == 0.0 {
            return 0.0;
        }
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.im.abs())) / peak
    }

    /// Real part, refusing grids whose imaginary residue exceeds `tol` of peak.
    pub fn into_real(self, tol: f64) -> Result<TfGrid> {
        let residue = self.imag_residue();
        if residue > tol {
            return Err(TfError::ImaginaryResidue(residue));
        }
        Ok(self.re())
    }

    pub fn mass(&self) -> Complex64 {
        self.values.sum() * self.cell()
    }
}

/// Auto WVD. The imaginary residue is checked at 1e-10 of peak and dropped.
pub fn wvd(a: &SampledSignal) -> Result<TfGrid> {
    cross_wvd(a, a)?.into_real(1e-10)
}

/// Cross WVD of `u` and `v`:
/// `2 dt * sum_m u[n+m] conj(v[n-m]) exp(-j 2 pi m (k - N/2) / N)`.
pub fn cross_wvd(u: &SampledSignal, v: &SampledSignal) -> Result<TfGrid<Complex64>> {
    if !u.same_grid(v) {
        return Err(TfError::Mismatch);
    }
    let n = u.len();
    let h = n / 2;
    let scale = 2.0 * u.dt();
    let plan = fft::plan(n, Sign::Negative);
    let (us, vs) = (u.samples(), v.samples());

    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|row| {
            let mut buf = vec![Complex64::new(0.0, 0.0); n];
            let reach = row.min(n - 1 - row);
            for m in 0..=reach {
                buf[h + m] = us[row + m] * vs[row - m].conj();
                if m > 0 {
                    buf[h - m] = us[row - m] * vs[row + m].conj();
                }
            }
            fft::centered(plan.as_ref(), &mut buf);
            buf.iter_mut().for_each(|x| *x *= scale);
            buf
        })
        .collect();

    let mut values = Array2::zeros((n, n));
    for (r, row) in rows.into_iter().enumerate() {
        values
            .row_mut(r)
            .iter_mut()
            .zip(row)
            .for_each(|(dst, src)| *dst = src);
    }
    Ok(TfGrid {
        values,
        t_axis: u.time_axis(),
        f_axis: wvd_freq_axis(n, u.sample_rate()),
        sample_rate: u.sample_rate(),
    })
}

/// `W_{alpha beta}`: `W` convolved in time with `alpha^{-1/2} exp(-pi t^2 / alpha)`
/// and in frequency with `beta^{-1/2} exp(-pi f^2 / beta)`.
///
/// Runs as two separable passes in the ambiguity domain: multiply the Doppler
/// transform of every frequency column by `exp(-pi alpha nu^2)` and the delay
/// transform of every time row by `exp(-pi beta tau^2)`. Both kernels have unit
/// integral, so mass is preserved.
pub fn gaussian_smooth(w: &TfGrid, alpha: f64, beta: f64) -> Result<TfGrid> {
    if !(alpha > 0.0 && alpha.is_finite()) || !(beta > 0.0 && beta.is_finite()) {
        return Err(TfError::InvalidParameter(format!(
            "smoothing widths must be positive, got alpha={alpha}, beta={beta}"
        )));
    }
    let n = w.n();
    let h = n as f64 / 2.0;
    let fs = w.sample_rate;
    let fwd = fft::plan(n, Sign::Negative);
    let inv = fft::plan(n, Sign::Positive);

    // Doppler pass, one frequency column at a time.
    let doppler: Vec<f64> = (0..n)
        .map(|l| {
            let nu = (l as f64 - h) * fs / n as f64;
            (-PI * alpha * nu * nu).exp()
        })
        .collect();
    let mut out = w.values.mapv(|v| Complex64::new(v, 0.0));
    out.axis_iter_mut(Axis(1))
        .into_par_iter()
        .for_each(|mut col| {
            let mut buf: Vec<Complex64> = col.to_vec();
            fft::alternate(&mut buf);
            inv.process(&mut buf);
            buf.iter_mut().zip(&doppler).for_each(|(x, g)| *x *= *g);
            fwd.process(&mut buf);
            fft::alternate(&mut buf);
            col.iter_mut()
                .zip(buf)
                .for_each(|(dst, src)| *dst = src / n as f64);
        });

    // Delay pass, one time row at a time; tau[m] = 2 (m - N/2) / fs.
    let delay: Vec<f64> = (0..n)
        .map(|m| {
            let tau = 2.0 * (m as f64 - h) / fs;
            (-PI * beta * tau * tau).exp()
        })
        .collect();
    out.axis_iter_mut(Axis(0))
        .into_par_iter()
        .for_each(|mut row| {
            let mut buf: Vec<Complex64> = row.to_vec();
            fft::centered(inv.as_ref(), &mut buf);
            buf.iter_mut().zip(&delay).for_each(|(x, g)| *x *= *g);
            fft::centered(fwd.as_ref(), &mut buf);
            row.iter_mut()
                .zip(buf)
                .for_each(|(dst, src)| *dst = src / n as f64);
        });

    Ok(w.with_values(out.mapv(|v| v.re)))
}

/// `sum_k W[n,k] df` for every `n`.
pub fn time_marginal<T>(w: &TfGrid<T>) -> Vec<f64>
where
    T: Copy + Into<Complex64>,
{
    let df = w.df();
    w.values
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|&v| v.into().re).sum::<f64>() * df)
        .collect()
}

/// `sum_n W[n,k] dt` for every `k`.
pub fn freq_marginal<T>(w: &TfGrid<T>) -> Vec<f64>
where
    T: Copy + Into<Complex64>,
{
    let dt = w.dt();
    w.values
        .columns()
        .into_iter()
        .map(|c| c.iter().map(|&v| v.into().re).sum::<f64>() * dt)
        .collect()
}
