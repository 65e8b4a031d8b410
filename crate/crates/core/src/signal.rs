//! Uniformly sampled complex signals, the test-signal factory, and the
//! Fourier conventions every other module builds on.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Result, TfError};
use crate::fft::{self, Sign};

/// Uniformly sampled complex signal. Sample `n` sits at `t0 + n / fs`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSignal {
    samples: Vec<Complex64>,
    sample_rate: f64,
    t0: f64,
}

impl SampledSignal {
    pub fn new(samples: Vec<Complex64>, sample_rate: f64, t0: f64) -> Result<Self> {
        if samples.len() < 2 || !samples.len().is_multiple_of(2) {
            return Err(TfError::BadLength(samples.len()));
        }
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(TfError::BadSampleRate(sample_rate));
        }
        if !t0.is_finite()
            || samples
                .iter()
                .any(|s| !s.re.is_finite() || !s.im.is_finite())
        {
            return Err(TfError::NonFinite);
        }
        Ok(Self {
            samples,
            sample_rate,
            t0,
        })
    }

    /// Signal on the grid centered on t = 0, `t0 = -N / (2 fs)`.
    pub fn centered(samples: Vec<Complex64>, sample_rate: f64) -> Result<Self> {
        let t0 = centered_t0(samples.len(), sample_rate);
        Self::new(samples, sample_rate, t0)
    }

    /// Same grid, new samples.
    pub fn with_samples(&self, samples: Vec<Complex64>) -> Result<Self> {
        Self::new(samples, self.sample_rate, self.t0)
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate
    }

    pub fn time(&self, n: usize) -> f64 {
        self.t0 + n as f64 / self.sample_rate
    }

    pub fn time_axis(&self) -> Vec<f64> {
        (0..self.len()).map(|n| self.time(n)).collect()
    }

    /// Spectrum axis `f[k] = (k - N/2) fs / N`.
    pub fn freq_axis(&self) -> Vec<f64> {
        let n = self.len();
        let h = (n / 2) as f64;
        (0..n)
            .map(|k| (k as f64 - h) * self.sample_rate / n as f64)
            .collect()
    }

    /// Whether the spectrum axis coincides with the time axis, i.e. the grid
    /// is centered and `fs^2 = N`.
    pub fn is_self_dual(&self) -> bool {
        let n = self.len() as f64;
        let centered = centered_t0(self.len(), self.sample_rate);
        ((self.sample_rate * self.sample_rate - n) / n).abs() < 1e-12
            && (self.t0 - centered).abs() <= 1e-12 * centered.abs().max(1.0)
    }

    /// Same length and sample rate.
    pub fn same_grid(&self, other: &SampledSignal) -> bool {
        self.len() == other.len() && self.sample_rate == other.sample_rate
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    /// `||x||_2^2 = sum |x[n]|^2 dt`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * self.dt()
    }
}

pub fn centered_t0(n: usize, sample_rate: f64) -> f64 {
    -(n as f64) / (2.0 * sample_rate)
}

/// Test-signal families.
#[derive(Clone, Debug, PartialEq)]
pub enum SignalKind {
    Gaussian,
    LfmChirp,
    Tone,
    TwoTone,
    TwoComponent,
    FromFile(PathBuf),
}

impl SignalKind {
    pub fn name(&self) -> &'static str {
        match self {
            SignalKind::Gaussian => "gaussian",
            SignalKind::LfmChirp => "lfm_chirp",
            SignalKind::Tone => "tone",
            SignalKind::TwoTone => "two_tone",
            SignalKind::TwoComponent => "two_component",
            SignalKind::FromFile(_) => "from_file",
        }
    }

    /// Keys that must be present in the parameter map.
    pub fn required_keys(&self) -> &'static [&'static str] {
        match self {
            SignalKind::Gaussian => &["width"],
            SignalKind::LfmChirp => &["width", "rate"],
            SignalKind::Tone => &["fc"],
            SignalKind::TwoTone => &["f1", "f2"],
            SignalKind::TwoComponent => &["width", "sep_t"],
            SignalKind::FromFile(_) => &[],
        }
    }

    /// Keys that may be present, with their defaults. `t0` defaults to the
    /// centered grid and is handled separately.
    pub fn optional_keys(&self) -> &'static [(&'static str, f64)] {
        match self {
            SignalKind::Gaussian | SignalKind::LfmChirp => &[("tc", 0.0), ("fc", 0.0)],
            SignalKind::TwoComponent => &[("tc", 0.0), ("fc", 0.0), ("sep_f", 0.0)],
            _ => &[],
        }
    }
}

impl fmt::Display for SignalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SignalKind {
    type Err = TfError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gaussian" => SignalKind::Gaussian,
            "lfm_chirp" => SignalKind::LfmChirp,
            "tone" => SignalKind::Tone,
            "two_tone" => SignalKind::TwoTone,
            "two_component" => SignalKind::TwoComponent,
            other => match other.strip_prefix("from_file:") {
                Some(path) => SignalKind::FromFile(PathBuf::from(path)),
                None => {
                    return Err(TfError::InvalidParameter(format!(
                        "unknown signal kind `{s}`"
                    )))
                }
            },
        })
    }
}

/// Recipe for a generated signal.
///
/// Parameter keys (seconds / Hz): `width`, `tc`, `fc`, `rate` (Hz/s),
/// `sep_t`, `sep_f`, `f1`, `f2`, and optionally `t0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalSpec {
    pub kind: SignalKind,
    pub params: BTreeMap<String, f64>,
    pub n: usize,
    pub sample_rate: f64,
}

impl SignalSpec {
    pub fn new(kind: SignalKind, n: usize, sample_rate: f64) -> Self {
        Self {
            kind,
            params: BTreeMap::new(),
            n,
            sample_rate,
        }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    /// Unit Gaussian of the given width on a centered grid.
    pub fn gaussian(n: usize, sample_rate: f64, width: f64) -> Self {
        Self::new(SignalKind::Gaussian, n, sample_rate).param("width", width)
    }

    fn get(&self, key: &'static str) -> Result<f64> {
        if let Some(&v) = self.params.get(key) {
            return Ok(v);
        }
        if let Some(&(_, d)) = self.kind.optional_keys().iter().find(|(k, _)| *k == key) {
            return Ok(d);
        }
        Err(TfError::MissingParameter {
            kind: self.kind.name(),
            key,
        })
    }
}

/// Builds a signal from its recipe. Every kind except `from_file` comes out
/// with unit L2 norm.
pub fn generate(spec: &SignalSpec) -> Result<SampledSignal> {
    if let SignalKind::FromFile(path) = &spec.kind {
        return crate::io::read_signal_path(path);
    }
    for key in spec.kind.required_keys() {
        spec.get(key)?;
    }
    let n = spec.n;
    if n < 2 || !n.is_multiple_of(2) {
        return Err(TfError::BadLength(n));
    }
    let fs = spec.sample_rate;
    if !(fs > 0.0 && fs.is_finite()) {
        return Err(TfError::BadSampleRate(fs));
    }
    let t0 = spec
        .params
        .get("t0")
        .copied()
        .unwrap_or_else(|| centered_t0(n, fs));
    let times: Vec<f64> = (0..n).map(|i| t0 + i as f64 / fs).collect();

    let positive = |key: &'static str| -> Result<f64> {
        let v = spec.get(key)?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(TfError::InvalidParameter(format!(
                "`{key}` must be positive, got {v}"
            )))
        }
    };

    let samples: Vec<Complex64> = match spec.kind {
        SignalKind::Gaussian => {
            let (w, tc, fc) = (positive("width")?, spec.get("tc")?, spec.get("fc")?);
            times.iter().map(|&t| gaussian_atom(t, tc, fc, w)).collect()
        }
        SignalKind::LfmChirp => {
            let (w, tc, fc, k) = (
                positive("width")?,
                spec.get("tc")?,
                spec.get("fc")?,
                spec.get("rate")?,
            );
            times
                .iter()
                .map(|&t| {
                    gaussian_atom(t, tc, fc, w)
                        * Complex64::from_polar(1.0, PI * k * (t - tc).powi(2))
                })
                .collect()
        }
        SignalKind::Tone => {
            let fc = spec.get("fc")?;
            times
                .iter()
                .map(|&t| Complex64::from_polar(1.0, 2.0 * PI * fc * t))
                .collect()
        }
        SignalKind::TwoTone => {
            let (f1, f2) = (spec.get("f1")?, spec.get("f2")?);
            times
                .iter()
                .map(|&t| {
                    Complex64::from_polar(1.0, 2.0 * PI * f1 * t)
                        + Complex64::from_polar(1.0, 2.0 * PI * f2 * t)
                })
                .collect()
        }
        SignalKind::TwoComponent => {
            let w = positive("width")?;
            let (tc, fc) = (spec.get("tc")?, spec.get("fc")?);
            let (st, sf) = (spec.get("sep_t")?, spec.get("sep_f")?);
            times
                .iter()
                .map(|&t| {
                    gaussian_atom(t, tc - st / 2.0, fc - sf / 2.0, w)
                        + gaussian_atom(t, tc + st / 2.0, fc + sf / 2.0, w)
                })
                .collect()
        }
        SignalKind::FromFile(_) => unreachable!(),
    };
    normalize(&SampledSignal::new(samples, fs, t0)?)
}

/// `2^{1/4} / sqrt(w) * exp(-pi (t - tc)^2 / w^2) * exp(j 2 pi fc t)`.
fn gaussian_atom(t: f64, tc: f64, fc: f64, width: f64) -> Complex64 {
    let env = 2f64.powf(0.25) / width.sqrt() * (-PI * ((t - tc) / width).powi(2)).exp();
    Complex64::from_polar(env, 2.0 * PI * fc * t)
}

/// Plain DFT `X[k] = sum_n x[n] exp(-j 2 pi n k / N)`.
pub fn dft(x: &[Complex64]) -> Vec<Complex64> {
    let mut buf = x.to_vec();
    if !buf.is_empty() {
        fft::transform(&mut buf, Sign::Negative);
    }
    buf
}

/// Inverse of [`dft`], including the 1/N factor.
pub fn idft(x: &[Complex64]) -> Vec<Complex64> {
    let mut buf = x.to_vec();
    if !buf.is_empty() {
        fft::transform(&mut buf, Sign::Positive);
        let scale = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
    }
    buf
}

/// Continuous-Fourier approximation `A(f) = dt * sum_n a[n] exp(-j 2 pi f t_n)`
/// on the centered axis [`SampledSignal::freq_axis`].
pub fn spectrum(a: &SampledSignal) -> Vec<Complex64> {
    let n = a.len();
    let mut buf = a.samples().to_vec();
    fft::alternate(&mut buf);
    fft::transform(&mut buf, Sign::Negative);
    let h = n / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (k, slot) in out.iter_mut().enumerate() {
        let f = (k as f64 - h as f64) * a.sample_rate() / n as f64;
        *slot = buf[k] * a.dt() * Complex64::from_polar(1.0, -2.0 * PI * f * a.t0());
    }
    out
}

/// Sampled inverse of [`spectrum`]: rebuilds the signal on `template`'s grid.
pub fn inverse_spectrum(values: &[Complex64], template: &SampledSignal) -> Result<SampledSignal> {
    let n = template.len();
    if values.len() != n {
        return Err(TfError::Mismatch);
    }
    let h = n as f64 / 2.0;
    let mut buf: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let f = (k as f64 - h) * template.sample_rate() / n as f64;
            v * Complex64::from_polar(1.0, 2.0 * PI * f * template.t0())
        })
        .collect();
    fft::transform(&mut buf, Sign::Positive);
    fft::alternate(&mut buf);
    let scale = template.sample_rate() / n as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
    template.with_samples(buf)
}

/// `A(f)` on the WVD frequency axis `f[k] = (k - N/2) fs / (2N)`, via a
/// zero-padded 2N-point transform.
pub fn half_bin_spectrum(a: &SampledSignal) -> Vec<Complex64> {
    let n = a.len();
    let mut buf = a.samples().to_vec();
    buf.resize(2 * n, Complex64::new(0.0, 0.0));
    fft::transform(&mut buf, Sign::Negative);
    let h = (n / 2) as isize;
    (0..n)
        .map(|k| {
            let q = (k as isize - h).rem_euclid(2 * n as isize) as usize;
            let f = (k as f64 - h as f64) * a.sample_rate() / (2 * n) as f64;
            buf[q] * a.dt() * Complex64::from_polar(1.0, -2.0 * PI * f * a.t0())
        })
        .collect()
}

/// Direct evaluation of `A(f)` at arbitrary frequencies.
pub fn spectrum_at(a: &SampledSignal, freqs: &[f64]) -> Vec<Complex64> {
    let times = a.time_axis();
    freqs
        .iter()
        .map(|&f| {
            a.samples()
                .iter()
                .zip(&times)
                .map(|(&s, &t)| s * Complex64::from_polar(1.0, -2.0 * PI * f * t))
                .sum::<Complex64>()
                * a.dt()
        })
        .collect()
}

/// Analytic signal by spectral masking: negative bins zeroed, positive bins
/// doubled, DC and Nyquist left alone.
pub fn analytic(x: &SampledSignal) -> Result<SampledSignal> {
    let peak = x.peak();
    let worst_im = x.samples().iter().map(|s| s.im.abs()).fold(0.0, f64::max);
    if peak > 0.0 && worst_im > 1e-12 * peak {
        return Err(TfError::NotReal(worst_im / peak));
    }
    let n = x.len();
    let mut spec: Vec<Complex64> = x
        .samples()
        .iter()
        .map(|s| Complex64::new(s.re, 0.0))
        .collect();
    fft::transform(&mut spec, Sign::Negative);
    for (k, v) in spec.iter_mut().enumerate() {
        if k == 0 || k == n / 2 {
            continue;
        }
        if k < n / 2 {
            *v *= 2.0;
        } else {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    x.with_samples(idft(&spec))
}

/// `sqrt(sum |x[n]|^2 dt)`.
pub fn norm2(x: &SampledSignal) -> f64 {
    x.energy().sqrt()
}

pub fn normalize(x: &SampledSignal) -> Result<SampledSignal> {
    let norm = norm2(x);
    if norm == 0.0 {
        return Err(TfError::ZeroSignal);
    }
    x.with_samples(x.samples().iter().map(|&s| s / norm).collect())
}
