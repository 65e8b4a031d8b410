//! SL(2,R): matrices, factorization into the generators `J`, `t(k)`, `m(c)`,
//! their actions on sampled signals, and the covariance pushforward
//! `C' = S C S^T`.
//!
//! A word's matrix is the ordered product of its token matrices, and the word
//! acts on a signal right to left, so measured covariances follow
//! `C' = P C P^T` with `P` the word's product.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TfError};
use crate::fft::{self, Sign};
use crate::moments::CovarianceMatrix;
use crate::signal::{spectrum, SampledSignal};

const SYMPLECTIC_TOL: f64 = 1e-10;

/// Shear coefficient realized by [`act_chirp`]: multiplying by
/// `exp(-j pi k t^2)` moves the instantaneous frequency to `f - k t`, so the
/// covariance is pushed forward by `t(CHIRP_SHEAR_SIGN * k)`.
pub const CHIRP_SHEAR_SIGN: f64 = -1.0;

/// Real 2x2 matrix with unit determinant, `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sl2Matrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

pub const J: Sl2Matrix = Sl2Matrix {
    a: 0.0,
    b: 1.0,
    c: -1.0,
    d: 0.0,
};
pub const J_INV: Sl2Matrix = Sl2Matrix {
    a: 0.0,
    b: -1.0,
    c: 1.0,
    d: 0.0,
};
pub const IDENTITY: Sl2Matrix = Sl2Matrix {
    a: 1.0,
    b: 0.0,
    c: 0.0,
    d: 1.0,
};

/// Shear `t(k) = [[1, 0], [k, 1]]`.
pub fn shear(k: f64) -> Sl2Matrix {
    Sl2Matrix {
        a: 1.0,
        b: 0.0,
        c: k,
        d: 1.0,
    }
}

/// Dilation `m(c) = diag(c, 1/c)`, `c > 0`.
pub fn dilation(c: f64) -> Sl2Matrix {
    Sl2Matrix {
        a: c,
        b: 0.0,
        c: 0.0,
        d: 1.0 / c,
    }
}

/// `||S^T J S - J||_max < 1e-10`.
pub fn is_symplectic(m: [[f64; 2]; 2]) -> bool {
    let [[a, b], [c, d]] = m;
    if ![a, b, c, d].iter().all(|v| v.is_finite()) {
        return false;
    }
    // S^T J S = (ad - bc) J for 2x2
    let det = a * d - b * c;
    (det - 1.0).abs() < SYMPLECTIC_TOL
}

impl Sl2Matrix {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if !is_symplectic([[a, b], [c, d]]) {
            return Err(TfError::NotSymplectic(a * d - b * c));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            a: self.a,
            b: self.c,
            c: self.b,
            d: self.d,
        }
    }

    pub fn apply(&self, (t, f): (f64, f64)) -> (f64, f64) {
        (self.a * t + self.b * f, self.c * t + self.d * f)
    }

    pub fn max_diff(&self, o: &Sl2Matrix) -> f64 {
        [self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d]
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl Mul for Sl2Matrix {
    type Output = Sl2Matrix;

    fn mul(self, r: Sl2Matrix) -> Sl2Matrix {
        Sl2Matrix {
            a: self.a * r.a + self.b * r.c,
            b: self.a * r.b + self.b * r.d,
            c: self.c * r.a + self.d * r.c,
            d: self.c * r.b + self.d * r.d,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Token {
    J,
    Jinv,
    /// Shear `t(k)`.
    T(f64),
    /// Dilation `m(c)`, `c > 0`.
    M(f64),
}

impl Token {
    pub fn matrix(&self) -> Sl2Matrix {
        match *self {
            Token::J => J,
            Token::Jinv => J_INV,
            Token::T(k) => shear(k),
            Token::M(c) => dilation(c),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::J => f.write_str("J"),
            Token::Jinv => f.write_str("Jinv"),
            Token::T(k) => write!(f, "T({k:?})"),
            Token::M(c) => write!(f, "M({c:?})"),
        }
    }
}

impl FromStr for Token {
    type Err = TfError;

    fn from_str(s: &str) -> Result<Token> {
        let s = s.trim();
        match s {
            "J" => return Ok(Token::J),
            "Jinv" | "J^-1" => return Ok(Token::Jinv),
            _ => {}
        }
        let bad = || TfError::Parse(format!("bad generator token `{s}`"));
        let (head, rest) = s.split_at(1.min(s.len()));
        let arg: f64 = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?
            .trim()
            .parse()
            .map_err(|_| bad())?;
        if !arg.is_finite() {
            return Err(bad());
        }
        match head {
            "T" => Ok(Token::T(arg)),
            "M" if arg > 0.0 => Ok(Token::M(arg)),
            "M" => Err(TfError::InvalidParameter(format!(
                "M({arg}) needs a positive argument"
            ))),
            _ => Err(bad()),
        }
    }
}

/// Sequence of generator tokens; its matrix is the ordered product.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GeneratorWord {
    pub tokens: Vec<Token>,
}

impl GeneratorWord {
    pub fn new(tokens: Vec<Token>) -> Self {
        Self { tokens }
    }

    pub fn product(&self) -> Sl2Matrix {
        self.tokens.iter().fold(IDENTITY, |acc, t| acc * t.matrix())
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl FromStr for GeneratorWord {
    type Err = TfError;

    /// `"J,T(2.0),M(0.5)"`; the empty string is the empty word.
    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        let mut depth = 0;
        let mut start = 0;
        for (i, ch) in s.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    tokens.push(s[start..i].parse()?);
                    start = i + 1;
                }
                _ => {}
            }
        }
        if !s[start..].trim().is_empty() {
            tokens.push(s[start..].parse()?);
        } else if !tokens.is_empty() {
            return Err(TfError::Parse("trailing comma in generator word".into()));
        }
        Ok(Self { tokens })
    }
}

/// Factors `S` into generators.
///
/// With top-left `a > 0`, `S = t(c/a) m(a) J t(-b/a) J^-1`. A negative
/// top-left is handled through `-I = J J`, and when `|a| < |c|` the matrix is
/// first rotated, `S = J^-1 (J S)`, so that divisions stay well conditioned.
/// Rotation only happens for `|a| < 1/2`, which keeps shears a single token.
pub fn factor(s: &Sl2Matrix) -> Result<GeneratorWord> {
    if !is_symplectic([[s.a, s.b], [s.c, s.d]]) {
        return Err(TfError::NotSymplectic(s.det()));
    }
    let mut tokens = Vec::new();
    let mut m = *s;
    if m.a.abs() < 0.5 && m.a.abs() < m.c.abs() {
        tokens.push(Token::Jinv);
        m = J * m;
    }
    if m.a < 0.0 {
        tokens.extend([Token::J, Token::J]);
        m = Sl2Matrix {
            a: -m.a,
            b: -m.b,
            c: -m.c,
            d: -m.d,
        };
    }
    let (a, b, c) = (m.a, m.b, m.c);
    if c != 0.0 {
        tokens.push(Token::T(c / a));
    }
    if a != 1.0 {
        tokens.push(Token::M(a));
    }
    if b != 0.0 {
        tokens.extend([Token::J, Token::T(-b / a), Token::Jinv]);
    }
    Ok(GeneratorWord { tokens })
}

/// `C' = S C S^T` with means mapped by `S`.
pub fn pushforward(c: &CovarianceMatrix, s: &Sl2Matrix) -> Result<CovarianceMatrix> {
    if !is_symplectic([[s.a, s.b], [s.c, s.d]]) {
        return Err(TfError::NotSymplectic(s.det()));
    }
    let (vt, vf, x) = (c.var_t, c.var_f, c.cov_tf);
    let (a, b, cc, d) = (s.a, s.b, s.c, s.d);
    let (mean_t, mean_f) = s.apply((c.mean_t, c.mean_f));
    Ok(CovarianceMatrix {
        var_t: a * a * vt + 2.0 * a * b * x + b * b * vf,
        var_f: cc * cc * vt + 2.0 * cc * d * x + d * d * vf,
        cov_tf: a * cc * vt + (a * d + b * cc) * x + b * d * vf,
        mean_t,
        mean_f,
        total_mass: c.total_mass,
    })
}

/// Generator `J`: the unitary Fourier transform, resampled onto the time grid.
/// On a self-dual grid this is an exact centered DFT; otherwise the transform
/// is evaluated directly at the grid times.
pub fn act_fourier(a: &SampledSignal) -> Result<SampledSignal> {
    fourier_onto_time_grid(a, Sign::Negative)
}

/// `J^-1`: the inverse Fourier transform, on the same footing as
/// [`act_fourier`].
pub fn act_fourier_inverse(a: &SampledSignal) -> Result<SampledSignal> {
    fourier_onto_time_grid(a, Sign::Positive)
}

fn fourier_onto_time_grid(a: &SampledSignal, sign: Sign) -> Result<SampledSignal> {
    let s = if sign == Sign::Negative { -1.0 } else { 1.0 };
    let out = if a.is_self_dual() {
        let mut buf = a.samples().to_vec();
        fft::centered(fft::plan(a.len(), sign).as_ref(), &mut buf);
        buf.iter_mut().for_each(|v| *v *= a.dt());
        buf
    } else {
        let times = a.time_axis();
        times
            .iter()
            .map(|&f| {
                a.samples()
                    .iter()
                    .zip(&times)
                    .map(|(&x, &t)| x * Complex64::from_polar(1.0, s * 2.0 * PI * f * t))
                    .sum::<Complex64>()
                    * a.dt()
            })
            .collect()
    };
    a.with_samples(out)
}

/// Multiply by `exp(-j pi k t^2)`. See [`CHIRP_SHEAR_SIGN`] for the induced
/// shear.
pub fn act_chirp(a: &SampledSignal, k: f64) -> Result<SampledSignal> {
    let out: Vec<Complex64> = a
        .samples()
        .iter()
        .enumerate()
        .map(|(n, &x)| {
            let t = a.time(n);
            x * Complex64::from_polar(1.0, -PI * k * t * t)
        })
        .collect();
    let out = a.with_samples(out)?;
    let leak = band_leakage(&out);
    if leak > 1e-6 {
        log::warn!("chirp rate {k} pushes {leak:e} of the energy outside |f| < fs/4");
    }
    Ok(out)
}

/// What dilation does when the result does not fit the grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SupportPolicy {
    #[default]
    Warn,
    Fail,
}

/// Threshold on lost or edge energy above which dilation reports overflow.
pub const SUPPORT_TOL: f64 = 1e-6;

/// Generator `m(c)`: `a(t / c) / sqrt(c)`, evaluated by band-limited
/// (Fourier-series) interpolation of the sampled spectrum. Points with
/// `t / c` outside the record are zero.
pub fn act_dilate(a: &SampledSignal, c: f64, policy: SupportPolicy) -> Result<SampledSignal> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(TfError::InvalidParameter(format!(
            "dilation factor must be positive, got {c}"
        )));
    }
    let n = a.len();
    let spec = spectrum(a);
    let freqs = a.freq_axis();
    let df = a.sample_rate() / n as f64;
    let scale = df / c.sqrt();
    let (lo, hi) = (a.t0(), a.t0() + n as f64 * a.dt());
    let out: Vec<Complex64> = (0..n)
        .map(|i| {
            let t = a.time(i) / c;
            if t < lo || t >= hi {
                // zero outside the record, not the periodic continuation
                return Complex64::new(0.0, 0.0);
            }
            spec.iter()
                .zip(&freqs)
                .map(|(&v, &f)| v * Complex64::from_polar(1.0, 2.0 * PI * f * t))
                .sum::<Complex64>()
                * scale
        })
        .collect();
    let out = a.with_samples(out)?;

    let (e_in, e_out) = (a.energy(), out.energy());
    let lost = ((e_out - e_in) / e_in).abs();
    let edge = edge_fraction(&out);
    let worst = lost.max(edge);
    if worst > SUPPORT_TOL {
        match policy {
            SupportPolicy::Warn => log::warn!("dilation by {c} overflows the grid ({worst:e})"),
            SupportPolicy::Fail => return Err(TfError::SupportOverflow(worst)),
        }
    }
    Ok(out)
}

/// Energy fraction in the outer 1/32 of the record on either side.
fn edge_fraction(a: &SampledSignal) -> f64 {
    let n = a.len();
    let w = (n / 32).max(1);
    let total: f64 = a.samples().iter().map(|s| s.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let edge: f64 = a.samples()[..w]
        .iter()
        .chain(&a.samples()[n - w..])
        .map(|s| s.norm_sqr())
        .sum();
    edge / total
}

/// Spectral energy fraction outside the WVD band `|f| < fs/4`.
fn band_leakage(a: &SampledSignal) -> f64 {
    let spec = spectrum(a);
    let quarter = a.sample_rate() / 4.0;
    let total: f64 = spec.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let out: f64 = spec
        .iter()
        .zip(a.freq_axis())
        .filter(|(_, f)| f.abs() >= quarter)
        .map(|(v, _)| v.norm_sqr())
        .sum();
    out / total
}

/// Signal-level action of one token; the covariance moves by the token's
/// matrix.
pub fn act_token(a: &SampledSignal, token: Token, policy: SupportPolicy) -> Result<SampledSignal> {
    match token {
        Token::J => act_fourier(a),
        Token::Jinv => act_fourier_inverse(a),
        Token::T(k) => act_chirp(a, CHIRP_SHEAR_SIGN * k),
        Token::M(c) => act_dilate(a, c, policy),
    }
}

/// Applies the word right to left.
pub fn act_word(
    a: &SampledSignal,
    w: &GeneratorWord,
    policy: SupportPolicy,
) -> Result<SampledSignal> {
    w.tokens
        .iter()
        .rev()
        .try_fold(a.clone(), |acc, &t| act_token(&acc, t, policy))
}
