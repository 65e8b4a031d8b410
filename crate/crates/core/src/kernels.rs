//! Ambiguity-domain kernels `g(tau, nu)` and the marginality predicates.
//!
//! Phase conventions: Rihaczek is `exp(j pi tau nu)`, Levin
//! `exp(-j pi |tau| nu)` and Page `exp(j pi |tau| nu)`. The literature is not
//! consistent on these signs; the marginal predicates do not depend on them.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::ambiguity::{direct_ambiguity, AmbGrid};
use crate::error::{Result, TfError};
use crate::signal::{generate, normalize, SampledSignal, SignalSpec};

const MARGINAL_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub enum KernelKind {
    Wigner,
    Gaussian {
        alpha: f64,
        beta: f64,
    },
    Rihaczek,
    Levin,
    Page,
    BornJordan,
    /// Spectrogram with the given analysis window (normalized internally).
    Spectrogram {
        window: SampledSignal,
    },
}

#[derive(Clone, Debug)]
enum Shape {
    Wigner,
    Gaussian {
        alpha: f64,
        beta: f64,
    },
    Rihaczek,
    Levin,
    Page,
    BornJordan,
    /// Conjugated self-ambiguity of the window, sampled on its lattice.
    Spectrogram(Arc<AmbGrid>),
    Constant(Complex64),
}

/// An ambiguity-domain filter. Immutable; cheap to clone.
#[derive(Clone, Debug)]
pub struct Kernel {
    name: String,
    params: BTreeMap<String, f64>,
    shape: Shape,
}

pub fn make(kind: KernelKind) -> Result<Kernel> {
    let mut params = BTreeMap::new();
    let (name, shape) = match kind {
        KernelKind::Wigner => ("wigner", Shape::Wigner),
        KernelKind::Gaussian { alpha, beta } => {
            if !(alpha > 0.0 && alpha.is_finite() && beta > 0.0 && beta.is_finite()) {
                return Err(TfError::InvalidParameter(format!(
                    "gaussian kernel needs alpha, beta > 0, got {alpha}, {beta}"
                )));
            }
            params.insert("alpha".into(), alpha);
            params.insert("beta".into(), beta);
            ("gaussian", Shape::Gaussian { alpha, beta })
        }
        KernelKind::Rihaczek => ("rihaczek", Shape::Rihaczek),
        KernelKind::Levin => ("levin", Shape::Levin),
        KernelKind::Page => ("page", Shape::Page),
        KernelKind::BornJordan => ("born_jordan", Shape::BornJordan),
        KernelKind::Spectrogram { window } => {
            let window = normalize(&window)?;
            (
                "spectrogram",
                Shape::Spectrogram(Arc::new(direct_ambiguity(&window))),
            )
        }
    };
    Ok(Kernel {
        name: name.to_string(),
        params,
        shape,
    })
}

impl Kernel {
    /// Constant kernel; mostly useful in tests.
    pub fn constant(name: &str, value: Complex64) -> Kernel {
        Kernel {
            name: name.to_string(),
            params: BTreeMap::new(),
            shape: Shape::Constant(value),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    /// `g(tau, nu)`, or `None` where the kernel is not defined (a sampled
    /// kernel off its lattice).
    pub fn evaluate(&self, tau: f64, nu: f64) -> Option<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        Some(match &self.shape {
            Shape::Wigner => one,
            Shape::Gaussian { alpha, beta } => Complex64::new(
                (-PI * alpha * nu * nu).exp() * (-PI * beta * tau * tau).exp(),
                0.0,
            ),
            Shape::Rihaczek => Complex64::from_polar(1.0, PI * tau * nu),
            Shape::Levin => Complex64::from_polar(1.0, -PI * tau.abs() * nu),
            Shape::Page => Complex64::from_polar(1.0, PI * tau.abs() * nu),
            Shape::BornJordan => {
                let x = PI * tau * nu;
                if x == 0.0 {
                    one
                } else {
                    Complex64::new(x.sin() / x, 0.0)
                }
            }
            Shape::Spectrogram(amb) => lookup(amb, tau, nu)?.conj(),
            Shape::Constant(c) => *c,
        })
    }

    /// Factors `(G1(nu), g2(tau))` for separable kernels.
    pub fn separable_factors(&self, tau: f64, nu: f64) -> Option<(Complex64, Complex64)> {
        let one = Complex64::new(1.0, 0.0);
        match &self.shape {
            Shape::Wigner => Some((one, one)),
            Shape::Gaussian { alpha, beta } => Some((
                Complex64::new((-PI * alpha * nu * nu).exp(), 0.0),
                Complex64::new((-PI * beta * tau * tau).exp(), 0.0),
            )),
            Shape::Constant(c) => Some((*c, one)),
            _ => None,
        }
    }

    pub fn is_separable(&self) -> bool {
        self.separable_factors(0.0, 0.0).is_some()
    }

    /// Whether `g(-tau, -nu) = conj g(tau, nu)`, which makes the filtered
    /// distribution of a self-WVD real.
    pub fn yields_real_tfd(&self) -> bool {
        !matches!(self.shape, Shape::Rihaczek)
            && !matches!(self.shape, Shape::Constant(c) if c.im != 0.0)
    }
}

/// Sampled value at a lattice point of `amb`, if `(tau, nu)` is one.
fn lookup(amb: &AmbGrid, tau: f64, nu: f64) -> Option<Complex64> {
    let n = amb.n();
    let h = (n / 2) as f64;
    let m = tau * amb.sample_rate / 2.0 + h;
    let l = nu * n as f64 / amb.sample_rate + h;
    let (mi, li) = (m.round(), l.round());
    if (m - mi).abs() > 1e-6 || (l - li).abs() > 1e-6 || mi < 0.0 || li < 0.0 {
        return None;
    }
    let (mi, li) = (mi as usize, li as usize);
    if mi >= n || li >= n {
        return None;
    }
    Some(amb.values[[mi, li]])
}

/// `|g(0, nu) - 1| < 1e-10` for every `nu` on the axis.
pub fn is_time_marginal(g: &Kernel, nu_axis: &[f64]) -> bool {
    nu_axis.iter().all(|&nu| {
        g.evaluate(0.0, nu)
            .is_some_and(|v| (v - 1.0).norm() < MARGINAL_TOL)
    })
}

/// `|g(tau, 0) - 1| < 1e-10` for every `tau` on the axis.
pub fn is_freq_marginal(g: &Kernel, tau_axis: &[f64]) -> bool {
    tau_axis.iter().all(|&tau| {
        g.evaluate(tau, 0.0)
            .is_some_and(|v| (v - 1.0).norm() < MARGINAL_TOL)
    })
}

/// Textual kernel selector `name[:key=value,...]`, e.g.
/// `gaussian:alpha=0.6,beta=0.5` or `spectrogram:width=0.5`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSpec {
    pub name: String,
    pub params: BTreeMap<String, f64>,
}

pub const KERNEL_NAMES: [&str; 7] = [
    "wigner",
    "gaussian",
    "rihaczek",
    "levin",
    "page",
    "born_jordan",
    "spectrogram",
];

impl KernelSpec {
    pub fn parse(s: &str) -> Result<KernelSpec> {
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n.trim(), Some(r)),
            None => (s.trim(), None),
        };
        if !KERNEL_NAMES.contains(&name) {
            return Err(TfError::UnknownKernel(name.to_string()));
        }
        let mut params = BTreeMap::new();
        for item in rest
            .into_iter()
            .flat_map(|r| r.split(','))
            .filter(|i| !i.trim().is_empty())
        {
            let (k, v) = item.split_once('=').ok_or_else(|| {
                TfError::InvalidParameter(format!("expected key=value, got `{item}`"))
            })?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| TfError::InvalidParameter(format!("bad number in `{item}`")))?;
            params.insert(k.trim().to_string(), v);
        }
        let allowed: &[&str] = match name {
            "gaussian" => &["alpha", "beta"],
            "spectrogram" => &["width"],
            _ => &[],
        };
        if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(TfError::InvalidParameter(format!(
                "kernel `{name}` has no parameter `{k}`"
            )));
        }
        Ok(KernelSpec {
            name: name.to_string(),
            params,
        })
    }

    /// Builds the kernel for signals on `signal`'s grid. The spectrogram
    /// window is a unit Gaussian (default width 1 s) centered on t = 0.
    pub fn build_for(&self, signal: &SampledSignal) -> Result<Kernel> {
        let get = |k: &str| {
            self.params.get(k).copied().ok_or_else(|| {
                TfError::InvalidParameter(format!("kernel `{}` needs `{k}`", self.name))
            })
        };
        let kind = match self.name.as_str() {
            "wigner" => KernelKind::Wigner,
            "gaussian" => KernelKind::Gaussian {
                alpha: get("alpha")?,
                beta: get("beta")?,
            },
            "rihaczek" => KernelKind::Rihaczek,
            "levin" => KernelKind::Levin,
            "page" => KernelKind::Page,
            "born_jordan" => KernelKind::BornJordan,
            "spectrogram" => {
                let width = self.params.get("width").copied().unwrap_or(1.0);
                let window = generate(&SignalSpec::gaussian(
                    signal.len(),
                    signal.sample_rate(),
                    width,
                ))?;
                KernelKind::Spectrogram { window }
            }
            other => return Err(TfError::UnknownKernel(other.to_string())),
        };
        make(kind)
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}
