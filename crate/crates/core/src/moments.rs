//! Means, covariance matrices and the uncertainty checks.
//!
//! With `hbar_eff = 1 / (2 pi)` the strong-uncertainty determinant bound and
//! the Heisenberg bound share the constant `1 / (16 pi^2)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TfError};
use crate::signal::{spectrum, SampledSignal};
use crate::tfd::Tfd;
use crate::wigner::TfGrid;
use crate::HBAR_EFF;

/// Default relative slack for `lhs >= rhs * (1 - tol)`.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Heisenberg constant `1 / (16 pi^2)` (= `hbar_eff^2 / 4`).
pub fn heisenberg_constant() -> f64 {
    1.0 / (16.0 * PI * PI)
}

/// Second central moments and means of a unit-mass distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceMatrix {
    pub var_t: f64,
    pub var_f: f64,
    pub cov_tf: f64,
    pub mean_t: f64,
    pub mean_f: f64,
    /// Mass measured before renormalization.
    pub total_mass: f64,
}

impl CovarianceMatrix {
    pub fn from_entries(var_t: f64, cov_tf: f64, var_f: f64) -> Self {
        Self {
            var_t,
            var_f,
            cov_tf,
            mean_t: 0.0,
            mean_f: 0.0,
            total_mass: 1.0,
        }
    }

    pub fn as_array(&self) -> [[f64; 2]; 2] {
        [[self.var_t, self.cov_tf], [self.cov_tf, self.var_f]]
    }

    /// `det(C + i hbar_eff/2 J) = var_t var_f - cov_tf^2 - hbar_eff^2 / 4`.
    pub fn strong_det(&self) -> f64 {
        self.var_t * self.var_f - self.cov_tf * self.cov_tf - HBAR_EFF * HBAR_EFF / 4.0
    }

    /// Largest entry deviation relative to `sqrt(var_t var_f)`.
    pub fn max_rel_deviation(&self, other: &CovarianceMatrix) -> f64 {
        let scale = (self.var_t * self.var_f).sqrt();
        let d = [
            (self.var_t - other.var_t) / self.var_t,
            (self.var_f - other.var_f) / self.var_f,
            (self.cov_tf - other.cov_tf) / scale,
        ];
        d.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Covariance of a real distribution by Riemann sums, after internal
/// renormalization to unit mass. Negative lobes count as they are.
pub fn covariance(rho: &TfGrid) -> Result<CovarianceMatrix> {
    let cell = rho.cell();
    let mass = rho.mass();
    let abs_mass = rho.values.iter().map(|v| v.abs()).sum::<f64>() * cell;
    if !(mass > 0.0) {
        return Err(TfError::NonPositiveMass(mass));
    }
    if mass < 1e-6 * abs_mass {
        return Err(TfError::DegenerateMass { mass, abs_mass });
    }
    let (mut st, mut sf, mut stt, mut sff, mut stf) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((n, k), &v) in rho.values.indexed_iter() {
        let (t, f) = (rho.t_axis[n], rho.f_axis[k]);
        st += t * v;
        sf += f * v;
        stt += t * t * v;
        sff += f * f * v;
        stf += t * f * v;
    }
    let norm = cell / mass;
    let (mt, mf) = (st * norm, sf * norm);
    let mut var_t = stt * norm - mt * mt;
    let mut var_f = sff * norm - mf * mf;
    for (name, var) in [("var_t", &mut var_t), ("var_f", &mut var_f)] {
        if *var < 0.0 && *var >= -1e-10 {
            log::warn!("clipping {name} = {var:e} to 0");
            *var = 0.0;
        }
    }
    Ok(CovarianceMatrix {
        var_t,
        var_f,
        cov_tf: stf * norm - mt * mf,
        mean_t: mt,
        mean_f: mf,
        total_mass: mass,
    })
}

/// Mean and variance of a sampled density, returned with its total mass.
fn moments_1d(axis: &[f64], density: &[f64], step: f64) -> (f64, f64, f64) {
    let mass: f64 = density.iter().sum::<f64>() * step;
    let mean = axis.iter().zip(density).map(|(x, d)| x * d).sum::<f64>() * step / mass;
    let var = axis
        .iter()
        .zip(density)
        .map(|(x, d)| (x - mean).powi(2) * d)
        .sum::<f64>()
        * step
        / mass;
    (mass, mean, var)
}

/// Signal-domain time and frequency statistics: `(energy, mean_t, var_t,
/// mean_f, var_f)` from `|a(t)|^2` and `|A(f)|^2`.
pub fn signal_moments(a: &SampledSignal) -> (f64, f64, f64, f64, f64) {
    let p: Vec<f64> = a.samples().iter().map(|s| s.norm_sqr()).collect();
    let (energy, mt, vt) = moments_1d(&a.time_axis(), &p, a.dt());
    let q: Vec<f64> = spectrum(a).iter().map(|s| s.norm_sqr()).collect();
    let df = a.sample_rate() / a.len() as f64;
    let (_, mf, vf) = moments_1d(&a.freq_axis(), &q, df);
    (energy, mt, vt, mf, vf)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

impl InequalityCheck {
    fn new(lhs: f64, rhs: f64, tol: f64) -> Self {
        Self {
            lhs,
            rhs,
            ratio: lhs / rhs,
            pass: lhs >= rhs * (1.0 - tol),
        }
    }
}

/// `int (t - <t>)^2 |a|^2 dt * int (f - <f>)^2 |A|^2 df >= ||a||^4 / (16 pi^2)`.
pub fn heisenberg_check(a: &SampledSignal, tol: f64) -> Result<InequalityCheck> {
    let (energy, _, vt, _, vf) = signal_moments(a);
    if !(energy > 1e-300) {
        return Err(TfError::ZeroSignal);
    }
    let lhs = (vt * energy) * (vf * energy);
    Ok(InequalityCheck::new(
        lhs,
        energy * energy * heisenberg_constant(),
        tol,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Relation1Check {
    pub t0: f64,
    pub f0: f64,
    #[serde(flatten)]
    pub check: InequalityCheck,
}

/// `int int (|t - t0|^2 + |f - f0|^2) rho dt df >= ||a||^2 / (2 pi)`.
///
/// `rho` is rescaled to mass `||a||^2` first. `center = None` puts `(t0, f0)`
/// at the distribution's means, which minimizes the left side.
pub fn relation1_check(
    rho: &Tfd,
    a: &SampledSignal,
    center: Option<(f64, f64)>,
    tol: f64,
) -> Result<Relation1Check> {
    if !rho.is_marginal() {
        return Err(TfError::NonMarginalKernel(rho.kernel_name.clone()));
    }
    let energy = a.energy();
    if !(energy > 1e-300) {
        return Err(TfError::ZeroSignal);
    }
    let c = covariance(&rho.grid)?;
    let (t0, f0) = center.unwrap_or((c.mean_t, c.mean_f));
    let grid = &rho.grid;
    let mut acc = 0.0;
    for ((n, k), &v) in grid.values.indexed_iter() {
        let (t, f) = (grid.t_axis[n], grid.f_axis[k]);
        acc += ((t - t0).powi(2) + (f - f0).powi(2)) * v;
    }
    let lhs = acc * grid.cell() * energy / c.total_mass;
    Ok(Relation1Check {
        t0,
        f0,
        check: InequalityCheck::new(lhs, energy / (2.0 * PI), tol),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongUncertainty {
    pub det: f64,
    pub psd: bool,
}

/// Positive semidefiniteness of `C + i hbar_eff/2 J` through its determinant,
/// with tolerance `1e-4 var_t var_f`.
pub fn strong_uncertainty_check(c: &CovarianceMatrix) -> StrongUncertainty {
    let det = c.strong_det();
    let tol = 1e-4 * c.var_t * c.var_f;
    StrongUncertainty {
        det,
        psd: det >= -tol && c.var_t + c.var_f >= 0.0,
    }
}

/// Everything the `report` command emits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub schema: String,
    pub kernel: String,
    pub tolerance: f64,
    pub energy: f64,
    pub covariance: CovarianceMatrix,
    pub heisenberg: InequalityCheck,
    pub relation1: Relation1Block,
    pub strong_uncertainty: StrongBlock,
    pub pass: bool,
}

pub const REPORT_SCHEMA: &str = "tfkit-report/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Relation1Block {
    Checked(Relation1Check),
    NotApplicable { reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongBlock {
    pub det: f64,
    pub det_bound: f64,
    pub psd: bool,
    /// `var_t var_f / (cov_tf^2 + hbar_eff^2/4)`, at least 1 when the
    /// determinant inequality holds.
    pub ratio: f64,
}

/// Full report for `a` with the TFD built from kernel `rho`.
pub fn report(
    a: &SampledSignal,
    rho: &Tfd,
    center: Option<(f64, f64)>,
    tol: f64,
) -> Result<UncertaintyReport> {
    let heisenberg = heisenberg_check(a, tol)?;
    let covariance = covariance(&rho.grid)?;
    let relation1 = match relation1_check(rho, a, center, tol) {
        Ok(r) => Relation1Block::Checked(r),
        Err(TfError::NonMarginalKernel(name)) => Relation1Block::NotApplicable {
            reason: format!("kernel `{name}` does not satisfy both marginal conditions"),
        },
        Err(e) => return Err(e),
    };
    let strong = strong_uncertainty_check(&covariance);
    let bound = covariance.cov_tf.powi(2) + HBAR_EFF * HBAR_EFF / 4.0;
    let strong_uncertainty = StrongBlock {
        det: strong.det,
        det_bound: bound,
        psd: strong.psd,
        ratio: covariance.var_t * covariance.var_f / bound,
    };
    let pass = heisenberg.pass
        && strong.psd
        && match &relation1 {
            Relation1Block::Checked(r) => r.check.pass,
            Relation1Block::NotApplicable { .. } => true,
        };
    Ok(UncertaintyReport {
        schema: REPORT_SCHEMA.to_string(),
        kernel: rho.kernel_name.clone(),
        tolerance: tol,
        energy: a.energy(),
        covariance,
        heisenberg,
        relation1,
        strong_uncertainty,
        pass,
    })
}
