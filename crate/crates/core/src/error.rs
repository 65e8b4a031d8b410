use thiserror::Error;

pub type Result<T> = std::result::Result<T, TfError>;

#[derive(Debug, Error)]
pub enum TfError {
    #[error("signal length {0} must be even and at least 2")]
    BadLength(usize),
    #[error("sample rate must be positive and finite, got {0}")]
    BadSampleRate(f64),
    #[error("signal contains non-finite samples")]
    NonFinite,
    #[error("missing parameter `{key}` for signal kind `{kind}`")]
    MissingParameter {
        kind: &'static str,
        key: &'static str,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("input is not real-valued (imaginary part {0:e} relative to peak)")]
    NotReal(f64),
    #[error("cannot normalize an all-zero signal")]
    ZeroSignal,
    #[error("signals differ in length or sample rate")]
    Mismatch,
    #[error("unknown kernel `{0}`")]
    UnknownKernel(String),
    #[error("kernel `{name}` is undefined at tau={tau}, nu={nu}")]
    KernelUndefined { name: String, tau: f64, nu: f64 },
    #[error("distribution has non-positive total mass {0:e}")]
    NonPositiveMass(f64),
    #[error("distribution mass {mass:e} is below 1e-6 of its absolute mass {abs_mass:e}")]
    DegenerateMass { mass: f64, abs_mass: f64 },
    #[error("kernel `{0}` does not satisfy both marginal conditions")]
    NonMarginalKernel(String),
    #[error("matrix is not symplectic (det = {0})")]
    NotSymplectic(f64),
    #[error("signal support overflows the grid: {0:e} of the energy lands at the edges")]
    SupportOverflow(f64),
    #[error("imaginary residue {0:e} of peak exceeds tolerance")]
    ImaginaryResidue(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl TfError {
    /// True for failures caused by the numbers rather than by the input shape
    /// or flags.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            TfError::NonPositiveMass(_)
                | TfError::DegenerateMass { .. }
                | TfError::ZeroSignal
                | TfError::SupportOverflow(_)
                | TfError::ImaginaryResidue(_)
        )
    }
}
