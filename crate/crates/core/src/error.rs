use thiserror::Error;

/// Everything that can go wrong inside the library.
///
/// Variants fall into two groups: precondition/domain problems (bad
/// parameters, speeds below the minimal speed, out-of-domain arguments) and
/// numerical failures (divergence, failed certificates, non-convergence).
/// [`Error::is_numerical`] tells them apart; the CLI maps them to exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("lambda = {lambda} is outside the mgf domain ({lo}, {hi})")]
    OutOfDomain { lambda: f64, lo: f64, hi: f64 },

    #[error("speed c = {c} is below the minimal speed {minimal}")]
    SpeedBound { c: f64, minimal: f64 },

    #[error("pole of the characteristic function at w*tau = 1 (w = {w}, tau = {tau})")]
    Singularity { w: f64, tau: f64 },

    #[error("unsupported kernel family {family} for {operation}")]
    UnsupportedFamily { family: String, operation: &'static str },

    #[error("kernel is not resolved by step {step}: sampled mass {mass}")]
    Resolution { step: f64, mass: f64 },

    #[error("dt = {dt} exceeds the explicit stability limit {limit}")]
    Stability { dt: f64, limit: f64 },

    #[error("Newton iteration diverged: {0}")]
    Divergence(String),

    #[error("upper solution certification failed: max excess {excess:e} at t = {t}")]
    Certification { excess: f64, t: f64 },

    #[error("lower solution certificate failed: max deficit {deficit:e} at t = {t}")]
    LowerCertificate { deficit: f64, t: f64 },

    #[error("sandwich violated at iteration {iteration}: {detail}")]
    IterationIntegrity { iteration: usize, detail: String },

    #[error("no shift up to {cap} nodes puts the upper solution above the lower one")]
    Alignment { cap: usize },

    #[error("measurement failed: {0}")]
    Measurement(String),

    #[error("shape classification failed: {0}")]
    Classification(String),

    #[error("simulation blew up at t = {time}")]
    BlowUp { time: f64 },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical failures as opposed to precondition or input problems.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Divergence(_)
                | Error::Certification { .. }
                | Error::LowerCertificate { .. }
                | Error::IterationIntegrity { .. }
                | Error::Alignment { .. }
                | Error::Measurement(_)
                | Error::Classification(_)
                | Error::BlowUp { .. }
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
