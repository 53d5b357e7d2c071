use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite sample at r = {radius}")]
    NonFinite { radius: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The integrated solution exceeded the magnitude cap. Usually means the
    /// integration went deep into a classically forbidden region.
    #[error("solution blow-up: |phi| exceeded {cap:e} at r = {radius}")]
    BlowUp { radius: f64, cap: f64 },

    #[error("p nonpositive: min p = {min:e} at r = {radius}")]
    PNonpositive { min: f64, radius: f64 },

    #[error("non-normalizable input: |phi(r_max)| / max|phi| = {ratio:e}")]
    NonNormalizable { ratio: f64 },

    #[error("insufficient spectrum: found {found} of {wanted} states below E = {ceiling}")]
    InsufficientSpectrum {
        found: usize,
        wanted: usize,
        ceiling: f64,
    },

    #[error("degenerate matching points: condition number {cond:e}")]
    DegenerateMatch { cond: f64 },

    #[error("no beats resolved: {found} envelope minima (need 3)")]
    NoBeats { found: usize },

    #[error("no resonance in window [{lo}, {hi}]")]
    NoResonance { lo: f64, hi: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures of the numerics themselves (as opposed to bad input
    /// or I/O).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::BlowUp { .. }
            | Error::PNonpositive { .. }
            | Error::NonNormalizable { .. }
            | Error::InsufficientSpectrum { .. }
            | Error::DegenerateMatch { .. }
            | Error::NoBeats { .. }
            | Error::NoResonance { .. } => true,
            Error::Context { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub(crate) trait ResultExt<T> {
    fn context(self, ctx: impl FnOnce() -> String) -> Result<T>;
}

impl<T> ResultExt<T> for Result<T> {
    fn context(self, ctx: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|e| Error::Context {
            context: ctx(),
            source: Box::new(e),
        })
    }
}
