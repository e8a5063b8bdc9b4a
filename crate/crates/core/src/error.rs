use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// The requested energy does not correspond to a bound orbit.
    #[error("unbound motion: {0}")]
    Unbound(String),

    /// The radial cubic has complex roots, so no bound 3D orbit exists.
    #[error("no bound orbit for E = {energy}, L = {angular_momentum} (discriminant {discriminant:.3e})")]
    NoBoundOrbit {
        energy: f64,
        angular_momentum: f64,
        discriminant: f64,
    },

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature did not converge: estimated error {achieved:.3e} > requested {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },

    /// A bracketed root search failed.
    #[error("root finding failed in {op}: {detail}")]
    RootFinding { op: &'static str, detail: String },

    /// A value lies outside the tabulated range of an action-angle chart.
    #[error("{quantity} = {value} outside chart range [{min}, {max}]")]
    OutOfRange {
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// The resonance condition has a vanishing nonlinearity, so its width is undefined.
    #[error("degenerate resonance k = {k}: dω₀/dn = 0 at n = {action}")]
    DegenerateResonance { k: u32, action: f64 },

    /// No pair of adjacent resonances is available to apply the overlap criterion to.
    #[error("no resonance: {0}")]
    NoResonance(String),

    /// A closed-form expression is singular for the given inputs.
    #[error("singular formula: {0}")]
    SingularFormula(String),

    /// The integrator produced a non-finite state; retry with a smaller step.
    #[error("step rejected at tau = {tau}: retry with dtau <= {suggested_dtau:.3e}")]
    StepRejected { tau: f64, suggested_dtau: f64 },

    /// Too few samples for a statistical estimate.
    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// Reading or writing a CSV artifact failed.
    #[error("i/o: {message}")]
    Io { kind: std::io::ErrorKind, message: String },
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        let message = e.to_string();
        match e.into_kind() {
            csv::ErrorKind::Io(io) => io.into(),
            _ => Error::Io {
                kind: std::io::ErrorKind::InvalidData,
                message,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
