use thiserror::Error;

/// Errors raised while validating inputs or evaluating the key-rate pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("amplitude squared must be finite and non-negative, got {0}")]
    NegativeAmplitude(f64),

    #[error("transmittance must be in (0,1], got {0}")]
    Transmittance(f64),

    #[error("distance must be finite and non-negative, got {0} km")]
    Distance(f64),

    #[error("fiber loss must be positive, got {0} dB/km")]
    FiberLoss(f64),

    #[error("excess noise must be finite and non-negative, got {0}")]
    ExcessNoise(f64),

    #[error("variance must be greater than 1 (shot-noise units), got {0}")]
    Variance(f64),

    #[error("reconciliation efficiency must be in (0,1], got {0}")]
    Beta(f64),

    #[error("channel transmittance underflowed to zero")]
    ZeroTransmittance,

    #[error("correlation c^2 = {c_sq} exceeds (a+1)(b+1) = {bound}")]
    NonPhysicalCorrelation { c_sq: f64, bound: f64 },

    #[error("covariance matrix is not physical")]
    NonPhysical,

    #[error("entropy argument must be non-negative, got {0}")]
    EntropyArgument(f64),

    #[error("zero-photon catalysis is disabled; there is no transmittance to optimize")]
    ZpcDisabled,

    #[error("no secret key at zero distance")]
    NoKeyAtOrigin,

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid distance ratio d = {0}")]
    Ratio(f64),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
