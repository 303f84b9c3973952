use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (‖m − m†‖ = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("Bloch vector norm {norm} lies outside the unit ball")]
    OutsideBall { norm: f64 },

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("parameter `{name}` = {value} is out of range ({expected})")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("Kraus operators are not normalized (‖K₁†K₁ + K₂†K₂ − 𝟙‖ = {deviation:e})")]
    NotNormalized { deviation: f64 },

    #[error("unknown measure kind `{0}`")]
    UnknownKind(String),

    #[error("parabolic fit is degenerate (quadratic coefficient {coefficient:e})")]
    DegenerateFit { coefficient: f64 },

    #[error("insufficient counts at theta = {theta_deg}° ({detail})")]
    InsufficientCounts { theta_deg: f64, detail: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
