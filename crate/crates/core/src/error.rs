use thiserror::Error;

pub type Result<T, E = WebError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WebError {
    #[error("series is not a unit (constant term vanishes)")]
    NotAUnit,
    #[error("precision exhausted: {context}; rerun with a higher order")]
    PrecisionExhausted { context: String },
    #[error("polynomials are not coprime at the working precision")]
    NotCoprime,
    #[error("slopes {first} and {second} share a constant term")]
    SlopeCollision { first: usize, second: usize },
    #[error("presentation is singular at the origin: {reason}")]
    SingularAtOrigin { reason: String },
    #[error("operation requires an explicit slope list")]
    NoExplicitSlopes,
    #[error("chart parameter does not separate the slopes: {reason}")]
    BadChart { reason: String },
    #[error("invalid web degree {degree}: {reason}")]
    InvalidDegree { degree: usize, reason: String },
    #[error("invalid subweb selector: {reason}")]
    InvalidSelector { reason: String },
    #[error("prolongation needs a non-unit pivot at order {level}")]
    DegenerateProlongation { level: usize },
    #[error("curvature row {row} is nonzero at precision {precision}; basis is not adapted")]
    AdaptedBasisViolation { row: usize, precision: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

impl WebError {
    /// Stable machine-readable code, used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            WebError::NotAUnit => "not_a_unit",
            WebError::PrecisionExhausted { .. } => "precision_exhausted",
            WebError::NotCoprime => "not_coprime",
            WebError::SlopeCollision { .. } => "slope_collision",
            WebError::SingularAtOrigin { .. } => "singular_at_origin",
            WebError::NoExplicitSlopes => "no_explicit_slopes",
            WebError::BadChart { .. } => "bad_chart",
            WebError::InvalidDegree { .. } => "invalid_degree",
            WebError::InvalidSelector { .. } => "invalid_selector",
            WebError::DegenerateProlongation { .. } => "degenerate_prolongation",
            WebError::AdaptedBasisViolation { .. } => "adapted_basis_violation",
            WebError::Dimension(_) => "dimension_mismatch",
        }
    }
}
