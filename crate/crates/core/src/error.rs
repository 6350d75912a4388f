use thiserror::Error;

/// Errors raised by the group kernel, the orbit engines and the quadrature code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not in SO0(2,1): {0}")]
    NotLorentz(String),

    #[error("generator {0} has no 3x3 exponential (translation generator)")]
    TranslationGenerator(&'static str),

    #[error("point is off the manifold: {0}")]
    OffManifold(String),

    #[error("chart singularity: q0 + q1 = {sum:e} is below the threshold {threshold:e}")]
    ChartSingularity { sum: f64, threshold: f64 },

    #[error("not a rotation: residual {0:e}")]
    NotRotation(f64),

    #[error("not a null translation: residual {0:e}")]
    NotTranslation(f64),

    #[error("Iwasawa recomposition residual {0:e} exceeds tolerance")]
    Iwasawa(f64),

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("integral diverges: {0}")]
    Divergence(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
