use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("support {support} is not contained in {target}")]
    SupportNotContained { support: String, target: String },
    #[error("traced region {region} is not inside the support {support}")]
    RegionNotInSupport { region: String, support: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("operator is not a strictly positive density (min eigenvalue {min_eigenvalue:e})")]
    NonPositiveDensity { min_eigenvalue: f64 },
    #[error("density has unnormalized trace {trace}")]
    Unnormalized { trace: f64 },
    #[error("operator is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("marginal over the complement of the traced block is singular (min eigenvalue {min_eigenvalue:e})")]
    SingularMarginal { min_eigenvalue: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("volumes are not nested: {0}")]
    NotNested(String),
    #[error("superoperator kind mismatch: {0}")]
    KindMismatch(String),
    #[error("invalid Orlicz function: {0}")]
    InvalidOrlicz(String),
    #[error("Luxemburg bracket search failed: {0}")]
    BracketFailure(String),
    #[error("trace identity violated: spectral side {spectral}, profile side {profile}")]
    TraceIdentity { spectral: f64, profile: f64 },
    #[error("eigendecomposition did not converge")]
    NoConvergence,
    #[error("malformed operator document: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
