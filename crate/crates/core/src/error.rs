use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("relation `{relation}` is not homogeneous")]
    NotHomogeneous { relation: String },
    #[error("relation `{relation}` has degree {degree} above the truncation {truncation}")]
    AboveTruncation {
        relation: String,
        degree: u32,
        truncation: u32,
    },
    #[error("relation `{relation}` has degree zero")]
    DegreeZeroRelation { relation: String },
    #[error("generator `{name}` has degree zero")]
    DegreeZeroGenerator { name: String },
    #[error("duplicate generator name `{name}`")]
    DuplicateGenerator { name: String },
    #[error("classes belong to different rings")]
    RingMismatch,
    #[error("degree {degree} exceeds truncation {truncation}")]
    DegreeOutOfRange { degree: u32, truncation: u32 },
    #[error("expected {expected} coordinates, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("unknown generator `{name}`")]
    UnknownGenerator { name: String },
    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("Euler class must have degree 2, got {degree}")]
    NotDegreeTwo { degree: u32 },
    #[error("Euler class is zero")]
    ZeroClass,
    #[error("multiplication by the Euler class is not injective in degree {degree}; kernel vector {kernel}")]
    NotInjective { degree: u32, kernel: String },
    #[error("Euler class {index} ({class}) is not primitive in the quotient lattice")]
    NotPrimitive { index: usize, class: String },
    #[error("base ring has a generator `{name}` of odd degree")]
    OddBase { name: String },
    #[error("Euler class {index} does not live in the degree-2 lattice of the base")]
    NotInBaseLattice { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsoError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("ring is not generated in degree 2 (generator `{name}` has degree {degree})")]
    NotDegreeTwoGenerated { name: String, degree: u32 },
    #[error("source generator `{name}` does not cube to zero")]
    ScopeViolation { name: String },
    #[error(
        "cube-zero locus has a positive-dimensional component that is not linear: {component}"
    )]
    InfiniteLocus { component: String },
    #[error("matrix is not square of size {expected}")]
    BadMatrix { expected: usize },
    #[error("system exceeds the solver budget: {reason}")]
    DegreeBudgetExceeded { reason: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("structure constants fail the Jacobi identity (residual {residual:e})")]
    NotJacobi { residual: f64 },
    #[error("inner product is not ad-invariant (residual {residual:e})")]
    NotAdInvariant { residual: f64 },
    #[error("isotropy representation is not a homomorphism (residual {residual:e})")]
    NotHomomorphism { residual: f64 },
    #[error("weight {weight} is not an integer")]
    WeightNotIntegral { weight: f64 },
    #[error("decomposition has wrong dimensions: {what}")]
    DimensionMismatch { what: String },
    #[error("bracket inclusion `{which}` fails (residual {residual:e})")]
    BracketInclusion { which: String, residual: f64 },
    #[error("shrinking parameter must be positive, got {t}")]
    NonpositiveT { t: f64 },
    #[error("shrinking parameter must be at most 1, got {t}")]
    TAboveOne { t: f64 },
    #[error("vector is not tangent to the base (vertical part {residual:e})")]
    NotTangent { residual: f64 },
    #[error("vector does not lie in {space} (residual {residual:e})")]
    WrongSubspace { space: &'static str, residual: f64 },
    #[error("vectors are not orthonormal (residual {residual:e})")]
    NotOrthonormal { residual: f64 },
    #[error("vector has length {got}, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("eigen solver residual {residual:e} above tolerance")]
    EigenFailure { residual: f64 },
    #[error("unsupported factor for the diameter bound: {factor}")]
    UnsupportedFactor { factor: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("alpha must be at least 1, got {alpha}")]
    NonpositiveAlpha { alpha: i64 },
    #[error("sphere dimension {n} must be at least 2")]
    SphereTooSmall { n: u32 },
    #[error("bundle spec line {line}: {reason}")]
    Spec { line: usize, reason: String },
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Geo(#[from] GeoError),
}
