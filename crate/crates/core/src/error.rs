use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field specification: {0}")]
    InvalidField(String),
    #[error("mixed fields in one operation")]
    FieldMismatch,
    #[error("mixed dimensions in one operation")]
    DimMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("scalar is not a root of unity: {0}")]
    NotRootOfUnity(String),
    #[error("degenerate projection axis: kernel lies inside the image")]
    DegenerateProjection,
    #[error("matrix is singular")]
    Singular,
    #[error("expected nullity 1, found nullity {0}")]
    BadNullity(usize),
    #[error("map is not an affine projection")]
    NotAffineProjection,
    #[error("monoid is not closed to a finite set")]
    NotFinite,
    #[error("element is not in the monoid")]
    NotAnElement,
    #[error("internal consistency check failed: {0}")]
    Inconsistency(String),
    #[error("equivalence search inconclusive")]
    EquivalenceInconclusive,
    #[error("normalizer search inconclusive")]
    NormalizerInconclusive,
    #[error("bipartition search too large: {0} generators")]
    TooManyGenerators(usize),
    #[error("invalid family parameters: {0}")]
    InvalidParams(String),
    #[error("field lacks the required roots of unity; the smallest cyclotomic field that works is C{0}")]
    MissingRoots(u32),
    #[error("classification failure: no known family matches")]
    ClassificationFailure,
    #[error("embedding failure: no target admits the monoid")]
    EmbeddingFailure,
    #[error("criterion requires n >= 3")]
    CriterionRequiresN3,
    #[error("argument out of supported range: {0}")]
    OutOfRange(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed descriptor: {0}")]
    Descriptor(String),
}

pub type Result<T> = std::result::Result<T, Error>;
