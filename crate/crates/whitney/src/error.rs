use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("generator names must be distinct: `{0}`")]
    DuplicateGenerator(String),
    #[error("bad generator name: `{0}`")]
    BadGeneratorName(String),
    #[error("unknown generator name: `{0}`")]
    UnknownGenerator(String),
    #[error("operands belong to different group specs")]
    SpecMismatch,
    #[error("ring element variant mismatch: expected {expected}, got {got}")]
    VariantMismatch { expected: String, got: String },
    #[error("multiplier arity {got} does not match term arity {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("rp2 class `{0}` element is not of order two")]
    NotOrderTwo(String),
    #[error("diagram validation failed:\n{0}")]
    InvalidDiagram(String),
    #[error("self-intersection invariant is nonzero: {0}")]
    MuNonzero(String),
    #[error("unknown id: `{0}`")]
    UnknownId(String),
    #[error("unknown pi2 class: `{0}`")]
    UnknownClass(String),
    #[error("move precondition failed: {0}")]
    MovePrecondition(String),
    #[error("invariance assertion failed: {0}")]
    AssertionFailed(String),
    #[error("manifest error: {0}")]
    Manifest(String),
}
