use thiserror::Error;

/// Errors shared across the algebra, module, engine, and generator layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("block {block}: expected a {expected_rows}x{expected_cols} matrix, got {rows}x{cols}")]
    ShapeMismatch {
        block: usize,
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("expected {expected} blocks, got {got}")]
    BlockCountMismatch { expected: usize, got: usize },
    #[error("elements live over different algebras")]
    AlgebraMismatch,
    #[error("elements live in different module spaces")]
    SpaceMismatch,
    #[error("element is not self-adjoint: |a - a*| = {defect:e} exceeds {limit:e}")]
    NotSelfAdjoint { defect: f64, limit: f64 },
    #[error("element is not positive: eigenvalue {eigenvalue:e} below tolerance")]
    NotPositive { eigenvalue: f64 },
    #[error("input list is empty")]
    EmptyInput,
    #[error("algebra is commutative; the quasi-strong/strong gap pair does not exist there")]
    CommutativeAlgebra,
    #[error("algebra has a single block (prime); the BJ/quasi-strong gap pair does not exist there")]
    NotEnoughBlocks,
    #[error("elements are not disjointly supported: |<u,v>| = {overlap:e}")]
    NotDisjoint { overlap: f64 },
    #[error("sampled element degenerated to zero")]
    DegenerateSample,
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
