use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("polytope is unbounded")]
    UnboundedPolytope,
    #[error("no exact volume for a general polytope in dimension {dim} (supported up to 4)")]
    UnsupportedExactVolume { dim: usize },
    #[error("no exact {k}-dimensional section volume for a polytopal body (supported up to 3)")]
    UnsupportedExactSection { k: usize },
    #[error("linear program solver failure: {0}")]
    SolverFailure(String),
    #[error("rejection sampler stalled: {accepted} accepted out of {proposals} proposals")]
    RejectionStall { accepted: u64, proposals: u64 },
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
