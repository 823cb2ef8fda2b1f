use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid node set: {0}")]
    InvalidNodes(String),

    #[error("invalid barycentric representation: {0}")]
    InvalidRational(String),

    /// The two smallest singular values of the interpolation matrix are too
    /// close; the interpolant is (nearly) degenerate or does not exist.
    #[error("smallest singular value not isolated (ratio {ratio:.3e})")]
    SmallestSingularValueNotIsolated { ratio: f64 },

    #[error("interpolant construction failed at iteration {iteration}: {source}")]
    InterpolantConstructionFailed {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    /// A node correction produced nodes that are not strictly increasing
    /// inside (-1, 1).
    #[error("node correction produced invalid nodes: {0}")]
    InvalidCorrection(String),

    #[error("precondition not met: {0}")]
    PreconditionNotMet(String),

    #[error("pole hit at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },

    #[error("linear algebra breakdown: {0}")]
    Breakdown(String),
}
