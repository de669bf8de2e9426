//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A domain precondition on an input value failed.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The drive cannot be analyzed in closed form (e.g. a zero-frequency
    /// defocusing segment of nonzero length).
    #[error("singular drive: {0}")]
    SingularDrive(String),

    /// |λ| = 1 within tolerance: the Floquet eigenvectors degenerate and the
    /// phase φ is numerically meaningless.
    #[error("resonance boundary: |lambda| = 1 within tolerance (lambda = {lambda})")]
    ResonanceBoundary { lambda: f64 },

    /// A stable solution was requested for a drive with |λ| > 1.
    #[error("unstable drive: lambda = {lambda} has |lambda| > 1")]
    UnstableDrive { lambda: f64 },

    /// An unstable-branch operation was called on a stable drive.
    #[error("drive is stable (lambda = {lambda}); unstable branch required")]
    NotUnstable { lambda: f64 },

    /// The invariant coefficients are not positive definite, or a matching
    /// denominator vanished.
    #[error("degenerate invariant: {0}")]
    DegenerateInvariant(String),

    /// Bracketing scan found no sign change in the requested range.
    #[error("no root of {what} in ({lo}, {hi}] ({steps} scan points)")]
    RootNotFound {
        what: String,
        lo: f64,
        hi: f64,
        steps: usize,
    },

    /// Root finder called without a sign change on the bracket.
    #[error("no sign change on bracket [{a}, {b}]")]
    NoSignChange { a: f64, b: f64 },

    /// Adaptive quadrature exceeded its subdivision budget.
    #[error("quadrature did not converge: {0}")]
    QuadratureFailed(String),

    /// Two independent computation routes disagreed beyond tolerance.
    #[error("dual-oracle mismatch: {0}")]
    OracleMismatch(String),

    /// A transit time is not an integer multiple of a path's minimal period.
    #[error("incommensurate transit time: {0}")]
    Incommensurate(String),

    /// No velocity in the admissible range achieves the requested setup.
    #[error("no admissible velocity: {0}")]
    NoAdmissibleVelocity(String),

    /// A finite-difference grid touched a drive segment boundary.
    #[error("grid touches a segment boundary: {0}")]
    GridTouchesBoundary(String),
}
