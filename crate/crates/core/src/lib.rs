//! Reconstruction of the Beta and Gamma functions from functional equations.
//!
//! * [`oracle`]: quadrature references for Γ and 𝓑.
//! * [`krull`]: the convex or concave solution of φ(x+1) = φ(x) + F(x).
//! * [`geo`]: the geometrically convex solution of φ(x+1) = G(x)φ(x).
//! * [`beta_ray`]: the diagonal restriction x ↦ 𝓑(x, x+k) and its reconstructions.
//! * [`beta_type`]: beta-type functions γ(x)γ(y)/γ(x+y) and generator equality.
//! * [`convexity`]: directional, geometric and logarithmic convexity checks.

pub mod beta_ray;
pub mod beta_type;
pub mod convexity;
pub mod error;
pub mod geo;
pub mod grid;
pub mod krull;
pub mod oracle;
pub mod quadrature;
pub mod sum;

pub use error::{Error, Result};
pub use quadrature::QuadratureConfig;

/// Value produced by one of the iterative solvers along with its truncation metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverResult {
    pub value: f64,
    /// Series terms summed (Krull) or product length n (Gronau–Matkowski).
    pub terms_used: usize,
    /// Magnitude of the final series term, or the last relative change between approximants.
    pub last_term: f64,
    pub converged: bool,
    /// Estimated absolute error of `value`.
    pub error_estimate: f64,
}
