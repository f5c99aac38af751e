//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the analytical engine and the simulator.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter violates a model invariant (negative density, alpha <= 2, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Adaptive quadrature exhausted its subdivision budget before reaching
    /// the requested tolerance. Carries the best estimate and its error bound.
    #[error("quadrature did not converge (best estimate {best:.9e}, error {error:.3e})")]
    QuadratureFailure { best: f64, error: f64 },

    /// The integrand keeps accumulating mass towards the upper limit; the
    /// improper integral is judged divergent.
    #[error("integral appears divergent near its upper limit (partial sum {partial:.9e})")]
    DivergentIntegral { partial: f64 },

    /// The symmetrized principal-value integrand does not settle to a finite
    /// value as u -> 0+.
    #[error("principal-value integrand is singular at u -> 0 (|h| grows from {outer:.3e} to {inner:.3e})")]
    PvSingularity { inner: f64, outer: f64 },

    /// A transform was requested at a point where it has a pole.
    #[error("transform pole at argument ({re:.6e}, {im:.6e})")]
    TransformPole { re: f64, im: f64 },

    /// The evaluation point falls outside the region of convergence of the
    /// bilateral transform. Both strip bounds are reported.
    #[error("evaluation point s = {s_eval:.6e} outside region of convergence ({s_a:.6e}, {s_b:.6e})")]
    OutsideRoc { s_eval: f64, s_a: f64, s_b: f64 },

    /// The transform has no decaying factor along the imaginary axis, so the
    /// inversion integral cannot be truncated.
    #[error("characteristic function does not decay ({0}); inversion not applicable")]
    NonDecayingTransform(&'static str),

    /// An operation produced a non-finite intermediate value.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// The requested operation does not apply to the configured scenario.
    #[error("scenario mismatch: {0}")]
    ScenarioMismatch(&'static str),

    /// Configuration parse or validation failure.
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
