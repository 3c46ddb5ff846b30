//! Integrable twenty-vertex model on the triangular lattice with domain-wall
//! boundary conditions.
//!
//! The crate covers exact weights and small-size enumeration, the refined
//! twenty-vertex/six-vertex identities, tangent-method arctic curves (closed
//! form and numeric), the quarter-turn symmetric domino tiling determinant
//! model and Monte Carlo samplers.

pub mod arctic;
pub mod asymptotics;
pub mod enumerate;
pub mod error;
pub mod lattice;
pub mod mcmc;
pub mod numeric;
pub mod qthadt;
pub mod scalar;
pub mod tangent;
pub mod validation;
pub mod weights;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    pub struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/weights.md")]
    pub struct Weights;
    #[doc = include_str!("../../../book/src/enumeration.md")]
    pub struct Enumeration;
    #[doc = include_str!("../../../book/src/arctic.md")]
    pub struct Arctic;
    #[doc = include_str!("../../../book/src/qthadt.md")]
    pub struct Qthadt;
    #[doc = include_str!("../../../book/src/sampling.md")]
    pub struct Sampling;
}
