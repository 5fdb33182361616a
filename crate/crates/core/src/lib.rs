//! Numerical geometry and function theory on the unit ball of `C^n` with the
//! Bergman metric.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: geodesic radius, ball volumes, sphere areas, the Bergman
//!   gradient norm and the invariant Laplacian.
//! * [`holo`]: sparse complex polynomials and the level functions
//!   `u = |f|^a (1 - |z|^2)^b` built from them.
//! * [`integrate`]: seeded integration engines over the sphere, the ball and
//!   the ball with the hyperbolic volume measure.
//! * [`norms`]: Hardy and weighted Bergman norms and the embedding checks.
//! * [`superlevel`]: distribution functions of superlevel sets, the
//!   monotone functional `g(t)`, the weak-type bound and layer-cake identities.
//! * [`rearrange`]: decreasing rearrangements and the two radial
//!   symmetrizations.
//! * [`inequalities`]: sharp constants and the isoperimetric, Sobolev,
//!   weighted Hardy and rearrangement-lemma checkers.
//!
//! Every stochastic quantity is an [`integrate::IntegralEstimate`] or a
//! [`check::Margin`] carrying its own error bar.

pub mod check;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod holo;
pub mod inequalities;
pub mod integrate;
pub mod norms;
pub mod quad;
pub mod rearrange;
pub mod rng;
pub mod special;
pub mod superlevel;

pub use error::{Error, Result};
pub use num_complex::Complex64;
