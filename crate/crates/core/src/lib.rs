//! Numerics for sine-kernel gap probabilities on unions of intervals and
//! Toeplitz determinants on unions of arcs, plus evaluators for their
//! large-parameter asymptotics.

// `!(a < b)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asym;
pub mod error;
pub mod fredholm;
pub mod legendre_limit;
pub mod quad;
pub mod scaling;
pub mod specfun;
pub mod toeplitz;

pub use asym::{AsymptoticBreakdown, TransitionParams, TransitionVariant, TwoGapGeometry};
pub use error::{GapError, Result};
pub use fredholm::IntervalSet;
pub use num_complex::Complex64;
pub use quad::QuadRule;
pub use scaling::ScalingContext;
pub use specfun::LegendreBasis;
pub use toeplitz::{ArcSet, SzegoData};
