//! Random walks under the Kendall generalized convolution.
//!
//! The crate covers the probability laws involved ([`measures`]), the
//! modified Williamson transform and the n-step laws it yields
//! ([`williamson`]), the generalized convolution kernels
//! ([`convolution`]), path simulation ([`walks`]), closed-form
//! distributional results ([`closedforms`]) and a Monte Carlo harness that
//! checks simulation against theory ([`verify`]).

pub mod closedforms;
pub mod convolution;
pub mod distspec;
pub mod error;
pub mod exec;
pub mod measures;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod verify;
pub mod walks;
pub mod williamson;

pub use error::{Error, Result};
pub use exec::Execution;
pub use distspec::parse_dist;
pub use measures::{DistKind, Distribution, Support};
pub use rng::RngStream;
