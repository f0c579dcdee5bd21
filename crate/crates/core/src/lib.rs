//! Dynamical decoupling of dilated quantum dynamical semigroups.
//!
//! A dissipative Lindblad semigroup can be dilated in inequivalent ways.
//! This crate compares two of them under system-only unitary kicks:
//!
//! * [`collision`]: a repeated-interaction (Markov) dilation. As the pulse
//!   period shrinks, the kicked evolution converges to `exp(T L̄)` with the
//!   kick-averaged generator `L̄` from [`decouple::averaged_generator`],
//!   which stays dissipative whenever any coupling is non-zero.
//! * [`pocket`]: a Hamiltonian randomized by one Cauchy variable. It yields
//!   the same one-point semigroup, but suitable kicks cancel it exactly.
//!
//! [`contrast`] runs both on the same dephasing semigroup.
//!
//! [`opalg`] holds the dense linear algebra, [`semigroup`] the generators,
//! Choi-matrix tests and regression-formula kernels, and [`serial`] the JSON
//! formats.

pub mod catalog;
pub mod collision;
pub mod contrast;
pub mod decouple;
pub mod error;
pub mod opalg;
pub mod pocket;
pub mod semigroup;
pub mod serial;

pub use error::{Error, Result};
pub use opalg::Operator;
pub use semigroup::{LindbladModel, Picture, SuperOperator};
