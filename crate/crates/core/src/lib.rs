//! Approximation of rank-one tensor functions `f(x) = f_1(x_1) * ... * f_d(x_d)`
//! on the unit cube from point evaluations.
//!
//! The library follows the usual two-phase scheme: a search phase locates a
//! point `z*` with `f(z*) != 0` (see [`search`]), and a recovery phase rebuilds
//! every factor from samples on the axis lines through `z*` (see [`recovery`]).
//! Supporting modules provide the univariate machinery ([`univariate`]), the
//! tensor type with query accounting ([`tensor`]), point sets and their
//! dispersion ([`dispersion`]), and the fooling-family harness for the lower
//! bounds ([`adversary`]).

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod dispersion;
mod error;
pub mod families;
pub mod pipeline;
pub mod recovery;
pub mod rng;
pub mod search;
pub mod tensor;
pub mod univariate;

pub use error::{Error, Result};
