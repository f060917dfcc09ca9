//! Relativistic helicity laboratory.
//!
//! Exact Minkowski-space algebra ([`core4`]), finite-difference exterior
//! calculus on analytic space-time fields ([`calculus`]), manufactured
//! barotropic flows ([`scenarios`]), discrete vortex filaments and their
//! linking ([`filaments`]) and the helicity functionals ([`helicity`]).
//!
//! Units have `c = 1` throughout: `x⁰ = ct`, velocities are fractions of the
//! speed of light and the enthalpy `h` carries units of energy.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled; `std` switches the bulk reductions onto rayon.
#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod calculus;
pub mod core4;
mod error;
pub mod filaments;
pub mod helicity;
pub mod math;
pub mod scenarios;
pub mod sum;

pub use error::{Error, Result};
