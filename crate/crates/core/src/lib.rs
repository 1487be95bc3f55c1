//! Spectral solvers for the generalized Benjamin-Ono equation
//! `u_t = H u_xx - (u^m / m)_x` on the whole line.
//!
//! Two spatial discretizations share one [`field::Field`] type: a periodic
//! Fourier grid and a rational (mapped Fourier) basis that resolves
//! algebraically decaying profiles on the real line.

// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod field;
pub mod ground_state;
pub mod initial;
pub mod spectral;
pub mod thresholds;

pub use error::{Error, Result};
pub use field::{Field, Grid};
