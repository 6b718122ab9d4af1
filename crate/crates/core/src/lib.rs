//! Variable exponent function spaces on finite metric measure spaces.
//!
//! The crate evaluates Lebesgue, Hajłasz–Sobolev, Hajłasz–Triebel–Lizorkin and
//! Hajłasz–Besov quasi-norms with variable exponents on finite point sets, and
//! checks the classical embedding inequalities (Sobolev, Moser–Trudinger,
//! Morrey) numerically.
//!
//! ```
//! use hajlasz_core::space::MetricMeasureSpace;
//! use hajlasz_core::exponent::{ExponentField, Tag};
//! use hajlasz_core::norms::luxemburg;
//!
//! let space = MetricMeasureSpace::euclidean(vec![vec![0.0], vec![1.0]], vec![0.5, 0.5]).unwrap();
//! let p = ExponentField::new(Tag::P, vec![1.0, 2.0]).unwrap();
//! let norm = luxemburg(&space, &[2.0, 2.0], &p, 1e-12);
//! assert!((norm.value - 2.0).abs() < 1e-9);
//! ```
#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod check;
pub mod error;
pub mod exponent;
pub mod float;
pub mod functions;
pub mod generators;
pub mod hajlasz;
pub mod norms;
pub mod regularity;
pub mod root;
pub mod space;
pub mod verify;

pub use error::{Error, Result};
