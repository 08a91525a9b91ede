//! Exact valuation-theoretic invariants of simple algebraic extensions.
//!
//! The crate is `no_std` (it needs `alloc`). Everything is exact: rationals are
//! arbitrary precision, residue arithmetic is over explicit finite fields, and
//! values live in `Q ∪ {∞}`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod algebra;
pub mod invariants;
pub mod maclane;
pub mod newton;
pub mod random;
pub mod ramify;
pub mod tower;
pub mod value;

pub use algebra::{AlgebraError, Elem, Field, Poly, Rat};
pub use value::Value;
