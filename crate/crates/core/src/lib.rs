//! Acute-angle point sets in vector spaces over odd finite fields.
//!
//! A vertex `u` of the triangle `(u, v, w)` in `F_q^n` is acute when
//! `Δ(u, v, w) = 2 (u - v)·(u - w)` is a nonzero square in `F_q`. This crate
//! provides exact field arithmetic, the acuteness test, the additive and
//! quadratic character sums that bound the size of acute sets, and searches
//! for large acute sets.

pub mod charsums;
pub mod error;
pub mod exec;
pub mod field;
pub mod geometry;
pub mod io;
pub mod search;

pub use error::{Error, Result};
pub use field::{ArithOp, Elem, FieldInfo, FieldOptions, FieldSpec, QRClass};
pub use geometry::{AcuteCheck, Point, PointSet};
