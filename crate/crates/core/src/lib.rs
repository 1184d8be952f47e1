//! Exact computations on finite simply connected Sullivan minimal models over ℚ.
//!
//! The crate computes degreewise cohomology, the formal dimension, ellipticity
//! (through the associated pure model), fundamental classes (Murillo's
//! determinant formula for pure models) and the rational Toomer invariant
//! `e₀`, which equals rational LS-category for elliptic models.
//!
//! `e₀` is computed two independent ways: [`cohomology::toomer_oracle`] works
//! directly with `d`-boundaries in the top degree, while
//! [`spectral::toomer_spectral`] runs the word-length spectral sequence for
//! models whose differential starts in word-length three and lifts surviving
//! `δ`-classes to `d`-cocycles.

pub mod algebra;
pub mod catalog;
pub mod cli;
pub mod cohomology;
pub mod differential;
pub mod error;
pub mod linalg;
pub mod murillo;
mod par;
pub mod selftest;
pub mod spectral;

pub use algebra::{Algebra, Element, Generator, Monomial, WordLength, Q};
pub use differential::{Derivation, Differential, PureModel, SullivanModel};
pub use error::{Error, ErrorKind, Result};
pub use linalg::RationalMatrix;
