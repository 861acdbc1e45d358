//! Toeplitz operators attached to spherical isometries, in exactly
//! computable models.
//!
//! * [`circle`]: the Toeplitz algebra of the unilateral shift, with every
//!   element held exactly as `T_φ + F` (Laurent symbol plus finite corner).
//! * [`szego`]: the Szegő tuple on the Hardy space of the unit sphere as a
//!   graded weighted multishift with rational moment weights.
//! * [`polydisc`]: tensor products of circle elements modelling the bidisc.
//! * [`hardy`]: Hardy spaces of weighted circle measures.
//! * [`spectra`]: winding-number spectra, the essential-range inclusion and
//!   the convex-hull bound.
//! * [`scenario`]: the scenario runner behind the `sphiso` binary.

pub mod circle;
pub mod error;
pub mod hardy;
pub mod linalg;
pub mod polydisc;
pub mod random;
pub mod scenario;
pub mod spectra;
pub mod symbols;
pub mod szego;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use symbols::LaurentPoly;
