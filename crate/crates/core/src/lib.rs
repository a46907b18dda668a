//! Exact computations in the rational Lazard ring: the universal formal group
//! law and its logarithm, the universal inverse-Todd series, Chern numbers of
//! products of projective spaces and their complete intersections, and
//! Milnor-basis decompositions of cobordism classes.
//!
//! Everything is exact over `Q`; identities are checked as equalities of
//! truncated power series or of Lazard-ring elements.

pub mod chern;
pub mod cli;
pub mod cobordism;
pub mod exactnum;
pub mod lazard;
pub mod linalg;
pub mod series;
mod text;

pub use chern::{ChowClass, LineBundleSpec, Partition, ProjProduct};
pub use cobordism::{CobordismClass, DecompositionReport, HrrReport};
pub use exactnum::{Coeff, Rational};
pub use lazard::{FormalGroupLaw, GenusSpec, LazardElement, Specialize};
pub use series::TruncSeries;
pub use text::ParseError;
