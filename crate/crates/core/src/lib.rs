//! Computational toolkit for subgroup separability and engulfing in free
//! groups: reduced words, boundary dynamics, Stallings graphs, coset
//! enumeration and the constructions built on them.

pub mod boundary;
pub mod error;
pub mod finite_index;
pub mod lab;
pub mod report;
pub mod stallings;
pub mod word;

pub use boundary::{AbsorbingPair, BoundaryPoint, Cylinder, CylinderSet, SchottkySystem};
pub use error::{Error, Result};
pub use finite_index::{CosetTable, Presentation};
pub use stallings::{CoreGraph, LimitSetApprox};
pub use word::{Alphabet, Letter, Word};
