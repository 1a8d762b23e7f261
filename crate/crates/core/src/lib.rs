//! Quantum matrices by paths.
//!
//! Cauchon diagrams and their graphs, path-weight models of the
//! interpolating algebras `R^(t)`, quantum minors via vertex-disjoint path
//! systems, the deleting-derivations maps and Gröbner bases of the
//! torus-invariant primes.

pub mod cauchon;
pub mod coeff;
pub mod error;
pub mod groebner;
pub mod minors;
pub mod straighten;
pub mod torus;
pub mod verify;

pub use cauchon::{CauchonGraph, Diagram, Path, PathSystem, Vertex};
pub use coeff::LaurentScalar;
pub use error::{Error, Result};
pub use groebner::{BasisMember, GroebnerBasis};
pub use minors::{HPrimeHandle, MinorSpec};
pub use straighten::{GradeVector, LocalizedQmPoly, QmPoly, Straightener, Threshold};
pub use torus::{Coord, ExponentMatrix, Shape, TorusElement};

/// Version tag written into every JSON document produced by the crate.
pub const SCHEMA_VERSION: u32 = 1;
