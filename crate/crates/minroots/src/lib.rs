//! Exact computation with minimal roots of arbitrary Coxeter groups.
//!
//! The central object is the minimal-root reflection table: for every
//! generator `s` and every minimal root `λ` it records whether `sλ` is
//! again minimal (and which root it is), whether `λ` is the simple root
//! of `s` (so `sλ` is negative), or whether `sλ` is a positive root that
//! is no longer minimal.  The table is finite for every Coxeter group and
//! drives a multiplication algorithm whose cost is one table lookup per
//! scanned letter of a normal form.
//!
//! Two independent constructions of the table are provided:
//!
//! * [`naive`] — a FIFO worklist over exact root coordinates in a single
//!   cyclotomic ring, with a coordinate lookup table for deduplication.
//!   Simple, slow, and used as the reference.
//! * [`brink`] — the production builder.  Roots are represented by their
//!   supports as indecomposable pieces glued at unit-coefficient nodes,
//!   all arithmetic happens in small per-edge rings, and descents are
//!   recovered by walking the already-built part of the table instead of
//!   by coordinate lookup.
//!
//! A brute-force [`oracle`] (exact reflection matrices, Cayley-ball
//! enumeration) and a [`verify`] suite cross-check everything.

pub mod bitset;
pub mod brink;
pub mod corpus;
pub mod cyclo;
pub mod dihedral;
pub mod error;
pub mod naive;
pub mod oracle;
pub mod precise;
pub mod system;
pub mod table;
pub mod verify;
pub mod words;

pub use bitset::GenSet;
pub use cyclo::{BaseRing, RingElem};
pub use error::{BuildError, Error, ParseError};
pub use system::{CoxeterSystem, GeneratorId, Order};


pub use table::{Entry, MinimalRootTable};
pub use words::NormalForm;
