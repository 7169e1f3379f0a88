//! Cascade systems as closure operators on finite lattices.
//!
//! A system on a state lattice `P` is a map that is expansive, order-preserving
//! and idempotent: states only get worse, worse inputs give worse outcomes, and
//! the outcome is final. Such maps are determined by their fixed-point sets,
//! which makes combining systems (`+`), projecting them (`·`), and analysing
//! which shocks make them fail into finite set computations.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bitset;
pub mod components;
pub mod error;
pub mod failure;
pub mod laws;
pub mod lattice;
pub mod metrics;
pub mod models;
pub mod recovery;
pub mod system;

pub use bitset::BitSet;
pub use components::{ComponentRealization, ComponentRule};
pub use error::{Error, Result};
pub use failure::WeaknessSet;
pub use laws::LawReport;
pub use lattice::{ElemId, Lattice, Product};
pub use metrics::{Measure, MetricReport, Rational};
pub use models::{Model, ModelSpec};
pub use recovery::{KernelOperator, ProtectedPair};
pub use system::{Rule, System};
