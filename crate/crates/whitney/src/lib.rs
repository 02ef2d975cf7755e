//! Exact secondary intersection invariants of immersed 2-spheres in
//! 4-manifolds, computed from combinatorial Whitney-disk diagrams.
//!
//! The crate is organized bottom-up:
//! - [`group`]: group elements with decidable normal forms,
//! - [`ring`]: integer combinations over the group, its square, and the
//!   Δ-quotient of its cube,
//! - [`canon`]: canonical forms modulo the local relations via signed
//!   orbit closure,
//! - [`lattice`]: integer-span membership via Hermite normal form,
//! - [`relations`]: enumerated intersection-relation instances, quotient
//!   reduction, and the simply-connected reduction,
//! - [`diagram`]: single-sphere Whitney-disk diagrams and the invariant,
//! - [`moves`]: diagram rewrites that preserve the invariant,
//! - [`multi`]: the n-sphere invariant and the triple invariant.

pub mod canon;
pub mod diagram;
pub mod error;
pub mod group;
pub mod lattice;
pub mod moves;
pub mod multi;
pub mod relations;
pub mod ring;

pub use error::Error;
