//! Numerical laboratory for the two-dimensional Ising model on open and
//! toroidal square lattices.
//!
//! The crate provides several independent routes to the same physics so that
//! each can serve as an oracle for the others:
//!
//! * [`lattice`] — geometry, bond lists, spin configurations, energies, and
//!   the boundary-matching predicate that splits the partition function.
//! * [`enumerate`] — exhaustive Gray-code enumeration of all `2^N` states,
//!   densities of states, and the exact split `Q = Q1 + Q2`.
//! * [`transfer`] — column transfer operators for exact partition functions
//!   at widths far beyond enumeration.
//! * [`onsager`] — closed-form critical point, free-energy quadrature, and
//!   spontaneous magnetization for the infinite lattice.
//! * [`mc`] — Metropolis and Wolff sampling with blocked error analysis and
//!   Binder-cumulant crossing estimates of the critical coupling.
//! * [`topology`] — winding classes of lattice loops on the torus, spin
//!   vector fields, and projection-orientation reports.
//! * [`renorm`] — majority-rule block-spin transforms and iterated flows.
//!
//! Deterministic numeric kernels are generic over the scalar type through
//! the [`Real`] trait (`f32` or `f64`); the Monte Carlo engine and the type
//! aliases below fix `f64`, which is what the command-line harness uses.

// Guards are written `if !(x > bound)` on purpose: unlike `x <= bound`, the
// negated form also rejects NaN, failing closed when a computation has
// already gone wrong.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod enumerate;
pub mod error;
pub mod lattice;
pub mod mc;
pub mod onsager;
pub mod renorm;
pub mod scalar;
pub mod selftest;
pub mod topology;
pub mod transfer;

pub use error::Error;
pub use scalar::Real;

/// Partition split with `f64` scalars, as produced by the CLI.
pub type PartitionSplit64 = enumerate::PartitionSplit<f64>;
/// Free energies with `f64` scalars.
pub type FreeEnergies64 = enumerate::FreeEnergies<f64>;
/// Per-size free-energy-gap scan row with `f64` scalars.
pub type DeltaFScanRow64 = transfer::DeltaFScanRow<f64>;
/// Torus embedding with `f64` scalars.
pub type TorusEmbedding64 = topology::TorusEmbedding<f64>;
/// Spin vector field with `f64` scalars.
pub type SpinField64 = topology::SpinField<f64>;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
