//! Exact-arithmetic calculators for root-number statistics of (conjugate)
//! self-dual representations.
//!
//! The crate is organized around the decision pipeline of the
//! equidistribution-vs-bias prediction:
//!
//! - [`combinatorics`]: half-integers, Laurent polynomials, binomials, the
//!   alternating-sum identity, and the unitriangular solver.
//! - [`localfield`]: places, conductors, truncated quadratic rings, and the
//!   residue-ring oracles for the local transfer lemmas.
//! - [`oldforms`]: oldform dimensions and twisted traces on oldform spaces.
//! - [`transfer`]: test-function coefficient schedules, central transfer
//!   profiles, and the sign of the central-element main term.
//! - [`segments`]: segment calculus for conductors and root numbers, plus
//!   the existence tables for prescribed local data.
//! - [`shapes`]: infinitesimal-character generating functions, integrality,
//!   group assignment, and dimension norms.
//! - [`predict`]: the scenario-level decision procedure.
//!
//! All arithmetic is exact; enumeration-heavy oracles run data-parallel by
//! default (feature `parallel`) with sequential fallbacks.

pub mod combinatorics;
pub mod error;
pub mod localfield;
pub mod oldforms;
pub mod predict;
pub mod segments;
pub mod shapes;
pub mod transfer;

pub use error::{Error, Result};
