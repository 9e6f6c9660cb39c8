//! Computable analysis of weighted graphs (resistor networks) at finite truncation.
//!
//! The crate covers the energy Hilbert space of a network and its graph
//! Laplacian, dipoles and resolvents, the exact polynomial recursion that
//! produces deficiency vectors (`Δu = -u` with finite energy) on geometric
//! chains, the reversible random walk and transfer operator induced by the
//! conductances, and compatible pairs of graph maps that pull energy spaces
//! back isometrically.
//!
//! Module map:
//!
//! * [`graph`]: weighted graphs, axiom validation, model constructors, text format.
//! * [`energy`]: energy form, Laplacian, dipoles, Fin/Harm projection, `S₂` sums.
//! * [`solver`]: pinned / shifted / Dirichlet SPD solves behind the energy operations.
//! * [`recursion`]: exact `(p_n, q_n)` polynomials, generating functions, growth laws.
//! * [`spectral`]: harmonic and deficiency constructions, model classification.
//! * [`walk`]: transition kernel, seeded Monte Carlo, transfer operator.
//! * [`embedding`]: compatible pairs `(φ, ψ)` and transport of harmonic/monopole solutions.
//! * [`cli`]: the `resistnet` command-line front end (feature `cli`).

// `!(x > 0.0)` style guards are there to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod embedding;
pub mod energy;
mod error;
pub mod exact;
pub mod graph;
pub mod recursion;
pub mod solver;
pub mod spectral;
pub mod tail;
pub mod walk;

#[cfg(feature = "cli")]
pub mod cli;

pub use error::{Error, Result};
pub use graph::{ModelFamily, ModelSpec, WeightedGraph};
