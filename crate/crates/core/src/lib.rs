//! Fully decentralized asynchronous recurrent graph neural network (ARGNN)
//! with dynamic edge pruning driven by the imaginary parts of local
//! graph-Laplacian eigenvalues.
//!
//! The crate is `no_std` and only needs `alloc`. Everything in here is pure
//! computation over value types; file formats, threading and the command-line
//! front end live in the companion `argnn` crate.
//!
//! ## Layout
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`graph`] | Directed weighted graph, node roles, neighborhoods, degree matrices |
//! | [`spectral`] | Local Laplacian, nonsymmetric eigensolver, eigenvalue/node association |
//! | [`dynamics`] | Node behavior (activation, local gradient, weight update) and training |
//! | [`pruning`] | Opposite-imaginary-pair detection and input-edge removal |
//! | [`experiment`] | Seeded single-run drivers for the capacity, timing and trace experiments |
//! | [`stats`] | Mean / sample standard deviation aggregation |
//!
//! ## Quick start
//!
//! ```
//! use argnn_core::dynamics::{Gate, TrainingConfig, Trainer};
//! use argnn_core::pruning::{PruneConfig, PruneMode};
//!
//! let config = TrainingConfig {
//!     passes: 10,
//!     prune: PruneConfig::with_mode(PruneMode::Weighted),
//!     ..TrainingConfig::default()
//! };
//! let mut trainer = Trainer::fully_connected(2, 7, config);
//! let log = trainer.train(Gate::Xor, 50, &mut ());
//! assert_eq!(log.len(), 50);
//! assert!(trainer.graph().edge_count() <= 12);
//! ```
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dynamics;
pub mod experiment;
pub mod graph;
pub mod pruning;
pub mod spectral;
pub mod stats;

pub use dynamics::{Gate, NodeStates, Trainer, TrainingConfig};
pub use graph::{DegreeMode, Edge, NetworkGraph, Neighborhood, NodeId, Role};
pub use pruning::{PruneConfig, PruneEvent, PruneMode};
pub use spectral::{AssociationRule, LocalLaplacian, SpectralError, Spectrum};

/// Seeded generator used everywhere a random draw is made: PCG XSL RR 128/64
/// (`Pcg64`), seeded through [`rand::SeedableRng::seed_from_u64`].
pub type SimRng = rand_pcg::Pcg64;

/// Builds the generator for a run seed.
pub fn seeded_rng(seed: u64) -> SimRng {
    <SimRng as rand::SeedableRng>::seed_from_u64(seed)
}
