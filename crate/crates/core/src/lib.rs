//! Sampling connected K-partitions of a graph, and their exact probabilities.
//!
//! A connected K-partition splits the nodes into K blocks that each induce a
//! connected subgraph. [`sampler::sample_connected_partition`] draws one by
//! cutting `K - 1` random edges out of a uniform spanning tree.
//! [`prob::partition_probability`] gives the exact chance of any partition
//! under that procedure, from spanning-tree counts of the blocks and of the
//! contracted multigraph. [`oracle`] and [`montecarlo`] check the two
//! against each other by brute force and by simulation.

mod dsu;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod graph;
pub mod matrix_tree;
pub mod montecarlo;
pub mod oracle;
pub mod prob;
pub mod sampler;

use num_bigint::BigUint;
use num_rational::Ratio;

pub use error::{Error, ErrorKind, Result};
pub use graph::{Edge, Graph, IntMatrix, Laplacian, Multigraph, Partition};
pub use matrix_tree::{count_spanning_trees, minor_determinant};
pub use oracle::EnumerationBudget;
pub use prob::{partition_probability, two_block_probability};
pub use sampler::{sample_connected_partition, RngState, SpanningTree, TreeMode};

/// Exact probability, always kept in lowest terms.
pub type Probability = Ratio<BigUint>;
