//! Closed-form probability that the sampler returns a given partition.
//!
//! A tree is compatible with a partition `C = (U_1, .., U_K)` iff it consists
//! of a spanning tree of every block plus a spanning tree of the contracted
//! multigraph `M(G, C)`. So the number of compatible trees is
//! `t(M) * prod t(U_k)`, and each compatible tree yields `C` for exactly one
//! of the `binom(n-1, K-1)` equally likely edge deletions:
//!
//! ```text
//! P(C) = t(M) * prod_k t(U_k) / (binom(n-1, K-1) * t(G))
//! ```

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::matrix_tree::count_spanning_trees;
use crate::Probability;

/// `binom(n, k)` by the multiplicative formula; every partial product is an
/// exact binomial, so each division is exact.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Every factor of the closed form for one partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbabilityBreakdown {
    pub graph_trees: BigUint,
    pub block_trees: Vec<BigUint>,
    pub contracted_trees: BigUint,
    pub binomial: BigUint,
    pub compatible_trees: BigUint,
    pub probability: Probability,
}

fn require_connected(g: &Graph) -> Result<()> {
    if g.is_connected() {
        Ok(())
    } else {
        Err(Error::Disconnected)
    }
}

/// True iff `c` has exactly `k` blocks and each block induces a connected
/// subgraph of `g`.
pub fn validate_partition(g: &Graph, c: &Partition, k: usize) -> Result<bool> {
    g.check_partition(c)?;
    if c.block_count() != k {
        return Ok(false);
    }
    for block in c.blocks() {
        if !g.induced_subgraph(block)?.0.is_connected() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Fails with [`Error::KMismatch`] unless `c` has exactly `k` blocks.
pub fn check_block_count(c: &Partition, k: usize) -> Result<()> {
    if c.block_count() == k {
        Ok(())
    } else {
        Err(Error::KMismatch {
            expected: k,
            found: c.block_count(),
        })
    }
}

pub fn probability_breakdown(g: &Graph, c: &Partition) -> Result<ProbabilityBreakdown> {
    require_connected(g)?;
    let contracted = g.contract(c)?;
    let block_trees = c
        .blocks()
        .iter()
        .map(|b| Ok(count_spanning_trees(&g.induced_subgraph(b)?.0)))
        .collect::<Result<Vec<_>>>()?;
    let contracted_trees = count_spanning_trees(&contracted);
    let compatible_trees = block_trees.iter().product::<BigUint>() * &contracted_trees;
    let n = g.node_count() as u64;
    let binomial = binomial(n - 1, c.block_count() as u64 - 1);
    let probability = Probability::new(
        compatible_trees.clone(),
        &binomial * g.tree_count(),
    );
    Ok(ProbabilityBreakdown {
        graph_trees: g.tree_count().clone(),
        block_trees,
        contracted_trees,
        binomial,
        compatible_trees,
        probability,
    })
}

/// Exact probability that the uniform-tree sampler returns `c`, with `K`
/// taken from the block count. Zero if some block is disconnected.
pub fn partition_probability(g: &Graph, c: &Partition) -> Result<Probability> {
    Ok(probability_breakdown(g, c)?.probability)
}

/// Number of spanning trees of `g` from which `c` arises by deleting
/// `K - 1` edges.
pub fn compatible_tree_count(g: &Graph, c: &Partition) -> Result<BigUint> {
    Ok(probability_breakdown(g, c)?.compatible_trees)
}

/// Probability of the two-block partition `(S, V \ S)` computed through the
/// cut: `t(S) t(V \ S) |dS| / ((n - 1) t(G))`.
pub fn two_block_probability(g: &Graph, s: &[usize]) -> Result<Probability> {
    require_connected(g)?;
    let boundary = g.boundary_edges(s)?;
    let rest = g.complement(s)?;
    let inside = count_spanning_trees(&g.induced_subgraph(s)?.0);
    let outside = count_spanning_trees(&g.induced_subgraph(&rest)?.0);
    let numer = inside * outside * BigUint::from(boundary.len());
    let denom = BigUint::from(g.node_count() - 1) * g.tree_count();
    Ok(Probability::new(numer, denom))
}
