//! Spanning-tree samplers and the connected-partition sampler built on them.
//!
//! A partition is drawn by sampling a spanning tree, deleting a uniformly
//! random set of `k - 1` of its edges and reading off the components.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Partition};

/// Edge set of a spanning tree, canonically ordered.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpanningTree {
    n: usize,
    edges: Vec<Edge>,
}

impl SpanningTree {
    /// Checks that `edges` form a spanning tree on `n` nodes.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut canon: Vec<Edge> = edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
        canon.sort_unstable();
        if canon.len() + 1 != n {
            return Err(Error::InvalidTree(format!(
                "a spanning tree on {n} nodes has {} edges, got {}",
                n.saturating_sub(1),
                canon.len()
            )));
        }
        let mut sets = DisjointSets::new(n);
        for &(u, v) in &canon {
            if v >= n {
                return Err(Error::NodeOutOfRange { id: v, n });
            }
            if !sets.union(u, v) {
                return Err(Error::InvalidTree("edges contain a cycle".into()));
            }
        }
        Ok(SpanningTree { n, edges: canon })
    }

    fn from_sampled(n: usize, mut edges: Vec<Edge>) -> Self {
        for e in edges.iter_mut() {
            *e = (e.0.min(e.1), e.0.max(e.1));
        }
        edges.sort_unstable();
        SpanningTree { n, edges }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
}

impl fmt::Display for SpanningTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .edges
            .iter()
            .map(|&(u, v)| format!("{}-{}", u + 1, v + 1))
            .collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// How the spanning tree in step one is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TreeMode {
    /// Wilson's loop-erased random walks; exactly uniform.
    #[default]
    UniformTree,
    /// Minimum spanning tree under i.i.d. uniform edge weights. Not uniform
    /// in general.
    RandMstTree,
}

impl TreeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TreeMode::UniformTree => "uniform-tree",
            TreeMode::RandMstTree => "randmst-tree",
        }
    }
}

impl FromStr for TreeMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uniform-tree" => Ok(TreeMode::UniformTree),
            "randmst-tree" => Ok(TreeMode::RandMstTree),
            other => Err(format!("unknown sampler mode `{other}`")),
        }
    }
}

/// Seeded generator. `(seed, stream)` pairs give independent,
/// reproducible sequences; the stream index is what parallel trials split on.
#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        RngState::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngState { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// Uniform spanning tree by Wilson's algorithm rooted at node 0.
///
/// From each node not yet in the tree, walk randomly until the tree is hit,
/// remembering only the last exit from every visited node. Retracing those
/// exits yields the walk with its loops erased in the order they closed.
pub fn sample_spanning_tree_uniform<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Result<SpanningTree> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.node_count();
    let mut in_tree = vec![false; n];
    let mut next = vec![usize::MAX; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    in_tree[0] = true;
    for start in 1..n {
        let mut u = start;
        while !in_tree[u] {
            let nbrs = g.neighbors(u);
            next[u] = nbrs[rng.gen_range(0..nbrs.len())];
            u = next[u];
        }
        u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            edges.push((u, next[u]));
            u = next[u];
        }
    }
    Ok(SpanningTree::from_sampled(n, edges))
}

/// Kruskal's minimum spanning tree of `g` given a weight per edge (indexed
/// like [`Graph::edges`]). Equal weights are ordered by edge index.
pub fn minimum_spanning_tree<W: PartialOrd>(g: &Graph, weights: &[W]) -> Result<SpanningTree> {
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    order.sort_by(|&a, &b| {
        weights[a]
            .partial_cmp(&weights[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut sets = DisjointSets::new(g.node_count());
    let mut edges = Vec::with_capacity(g.node_count().saturating_sub(1));
    for i in order {
        let (u, v) = g.edges()[i];
        if sets.union(u, v) {
            edges.push((u, v));
        }
    }
    if sets.set_count() != 1 {
        return Err(Error::Disconnected);
    }
    Ok(SpanningTree::from_sampled(g.node_count(), edges))
}

/// Minimum spanning tree under independent uniform random edge weights.
pub fn sample_spanning_tree_randmst<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Result<SpanningTree> {
    let weights: Vec<f64> = (0..g.edge_count()).map(|_| rng.gen::<f64>()).collect();
    minimum_spanning_tree(g, &weights)
}

pub fn sample_spanning_tree<R: Rng + ?Sized>(g: &Graph, mode: TreeMode, rng: &mut R) -> Result<SpanningTree> {
    match mode {
        TreeMode::UniformTree => sample_spanning_tree_uniform(g, rng),
        TreeMode::RandMstTree => sample_spanning_tree_randmst(g, rng),
    }
}

/// Uniform `count`-subset of `0..len` by a partial Fisher-Yates shuffle.
pub fn sample_index_subset<R: Rng + ?Sized>(len: usize, count: usize, rng: &mut R) -> Vec<usize> {
    assert!(count <= len);
    let mut idx: Vec<usize> = (0..len).collect();
    for i in 0..count {
        let j = rng.gen_range(i..len);
        idx.swap(i, j);
    }
    idx.truncate(count);
    idx
}

/// Components of the forest left after deleting `removed` from `t`.
pub fn components_after_deletion(t: &SpanningTree, removed: &[Edge]) -> Result<Partition> {
    let mut drop = vec![false; t.edges.len()];
    for &(u, v) in removed {
        let e = (u.min(v), u.max(v));
        match t.edges.binary_search(&e) {
            Ok(i) if !drop[i] => drop[i] = true,
            _ => return Err(Error::EdgeNotInTree(e.0, e.1)),
        }
    }
    let mut sets = DisjointSets::new(t.n);
    for (&(u, v), _) in t.edges.iter().zip(&drop).filter(|(_, &d)| !d) {
        sets.union(u, v);
    }
    Ok(Partition::from_labels(&sets.labels()))
}

/// Draws one connected `k`-partition of `g`.
pub fn sample_connected_partition<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    mode: TreeMode,
    rng: &mut R,
) -> Result<Partition> {
    let n = g.node_count();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let tree = sample_spanning_tree(g, mode, rng)?;
    let cut: Vec<Edge> = sample_index_subset(n - 1, k - 1, rng)
        .into_iter()
        .map(|i| tree.edges[i])
        .collect();
    components_after_deletion(&tree, &cut)
}
