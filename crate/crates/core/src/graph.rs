//! Graph, multigraph and partition types, plus the structural operations the
//! probability formula is built from: connectivity, induced subgraphs,
//! boundaries, block contraction and Laplacians.
//!
//! Node ids are contiguous and 0-based everywhere in this module. The 1-based
//! convention of the file formats is handled in [`crate::format`].

use std::collections::VecDeque;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};

use crate::error::{Error, Result};

pub type Edge = (usize, usize);

/// A simple undirected graph on nodes `0..n`.
///
/// Edges are stored canonically (`u < v`, sorted), so equal graphs compare
/// and serialize identically. Graphs are immutable once built, which lets the
/// spanning-tree count be cached on the instance.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    tree_count: OnceLock<BigUint>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = Edge>,
    {
        if n == 0 {
            return Err(Error::EmptySet);
        }
        let mut canon = Vec::new();
        for (u, v) in edges {
            for id in [u, v] {
                if id >= n {
                    return Err(Error::NodeOutOfRange { id, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &canon {
            adj[u].push(v);
            adj[v].push(u);
        }
        Ok(Graph {
            n,
            edges: canon,
            adj,
            tree_count: OnceLock::new(),
        })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::new(n, edges).expect("complete graph is simple")
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|v| (v - 1, v))).expect("path is simple")
    }

    /// Cycle on `n >= 3` nodes.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a simple cycle needs at least 3 nodes");
        Graph::new(n, (0..n).map(|v| (v, (v + 1) % n))).expect("cycle is simple")
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_index(u, v).is_some()
    }

    /// Position of the edge `{u, v}` in [`Graph::edges`].
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    pub(crate) fn tree_count_cell(&self) -> &OnceLock<BigUint> {
        &self.tree_count
    }

    /// True iff every node is reachable from node 0.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut reached = 1;
        let mut queue = VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        reached == self.n
    }

    fn membership(&self, nodes: &[usize]) -> Result<Vec<bool>> {
        if nodes.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut member = vec![false; self.n];
        for &id in nodes {
            if id >= self.n {
                return Err(Error::NodeOutOfRange { id, n: self.n });
            }
            member[id] = true;
        }
        Ok(member)
    }

    /// Subgraph induced by `nodes`, relabeled `0..|S|` by ascending original
    /// id. The second value maps each new id back to its original id.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<(Graph, Vec<usize>)> {
        let member = self.membership(nodes)?;
        let original: Vec<usize> = (0..self.n).filter(|&v| member[v]).collect();
        let mut relabel = vec![usize::MAX; self.n];
        for (new, &old) in original.iter().enumerate() {
            relabel[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| member[u] && member[v])
            .map(|&(u, v)| (relabel[u], relabel[v]));
        let sub = Graph::new(original.len(), edges)?;
        Ok((sub, original))
    }

    /// Edges with exactly one endpoint in `s`. `s` must be a nonempty proper
    /// subset of the nodes.
    pub fn boundary_edges(&self, s: &[usize]) -> Result<Vec<Edge>> {
        let member = self.membership(s)?;
        if member.iter().all(|&m| m) {
            return Err(Error::NotProperSubset);
        }
        Ok(self
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| member[u] != member[v])
            .collect())
    }

    /// Nodes not in `s`, ascending.
    pub fn complement(&self, s: &[usize]) -> Result<Vec<usize>> {
        let member = self.membership(s)?;
        Ok((0..self.n).filter(|&v| !member[v]).collect())
    }

    /// Collapses every block of `c` to a single node. Edges between blocks
    /// become multiplicities; edges inside a block are dropped.
    pub fn contract(&self, c: &Partition) -> Result<Multigraph> {
        self.check_partition(c)?;
        let labels = c.labels();
        let mut m = Multigraph::empty(c.block_count());
        for &(u, v) in &self.edges {
            let (a, b) = (labels[u], labels[v]);
            if a != b {
                m.add(a, b, 1);
            }
        }
        Ok(m)
    }

    pub(crate) fn check_partition(&self, c: &Partition) -> Result<()> {
        if c.node_count() != self.n {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} nodes but the graph has {}",
                c.node_count(),
                self.n
            )));
        }
        Ok(())
    }
}

/// Undirected multigraph without self loops, stored as a dense symmetric
/// multiplicity matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    k: usize,
    mult: Vec<u64>,
}

impl Multigraph {
    pub fn empty(k: usize) -> Self {
        Multigraph {
            k,
            mult: vec![0; k * k],
        }
    }

    /// Builds a multigraph from a dense matrix, which must be square,
    /// symmetric and zero on the diagonal.
    pub fn from_matrix(rows: &[Vec<u64>]) -> Result<Self> {
        let k = rows.len();
        let mut m = Multigraph::empty(k);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected {k} entries, found {}", row.len()),
                });
            }
            if row[i] != 0 {
                return Err(Error::NonzeroDiagonal(i));
            }
            for (j, &w) in row.iter().enumerate() {
                if rows[j][i] != w {
                    return Err(Error::Asymmetric { row: i, col: j });
                }
            }
            m.mult[i * k..(i + 1) * k].copy_from_slice(row);
        }
        Ok(m)
    }

    /// Adds `w` parallel edges between distinct nodes `i` and `j`.
    pub fn add(&mut self, i: usize, j: usize, w: u64) {
        assert!(i != j, "multigraphs here carry no self loops");
        self.mult[i * self.k + j] += w;
        self.mult[j * self.k + i] += w;
    }

    pub fn node_count(&self) -> usize {
        self.k
    }

    pub fn multiplicity(&self, i: usize, j: usize) -> u64 {
        self.mult[i * self.k + j]
    }

    /// Total number of edges, counting multiplicity.
    pub fn edge_count(&self) -> u64 {
        self.mult.iter().sum::<u64>() / 2
    }

    pub fn matrix(&self) -> Vec<Vec<u64>> {
        self.mult.chunks(self.k.max(1)).take(self.k).map(<[u64]>::to_vec).collect()
    }
}

impl From<&Graph> for Multigraph {
    fn from(g: &Graph) -> Self {
        let mut m = Multigraph::empty(g.node_count());
        for &(u, v) in g.edges() {
            m.add(u, v, 1);
        }
        m
    }
}

/// An unlabeled partition of the nodes `0..n` into nonempty blocks.
///
/// Always held in canonical form: ids ascending within a block, blocks
/// ordered by their smallest id. Two partitions are the same iff their
/// canonical forms are equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Validates that `blocks` is a disjoint cover of `0..N` by nonempty
    /// blocks, where `N` is the total number of ids given.
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let total: usize = blocks.iter().map(Vec::len).sum();
        let mut label = vec![usize::MAX; total];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {} is empty", b + 1)));
            }
            for &v in block {
                if v >= total {
                    return Err(Error::InvalidPartition(format!(
                        "node {} is outside 1..={total}",
                        v + 1
                    )));
                }
                if label[v] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "node {} appears more than once",
                        v + 1
                    )));
                }
                label[v] = b;
            }
        }
        Ok(Partition::from_labels(&label))
    }

    /// Canonical partition grouping nodes with equal labels.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut slot: std::collections::HashMap<usize, usize> = Default::default();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (v, &l) in labels.iter().enumerate() {
            let b = *slot.entry(l).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(v);
        }
        Partition { blocks }
    }

    pub fn whole(n: usize) -> Self {
        Partition {
            blocks: vec![(0..n).collect()],
        }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            blocks: (0..n).map(|v| vec![v]).collect(),
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn node_count(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Block index of every node.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.node_count()];
        for (b, block) in self.blocks.iter().enumerate() {
            for &v in block {
                labels[v] = b;
            }
        }
        labels
    }
}

/// Renders with 1-based ids, e.g. `{1,2}|{3}`.
impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (b, block) in self.blocks.iter().enumerate() {
            if b > 0 {
                f.write_str("|")?;
            }
            f.write_str("{")?;
            for (i, v) in block.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", v + 1)?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

/// Square matrix of arbitrary-precision integers, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    size: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(size: usize) -> Self {
        IntMatrix {
            size,
            data: vec![BigInt::default(); size * size],
        }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let size = rows.len();
        let mut m = IntMatrix::zeros(size);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), size, "matrix must be square");
            for (j, &x) in row.iter().enumerate() {
                m.data[i * size + j] = BigInt::from(x);
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.size + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.size..(i + 1) * self.size]
    }

    /// Copy with row `i` and column `i` removed.
    pub fn principal_minor(&self, i: usize) -> Result<IntMatrix> {
        if i >= self.size {
            return Err(Error::IndexOutOfRange {
                index: i,
                size: self.size,
            });
        }
        let keep: Vec<usize> = (0..self.size).filter(|&r| r != i).collect();
        let mut m = IntMatrix::zeros(keep.len());
        for (a, &r) in keep.iter().enumerate() {
            for (b, &c) in keep.iter().enumerate() {
                m.data[a * keep.len() + b] = self.get(r, c).clone();
            }
        }
        Ok(m)
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.size)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| i64::try_from(x).ok())
                    .collect()
            })
            .collect()
    }
}

/// Combinatorial Laplacian: weighted degree on the diagonal, minus the edge
/// multiplicity off it.
pub trait Laplacian {
    fn laplacian(&self) -> IntMatrix;
}

impl Laplacian for Graph {
    fn laplacian(&self) -> IntMatrix {
        let mut l = IntMatrix::zeros(self.n);
        for &(u, v) in &self.edges {
            *l.get_mut(u, v) -= 1;
            *l.get_mut(v, u) -= 1;
            *l.get_mut(u, u) += 1;
            *l.get_mut(v, v) += 1;
        }
        l
    }
}

impl Laplacian for Multigraph {
    fn laplacian(&self) -> IntMatrix {
        let mut l = IntMatrix::zeros(self.k);
        for i in 0..self.k {
            for j in 0..self.k {
                let w = self.multiplicity(i, j);
                if w > 0 {
                    *l.get_mut(i, j) -= w;
                    *l.get_mut(i, i) += w;
                }
            }
        }
        l
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn rejects_malformed_graphs() {
        assert!(matches!(Graph::new(3, [(0, 0)]), Err(Error::SelfLoop(0))));
        assert!(matches!(
            Graph::new(3, [(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Graph::new(2, [(0, 2)]),
            Err(Error::NodeOutOfRange { id: 2, n: 2 })
        ));
        assert!(Graph::new(0, []).is_err());
    }

    #[test]
    fn connectivity() {
        assert!(fixtures::example_graph().is_connected());
        assert!(!Graph::new(2, []).unwrap().is_connected());
        assert!(Graph::complete(3).is_connected());
        assert!(Graph::new(1, []).unwrap().is_connected());
    }

    #[test]
    fn induced_blocks_of_example_graph() {
        let g = fixtures::example_graph();
        let (k4, map) = g.induced_subgraph(&[0, 1, 2, 3]).unwrap();
        assert_eq!(k4, Graph::complete(4));
        assert_eq!(map, vec![0, 1, 2, 3]);
        let (tri, map) = g.induced_subgraph(&[6, 4, 5]).unwrap();
        assert_eq!(tri, Graph::complete(3));
        assert_eq!(map, vec![4, 5, 6]);
        let all: Vec<usize> = (0..10).collect();
        assert_eq!(g.induced_subgraph(&all).unwrap().0, g);
        assert!(matches!(g.induced_subgraph(&[]), Err(Error::EmptySet)));
        assert!(g.induced_subgraph(&[10]).is_err());
    }

    #[test]
    fn boundaries() {
        let g = fixtures::example_graph();
        // 1-based {(2,5),(3,9),(4,6)}
        assert_eq!(
            g.boundary_edges(&[0, 1, 2, 3]).unwrap(),
            vec![(1, 4), (2, 8), (3, 5)]
        );
        assert_eq!(Graph::complete(3).boundary_edges(&[0]).unwrap().len(), 2);
        assert_eq!(Graph::path(3).boundary_edges(&[0, 1]).unwrap(), vec![(1, 2)]);
        assert!(matches!(
            Graph::path(3).boundary_edges(&[0, 1, 2]),
            Err(Error::NotProperSubset)
        ));
        assert!(matches!(Graph::path(3).boundary_edges(&[]), Err(Error::EmptySet)));
    }

    #[test]
    fn contraction() {
        let g = fixtures::example_graph();
        let m = g.contract(&fixtures::example_partition()).unwrap();
        assert_eq!(m.matrix(), vec![vec![0, 2, 1], vec![2, 0, 2], vec![1, 2, 0]]);

        let whole = g.contract(&Partition::whole(10)).unwrap();
        assert_eq!(whole.node_count(), 1);
        assert_eq!(whole.edge_count(), 0);

        assert_eq!(g.contract(&Partition::singletons(10)).unwrap(), Multigraph::from(&g));
        assert!(g.contract(&Partition::whole(9)).is_err());
    }

    #[test]
    fn example_laplacian_table() {
        #[rustfmt::skip]
        let expected = vec![
            vec![ 3, -1, -1, -1,  0,  0,  0,  0,  0,  0],
            vec![-1,  4, -1, -1, -1,  0,  0,  0,  0,  0],
            vec![-1, -1,  4, -1,  0,  0,  0,  0, -1,  0],
            vec![-1, -1, -1,  4,  0, -1,  0,  0,  0,  0],
            vec![ 0, -1,  0,  0,  3, -1, -1,  0,  0,  0],
            vec![ 0,  0,  0, -1, -1,  4, -1,  0,  0, -1],
            vec![ 0,  0,  0,  0, -1, -1,  3, -1,  0,  0],
            vec![ 0,  0,  0,  0,  0,  0, -1,  3, -1, -1],
            vec![ 0,  0, -1,  0,  0,  0,  0, -1,  3, -1],
            vec![ 0,  0,  0,  0,  0, -1,  0, -1, -1,  3],
        ];
        assert_eq!(fixtures::example_graph().laplacian().to_i64_rows().unwrap(), expected);
    }

    #[test]
    fn multigraph_laplacian() {
        let m = fixtures::example_graph().contract(&fixtures::example_partition()).unwrap();
        assert_eq!(
            m.laplacian().to_i64_rows().unwrap(),
            vec![vec![3, -2, -1], vec![-2, 4, -2], vec![-1, -2, 3]]
        );
        assert_eq!(
            Graph::new(1, []).unwrap().laplacian().to_i64_rows().unwrap(),
            vec![vec![0]]
        );
    }

    #[test]
    fn multigraph_from_matrix_validates() {
        assert!(Multigraph::from_matrix(&[vec![0, 1], vec![2, 0]]).is_err());
        assert!(Multigraph::from_matrix(&[vec![1, 1], vec![1, 0]]).is_err());
        let m = Multigraph::from_matrix(&[vec![0, 3], vec![3, 0]]).unwrap();
        assert_eq!(m.edge_count(), 3);
    }

    #[test]
    fn partition_canonical_form() {
        let p = Partition::new(vec![vec![4, 2], vec![3, 0, 1]]).unwrap();
        assert_eq!(p.blocks(), &[vec![0, 1, 3], vec![2, 4]]);
        assert_eq!(p.to_string(), "{1,2,4}|{3,5}");
        assert_eq!(p, Partition::from_labels(&[7, 7, 1, 7, 1]));
        assert!(Partition::new(vec![vec![0], vec![]]).is_err());
        assert!(Partition::new(vec![vec![0, 1], vec![1]]).is_err());
        assert!(Partition::new(vec![vec![0, 3]]).is_err());
    }
}
