//! Exhaustive ground truth for small graphs.
//!
//! Nothing here evaluates the closed form: trees are enumerated directly,
//! partitions come from restricted growth strings, and probabilities are
//! obtained by counting (tree, deleted edge set) pairs. The spanning-tree
//! determinant is used only to check budgets before enumerating.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::sampler::{components_after_deletion, minimum_spanning_tree, SpanningTree};
use crate::Probability;

/// Caps on exhaustive enumeration, checked before any work starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_nodes: usize,
    pub max_trees: u64,
    pub max_set_partitions: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_nodes: 12,
            max_trees: 100_000,
            max_set_partitions: 10_000_000,
        }
    }
}

/// Permutation enumeration is `|E|!`; 9! is about 3.6e5.
pub const MAX_RANDMST_EDGES: usize = 9;

fn over_budget(what: &'static str, needed: impl ToString, limit: impl ToString) -> Error {
    Error::BudgetExceeded {
        what,
        needed: needed.to_string(),
        limit: limit.to_string(),
    }
}

impl EnumerationBudget {
    fn check_nodes(&self, g: &Graph) -> Result<()> {
        if g.node_count() > self.max_nodes {
            return Err(over_budget("nodes", g.node_count(), self.max_nodes));
        }
        Ok(())
    }

    /// Spanning-tree count of `g`, provided it is within budget.
    fn check_trees(&self, g: &Graph) -> Result<u64> {
        self.check_nodes(g)?;
        let t = g.tree_count();
        if t.is_zero() {
            return Err(Error::Disconnected);
        }
        match t.to_u64() {
            Some(t) if t <= self.max_trees => Ok(t),
            _ => Err(over_budget("spanning trees", t, self.max_trees)),
        }
    }

    fn check_set_partitions(&self, n: usize, k: usize) -> Result<()> {
        let count = stirling2(n, k);
        if count > BigUint::from(self.max_set_partitions) {
            return Err(over_budget("set partitions", count, self.max_set_partitions));
        }
        Ok(())
    }
}

/// Stirling number of the second kind, `S(n, k)`.
pub fn stirling2(n: usize, k: usize) -> BigUint {
    let mut row = vec![BigUint::zero(); k + 1];
    row[0] = BigUint::one();
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            row[j] = &row[j] * j + &row[j - 1];
        }
        row[0] = BigUint::zero();
    }
    row[k].clone()
}

/// Calls `f` with every `r`-subset of `0..m`, in lexicographic order.
pub fn for_each_combination(m: usize, r: usize, mut f: impl FnMut(&[usize])) {
    if r > m {
        return;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        f(&idx);
        let Some(i) = (0..r).rev().find(|&i| idx[i] != i + m - r) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Every spanning tree of `g` exactly once, in canonical order.
///
/// Branches on each edge in turn: take it if it joins two components, skip
/// it if the edges still available can connect the graph without it.
pub fn enumerate_spanning_trees(g: &Graph, budget: &EnumerationBudget) -> Result<Vec<SpanningTree>> {
    budget.check_trees(g)?;
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(g.node_count());
    grow_trees(g, 0, &mut chosen, &DisjointSets::new(g.node_count()), &mut out);
    out.sort();
    Ok(out)
}

fn grow_trees(
    g: &Graph,
    next: usize,
    chosen: &mut Vec<(usize, usize)>,
    sets: &DisjointSets,
    out: &mut Vec<SpanningTree>,
) {
    if chosen.len() + 1 == g.node_count() {
        let tree = SpanningTree::new(g.node_count(), chosen.iter().copied()).expect("acyclic by construction");
        out.push(tree);
        return;
    }
    if next == g.edge_count() {
        return;
    }
    let (u, v) = g.edges()[next];
    let mut with = sets.clone();
    if with.union(u, v) {
        chosen.push((u, v));
        grow_trees(g, next + 1, chosen, &with, out);
        chosen.pop();
    }
    let mut rest = sets.clone();
    for &(a, b) in &g.edges()[next + 1..] {
        rest.union(a, b);
    }
    if rest.set_count() == 1 {
        grow_trees(g, next + 1, chosen, sets, out);
    }
}

/// Every partition of `g`'s nodes into `k` blocks that each induce a
/// connected subgraph, in restricted-growth-string order.
pub fn enumerate_connected_partitions(
    g: &Graph,
    k: usize,
    budget: &EnumerationBudget,
) -> Result<Vec<Partition>> {
    let n = g.node_count();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    budget.check_nodes(g)?;
    budget.check_set_partitions(n, k)?;
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    restricted_growth(g, k, 1, 1, &mut rgs, &mut out);
    Ok(out)
}

fn restricted_growth(
    g: &Graph,
    k: usize,
    pos: usize,
    used: usize,
    rgs: &mut [usize],
    out: &mut Vec<Partition>,
) {
    let n = rgs.len();
    if pos == n {
        if used == k {
            let p = Partition::from_labels(rgs);
            if p.blocks().iter().all(|b| induces_connected(g, b)) {
                out.push(p);
            }
        }
        return;
    }
    // not enough positions left to open the remaining blocks
    if n - pos < k - used {
        return;
    }
    for label in 0..=used.min(k - 1) {
        rgs[pos] = label;
        restricted_growth(g, k, pos + 1, used.max(label + 1), rgs, out);
    }
}

fn induces_connected(g: &Graph, block: &[usize]) -> bool {
    let mut sets = DisjointSets::new(g.node_count());
    let mut inside = vec![false; g.node_count()];
    for &v in block {
        inside[v] = true;
    }
    let mut joined = 1;
    for &(u, v) in g.edges() {
        if inside[u] && inside[v] && sets.union(u, v) {
            joined += 1;
        }
    }
    joined == block.len()
}

/// Tally of the (tree, deleted edge set) pairs that produce a partition.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairCount {
    /// Pairs `(T, F)` with `F` a `(K-1)`-subset of `T` producing the partition.
    pub pairs: u64,
    /// Distinct trees among those pairs.
    pub trees: u64,
    /// Largest number of subsets `F` seen for a single tree.
    pub max_subsets_per_tree: u64,
}

/// Exhaustive law of the sampler for a fixed `k`.
#[derive(Debug, Clone)]
pub struct BruteForceTable {
    pub trees: u64,
    pub subsets_per_tree: u64,
    pub counts: BTreeMap<Partition, PairCount>,
}

impl BruteForceTable {
    pub fn total_pairs(&self) -> u64 {
        self.trees * self.subsets_per_tree
    }

    pub fn probability(&self, c: &Partition) -> Probability {
        let pairs = self.counts.get(c).map_or(0, |pc| pc.pairs);
        Probability::new(BigUint::from(pairs), BigUint::from(self.total_pairs()))
    }
}

/// Runs every spanning tree against every `(k-1)`-subset of its edges and
/// tallies the resulting partitions.
pub fn brute_force_table(g: &Graph, k: usize, budget: &EnumerationBudget) -> Result<BruteForceTable> {
    let n = g.node_count();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let trees = enumerate_spanning_trees(g, budget)?;
    let mut counts: BTreeMap<Partition, PairCount> = BTreeMap::new();
    let mut subsets_per_tree = 0;
    for tree in &trees {
        let mut local: BTreeMap<Partition, u64> = BTreeMap::new();
        subsets_per_tree = 0;
        for_each_combination(n - 1, k - 1, |idx| {
            subsets_per_tree += 1;
            let removed: Vec<_> = idx.iter().map(|&i| tree.edges()[i]).collect();
            let p = components_after_deletion(tree, &removed).expect("edges come from the tree");
            *local.entry(p).or_default() += 1;
        });
        for (p, c) in local {
            let entry = counts.entry(p).or_default();
            entry.pairs += c;
            entry.trees += 1;
            entry.max_subsets_per_tree = entry.max_subsets_per_tree.max(c);
        }
    }
    Ok(BruteForceTable {
        trees: trees.len() as u64,
        subsets_per_tree,
        counts,
    })
}

/// Pair count for one partition, by the same exhaustive sweep.
pub fn brute_force_count(g: &Graph, c: &Partition, budget: &EnumerationBudget) -> Result<(PairCount, u64)> {
    g.check_partition(c)?;
    let n = g.node_count();
    let k = c.block_count();
    let trees = enumerate_spanning_trees(g, budget)?;
    let mut count = PairCount::default();
    let mut total = 0u64;
    for tree in &trees {
        let mut hits = 0;
        for_each_combination(n - 1, k - 1, |idx| {
            total += 1;
            let removed: Vec<_> = idx.iter().map(|&i| tree.edges()[i]).collect();
            if components_after_deletion(tree, &removed).expect("edges come from the tree") == *c {
                hits += 1;
            }
        });
        if hits > 0 {
            count.pairs += hits;
            count.trees += 1;
            count.max_subsets_per_tree = count.max_subsets_per_tree.max(hits);
        }
    }
    Ok((count, total))
}

/// Probability of `c` under the uniform-tree sampler, by direct counting.
pub fn brute_force_probability(g: &Graph, c: &Partition, budget: &EnumerationBudget) -> Result<Probability> {
    let (count, total) = brute_force_count(g, c, budget)?;
    Ok(Probability::new(BigUint::from(count.pairs), BigUint::from(total)))
}

fn factorial(n: usize) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

/// Exact law of the random-weight minimum spanning tree.
///
/// With i.i.d. continuous weights every ranking of the edges is equally
/// likely and Kruskal depends only on the ranking, so sweeping all `|E|!`
/// rankings gives the law exactly.
pub fn exact_randmst_tree_distribution(
    g: &Graph,
    budget: &EnumerationBudget,
) -> Result<BTreeMap<SpanningTree, Probability>> {
    budget.check_nodes(g)?;
    let m = g.edge_count();
    if m > MAX_RANDMST_EDGES {
        return Err(over_budget("edges", m, MAX_RANDMST_EDGES));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut tally: BTreeMap<SpanningTree, u64> = BTreeMap::new();
    let mut ranks: Vec<usize> = (0..m).collect();
    for_each_permutation(&mut ranks, 0, &mut |ranks| {
        let tree = minimum_spanning_tree(g, ranks).expect("graph is connected");
        *tally.entry(tree).or_default() += 1;
    });
    let total = factorial(m);
    Ok(tally
        .into_iter()
        .map(|(t, c)| (t, Probability::new(BigUint::from(c), total.clone())))
        .collect())
}

fn for_each_permutation(items: &mut [usize], start: usize, f: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        f(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        for_each_permutation(items, start + 1, f);
        items.swap(start, i);
    }
}

/// Partition law of the random-MST sampler: its exact tree law pushed
/// through uniform deletion of `k - 1` tree edges.
pub fn randmst_partition_distribution(
    g: &Graph,
    k: usize,
    budget: &EnumerationBudget,
) -> Result<BTreeMap<Partition, Probability>> {
    let n = g.node_count();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let trees = exact_randmst_tree_distribution(g, budget)?;
    let subsets = crate::prob::binomial(n as u64 - 1, k as u64 - 1);
    let mut law: BTreeMap<Partition, Probability> = BTreeMap::new();
    for (tree, p) in trees {
        let share = p / Probability::from_integer(subsets.clone());
        for_each_combination(n - 1, k - 1, |idx| {
            let removed: Vec<_> = idx.iter().map(|&i| tree.edges()[i]).collect();
            let c = components_after_deletion(&tree, &removed).expect("edges come from the tree");
            let slot = law.entry(c).or_insert_with(Probability::zero);
            *slot += share.clone();
        });
    }
    Ok(law)
}
