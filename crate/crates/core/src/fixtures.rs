//! Small named graphs used throughout the tests, the acceptance suite and the
//! Python smoke test.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, Partition};

/// The 10-node worked example as a 0/1 adjacency matrix.
pub const EXAMPLE_ADJACENCY: &str = "\
0,1,1,1,0,0,0,0,0,0
1,0,1,1,1,0,0,0,0,0
1,1,0,1,0,0,0,0,1,0
1,1,1,0,0,1,0,0,0,0
0,1,0,0,0,1,1,0,0,0
0,0,0,1,1,0,1,0,0,1
0,0,0,0,1,1,0,1,0,0
0,0,0,0,0,0,1,0,1,1
0,0,1,0,0,0,0,1,0,1
0,0,0,0,0,1,0,1,1,0
";

pub fn example_graph() -> Graph {
    crate::format::parse_adjacency_matrix(EXAMPLE_ADJACENCY).expect("fixture parses")
}

/// Clusters {1,2,3,4}, {5,6,7}, {8,9,10} (1-based).
pub fn example_partition() -> Partition {
    Partition::new(vec![vec![0, 1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]).expect("valid")
}

/// The 4-cycle 0-1-2-3-0 with chord 0-2.
pub fn cycle_with_chord() -> Graph {
    Graph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).expect("simple")
}

pub fn star(n: usize) -> Graph {
    Graph::new(n, (1..n).map(|v| (0, v))).expect("simple")
}

/// Random connected graph on `n` nodes: a random spanning tree plus each
/// remaining pair independently with probability `p`. Deterministic in
/// `seed`.
pub fn random_connected(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges: Vec<(usize, usize)> = (1..n)
        .map(|i| (order[i], order[rng.gen_range(0..i)]))
        .collect();
    for u in 0..n {
        for v in u + 1..n {
            let present = edges.iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u));
            if !present && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).expect("simple")
}

/// Every connected graph of the small-graph suite, with a display name.
///
/// Paths, cycles and complete graphs on up to 6 nodes, the 4-cycle with a
/// chord, a 5-node star and two seeded random connected graphs.
pub fn small_suite() -> Vec<(String, Graph)> {
    let mut suite = Vec::new();
    for n in 1..=6 {
        suite.push((format!("path{n}"), Graph::path(n)));
    }
    for n in 3..=6 {
        suite.push((format!("cycle{n}"), Graph::cycle(n)));
    }
    for n in 4..=6 {
        suite.push((format!("complete{n}"), Graph::complete(n)));
    }
    suite.push(("cycle4+chord".into(), cycle_with_chord()));
    suite.push(("star5".into(), star(5)));
    suite.push(("random5-seed11".into(), random_connected(5, 0.4, 11)));
    suite.push(("random6-seed23".into(), random_connected(6, 0.4, 23)));
    suite
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_is_connected_and_small() {
        for (name, g) in small_suite() {
            assert!(g.is_connected(), "{name}");
            assert!(g.node_count() <= 6, "{name}");
        }
        assert_eq!(example_graph().edge_count(), 17);
    }

    #[test]
    fn random_graphs_are_reproducible() {
        assert_eq!(random_connected(6, 0.4, 23), random_connected(6, 0.4, 23));
    }
}
