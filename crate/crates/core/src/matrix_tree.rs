//! Exact spanning-tree counts from Laplacian minors.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

use crate::error::Result;
use crate::graph::{Graph, IntMatrix, Laplacian};

/// Exact determinant by fraction-free (Bareiss) elimination.
///
/// Every intermediate division is exact, so no rationals are needed. Row
/// swaps handle zero pivots; a column with no nonzero pivot means the matrix
/// is singular. The empty matrix has determinant 1.
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.size();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        let (head, tail) = a.split_at_mut(k + 1);
        let pivot_row = &head[k];
        for row in tail.iter_mut() {
            for j in k + 1..n {
                let v = &row[j] * &pivot_row[k] - &row[k] * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = pivot_row[k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Determinant of `m` with row `i` and column `i` removed.
pub fn minor_determinant(m: &IntMatrix, i: usize) -> Result<BigInt> {
    Ok(determinant(&m.principal_minor(i)?))
}

/// Number of spanning trees of a graph or loop-free multigraph, counting
/// parallel edges as distinct. Zero iff the input is disconnected.
///
/// Removes the last row and column of the Laplacian; the result does not
/// depend on that choice.
pub fn count_spanning_trees<G: Laplacian + ?Sized>(g: &G) -> BigUint {
    let l = g.laplacian();
    let det = minor_determinant(&l, l.size() - 1).expect("laplacian has at least one row");
    match det.into_parts() {
        (Sign::Minus, _) => unreachable!("laplacian minors are nonnegative"),
        (_, mag) => mag,
    }
}

impl Graph {
    /// Memoized spanning-tree count.
    pub fn tree_count(&self) -> &BigUint {
        self.tree_count_cell().get_or_init(|| count_spanning_trees(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::Multigraph;

    #[test]
    fn example_counts() {
        let g = fixtures::example_graph();
        assert_eq!(*g.tree_count(), BigUint::from(4546u32));
        let counts: Vec<BigUint> = fixtures::example_partition()
            .blocks()
            .iter()
            .map(|b| count_spanning_trees(&g.induced_subgraph(b).unwrap().0))
            .collect();
        assert_eq!(counts, [16u32, 3, 3].map(BigUint::from));
        let m = g.contract(&fixtures::example_partition()).unwrap();
        assert_eq!(count_spanning_trees(&m), BigUint::from(8u32));
    }

    #[test]
    fn small_counts() {
        let two_edges = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert!(count_spanning_trees(&two_edges).is_zero());
        assert_eq!(count_spanning_trees(&Graph::cycle(4)), BigUint::from(4u32));
        assert_eq!(count_spanning_trees(&Graph::new(1, []).unwrap()), BigUint::one());
        assert_eq!(count_spanning_trees(&Graph::complete(5)), BigUint::from(125u32));
    }

    #[test]
    fn minor_choice() {
        let l = fixtures::example_graph().laplacian();
        assert_eq!(minor_determinant(&l, 9).unwrap(), BigInt::from(4546));
        for i in 0..10 {
            assert_eq!(minor_determinant(&l, i).unwrap(), BigInt::from(4546));
        }
        let lm = IntMatrix::from_rows(&[vec![3, -2, -1], vec![-2, 4, -2], vec![-1, -2, 3]]);
        assert_eq!(minor_determinant(&lm, 2).unwrap(), BigInt::from(8));
        assert_eq!(
            minor_determinant(&IntMatrix::from_rows(&[vec![0]]), 0).unwrap(),
            BigInt::one()
        );
        assert!(minor_determinant(&lm, 3).is_err());
    }

    #[test]
    fn determinant_with_pivoting() {
        let m = IntMatrix::from_rows(&[vec![0, 2, 1], vec![1, 0, 0], vec![0, 1, 1]]);
        assert_eq!(determinant(&m), BigInt::from(-1));
        let singular = IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]]);
        assert!(determinant(&singular).is_zero());
        let m = IntMatrix::from_rows(&[vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]);
        assert_eq!(determinant(&m), BigInt::from(4));
    }

    #[test]
    fn parallel_edges_count_separately() {
        let m = Multigraph::from_matrix(&[vec![0, 5], vec![5, 0]]).unwrap();
        assert_eq!(count_spanning_trees(&m), BigUint::from(5u32));
    }
}
