//! Total unimodularity and directed-graph incidence matrices.

use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_linalg::IntMatrix;
use crate::par;

/// A directed multigraph on vertices `0..n_vertices` without self-loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedGraph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl DirectedGraph {
    /// Edges are 0-based `(tail, head)` pairs.
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for &(t, h) in &edges {
            if t >= n_vertices || h >= n_vertices {
                return Err(Error::InvalidGraph(format!(
                    "edge {}->{} uses a vertex outside 1..={n_vertices}",
                    t + 1,
                    h + 1
                )));
            }
            if t == h {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {}", t + 1)));
            }
        }
        Ok(Self { n_vertices, edges })
    }

    pub fn from_one_based(n_vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let edges = edges
            .iter()
            .map(|&(t, h)| match (t.checked_sub(1), h.checked_sub(1)) {
                (Some(t), Some(h)) => Ok((t, h)),
                _ => Err(Error::InvalidGraph("vertices are 1-based".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n_vertices, edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn degrees(&self) -> Vec<(usize, usize)> {
        let mut deg = vec![(0, 0); self.n_vertices];
        for &(t, h) in &self.edges {
            deg[t].0 += 1;
            deg[h].1 += 1;
        }
        deg
    }

    /// First vertex whose out-degree differs from its in-degree.
    pub fn first_unbalanced(&self) -> Option<(usize, usize, usize)> {
        self.degrees()
            .into_iter()
            .enumerate()
            .find(|(_, (o, i))| o != i)
            .map(|(v, (o, i))| (v, o, i))
    }
}

/// `|V| x |E|` matrix with `+1` at the tail and `-1` at the head of each edge.
pub fn incidence_matrix(g: &DirectedGraph) -> IntMatrix {
    let mut m = IntMatrix::zeros(g.n_vertices(), g.edges().len());
    for (e, &(t, h)) in g.edges().iter().enumerate() {
        m.set(t, e, BigInt::one());
        m.set(h, e, -BigInt::one());
    }
    m
}

/// Every vertex has as many incoming as outgoing edges.
pub fn is_eulerian_balanced(g: &DirectedGraph) -> bool {
    g.first_unbalanced().is_none()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
    })
}

/// Number of square submatrices of an `rows x cols` matrix.
pub fn submatrix_count(rows: usize, cols: usize) -> u128 {
    (1..=rows.min(cols)).fold(0u128, |acc, k| {
        acc.saturating_add(binomial(rows, k).saturating_mul(binomial(cols, k)))
    })
}

/// Brute-force total unimodularity test.
///
/// Entries outside {-1, 0, 1} reject immediately. Otherwise every square
/// submatrix is checked, size by size; determinants of size `k` are expanded
/// along their first row from the memoised size `k - 1` minors, so each
/// submatrix costs `k` lookups. Fails with [`Error::TooLarge`] when the number
/// of submatrices exceeds `size_cap`.
pub fn is_totally_unimodular(a: &IntMatrix, size_cap: u128) -> Result<bool> {
    if a.entries().iter().any(|x| x.abs() > BigInt::one()) {
        return Ok(false);
    }
    let m = if a.n_rows() <= a.n_cols() { a.clone() } else { a.transpose() };
    let (rows, cols) = (m.n_rows(), m.n_cols());
    let count = submatrix_count(rows, cols);
    if count > size_cap {
        return Err(Error::TooLarge {
            submatrices: count,
            cap: size_cap,
        });
    }
    if rows <= 1 {
        return Ok(true);
    }
    if cols > 128 {
        // minors are keyed by column bitmask
        return Err(Error::TooLarge {
            submatrices: count,
            cap: size_cap,
        });
    }
    let entry = |r: usize, c: usize| m.get(r, c).to_i64().expect("entry in {-1,0,1}");

    let mut minors: HashMap<(u128, u128), i64> = HashMap::new();
    for r in 0..rows {
        for c in 0..cols {
            minors.insert((1 << r, 1 << c), entry(r, c));
        }
    }
    for k in 2..=rows {
        let keys: Vec<(Vec<usize>, Vec<usize>)> = (0..rows)
            .combinations(k)
            .cartesian_product((0..cols).combinations(k).collect::<Vec<_>>())
            .collect();
        let prev = &minors;
        let dets: Vec<i64> = par::map(&keys, |(rs, cs)| {
            let r0 = rs[0];
            let rest = rs.iter().skip(1).fold(0u128, |m, &r| m | 1 << r);
            let cmask = cs.iter().fold(0u128, |m, &c| m | 1 << c);
            cs.iter()
                .enumerate()
                .map(|(pos, &c)| {
                    let a = entry(r0, c);
                    if a == 0 {
                        return 0;
                    }
                    let sign = if pos % 2 == 0 { 1 } else { -1 };
                    sign * a * prev[&(rest, cmask & !(1 << c))]
                })
                .sum()
        });
        if dets.iter().any(|d| d.abs() > 1) {
            return Ok(false);
        }
        minors = keys
            .iter()
            .zip(dets)
            .map(|((rs, cs), d)| {
                let rm = rs.iter().fold(0u128, |m, &r| m | 1 << r);
                let cm = cs.iter().fold(0u128, |m, &c| m | 1 << c);
                ((rm, cm), d)
            })
            .collect();
    }
    Ok(true)
}

/// Whether a row sums to zero, i.e. the row is orthogonal to the all-ones vector.
pub fn row_sums_zero(a: &IntMatrix) -> bool {
    a.rows().all(|r| r.iter().sum::<BigInt>().is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_graph() -> DirectedGraph {
        let edges = [
            (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (2, 5), (3, 4), (3, 5),
            (3, 1), (4, 5), (4, 1), (4, 2), (5, 1), (5, 2), (5, 3),
        ];
        DirectedGraph::from_one_based(5, &edges).unwrap()
    }

    #[test]
    fn example_incidence_matrix() {
        let a = incidence_matrix(&example_graph());
        let expected = IntMatrix::from_i64_rows(&[
            [1, 1, 1, 0, 0, 0, 0, 0, -1, 0, -1, 0, -1, 0, 0],
            [-1, 0, 0, 1, 1, 1, 0, 0, 0, 0, 0, -1, 0, -1, 0],
            [0, -1, 0, -1, 0, 0, 1, 1, 1, 0, 0, 0, 0, 0, -1],
            [0, 0, -1, 0, -1, 0, -1, 0, 0, 1, 1, 1, 0, 0, 0],
            [0, 0, 0, 0, 0, -1, 0, -1, 0, -1, 0, 0, 1, 1, 1],
        ]);
        assert_eq!(a, expected);
        assert!(is_eulerian_balanced(&example_graph()));
        assert!(row_sums_zero(&a));
        assert_eq!(is_totally_unimodular(&a, 1_000_000), Ok(true));
    }

    #[test]
    fn small_graphs() {
        let g = DirectedGraph::from_one_based(2, &[(1, 2)]).unwrap();
        assert_eq!(incidence_matrix(&g), IntMatrix::from_i64_rows(&[[1], [-1]]));
        assert!(!is_eulerian_balanced(&g));
        let empty = DirectedGraph::new(3, vec![]).unwrap();
        let m = incidence_matrix(&empty);
        assert_eq!((m.n_rows(), m.n_cols()), (3, 0));
        let cycle = DirectedGraph::from_one_based(3, &[(1, 2), (2, 3), (3, 1)]).unwrap();
        assert!(is_eulerian_balanced(&cycle));
        assert!(DirectedGraph::from_one_based(2, &[(1, 1)]).is_err());
        assert!(DirectedGraph::from_one_based(2, &[(1, 3)]).is_err());
    }

    #[test]
    fn tu_examples() {
        assert_eq!(is_totally_unimodular(&IntMatrix::from_i64_rows(&[[1, 1], [1, -1]]), 100), Ok(false));
        assert_eq!(is_totally_unimodular(&IntMatrix::identity(5), 1000), Ok(true));
        assert_eq!(is_totally_unimodular(&IntMatrix::from_i64_rows(&[[2]]), 0), Ok(false));
        assert_eq!(
            is_totally_unimodular(&IntMatrix::identity(4), 10),
            Err(Error::TooLarge { submatrices: 69, cap: 10 })
        );
        let factorial3 = IntMatrix::from_i64_rows(&[
            [1, 1, 1, 1, -1, -1, -1, -1],
            [1, 1, -1, -1, 1, 1, -1, -1],
            [1, -1, 1, -1, 1, -1, 1, -1],
        ]);
        assert_eq!(is_totally_unimodular(&factorial3, 10_000), Ok(false));
    }

    #[test]
    fn counts() {
        assert_eq!(submatrix_count(5, 15), 15503);
        assert_eq!(submatrix_count(2, 2), 5);
        assert_eq!(submatrix_count(0, 4), 0);
    }

    mod props {
        use super::*;
        use crate::exact_linalg::determinant;
        use proptest::prelude::*;

        fn brute_force_tu(a: &IntMatrix) -> bool {
            let (r, c) = (a.n_rows(), a.n_cols());
            (1..=r.min(c)).all(|k| {
                (0..r).combinations(k).all(|rs| {
                    (0..c).combinations(k).all(|cs| {
                        let sub = a.transpose().select_columns(&rs).transpose().select_columns(&cs);
                        determinant(&sub).unwrap().abs() <= BigInt::one()
                    })
                })
            })
        }

        proptest! {
            #[test]
            fn memoised_matches_brute_force(rows in prop::collection::vec(prop::collection::vec(-1i64..=1, 5), 1..=4)) {
                let a = IntMatrix::from_i64_rows(&rows);
                prop_assert_eq!(is_totally_unimodular(&a, u128::MAX).unwrap(), brute_force_tu(&a));
            }

            #[test]
            fn digraph_incidence_is_tu(edges in prop::collection::vec((0usize..5, 0usize..5), 0..9)) {
                let edges: Vec<_> = edges.into_iter().filter(|(t, h)| t != h).collect();
                let g = DirectedGraph::new(5, edges).unwrap();
                let a = incidence_matrix(&g);
                prop_assert!(is_totally_unimodular(&a, u128::MAX).unwrap());
                prop_assert_eq!(is_eulerian_balanced(&g), row_sums_zero(&a));
            }
        }
    }
}
