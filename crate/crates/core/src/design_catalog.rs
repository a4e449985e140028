//! Generators for the design families: two-level factorials, two-way ANOVA
//! layouts, k-out-of-2k choice designs, Latin squares and balanced digraphs.
//!
//! Run orders follow the usual textbook conventions: first factor varies
//! slowest, table cells are numbered row by row, subsets are lexicographic.

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::One;

use crate::contrast::DesignModel;
use crate::error::{Error, Result};
use crate::exact_linalg::IntMatrix;
use crate::randomisation::RandomisationSystem;
use crate::unimodular::{incidence_matrix, DirectedGraph};

pub const MAX_FACTORIAL_K: usize = 12;
pub const MAX_CHOICE_RUNS: u64 = 100_000;

/// `2^k` runs of a two-level main-effects model: an intercept column and one
/// `+-1` column per factor, `+1` first, factor 1 slowest.
pub fn factorial_two_level(k: usize) -> Result<DesignModel> {
    if !(1..=MAX_FACTORIAL_K).contains(&k) {
        return Err(Error::OutOfBudget {
            what: "factorial design",
            detail: format!("k must be in 1..={MAX_FACTORIAL_K}, got {k}"),
        });
    }
    let n = 1usize << k;
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for r in 0..n {
        let mut row = vec![1i64];
        let mut label = String::with_capacity(k);
        for f in 0..k {
            let minus = (r >> (k - 1 - f)) & 1 == 1;
            row.push(if minus { -1 } else { 1 });
            label.push(if minus { '-' } else { '+' });
        }
        rows.push(row);
        labels.push(label);
    }
    let mut params = vec!["I".to_string()];
    params.extend((1..=k).map(|f| format!("x{f}")));
    DesignModel::new(IntMatrix::from_i64_rows(&rows), labels, params)
}

/// Additive two-way layout: `I*J` cells in row-major order, indicator columns
/// `a1..aI` then `b1..bJ`.
pub fn anova_two_way(i: usize, j: usize) -> Result<DesignModel> {
    if i < 2 || j < 2 {
        return Err(Error::InvalidArgument(format!(
            "two-way layout needs I, J >= 2, got I={i}, J={j}"
        )));
    }
    let mut rows = Vec::with_capacity(i * j);
    let mut labels = Vec::with_capacity(i * j);
    for a in 0..i {
        for b in 0..j {
            let mut row = vec![0i64; i + j];
            row[a] = 1;
            row[i + b] = 1;
            rows.push(row);
            labels.push(format!("({},{})", a + 1, b + 1));
        }
    }
    let params = (1..=i)
        .map(|a| format!("a{a}"))
        .chain((1..=j).map(|b| format!("b{b}")))
        .collect();
    DesignModel::new(IntMatrix::from_i64_rows(&rows), labels, params)
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Runs are the k-subsets of `2k` attributes in lexicographic order; column
/// `a` indicates whether attribute `a` is offered.
pub fn choice_k_of_2k(k: usize) -> Result<DesignModel> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("choice design needs k >= 2, got {k}")));
    }
    let runs = binomial(2 * k as u64, k as u64);
    if runs > MAX_CHOICE_RUNS {
        return Err(Error::OutOfBudget {
            what: "choice design",
            detail: format!("{runs} runs exceeds {MAX_CHOICE_RUNS}"),
        });
    }
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for subset in (0..2 * k).combinations(k) {
        let mut row = vec![0i64; 2 * k];
        for &a in &subset {
            row[a] = 1;
        }
        rows.push(row);
        labels.push(subset.iter().map(|a| (a + 1).to_string()).join(""));
    }
    let params = (1..=2 * k).map(|a| format!("t{a}")).collect();
    DesignModel::new(IntMatrix::from_i64_rows(&rows), labels, params)
}

/// Pairs each run of `choice_k_of_2k(k)` with the run offering the
/// complementary attributes.
pub fn complementary_pairs(k: usize) -> Result<RandomisationSystem> {
    let subsets: Vec<Vec<usize>> = (0..2 * k).combinations(k).collect();
    let n = subsets.len();
    let mut blocks = Vec::new();
    for (r, s) in subsets.iter().enumerate() {
        let comp: Vec<usize> = (0..2 * k).filter(|a| !s.contains(a)).collect();
        let partner = subsets.iter().position(|t| *t == comp).expect("complement is a k-subset");
        if r < partner {
            blocks.push(vec![r, partner]);
        }
    }
    RandomisationSystem::new(n, blocks)
}

/// An `I x I` array over symbols `0..I` with each symbol once per row and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatinSquare {
    cells: Vec<Vec<usize>>,
}

impl LatinSquare {
    pub fn new(cells: Vec<Vec<usize>>) -> Result<Self> {
        let order = cells.len();
        if order == 0 {
            return Err(Error::InvalidLatinSquare("empty square".into()));
        }
        for (r, row) in cells.iter().enumerate() {
            if row.len() != order {
                return Err(Error::InvalidLatinSquare(format!(
                    "row {} has {} cells, expected {order}",
                    r + 1,
                    row.len()
                )));
            }
            if row.iter().any(|&s| s >= order) || !row.iter().all_unique() {
                return Err(Error::InvalidLatinSquare(format!("row {} is not a permutation", r + 1)));
            }
        }
        for c in 0..order {
            if !cells.iter().map(|row| row[c]).all_unique() {
                return Err(Error::InvalidLatinSquare(format!(
                    "column {} repeats a symbol",
                    c + 1
                )));
            }
        }
        Ok(Self { cells })
    }

    pub fn order(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }
}

/// The two mutually orthogonal squares of order 3: `ABC/CAB/BCA` and
/// `abc/bca/cab`.
pub fn mols_order3() -> [LatinSquare; 2] {
    [
        LatinSquare::new(vec![vec![0, 1, 2], vec![2, 0, 1], vec![1, 2, 0]]).expect("latin"),
        LatinSquare::new(vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).expect("latin"),
    ]
}

/// Groups the cells (numbered row by row) by symbol.
pub fn latin_square_blocks(sq: &LatinSquare) -> RandomisationSystem {
    let order = sq.order();
    let mut blocks = vec![Vec::new(); order];
    for (r, row) in sq.cells().iter().enumerate() {
        for (c, &s) in row.iter().enumerate() {
            blocks[s].push(r * order + c);
        }
    }
    RandomisationSystem::new(order * order, blocks).expect("an order >= 2 square partitions its cells")
}

/// Edges as runs: an intercept column followed by the transposed incidence
/// matrix, so the contrast block is the incidence matrix itself.
pub fn digraph_design(g: &DirectedGraph) -> Result<DesignModel> {
    if let Some((vertex, out_degree, in_degree)) = g.first_unbalanced() {
        return Err(Error::NotBalanced {
            vertex: vertex + 1,
            out_degree,
            in_degree,
        });
    }
    let n = g.edges().len();
    let ones = IntMatrix::new(n, 1, vec![BigInt::one(); n])?;
    let x = ones.hstack(&incidence_matrix(g).transpose())?;
    let labels = g
        .edges()
        .iter()
        .map(|(t, h)| format!("{}>{}", t + 1, h + 1))
        .collect();
    let mut params = vec!["I".to_string()];
    params.extend((1..=g.n_vertices()).map(|v| format!("v{v}")));
    DesignModel::new(x, labels, params)
}

/// The 5-vertex, 15-edge balanced digraph used throughout the tests and the CLI default.
pub fn example_digraph() -> DirectedGraph {
    let edges = [
        (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (2, 5), (3, 4), (3, 5),
        (3, 1), (4, 5), (4, 1), (4, 2), (5, 1), (5, 2), (5, 3),
    ];
    DirectedGraph::from_one_based(5, &edges).expect("valid example graph")
}
