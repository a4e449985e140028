//! Randomisation systems: partitions of the runs into blocks whose indicator
//! vectors are orthogonal to every contrast column.
//!
//! Enumeration is circuit based. The binary nonnegative circuits of `X1^T`
//! are the candidate blocks, and the systems are the exact covers of the run
//! set by their supports.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::circuits::{binary_circuits, circuit_basis, mask_of, Circuit, MAX_COLUMNS};
use crate::contrast::ContrastModel;
use crate::error::{Error, Result};
use crate::exact_cover::ExactCover;
use crate::exact_linalg::{dot, IntMatrix};

/// A partition of `0..n_runs` into blocks of size at least two. Blocks are
/// kept sorted by (size, smallest element).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RandomisationSystem {
    n_runs: usize,
    blocks: Vec<Vec<usize>>,
}

impl RandomisationSystem {
    /// Builds a system from 0-based blocks, checking the partition rules.
    pub fn new(n_runs: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n_runs];
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for b in &blocks {
            if b.len() < 2 {
                return Err(Error::InvalidPartition(format!(
                    "block {} has fewer than two runs",
                    fmt_block(b)
                )));
            }
            for &i in b {
                if i >= n_runs {
                    return Err(Error::InvalidPartition(format!(
                        "run {} is out of range 1..={n_runs}",
                        i + 1
                    )));
                }
                if seen[i] {
                    return Err(Error::InvalidPartition(format!("run {} appears twice", i + 1)));
                }
                seen[i] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidPartition(format!(
                "run {} is not in any block",
                missing + 1
            )));
        }
        blocks.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a[0].cmp(&b[0])));
        Ok(Self { n_runs, blocks })
    }

    /// Builds a system from 1-based blocks as written in files and reports.
    pub fn from_one_based(n_runs: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let zero_based = blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&i| {
                        i.checked_sub(1).ok_or_else(|| {
                            Error::InvalidPartition("run indices are 1-based".to_string())
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n_runs, zero_based)
    }

    /// The single block holding every run.
    pub fn full(n_runs: usize) -> Result<Self> {
        Self::new(n_runs, vec![(0..n_runs).collect()])
    }

    pub fn n_runs(&self) -> usize {
        self.n_runs
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn one_based_blocks(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|i| i + 1).collect())
            .collect()
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.blocks.iter().map(Vec::len).collect())
    }

    /// Block indicators as the columns of an `n_runs x k` matrix.
    pub fn indicator_matrix(&self) -> IntMatrix {
        let cols: Vec<Vec<BigInt>> = self
            .blocks
            .iter()
            .map(|b| indicator(self.n_runs, b))
            .collect();
        IntMatrix::from_columns(self.n_runs, &cols).expect("indicator length is n_runs")
    }

    fn block_masks(&self) -> Vec<u128> {
        self.blocks.iter().map(|b| mask_of(b)).collect()
    }
}

impl fmt::Display for RandomisationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|b| fmt_block(b)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl Serialize for RandomisationSystem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based_blocks().serialize(s)
    }
}

/// Formats 0-based indices as a 1-based set, e.g. `{1,4,6,7}`.
pub fn fmt_block(block: &[usize]) -> String {
    let inner: Vec<String> = block.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// 0/1 indicator of a 0-based index set.
pub fn indicator(n: usize, block: &[usize]) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    for &i in block {
        v[i] = BigInt::one();
    }
    v
}

/// Block sizes in decreasing order, i.e. an integer partition of `n_runs`.
///
/// Shapes order the way the classic tables list them: larger leading parts
/// first (`5+5+5` before `5+5+3+2` before `4+4+3+2+2`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Shape(Vec<usize>);

impl Shape {
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }
}

impl Ord for Shape {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.cmp(&self.0)
    }
}

impl PartialOrd for Shape {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl std::str::FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split('+')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::InvalidArgument(format!("bad shape part {p:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Shape::new)
    }
}

impl Serialize for Shape {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Enumerated systems with their shape table and refinement cover relation.
#[derive(Clone, Debug)]
pub struct SchemeCatalog {
    model: ContrastModel,
    systems: Vec<RandomisationSystem>,
    shape_counts: BTreeMap<Shape, usize>,
    refinement_edges: Vec<(usize, usize)>,
}

impl SchemeCatalog {
    /// Builds a catalog from arbitrary systems; they are deduplicated and put
    /// in canonical order (shape, then blocks).
    pub fn from_systems(model: ContrastModel, mut systems: Vec<RandomisationSystem>) -> Self {
        systems.sort_by(|a, b| a.shape().cmp(&b.shape()).then_with(|| a.cmp(b)));
        systems.dedup();
        let mut shape_counts = BTreeMap::new();
        for s in &systems {
            *shape_counts.entry(s.shape()).or_insert(0) += 1;
        }
        let refinement_edges = covering_edges(&systems);
        Self {
            model,
            systems,
            shape_counts,
            refinement_edges,
        }
    }

    pub fn model(&self) -> &ContrastModel {
        &self.model
    }

    pub fn systems(&self) -> &[RandomisationSystem] {
        &self.systems
    }

    pub fn shape_counts(&self) -> &BTreeMap<Shape, usize> {
        &self.shape_counts
    }

    /// `(coarser, finer)` index pairs of the covering relation.
    pub fn refinement_edges(&self) -> &[(usize, usize)] {
        &self.refinement_edges
    }

    pub fn len(&self) -> usize {
        self.systems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }
}

fn refines_masks(finer: &[u128], coarser: &[u128]) -> bool {
    finer
        .iter()
        .all(|&b| coarser.iter().any(|&c| b & c == b))
}

fn covering_edges(systems: &[RandomisationSystem]) -> Vec<(usize, usize)> {
    let masks: Vec<Vec<u128>> = systems.iter().map(RandomisationSystem::block_masks).collect();
    let n = systems.len();
    let below = |fine: usize, coarse: usize| fine != coarse && refines_masks(&masks[fine], &masks[coarse]);
    let mut edges = Vec::new();
    for coarse in 0..n {
        for fine in 0..n {
            if below(fine, coarse) && !(0..n).any(|k| below(fine, k) && below(k, coarse)) {
                edges.push((coarse, fine));
            }
        }
    }
    edges
}

fn check_runs(m: &ContrastModel, n_runs: usize) -> Result<()> {
    if m.n_runs() != n_runs {
        return Err(Error::DimensionMismatch {
            what: "system runs vs model runs",
            left: n_runs,
            right: m.n_runs(),
        });
    }
    Ok(())
}

/// The first block whose indicator is not orthogonal to a contrast column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// 0-based runs of the offending block.
    pub block: Vec<usize>,
    /// 0-based contrast column.
    pub contrast: usize,
    pub inner_product: BigInt,
}

pub fn first_violation(m: &ContrastModel, r: &RandomisationSystem) -> Result<Option<Violation>> {
    check_runs(m, r.n_runs())?;
    let x1 = m.x1();
    for block in r.blocks() {
        for c in 0..x1.n_cols() {
            let ip: BigInt = block.iter().map(|&i| x1.get(i, c)).sum();
            if !ip.is_zero() {
                return Ok(Some(Violation {
                    block: block.clone(),
                    contrast: c,
                    inner_product: ip,
                }));
            }
        }
    }
    Ok(None)
}

/// True iff every block indicator is orthogonal to `X1`.
pub fn is_valid_randomisation(m: &ContrastModel, r: &RandomisationSystem) -> Result<bool> {
    Ok(first_violation(m, r)?.is_none())
}

/// The binary nonnegative circuits of `X1^T`.
pub fn randomisation_vectors(m: &ContrastModel) -> Vec<Circuit> {
    binary_circuits(&circuit_basis(&m.x1().transpose()))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumerateOptions {
    /// Also list the single block of all runs.
    pub include_full: bool,
    /// Only use circuits whose support has exactly this many runs.
    pub block_size: Option<usize>,
}

/// Every partition of the runs whose blocks are supports of binary
/// nonnegative circuits.
///
/// # Panics
/// If the model has more than 128 runs.
pub fn enumerate_circuit_randomisations(m: &ContrastModel, opts: EnumerateOptions) -> SchemeCatalog {
    let n = m.n_runs();
    assert!(n <= MAX_COLUMNS, "enumeration supports at most {MAX_COLUMNS} runs");
    // singleton supports (zero rows of X1) cannot be blocks
    let supports: Vec<Vec<usize>> = randomisation_vectors(m)
        .into_iter()
        .map(|c| c.support().to_vec())
        .filter(|s| s.len() >= 2 && opts.block_size.is_none_or(|k| s.len() == k))
        .collect();
    let masks: Vec<u128> = supports.iter().map(|s| mask_of(s)).collect();
    let mut systems: Vec<RandomisationSystem> = ExactCover::new(n, &masks)
        .solve()
        .into_iter()
        .map(|sol| {
            let blocks = sol.iter().map(|&o| supports[o].clone()).collect();
            RandomisationSystem::new(n, blocks).expect("exact cover is a partition")
        })
        .collect();
    if opts.include_full && n >= 2 {
        systems.push(RandomisationSystem::full(n).expect("n >= 2"));
    }
    SchemeCatalog::from_systems(m.clone(), systems)
}

/// Whether the randomisation vector `v` strictly contains the support of a
/// binary nonnegative circuit, so that it splits into smaller blocks.
pub fn is_decomposable(m: &ContrastModel, v: &[BigInt]) -> Result<bool> {
    if v.len() != m.n_runs() {
        return Err(Error::DimensionMismatch {
            what: "vector length vs model runs",
            left: v.len(),
            right: m.n_runs(),
        });
    }
    if !v.iter().all(|x| x.is_zero() || x.is_one()) {
        return Err(Error::NotARandomisationVector("entries must be 0 or 1".into()));
    }
    let x1 = m.x1();
    for c in 0..x1.n_cols() {
        if !dot(v, &x1.column(c)).is_zero() {
            return Err(Error::NotARandomisationVector(format!(
                "not orthogonal to contrast column {}",
                c + 1
            )));
        }
    }
    let support: Vec<usize> = (0..v.len()).filter(|&i| v[i].is_one()).collect();
    let mask = mask_of(&support);
    Ok(randomisation_vectors(m).iter().any(|c| {
        let cm = c.support_mask();
        cm & mask == cm && cm != mask
    }))
}

fn check_same_runs(r1: &RandomisationSystem, r2: &RandomisationSystem) -> Result<()> {
    if r1.n_runs() != r2.n_runs() {
        return Err(Error::DimensionMismatch {
            what: "runs of compared systems",
            left: r1.n_runs(),
            right: r2.n_runs(),
        });
    }
    Ok(())
}

/// True iff every block of `r1` lies inside some block of `r2`.
pub fn refines(r1: &RandomisationSystem, r2: &RandomisationSystem) -> Result<bool> {
    check_same_runs(r1, r2)?;
    Ok(refines_masks(&r1.block_masks(), &r2.block_masks()))
}

/// Blocks present in both systems, in `r1`'s order.
pub fn shared_blocks(r1: &RandomisationSystem, r2: &RandomisationSystem) -> Result<Vec<Vec<usize>>> {
    check_same_runs(r1, r2)?;
    Ok(r1
        .blocks()
        .iter()
        .filter(|b| r2.blocks().contains(b))
        .cloned()
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contrast::{to_contrast_form, DesignModel};

    fn sys(n: usize, blocks: &[&[usize]]) -> RandomisationSystem {
        RandomisationSystem::from_one_based(n, &blocks.iter().map(|b| b.to_vec()).collect::<Vec<_>>())
            .unwrap()
    }

    fn factorial3() -> ContrastModel {
        let x = IntMatrix::from_i64_rows(&[
            [1, 1, 1, 1],
            [1, 1, 1, -1],
            [1, 1, -1, 1],
            [1, 1, -1, -1],
            [1, -1, 1, 1],
            [1, -1, 1, -1],
            [1, -1, -1, 1],
            [1, -1, -1, -1],
        ]);
        to_contrast_form(&DesignModel::unlabelled(x)).unwrap()
    }

    #[test]
    fn partition_rules() {
        assert!(RandomisationSystem::from_one_based(4, &[vec![1, 2], vec![3]]).is_err());
        assert!(RandomisationSystem::from_one_based(4, &[vec![1, 2], vec![2, 3, 4]]).is_err());
        assert!(RandomisationSystem::from_one_based(4, &[vec![1, 2]]).is_err());
        assert!(RandomisationSystem::from_one_based(4, &[vec![1, 2], vec![3, 5]]).is_err());
        assert!(RandomisationSystem::from_one_based(4, &[vec![0, 2], vec![3, 4]]).is_err());
        assert!(RandomisationSystem::from_one_based(6, &[vec![5, 6, 1], vec![2, 3], vec![4, 1]]).is_err());
    }

    #[test]
    fn blocks_are_canonically_ordered() {
        let r = sys(7, &[&[6, 7, 1], &[4, 2], &[3, 5]]);
        assert_eq!(r.one_based_blocks(), vec![vec![2, 4], vec![3, 5], vec![1, 6, 7]]);
        assert_eq!(r.shape().to_string(), "3+2+2");
        assert_eq!(r.to_string(), "{2,4} {3,5} {1,6,7}");
    }

    #[test]
    fn validity_on_factorial() {
        let m = factorial3();
        assert!(is_valid_randomisation(&m, &sys(8, &[&[1, 4, 6, 7], &[2, 3, 5, 8]])).unwrap());
        assert!(is_valid_randomisation(&m, &sys(8, &[&[1, 8], &[2, 7], &[3, 6], &[4, 5]])).unwrap());
        let bad = sys(8, &[&[1, 2], &[3, 4], &[5, 6], &[7, 8]]);
        assert!(!is_valid_randomisation(&m, &bad).unwrap());
        let v = first_violation(&m, &bad).unwrap().unwrap();
        assert_eq!(v.block, vec![0, 1]);
        assert_eq!(v.contrast, 0);
        assert_eq!(v.inner_product, BigInt::from(2));
        assert!(is_valid_randomisation(&m, &sys(4, &[&[1, 2, 3, 4]])).is_err());
    }

    #[test]
    fn factorial_enumeration() {
        let m = factorial3();
        assert_eq!(randomisation_vectors(&m).len(), 6);
        let cat = enumerate_circuit_randomisations(&m, EnumerateOptions::default());
        let got: Vec<String> = cat.systems().iter().map(ToString::to_string).collect();
        assert_eq!(got, vec!["{1,4,6,7} {2,3,5,8}", "{1,8} {2,7} {3,6} {4,5}"]);
        assert!(cat.refinement_edges().is_empty());

        let with_full = enumerate_circuit_randomisations(&m, EnumerateOptions { include_full: true, ..Default::default() });
        assert_eq!(with_full.len(), 3);
        assert_eq!(with_full.systems()[0].blocks().len(), 1);
        assert_eq!(with_full.refinement_edges(), &[(0, 1), (0, 2)]);
    }

    #[test]
    fn decomposability() {
        let m = factorial3();
        let ones = vec![BigInt::one(); 8];
        assert!(is_decomposable(&m, &ones).unwrap());
        assert!(!is_decomposable(&m, &indicator(8, &[0, 7])).unwrap());
        assert!(matches!(
            is_decomposable(&m, &indicator(8, &[0, 1])),
            Err(Error::NotARandomisationVector(_))
        ));
        let two = vec![BigInt::from(2); 8];
        assert!(is_decomposable(&m, &two).is_err());
    }

    #[test]
    fn refinement_and_sharing() {
        let a = sys(8, &[&[1, 8], &[2, 7], &[3, 6], &[4, 5]]);
        let b = sys(8, &[&[1, 4, 6, 7], &[2, 3, 5, 8]]);
        let full = RandomisationSystem::full(8).unwrap();
        assert!(refines(&a, &a).unwrap());
        assert!(!refines(&a, &b).unwrap());
        assert!(!refines(&b, &a).unwrap());
        assert!(refines(&a, &full).unwrap());
        assert!(refines(&b, &full).unwrap());
        assert!(!refines(&full, &a).unwrap());
        assert!(shared_blocks(&a, &b).unwrap().is_empty());
        assert_eq!(shared_blocks(&a, &a).unwrap(), a.blocks().to_vec());
        let other = RandomisationSystem::full(4).unwrap();
        assert!(refines(&a, &other).is_err());
        assert!(shared_blocks(&a, &other).is_err());
    }

    #[test]
    fn shape_order_and_parse() {
        let mut shapes: Vec<Shape> = ["4+4+3+2+2", "5+5+5", "3+3+3+2+2+2", "5+2+2+2+2+2", "5+5+3+2"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        shapes.sort();
        let got: Vec<String> = shapes.iter().map(ToString::to_string).collect();
        assert_eq!(got, ["5+5+5", "5+5+3+2", "5+2+2+2+2+2", "4+4+3+2+2", "3+3+3+2+2+2"]);
    }

    #[test]
    fn intercept_only_model() {
        let m = to_contrast_form(&DesignModel::unlabelled(IntMatrix::from_i64_rows(&[[1], [1], [1]]))).unwrap();
        let cat = enumerate_circuit_randomisations(&m, EnumerateOptions::default());
        assert!(cat.is_empty());
        let cat = enumerate_circuit_randomisations(&m, EnumerateOptions { include_full: true, ..Default::default() });
        assert_eq!(cat.len(), 1);
        assert!(is_valid_randomisation(&m, &sys(3, &[&[1, 2, 3]])).unwrap());
    }
}
