//! Circuit bases of integer matrices.
//!
//! A circuit of `A` is a primitive integer vector in `ker(A)` whose support is
//! minimal among nonzero kernel vectors. Circuits are found by walking column
//! subsets in order of increasing size: a subset `S` carries a circuit exactly
//! when `A` restricted to `S` has a one-dimensional kernel whose generator uses
//! every column of `S`. Subsets containing an already-found circuit support are
//! skipped, and no circuit is larger than `rank(A) + 1`.

use std::cmp::Ordering;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_linalg::{kernel_basis, rank, IntMatrix};
use crate::par;

/// Largest column count the support bitmasks can index.
pub const MAX_COLUMNS: usize = 128;

/// A circuit stored with its support split by sign. Vectors produced by
/// [`circuit_basis`] are primitive with a positive first nonzero entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Circuit {
    #[serde(serialize_with = "serialize_bigints")]
    vector: Vec<BigInt>,
    support: Vec<usize>,
    positive_support: Vec<usize>,
    negative_support: Vec<usize>,
}

fn serialize_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

impl Circuit {
    fn from_vector(vector: Vec<BigInt>) -> Self {
        let mut support = Vec::new();
        let mut positive_support = Vec::new();
        let mut negative_support = Vec::new();
        for (i, x) in vector.iter().enumerate() {
            if x.is_positive() {
                support.push(i);
                positive_support.push(i);
            } else if x.is_negative() {
                support.push(i);
                negative_support.push(i);
            }
        }
        Self {
            vector,
            support,
            positive_support,
            negative_support,
        }
    }

    pub fn vector(&self) -> &[BigInt] {
        &self.vector
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn positive_support(&self) -> &[usize] {
        &self.positive_support
    }

    pub fn negative_support(&self) -> &[usize] {
        &self.negative_support
    }

    pub fn len(&self) -> usize {
        self.vector.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vector.is_empty()
    }

    pub fn support_mask(&self) -> u128 {
        mask_of(&self.support)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.negative_support.is_empty()
    }

    /// Nonnegative with every entry in {0, 1}.
    pub fn is_binary(&self) -> bool {
        self.is_nonnegative() && self.vector.iter().all(|x| x.is_zero() || x.is_one())
    }

    /// Every entry in {-1, 0, 1}.
    pub fn is_signed_binary(&self) -> bool {
        self.vector.iter().all(|x| x.abs() <= BigInt::one())
    }

    pub fn negated(&self) -> Circuit {
        Circuit::from_vector(self.vector.iter().map(|x| -x).collect())
    }

    /// Whether `self` is conformal with `v`: same-signed and supported inside it.
    pub fn is_conformal_with(&self, v: &[BigRational]) -> bool {
        self.positive_support.iter().all(|&i| v[i].is_positive())
            && self.negative_support.iter().all(|&i| v[i].is_negative())
    }
}

/// Support indicator first (lexicographic, absent before present), then the
/// vector itself. For 0/1 circuits this is plain lexicographic order.
impl Ord for Circuit {
    fn cmp(&self, other: &Self) -> Ordering {
        let indicator = |c: &Circuit| c.vector.iter().map(|x| !x.is_zero()).collect::<Vec<_>>();
        indicator(self)
            .cmp(&indicator(other))
            .then_with(|| self.vector.cmp(&other.vector))
    }
}

impl PartialOrd for Circuit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) fn mask_of(indices: &[usize]) -> u128 {
    indices.iter().fold(0u128, |m, &i| m | (1u128 << i))
}

/// The circuits of a matrix in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitBasis {
    matrix: IntMatrix,
    circuits: Vec<Circuit>,
}

impl CircuitBasis {
    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn circuits(&self) -> &[Circuit] {
        &self.circuits
    }

    pub fn len(&self) -> usize {
        self.circuits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circuits.is_empty()
    }
}

/// Circuit generator for one column subset, zero-extended to `n` entries.
fn circuit_on(a: &IntMatrix, subset: &[usize]) -> Option<Vec<BigInt>> {
    let sub = a.select_columns(subset);
    let mut kernel = kernel_basis(&sub);
    if kernel.len() != 1 {
        return None;
    }
    let generator = kernel.pop()?;
    if generator.iter().any(Zero::is_zero) {
        return None;
    }
    let mut v = vec![BigInt::zero(); a.n_cols()];
    for (&c, x) in subset.iter().zip(generator) {
        v[c] = x;
    }
    Some(v)
}

/// Computes every circuit of `a`.
///
/// # Panics
/// If `a` has more than [`MAX_COLUMNS`] columns.
pub fn circuit_basis(a: &IntMatrix) -> CircuitBasis {
    let n = a.n_cols();
    assert!(n <= MAX_COLUMNS, "circuit_basis supports at most {MAX_COLUMNS} columns");
    let max_size = (rank(a) + 1).min(n);
    let mut found: Vec<u128> = Vec::new();
    let mut circuits: Vec<Circuit> = Vec::new();
    for size in 1..=max_size {
        let candidates: Vec<Vec<usize>> = (0..n)
            .combinations(size)
            .filter(|s| {
                let m = mask_of(s);
                !found.iter().any(|&f| f & !m == 0)
            })
            .collect();
        let level: Vec<Circuit> = par::map(&candidates, |s| circuit_on(a, s))
            .into_iter()
            .flatten()
            .map(Circuit::from_vector)
            .collect();
        found.extend(level.iter().map(Circuit::support_mask));
        circuits.extend(level);
    }
    circuits.sort();
    CircuitBasis {
        matrix: a.clone(),
        circuits,
    }
}

/// Circuits with all entries nonnegative.
pub fn nonnegative_circuits(b: &CircuitBasis) -> Vec<Circuit> {
    // canonical sign makes a one-signed circuit nonnegative already
    b.circuits.iter().filter(|c| c.is_nonnegative()).cloned().collect()
}

/// Nonnegative circuits with all entries in {0, 1}.
pub fn binary_circuits(b: &CircuitBasis) -> Vec<Circuit> {
    b.circuits.iter().filter(|c| c.is_binary()).cloned().collect()
}

/// One term of a conformal decomposition; the circuit is oriented to agree in
/// sign with the decomposed vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalTerm {
    pub weight: BigRational,
    pub circuit: Circuit,
}

/// Writes `v` as a positive rational combination of circuits conformal with
/// it, using at most `n - rank(A)` terms.
///
/// Greedy conformal reduction produces a valid combination; any linear
/// dependency among the chosen circuits is then cancelled against the weights
/// until the circuits are independent.
pub fn conformal_decompose(v: &[BigInt], b: &CircuitBasis) -> Result<Vec<ConformalTerm>> {
    let a = &b.matrix;
    if v.len() != a.n_cols() {
        return Err(Error::DimensionMismatch {
            what: "vector length vs matrix columns",
            left: v.len(),
            right: a.n_cols(),
        });
    }
    if !a.mul_vec(v)?.iter().all(Zero::is_zero) {
        return Err(Error::NotInKernel);
    }

    let mut rem: Vec<BigRational> = v.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    let mut terms: Vec<ConformalTerm> = Vec::new();
    while rem.iter().any(|x| !x.is_zero()) {
        let oriented = b
            .circuits
            .iter()
            .flat_map(|c| [c.clone(), c.negated()])
            .find(|c| c.is_conformal_with(&rem))
            .expect("a nonzero kernel vector always has a conformal circuit");
        let weight = oriented
            .support
            .iter()
            .map(|&i| &rem[i] / BigRational::from_integer(oriented.vector[i].clone()))
            .min()
            .expect("circuits have nonempty support");
        for &i in &oriented.support {
            rem[i] -= &weight * BigRational::from_integer(oriented.vector[i].clone());
        }
        terms.push(ConformalTerm {
            weight,
            circuit: oriented,
        });
    }

    loop {
        let cols: Vec<Vec<BigInt>> = terms.iter().map(|t| t.circuit.vector.clone()).collect();
        let m = IntMatrix::from_columns(v.len(), &cols)?;
        let Some(mut mu) = kernel_basis(&m).into_iter().next() else {
            break;
        };
        if !mu.iter().any(Signed::is_positive) {
            mu.iter_mut().for_each(|x| *x = -&*x);
        }
        let step = terms
            .iter()
            .zip(&mu)
            .filter(|(_, m)| m.is_positive())
            .map(|(t, m)| &t.weight / BigRational::from_integer(m.clone()))
            .min()
            .expect("mu has a positive entry");
        for (t, m) in terms.iter_mut().zip(&mu) {
            t.weight -= &step * BigRational::from_integer(m.clone());
        }
        terms.retain(|t| !t.weight.is_zero());
    }
    Ok(terms)
}
