//! Rewriting a design matrix in contrast form `[j : X1]`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_linalg::{make_primitive, rank, rational_solve, IntMatrix, RationalMatrix};

/// A design: the model matrix `x` (runs x parameters) with labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignModel {
    x: IntMatrix,
    run_labels: Vec<String>,
    param_labels: Vec<String>,
}

impl DesignModel {
    pub fn new(x: IntMatrix, run_labels: Vec<String>, param_labels: Vec<String>) -> Result<Self> {
        if run_labels.len() != x.n_rows() {
            return Err(Error::DimensionMismatch {
                what: "run labels vs design rows",
                left: run_labels.len(),
                right: x.n_rows(),
            });
        }
        if param_labels.len() != x.n_cols() {
            return Err(Error::DimensionMismatch {
                what: "parameter labels vs design columns",
                left: param_labels.len(),
                right: x.n_cols(),
            });
        }
        Ok(Self {
            x,
            run_labels,
            param_labels,
        })
    }

    /// Design with labels `1..n` for runs and `p1..pk` for parameters.
    pub fn unlabelled(x: IntMatrix) -> Self {
        let run_labels = (1..=x.n_rows()).map(|i| i.to_string()).collect();
        let param_labels = (1..=x.n_cols()).map(|i| format!("p{i}")).collect();
        Self {
            x,
            run_labels,
            param_labels,
        }
    }

    pub fn x(&self) -> &IntMatrix {
        &self.x
    }

    pub fn n_runs(&self) -> usize {
        self.x.n_rows()
    }

    pub fn run_labels(&self) -> &[String] {
        &self.run_labels
    }

    pub fn param_labels(&self) -> &[String] {
        &self.param_labels
    }
}

/// A design in contrast form. `x1` holds the contrast columns (each sums to
/// zero) and `reparam` maps the original parameters onto `[j : x1]`:
/// `[j : x1] * reparam == source.x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContrastModel {
    n_runs: usize,
    x1: IntMatrix,
    reparam: RationalMatrix,
    source: DesignModel,
}

impl ContrastModel {
    pub fn n_runs(&self) -> usize {
        self.n_runs
    }

    /// Contrast columns, `n_runs x q`.
    pub fn x1(&self) -> &IntMatrix {
        &self.x1
    }

    /// Number of contrast columns.
    pub fn q(&self) -> usize {
        self.x1.n_cols()
    }

    pub fn reparam(&self) -> &RationalMatrix {
        &self.reparam
    }

    pub fn source(&self) -> &DesignModel {
        &self.source
    }

    /// `[j : x1]`.
    pub fn x_tilde(&self) -> IntMatrix {
        ones_column(self.n_runs)
            .hstack(&self.x1)
            .expect("x1 has n_runs rows")
    }

    /// Re-checks every structural invariant exactly.
    pub fn verify(&self) -> bool {
        let x = self.source.x();
        let x1_sums_zero = (0..self.q()).all(|c| self.x1.column(c).iter().sum::<BigInt>().is_zero());
        let xt = self.x_tilde();
        let same_space = {
            let r = rank(x);
            rank(&xt) == r && rank(&xt.hstack(x).expect("same rows")) == r
        };
        let identity = xt
            .to_rational()
            .mul(&self.reparam)
            .is_ok_and(|p| p == x.to_rational());
        x1_sums_zero && same_space && identity && rank(&self.x1) == self.q()
    }
}

fn ones_column(n: usize) -> IntMatrix {
    IntMatrix::new(n, 1, vec![BigInt::one(); n]).expect("n entries")
}

/// Transforms `d` to contrast form.
///
/// Each column `c` becomes `n*c - (sum c)*j`, reduced by its gcd; a maximal
/// independent subset is then kept greedily left to right.
pub fn to_contrast_form(d: &DesignModel) -> Result<ContrastModel> {
    let x = d.x();
    let n = x.n_rows();
    let rank_x = rank(x);
    let j = ones_column(n);
    if rank(&x.hstack(&j)?) != rank_x {
        return Err(Error::JNotInColumnSpace);
    }

    let n_big = BigInt::from(n);
    let mut kept: Vec<Vec<BigInt>> = Vec::new();
    for c in 0..x.n_cols() {
        let col = x.column(c);
        let total: BigInt = col.iter().sum();
        let mut centred: Vec<BigInt> = col.iter().map(|v| &n_big * v - &total).collect();
        if centred.iter().all(Zero::is_zero) {
            continue;
        }
        make_primitive(&mut centred);
        kept.push(centred);
        let candidate = IntMatrix::from_columns(n, &kept)?;
        if rank(&candidate) < kept.len() {
            kept.pop();
        }
    }
    debug_assert_eq!(kept.len() + 1, rank_x);
    let x1 = IntMatrix::from_columns(n, &kept)?;

    let xt = j.hstack(&x1)?.to_rational();
    let xt_t = xt.transpose();
    let gram = xt_t.mul(&xt)?;
    let reparam = rational_solve(&gram, &xt_t.mul(&x.to_rational())?)?;

    Ok(ContrastModel {
        n_runs: n,
        x1,
        reparam,
        source: d.clone(),
    })
}

/// A coefficient vector is an empirical contrast when its entries sum to zero.
pub fn empirical_contrast_check(c: &[BigInt]) -> bool {
    c.iter().sum::<BigInt>().is_zero()
}
