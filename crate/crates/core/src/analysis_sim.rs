//! Least-squares consequences of blocking, computed exactly, plus a seeded
//! Monte Carlo illustration of a randomised two-arm experiment.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::contrast::ContrastModel;
use crate::error::{Error, Result};
use crate::exact_linalg::{rank, rational_solve, IntMatrix, RationalMatrix};
use crate::par;
use crate::randomisation::RandomisationSystem;

fn int_to_rat(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

fn check_len(what: &'static str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::DimensionMismatch {
            what,
            left: got,
            right: want,
        });
    }
    Ok(())
}

/// Responses generated from known contrast-form parameters and block offsets:
/// `y = [j : X1] * theta + Z * block_effects`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentOutcome {
    pub y: Vec<BigRational>,
    pub true_theta: Vec<BigRational>,
    pub block_effects: Vec<BigRational>,
}

impl ExperimentOutcome {
    pub fn generate(
        m: &ContrastModel,
        theta: Vec<BigRational>,
        z: &IntMatrix,
        block_effects: Vec<BigRational>,
    ) -> Result<Self> {
        check_len("theta vs [j : X1] columns", theta.len(), m.q() + 1)?;
        let mean = m
            .x_tilde()
            .to_rational()
            .mul(&RationalMatrix::column_vector(&theta))?;
        let shift = block_shift(z, &block_effects, m.n_runs())?;
        let y = mean.column(0).into_iter().zip(shift).map(|(a, b)| a + b).collect();
        Ok(Self {
            y,
            true_theta: theta,
            block_effects,
        })
    }
}

/// `Z * gamma`.
fn block_shift(z: &IntMatrix, gamma: &[BigRational], n: usize) -> Result<Vec<BigRational>> {
    check_len("block indicator rows vs runs", z.n_rows(), n)?;
    check_len("block effects vs blocks", gamma.len(), z.n_cols())?;
    Ok((0..n)
        .map(|i| {
            z.row(i)
                .iter()
                .zip(gamma)
                .filter(|(zi, _)| !zi.is_zero())
                .map(|(zi, g)| int_to_rat(zi) * g)
                .sum()
        })
        .collect())
}

fn x1_columns_orthogonal(x1: &IntMatrix) -> bool {
    let cols = x1.columns();
    (0..cols.len()).all(|a| {
        (a + 1..cols.len()).all(|b| crate::exact_linalg::dot(&cols[a], &cols[b]).is_zero())
    })
}

/// Exact least-squares estimate of all contrast-form parameters, intercept first.
pub fn lse_estimates(m: &ContrastModel, y: &[BigRational]) -> Result<Vec<BigRational>> {
    let n = m.n_runs();
    check_len("response length vs runs", y.len(), n)?;
    let x1 = m.x1();
    let mean = y.iter().sum::<BigRational>() / BigRational::from_integer(BigInt::from(n));
    let mut out = vec![mean];
    if x1_columns_orthogonal(x1) {
        for c in 0..x1.n_cols() {
            let col = x1.column(c);
            let num: BigRational = col.iter().zip(y).map(|(a, b)| int_to_rat(a) * b).sum();
            let den: BigInt = col.iter().map(|a| a * a).sum();
            out.push(num / int_to_rat(&den));
        }
        return Ok(out);
    }
    let xt = m.x_tilde().to_rational();
    let xt_t = xt.transpose();
    let sol = rational_solve(&xt_t.mul(&xt)?, &xt_t.mul(&RationalMatrix::column_vector(y))?)?;
    Ok(sol.column(0))
}

/// Exact least-squares estimates of the contrast parameters only.
pub fn lse_contrast_estimates(m: &ContrastModel, y: &[BigRational]) -> Result<Vec<BigRational>> {
    let mut all = lse_estimates(m, y)?;
    all.remove(0);
    Ok(all)
}

/// Whether shifting `y` by `Z * gamma` leaves the contrast estimates unchanged.
pub fn shift_invariant(
    m: &ContrastModel,
    z: &IntMatrix,
    y: &[BigRational],
    gamma: &[BigRational],
) -> Result<bool> {
    let shift = block_shift(z, gamma, m.n_runs())?;
    let shifted: Vec<BigRational> = y.iter().zip(&shift).map(|(a, b)| a + b).collect();
    Ok(lse_contrast_estimates(m, y)? == lse_contrast_estimates(m, &shifted)?)
}

/// [`shift_invariant`] for the blocks of a system. The comparison is computed
/// for any system; it is guaranteed to hold when the system is valid.
pub fn block_shift_invariance(
    m: &ContrastModel,
    r: &RandomisationSystem,
    y: &[BigRational],
    gamma: &[BigRational],
) -> Result<bool> {
    check_len("system runs vs model runs", r.n_runs(), m.n_runs())?;
    shift_invariant(m, &r.indicator_matrix(), y, gamma)
}

/// Contrast rows of `(X~^T X~)^-1 X~^T Z gamma`: the bias of the estimate that
/// ignores block effects.
pub fn naive_block_bias(m: &ContrastModel, z: &IntMatrix, gamma: &[BigRational]) -> Result<Vec<BigRational>> {
    let shift = block_shift(z, gamma, m.n_runs())?;
    lse_contrast_estimates(m, &shift)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceOrdering {
    Equal,
    ProperDominates,
    Incomparable,
}

impl std::fmt::Display for CovarianceOrdering {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Equal => "equal",
            Self::ProperDominates => "proper_dominates",
            Self::Incomparable => "incomparable",
        })
    }
}

/// Exact positive-semidefiniteness test for a symmetric rational matrix by
/// symmetric elimination on positive diagonal pivots.
pub fn is_positive_semidefinite(d: &RationalMatrix) -> bool {
    let n = d.n_rows();
    let mut a: Vec<Vec<BigRational>> = (0..n).map(|r| d.row(r).to_vec()).collect();
    let mut live: Vec<usize> = (0..n).collect();
    while !live.is_empty() {
        if live.iter().any(|&i| a[i][i].is_negative()) {
            return false;
        }
        let Some(pos) = live.iter().position(|&i| a[i][i].is_positive()) else {
            return live.iter().all(|&i| live.iter().all(|&j| a[i][j].is_zero()));
        };
        let p = live.remove(pos);
        let pivot = a[p][p].clone();
        for &i in &live {
            for &j in &live {
                let delta = &a[i][p] * &a[p][j] / &pivot;
                a[i][j] -= delta;
            }
        }
    }
    true
}

/// Information matrix of the contrast coefficients once the columns of
/// `nuisance` are fitted alongside them: `X1^T (I - P_N) X1`.
fn contrast_information(x1: &IntMatrix, nuisance: &IntMatrix) -> Result<RationalMatrix> {
    let x = x1.to_rational();
    let nr = nuisance.to_rational();
    let xtx = x.transpose().mul(&x)?;
    let ntx = nr.transpose().mul(&x)?;
    let ntn = nr.transpose().mul(&nr)?;
    let solved = rational_solve(&ntn, &ntx)?;
    xtx.sub(&ntx.transpose().mul(&solved)?)
}

/// Covariances and information matrices (unit error variance) of the contrast
/// coefficients, fitted without and with block parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovarianceDetails {
    pub naive_information: RationalMatrix,
    pub proper_information: RationalMatrix,
    pub naive_covariance: RationalMatrix,
    /// `None` when some contrast is aliased with the blocks, i.e. its
    /// variance under the blocked fit is unbounded.
    pub proper_covariance: Option<RationalMatrix>,
    pub ordering: CovarianceOrdering,
}

fn ordering_of(diff: &RationalMatrix) -> CovarianceOrdering {
    if diff.is_zero() {
        CovarianceOrdering::Equal
    } else if is_positive_semidefinite(diff) {
        CovarianceOrdering::ProperDominates
    } else {
        CovarianceOrdering::Incomparable
    }
}

/// Compares the contrast covariance of the least-squares fit that includes
/// block parameters with the fit that ignores them.
///
/// The comparison is made on information matrices, which always exist; the
/// Loewner order on covariances is the reverse of it whenever both are
/// invertible, and a singular blocked information matrix means some contrast
/// is confounded with blocks, which counts as the blocked fit dominating.
pub fn covariance_details(m: &ContrastModel, z: &IntMatrix) -> Result<CovarianceDetails> {
    check_len("block indicator rows vs runs", z.n_rows(), m.n_runs())?;
    let n = m.n_runs();
    let x1 = m.x1();
    let ones = IntMatrix::from_columns(n, &[vec![BigInt::from(1); n]])?;
    if rank(&ones.hstack(x1)?) != x1.n_cols() + 1 {
        return Err(Error::RankDeficient);
    }
    let mut nuisance = ones.clone();
    for c in 0..z.n_cols() {
        let candidate = nuisance.hstack(&IntMatrix::from_columns(n, &[z.column(c)])?)?;
        if rank(&candidate) == candidate.n_cols() {
            nuisance = candidate;
        }
    }
    let naive_information = contrast_information(x1, &ones)?;
    let proper_information = contrast_information(x1, &nuisance)?;
    let q = x1.n_cols();
    let ident = RationalMatrix::identity(q);
    let naive_covariance = rational_solve(&naive_information, &ident).map_err(|e| match e {
        Error::Singular => Error::RankDeficient,
        other => other,
    })?;
    let proper_covariance = match rational_solve(&proper_information, &ident) {
        Ok(c) => Some(c),
        Err(Error::Singular) => None,
        Err(e) => return Err(e),
    };
    let ordering = ordering_of(&naive_information.sub(&proper_information)?);
    if let Some(pc) = &proper_covariance {
        debug_assert_eq!(ordering_of(&pc.sub(&naive_covariance)?), ordering);
    }
    Ok(CovarianceDetails {
        naive_information,
        proper_information,
        naive_covariance,
        proper_covariance,
        ordering,
    })
}

pub fn covariance_comparison(m: &ContrastModel, z: &IntMatrix) -> Result<CovarianceOrdering> {
    Ok(covariance_details(m, z)?.ordering)
}

/// Everything reported for one (model, blocks, response) analysis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EstimateReport {
    pub phi_hat: Vec<BigRational>,
    pub bias: Vec<BigRational>,
    pub invariant: bool,
    pub covariance_ordering: CovarianceOrdering,
    /// Some contrast cannot be separated from the block effects.
    pub confounded: bool,
}

pub fn analyse(
    m: &ContrastModel,
    z: &IntMatrix,
    y: &[BigRational],
    gamma: &[BigRational],
) -> Result<EstimateReport> {
    let cov = covariance_details(m, z)?;
    Ok(EstimateReport {
        phi_hat: lse_contrast_estimates(m, y)?,
        bias: naive_block_bias(m, z, gamma)?,
        invariant: shift_invariant(m, z, y, gamma)?,
        covariance_ordering: cov.ordering,
        confounded: cov.proper_covariance.is_none(),
    })
}

/// Inputs for the randomised two-arm simulation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbParams {
    pub n1: usize,
    pub n2: usize,
    pub theta: (f64, f64),
    pub confounder_sd: f64,
    pub replications: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbSummary {
    pub params: AbParams,
    pub mean: f64,
    pub std_error: f64,
    pub min: f64,
    pub max: f64,
}

/// One replication: every unit carries a hidden confounder drawn from
/// `N(0, sd^2)`; a uniformly random `n1` of them get treatment A. Returns the
/// difference of group means.
fn ab_replication(p: &AbParams, rep: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    rng.set_stream(rep as u64);
    let n = p.n1 + p.n2;
    let confounder: Vec<f64> = (0..n)
        .map(|_| p.confounder_sd * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let mut units: Vec<usize> = (0..n).collect();
    units.shuffle(&mut rng);
    let (a, b) = units.split_at(p.n1);
    let mean = |idx: &[usize]| idx.iter().map(|&i| confounder[i]).sum::<f64>() / idx.len() as f64;
    (p.theta.0 - p.theta.1) + (mean(a) - mean(b))
}

/// Monte Carlo mean and standard error of the difference-of-means estimate.
/// Replication `r` uses stream `r` of a ChaCha generator keyed by `seed`, so
/// the result does not depend on thread count.
pub fn simulate_ab(p: &AbParams) -> Result<AbSummary> {
    if p.n1 == 0 || p.n2 == 0 {
        return Err(Error::InvalidArgument("both arms need at least one unit".into()));
    }
    if p.replications == 0 {
        return Err(Error::InvalidArgument("replications must be at least 1".into()));
    }
    if !(p.confounder_sd.is_finite() && p.confounder_sd >= 0.0) {
        return Err(Error::InvalidArgument("confounder sd must be finite and >= 0".into()));
    }
    let estimates = par::map_range(p.replications, |r| ab_replication(p, r));
    let reps = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / reps;
    let var = if estimates.len() > 1 {
        estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (reps - 1.0)
    } else {
        0.0
    };
    Ok(AbSummary {
        params: p.clone(),
        mean,
        std_error: (var / reps).sqrt(),
        min: estimates.iter().copied().fold(f64::INFINITY, f64::min),
        max: estimates.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}
