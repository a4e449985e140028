mod common;

use circuitrand::analysis_sim::{
    block_shift_invariance, covariance_details, lse_contrast_estimates, naive_block_bias, simulate_ab, AbParams,
    CovarianceOrdering,
};
use circuitrand::design_catalog::{anova_two_way, choice_k_of_2k, factorial_two_level};
use circuitrand::randomisation::indicator;
use circuitrand::{enumerate_circuit_randomisations, to_contrast_form, EnumerateOptions, IntMatrix};
use common::{oracle, rows};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(BigInt::from(rng.random_range(-50..=50)), BigInt::from(rng.random_range(1..=9)))
}

#[test]
fn estimates_match_normal_equations_and_ignore_valid_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for d in [factorial_two_level(3).unwrap(), anova_two_way(3, 3).unwrap(), choice_k_of_2k(2).unwrap()] {
        let m = to_contrast_form(&d).unwrap();
        let x1 = rows(m.x1());
        let cat = enumerate_circuit_randomisations(&m, EnumerateOptions::default());
        for _ in 0..20 {
            let y: Vec<BigRational> = (0..m.n_runs()).map(|_| random_rational(&mut rng)).collect();
            assert_eq!(lse_contrast_estimates(&m, &y).unwrap(), oracle::contrast_lse(&x1, &y));
            for s in cat.systems() {
                let gamma: Vec<BigRational> = s.blocks().iter().map(|_| random_rational(&mut rng)).collect();
                assert!(block_shift_invariance(&m, s, &y, &gamma).unwrap());
            }
        }
    }
}

#[test]
fn naive_bias_is_estimate_of_block_shift() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let m = to_contrast_form(&factorial_two_level(3).unwrap()).unwrap();
    let x1 = rows(m.x1());
    for _ in 0..30 {
        let k = rng.random_range(1..=3);
        let cols: Vec<Vec<BigInt>> = (0..k)
            .map(|_| {
                let b: Vec<usize> = (0..8).filter(|_| rng.random_bool(0.5)).collect();
                indicator(8, &b)
            })
            .collect();
        let z = IntMatrix::from_columns(8, &cols).unwrap();
        let gamma: Vec<BigRational> = (0..k).map(|_| random_rational(&mut rng)).collect();
        let shift: Vec<BigRational> = (0..8)
            .map(|i| {
                (0..k).fold(BigRational::zero(), |acc, c| acc + BigRational::from_integer(z.get(i, c).clone()) * &gamma[c])
            })
            .collect();
        assert_eq!(naive_block_bias(&m, &z, &gamma).unwrap(), oracle::contrast_lse(&x1, &shift));
    }
}

#[test]
fn blocked_covariance_matches_direct_inverse() {
    // blocks {1,2} and {3,5}: contrasts stay estimable, so the covariance of
    // the fit with block columns can be read off (W^T W)^{-1} directly
    let m = to_contrast_form(&factorial_two_level(3).unwrap()).unwrap();
    let z = IntMatrix::from_columns(8, &[indicator(8, &[0, 1]), indicator(8, &[2, 4])]).unwrap();
    let d = covariance_details(&m, &z).unwrap();
    assert_eq!(d.ordering, CovarianceOrdering::ProperDominates);
    let x1 = rows(m.x1());
    let zr = rows(&z);
    let q = |v: i64| BigRational::from_integer(v.into());
    let w: Vec<Vec<BigRational>> = (0..8)
        .map(|i| std::iter::once(q(1)).chain(x1[i].iter().map(|&v| q(v))).chain(zr[i].iter().map(|&v| q(v))).collect())
        .collect();
    let p = w[0].len();
    let gram: Vec<Vec<BigRational>> = (0..p)
        .map(|a| (0..p).map(|b| w.iter().fold(q(0), |s, r| s + &r[a] * &r[b])).collect())
        .collect();
    let pc = d.proper_covariance.unwrap();
    for c in 0..3 {
        let mut e = vec![q(0); p];
        e[c + 1] = q(1);
        let col = oracle::solve(gram.clone(), e).unwrap();
        for r in 0..3 {
            assert_eq!(pc.get(r, c), &col[r + 1]);
        }
    }
}

#[test]
fn simulation_is_seeded_and_thread_independent() {
    let p = AbParams { n1: 6, n2: 9, theta: (2.0, -1.0), confounder_sd: 1.5, replications: 300, seed: 42 };
    let one = circuitrand::par::with_threads(1, || simulate_ab(&p).unwrap());
    let many = circuitrand::par::with_threads(4, || simulate_ab(&p).unwrap());
    assert_eq!(one, many);
    assert!((one.mean - 3.0).abs() < 6.0 * one.std_error);
    let exact = simulate_ab(&AbParams { confounder_sd: 0.0, ..p.clone() }).unwrap();
    assert_eq!((exact.min, exact.max, exact.std_error), (3.0, 3.0, 0.0));
}
