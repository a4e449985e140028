//! Brute-force reference implementations. Each one applies a definition
//! directly and shares no code with the library.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rows = Vec<Vec<i64>>;

fn q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Row echelon over the rationals; returns the rank.
pub fn rank_rational(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &m[r][c];
            for k in c..cols {
                let d = &f * &m[r][k];
                m[i][k] -= d;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

pub fn rank_of_columns(a: &Rows, cols: &[usize]) -> usize {
    rank_rational(a.iter().map(|row| cols.iter().map(|&c| q(row[c])).collect()).collect())
}

/// Laplace expansion along the first row.
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(k, _)| k != c).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = &m[0][c] * det(&minor);
        if c % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Circuits as minimal linearly dependent column sets, with entries from
/// signed maximal minors (Cramer's rule), made primitive and sign-normalised.
pub fn circuits(a: &Rows, n_cols: usize) -> BTreeSet<Vec<BigInt>> {
    assert!(n_cols < 24);
    let mut out = BTreeSet::new();
    for mask in 1u64..(1 << n_cols) {
        let s = bits(mask);
        let k = s.len();
        if rank_of_columns(a, &s) != k - 1 {
            continue;
        }
        let minimal = (0..k).all(|i| {
            let sub: Vec<usize> = s.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &c)| c).collect();
            rank_of_columns(a, &sub) == k - 1
        });
        if !minimal {
            continue;
        }
        // k-1 independent rows of A restricted to S
        let mut chosen: Vec<usize> = Vec::new();
        for r in 0..a.len() {
            let mut trial = chosen.clone();
            trial.push(r);
            let sub: Vec<Vec<BigRational>> = trial.iter().map(|&i| s.iter().map(|&c| q(a[i][c])).collect()).collect();
            if rank_rational(sub) == trial.len() {
                chosen = trial;
            }
        }
        assert_eq!(chosen.len(), k - 1);
        let mut v = vec![BigInt::zero(); n_cols];
        for (idx, &col) in s.iter().enumerate() {
            let minor: Vec<Vec<BigInt>> = chosen
                .iter()
                .map(|&r| s.iter().filter(|&&c| c != col).map(|&c| BigInt::from(a[r][c])).collect())
                .collect();
            let d = det(&minor);
            v[col] = if idx % 2 == 0 { d } else { -d };
        }
        let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        for x in &mut v {
            *x /= &g;
        }
        if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            for x in &mut v {
                *x = -x.clone();
            }
        }
        out.insert(v);
    }
    out
}

/// Supports (bitmasks over runs, size >= 2) of 0/1 vectors orthogonal to
/// every row of `x1t`.
pub fn binary_kernel_supports(x1t: &Rows, n: usize) -> Vec<u64> {
    assert!(n < 26);
    (1u64..(1 << n))
        .filter(|m| m.count_ones() >= 2)
        .filter(|&m| x1t.iter().all(|row| bits(m).iter().map(|&i| row[i]).sum::<i64>() == 0))
        .collect()
}

/// Those supports with no strictly smaller support inside them.
pub fn minimal_supports(supports: &[u64]) -> Vec<u64> {
    supports
        .iter()
        .copied()
        .filter(|&s| !supports.iter().any(|&t| t != s && t & s == t))
        .collect()
}

/// All partitions of `0..n` into blocks from `blocks`; each partition is a
/// sorted list of sorted 1-based blocks.
pub fn partitions(n: usize, blocks: &[u64]) -> BTreeSet<Vec<Vec<usize>>> {
    fn go(rest: u64, blocks: &[u64], acc: &mut Vec<u64>, out: &mut BTreeSet<Vec<Vec<usize>>>) {
        if rest == 0 {
            let mut p: Vec<Vec<usize>> = acc.iter().map(|&b| bits(b).iter().map(|i| i + 1).collect()).collect();
            p.sort();
            out.insert(p);
            return;
        }
        let low = rest & rest.wrapping_neg();
        for &b in blocks {
            if b & low != 0 && b & !rest == 0 {
                acc.push(b);
                go(rest & !b, blocks, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    go(all, blocks, &mut Vec::new(), &mut out);
    out
}

/// Solves `a x = b` by Gauss-Jordan; `None` if `a` is singular.
pub fn solve(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        let inv = BigRational::one() / &a[c][c];
        for k in 0..n {
            a[c][k] = &a[c][k] * &inv;
        }
        b[c] = &b[c] * &inv;
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..n {
                    let d = &f * &a[c][k];
                    a[i][k] -= d;
                }
                let d = &f * &b[c];
                b[i] -= d;
            }
        }
    }
    Some(b)
}

/// Least-squares coefficients of `y` on the columns of `w` (given as rows of
/// the design), through the normal equations.
pub fn least_squares(w: &[Vec<BigRational>], y: &[BigRational]) -> Option<Vec<BigRational>> {
    let p = w.first().map_or(0, Vec::len);
    let mut g = vec![vec![BigRational::zero(); p]; p];
    let mut rhs = vec![BigRational::zero(); p];
    for (row, yi) in w.iter().zip(y) {
        for i in 0..p {
            rhs[i] += &row[i] * yi;
            for j in 0..p {
                g[i][j] += &row[i] * &row[j];
            }
        }
    }
    solve(g, rhs)
}

/// Contrast coefficients of `y` under `E y = theta0 j + X1 phi`.
pub fn contrast_lse(x1: &Rows, y: &[BigRational]) -> Vec<BigRational> {
    let w: Vec<Vec<BigRational>> = x1
        .iter()
        .map(|row| std::iter::once(q(1)).chain(row.iter().map(|&v| q(v))).collect())
        .collect();
    let mut beta = least_squares(&w, y).expect("[j : X1] has full column rank");
    beta.remove(0);
    beta
}
