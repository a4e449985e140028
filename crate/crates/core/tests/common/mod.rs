#![allow(dead_code)]

pub mod oracle;

use circuitrand::IntMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rows(m: &IntMatrix) -> oracle::Rows {
    m.rows()
        .map(|r| r.iter().map(|x| i64::try_from(x).expect("small entry")).collect())
        .collect()
}

/// A balanced digraph on at most `max_v` vertices with at most `max_e`
/// edges, built as a union of random directed cycles.
pub fn random_balanced_digraph(rng: &mut ChaCha8Rng, max_v: usize, max_e: usize) -> (usize, Vec<(usize, usize)>) {
    let n = rng.random_range(2..=max_v);
    let mut edges = Vec::new();
    loop {
        let len = rng.random_range(2..=n);
        if edges.len() + len > max_e {
            break;
        }
        let mut verts: Vec<usize> = (0..n).collect();
        for i in 0..len {
            let j = rng.random_range(i..n);
            verts.swap(i, j);
        }
        for i in 0..len {
            edges.push((verts[i], verts[(i + 1) % len]));
        }
    }
    (n, edges)
}
