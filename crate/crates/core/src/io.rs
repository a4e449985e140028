//! Plain-text interchange formats.
//!
//! * Matrix files use the 4ti2 layout: a `rows cols` header, then one line of
//!   whitespace-separated integers per row. Lines starting with `#` are
//!   comments.
//! * Partition files hold one block per line as 1-based run indices.
//! * Edge lists hold one `tail head` pair per line, 1-based.
//! * Latin squares are grids of whitespace-separated symbols.
//! * Vectors of rationals accept integers, fractions (`1/2`) and decimals
//!   (`0.25`), whitespace or newline separated.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_linalg::IntMatrix;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_matrix(text: &str) -> Result<IntMatrix> {
    let mut tokens = content_lines(text)
        .flat_map(|(ln, l)| l.split_whitespace().map(move |t| (ln, t)));
    let mut header = |what: &str| -> Result<usize> {
        let (ln, t) = tokens.next().ok_or_else(|| parse_err(1, format!("missing {what} in header")))?;
        t.parse::<usize>()
            .map_err(|e| parse_err(ln, format!("bad {what} {t:?}: {e}")))
    };
    let rows = header("row count")?;
    let cols = header("column count")?;
    let mut data = Vec::with_capacity(rows * cols);
    for (ln, t) in tokens.by_ref() {
        let v = t
            .parse::<BigInt>()
            .map_err(|e| parse_err(ln, format!("bad integer {t:?}: {e}")))?;
        data.push(v);
    }
    if data.len() != rows * cols {
        return Err(parse_err(
            0,
            format!("expected {} entries for a {rows}x{cols} matrix, found {}", rows * cols, data.len()),
        ));
    }
    IntMatrix::new(rows, cols, data)
}

pub fn format_matrix(m: &IntMatrix) -> String {
    let mut out = format!("{} {}\n", m.n_rows(), m.n_cols());
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(ToString::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

fn split_indices(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || c == ',' || c == '{' || c == '}')
        .filter(|t| !t.is_empty())
}

/// 1-based blocks, one per line.
pub fn parse_blocks(text: &str) -> Result<Vec<Vec<usize>>> {
    content_lines(text)
        .map(|(ln, l)| {
            split_indices(l)
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|e| parse_err(ln, format!("bad run index {t:?}: {e}")))
                })
                .collect()
        })
        .collect()
}

pub fn format_blocks(blocks: &[Vec<usize>]) -> String {
    let mut out = String::new();
    for b in blocks {
        let line: Vec<String> = b.iter().map(ToString::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// 1-based `(tail, head)` pairs; the vertex count is the largest index seen.
pub fn parse_edge_list(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut edges = Vec::new();
    for (ln, l) in content_lines(text) {
        let parts: Vec<&str> = split_indices(l).collect();
        if parts.len() != 2 {
            return Err(parse_err(ln, "expected `tail head`"));
        }
        let p = |t: &str| {
            t.parse::<usize>()
                .map_err(|e| parse_err(ln, format!("bad vertex {t:?}: {e}")))
        };
        edges.push((p(parts[0])?, p(parts[1])?));
    }
    let n = edges.iter().map(|&(t, h)| t.max(h)).max().unwrap_or(0);
    Ok((n, edges))
}

/// Symbols are numbered in order of first appearance.
pub fn parse_latin_grid(text: &str) -> Result<Vec<Vec<usize>>> {
    let mut symbols: Vec<String> = Vec::new();
    Ok(content_lines(text)
        .map(|(_, l)| {
            l.split_whitespace()
                .map(|t| match symbols.iter().position(|s| s == t) {
                    Some(i) => i,
                    None => {
                        symbols.push(t.to_string());
                        symbols.len() - 1
                    }
                })
                .collect()
        })
        .collect())
}

/// Exact rational from an integer, fraction or decimal literal.
pub fn parse_rational(t: &str) -> Result<BigRational> {
    let bad = |msg: String| Error::InvalidArgument(format!("bad number {t:?}: {msg}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|e| bad(format!("{e}")))?;
        let d: BigInt = d.trim().parse().map_err(|e| bad(format!("{e}")))?;
        if d.is_zero() {
            return Err(bad("zero denominator".into()));
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|e| bad(format!("{e}")))?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad("not a number".into()));
    }
    let num: BigInt = format!("{int_part}{frac_part}").parse().map_err(|e| bad(format!("{e}")))?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(num);
    if scale >= 0 {
        r *= BigRational::from_integer(ten.pow(scale as u32));
    } else {
        r /= BigRational::from_integer(ten.pow((-scale) as u32));
    }
    Ok(if neg { -r } else { r })
}

pub fn parse_rational_vector(text: &str) -> Result<Vec<BigRational>> {
    content_lines(text)
        .flat_map(|(_, l)| l.split(|c: char| c.is_whitespace() || c == ','))
        .filter(|t| !t.is_empty())
        .map(parse_rational)
        .collect()
}

/// `(a, b, c)` with fractions written `p/q`.
pub fn format_rational_tuple(v: &[BigRational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        let mut s = String::new();
        let _ = write!(s, "{}/{}", r.numer(), r.denom());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn matrix_format() {
        let m = parse_matrix("2 3\n1 -2 0\n# comment\n4  5 6\n").unwrap();
        assert_eq!(m, IntMatrix::from_i64_rows(&[[1, -2, 0], [4, 5, 6]]));
        assert_eq!(format_matrix(&m), "2 3\n1 -2 0\n4 5 6\n");
        assert!(parse_matrix("2 2\n1 2 3\n").is_err());
        assert!(parse_matrix("2 x\n").is_err());
        assert!(parse_matrix("1 2\n1 q\n").is_err());
        assert!(parse_matrix("").is_err());
        let empty = parse_matrix("3 0\n").unwrap();
        assert_eq!((empty.n_rows(), empty.n_cols()), (3, 0));
    }

    #[test]
    fn blocks_and_edges() {
        assert_eq!(
            parse_blocks("1 5 9\n{2,6,7}\n\n3,4,8\n").unwrap(),
            vec![vec![1, 5, 9], vec![2, 6, 7], vec![3, 4, 8]]
        );
        assert!(parse_blocks("1 a\n").is_err());
        assert_eq!(format_blocks(&[vec![1, 8], vec![2, 7]]), "1 8\n2 7\n");
        assert_eq!(parse_edge_list("1 2\n2 3\n3 1\n").unwrap(), (3, vec![(1, 2), (2, 3), (3, 1)]));
        assert!(parse_edge_list("1 2 3\n").is_err());
    }

    #[test]
    fn latin_grid() {
        assert_eq!(
            parse_latin_grid("A B C\nC A B\nB C A\n").unwrap(),
            vec![vec![0, 1, 2], vec![2, 0, 1], vec![1, 2, 0]]
        );
    }

    #[test]
    fn rationals() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(parse_rational("3").unwrap(), q(3, 1));
        assert_eq!(parse_rational("-6/4").unwrap(), q(-3, 2));
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("-.5").unwrap(), q(-1, 2));
        assert_eq!(parse_rational("1.5e2").unwrap(), q(150, 1));
        assert_eq!(parse_rational("2e-3").unwrap(), q(1, 500));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
        assert_eq!(parse_rational_vector("1, 2\n1/2\n").unwrap(), vec![q(1, 1), q(2, 1), q(1, 2)]);
        assert_eq!(format_rational_tuple(&[q(1, 2), q(0, 1), q(-3, 1)]), "(1/2, 0, -3)");
    }

    proptest! {
        #[test]
        fn matrix_round_trip(rows in (1usize..5, 0usize..6).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(-1000i64..1000, c), r)
        })) {
            let m = IntMatrix::from_i64_rows(&rows);
            let text = format_matrix(&m);
            let back = parse_matrix(&text).unwrap();
            prop_assert_eq!(&back, &m);
            prop_assert_eq!(format_matrix(&back), text);
        }
    }
}
