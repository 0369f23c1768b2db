//! Matrix Market reader and writer (`matrix coordinate|array real|integer general`).
//!
//! Array data is column-major, as in the format definition. Coordinate data
//! is 1-based; repeated coordinates are summed and unlisted ones are zero.
//! The exact reader keeps every decimal token as a rational; it also accepts
//! `p/q` tokens, which the writer emits for exact entries without a
//! terminating decimal expansion.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::NonnegativeMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

struct Parsed<'a> {
    n: usize,
    entries: Vec<(usize, usize, &'a str)>,
}

/// Reads a Matrix Market file into a float-backend matrix.
pub fn load_matrix_market(text: &str) -> Result<NonnegativeMatrix> {
    let parsed = parse(text)?;
    let n = parsed.n;
    let mut values = vec![0.0; n * n];
    for (i, j, tok) in parsed.entries {
        let v = parse_f64(tok, i, j)?;
        if v < 0.0 {
            return Err(Error::NegativeEntry {
                row: i,
                col: j,
                value: tok.to_string(),
            });
        }
        values[i * n + j] += v;
    }
    NonnegativeMatrix::from_row_major(n, values)
}

/// Reads a Matrix Market file into an exact rational matrix.
pub fn load_matrix_market_exact(text: &str) -> Result<NonnegativeMatrix> {
    let parsed = parse(text)?;
    let n = parsed.n;
    let mut data = vec![BigRational::zero(); n * n];
    for (i, j, tok) in parsed.entries {
        let q = parse_rational(tok).ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("invalid number `{tok}` at ({}, {})", i + 1, j + 1),
        })?;
        if q.is_negative() {
            return Err(Error::NegativeEntry {
                row: i,
                col: j,
                value: tok.to_string(),
            });
        }
        data[i * n + j] += q;
    }
    NonnegativeMatrix::from_rational_row_major(n, data)
}

fn parse_f64(tok: &str, i: usize, j: usize) -> Result<f64> {
    let v = if let Some(q) = tok.contains('/').then(|| parse_rational(tok)).flatten() {
        super::matrix::rational_to_f64(&q)
    } else {
        tok.parse::<f64>().map_err(|_| Error::Parse {
            line: 0,
            message: format!("invalid number `{tok}` at ({}, {})", i + 1, j + 1),
        })?
    };
    if !v.is_finite() {
        return Err(Error::NonFinite { row: i, col: j });
    }
    Ok(v)
}

fn parse(text: &str) -> Result<Parsed<'_>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty input".into(),
    })?;
    let (layout, field) = parse_header(header)?;

    let mut body = lines
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));

    let (size_line, size) = body.next().ok_or(Error::Parse {
        line: 2,
        message: "missing size line".into(),
    })?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse {
            line: size_line,
            message: format!("malformed size line `{size}`"),
        })?;
    let expected = match layout {
        Layout::Coordinate => 3,
        Layout::Array => 2,
    };
    if dims.len() != expected {
        return Err(Error::Parse {
            line: size_line,
            message: format!("size line needs {expected} integers"),
        });
    }
    let (rows, cols) = (dims[0], dims[1]);
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if rows == 0 {
        return Err(Error::Parse {
            line: size_line,
            message: "dimension must be at least 1".into(),
        });
    }
    let n = rows;

    let mut entries = Vec::new();
    match layout {
        Layout::Coordinate => {
            let nnz = dims[2];
            for (line, l) in body.by_ref() {
                let toks: Vec<&str> = l.split_whitespace().collect();
                let want = if field == Field::Pattern { 2 } else { 3 };
                if toks.len() != want {
                    return Err(Error::Parse {
                        line,
                        message: format!("expected {want} fields, got `{l}`"),
                    });
                }
                let idx = |t: &str| -> Result<usize> {
                    match t.parse::<usize>() {
                        Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
                        _ => Err(Error::Parse {
                            line,
                            message: format!("index `{t}` outside 1..={n}"),
                        }),
                    }
                };
                let (i, j) = (idx(toks[0])?, idx(toks[1])?);
                let v = if field == Field::Pattern { "1" } else { toks[2] };
                entries.push((i, j, v));
            }
            if entries.len() != nnz {
                return Err(Error::Parse {
                    line: size_line,
                    message: format!("declared {nnz} entries, found {}", entries.len()),
                });
            }
        }
        Layout::Array => {
            let mut k = 0usize;
            for (line, l) in body {
                for tok in l.split_whitespace() {
                    if k >= n * n {
                        return Err(Error::Parse {
                            line,
                            message: "too many array entries".into(),
                        });
                    }
                    // column-major
                    entries.push((k % n, k / n, tok));
                    k += 1;
                }
            }
            if k != n * n {
                return Err(Error::Parse {
                    line: size_line,
                    message: format!("array needs {} entries, found {k}", n * n),
                });
            }
        }
    }
    Ok(Parsed { n, entries })
}

fn parse_header(header: &str) -> Result<(Layout, Field)> {
    let bad = |m: &str| Error::Parse {
        line: 1,
        message: m.to_string(),
    };
    let toks: Vec<String> = header.split_whitespace().map(|t| t.to_lowercase()).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" {
        return Err(bad("expected `%%MatrixMarket matrix <layout> <field> general`"));
    }
    let layout = match toks[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(bad(&format!("unsupported layout `{other}`"))),
    };
    let field = match toks[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" if layout == Layout::Coordinate => Field::Pattern,
        other => return Err(bad(&format!("unsupported field `{other}`"))),
    };
    if toks[4] != "general" {
        return Err(bad(&format!("unsupported symmetry `{}`", toks[4])));
    }
    Ok((layout, field))
}

/// Parses a decimal (optionally signed, with optional exponent) or `p/q`
/// token into an exact rational.
pub fn parse_rational(tok: &str) -> Option<BigRational> {
    if let Some((p, q)) = tok.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (mantissa, exp) = match tok.find(['e', 'E']) {
        Some(k) => (&tok[..k], tok[k + 1..].parse::<i32>().ok()?),
        None => (tok, 0),
    };
    let (neg, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}0").parse::<BigInt>().ok()? / 10;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        BigRational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Some(q)
}

/// Writes the matrix in coordinate format (nonzero entries only).
pub fn write_matrix_market(m: &NonnegativeMatrix) -> String {
    let n = m.dim();
    let mut nz = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let token = match m.exact_get(i, j) {
                Some(q) if q.is_zero() => continue,
                Some(q) => format_rational(q),
                None if m.get(i, j) == 0.0 => continue,
                None => format!("{:e}", m.get(i, j)),
            };
            nz.push((i, j, token));
        }
    }
    let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{n} {n} {}", nz.len());
    for (i, j, tok) in nz {
        let _ = writeln!(out, "{} {} {tok}", i + 1, j + 1);
    }
    out
}

/// Terminating decimal when the denominator is `2^a 5^b`, `p/q` otherwise.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        return q.numer().to_string();
    }
    let mut d = q.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut a, mut b) = (0usize, 0usize);
    while d.is_even() {
        d /= &two;
        a += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        b += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", q.numer(), q.denom());
    }
    let k = a.max(b);
    let scaled = q * BigRational::from_integer(num_traits::pow(BigInt::from(10), k));
    let digits = scaled.to_integer().abs().to_string();
    let digits = format!("{digits:0>width$}", width = k + 1);
    let (ip, fp) = digits.split_at(digits.len() - k);
    let sign = if q.is_negative() { "-" } else { "" };
    format!("{sign}{ip}.{fp}")
}
