//! Line-oriented polyhedron text format.
//!
//! ```text
//! # optional comment lines
//! <dimension> <num_constraints>
//! <a1> ... <ad> <b>        # one row per constraint: a·x + b >= 0
//! ```
//!
//! Entries are integers or `p/q`. Output is always in lowest terms with no
//! spaces inside a fraction. Several blocks may follow each other in one
//! stream (see [`parse_polyhedra`]).

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::types::{Constraint, Polyhedron, Rational};

/// Version of the text format, reported by `--version`.
pub const FORMAT_VERSION: &str = "1";

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(token: &str) -> std::result::Result<Rational, String> {
    let parse_int = |s: &str| s.parse::<BigInt>().map_err(|_| format!("invalid number `{token}`"));
    match token.split_once('/') {
        Some((n, d)) => {
            let (n, d) = (parse_int(n)?, parse_int(d)?);
            if d.is_zero() {
                return Err(format!("zero denominator in `{token}`"));
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(parse_int(token)?)),
    }
}

/// Strips comments and blank lines, keeping 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_error(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_block<'a, I>(lines: &mut std::iter::Peekable<I>) -> Result<Option<Polyhedron>>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let Some((header_line, header)) = lines.next() else {
        return Ok(None);
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [dim, count] = fields.as_slice() else {
        return Err(parse_error(
            header_line,
            "header must be `<dimension> <num_constraints>`",
        ));
    };
    let dim: usize = dim.parse().map_err(|_| parse_error(header_line, "invalid dimension"))?;
    let count: usize = count
        .parse()
        .map_err(|_| parse_error(header_line, "invalid constraint count"))?;

    let mut rows = Vec::with_capacity(count);
    for k in 0..count {
        let Some((line_no, line)) = lines.next() else {
            return Err(parse_error(
                header_line,
                format!("expected {count} constraints, found {k}"),
            ));
        };
        let mut entries = line
            .split_whitespace()
            .map(parse_rational)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|m| parse_error(line_no, m))?;
        if entries.len() != dim + 1 {
            return Err(parse_error(
                line_no,
                format!("expected {} entries, found {}", dim + 1, entries.len()),
            ));
        }
        let constant = entries.pop().expect("non-empty row");
        rows.push(Constraint::new(entries, constant));
    }
    Polyhedron::new(dim, rows).map(Some)
}

/// Parses exactly one polyhedron.
pub fn parse_polyhedron(text: &str) -> Result<Polyhedron> {
    let mut lines = content_lines(text).peekable();
    let p = parse_block(&mut lines)?.ok_or_else(|| parse_error(1, "missing header"))?;
    if let Some((line, _)) = lines.next() {
        return Err(parse_error(line, "trailing content after polyhedron"));
    }
    Ok(p)
}

/// Parses a sequence of polyhedron blocks (e.g. a region dump).
pub fn parse_polyhedra(text: &str) -> Result<Vec<Polyhedron>> {
    let mut lines = content_lines(text).peekable();
    let mut out = Vec::new();
    while let Some(p) = parse_block(&mut lines)? {
        out.push(p);
    }
    Ok(out)
}

pub fn write_polyhedron(p: &Polyhedron) -> String {
    let mut s = format!("{} {}\n", p.dim(), p.len());
    for r in p.rows() {
        s.push_str(&r.to_string());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{frac, int};
    use proptest::prelude::*;

    #[test]
    fn parses_fractions_and_comments() {
        let p = parse_polyhedron("# square\n2 2\n1 0 0\n-1/2 2/4 3 # trailing\n").unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.row(1).coeffs(), &[frac(-1, 2), frac(1, 2)]);
        assert_eq!(p.row(1).constant(), &int(3));
    }

    #[test]
    fn prints_lowest_terms() {
        let p = parse_polyhedron("1 1\n4/6 -3\n").unwrap();
        assert_eq!(write_polyhedron(&p), "1 1\n2/3 -3\n");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_polyhedron("2 1\n1 2\n").is_err());
        assert!(parse_polyhedron("1 1\n1/0 2\n").is_err());
        assert!(parse_polyhedron("1 2\n1 2\n").is_err());
        assert!(parse_polyhedron("").is_err());
        assert!(parse_polyhedron("1 1\n1 0\n1 1\n1 0\n").is_err());
    }

    #[test]
    fn reads_several_blocks() {
        let ps = parse_polyhedra("1 1\n1 0\n# next\n2 0\n").unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps[1].dim(), 2);
    }

    proptest! {
        #[test]
        fn text_round_trip(rows in proptest::collection::vec(
            proptest::collection::vec((-99i64..99, 1i64..20), 4), 0..6)) {
            let cs: Vec<Constraint> = rows.iter().map(|r| {
                let mut v: Vec<Rational> = r.iter().map(|&(n, d)| frac(n, d)).collect();
                let b = v.pop().unwrap();
                Constraint::new(v, b)
            }).collect();
            let p = Polyhedron::new(3, cs).unwrap();
            let q = parse_polyhedron(&write_polyhedron(&p)).unwrap();
            prop_assert_eq!(p, q);
        }
    }
}
