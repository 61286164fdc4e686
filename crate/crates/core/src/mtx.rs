//! Matrix Market coordinate format (`real` / `integer` / `complex`,
//! `general` / `symmetric`), 1-based indices.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn read_matrix_market<R: Read>(reader: R) -> Result<CsrMatrix> {
    let mut lines = BufReader::new(reader)
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l));

    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let header = header?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, format!("bad header '{header}'")));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(1, format!("unsupported format '{}'", tokens[2])));
    }
    let field = match tokens[3].as_str() {
        "real" | "integer" | "double" => Field::Real,
        "complex" => Field::Complex,
        other => return Err(parse_err(1, format!("unsupported field '{other}'"))),
    };
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(parse_err(1, format!("unsupported symmetry '{other}'"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (lineno, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                if parts.len() != 3 {
                    return Err(parse_err(lineno, "size line needs 'rows cols nnz'"));
                }
                let p = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|e| parse_err(lineno, e.to_string()))
                };
                let s = (p(parts[0])?, p(parts[1])?, p(parts[2])?);
                triplets.reserve(s.2);
                size = Some(s);
            }
            Some((rows, cols, _)) => {
                let want = if field == Field::Complex { 4 } else { 3 };
                if parts.len() != want {
                    return Err(parse_err(
                        lineno,
                        format!("expected {want} columns, got {}", parts.len()),
                    ));
                }
                let idx = |s: &str, bound: usize| -> Result<usize> {
                    let v = s
                        .parse::<usize>()
                        .map_err(|e| parse_err(lineno, e.to_string()))?;
                    if v == 0 || v > bound {
                        return Err(parse_err(lineno, format!("index {v} outside 1..={bound}")));
                    }
                    Ok(v - 1)
                };
                let num = |s: &str| {
                    s.parse::<f64>()
                        .map_err(|e| parse_err(lineno, e.to_string()))
                };
                let i = idx(parts[0], rows)?;
                let j = idx(parts[1], cols)?;
                let v = match field {
                    Field::Real => C64::new(num(parts[2])?, 0.0),
                    Field::Complex => C64::new(num(parts[2])?, num(parts[3])?),
                };
                triplets.push((i, j, v));
                if symmetric && i != j {
                    triplets.push((j, i, v));
                }
            }
        }
    }
    let (rows, cols, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    let stored = if symmetric {
        triplets.iter().filter(|t| t.0 >= t.1).count()
    } else {
        triplets.len()
    };
    if stored != nnz {
        return Err(parse_err(
            0,
            format!("size line announced {nnz} entries, found {stored}"),
        ));
    }
    CsrMatrix::from_triplets(rows, cols, &triplets)
}

pub fn read_matrix_market_file(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    read_matrix_market(std::fs::File::open(path)?)
}

/// Renders `a` as a `general` coordinate file. Uses the `real` field when
/// every stored value has zero imaginary part.
pub fn to_matrix_market_string(a: &CsrMatrix) -> String {
    let complex = a.values().iter().any(|z| z.im != 0.0);
    let mut s = String::new();
    let field = if complex { "complex" } else { "real" };
    writeln!(s, "%%MatrixMarket matrix coordinate {field} general").unwrap();
    writeln!(s, "{} {} {}", a.rows(), a.cols(), a.nnz()).unwrap();
    for (i, j, v) in a.triplets() {
        if complex {
            writeln!(s, "{} {} {:?} {:?}", i + 1, j + 1, v.re, v.im).unwrap();
        } else {
            writeln!(s, "{} {} {:?}", i + 1, j + 1, v.re).unwrap();
        }
    }
    s
}

pub fn write_matrix_market<W: Write>(a: &CsrMatrix, mut w: W) -> Result<()> {
    w.write_all(to_matrix_market_string(a).as_bytes())?;
    Ok(())
}

pub fn write_matrix_market_file(a: &CsrMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_matrix_market(a, std::fs::File::create(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_real_general() {
        let src = "%%MatrixMarket matrix coordinate real general\n% comment\n2 3 3\n1 1 1.5\n2 3 -2\n1 2 4e-1\n";
        let a = read_matrix_market(src.as_bytes()).unwrap();
        assert_eq!((a.rows(), a.cols(), a.nnz()), (2, 3, 3));
        assert_eq!(a.get(1, 2), C64::new(-2.0, 0.0));
        assert_eq!(a.get(0, 1), C64::new(0.4, 0.0));
    }

    #[test]
    fn reads_complex_and_symmetric() {
        let src = "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1.0 -2.0\n";
        let a = read_matrix_market(src.as_bytes()).unwrap();
        assert_eq!(a.get(0, 0), C64::new(1.0, -2.0));
        let src = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1\n2 1 3\n";
        let a = read_matrix_market(src.as_bytes()).unwrap();
        assert_eq!(a.get(0, 1), C64::new(3.0, 0.0));
        assert_eq!(a.nnz(), 3);
    }

    #[test]
    fn malformed_header_names_line_one() {
        let err = read_matrix_market("%%MatrixMarket tensor\n1 1 0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        assert!(err.to_string().contains("line 1"));
    }

    #[test]
    fn bad_entry_reports_its_line() {
        let src = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n3 1 1\n";
        let err = read_matrix_market(src.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
    }

    #[test]
    fn write_then_read_is_exact() {
        let a = CsrMatrix::from_real_triplets(
            3,
            3,
            &[(0, 0, 1.0 / 3.0), (2, 1, -5.0 / 6.0), (1, 2, 1e-300)],
        )
        .unwrap();
        let back = read_matrix_market(to_matrix_market_string(&a).as_bytes()).unwrap();
        assert_eq!(back, a);
        let z = CsrMatrix::from_triplets(1, 2, &[(0, 1, C64::new(0.1, 0.7))]).unwrap();
        let s = to_matrix_market_string(&z);
        assert!(s.starts_with("%%MatrixMarket matrix coordinate complex general"));
        assert_eq!(read_matrix_market(s.as_bytes()).unwrap(), z);
    }
}
