//! Matrix Market exchange format: reading and writing.
//!
//! Coordinate files load as CSR (1-based indices shifted, duplicates
//! summed, symmetric/skew-symmetric storage expanded to general), array
//! files load as dense. Pattern entries become 1.0 and integer values are
//! promoted to real. The writer emits coordinate-general for sparse and
//! array-general for dense, with 17 significant digits so values round-trip
//! exactly.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::sparse::{AnyMatrix, SparseMatrix};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MmFormat {
    Coordinate,
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MmField {
    Real,
    Integer,
    Pattern,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MmSymmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MmHeader {
    pub format: MmFormat,
    pub field: MmField,
    pub symmetry: MmSymmetry,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line: &str) -> Result<MmHeader> {
    let mut tok = line.split_whitespace();
    match tok.next() {
        Some("%%MatrixMarket") => {}
        _ => return Err(parse_err(1, "banner must start with %%MatrixMarket")),
    }
    match tok.next() {
        Some(t) if t.eq_ignore_ascii_case("matrix") => {}
        other => return Err(parse_err(1, format!("unsupported object {other:?}"))),
    }
    let format = match tok.next().map(|t| t.to_ascii_lowercase()).as_deref() {
        Some("coordinate") => MmFormat::Coordinate,
        Some("array") => MmFormat::Array,
        other => return Err(parse_err(1, format!("unsupported format {other:?}"))),
    };
    let field = match tok.next().map(|t| t.to_ascii_lowercase()).as_deref() {
        Some("real") => MmField::Real,
        Some("integer") => MmField::Integer,
        Some("pattern") => MmField::Pattern,
        other => {
            return Err(parse_err(
                1,
                format!("unsupported field {other:?} (real, integer or pattern)"),
            ))
        }
    };
    let symmetry = match tok.next().map(|t| t.to_ascii_lowercase()).as_deref() {
        Some("general") => MmSymmetry::General,
        Some("symmetric") => MmSymmetry::Symmetric,
        Some("skew-symmetric") => MmSymmetry::SkewSymmetric,
        other => {
            return Err(parse_err(
                1,
                format!("unsupported symmetry {other:?} (general, symmetric or skew-symmetric)"),
            ))
        }
    };
    if format == MmFormat::Array && field == MmField::Pattern {
        return Err(parse_err(1, "pattern field is not valid for array format"));
    }
    Ok(MmHeader {
        format,
        field,
        symmetry,
    })
}

fn parse_value(field: MmField, tokens: &mut std::str::SplitWhitespace, line: usize) -> Result<f64> {
    match field {
        MmField::Pattern => Ok(1.0),
        MmField::Real | MmField::Integer => {
            let t = tokens
                .next()
                .ok_or_else(|| parse_err(line, "missing value"))?;
            let v: f64 = t
                .parse()
                .map_err(|_| parse_err(line, format!("non-numeric value '{t}'")))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("non-finite value '{t}'")));
            }
            Ok(v)
        }
    }
}

/// Read a Matrix Market file: coordinate files come back sparse, array
/// files dense.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<AnyMatrix> {
    let file = std::fs::File::open(path)?;
    read_matrix_market_from(BufReader::new(file))
}

pub fn read_matrix_market_from(reader: impl BufRead) -> Result<AnyMatrix> {
    let mut lines = reader.lines();
    let header_line = match lines.next() {
        Some(l) => l?,
        None => return Err(parse_err(1, "empty file")),
    };
    let header = parse_header(&header_line)?;

    let mut line_no = 1usize;
    // size line: skip comments and blanks
    let size_line = loop {
        match lines.next() {
            Some(l) => {
                line_no += 1;
                let l = l?;
                let trimmed = l.trim();
                if trimmed.is_empty() || trimmed.starts_with('%') {
                    continue;
                }
                break l;
            }
            None => return Err(parse_err(line_no, "missing size line")),
        }
    };
    let mut tok = size_line.split_whitespace();
    let rows: usize = tok
        .next()
        .ok_or_else(|| parse_err(line_no, "missing row count"))?
        .parse()
        .map_err(|_| parse_err(line_no, "bad row count"))?;
    let cols: usize = tok
        .next()
        .ok_or_else(|| parse_err(line_no, "missing column count"))?
        .parse()
        .map_err(|_| parse_err(line_no, "bad column count"))?;
    if rows == 0 || cols == 0 {
        return Err(parse_err(line_no, "dimensions must be positive"));
    }

    match header.format {
        MmFormat::Coordinate => {
            let nnz: usize = tok
                .next()
                .ok_or_else(|| parse_err(line_no, "missing nonzero count"))?
                .parse()
                .map_err(|_| parse_err(line_no, "bad nonzero count"))?;
            if tok.next().is_some() {
                return Err(parse_err(line_no, "trailing tokens on size line"));
            }
            let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(nnz);
            let mut seen = 0usize;
            for l in lines {
                line_no += 1;
                let l = l?;
                let trimmed = l.trim();
                if trimmed.is_empty() || trimmed.starts_with('%') {
                    continue;
                }
                if seen == nnz {
                    return Err(parse_err(line_no, "more entries than declared"));
                }
                let mut tok = trimmed.split_whitespace();
                let i: i64 = tok
                    .next()
                    .ok_or_else(|| parse_err(line_no, "missing row index"))?
                    .parse()
                    .map_err(|_| parse_err(line_no, "bad row index"))?;
                let j: i64 = tok
                    .next()
                    .ok_or_else(|| parse_err(line_no, "missing column index"))?
                    .parse()
                    .map_err(|_| parse_err(line_no, "bad column index"))?;
                let v = parse_value(header.field, &mut tok, line_no)?;
                if tok.next().is_some() {
                    return Err(parse_err(line_no, "trailing tokens on entry line"));
                }
                if i < 1 || j < 1 || i as usize > rows || j as usize > cols {
                    return Err(parse_err(
                        line_no,
                        format!("index ({i}, {j}) out of bounds for {rows}x{cols}"),
                    ));
                }
                let (i, j) = (i as usize - 1, j as usize - 1);
                match header.symmetry {
                    MmSymmetry::General => triplets.push((i, j, v)),
                    MmSymmetry::Symmetric => {
                        if i < j {
                            return Err(parse_err(
                                line_no,
                                "symmetric storage must hold the lower triangle only",
                            ));
                        }
                        triplets.push((i, j, v));
                        if i != j {
                            triplets.push((j, i, v));
                        }
                    }
                    MmSymmetry::SkewSymmetric => {
                        if i <= j {
                            return Err(parse_err(
                                line_no,
                                "skew-symmetric storage must hold the strict lower triangle",
                            ));
                        }
                        triplets.push((i, j, v));
                        triplets.push((j, i, -v));
                    }
                }
                seen += 1;
            }
            if seen != nnz {
                return Err(parse_err(
                    line_no,
                    format!("declared {nnz} entries but found {seen}"),
                ));
            }
            Ok(AnyMatrix::Sparse(SparseMatrix::from_triplets(
                rows, cols, &triplets,
            )?))
        }
        MmFormat::Array => {
            if tok.next().is_some() {
                return Err(parse_err(line_no, "trailing tokens on size line"));
            }
            let expected = match header.symmetry {
                MmSymmetry::General => rows * cols,
                MmSymmetry::Symmetric => {
                    if rows != cols {
                        return Err(parse_err(line_no, "symmetric array must be square"));
                    }
                    rows * (rows + 1) / 2
                }
                MmSymmetry::SkewSymmetric => {
                    if rows != cols {
                        return Err(parse_err(line_no, "skew-symmetric array must be square"));
                    }
                    rows * (rows - 1) / 2
                }
            };
            let mut values = Vec::with_capacity(expected);
            for l in lines {
                line_no += 1;
                let l = l?;
                let trimmed = l.trim();
                if trimmed.is_empty() || trimmed.starts_with('%') {
                    continue;
                }
                for t in trimmed.split_whitespace() {
                    if values.len() == expected {
                        return Err(parse_err(line_no, "more values than declared"));
                    }
                    let v: f64 = t
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("non-numeric value '{t}'")))?;
                    if !v.is_finite() {
                        return Err(parse_err(line_no, format!("non-finite value '{t}'")));
                    }
                    values.push(v);
                }
            }
            if values.len() != expected {
                return Err(parse_err(
                    line_no,
                    format!("declared {expected} values but found {}", values.len()),
                ));
            }
            // array format is column-major
            let dense = match header.symmetry {
                MmSymmetry::General => DenseMatrix::from_col_major(rows, cols, values),
                MmSymmetry::Symmetric => {
                    let mut d = DenseMatrix::zeros(rows, cols);
                    let mut it = values.into_iter();
                    for j in 0..cols {
                        for i in j..rows {
                            let v = it.next().unwrap();
                            d[(i, j)] = v;
                            d[(j, i)] = v;
                        }
                    }
                    d
                }
                MmSymmetry::SkewSymmetric => {
                    let mut d = DenseMatrix::zeros(rows, cols);
                    let mut it = values.into_iter();
                    for j in 0..cols {
                        for i in j + 1..rows {
                            let v = it.next().unwrap();
                            d[(i, j)] = v;
                            d[(j, i)] = -v;
                        }
                    }
                    d
                }
            };
            Ok(AnyMatrix::Dense(dense))
        }
    }
}

/// 17 significant digits: enough for f64 values to round-trip exactly.
fn fmt_full(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write coordinate-general (sparse) or array-general (dense) format.
/// Sparse entries come out in row-major order.
pub fn write_matrix_market(path: impl AsRef<Path>, matrix: &AnyMatrix) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_matrix_market_to(&mut file, matrix)?;
    file.flush()?;
    Ok(())
}

pub fn write_matrix_market_to(out: &mut impl Write, matrix: &AnyMatrix) -> Result<()> {
    match matrix {
        AnyMatrix::Sparse(s) => {
            writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
            writeln!(out, "{} {} {}", s.rows(), s.cols(), s.nnz())?;
            for (i, j, v) in s.triplets() {
                writeln!(out, "{} {} {}", i + 1, j + 1, fmt_full(v))?;
            }
        }
        AnyMatrix::Dense(d) => {
            writeln!(out, "%%MatrixMarket matrix array real general")?;
            writeln!(out, "{} {}", d.rows(), d.cols())?;
            for j in 0..d.cols() {
                for i in 0..d.rows() {
                    writeln!(out, "{}", fmt_full(d[(i, j)]))?;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    fn read_str(s: &str) -> Result<AnyMatrix> {
        read_matrix_market_from(s.as_bytes())
    }

    #[test]
    fn coordinate_diag_fixture() {
        let text = "%%MatrixMarket matrix coordinate real general\n\
                    % a comment\n\
                    2 2 2\n\
                    1 1 3.0\n\
                    2 2 4.0\n";
        let m = read_str(text).unwrap();
        match m {
            AnyMatrix::Sparse(s) => {
                assert_eq!(s.rows(), 2);
                assert_eq!(s.nnz(), 2);
                let d = s.to_dense();
                assert_eq!(d[(0, 0)], 3.0);
                assert_eq!(d[(1, 1)], 4.0);
                assert_eq!(d[(0, 1)], 0.0);
            }
            _ => panic!("expected sparse"),
        }
    }

    #[test]
    fn symmetric_expansion() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n\
                    3 3 4\n\
                    1 1 1.0\n\
                    2 1 5.0\n\
                    3 2 6.0\n\
                    3 3 2.0\n";
        let m = read_str(text).unwrap().to_dense();
        assert_eq!(m.sub(&m.transpose()).frob_norm(), 0.0);
        assert_eq!(m[(0, 1)], 5.0);
        assert_eq!(m[(1, 2)], 6.0);
    }

    #[test]
    fn skew_symmetric_expansion() {
        let text = "%%MatrixMarket matrix coordinate real skew-symmetric\n\
                    2 2 1\n\
                    2 1 3.0\n";
        let m = read_str(text).unwrap().to_dense();
        assert_eq!(m[(1, 0)], 3.0);
        assert_eq!(m[(0, 1)], -3.0);
        assert_eq!(m[(0, 0)], 0.0);
        assert_eq!(m[(1, 1)], 0.0);
    }

    #[test]
    fn pattern_and_integer_promotion() {
        let pat = "%%MatrixMarket matrix coordinate pattern general\n2 2 1\n2 1\n";
        let m = read_str(pat).unwrap().to_dense();
        assert_eq!(m[(1, 0)], 1.0);
        let int = "%%MatrixMarket matrix coordinate integer general\n2 2 1\n1 2 -7\n";
        let m = read_str(int).unwrap().to_dense();
        assert_eq!(m[(0, 1)], -7.0);
    }

    #[test]
    fn array_format_is_column_major() {
        let text = "%%MatrixMarket matrix array real general\n\
                    2 2\n1.0\n2.0\n3.0\n4.0\n";
        let m = read_str(text).unwrap();
        match m {
            AnyMatrix::Dense(d) => {
                assert_eq!(d[(0, 0)], 1.0);
                assert_eq!(d[(1, 0)], 2.0);
                assert_eq!(d[(0, 1)], 3.0);
                assert_eq!(d[(1, 1)], 4.0);
            }
            _ => panic!("expected dense"),
        }
    }

    #[test]
    fn duplicates_are_summed() {
        let text = "%%MatrixMarket matrix coordinate real general\n\
                    2 2 2\n1 1 1.5\n1 1 2.5\n";
        let m = read_str(text).unwrap().to_dense();
        assert_eq!(m[(0, 0)], 4.0);
    }

    #[test]
    fn malformed_corpus_rejected() {
        let cases: &[(&str, &str)] = &[
            (
                "bad banner",
                "%%MatrixMarkets matrix coordinate real general\n1 1 0\n",
            ),
            (
                "bad object",
                "%%MatrixMarket vector coordinate real general\n1 1 0\n",
            ),
            (
                "bad format",
                "%%MatrixMarket matrix list real general\n1 1 0\n",
            ),
            (
                "complex field",
                "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1.0 0.0\n",
            ),
            (
                "bad symmetry",
                "%%MatrixMarket matrix coordinate real hermitian\n1 1 0\n",
            ),
            (
                "zero index",
                "%%MatrixMarket matrix coordinate real general\n2 2 1\n0 1 1.0\n",
            ),
            (
                "negative index",
                "%%MatrixMarket matrix coordinate real general\n2 2 1\n-1 1 1.0\n",
            ),
            (
                "index out of bounds",
                "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n",
            ),
            (
                "nnz too few",
                "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.0\n",
            ),
            (
                "nnz too many",
                "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1.0\n2 2 1.0\n",
            ),
            (
                "non-numeric value",
                "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n",
            ),
            (
                "missing value",
                "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1\n",
            ),
            (
                "zero dimension",
                "%%MatrixMarket matrix coordinate real general\n0 2 0\n",
            ),
            (
                "pattern array",
                "%%MatrixMarket matrix array pattern general\n2 2\n",
            ),
            (
                "upper entry in symmetric",
                "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 1.0\n",
            ),
            (
                "array too few values",
                "%%MatrixMarket matrix array real general\n2 2\n1.0\n2.0\n",
            ),
        ];
        for (what, text) in cases {
            match read_str(text) {
                Err(Error::Parse { .. }) => {}
                other => panic!("case '{what}' should fail with a parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn parse_error_carries_line_number() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n";
        match read_str(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn sparse_round_trip_is_bit_exact() {
        let mut stream = Stream::new(2024, 0);
        let trips: Vec<(usize, usize, f64)> = (0..120)
            .map(|_| {
                (
                    stream.next_index(17),
                    stream.next_index(23),
                    stream.next_normal() * 10f64.powi(stream.next_index(7) as i32 - 3),
                )
            })
            .collect();
        let s = SparseMatrix::from_triplets(17, 23, &trips).unwrap();
        let mut buf = Vec::new();
        write_matrix_market_to(&mut buf, &AnyMatrix::Sparse(s.clone())).unwrap();
        let back = read_matrix_market_from(buf.as_slice()).unwrap();
        match back {
            AnyMatrix::Sparse(s2) => {
                assert_eq!(s.row_ptr(), s2.row_ptr());
                assert_eq!(s.col_idx(), s2.col_idx());
                assert_eq!(s.values(), s2.values());
            }
            _ => panic!("expected sparse"),
        }
    }

    #[test]
    fn dense_round_trip_is_bit_exact() {
        let d = DenseMatrix::gaussian(9, 5, 55);
        let mut buf = Vec::new();
        write_matrix_market_to(&mut buf, &AnyMatrix::Dense(d.clone())).unwrap();
        let back = read_matrix_market_from(buf.as_slice()).unwrap();
        assert_eq!(back, AnyMatrix::Dense(d));
    }

    #[test]
    fn empty_sparse_writes_and_reads() {
        let s = SparseMatrix::from_triplets(3, 4, &[]).unwrap();
        let mut buf = Vec::new();
        write_matrix_market_to(&mut buf, &AnyMatrix::Sparse(s.clone())).unwrap();
        let back = read_matrix_market_from(buf.as_slice()).unwrap();
        assert_eq!(back, AnyMatrix::Sparse(s));
    }

    type RefEntries = Vec<(usize, usize, f64)>;

    /// A second, independently written reference parser used to
    /// cross-validate the writer's output.
    fn reference_parse(text: &str) -> Option<(usize, usize, RefEntries)> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let banner = lines.next()?;
        if !banner.contains("coordinate") || !banner.contains("real") {
            return None;
        }
        let dims: Vec<usize> = lines
            .next()?
            .split_whitespace()
            .map(|t| t.parse().ok())
            .collect::<Option<_>>()?;
        let mut entries = Vec::new();
        for l in lines {
            if l.trim_start().starts_with('%') {
                continue;
            }
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 3 {
                return None;
            }
            entries.push((
                toks[0].parse::<usize>().ok()? - 1,
                toks[1].parse::<usize>().ok()? - 1,
                toks[2].parse::<f64>().ok()?,
            ));
        }
        if entries.len() != dims[2] {
            return None;
        }
        Some((dims[0], dims[1], entries))
    }

    #[test]
    fn written_files_pass_a_second_parser() {
        let trips = vec![(0usize, 0usize, 1.25), (2, 1, -0.5), (2, 3, 3.75e-11)];
        let s = SparseMatrix::from_triplets(3, 4, &trips).unwrap();
        let mut buf = Vec::new();
        write_matrix_market_to(&mut buf, &AnyMatrix::Sparse(s.clone())).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let (r, c, entries) = reference_parse(&text).expect("reference parser accepts the file");
        assert_eq!((r, c), (3, 4));
        let expected: Vec<_> = s.triplets().collect();
        assert_eq!(entries, expected);
    }
}
