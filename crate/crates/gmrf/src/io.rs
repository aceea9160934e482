//! File formats: headerless CSV for datasets and dense matrices, Matrix
//! Market coordinate for graphs and sparse precision matrices.
//!
//! Floats are written with 17 significant digits, which round-trips `f64`
//! exactly. Matrix Market indices are 1-based; graphs are written as
//! `pattern symmetric` and symmetric precision matrices as `real symmetric`,
//! both storing the lower triangle. A non-symmetric precision estimate (the
//! raw column-by-column output) is written as `real general` instead, since
//! the symmetric storage cannot represent it.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::SparsityPattern;
use crate::sparse::SparseMatrix;

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a matrix (dataset rows or a dense square matrix) as headerless CSV.
pub fn write_dataset_csv(path: &Path, x: &Array2<f64>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for row in x.rows() {
        let line: Vec<String> = row.iter().map(|&v| fmt_float(v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a headerless CSV of floats; all rows must have equal length.
pub fn read_dataset_csv(path: &Path) -> Result<Array2<f64>> {
    let mut text = String::new();
    BufReader::new(File::open(path)?).read_to_string(&mut text)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad float {cell:?}", lineno + 1)))
            })
            .collect::<Result<_>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} columns, got {}",
                    lineno + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("empty dataset".into()));
    }
    let (n, p) = (rows.len(), rows[0].len());
    Ok(Array2::from_shape_fn((n, p), |(i, j)| rows[i][j]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MmField {
    Pattern,
    Real,
    Integer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MmSymmetry {
    Symmetric,
    General,
}

struct MmHeader {
    field: MmField,
    symmetry: MmSymmetry,
    rows: usize,
    cols: usize,
    nnz: usize,
}

fn parse_mm_header(lines: &mut std::str::Lines<'_>) -> Result<MmHeader> {
    let banner = lines
        .next()
        .ok_or_else(|| Error::Parse("empty Matrix Market file".into()))?;
    let tokens: Vec<String> = banner.split_whitespace().map(str::to_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::Parse(format!("bad Matrix Market banner: {banner:?}")));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::Parse("only coordinate format is supported".into()));
    }
    let field = match tokens[3].as_str() {
        "pattern" => MmField::Pattern,
        "real" => MmField::Real,
        "integer" => MmField::Integer,
        other => return Err(Error::Parse(format!("unsupported field type {other:?}"))),
    };
    let symmetry = match tokens[4].as_str() {
        "symmetric" => MmSymmetry::Symmetric,
        "general" => MmSymmetry::General,
        other => return Err(Error::Parse(format!("unsupported symmetry {other:?}"))),
    };
    let size_line = lines
        .by_ref()
        .find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('%'))
        .ok_or_else(|| Error::Parse("missing size line".into()))?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad size entry {t:?}")))
        })
        .collect::<Result<_>>()?;
    if dims.len() != 3 {
        return Err(Error::Parse(format!("bad size line: {size_line:?}")));
    }
    Ok(MmHeader {
        field,
        symmetry,
        rows: dims[0],
        cols: dims[1],
        nnz: dims[2],
    })
}

type MmEntries = (MmHeader, Vec<(usize, usize, f64)>);

fn mm_entries(text: &str) -> Result<MmEntries> {
    let mut lines = text.lines();
    let header = parse_mm_header(&mut lines)?;
    if header.rows != header.cols {
        return Err(Error::Parse(format!(
            "expected a square matrix, got {}x{}",
            header.rows, header.cols
        )));
    }
    let mut entries = Vec::with_capacity(header.nnz);
    for line in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let mut it = line.split_whitespace();
        let i: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad entry line {line:?}")))?;
        let j: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad entry line {line:?}")))?;
        let v = match header.field {
            MmField::Pattern => 1.0,
            _ => it
                .next()
                .and_then(|t| t.parse::<f64>().ok())
                .ok_or_else(|| Error::Parse(format!("missing value in line {line:?}")))?,
        };
        if i == 0 || j == 0 || i > header.rows || j > header.cols {
            return Err(Error::Parse(format!(
                "entry ({i},{j}) outside 1..={}",
                header.rows
            )));
        }
        entries.push((i - 1, j - 1, v));
    }
    if entries.len() != header.nnz {
        return Err(Error::Parse(format!(
            "expected {} entries, found {}",
            header.nnz,
            entries.len()
        )));
    }
    Ok((header, entries))
}

/// Writes a sparsity pattern as `pattern symmetric`, lower triangle, 1-based.
pub fn write_pattern_matrix_market(path: &Path, g: &SparsityPattern) -> Result<()> {
    let p = g.dim();
    let mut entries = Vec::new();
    for j in 0..p {
        for &i in g.neighbors(j) {
            if i >= j {
                entries.push((i, j));
            }
        }
    }
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "%%MatrixMarket matrix coordinate pattern symmetric")?;
    writeln!(w, "{p} {p} {}", entries.len())?;
    for (i, j) in entries {
        writeln!(w, "{} {}", i + 1, j + 1)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a graph from Matrix Market coordinate format. Any field type is
/// accepted (values are ignored); the pattern is symmetrized and the
/// diagonal added silently.
pub fn read_pattern_matrix_market(path: &Path) -> Result<SparsityPattern> {
    let mut text = String::new();
    BufReader::new(File::open(path)?).read_to_string(&mut text)?;
    let (header, entries) = mm_entries(&text)?;
    let edges: Vec<(usize, usize)> = entries.into_iter().map(|(i, j, _)| (i, j)).collect();
    SparsityPattern::from_edges(header.rows, &edges)
}

/// Writes a sparse matrix in Matrix Market coordinate format: `real
/// symmetric` (lower triangle) when the matrix is exactly symmetric, `real
/// general` otherwise.
pub fn write_sparse_matrix_market(path: &Path, m: &SparseMatrix) -> Result<()> {
    let p = m.dim();
    let symmetric = m.is_symmetric();
    let entries: Vec<(usize, usize, f64)> = m
        .iter()
        .filter(|&(i, j, _)| !symmetric || i >= j)
        .collect();
    let mut w = BufWriter::new(File::create(path)?);
    let kind = if symmetric { "symmetric" } else { "general" };
    writeln!(w, "%%MatrixMarket matrix coordinate real {kind}")?;
    writeln!(w, "{p} {p} {}", entries.len())?;
    for (i, j, v) in entries {
        writeln!(w, "{} {} {}", i + 1, j + 1, fmt_float(v))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a sparse square matrix from Matrix Market coordinate format,
/// mirroring the stored triangle when the header declares symmetry.
pub fn read_sparse_matrix_market(path: &Path) -> Result<SparseMatrix> {
    let mut text = String::new();
    BufReader::new(File::open(path)?).read_to_string(&mut text)?;
    let (header, entries) = mm_entries(&text)?;
    let mut triplets = Vec::with_capacity(entries.len() * 2);
    for (i, j, v) in entries {
        triplets.push((i, j, v));
        if header.symmetry == MmSymmetry::Symmetric && i != j {
            triplets.push((j, i, v));
        }
    }
    SparseMatrix::from_triplets(header.rows, triplets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::band_pattern;
    use crate::sparse::SparseSymmetricMatrix;
    use ndarray::array;

    #[test]
    fn dataset_round_trip_is_value_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let x = array![
            [1.0 / 3.0, -2.5e-17, 3.0],
            [f64::MIN_POSITIVE, 1.0e300, -7.125],
        ];
        write_dataset_csv(&path, &x).unwrap();
        let back = read_dataset_csv(&path).unwrap();
        assert_eq!(x, back);
    }

    #[test]
    fn dataset_rejects_ragged_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "1.0,2.0\n3.0\n").unwrap();
        assert!(matches!(read_dataset_csv(&path), Err(Error::Parse(_))));
    }

    #[test]
    fn pattern_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.mtx");
        let g = band_pattern(6, 2).unwrap();
        write_pattern_matrix_market(&path, &g).unwrap();
        let back = read_pattern_matrix_market(&path).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn pattern_reader_adds_missing_diagonal() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nodiag.mtx");
        std::fs::write(
            &path,
            "%%MatrixMarket matrix coordinate pattern symmetric\n3 3 1\n2 1\n",
        )
        .unwrap();
        let g = read_pattern_matrix_market(&path).unwrap();
        for v in 0..3 {
            assert!(g.contains(v, v));
        }
        assert!(g.contains(0, 1));
    }

    #[test]
    fn symmetric_sparse_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("prec.mtx");
        let m = SparseSymmetricMatrix::tridiagonal(&[1.0, 1.64, 1.0], &[-0.8, -0.8])
            .unwrap()
            .into_sparse();
        write_sparse_matrix_market(&path, &m).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix coordinate real symmetric"));
        let back = read_sparse_matrix_market(&path).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn asymmetric_sparse_round_trip_uses_general() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("raw.mtx");
        let m = SparseMatrix::from_triplets(2, vec![(0, 0, 1.0), (0, 1, 0.5), (1, 1, 2.0)])
            .unwrap();
        write_sparse_matrix_market(&path, &m).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix coordinate real general"));
        let back = read_sparse_matrix_market(&path).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn rejects_malformed_banner() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.mtx");
        std::fs::write(&path, "not a matrix\n1 1 0\n").unwrap();
        assert!(matches!(
            read_pattern_matrix_market(&path),
            Err(Error::Parse(_))
        ));
    }
}
