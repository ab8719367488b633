//! Matrix Market coordinate reader (real, general or symmetric).

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use blockexp::CsrMatrix;

use crate::error::InputError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

pub fn parse_matrix_market(path: &Path) -> Result<CsrMatrix, InputError> {
    let file = File::open(path).map_err(|e| InputError::io(path, e))?;
    read_matrix_market(BufReader::new(file), path)
}

/// Parses from any reader; `path` is only used in error messages.
pub fn read_matrix_market<R: BufRead>(reader: R, path: &Path) -> Result<CsrMatrix, InputError> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines
        .next()
        .ok_or_else(|| InputError::parse(path, 1, "empty file"))?;
    let header = header.map_err(|e| InputError::io(path, e))?;
    let symmetry = parse_header(&header, path)?;

    let mut size: Option<(usize, usize, usize)> = None;
    let mut size_line = 1;
    let mut triplets = Vec::new();
    let mut stored = 0usize;
    for (lineno, line) in lines {
        let line = line.map_err(|e| InputError::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let Some((rows, cols, nnz)) = size else {
            if fields.len() != 3 {
                return Err(InputError::parse(path, lineno, "expected `rows cols entries`"));
            }
            let rows = parse_usize(fields[0], path, lineno)?;
            let cols = parse_usize(fields[1], path, lineno)?;
            let nnz = parse_usize(fields[2], path, lineno)?;
            if rows == 0 || cols == 0 {
                return Err(InputError::parse(path, lineno, "matrix dimensions must be positive"));
            }
            if rows != cols {
                return Err(InputError::parse(path, lineno, format!("operator must be square, got {rows}x{cols}")));
            }
            size = Some((rows, cols, nnz));
            size_line = lineno;
            triplets.reserve(nnz);
            continue;
        };
        if fields.len() != 3 {
            return Err(InputError::parse(
                path,
                lineno,
                format!("expected `row col value`, got {} fields", fields.len()),
            ));
        }
        let i = parse_usize(fields[0], path, lineno)?;
        let j = parse_usize(fields[1], path, lineno)?;
        let v: f64 = fields[2]
            .parse()
            .map_err(|_| InputError::parse(path, lineno, format!("invalid value `{}`", fields[2])))?;
        if !v.is_finite() {
            return Err(InputError::parse(path, lineno, format!("non-finite value `{}`", fields[2])));
        }
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(InputError::parse(
                path,
                lineno,
                format!("index ({i}, {j}) outside a {rows}x{cols} matrix (indices are 1-based)"),
            ));
        }
        if symmetry == Symmetry::Symmetric && j > i {
            return Err(InputError::parse(path, lineno, "symmetric storage must list the lower triangle only"));
        }
        stored += 1;
        if stored > nnz {
            return Err(InputError::parse(path, lineno, format!("more than the declared {nnz} entries")));
        }
        triplets.push((i - 1, j - 1, v));
        if symmetry == Symmetry::Symmetric && i != j {
            triplets.push((j - 1, i - 1, v));
        }
    }

    let (rows, cols, nnz) = size.ok_or_else(|| InputError::parse(path, 1, "missing size line"))?;
    if stored != nnz {
        return Err(InputError::parse(path, size_line, format!("declared {nnz} entries but found {stored}")));
    }
    CsrMatrix::from_triplets(rows, cols, &triplets).map_err(|e| InputError::parse(path, 1, e.to_string()))
}

fn parse_header(line: &str, path: &Path) -> Result<Symmetry, InputError> {
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(InputError::parse(path, 1, "missing `%%MatrixMarket` banner"));
    }
    if tokens.len() != 5 {
        return Err(InputError::parse(path, 1, "banner must read `%%MatrixMarket matrix coordinate <field> <symmetry>`"));
    }
    if tokens[1] != "matrix" {
        return Err(InputError::parse(path, 1, format!("unknown object `{}`", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(InputError::Unsupported {
            path: path.to_path_buf(),
            what: format!("`{}` layout (only `coordinate` is read)", tokens[2]),
        });
    }
    match tokens[3].as_str() {
        "real" | "double" => {}
        "complex" | "pattern" | "integer" => {
            return Err(InputError::Unsupported {
                path: path.to_path_buf(),
                what: format!("`{}` field", tokens[3]),
            })
        }
        other => return Err(InputError::parse(path, 1, format!("unknown field `{other}`"))),
    }
    match tokens[4].as_str() {
        "general" => Ok(Symmetry::General),
        "symmetric" => Ok(Symmetry::Symmetric),
        "skew-symmetric" | "hermitian" => Err(InputError::Unsupported {
            path: path.to_path_buf(),
            what: format!("`{}` symmetry", tokens[4]),
        }),
        other => Err(InputError::parse(path, 1, format!("unknown symmetry `{other}`"))),
    }
}

fn parse_usize(s: &str, path: &Path, line: usize) -> Result<usize, InputError> {
    s.parse()
        .map_err(|_| InputError::parse(path, line, format!("invalid integer `{s}`")))
}
