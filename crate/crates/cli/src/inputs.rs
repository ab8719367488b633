//! Vector files, CSV tables and the `--source` grammar.
//!
//! ```text
//! builtin:constant:<vecfile>        g(t) = c
//! builtin:sin:<vecfile>:<omega>     g(t) = sin(omega t) a
//! builtin:poly:<coeff-table>        g(t) = sum_i t^i c_i, row i of the CSV holds c_i
//! table:<csvfile>                   rows `t, g_1, ..., g_n`, natural cubic spline
//! ```

use std::fs;
use std::path::Path;

use blockexp::{ConstantSource, PolynomialSource, SinusoidSource, SourceTerm, TableSource};

use crate::error::InputError;

/// One value per line; blank lines and lines starting with `#` are skipped.
pub fn read_vector(path: &Path) -> Result<Vec<f64>, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        out.push(parse_real(t, path, i + 1)?);
    }
    if out.is_empty() {
        return Err(InputError::parse(path, 1, "no values"));
    }
    Ok(out)
}

/// Comma-separated numeric rows with an optional non-numeric header line.
pub fn read_csv_table(path: &Path) -> Result<Vec<Vec<f64>>, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError::io(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut seen_line = false;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split(',').map(str::trim).collect();
        let first_line = !seen_line;
        seen_line = true;
        if first_line && fields[0].parse::<f64>().is_err() {
            continue;
        }
        let row = fields
            .iter()
            .map(|f| parse_real(f, path, lineno))
            .collect::<Result<Vec<f64>, _>>()?;
        if let Some(prev) = rows.first() {
            if prev.len() != row.len() {
                return Err(InputError::parse(
                    path,
                    lineno,
                    format!("expected {} columns, got {}", prev.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(InputError::parse(path, 1, "no data rows"));
    }
    Ok(rows)
}

fn parse_real(s: &str, path: &Path, line: usize) -> Result<f64, InputError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(InputError::parse(path, line, format!("invalid number `{s}`"))),
    }
}

fn invalid(message: impl Into<String>) -> InputError {
    InputError::Invalid {
        flag: "--source",
        message: message.into(),
    }
}

/// Builds the source named by a `--source` argument.
pub fn parse_source(spec: &str, t_end: f64) -> Result<Box<dyn SourceTerm>, InputError> {
    let library_error = |e: blockexp::Error| invalid(format!("`{spec}`: {e}"));
    if let Some(rest) = spec.strip_prefix("builtin:constant:") {
        let c = read_vector(Path::new(rest))?;
        return Ok(Box::new(ConstantSource::new(c).map_err(library_error)?));
    }
    if let Some(rest) = spec.strip_prefix("builtin:sin:") {
        let (file, omega) = rest
            .rsplit_once(':')
            .ok_or_else(|| invalid(format!("`{spec}`: expected builtin:sin:<vecfile>:<omega>")))?;
        let omega: f64 = omega
            .parse()
            .map_err(|_| invalid(format!("`{spec}`: invalid frequency `{omega}`")))?;
        let a = read_vector(Path::new(file))?;
        return Ok(Box::new(SinusoidSource::new(a, omega).map_err(library_error)?));
    }
    if let Some(rest) = spec.strip_prefix("builtin:poly:") {
        let rows = read_csv_table(Path::new(rest))?;
        return Ok(Box::new(PolynomialSource::new(rows).map_err(library_error)?));
    }
    if let Some(rest) = spec.strip_prefix("table:") {
        let path = Path::new(rest);
        let rows = read_csv_table(path)?;
        if rows[0].len() < 2 {
            return Err(InputError::parse(path, 1, "rows must read `t, g_1, ..., g_n`"));
        }
        let times: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let values: Vec<Vec<f64>> = rows.iter().map(|r| r[1..].to_vec()).collect();
        let table = TableSource::new(times, values).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        let (lo, hi) = table.span();
        if lo > 0.0 || hi < t_end {
            return Err(invalid(format!(
                "{}: table covers [{lo}, {hi}] but the solve needs [0, {t_end}]",
                path.display()
            )));
        }
        return Ok(Box::new(table));
    }
    Err(invalid(format!(
        "unrecognised source `{spec}`; expected builtin:constant:<file>, \
         builtin:sin:<file>:<omega>, builtin:poly:<file> or table:<file>"
    )))
}
