//! CSV writers. Every real is printed as `{:.16e}` (17 significant digits),
//! so identical runs produce byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use blockexp::CycleRecord;

use crate::error::InputError;

pub fn write_solution(path: &Path, times: &[f64], states: &[Vec<f64>]) -> Result<(), InputError> {
    let io = |e| InputError::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    let n = states.first().map_or(0, Vec::len);
    let mut header = String::from("t");
    for i in 1..=n {
        header.push_str(&format!(",y_{i}"));
    }
    writeln!(w, "{header}").map_err(io)?;
    for (t, y) in times.iter().zip(states) {
        let mut line = format!("{t:.16e}");
        for v in y {
            line.push_str(&format!(",{v:.16e}"));
        }
        writeln!(w, "{line}").map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn write_residuals(path: &Path, history: &[CycleRecord]) -> Result<(), InputError> {
    let io = |e| InputError::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(w, "cycle,max_rel_residual,rank_m,refit_residual").map_err(io)?;
    for h in history {
        writeln!(
            w,
            "{},{:.16e},{},{:.16e}",
            h.cycle, h.max_rel_residual, h.rank, h.refit_residual
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

