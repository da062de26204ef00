use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::continuation::BranchSample;
use crate::numerics::GridFunction;

use super::RunConfig;

fn sci(v: f64) -> String {
    // 17 significant digits round-trips every f64.
    format!("{v:.16e}")
}

fn open_with_header(path: &Path, cfg: &RunConfig) -> io::Result<BufWriter<File>> {
    let mut f = BufWriter::new(File::create(path)?);
    let echo = serde_json::to_string(cfg).map_err(io::Error::other)?;
    writeln!(f, "# config {echo}")?;
    Ok(f)
}

fn csv_error(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

pub fn write_solution_csv(
    path: &Path,
    cfg: &RunConfig,
    u: &GridFunction,
    w: &GridFunction,
) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(open_with_header(path, cfg)?);
    out.write_record(["x", "u", "w"]).map_err(csv_error)?;
    let grid = u.grid();
    for (i, (uv, wv)) in u.values().iter().zip(w.values()).enumerate() {
        out.write_record([sci(grid.node(i)), sci(*uv), sci(*wv)])
            .map_err(csv_error)?;
    }
    out.flush()
}

pub fn write_sweep_csv(path: &Path, cfg: &RunConfig, samples: &[BranchSample]) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(open_with_header(path, cfg)?);
    out.write_record(["lambda", "sup_norm", "R", "iterations", "status"])
        .map_err(csv_error)?;
    for s in samples {
        let status = serde_json::to_value(s.status)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        out.write_record([
            sci(s.lambda),
            sci(s.sup_norm),
            sci(s.r),
            s.iterations.to_string(),
            status,
        ])
        .map_err(csv_error)?;
    }
    out.flush()
}

/// Columns of a solution CSV.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolutionTable {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
}

pub fn read_solution_csv(path: &Path) -> Result<SolutionTable, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x", "u", "w"] {
        return Err(format!("{}: expected columns x,u,w", path.display()));
    }
    let mut t = SolutionTable::default();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let mut vals = [0.0; 3];
        for (slot, field) in vals.iter_mut().zip(rec.iter()) {
            *slot = field
                .trim()
                .parse()
                .map_err(|_| format!("row {}: bad number {field:?}", line + 1))?;
        }
        if rec.len() != 3 {
            return Err(format!("row {}: expected 3 fields", line + 1));
        }
        t.x.push(vals[0]);
        t.u.push(vals[1]);
        t.w.push(vals[2]);
    }
    Ok(t)
}
