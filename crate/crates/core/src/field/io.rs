//! Nodal fields as `i,j,comp,value` CSV.
//!
//! Components: `0` for scalars; `0, 1` for vectors; `0..4` row-major
//! (`xx, xy, yx, yy`) for tensors. Values are written with enough digits to
//! round-trip exactly.

use std::fmt::Write as _;
use std::path::Path;

use super::{Grid, ScalarField, TensorField, VectorField};
use crate::error::{Error, Result};
use crate::nfunction::Matrix2;

const HEADER: &str = "i,j,comp,value";

#[derive(Debug, Clone, PartialEq)]
pub enum CsvField {
    Scalar(ScalarField),
    Vector(VectorField),
    Tensor(TensorField),
}

impl CsvField {
    pub fn grid(&self) -> Grid {
        match self {
            CsvField::Scalar(f) => f.grid(),
            CsvField::Vector(f) => f.grid(),
            CsvField::Tensor(f) => f.grid(),
        }
    }

    fn components(&self) -> usize {
        match self {
            CsvField::Scalar(_) => 1,
            CsvField::Vector(_) => 2,
            CsvField::Tensor(_) => 4,
        }
    }

    fn value(&self, k: usize, c: usize) -> f64 {
        match self {
            CsvField::Scalar(f) => f.values()[k],
            CsvField::Vector(f) => f.at(k)[c],
            CsvField::Tensor(f) => f.at(k).0[c / 2][c % 2],
        }
    }
}

impl From<ScalarField> for CsvField {
    fn from(f: ScalarField) -> Self {
        CsvField::Scalar(f)
    }
}

impl From<VectorField> for CsvField {
    fn from(f: VectorField) -> Self {
        CsvField::Vector(f)
    }
}

impl From<TensorField> for CsvField {
    fn from(f: TensorField) -> Self {
        CsvField::Tensor(f)
    }
}

pub(crate) fn render_csv(field: &CsvField) -> String {
    let grid = field.grid();
    let mut out = String::with_capacity(grid.len() * field.components() * 32);
    out.push_str(HEADER);
    out.push('\n');
    for k in 0..grid.len() {
        let (i, j) = grid.coords(k);
        for c in 0..field.components() {
            let _ = writeln!(out, "{i},{j},{c},{:e}", field.value(k, c));
        }
    }
    out
}

pub fn write_csv(path: impl AsRef<Path>, field: &CsvField) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_csv(field)).map_err(|e| Error::io(path, e))
}

pub(crate) fn parse_csv(text: &str, context: &str) -> Result<CsvField> {
    let err = |message: String| Error::Parse {
        context: context.to_string(),
        message,
    };
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == HEADER => {}
        other => return Err(err(format!("expected header `{HEADER}`, got {other:?}"))),
    }
    let mut rows = Vec::new();
    for (ln, line) in lines.enumerate() {
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(err(format!("line {}: expected 4 columns", ln + 2)));
        }
        let idx = |s: &str| s.parse::<usize>().map_err(|e| err(format!("line {}: {e}", ln + 2)));
        let value = parts[3]
            .parse::<f64>()
            .map_err(|e| err(format!("line {}: {e}", ln + 2)))?;
        rows.push((idx(parts[0])?, idx(parts[1])?, idx(parts[2])?, value));
    }
    let n = rows.iter().map(|r| r.0.max(r.1)).max().ok_or_else(|| err("no data rows".into()))?;
    let grid = Grid::new(n)?;
    let comps = rows.iter().map(|r| r.2).max().unwrap_or(0) + 1;
    if !matches!(comps, 1 | 2 | 4) {
        return Err(err(format!("unsupported component count {comps}")));
    }
    if rows.len() != grid.len() * comps {
        return Err(err(format!(
            "expected {} rows for a {n}x{n} grid, got {}",
            grid.len() * comps,
            rows.len()
        )));
    }
    let mut data = vec![f64::NAN; grid.len() * comps];
    for (i, j, c, v) in rows {
        data[grid.index(i, j) * comps + c] = v;
    }
    if data.iter().any(|v| v.is_nan()) {
        return Err(err("missing or duplicate entries".into()));
    }
    let field = match comps {
        1 => CsvField::Scalar(ScalarField::from_values(grid, data)?),
        2 => {
            let x = data.iter().step_by(2).copied().collect();
            let y = data.iter().skip(1).step_by(2).copied().collect();
            CsvField::Vector(VectorField::from_components(grid, x, y)?)
        }
        _ => CsvField::Tensor(TensorField::from_values(
            grid,
            data.chunks_exact(4).map(|c| Matrix2::new(c[0], c[1], c[2], c[3])).collect(),
        )?),
    };
    Ok(field)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<CsvField> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text, &path.display().to_string())
}
