//! CSV and JSON writers. Every float in a CSV is printed with 17
//! significant digits so files round-trip exactly.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use segrad_core::pde::SimState;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Header is `time,x,<field names>`; one row per node per snapshot.
pub fn write_snapshots<W: Write>(mut w: W, snapshots: &[SimState]) -> io::Result<()> {
    let Some(first) = snapshots.first() else {
        return Ok(());
    };
    write!(w, "time,x")?;
    for name in first.kind.field_names() {
        write!(w, ",{name}")?;
    }
    writeln!(w)?;
    for s in snapshots {
        let grid = s.grid();
        let t = fmt_f64(s.time);
        for i in 0..grid.n_nodes {
            write!(w, "{t},{}", fmt_f64(grid.x(i)))?;
            for f in &s.fields {
                write!(w, ",{}", fmt_f64(f.values[i]))?;
            }
            writeln!(w)?;
        }
    }
    w.flush()
}

pub fn write_snapshots_file(path: &Path, snapshots: &[SimState]) -> io::Result<()> {
    write_snapshots(BufWriter::new(fs::File::create(path)?), snapshots)
}

/// Writes `x,<columns>` rows from equally long columns.
pub fn write_columns(path: &Path, header: &[&str], columns: &[Vec<f64>]) -> io::Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{}", header.join(","))?;
    let n = columns.first().map_or(0, Vec::len);
    for i in 0..n {
        let row: Vec<String> = columns.iter().map(|c| fmt_f64(c[i])).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

/// Parses a snapshot CSV back into `(header, rows)`.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or("empty csv")?
        .split(',')
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|c| c.parse::<f64>().map_err(|e| format!("row {}: {e}", k + 2)))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != header.len() {
            return Err(format!("row {} has {} columns", k + 2, row.len()));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use segrad_core::pde::{Field, Grid1D, SimState, SystemKind};

    #[test]
    fn csv_round_trips_exactly() {
        let g = Grid1D::new(1.0, 5).unwrap();
        let f1 = Field::from_fn(g, |x| (x * 3.7).sin() + 4.0 / 3.0);
        let f2 = Field::from_fn(g, |x| x * x * 1e-7);
        let mut s = SimState::new(SystemKind::TwoSpecies, vec![f1.clone(), f2.clone()]).unwrap();
        s.time = 0.1 + 0.2;
        let mut buf = Vec::new();
        write_snapshots(&mut buf, &[s]).unwrap();
        let (h, rows) = read_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(h, ["time", "x", "n1", "n2"]);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r[0], 0.1 + 0.2);
            assert_eq!(r[1], g.x(i));
            assert_eq!(r[2], f1.values[i]);
            assert_eq!(r[3], f2.values[i]);
        }
    }
}
