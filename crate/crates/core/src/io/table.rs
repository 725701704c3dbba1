//! Plot-ready CSV tables and sweep ingestion.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::fitting::{SweepDataset, SweepKind};

/// How numbers are rendered in written tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NumberFormat {
    /// Scientific notation with 12 significant digits.
    #[default]
    Sig12,
    /// Shortest representation that parses back to the same `f64`.
    Exact,
}

impl NumberFormat {
    pub fn render(self, v: f64) -> String {
        match self {
            NumberFormat::Sig12 => format!("{v:.11e}"),
            NumberFormat::Exact => format!("{v:e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Text(String),
}

/// One record of a result table. Column names carry units, e.g. `radius_m`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultRow {
    pub fields: Vec<(String, Value)>,
}

impl ResultRow {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num(mut self, key: impl Into<String>, v: f64) -> Self {
        self.fields.push((key.into(), Value::Num(v)));
        self
    }

    pub fn text(mut self, key: impl Into<String>, s: impl Into<String>) -> Self {
        self.fields.push((key.into(), Value::Text(s.into())));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn get_num(&self, key: &str) -> Option<f64> {
        match self.get(key)? {
            Value::Num(v) => Some(*v),
            Value::Text(_) => None,
        }
    }

    pub fn get_text(&self, key: &str) -> Option<&str> {
        match self.get(key)? {
            Value::Text(s) => Some(s),
            Value::Num(_) => None,
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    let row = e
        .position()
        .map(|p| format!(" at line {}", p.line()))
        .unwrap_or_default();
    Error::data(format!("CSV{row}: {e}"))
}

/// Writes rows sharing one header. All rows must have the same columns in
/// the same order.
pub fn write_rows<W: Write>(out: W, rows: &[ResultRow], format: NumberFormat) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    if let Some(first) = rows.first() {
        w.write_record(first.fields.iter().map(|(k, _)| k.as_str()))
            .map_err(csv_err)?;
        for (i, row) in rows.iter().enumerate() {
            let same = row.fields.len() == first.fields.len()
                && row.fields.iter().zip(&first.fields).all(|((a, _), (b, _))| a == b);
            if !same {
                return Err(Error::data(format!("row {i} does not match the table header")));
            }
            w.write_record(row.fields.iter().map(|(_, v)| match v {
                Value::Num(x) => format.render(*x),
                Value::Text(s) => s.clone(),
            }))
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::data(e.to_string()))?;
    Ok(())
}

pub fn rows_to_string(rows: &[ResultRow], format: NumberFormat) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows, format)?;
    String::from_utf8(buf).map_err(|e| Error::data(e.to_string()))
}

/// Reads a table written by [`write_rows`]. Cells that parse as `f64`
/// become numbers, everything else text.
pub fn read_rows<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    r.records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            Ok(ResultRow {
                fields: header
                    .iter()
                    .zip(rec.iter())
                    .map(|(k, cell)| {
                        let v = cell
                            .parse::<f64>()
                            .map(Value::Num)
                            .unwrap_or_else(|_| Value::Text(cell.to_string()));
                        (k.clone(), v)
                    })
                    .collect(),
            })
        })
        .collect()
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a sweep CSV.
///
/// The abscissa column is `voltage_V` for I–V data and `theta_rad` or
/// `theta_deg` for polarisation data (degrees are converted to radians).
/// `current_A` is required and `sigma_A` optional. Errors name the data row
/// (1-based, comments and header excluded) and its line in the file.
pub fn ingest_sweep_csv(path: &Path, kind: SweepKind) -> Result<SweepDataset> {
    read_sweep(open(path)?, kind)
}

pub fn read_sweep<R: Read>(input: R, kind: SweepKind) -> Result<SweepDataset> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    let col = |name: &str| header.iter().position(|h| h.trim() == name);
    let (x_col, x_scale) = match kind {
        SweepKind::Iv => (
            col("voltage_V").ok_or_else(|| Error::data("missing column voltage_V"))?,
            1.0,
        ),
        SweepKind::Polarization => match (col("theta_rad"), col("theta_deg")) {
            (Some(c), _) => (c, 1.0),
            (None, Some(c)) => (c, std::f64::consts::PI / 180.0),
            (None, None) => return Err(Error::data("missing column theta_rad or theta_deg")),
        },
    };
    let y_col = col("current_A").ok_or_else(|| Error::data("missing column current_A"))?;
    let s_col = col("sigma_A");

    let (mut x, mut y, mut sigma) = (Vec::new(), Vec::new(), Vec::new());
    for (i, rec) in r.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        let cell = |c: usize, name: &str| -> Result<f64> {
            let raw = rec
                .get(c)
                .ok_or_else(|| Error::data(format!("row {row} (line {line}): missing {name}")))?;
            match raw.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::data(format!(
                    "row {row} (line {line}): {name} `{raw}` is not a finite number"
                ))),
            }
        };
        let xv = cell(x_col, header.get(x_col).unwrap_or("x"))? * x_scale;
        let yv = cell(y_col, "current_A")?;
        if yv < 0.0 {
            return Err(Error::data(format!("row {row} (line {line}): negative current {yv}")));
        }
        if kind == SweepKind::Iv {
            if let Some(&prev) = x.last() {
                let ok = match x.len() {
                    1 => xv != prev,
                    _ if x[1] > x[0] => xv > prev,
                    _ => xv < prev,
                };
                if !ok {
                    return Err(Error::data(format!(
                        "row {row} (line {line}): voltages are not strictly monotone"
                    )));
                }
            }
        }
        if let Some(c) = s_col {
            let s = cell(c, "sigma_A")?;
            if s <= 0.0 {
                return Err(Error::data(format!(
                    "row {row} (line {line}): sigma_A must be positive"
                )));
            }
            sigma.push(s);
        }
        x.push(xv);
        y.push(yv);
    }
    SweepDataset::new(x, y, s_col.map(|_| sigma), kind)
}

/// Writes a sweep so that [`read_sweep`] returns bit-identical values.
pub fn write_sweep<W: Write>(out: W, data: &SweepDataset) -> Result<()> {
    let x_key = match data.kind {
        SweepKind::Iv => "voltage_V",
        SweepKind::Polarization => "theta_rad",
    };
    let rows: Vec<ResultRow> = (0..data.len())
        .map(|i| {
            let row = ResultRow::new().num(x_key, data.x[i]).num("current_A", data.y[i]);
            match &data.sigma {
                Some(s) => row.num("sigma_A", s[i]),
                None => row,
            }
        })
        .collect();
    if rows.is_empty() {
        return Err(Error::data("cannot write an empty sweep"));
    }
    write_rows(out, &rows, NumberFormat::Exact)
}

pub fn sweep_to_string(data: &SweepDataset) -> Result<String> {
    let mut buf = Vec::new();
    write_sweep(&mut buf, data)?;
    String::from_utf8(buf).map_err(|e| Error::data(e.to_string()))
}

/// Writes per-pulse electron counts as `pulse,electrons`.
pub fn counts_to_string(counts: &[u64]) -> String {
    let mut s = String::with_capacity(counts.len() * 8 + 16);
    s.push_str("pulse,electrons\n");
    for (i, c) in counts.iter().enumerate() {
        s.push_str(&format!("{i},{c}\n"));
    }
    s
}

/// Reads the `electrons` column of a pulse-count table.
pub fn read_counts(path: &Path) -> Result<Vec<u64>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(open(path)?);
    let c = r
        .headers()
        .map_err(csv_err)?
        .iter()
        .position(|h| h.trim() == "electrons")
        .ok_or_else(|| Error::data("missing column electrons"))?;
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(csv_err)?;
            let raw = rec.get(c).unwrap_or("");
            raw.trim()
                .parse()
                .map_err(|_| Error::data(format!("row {}: electrons `{raw}` is not a count", i + 1)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str, kind: SweepKind) -> Result<SweepDataset> {
        read_sweep(text.as_bytes(), kind)
    }

    #[test]
    fn two_rows() {
        let d = read("voltage_V,current_A\n1000,1e-12\n1100,2e-12\n", SweepKind::Iv).unwrap();
        assert_eq!(d.len(), 2);
        assert!(d.sigma.is_none());
    }

    #[test]
    fn comments_sigma_and_degrees() {
        let text = "# scan\ntheta_deg,current_A,sigma_A\n0,1,0.1\n# mid-file note\n90,2,0.1\n180,3,0.1\n";
        let d = read(text, SweepKind::Polarization).unwrap();
        assert_eq!(d.x[1], std::f64::consts::FRAC_PI_2);
        assert_eq!(d.sigma.unwrap().len(), 3);
    }

    #[test]
    fn row_errors() {
        let e = read("voltage_V,current_A\n1,1\n2,-1\n", SweepKind::Iv)
            .unwrap_err()
            .to_string();
        assert!(e.contains("row 2") && e.contains("negative"), "{e}");
        let e = read("voltage_V,current_A\n1,1\n2,abc\n", SweepKind::Iv)
            .unwrap_err()
            .to_string();
        assert!(e.contains("row 2"), "{e}");
        let e = read("voltage_V,current_A\n1,1\n2,1\n1.5,1\n", SweepKind::Iv)
            .unwrap_err()
            .to_string();
        assert!(e.contains("row 3") && e.contains("monotone"), "{e}");
        let e = read("volts,current_A\n1,1\n", SweepKind::Iv).unwrap_err().to_string();
        assert!(e.contains("voltage_V"), "{e}");
        assert!(read("voltage_V,current_A\n1,1\n", SweepKind::Polarization).is_err());
        assert_eq!(
            read("voltage_V,current_A\n3,1\n2,1\n1,1\n", SweepKind::Iv)
                .unwrap()
                .len(),
            3
        );
    }

    #[test]
    fn sweep_round_trip_bit_exact() {
        let x: Vec<f64> = (0..20).map(|i| 600.0 + (i as f64).sqrt() * 31.7).collect();
        let y: Vec<f64> = x.iter().map(|u| (u / 97.0).exp() * 1e-15 / 3.0).collect();
        let s: Vec<f64> = y.iter().map(|v| v * 0.02).collect();
        let d = SweepDataset::new(x, y, Some(s), SweepKind::Iv).unwrap();
        let back = read(&sweep_to_string(&d).unwrap(), SweepKind::Iv).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn rows_round_trip() {
        let rows = vec![
            ResultRow::new().text("param", "r").num("value_m", 1.0 / 3.0),
            ResultRow::new().text("param", "R").num("value_m", -2.5e-300),
        ];
        let exact = read_rows(rows_to_string(&rows, NumberFormat::Exact).unwrap().as_bytes()).unwrap();
        assert_eq!(exact, rows);
        let s1 = rows_to_string(&rows, NumberFormat::Sig12).unwrap();
        let again = read_rows(s1.as_bytes()).unwrap();
        assert_eq!(rows_to_string(&again, NumberFormat::Sig12).unwrap(), s1);
        assert!(s1.contains("3.33333333333e-1"));
    }

    #[test]
    fn mismatched_rows_rejected() {
        let rows = vec![ResultRow::new().num("a", 1.0), ResultRow::new().num("b", 1.0)];
        assert!(rows_to_string(&rows, NumberFormat::Exact).is_err());
    }
}
