//! CSV formats: real signal matrices, JPSD tables and feature matrices.

use nalgebra::DMatrix;

use super::fmt_f64;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::harmonic::{JointBasis, TimeVertexSignal};
use crate::stationarity::JpsdVector;

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn parse_number(field: &str, row: usize, col: usize) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("row {row}, column {col}: {field:?} is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("row {row}, column {col}: non-finite value")));
    }
    Ok(v)
}

/// Headerless CSV, one row per vertex and one column per time step.
pub fn parse_signal_csv(text: &str) -> Result<TimeVertexSignal> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (r, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let row = rec
            .iter()
            .enumerate()
            .map(|(c, f)| parse_number(f, r, c))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse(format!(
                    "row {r} has {} columns, row 0 has {}",
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() || rows[0].is_empty() {
        return Err(Error::Parse("signal CSV is empty".into()));
    }
    let (n, m) = (rows.len(), rows[0].len());
    Ok(TimeVertexSignal::from_real(&DMatrix::from_fn(n, m, |r, c| rows[r][c])))
}

/// Fails for complex signals, which only the TVSG format can hold.
pub fn write_signal_csv(x: &TimeVertexSignal) -> Result<String> {
    if !x.is_real() {
        return Err(Error::InvalidParameter(
            "complex signal cannot be written as CSV; use the TVSG format".into(),
        ));
    }
    let mut out = String::new();
    for r in 0..x.n_vertices() {
        let row: Vec<String> = (0..x.n_times()).map(|c| fmt_f64(x.data()[(r, c)].re)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub const JPSD_HEADER: [&str; 8] = ["j", "ell", "k", "lambda_g", "lambda_d", "omega_g", "omega_d", "theta"];

/// One row per joint index with its frequency bookkeeping.
pub fn write_jpsd_csv(jb: &JointBasis, theta: &JpsdVector) -> Result<String> {
    if theta.len() != jb.len() {
        return Err(Error::dimension(jb.len(), theta.len()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(JPSD_HEADER).map_err(csv_error)?;
    let (g, t) = (jb.graph(), jb.time());
    for (j, th) in theta.as_slice().iter().enumerate() {
        let (l, k) = jb.pair(j);
        w.write_record([
            j.to_string(),
            l.to_string(),
            k.to_string(),
            fmt_f64(g.eigenvalues()[l]),
            fmt_f64(t.eigenvalues()[k]),
            fmt_f64(g.frequencies()[l]),
            fmt_f64(t.frequencies()[k]),
            fmt_f64(*th),
        ])
        .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// A parsed JPSD table: the density and its `N x M` shape.
#[derive(Debug, Clone, PartialEq)]
pub struct JpsdTable {
    pub n: usize,
    pub m: usize,
    pub theta: JpsdVector,
}

/// Parses a JPSD table. Rows must be in `j` order and consistent with
/// `j = ell + k N`.
pub fn parse_jpsd_csv(text: &str) -> Result<JpsdTable> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_error)?.clone();
    if header.iter().collect::<Vec<_>>() != JPSD_HEADER {
        return Err(Error::Parse(format!("unexpected JPSD header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut rows = Vec::new();
    for (r, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let index = |c: usize| {
            rec[c]
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("row {r}: {:?} is not an index", &rec[c])))
        };
        let (j, l, k) = (index(0)?, index(1)?, index(2)?);
        for c in 3..7 {
            parse_number(&rec[c], r, c)?;
        }
        rows.push((j, l, k, parse_number(&rec[7], r, 7)?));
    }
    if rows.is_empty() {
        return Err(Error::Parse("JPSD table has no rows".into()));
    }
    let n = rows.iter().map(|r| r.1).max().unwrap_or(0) + 1;
    let m = rows.iter().map(|r| r.2).max().unwrap_or(0) + 1;
    if n.checked_mul(m) != Some(rows.len()) {
        return Err(Error::Parse(format!("{} rows do not fill a {n}x{m} grid", rows.len())));
    }
    for (pos, &(j, l, k, _)) in rows.iter().enumerate() {
        if j != pos || j != l + k * n {
            return Err(Error::Parse(format!("row {pos}: index j={j} ell={l} k={k} out of order")));
        }
    }
    let theta = JpsdVector::new(rows.into_iter().map(|r| r.3).collect()).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(JpsdTable { n, m, theta })
}

/// `label,f_0,...,f_{D-1}` then one row per sample.
pub fn write_features_csv(fm: &FeatureMatrix) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["label".to_string()];
    header.extend((0..fm.n_features()).map(|i| format!("f_{i}")));
    w.write_record(&header).map_err(csv_error)?;
    for (r, label) in fm.labels.iter().enumerate() {
        let mut rec = vec![label.clone()];
        rec.extend(fm.values.row(r).iter().map(|v| fmt_f64(*v)));
        w.write_record(&rec).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}
