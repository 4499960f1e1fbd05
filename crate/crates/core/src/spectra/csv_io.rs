//! The spectrum CSV: one row per level or matched pair, sorted by energy.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::SpectrumReport;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub index: usize,
    #[serde(rename = "E_H")]
    pub e_h: Option<String>,
    #[serde(rename = "E_Htilde")]
    pub e_htilde: Option<String>,
    /// `true`, `false`, or `beyond` for unpaired levels above the window.
    pub matched: String,
    pub abs_diff: Option<String>,
    /// Number, or `ZERO_MODE` when `A` annihilates the level.
    pub intertwine_residual: Option<String>,
}

/// Twelve significant digits, shortest form.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", x);
    }
    let exp = x.abs().log10().floor() as i32;
    let s = if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{:.11e}", x);
        let (mant, e) = s.split_once('e').expect("exponent form");
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{}e{}", mant, e)
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn rows(report: &SpectrumReport) -> Vec<CsvRow> {
    let m = &report.matching;
    let resid = |i: usize| {
        let r = &report.intertwine[i];
        Some(if r.zero_mode { "ZERO_MODE".to_string() } else { fmt12(r.residual) })
    };
    let mut out: Vec<(f64, CsvRow)> = Vec::new();
    let blank = |matched: &str| CsvRow { index: 0, e_h: None, e_htilde: None, matched: matched.into(), abs_diff: None, intertwine_residual: None };
    for lm in &m.matches {
        let (a, b) = (report.eigs_h[lm.index_h], report.eigs_htilde[lm.index_htilde]);
        let mut row = blank("true");
        row.e_h = Some(fmt12(a));
        row.e_htilde = Some(fmt12(b));
        row.abs_diff = Some(fmt12(lm.abs_diff));
        row.intertwine_residual = resid(lm.index_h);
        out.push((a.min(b), row));
    }
    for (list, tag) in [(&m.unmatched_h, "false"), (&m.beyond_window_h, "beyond")] {
        for &i in list {
            let mut row = blank(tag);
            row.e_h = Some(fmt12(report.eigs_h[i]));
            row.intertwine_residual = resid(i);
            out.push((report.eigs_h[i], row));
        }
    }
    for (list, tag) in [(&m.unmatched_htilde, "false"), (&m.beyond_window_htilde, "beyond")] {
        for &j in list {
            let mut row = blank(tag);
            row.e_htilde = Some(fmt12(report.eigs_htilde[j]));
            out.push((report.eigs_htilde[j], row));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out.into_iter()
        .enumerate()
        .map(|(i, (_, mut row))| {
            row.index = i;
            row
        })
        .collect()
}

pub fn write_csv<W: Write>(report: &SpectrumReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows(report) {
        w.serialize(row).map_err(|e| Error::InvalidRequest(format!("writing CSV: {}", e)))?;
    }
    w.flush().map_err(|e| Error::InvalidRequest(format!("writing CSV: {}", e)))?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| Error::InvalidRequest(format!("reading CSV: {}", e)))?.clone();
    let expected = ["index", "E_H", "E_Htilde", "matched", "abs_diff", "intertwine_residual"];
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::InvalidRequest(format!("unexpected CSV header: {}", header.iter().collect::<Vec<_>>().join(","))));
    }
    r.deserialize().map(|row| row.map_err(|e| Error::InvalidRequest(format!("reading CSV: {}", e)))).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub rows: usize,
    pub max_diff: f64,
    /// One line per disagreement.
    pub differences: Vec<String>,
    pub equal: bool,
}

fn value(cell: &Option<String>) -> Result<Option<f64>> {
    cell.as_deref()
        .map(|s| s.parse::<f64>().map_err(|_| Error::InvalidRequest(format!("not a number: '{}'", s))))
        .transpose()
}

/// Row-by-row comparison of energies within an absolute tolerance.
pub fn compare_csv(a: &[CsvRow], b: &[CsvRow], tol: f64) -> Result<CompareReport> {
    let mut differences = Vec::new();
    let mut max_diff: f64 = 0.0;
    if a.len() != b.len() {
        differences.push(format!("row count {} vs {}", a.len(), b.len()));
    }
    for (ra, rb) in a.iter().zip(b) {
        for (name, ca, cb) in [("E_H", &ra.e_h, &rb.e_h), ("E_Htilde", &ra.e_htilde, &rb.e_htilde)] {
            match (value(ca)?, value(cb)?) {
                (Some(x), Some(y)) => {
                    let d = (x - y).abs();
                    max_diff = max_diff.max(d);
                    if d > tol {
                        differences.push(format!("row {} {}: {} vs {} (diff {})", ra.index, name, fmt12(x), fmt12(y), fmt12(d)));
                    }
                }
                (None, None) => {}
                _ => differences.push(format!("row {} {}: present in only one file", ra.index, name)),
            }
        }
    }
    Ok(CompareReport { rows: a.len().max(b.len()), max_diff, equal: differences.is_empty(), differences })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt12(2.0), "2");
        assert_eq!(fmt12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt12(-1234.5678901234567), "-1234.56789012");
        assert_eq!(fmt12(1.5e-9), "1.5e-9");
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(fmt12(-1e-13).parse::<f64>().unwrap(), -1e-13);
    }
}
