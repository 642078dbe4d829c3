//! Report JSON, plot-data CSV and the plain-text summary table.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use hdpath_core::certify::{CertReport, CertRow};
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub d: usize,
    pub fidelity: f64,
    pub fidelity_std: Option<f64>,
    pub schmidt: usize,
    pub eof: Option<f64>,
    pub eof_std: Option<f64>,
    pub h_down_m: f64,
    pub h_up_mm: f64,
    pub h_down_mub: f64,
    pub h_up_mub: Option<f64>,
    #[serde(default)]
    pub visibility: Option<f64>,
}

impl From<&CertRow> for ReportRow {
    fn from(r: &CertRow) -> Self {
        Self {
            d: r.d,
            fidelity: r.fidelity,
            fidelity_std: r.fidelity_std,
            schmidt: r.schmidt,
            eof: r.eof,
            eof_std: r.eof_std,
            h_down_m: r.h_down_m,
            h_up_mm: r.h_up_mm,
            h_down_mub: r.h_down_mub,
            h_up_mub: r.h_up_mub,
            visibility: r.visibility,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub seed: u64,
    pub n_resamples: usize,
    /// Per-cell mismatched population, when it was assumed rather than measured.
    pub crosstalk_assumed: Option<f64>,
    pub normalization: String,
    pub data_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the certification options and the counts file.
    pub config_hash: String,
    pub input_sha256: String,
    pub seed: u64,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub rows: Vec<ReportRow>,
    pub meta: ReportMeta,
    pub provenance: Provenance,
}

impl ReportDocument {
    pub fn new(report: &CertReport, meta: ReportMeta, provenance: Provenance) -> Self {
        Self { rows: report.rows.iter().map(ReportRow::from).collect(), meta, provenance }
    }

    pub fn row(&self, d: usize) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.d == d)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(PipelineError::io(path))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(PipelineError::io(path))?;
        serde_json::from_str(&text).map_err(PipelineError::json(path))
    }

    /// Columns `d,F,F_sep,k_witness,eof`; `eof` is empty where undefined.
    pub fn write_plot_to<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["d", "F", "F_sep", "k_witness", "eof"])?;
        for r in &self.rows {
            w.write_record([
                r.d.to_string(),
                r.fidelity.to_string(),
                (1.0 / r.d as f64).to_string(),
                r.schmidt.to_string(),
                r.eof.map(|e| e.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_plot(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(PipelineError::io(path))?;
        self.write_plot_to(std::io::BufWriter::new(file)).map_err(PipelineError::csv(path))
    }

    /// Fixed-width table of fidelity, Schmidt bound and entanglement bound.
    pub fn table(&self) -> String {
        let pm = |v: Option<f64>| v.map(|s| format!("{s:.4}")).unwrap_or_else(|| "-".into());
        let mut out = String::new();
        writeln!(out, "{:>3}  {:>8}  {:>7}  {:>5}  {:>3}  {:>7}  {:>7}", "d", "F", "+/-", "1/d", "k", "E_oF", "+/-").unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:>3}  {:>8.4}  {:>7}  {:>5.3}  {:>3}  {:>7}  {:>7}",
                r.d,
                r.fidelity,
                pm(r.fidelity_std),
                1.0 / r.d as f64,
                r.schmidt,
                r.eof.map(|e| format!("{e:.3}")).unwrap_or_else(|| "-".into()),
                pm(r.eof_std),
            )
            .unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc() -> ReportDocument {
        let row = |d: usize, f: f64, eof: Option<f64>| ReportRow {
            d,
            fidelity: f,
            fidelity_std: Some(0.001),
            schmidt: 2,
            eof,
            eof_std: eof.map(|_| 0.01),
            h_down_m: 1.0,
            h_up_mm: 1.0,
            h_down_mub: 1.0,
            h_up_mub: Some(1.0),
            visibility: None,
        };
        ReportDocument {
            rows: vec![row(2, 0.98, Some(0.9)), row(4, 0.2, None)],
            meta: ReportMeta {
                seed: 3,
                n_resamples: 100,
                crosstalk_assumed: None,
                normalization: "full-grid".into(),
                data_dim: 4,
            },
            provenance: Provenance {
                config_hash: "00".into(),
                input_sha256: "11".into(),
                seed: 3,
                tool_version: "0.1.0".into(),
            },
        }
    }

    #[test]
    fn json_round_trip() {
        let d = doc();
        let back: ReportDocument = serde_json::from_str(&d.to_json()).unwrap();
        assert_eq!(back, d);
        let v: serde_json::Value = serde_json::from_str(&d.to_json()).unwrap();
        for key in ["d", "fidelity", "fidelity_std", "schmidt", "eof", "eof_std", "h_down_m", "h_up_mm", "h_down_mub", "h_up_mub"] {
            assert!(v["rows"][0].get(key).is_some(), "{key}");
        }
        for key in ["seed", "n_resamples", "crosstalk_assumed"] {
            assert!(v["meta"].get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn plot_rows() {
        let mut buf = Vec::new();
        doc().write_plot_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines, ["d,F,F_sep,k_witness,eof", "2,0.98,0.5,2,0.9", "4,0.2,0.25,2,"]);
    }

    #[test]
    fn table_has_one_line_per_row() {
        assert_eq!(doc().table().lines().count(), 3);
    }
}
