//! Coincidence-count CSV files.
//!
//! One row per setting:
//! `label,i_a,j_a,basis_a,sign_a,i_b,j_b,basis_b,sign_b,counts,duration_s`.
//! `Z` arms carry `j = i` and sign `+`. Numbers use the shortest decimal
//! form that reads back to the same value, so integral counts print as
//! integers.

use std::io::{Read, Write};
use std::path::Path;

use hdpath_core::measure::{ArmBasis, ArmProjector, CountsRecord, ProjectiveSetting, Sign};
use serde::Deserialize;

use crate::error::{PipelineError, Result};

pub const HEADER: [&str; 11] =
    ["label", "i_a", "j_a", "basis_a", "sign_a", "i_b", "j_b", "basis_b", "sign_b", "counts", "duration_s"];

#[derive(Debug, Deserialize)]
struct Row {
    label: String,
    i_a: usize,
    j_a: usize,
    basis_a: String,
    sign_a: String,
    i_b: usize,
    j_b: usize,
    basis_b: String,
    sign_b: String,
    counts: f64,
    duration_s: f64,
}

fn arm_fields(arm: &ArmProjector) -> [String; 4] {
    [arm.i.to_string(), arm.j.to_string(), arm.basis.as_str().to_string(), arm.sign.as_char().to_string()]
}

fn parse_arm(i: usize, j: usize, basis: &str, sign: &str) -> std::result::Result<ArmProjector, String> {
    let basis = ArmBasis::parse(basis).ok_or_else(|| format!("unknown basis '{basis}'"))?;
    let sign = Sign::parse(sign).ok_or_else(|| format!("unknown sign '{sign}'"))?;
    match basis {
        ArmBasis::Z if i != j || sign != Sign::Plus => Err(format!("Z arm must have j = i and sign +, got {i},{j}")),
        ArmBasis::Z => Ok(ArmProjector::z(i)),
        _ => Ok(ArmProjector::superposition(basis, i, j, sign)),
    }
}

pub fn write_counts_to<W: Write>(writer: W, records: &[CountsRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER)?;
    for r in records {
        let mut fields = vec![r.label.clone()];
        fields.extend(arm_fields(&r.arm_a));
        fields.extend(arm_fields(&r.arm_b));
        fields.push(r.counts.to_string());
        fields.push(r.duration_s.to_string());
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_counts(path: &Path, records: &[CountsRecord]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(PipelineError::io(path))?;
    write_counts_to(std::io::BufWriter::new(file), records).map_err(PipelineError::csv(path))
}

/// Reads and checks every row; `source` names the input in error messages.
pub fn read_counts_from<R: Read>(reader: R, source: &Path) -> Result<Vec<CountsRecord>> {
    let mut rd = csv::Reader::from_reader(reader);
    let header = rd.headers().map_err(PipelineError::csv(source))?;
    if header.iter().ne(HEADER) {
        return Err(PipelineError::BadRecord {
            path: source.to_path_buf(),
            row: 0,
            reason: format!("expected header {}", HEADER.join(",")),
        });
    }
    let mut records = Vec::new();
    for (n, row) in rd.deserialize::<Row>().enumerate() {
        let row = row.map_err(PipelineError::csv(source))?;
        let bad = |reason: String| PipelineError::BadRecord { path: source.to_path_buf(), row: n + 1, reason };
        let arm_a = parse_arm(row.i_a, row.j_a, &row.basis_a, &row.sign_a).map_err(bad)?;
        let arm_b = parse_arm(row.i_b, row.j_b, &row.basis_b, &row.sign_b).map_err(bad)?;
        let expected = ProjectiveSetting::new(arm_a, arm_b).label;
        if row.label != expected {
            return Err(bad(format!("label '{}' does not match arms ({expected})", row.label)));
        }
        let rec = CountsRecord {
            label: row.label,
            arm_a,
            arm_b,
            counts: row.counts,
            duration_s: row.duration_s,
            expected_rate: None,
        };
        rec.validate().map_err(|e| bad(e.to_string()))?;
        records.push(rec);
    }
    Ok(records)
}

pub fn read_counts(path: &Path) -> Result<Vec<CountsRecord>> {
    let file = std::fs::File::open(path).map_err(PipelineError::io(path))?;
    read_counts_from(std::io::BufReader::new(file), path)
}

/// Path count implied by the largest index in `records`.
pub fn infer_dim(records: &[CountsRecord]) -> usize {
    records
        .iter()
        .flat_map(|r| [r.arm_a.i, r.arm_a.j, r.arm_b.i, r.arm_b.j])
        .max()
        .map_or(0, |m| m + 1)
}
