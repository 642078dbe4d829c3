//! File formats, configuration and command orchestration around
//! [`hdpath_core`].

pub mod config;
pub mod counts;
pub mod error;
pub mod layout;
pub mod report;

use std::path::Path;

use hdpath_core::certify::{nested_analysis, nested_analysis_with_errors};
use hdpath_core::measure::{
    expected_counts, simulate_counts, simulate_counts_with_accidentals, ArmBasis, CountsRecord, Normalization, Sign,
};
use hdpath_core::optics::{
    compile_mub_network_with, compile_subspace_projector, projector_amplitudes, transfer_matrix, unitarity_error,
    verify_subspace_setting, SubspaceSetting, SubspaceVerification,
};
use hdpath_core::qstate::{computational_basis, product_mub_basis, unbiasedness, Basis};
use hdpath_core::C64;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub use config::{CertifyOptions, NormalizationChoice, RunConfig};
pub use error::{PipelineError, Result};
pub use report::ReportDocument;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

const MUB_TOL: f64 = 1e-10;

/// Counts for every setting of the configured plan.
pub fn simulate_records(config: &RunConfig) -> Result<Vec<CountsRecord>> {
    config.validate()?;
    let plan = config.plan()?;
    let rho = config.state()?;
    let acq = config.acquisition(plan.len());
    let records = match (config.exact, config.singles_hz) {
        (true, Some(_)) => return Err(PipelineError::Config("exact counts do not model accidentals".into())),
        (true, None) => expected_counts(&rho, &plan, &acq)?,
        (false, Some(s)) => simulate_counts_with_accidentals(&rho, &plan, &acq, s, config.coincidence_window_s, config.seed)?,
        (false, None) => simulate_counts(&rho, &plan, &acq, config.seed)?,
    };
    Ok(records)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSummary {
    pub settings: usize,
    pub setting_duration_s: f64,
    pub total_counts: f64,
    pub config_hash: String,
}

/// Simulates and writes the counts CSV.
pub fn run_simulate(config: &RunConfig, out: &Path) -> Result<SimulationSummary> {
    let records = simulate_records(config)?;
    counts::write_counts(out, &records)?;
    Ok(SimulationSummary {
        settings: records.len(),
        setting_duration_s: records.first().map_or(0.0, |r| r.duration_s),
        total_counts: records.iter().map(|r| r.counts).sum(),
        config_hash: config.hash(),
    })
}

fn normalization_name(norm: &Normalization) -> &'static str {
    match norm {
        Normalization::FullGrid => "full-grid",
        Normalization::AssumedCrosstalk { .. } => "assumed",
        Normalization::Calibrated { .. } => "calibrated",
    }
}

/// Nested analysis of in-memory records; `input_sha256` identifies their
/// source in the provenance block.
pub fn certify_records(records: &[CountsRecord], input_sha256: &str, options: &CertifyOptions) -> Result<ReportDocument> {
    let data_dim = options.data_dim.unwrap_or_else(|| counts::infer_dim(records));
    if data_dim < 2 {
        return Err(hdpath_core::Error::InvalidDimension(data_dim).into());
    }
    let dims = options.dims.clone().unwrap_or_else(|| config::default_dims(data_dim));
    let norm = options.normalization.resolve(records, data_dim);
    let report = if options.n_resamples == 0 {
        nested_analysis(records, data_dim, &dims, norm)?
    } else {
        nested_analysis_with_errors(records, data_dim, &dims, norm, options.n_resamples, options.seed)?
    };
    let meta = report::ReportMeta {
        seed: options.seed,
        n_resamples: options.n_resamples,
        crosstalk_assumed: match norm {
            Normalization::AssumedCrosstalk { per_cell } => Some(per_cell),
            _ => None,
        },
        normalization: normalization_name(&norm).into(),
        data_dim,
    };
    let provenance = report::Provenance {
        config_hash: config::hash_json(&json!({ "options": options, "input_sha256": input_sha256 })),
        input_sha256: input_sha256.into(),
        seed: options.seed,
        tool_version: TOOL_VERSION.into(),
    };
    Ok(ReportDocument::new(&report, meta, provenance))
}

/// Reads a counts file and certifies it; writes the report and plot data
/// when paths are given.
pub fn run_certify(
    counts_path: &Path,
    options: &CertifyOptions,
    report_out: Option<&Path>,
    plot_out: Option<&Path>,
) -> Result<ReportDocument> {
    let bytes = std::fs::read(counts_path).map_err(PipelineError::io(counts_path))?;
    let records = counts::read_counts_from(bytes.as_slice(), counts_path)?;
    let doc = certify_records(&records, &hex::encode(Sha256::digest(&bytes)), options)?;
    if let Some(p) = report_out {
        doc.save(p)?;
    }
    if let Some(p) = plot_out {
        doc.save_plot(p)?;
    }
    Ok(doc)
}

/// What to compile.
#[derive(Debug, Clone, PartialEq)]
pub enum CompileRequest {
    /// Projector onto the `basis`/`sign` superposition of paths `i < j`;
    /// `pair: None` compiles every pair.
    Subspace { dim: usize, pair: Option<(usize, usize)>, basis: ArmBasis, sign: Sign },
    /// Product-basis network on `2^n` paths with an optional phase profile;
    /// `computational` sets the stage plates to 0 degrees.
    Mub { n: u32, phases: Vec<f64>, computational: bool },
}

/// Compiled settings with the verifier verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct CompileArtifact {
    pub json: Value,
    pub text: String,
    /// `(stage, reason)` of the first failed check.
    pub failure: Option<(String, String)>,
}

impl CompileArtifact {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn into_result(self) -> Result<Self> {
        match self.failure {
            Some((stage, reason)) => Err(hdpath_core::Error::Miscompiled { stage, reason }.into()),
            None => Ok(self),
        }
    }
}

pub fn run_compile(request: &CompileRequest) -> Result<CompileArtifact> {
    match *request {
        CompileRequest::Subspace { dim, pair, basis, sign } => compile_subspaces(dim, pair, basis, sign),
        CompileRequest::Mub { n, ref phases, computational } => compile_mub(n, phases, computational),
    }
}

fn compile_subspaces(dim: usize, pair: Option<(usize, usize)>, basis: ArmBasis, sign: Sign) -> Result<CompileArtifact> {
    let (alpha, beta) = projector_amplitudes(basis, sign)?;
    let pairs: Vec<(usize, usize)> = match pair {
        Some(p) => vec![p],
        None => (0..dim).flat_map(|i| (i + 1..dim).map(move |j| (i, j))).collect(),
    };
    let mut compiled: Vec<(SubspaceSetting, SubspaceVerification)> = Vec::with_capacity(pairs.len());
    for (i, j) in pairs {
        let s = compile_subspace_projector(i, j, dim, alpha, beta)?;
        let v = verify_subspace_setting(&s, alpha, beta)?;
        compiled.push((s, v));
    }
    let failure = compiled.iter().find_map(|(s, v)| {
        v.failures.first().map(|f| (format!("({},{}) {}", s.pair.0, s.pair.1, f.stage), f.reason.clone()))
    });
    let settings: Vec<SubspaceSetting> = compiled.iter().map(|(s, _)| s.clone()).collect();
    let mut text = layout::subspace_table(&settings);
    let json = if let [(s, v)] = compiled.as_slice() {
        text.push('\n');
        text.push_str(&layout::stage_details(s));
        layout::setting_json(s, v)
    } else {
        let list: Vec<Value> = compiled
            .iter()
            .map(|(s, v)| {
                let mut j = layout::setting_json(s, v);
                j.as_object_mut().map(|o| o.remove("network"));
                j
            })
            .collect();
        json!({ "dim": dim, "settings": list })
    };
    let worst = |f: fn(&SubspaceVerification) -> f64| compiled.iter().map(|(_, v)| f(v)).fold(0.0, f64::max);
    text.push_str(&format!(
        "\nverdict {} ({} settings, max leakage {:.3e}, max Born error {:.3e})\n",
        if failure.is_none() { "PASS" } else { "FAIL" },
        compiled.len(),
        worst(|v| v.max_leakage),
        worst(|v| v.born_error),
    ));
    Ok(CompileArtifact { json, text, failure })
}

fn compile_mub(n: u32, phases: &[f64], computational: bool) -> Result<CompileArtifact> {
    let angle = if computational { 0.0 } else { 22.5 };
    let net = compile_mub_network_with(n, phases, angle)?;
    let d = 1usize << n;
    let t = transfer_matrix(&net, &net.inputs, &net.outputs)?;
    let unitarity = unitarity_error(&t)?;
    let target = if computational { computational_basis(d)? } else { product_mub_basis(n)? };
    // Row k should be the target vector with the path phases applied, up to
    // a global phase.
    let row_deviation = (0..d)
        .map(|k| {
            let v = target.vector(k);
            let overlap: C64 = (0..d)
                .map(|p| t[(k, p)] * (v[p] * C64::from_polar(1.0, phases.get(p).copied().unwrap_or(0.0))).conj())
                .sum();
            (1.0 - overlap.norm()).abs()
        })
        .fold(0.0, f64::max);
    let measured = Basis::new((0..d).map(|k| t.row(k).iter().map(|z| z.conj()).collect()).collect())?;
    let unbiased = if computational { None } else { Some(unbiasedness(&measured, &computational_basis(d)?)?) };
    let failure = if unitarity > MUB_TOL {
        Some(("network".to_string(), format!("transfer matrix not unitary ({unitarity:.3e})")))
    } else if row_deviation > MUB_TOL {
        Some(("outputs".to_string(), format!("rows deviate from target basis ({row_deviation:.3e})")))
    } else if unbiased.is_some_and(|u| u > MUB_TOL) {
        Some(("outputs".to_string(), format!("not unbiased to the path basis ({:.3e})", unbiased.unwrap_or(0.0))))
    } else {
        None
    };
    let verdict = json!({
        "passed": failure.is_none(),
        "unitarity_error": unitarity,
        "row_deviation": row_deviation,
        "unbiasedness_error": unbiased,
    });
    let text = format!(
        "mub n={n} d={d} elements={} outputs={}\nunitarity error   {unitarity:.3e}\nrow deviation     {row_deviation:.3e}\nunbiasedness      {}\nverdict {}\n",
        net.elements.len(),
        net.outputs.len(),
        unbiased.map_or_else(|| "-".to_string(), |u| format!("{u:.3e}")),
        if failure.is_none() { "PASS" } else { "FAIL" },
    );
    let json = json!({
        "n": n,
        "dim": d,
        "computational": computational,
        "network": layout::NetworkDoc::from(&net),
        "verification": verdict,
    });
    Ok(CompileArtifact { json, text, failure })
}
