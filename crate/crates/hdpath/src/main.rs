use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hdpath::config::{self, parse_list, parse_noise, CertifyOptions, NormalizationChoice, RunConfig};
use hdpath::{run_certify, run_compile, run_simulate, CompileRequest, PipelineError, ReportDocument};
use hdpath_core::measure::{ArmBasis, Sign};

#[derive(Parser)]
#[command(name = "hdpath", version, about = "Simulate, certify and compile multi-path entanglement experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate coincidence counts for every measurement setting.
    Simulate(SimulateArgs),
    /// Certify fidelity, Schmidt number and entanglement of formation.
    Certify(CertifyArgs),
    /// Compile and verify two-path subspace measurement settings.
    CompileSubspace(SubspaceArgs),
    /// Compile and verify a cascaded unbiased-basis network.
    CompileMub(MubArgs),
    /// Print a saved report and optionally write its plot data.
    Report(ReportArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON run configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dim: Option<usize>,
    /// Noise stack, e.g. `white:0.9,dephase:0.16,crosstalk:4.49e-5`.
    #[arg(long)]
    noise: Option<String>,
    /// Real per-path amplitudes, e.g. `1,1,0.5,0.5`.
    #[arg(long)]
    amplitudes: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Pair rate of the source (Hz).
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    efficiency: Option<f64>,
    /// Coincidence window (s).
    #[arg(long)]
    window: Option<f64>,
    /// Acquisition time per setting (s).
    #[arg(long)]
    duration: Option<f64>,
    /// Total acquisition time split over all settings (s).
    #[arg(long, conflicts_with = "duration")]
    campaign: Option<f64>,
    /// Detected singles rate per arm (Hz); adds accidental coincidences.
    #[arg(long)]
    singles: Option<f64>,
    /// Write Poisson means instead of sampled counts.
    #[arg(long)]
    exact: bool,
    /// Measure every Z_i:Z_j pair.
    #[arg(long)]
    full_grid: bool,
    /// Add the mixed X:Y and Y:X settings.
    #[arg(long)]
    imaginary: bool,
    /// Write the effective configuration here.
    #[arg(long)]
    save_config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    counts: PathBuf,
    /// Path count of the data (default: largest index + 1).
    #[arg(long)]
    dim: Option<usize>,
    /// Block sizes, e.g. `2,4,8` (default: even sizes up to the data dimension).
    #[arg(long)]
    dims: Option<String>,
    /// Bootstrap resamples; 0 skips error estimation.
    #[arg(long, default_value_t = config::DEFAULT_RESAMPLES)]
    resamples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `calibrated[:rate_hz]`, `assumed[:eps]`, `full-grid` or `auto`.
    #[arg(long, default_value = "calibrated")]
    normalization: String,
    /// Source pair rate (Hz) for calibrated normalization.
    #[arg(long, default_value_t = config::DEFAULT_RATE_HZ)]
    rate: f64,
    #[arg(long, default_value_t = config::DEFAULT_EFFICIENCY)]
    efficiency: f64,
    /// Take rate and efficiency from a run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plot-data CSV.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct SubspaceArgs {
    #[arg(long, default_value_t = 32)]
    dim: usize,
    #[arg(long, requires = "j", required_unless_present = "all")]
    i: Option<usize>,
    #[arg(long, requires = "i")]
    j: Option<usize>,
    /// Compile every pair.
    #[arg(long, conflicts_with_all = ["i", "j"])]
    all: bool,
    /// `X` or `Y`.
    #[arg(long, default_value = "X")]
    basis: String,
    /// `+` or `-`.
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    sign: String,
    /// Settings JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MubArgs {
    #[arg(long)]
    n: u32,
    /// Phase (rad) per path, e.g. `0,0.5,1.0`.
    #[arg(long, allow_hyphen_values = true)]
    phases: Option<String>,
    /// Stage plates at 0 degrees: measure the path basis.
    #[arg(long)]
    computational: bool,
    /// Network JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    plot: Option<PathBuf>,
}

fn simulate(args: SimulateArgs) -> hdpath::Result<()> {
    let mut cfg = match (&args.config, args.dim) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(d)) => RunConfig::new(d),
        (None, None) => return Err(PipelineError::Config("give --config or --dim".into())),
    };
    if let Some(d) = args.dim {
        cfg.dim = d;
    }
    if let Some(n) = &args.noise {
        cfg.noise = parse_noise(n)?;
    }
    if let Some(a) = &args.amplitudes {
        cfg.amplitudes = Some(parse_list::<f64>(a)?.into_iter().map(|x| [x, 0.0]).collect());
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(r) = args.rate {
        cfg.rate_hz = r;
    }
    if let Some(e) = args.efficiency {
        cfg.efficiency = e;
    }
    if let Some(w) = args.window {
        cfg.coincidence_window_s = w;
    }
    if args.duration.is_some() || args.campaign.is_some() {
        cfg.duration_s = args.duration;
        cfg.campaign_s = args.campaign;
    }
    if args.singles.is_some() {
        cfg.singles_hz = args.singles;
    }
    cfg.exact |= args.exact;
    cfg.full_grid |= args.full_grid;
    cfg.imaginary |= args.imaginary;
    let summary = run_simulate(&cfg, &args.out)?;
    if let Some(p) = &args.save_config {
        let text = serde_json::to_string_pretty(&cfg).expect("configuration serializes") + "\n";
        std::fs::write(p, text).map_err(|source| PipelineError::Io { path: p.clone(), source })?;
    }
    println!(
        "{} settings, {} s each, {} counts, config {}",
        summary.settings, summary.setting_duration_s, summary.total_counts, summary.config_hash
    );
    Ok(())
}

fn certify(args: CertifyArgs) -> hdpath::Result<()> {
    let rate = match &args.config {
        Some(p) => RunConfig::load(p)?.coincidence_rate(),
        None => args.rate * args.efficiency,
    };
    let options = CertifyOptions {
        data_dim: args.dim,
        dims: args.dims.as_deref().map(parse_list).transpose()?,
        normalization: NormalizationChoice::parse(&args.normalization, rate)?,
        n_resamples: args.resamples,
        seed: args.seed,
    };
    let doc = run_certify(&args.counts, &options, args.out.as_deref(), args.plot.as_deref())?;
    print!("{}", doc.table());
    Ok(())
}

fn write_json(path: &std::path::Path, value: &serde_json::Value) -> hdpath::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("json serializes") + "\n";
    std::fs::write(path, text).map_err(|source| PipelineError::Io { path: path.to_path_buf(), source })
}

fn compile(request: CompileRequest, out: Option<PathBuf>) -> hdpath::Result<()> {
    let artifact = run_compile(&request)?;
    print!("{}", artifact.text);
    if let Some(p) = out {
        write_json(&p, &artifact.json)?;
    }
    artifact.into_result().map(|_| ())
}

fn subspace(args: SubspaceArgs) -> hdpath::Result<()> {
    let basis = match ArmBasis::parse(&args.basis.to_uppercase()) {
        Some(b @ (ArmBasis::X | ArmBasis::Y)) => b,
        _ => return Err(PipelineError::Config(format!("basis must be X or Y, got '{}'", args.basis))),
    };
    let sign = match args.sign.as_str() {
        "+" | "plus" => Sign::Plus,
        "-" | "minus" => Sign::Minus,
        s => return Err(PipelineError::Config(format!("sign must be + or -, got '{s}'"))),
    };
    let pair = if args.all { None } else { args.i.zip(args.j) };
    compile(CompileRequest::Subspace { dim: args.dim, pair, basis, sign }, args.out)
}

fn mub(args: MubArgs) -> hdpath::Result<()> {
    let phases = args.phases.as_deref().map(parse_list::<f64>).transpose()?.unwrap_or_default();
    compile(CompileRequest::Mub { n: args.n, phases, computational: args.computational }, args.out)
}

fn report(args: ReportArgs) -> hdpath::Result<()> {
    let doc = ReportDocument::load(&args.report)?;
    print!("{}", doc.table());
    if let Some(p) = &args.plot {
        doc.save_plot(p)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Certify(a) => certify(a),
        Command::CompileSubspace(a) => subspace(a),
        Command::CompileMub(a) => mub(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let PipelineError::Core(hdpath_core::Error::IncompleteData { missing }) = &e {
                for m in missing.iter().take(20) {
                    eprintln!("  missing {m}");
                }
                if missing.len() > 20 {
                    eprintln!("  ... and {} more", missing.len() - 20);
                }
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
