use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{ArgGroup, Args, Parser, Subcommand};
use pseudowhisper::batch::run_batch;
use pseudowhisper::config::{load_config, CONFIG_ENV};
use pseudowhisper::features::FeatureDump;
use pseudowhisper::manifest::{load_manifest, ManifestEntry};
use pseudowhisper::report::measure;
use pseudowhisper::wav::read_wav;
use pseudowhisper_core::pipeline::{Mode, PipelineConfig};
use pseudowhisper_core::vocoder::analyze;

#[derive(Parser)]
#[command(name = "pseudowhisper", version, about = "Convert normal speech into pseudo-whispered speech")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert one file or a manifest of files
    Convert(ConvertArgs),
    /// Dump F0, spectral envelope and aperiodicity to a PWF1 file
    Analyze(AnalyzeArgs),
    /// Print acoustic metrics as JSON lines
    Metrics(MetricsArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "manifest"])))]
struct ConvertArgs {
    /// pw, ng, wb or roundtrip
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long = "in", requires = "out")]
    input: Option<PathBuf>,
    #[arg(long, requires = "input")]
    out: Option<PathBuf>,
    /// TSV manifest: input, output, optional mode and speed factor
    #[arg(long, conflicts_with = "input")]
    manifest: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for one per CPU
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Speed perturbation factor applied before conversion
    #[arg(long)]
    speed: Option<f64>,
    /// JSON-lines report path (default: stdout)
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    /// Compare the second file's envelope against the first
    #[arg(long)]
    lsd: bool,
    /// Mode label copied into the records
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(required = true, num_args = 1..)]
    files: Vec<PathBuf>,
}

fn pipeline_config(path: Option<&Path>) -> anyhow::Result<PipelineConfig> {
    let path = path.map(Path::to_path_buf).or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    match path {
        Some(p) => load_config(&p).with_context(|| format!("loading config {}", p.display())),
        None => Ok(PipelineConfig::default()),
    }
}

fn convert(args: ConvertArgs) -> anyhow::Result<ExitCode> {
    let mut cfg = pipeline_config(args.config.as_deref())?;
    if let Some(mode) = args.mode {
        cfg.mode = mode;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(f) = args.speed {
        if !(0.5..=2.0).contains(&f) {
            bail!("--speed {f} outside [0.5, 2.0]");
        }
    }
    let mut entries = match (&args.manifest, args.input, args.out) {
        (Some(m), _, _) => load_manifest(m).with_context(|| format!("reading manifest {}", m.display()))?,
        (None, Some(input), Some(output)) => vec![ManifestEntry { input, output, mode: None, speed: None }],
        _ => bail!("either --manifest or --in/--out is required"),
    };
    for e in entries.iter_mut() {
        e.speed = e.speed.or(args.speed);
    }
    let rows = run_batch(&entries, &cfg, args.jobs);
    let mut sink: Box<dyn Write> = match &args.report {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("creating report {}", p.display()))?),
        None => Box::new(std::io::stdout().lock()),
    };
    for row in &rows {
        writeln!(sink, "{}", serde_json::to_string(row)?)?;
    }
    sink.flush()?;
    let failed = rows.iter().filter(|r| r.failed()).count();
    if failed > 0 {
        eprintln!("{failed} of {} entries failed", rows.len());
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn analyze_file(args: AnalyzeArgs) -> anyhow::Result<ExitCode> {
    let cfg = pipeline_config(args.config.as_deref())?;
    let clip = read_wav(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?
        .to_pipeline_rate()?;
    let dump = FeatureDump::from_features(&analyze(&clip, &cfg.vocoder)?)?;
    let file = std::fs::File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    dump.write_to(std::io::BufWriter::new(file))?;
    Ok(ExitCode::SUCCESS)
}

fn metrics(args: MetricsArgs) -> anyhow::Result<ExitCode> {
    let cfg = pipeline_config(args.config.as_deref())?;
    let mode = args.mode.map(|m| m.to_string());
    let mut out = std::io::stdout().lock();
    if args.lsd {
        let [reference, file] = args.files.as_slice() else {
            bail!("--lsd takes exactly two files");
        };
        let record = measure(file, Some(reference), mode.as_deref(), &cfg.vocoder)
            .with_context(|| format!("measuring {} against {}", file.display(), reference.display()))?;
        writeln!(out, "{}", serde_json::to_string(&record)?)?;
    } else {
        for file in &args.files {
            let record = measure(file, None, mode.as_deref(), &cfg.vocoder)
                .with_context(|| format!("measuring {}", file.display()))?;
            writeln!(out, "{}", serde_json::to_string(&record)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Convert(a) => convert(a),
        Command::Analyze(a) => analyze_file(a),
        Command::Metrics(a) => metrics(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
