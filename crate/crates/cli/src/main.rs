//! Batch CLI: sample ensemble eigenvalue clouds, extract spectra and
//! spectral measures from matrix files, evaluate closed-form densities, run
//! the verification suites, and emit the figure preset data.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use cmvsim::ensembles::{figure_presets, sample_one_cloud};
use cmvsim::io as fmt;
use cmvsim::spectra;
use cmvsim::verify::{run_suite, Suite};
use config::{FileConfig, Format, RunConfig};

#[derive(Parser)]
#[command(
    name = "cmvsim",
    version,
    about = "CMV matrix models of circular and compact-group ensembles: samplers, spectra, densities and verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample eigenvalue clouds of an ensemble model.
    Sample(SampleArgs),
    /// Eigenvalues of a matrix stored in the JSON layout.
    Eigen(EigenArgs),
    /// Spectral measure (scalar or 2x2) of a unitary matrix file.
    Measure(MeasureArgs),
    /// Evaluate log-densities for a JSON batch of configurations.
    Density(DensityArgs),
    /// Run the statistical/identity verification suite.
    Verify(VerifyArgs),
    /// Emit the three figure preset clouds (truncated U, O, USp).
    Figure(FigureArgs),
}

#[derive(Args)]
struct SampleArgs {
    /// TOML or JSON file mirroring the flags below (flags win).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Family tag, optionally prefixed: cue, trunc-cue, coupled-cue, coe,
    /// cse, circular-beta, o, so, o-minus-so, orthogonal-beta, usp.
    #[arg(long)]
    ensemble: Option<String>,
    /// Size of the sampled operator (after truncation; quaternionic rows
    /// for cse/usp).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// Remove one row and column (one quaternionic row/column for cse/usp).
    #[arg(long)]
    truncated: bool,
    /// Constant reflection coefficient in [0,1] for coupled models.
    #[arg(long)]
    coupling_r: Option<f64>,
    /// Reflection law: constant | ideal-circular | ideal-orthogonal.
    #[arg(long)]
    coupling_law: Option<String>,
    /// Spectral variant for untruncated orthogonal-beta:
    /// even-plus | even-minus | odd-plus | odd-minus.
    #[arg(long)]
    ortho_case: Option<String>,
    /// Number of independent replicas.
    #[arg(long)]
    reps: Option<usize>,
    /// RNG seed (mandatory: sampling is never silently nondeterministic).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EigenArgs {
    /// Matrix file in the JSON layout (row-major re/im pairs).
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MeasureArgs {
    /// Matrix file in the JSON layout; must be unitary.
    #[arg(long)]
    matrix: PathBuf,
    /// Extract the 2x2 matrix measure instead of the scalar one.
    #[arg(long)]
    matrix2: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DensityArgs {
    /// JSON file: {"rows": [{"formula": ..., ...}, ...]}.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "quick")]
    suite: SuiteArg,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum SuiteArg {
    Quick,
    Full,
}

#[derive(Args)]
struct FigureArgs {
    /// Emit a single preset (fig1a | fig1b | fig1c) instead of all three.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Directory for the emitted files (default: current directory).
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn write_output(out: &Option<PathBuf>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .context("writing to stdout")?,
    }
    Ok(())
}

fn read_matrix(path: &Path) -> anyhow::Result<ndarray::Array2<num_complex::Complex64>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    fmt::matrix_from_json_str(&text).map_err(|e| anyhow::anyhow!("{e}"))
}

fn cmd_sample(args: SampleArgs) -> anyhow::Result<()> {
    let file = match &args.config {
        Some(path) => Some(FileConfig::load(path)?),
        None => None,
    };
    let run: RunConfig = config::resolve(
        file,
        args.ensemble,
        args.n,
        args.beta,
        args.a,
        args.b,
        args.truncated,
        args.coupling_r,
        args.coupling_law,
        args.ortho_case,
        args.reps,
        args.seed,
        args.format,
        args.out,
    )?;

    // Replicas across the worker pool; collect preserves rep order.
    let clouds = (0..run.reps)
        .into_par_iter()
        .map(|rep| sample_one_cloud(&run.spec, run.seed, rep as u64))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| anyhow::anyhow!("{e}"))?;

    let content = match run.format {
        Format::Csv => fmt::clouds_to_csv(&clouds),
        Format::Json => {
            serde_json::to_string_pretty(&fmt::CloudBatchJson::from_clouds(&clouds))? + "\n"
        }
    };
    write_output(&run.out, &content)
}

fn cmd_eigen(args: EigenArgs) -> anyhow::Result<()> {
    let m = read_matrix(&args.matrix)?;
    let cloud = spectra::eig(&m).map_err(|e| anyhow::anyhow!("{e}"))?;
    let content = match args.format {
        Format::Csv => fmt::cloud_to_csv(&cloud),
        Format::Json => serde_json::to_string_pretty(&fmt::CloudJson::from_cloud(&cloud))? + "\n",
    };
    write_output(&args.out, &content)
}

fn cmd_measure(args: MeasureArgs) -> anyhow::Result<()> {
    let m = read_matrix(&args.matrix)?;
    let content = if args.matrix2 {
        let mm = spectra::matrix_spectral_measure(&m).map_err(|e| anyhow::anyhow!("{e}"))?;
        serde_json::to_string_pretty(&fmt::MatrixMeasureJson::from_measure(&mm))? + "\n"
    } else {
        let mu = spectra::spectral_measure(&m).map_err(|e| anyhow::anyhow!("{e}"))?;
        serde_json::to_string_pretty(&fmt::MeasureJson::from_measure(&mu))? + "\n"
    };
    write_output(&args.out, &content)
}

fn cmd_density(args: DensityArgs) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let batch: fmt::DensityBatch = serde_json::from_str(&text).context("parsing density batch")?;
    let responses = fmt::evaluate_density_batch(&batch);
    let content = serde_json::to_string_pretty(&responses)? + "\n";
    write_output(&args.out, &content)
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<bool> {
    let suite = match args.suite {
        SuiteArg::Quick => Suite::Quick,
        SuiteArg::Full => Suite::Full,
    };
    let reports = run_suite(suite, args.seed).map_err(|e| anyhow::anyhow!("{e}"))?;
    let all_pass = reports.iter().all(|r| r.pass);
    let content = serde_json::to_string_pretty(&reports)? + "\n";
    write_output(&args.out, &content)?;
    for r in &reports {
        eprintln!(
            "{:>5} {} (statistic {:.4e}, threshold {:.4e})",
            if r.pass { "ok" } else { "FAIL" },
            r.name,
            r.statistic,
            r.threshold
        );
    }
    Ok(all_pass)
}

fn cmd_figure(args: FigureArgs) -> anyhow::Result<()> {
    let seed = args
        .seed
        .context("missing --seed: sampling runs must be seeded")?;
    let presets = figure_presets();
    let selected: Vec<_> = match &args.preset {
        Some(name) => {
            let found = presets
                .into_iter()
                .find(|(tag, _)| tag == name)
                .with_context(|| format!("unknown preset '{name}' (fig1a | fig1b | fig1c)"))?;
            vec![found]
        }
        None => presets,
    };
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    for (name, spec) in selected {
        let cloud = sample_one_cloud(&spec, seed, 0).map_err(|e| anyhow::anyhow!("{e}"))?;
        let (ext, content) = match args.format {
            Format::Csv => ("csv", fmt::cloud_to_csv(&cloud)),
            Format::Json => (
                "json",
                serde_json::to_string_pretty(&fmt::CloudJson::from_cloud(&cloud))? + "\n",
            ),
        };
        let path = args.out_dir.join(format!("{name}.{ext}"));
        std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
        println!("{}: {} points", path.display(), cloud.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sample(args) => cmd_sample(args).map(|()| true),
        Command::Eigen(args) => cmd_eigen(args).map(|()| true),
        Command::Measure(args) => cmd_measure(args).map(|()| true),
        Command::Density(args) => cmd_density(args).map(|()| true),
        Command::Verify(args) => cmd_verify(args),
        Command::Figure(args) => cmd_figure(args).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            // Missing/invalid run parameters are usage errors.
            let msg = format!("{e:#}");
            if msg.contains("missing --")
                || msg.contains("invalid ensemble spec")
                || msg.contains("unknown")
            {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
