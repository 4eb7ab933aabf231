use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use wsvqe::pipeline::ShotBudget;
use wsvqe_cli::experiment::{ExperimentConfig, Variant, ALL_VARIANTS};
use wsvqe_cli::instance::{GenConfig, InstanceFile};
use wsvqe_cli::landscape::LandscapeRequest;
use wsvqe_cli::{HarnessError, Result};

/// Warm-started VQE experiment harness.
#[derive(Parser)]
#[command(name = "wsvqe", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random Hermitian problem instances.
    Gen(GenArgs),
    /// Run the experiment sweep over instances and variants.
    Run(RunArgs),
    /// Reduce trace directories to median best-so-far curves.
    Summarize(SummarizeArgs),
    /// Evaluate a two-parameter landscape slice of one instance.
    Landscape(LandscapeArgs),
    /// Render a summary or landscape CSV to SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Master seed (mandatory: every artifact is reproducible).
    #[arg(long)]
    seed: u64,
    /// Output directory for instance_*.json files.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 50)]
    instances: usize,
    /// Matrix dimension (power of two).
    #[arg(long, default_value_t = 8)]
    dim: usize,
    /// Probability that a sampled entry is zero.
    #[arg(long, default_value_t = 0.5)]
    sparsity: f64,
    /// Entry components are uniform in [-bound, bound].
    #[arg(long, default_value_t = 5.0)]
    bound: f64,
}

#[derive(Args)]
struct RunArgs {
    /// Master seed (mandatory: every artifact is reproducible).
    #[arg(long)]
    seed: u64,
    /// Directory of instance_*.json files.
    #[arg(long)]
    instances: PathBuf,
    /// Output directory for trace CSVs and the manifest.
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated variant subset; defaults to all five.
    #[arg(long, value_delimiter = ',')]
    variants: Vec<String>,
    #[arg(long, default_value_t = 200)]
    shots: usize,
    #[arg(long, default_value_t = 400)]
    snaps: usize,
    #[arg(long, default_value_t = 50)]
    acae_evals: usize,
    #[arg(long, default_value_t = 100)]
    vqe_evals: usize,
    /// Ansatz entanglement-block repetitions.
    #[arg(long, default_value_t = 2)]
    reps: usize,
    /// Worker count; defaults to the available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    /// Redraw the ACAE Clifford set on every evaluation instead of
    /// reusing one set per run.
    #[arg(long)]
    fresh_unitaries: bool,
}

#[derive(Args)]
struct SummarizeArgs {
    /// One or more trace directories (each with a manifest.json).
    #[arg(long, required = true, num_args = 1..)]
    traces: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LandscapeArgs {
    /// Instance JSON file.
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    axis_i: usize,
    #[arg(long)]
    axis_j: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 200)]
    shots: usize,
    #[arg(long, default_value_t = 400)]
    snaps: usize,
    #[arg(long, default_value_t = 2)]
    reps: usize,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => {
            let cfg = GenConfig {
                count: a.instances,
                dim: a.dim,
                sparsity: a.sparsity,
                entry_bound: a.bound,
                master_seed: a.seed,
            };
            let paths = wsvqe_cli::instance::gen_instances(&cfg, &a.out)?;
            println!("wrote {} instances to {}", paths.len(), a.out.display());
            Ok(())
        }
        Command::Run(a) => {
            let variants: Vec<Variant> = if a.variants.is_empty() {
                ALL_VARIANTS.to_vec()
            } else {
                a.variants.iter().map(|s| Variant::parse(s)).collect::<Result<_>>()?
            };
            let jobs = match a.jobs {
                Some(j) => j,
                None => std::thread::available_parallelism().map_or(1, |n| n.get()),
            };
            let cfg = ExperimentConfig {
                master_seed: a.seed,
                reps: a.reps,
                budget: ShotBudget { n_shots: a.shots, n_snaps: a.snaps },
                variants,
                acae_max_evals: a.acae_evals,
                vqe_max_evals: a.vqe_evals,
                reuse_unitaries: !a.fresh_unitaries,
                jobs,
            };
            let instances = wsvqe_cli::instance::load_instances(&a.instances)?;
            let manifest = wsvqe_cli::experiment::run_experiment(&cfg, &instances, &a.out)?;
            println!("completed {} runs into {}", manifest.runs.len(), a.out.display());
            Ok(())
        }
        Command::Summarize(a) => {
            let dirs: Vec<&std::path::Path> = a.traces.iter().map(|p| p.as_path()).collect();
            wsvqe_cli::summarize::summarize(&dirs, &a.out)?;
            println!("wrote {}", a.out.display());
            Ok(())
        }
        Command::Landscape(a) => {
            let instance = InstanceFile::load(&a.instance)?.to_instance()?;
            let mut req = LandscapeRequest::new(a.axis_i, a.axis_j, a.seed);
            req.budget = ShotBudget { n_shots: a.shots, n_snaps: a.snaps };
            req.reps = a.reps;
            wsvqe_cli::landscape::landscape(&instance, &req, &a.out)?;
            println!("wrote {}", a.out.display());
            Ok(())
        }
        Command::Plot(a) => {
            wsvqe_cli::plot::plot(&a.input, &a.out)?;
            println!("wrote {}", a.out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(HarnessError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
