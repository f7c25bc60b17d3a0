//! The `xube` command-line tool.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::algspec::parse_algo;
use crate::domain::sample_ks;
use crate::io::{read_instances, write_instances, write_results, SolveSummary};
use crate::registry::{split_spec, CliError, Registry, Scheme};
use crate::train::{Guidance, Head, TargetUpdate, TrainConfig};

mod summary;

pub use summary::run_summary;

#[derive(Parser)]
#[command(
    name = "xube",
    version,
    about = "Learned heuristic functions and batched heuristic search for pathfinding domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve problem instances from a file and write a results file.
    Solve(SolveArgs),
    /// Generate problem instances with random walks and save them.
    ProblemInst(ProblemInstArgs),
    /// Train a heuristic function.
    Train(TrainArgs),
    /// Summarize the statistics of a training run.
    TrainSummary(TrainSummaryArgs),
    /// Time domain operations and, optionally, a checkpoint's forward pass.
    Time(TimeArgs),
    /// Render a generated instance; optionally apply actions interactively.
    Viz(VizArgs),
    /// List registered domains and their capabilities.
    DomainInfo,
    /// List registered heuristic-function architectures.
    HeuristicInfo,
}

#[derive(Args)]
struct SolveArgs {
    /// Domain spec, e.g. `stp3` or `grid:width=8,height=8`.
    #[arg(long)]
    domain: String,
    /// Problem-instances file (JSON lines).
    #[arg(long)]
    insts: PathBuf,
    /// Trained checkpoint; without one the heuristic is zero (uniform
    /// cost search).
    #[arg(long)]
    ckpt: Option<PathBuf>,
    /// Algorithm spec, e.g. `graph_v.10B_0.6W`.
    #[arg(long, default_value = "graph_v")]
    algo: String,
    /// Results file to write.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Stream per-iteration search statistics to stderr.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct ProblemInstArgs {
    #[arg(long)]
    domain: String,
    #[arg(long)]
    count: usize,
    /// Minimum random-walk length.
    #[arg(long, default_value_t = 0)]
    k_min: usize,
    /// Maximum random-walk length.
    #[arg(long)]
    k_max: usize,
    /// Generation scheme: forward walks or reverse walks.
    #[arg(long, default_value = "forward")]
    scheme: Scheme,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    domain: String,
    /// Architecture spec, e.g. `mlp:hidden=400-200`.
    #[arg(long, default_value = "mlp")]
    arch: String,
    /// Output directory for checkpoints, stats, and the log.
    #[arg(long)]
    out: PathBuf,
    /// Training search algorithm (batch size must be 1).
    #[arg(long, default_value = "graph_v")]
    algo: String,
    /// Heuristic head: `v` (cost-to-go) or `q` (per-action).
    #[arg(long, default_value = "v")]
    head: String,
    /// N: examples per gradient step.
    #[arg(long, default_value_t = 100)]
    batch_size: usize,
    /// U: gradient steps per update check.
    #[arg(long, default_value_t = 50)]
    update_itrs: usize,
    /// I: search iteration cap per instance.
    #[arg(long, default_value_t = 100)]
    search_itrs: usize,
    /// K max: walk-length cap (the curriculum starts at 1 with
    /// --adaptive-k, otherwise walks use this cap directly).
    #[arg(long, default_value_t = 30)]
    kmax: usize,
    #[arg(long)]
    adaptive_k: bool,
    /// R: replay-buffer span in update checks.
    #[arg(long, default_value_t = 1)]
    replay: usize,
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,
    /// `always` or `loss:<threshold>`.
    #[arg(long, default_value = "always")]
    target_update: String,
    /// `target` or `live`.
    #[arg(long, default_value = "target")]
    guidance: String,
    /// Relabel failed searches with goals from their deepest node.
    #[arg(long)]
    her: bool,
    /// Back up the whole search tree before computing targets.
    #[arg(long)]
    lhbl: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Update checks to run.
    #[arg(long, default_value_t = 100)]
    max_checks: usize,
    /// Held-out instances file evaluated periodically during training.
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    test_every: usize,
    /// Add per-phase timing to the log.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct TrainSummaryArgs {
    /// Directory holding stats.csv and stats_by_k.csv.
    #[arg(long)]
    dir: PathBuf,
    /// Where plotdata_*.csv files go (defaults to the stats directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TimeArgs {
    #[arg(long)]
    domain: String,
    #[arg(long)]
    ckpt: Option<PathBuf>,
}

#[derive(Args)]
struct VizArgs {
    #[arg(long)]
    domain: String,
    /// Random-walk length of the generated instance.
    #[arg(long, default_value_t = 0)]
    steps: usize,
    /// Read action texts from standard input and apply them.
    #[arg(long)]
    interactive: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Parse arguments and run; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let registry = Registry::with_builtins();
    match cli.command {
        Command::Solve(args) => cmd_solve(&registry, args),
        Command::ProblemInst(args) => cmd_problem_inst(&registry, args),
        Command::Train(args) => cmd_train(&registry, args),
        Command::TrainSummary(args) => {
            let out_dir = args.out.clone().unwrap_or_else(|| args.dir.clone());
            run_summary(&args.dir, &out_dir, &mut std::io::stdout())
        }
        Command::Time(args) => {
            let domain = registry.build_domain(&args.domain)?;
            let report = domain.time_report(args.ckpt.as_deref())?;
            print!("{report}");
            Ok(())
        }
        Command::Viz(args) => {
            let domain = registry.build_domain(&args.domain)?;
            let stdin = std::io::stdin();
            let mut input = stdin.lock();
            let mut output = std::io::stdout();
            domain.viz(
                args.steps,
                args.interactive,
                args.seed,
                &mut input,
                &mut output,
            )
        }
        Command::DomainInfo => {
            for entry in registry.domains() {
                let domain = registry.build_domain(entry.name)?;
                println!("{}: {}", entry.name, entry.summary);
                println!("  args: {}", entry.args_help);
                println!("  capabilities: {}", domain.capabilities().join(", "));
            }
            Ok(())
        }
        Command::HeuristicInfo => {
            for entry in registry.archs() {
                println!("{}: {}", entry.name, entry.summary);
                println!("  args: {}", entry.args_help);
            }
            Ok(())
        }
    }
}

fn cmd_solve(registry: &Registry, args: SolveArgs) -> Result<(), CliError> {
    let domain = registry.build_domain(&args.domain)?;
    let algo = parse_algo(&args.algo).map_err(|e| CliError::Usage(e.to_string()))?;
    let insts = read_instances(&args.insts)?;
    let records = domain.solve(
        &insts,
        &algo,
        args.ckpt.as_deref(),
        args.workers,
        args.seed,
        args.verbose,
    )?;
    let summary = SolveSummary::from_records(&records);
    write_results(&args.out, &records, &summary)?;
    println!(
        "{} instances, solved {} ({}), results written to {}",
        summary.count,
        summary.solved,
        summary
            .solve_rate
            .map_or("n/a".to_string(), |r| format!("{:.1}%", r * 100.0)),
        args.out.display()
    );
    Ok(())
}

fn cmd_problem_inst(registry: &Registry, args: ProblemInstArgs) -> Result<(), CliError> {
    if args.k_min > args.k_max {
        return Err(CliError::Usage(format!(
            "k_min {} exceeds k_max {}",
            args.k_min, args.k_max
        )));
    }
    let domain = registry.build_domain(&args.domain)?;
    // Walk lengths uniform in [k_min, k_max].
    let mut rng =
        <rand_chacha::ChaCha12Rng as rand::SeedableRng>::seed_from_u64(args.seed);
    let ks: Vec<usize> = sample_ks(args.k_max - args.k_min, args.count, &mut rng)
        .into_iter()
        .map(|k| k + args.k_min)
        .collect();
    let insts = domain.gen_instances(args.scheme, &ks, args.seed.wrapping_add(1))?;
    write_instances(&args.out, &insts)?;
    println!(
        "{} instances written to {}",
        insts.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_train(registry: &Registry, args: TrainArgs) -> Result<(), CliError> {
    let domain = registry.build_domain(&args.domain)?;
    let (arch_name, arch_args) = split_spec(&args.arch)?;
    let arch = registry.find_arch(arch_name)?;

    let head = match args.head.as_str() {
        "v" => Head::V,
        "q" => Head::Q,
        other => {
            return Err(CliError::Usage(format!(
                "unknown head `{other}` (expected v or q)"
            )))
        }
    };
    let guidance = match args.guidance.as_str() {
        "target" => Guidance::Target,
        "live" => Guidance::Live,
        other => {
            return Err(CliError::Usage(format!(
                "unknown guidance `{other}` (expected target or live)"
            )))
        }
    };
    let target_update = if args.target_update == "always" {
        TargetUpdate::Always
    } else if let Some(raw) = args.target_update.strip_prefix("loss:") {
        let threshold: f64 = raw.parse().map_err(|_| {
            CliError::Usage(format!("bad loss threshold `{raw}` in --target-update"))
        })?;
        TargetUpdate::LossBelow(threshold)
    } else {
        return Err(CliError::Usage(format!(
            "unknown target-update `{}` (expected always or loss:<t>)",
            args.target_update
        )));
    };
    let algo = parse_algo(&args.algo).map_err(|e| CliError::Usage(e.to_string()))?;

    let cfg = TrainConfig {
        batch_size: args.batch_size,
        update_itrs: args.update_itrs,
        search_itrs: args.search_itrs,
        k_start: if args.adaptive_k { 1 } else { args.kmax },
        k_max: args.kmax,
        adaptive_k: args.adaptive_k,
        replay_checks: args.replay,
        lr: args.lr,
        workers: args.workers,
        target_update,
        guidance,
        her: args.her,
        lhbl: args.lhbl,
        algo,
        head,
        seed: args.seed,
        max_update_checks: args.max_checks,
        test_every: args.test_every,
        verbose: args.verbose,
    };
    let test_insts = args.test.as_deref().map(read_instances).transpose()?;

    let seed = args.seed;
    let lr = args.lr;
    let factory = move |in_dim: usize, out_dim: usize| {
        arch.build(&arch_args, in_dim, out_dim, seed, lr)
    };
    domain.train(
        &cfg,
        arch_name,
        &factory,
        test_insts.as_deref(),
        &args.out,
    )?;
    println!("training finished; outputs in {}", args.out.display());
    Ok(())
}
