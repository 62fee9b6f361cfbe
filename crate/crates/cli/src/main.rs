use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use oracle_summ::commands;
use oracle_summ::{render_text, BenchOptions, CliError, EvaluateOptions, Overrides, ResultFile, RunOptions};
use oracle_summ_core::SearchOptions;

#[derive(Parser)]
#[command(name = "oracle-summ", version, about = "Exact ROUGE-n extractive oracle summaries")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Gram order; overrides the task file.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Word budget; overrides the task file.
    #[arg(long = "lmax", global = true)]
    l_max: Option<usize>,
    /// Stopword list, one word per line.
    #[arg(long, global = true)]
    stopwords: Option<PathBuf>,
    #[arg(long, global = true)]
    no_stem: bool,
    #[arg(long, global = true, conflicts_with = "remove_stopwords")]
    keep_stopwords: bool,
    #[arg(long, global = true)]
    remove_stopwords: bool,
    /// Score against each reference separately.
    #[arg(long, global = true)]
    per_reference: bool,
    /// Report only oracles with no smaller oracle inside them.
    #[arg(long, global = true)]
    minimal_oracles: bool,
    #[arg(long, global = true)]
    no_prune: bool,
    /// Also branch on sentences that share no gram with any reference.
    #[arg(long, global = true)]
    keep_irrelevant: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for batches; defaults to the available cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Record wall-clock times (output is then no longer reproducible).
    #[arg(long, global = true)]
    timings: bool,
    /// Write the result here instead of stdout.
    #[arg(long = "output", short = 'o', global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// One optimal summary per task.
    Oracle { tasks: Vec<PathBuf> },
    /// Every optimal summary per task, with batch statistics.
    Enumerate { tasks: Vec<PathBuf> },
    /// Greedy warm-start summary.
    Greedy { tasks: Vec<PathBuf> },
    /// Number of summaries within the budget.
    Count { tasks: Vec<PathBuf> },
    /// Write the integer program in LP format.
    ExportLp {
        tasks: Vec<PathBuf>,
        /// LP file, or a directory when several tasks are given.
        #[arg(long)]
        out: PathBuf,
    },
    /// Precision, recall and F-measure of a system summary against oracles.
    Evaluate {
        tasks: Vec<PathBuf>,
        /// Selected sentence ids, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        system: Vec<usize>,
        /// Oracle sets as JSON, or an `enumerate` result file.
        #[arg(long)]
        oracles: Option<PathBuf>,
        /// Also score against a single random oracle this many times.
        #[arg(long)]
        random_single: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        resamples: usize,
    },
    /// Feasible counts and search effort over a directory of tasks.
    Bench {
        dir: PathBuf,
        /// Skip the unpruned search above this many candidate sentences.
        #[arg(long, default_value_t = BenchOptions::default().max_unpruned)]
        max_unpruned: usize,
    },
    /// Pearson and Spearman correlation of a two-column file.
    Correlate { file: PathBuf },
}

fn run(cli: &Cli) -> Result<ResultFile, CliError> {
    let g = &cli.global;
    let opts = RunOptions {
        overrides: Overrides {
            n: g.n,
            l_max: g.l_max,
            stopword_file: g.stopwords.clone(),
            no_stem: g.no_stem,
            keep_stopwords: g.keep_stopwords,
            remove_stopwords: g.remove_stopwords,
            per_reference: g.per_reference,
        },
        search: SearchOptions {
            prune: !g.no_prune,
            skip_irrelevant: !g.keep_irrelevant,
            minimal_only: g.minimal_oracles,
        },
        jobs: g
            .jobs
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
        seed: g.seed,
        timings: g.timings,
    };
    match &cli.command {
        Command::Oracle { tasks } => commands::oracle(tasks, &opts),
        Command::Enumerate { tasks } => commands::enumerate(tasks, &opts),
        Command::Greedy { tasks } => commands::greedy(tasks, &opts),
        Command::Count { tasks } => commands::count(tasks, &opts),
        Command::ExportLp { tasks, out } => commands::export_lp(tasks, out, &opts),
        Command::Evaluate {
            tasks,
            system,
            oracles,
            random_single,
            resamples,
        } => {
            let eval = EvaluateOptions {
                system: system.clone(),
                oracles: oracles.clone(),
                random_single: *random_single,
                resamples: *resamples,
            };
            commands::evaluate(tasks, &eval, &opts)
        }
        Command::Bench { dir, max_unpruned } => commands::bench(
            dir,
            &BenchOptions {
                max_unpruned: *max_unpruned,
            },
            &opts,
        ),
        Command::Correlate { file } => commands::correlate(file),
    }
}

fn emit(cli: &Cli, result: &ResultFile) -> Result<(), CliError> {
    let mut text = match cli.global.format {
        Format::Json => serde_json::to_string_pretty(result).expect("result serializes"),
        Format::Text => render_text(result),
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &cli.global.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ORACLE_SUMM_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli).and_then(|r| emit(&cli, &r)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
