//! Command implementations. Each returns a [`ResultFile`]; printing and exit
//! codes are left to the binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use oracle_summ_core::{
    build_ilp, count_feasible, count_feasible_relevant, enumerate_oracles, extract_one_oracle, greedy_initial, jaccard,
    multi_oracle_prf, pearson, random_single_oracle, spearman, BigUint, IlpModel, OracleFamily, SearchOptions,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::report::*;
use crate::task::{expand_inputs, load_task, Overrides, PreparedTask};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub overrides: Overrides,
    pub search: SearchOptions,
    pub jobs: usize,
    pub seed: u64,
    pub timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            overrides: Overrides::default(),
            search: SearchOptions::default(),
            jobs: 1,
            seed: 0,
            timings: false,
        }
    }
}

fn shape(t: &PreparedTask) -> TaskShape {
    TaskShape {
        n: t.n,
        l_max: t.budget.words(),
        sentences: t.problem.len(),
        denominator: t.problem.bank().denominator(),
    }
}

/// Loads every input (directories expand to their `*.json` files) and maps
/// `f` over the prepared tasks on a pool of `jobs` workers. Output order
/// follows input order whatever the pool width.
fn run_tasks<F>(inputs: &[PathBuf], opts: &RunOptions, f: F) -> Result<Vec<TaskResult>>
where
    F: Fn(&PreparedTask) -> Result<TaskResult> + Sync,
{
    let paths = expand_inputs(inputs)?;
    if paths.is_empty() {
        return Err(CliError::validation("no task files given"));
    }
    let per_path = in_pool(opts.jobs, || {
        paths
            .par_iter()
            .map(|p| {
                let tasks = load_task(p, &opts.overrides)?;
                tasks
                    .iter()
                    .map(|t| f(t).map_err(|e| e.in_task(&t.name)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Vec<_>>()
    })?;
    let mut out = Vec::new();
    for r in per_path {
        out.extend(r?);
    }
    Ok(out)
}

fn in_pool<T: Send>(jobs: usize, work: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::runtime(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(work))
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn oracle(inputs: &[PathBuf], opts: &RunOptions) -> Result<ResultFile> {
    let mut result = ResultFile::new("oracle");
    result.tasks = run_tasks(inputs, opts, |t| {
        let start = Instant::now();
        let best = extract_one_oracle(&t.problem, t.budget, &opts.search);
        let mut r = TaskResult::named(&t.name);
        r.shape = Some(shape(t));
        r.oracle = Some(SummaryReport::new(&best, t.problem.set_length(&best.sentences)));
        if opts.timings {
            r.timings = Some(Timings {
                search_ms: elapsed_ms(start),
                unpruned_ms: None,
            });
        }
        Ok(r)
    })?;
    Ok(result)
}

fn mean_jaccard(a: &[usize], family: &[Vec<usize>]) -> Option<f64> {
    let values: Vec<f64> = family.iter().filter_map(|o| jaccard(a, o).ok()).collect();
    (!values.is_empty() && values.len() == family.len()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

pub fn enumerate(inputs: &[PathBuf], opts: &RunOptions) -> Result<ResultFile> {
    let mut result = ResultFile::new("enumerate");
    result.tasks = run_tasks(inputs, opts, |t| {
        let start = Instant::now();
        let found = enumerate_oracles(&t.problem, t.budget, &opts.search);
        let search_ms = elapsed_ms(start);
        let greedy_ratio =
            (found.tau.numerator > 0).then(|| found.greedy.score.numerator as f64 / found.tau.numerator as f64);
        let mut r = TaskResult::named(&t.name);
        r.shape = Some(shape(t));
        r.enumeration = Some(EnumerationReport {
            tau: found.tau.into(),
            count: found.oracles.len(),
            greedy_jaccard: mean_jaccard(&found.greedy.sentences, &found.oracles),
            oracles: found.oracles,
            nodes_checked: found.nodes_checked,
            candidates: found.candidates,
            greedy: SummaryReport::new(&found.greedy, t.problem.set_length(&found.greedy.sentences)),
            greedy_ratio,
        });
        if opts.timings {
            r.timings = Some(Timings {
                search_ms,
                unpruned_ms: None,
            });
        }
        Ok(r)
    })?;
    result.summary = Some(enumeration_summary(&result.tasks, opts.timings));
    Ok(result)
}

fn enumeration_summary(tasks: &[TaskResult], timings: bool) -> BatchSummary {
    let reports: Vec<&EnumerationReport> = tasks.iter().filter_map(|t| t.enumeration.as_ref()).collect();
    let counts: Vec<f64> = reports.iter().map(|e| e.count as f64).collect();
    let ratios: Vec<f64> = reports.iter().filter_map(|e| e.greedy_ratio).collect();
    let multiple = reports.iter().filter(|e| e.count > 1).count();
    BatchSummary {
        tasks: reports.len(),
        median_oracles: median(&counts),
        multiple_oracle_rate: (!reports.is_empty()).then(|| multiple as f64 / reports.len() as f64),
        mean_greedy_ratio: (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
        median_search_ms: timings
            .then(|| median_of(tasks, |t| t.timings.as_ref().map(|x| x.search_ms)))
            .flatten(),
        ..BatchSummary::default()
    }
}

fn median_of(tasks: &[TaskResult], f: impl Fn(&TaskResult) -> Option<f64>) -> Option<f64> {
    median(&tasks.iter().filter_map(f).collect::<Vec<_>>())
}

/// Middle value, or the mean of the two middle values.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    })
}

/// Exact median of big counts, written in decimal (".5" for a half).
pub fn median_big(values: &[BigUint]) -> Option<String> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort();
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        return Some(v[m].to_string());
    }
    let sum = &v[m - 1] + &v[m];
    let half = &sum >> 1u32;
    Some(if sum.bit(0) {
        format!("{half}.5")
    } else {
        half.to_string()
    })
}

pub fn greedy(inputs: &[PathBuf], opts: &RunOptions) -> Result<ResultFile> {
    let mut result = ResultFile::new("greedy");
    result.tasks = run_tasks(inputs, opts, |t| {
        let start = Instant::now();
        let g = greedy_initial(&t.problem, t.budget);
        let mut r = TaskResult::named(&t.name);
        r.shape = Some(shape(t));
        r.greedy = Some(SummaryReport::new(&g, t.problem.set_length(&g.sentences)));
        if opts.timings {
            r.timings = Some(Timings {
                search_ms: elapsed_ms(start),
                unpruned_ms: None,
            });
        }
        Ok(r)
    })?;
    Ok(result)
}

fn counts(t: &PreparedTask) -> (BigUint, BigUint) {
    let l_max = t.budget.words();
    (
        count_feasible(t.problem.lengths(), l_max),
        count_feasible_relevant(&t.problem, l_max),
    )
}

pub fn count(inputs: &[PathBuf], opts: &RunOptions) -> Result<ResultFile> {
    let mut result = ResultFile::new("count");
    result.tasks = run_tasks(inputs, opts, |t| {
        let (all, relevant) = counts(t);
        let mut r = TaskResult::named(&t.name);
        r.shape = Some(shape(t));
        r.count = Some(CountReport {
            feasible: all.to_string(),
            feasible_relevant: relevant.to_string(),
        });
        Ok(r)
    })?;
    Ok(result)
}

/// Writes the model in LP format to `path`.
pub fn write_lp_file(model: &IlpModel, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, model.to_lp_string()).map_err(|e| CliError::io(path, e))
}

fn file_safe(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_alphanumeric() || "-_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// With one task `out` is the LP file; with several it is a directory that
/// receives `<task>.lp` per task.
pub fn export_lp(inputs: &[PathBuf], out: &Path, opts: &RunOptions) -> Result<ResultFile> {
    let mut result = ResultFile::new("export-lp");
    let paths = expand_inputs(inputs)?;
    let single = paths.len() == 1 && !opts.overrides.per_reference && !out.is_dir();
    result.tasks = run_tasks(&paths, opts, |t| {
        let model = build_ilp(&t.problem, t.budget);
        let path = if single {
            out.to_path_buf()
        } else {
            out.join(format!("{}.lp", file_safe(&t.name)))
        };
        write_lp_file(&model, &path)?;
        let mut r = TaskResult::named(&t.name);
        r.shape = Some(shape(t));
        r.lp = Some(LpReport {
            path: path.display().to_string(),
            binaries: model.num_binaries(),
            integers: model.num_integers(),
            constraints: model.num_constraints(),
        });
        Ok(r)
    })?;
    Ok(result)
}

#[derive(Debug, Clone)]
pub struct EvaluateOptions {
    pub system: Vec<usize>,
    pub oracles: Option<PathBuf>,
    /// Trials for the single random oracle mode; off when `None`.
    pub random_single: Option<usize>,
    pub resamples: usize,
}

/// Oracle families read from disk: a bare list of sets, or an `enumerate`
/// result file keyed by task name.
#[derive(Debug, Clone)]
pub enum OracleSource {
    Family(Vec<Vec<usize>>),
    Results(Vec<(String, Vec<Vec<usize>>)>),
}

impl OracleSource {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let bad = |e: serde_json::Error| CliError::validation(format!("{}: {e}", path.display()));
        let value: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
        if value.is_array() {
            return Ok(OracleSource::Family(serde_json::from_value(value).map_err(bad)?));
        }
        let file: ResultFile = serde_json::from_value(value).map_err(bad)?;
        let families = file
            .tasks
            .into_iter()
            .filter_map(|t| t.enumeration.map(|e| (t.task, e.oracles)))
            .collect::<Vec<_>>();
        if families.is_empty() {
            return Err(CliError::validation(format!(
                "{}: no oracle families found",
                path.display()
            )));
        }
        Ok(OracleSource::Results(families))
    }

    fn for_task(&self, name: Option<&str>) -> Result<Vec<Vec<usize>>> {
        match (self, name) {
            (OracleSource::Family(f), _) => Ok(f.clone()),
            (OracleSource::Results(r), None) if r.len() == 1 => Ok(r[0].1.clone()),
            (OracleSource::Results(_), None) => Err(CliError::validation(
                "oracle file holds several tasks; name one with a task file",
            )),
            (OracleSource::Results(r), Some(n)) => r
                .iter()
                .find(|(t, _)| t == n)
                .map(|(_, f)| f.clone())
                .ok_or_else(|| CliError::validation(format!("oracle file has no task `{n}`"))),
        }
    }
}

fn evaluate_one(
    system: &[usize],
    oracles: Vec<Vec<usize>>,
    eval: &EvaluateOptions,
    seed: u64,
    stream: u64,
) -> Result<EvaluationReport> {
    let invalid = |e: oracle_summ_core::EvalError| CliError::validation(e.to_string());
    let family = OracleFamily::new(oracles).map_err(invalid)?;
    let report = multi_oracle_prf(system, &family).map_err(invalid)?;
    let jaccard = family
        .oracles()
        .iter()
        .map(|o| jaccard(system, o))
        .collect::<Result<Vec<_>, _>>()
        .map_err(invalid)?;
    let random_single = match eval.random_single {
        Some(trials) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let r = random_single_oracle(system, &family, trials, eval.resamples, &mut rng).map_err(invalid)?;
            Some(RandomSingleReport {
                trials: r.trials,
                seed,
                mean_precision: r.mean_precision,
                mean_recall: r.mean_recall,
                mean_f_measure: r.mean_f_measure,
                f_interval: [r.f_interval.0, r.f_interval.1],
            })
        }
        None => None,
    };
    let mut system = system.to_vec();
    system.sort_unstable();
    system.dedup();
    Ok(EvaluationReport {
        system,
        oracles: family.oracles().to_vec(),
        precision: report.precision,
        recall: report.recall,
        f_measure: report.f_measure,
        per_oracle: report
            .per_oracle
            .iter()
            .map(|p| PrfReport {
                precision: p.precision,
                recall: p.recall,
                f_measure: p.f_measure,
            })
            .collect(),
        jaccard,
        random_single,
    })
}

/// Scores a system summary against oracle families. Families come from
/// `--oracles` when given, otherwise they are enumerated from the tasks.
pub fn evaluate(inputs: &[PathBuf], eval: &EvaluateOptions, opts: &RunOptions) -> Result<ResultFile> {
    let mut result = ResultFile::new("evaluate");
    let source = eval.oracles.as_deref().map(OracleSource::load).transpose()?;
    if inputs.is_empty() {
        let source = source.ok_or_else(|| CliError::validation("evaluate needs task files or --oracles"))?;
        let name = eval
            .oracles
            .as_ref()
            .and_then(|p| p.file_stem())
            .map_or("oracles".into(), |s| s.to_string_lossy().into_owned());
        let mut r = TaskResult::named(name);
        r.evaluation = Some(evaluate_one(&eval.system, source.for_task(None)?, eval, opts.seed, 0)?);
        result.tasks.push(r);
        return Ok(result);
    }
    result.tasks = run_tasks(inputs, opts, |t| {
        if let Some(&bad) = eval.system.iter().find(|&&i| i >= t.problem.len()) {
            return Err(CliError::validation(format!(
                "system sentence {bad} out of range ({} sentences)",
                t.problem.len()
            )));
        }
        let oracles = match &source {
            Some(s) => s.for_task(Some(&t.name))?,
            None => enumerate_oracles(&t.problem, t.budget, &opts.search).oracles,
        };
        let mut r = TaskResult::named(&t.name);
        r.shape = Some(shape(t));
        r.evaluation = Some(evaluate_one(
            &eval.system,
            oracles,
            eval,
            opts.seed,
            stream_for(&t.name),
        )?);
        Ok(r)
    })?;
    Ok(result)
}

/// Random stream per task, so draws do not depend on pool scheduling.
fn stream_for(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    /// Largest branching set searched without pruning.
    pub max_unpruned: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { max_unpruned: 22 }
    }
}

/// Desk-scale benchmark over a directory of tasks. Unreadable or invalid
/// tasks are skipped and listed under `warnings`.
pub fn bench(dir: &Path, bench: &BenchOptions, opts: &RunOptions) -> Result<ResultFile> {
    let mut result = ResultFile::new("bench");
    let paths = expand_inputs(&[dir.to_path_buf()])?;
    let rows = in_pool(opts.jobs, || {
        paths
            .par_iter()
            .map(|p| {
                load_task(p, &opts.overrides).map(|ts| ts.iter().map(|t| bench_one(t, bench, opts)).collect::<Vec<_>>())
            })
            .collect::<Vec<_>>()
    })?;
    let mut feasible = Vec::new();
    for (path, row) in paths.iter().zip(rows) {
        match row {
            Ok(tasks) => {
                for (r, f) in tasks {
                    feasible.push(f);
                    result.tasks.push(r);
                }
            }
            Err(e) => {
                log::warn!("skipping {}: {e}", path.display());
                result.warnings.push(Warning {
                    input: path.display().to_string(),
                    message: e.to_string(),
                });
            }
        }
    }
    let b = |t: &TaskResult| t.bench.clone();
    let reports: Vec<BenchReport> = result.tasks.iter().filter_map(b).collect();
    let pick = |f: fn(&BenchReport) -> Option<f64>| median(&reports.iter().filter_map(f).collect::<Vec<_>>());
    result.summary = Some(BatchSummary {
        tasks: reports.len(),
        median_oracles: pick(|r| Some(r.oracles as f64)),
        multiple_oracle_rate: (!reports.is_empty())
            .then(|| reports.iter().filter(|r| r.oracles > 1).count() as f64 / reports.len() as f64),
        median_feasible: median_big(&feasible),
        median_nodes_pruned: pick(|r| Some(r.nodes_pruned as f64)),
        median_nodes_unpruned: pick(|r| r.nodes_unpruned.map(|v| v as f64)),
        median_reduction: pick(|r| r.reduction),
        median_search_ms: opts
            .timings
            .then(|| median_of(&result.tasks, |t| t.timings.as_ref().map(|x| x.search_ms)))
            .flatten(),
        ..BatchSummary::default()
    });
    Ok(result)
}

fn bench_one(t: &PreparedTask, bench: &BenchOptions, opts: &RunOptions) -> (TaskResult, BigUint) {
    let (all, relevant) = counts(t);
    let pruned_opts = SearchOptions {
        prune: true,
        ..opts.search
    };
    let start = Instant::now();
    let pruned = enumerate_oracles(&t.problem, t.budget, &pruned_opts);
    let search_ms = elapsed_ms(start);
    let mut unpruned_ms = None;
    let nodes_unpruned = (pruned.candidates <= bench.max_unpruned).then(|| {
        let start = Instant::now();
        let full = enumerate_oracles(
            &t.problem,
            t.budget,
            &SearchOptions {
                prune: false,
                ..opts.search
            },
        );
        unpruned_ms = Some(elapsed_ms(start));
        debug_assert_eq!(full.oracles, pruned.oracles);
        full.nodes_checked
    });
    let reduction = nodes_unpruned.map(|u| u as f64 / pruned.nodes_checked.max(1) as f64);
    let mut r = TaskResult::named(&t.name);
    r.shape = Some(shape(t));
    r.bench = Some(BenchReport {
        candidates: pruned.candidates,
        feasible: all.to_string(),
        feasible_relevant: relevant.to_string(),
        nodes_pruned: pruned.nodes_checked,
        nodes_unpruned,
        reduction,
        tau: pruned.tau.into(),
        oracles: pruned.oracles.len(),
    });
    if opts.timings {
        r.timings = Some(Timings { search_ms, unpruned_ms });
    }
    (r, all)
}

/// Pearson and Spearman correlation of two whitespace-separated columns;
/// blank lines and `#` comments are ignored.
pub fn correlate(path: &Path) -> Result<ResultFile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| CliError::validation(format!("{} line {}: {e}", path.display(), i + 1)))
        };
        if fields.len() != 2 {
            return Err(CliError::validation(format!(
                "{} line {}: expected two columns, found {}",
                path.display(),
                i + 1,
                fields.len()
            )));
        }
        xs.push(parse(fields[0])?);
        ys.push(parse(fields[1])?);
    }
    let invalid = |e: oracle_summ_core::EvalError| CliError::validation(e.to_string());
    let mut result = ResultFile::new("correlate");
    result.correlation = Some(CorrelationReport {
        observations: xs.len(),
        pearson: pearson(&xs, &ys).map_err(invalid)?,
        spearman: spearman(&xs, &ys).map_err(invalid)?,
    });
    Ok(result)
}
