//! Result files. Field order is fixed by struct declaration order, and
//! nothing time- or environment-dependent is written unless `--timings` asks
//! for it, so repeated runs are byte-identical.

use std::fmt::Write as _;

use oracle_summ_core::{Score, Summary};
use serde::{Deserialize, Serialize};

pub use crate::task::SCHEMA_VERSION;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultFile {
    pub schema_version: u32,
    pub command: String,
    pub tasks: Vec<TaskResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<BatchSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlation: Option<CorrelationReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<Warning>,
}

impl ResultFile {
    pub fn new(command: &str) -> Self {
        ResultFile {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            tasks: Vec::new(),
            summary: None,
            correlation: None,
            warnings: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaskResult {
    pub task: String,
    #[serde(default, flatten, skip_serializing_if = "Option::is_none")]
    pub shape: Option<TaskShape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<SummaryReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enumeration: Option<EnumerationReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub greedy: Option<SummaryReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<CountReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lp: Option<LpReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluation: Option<EvaluationReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bench: Option<BenchReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl TaskResult {
    pub fn named(task: impl Into<String>) -> Self {
        TaskResult {
            task: task.into(),
            shape: None,
            oracle: None,
            enumeration: None,
            greedy: None,
            count: None,
            lp: None,
            evaluation: None,
            bench: None,
            timings: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskShape {
    pub n: usize,
    pub l_max: usize,
    pub sentences: usize,
    pub denominator: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub numerator: u64,
    pub denominator: u64,
    pub value: f64,
}

impl From<Score> for ScoreReport {
    fn from(s: Score) -> Self {
        ScoreReport {
            numerator: s.numerator,
            denominator: s.denominator,
            value: s.as_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub sentences: Vec<usize>,
    pub length: usize,
    pub score: ScoreReport,
}

impl SummaryReport {
    pub fn new(summary: &Summary, length: usize) -> Self {
        SummaryReport {
            sentences: summary.sentences.clone(),
            length,
            score: summary.score.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub tau: ScoreReport,
    pub count: usize,
    pub oracles: Vec<Vec<usize>>,
    pub nodes_checked: u64,
    pub candidates: usize,
    pub greedy: SummaryReport,
    /// Greedy score over τ; absent when τ is zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub greedy_ratio: Option<f64>,
    /// Mean Jaccard index between the greedy summary and each oracle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub greedy_jaccard: Option<f64>,
}

/// Feasible-summary counts as decimal strings; they outgrow every fixed-width
/// integer on real inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub feasible: String,
    pub feasible_relevant: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpReport {
    pub path: String,
    pub binaries: usize,
    pub integers: usize,
    pub constraints: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrfReport {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub system: Vec<usize>,
    pub oracles: Vec<Vec<usize>>,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub per_oracle: Vec<PrfReport>,
    pub jaccard: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_single: Option<RandomSingleReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSingleReport {
    pub trials: usize,
    pub seed: u64,
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub mean_f_measure: f64,
    pub f_interval: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub candidates: usize,
    pub feasible: String,
    pub feasible_relevant: String,
    pub nodes_pruned: u64,
    /// Absent when the task has too many candidates to search unpruned.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes_unpruned: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<f64>,
    pub tau: ScoreReport,
    pub oracles: usize,
}

/// Wall-clock milliseconds; only written with `--timings`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub search_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unpruned_ms: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub tasks: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub median_oracles: Option<f64>,
    /// Fraction of tasks with more than one oracle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiple_oracle_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_greedy_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub median_feasible: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub median_nodes_pruned: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub median_nodes_unpruned: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub median_reduction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub median_search_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub observations: usize,
    pub pearson: f64,
    pub spearman: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Warning {
    pub input: String,
    pub message: String,
}

fn sets(sets: &[Vec<usize>]) -> String {
    let inner: Vec<String> = sets.iter().map(|s| set(s)).collect();
    inner.join(" ")
}

fn set(s: &[usize]) -> String {
    let ids: Vec<String> = s.iter().map(usize::to_string).collect();
    format!("{{{}}}", ids.join(","))
}

fn score(s: &ScoreReport) -> String {
    format!("{:.6} ({}/{})", s.value, s.numerator, s.denominator)
}

/// Plain-text rendering for `--format text`.
pub fn render_text(result: &ResultFile) -> String {
    let mut out = String::new();
    for t in &result.tasks {
        let _ = write!(out, "task {}", t.task);
        if let Some(s) = &t.shape {
            let _ = write!(out, "  n={} l_max={} sentences={}", s.n, s.l_max, s.sentences);
        }
        out.push('\n');
        if let Some(o) = &t.oracle {
            let _ = writeln!(
                out,
                "  oracle {} length {} score {}",
                set(&o.sentences),
                o.length,
                score(&o.score)
            );
        }
        if let Some(e) = &t.enumeration {
            let _ = writeln!(out, "  tau {}", score(&e.tau));
            let _ = writeln!(out, "  oracles {}: {}", e.count, sets(&e.oracles));
            let _ = writeln!(
                out,
                "  nodes checked {} over {} candidates",
                e.nodes_checked, e.candidates
            );
            let _ = writeln!(
                out,
                "  greedy {} score {}",
                set(&e.greedy.sentences),
                score(&e.greedy.score)
            );
        }
        if let Some(g) = &t.greedy {
            let _ = writeln!(
                out,
                "  greedy {} length {} score {}",
                set(&g.sentences),
                g.length,
                score(&g.score)
            );
        }
        if let Some(c) = &t.count {
            let _ = writeln!(out, "  feasible {} (relevant only {})", c.feasible, c.feasible_relevant);
        }
        if let Some(lp) = &t.lp {
            let _ = writeln!(
                out,
                "  wrote {} ({} binaries, {} integers, {} constraints)",
                lp.path, lp.binaries, lp.integers, lp.constraints
            );
        }
        if let Some(e) = &t.evaluation {
            let _ = writeln!(out, "  system {} against {}", set(&e.system), sets(&e.oracles));
            let _ = writeln!(out, "  P {:.6} R {:.6} F {:.6}", e.precision, e.recall, e.f_measure);
            if let Some(r) = &e.random_single {
                let _ = writeln!(
                    out,
                    "  single oracle x{}: P {:.6} R {:.6} F {:.6} [{:.6}, {:.6}]",
                    r.trials, r.mean_precision, r.mean_recall, r.mean_f_measure, r.f_interval[0], r.f_interval[1]
                );
            }
        }
        if let Some(b) = &t.bench {
            let unpruned = b.nodes_unpruned.map_or("-".to_string(), |v| v.to_string());
            let _ = writeln!(
                out,
                "  feasible {} nodes {} unpruned {} oracles {} tau {}",
                b.feasible,
                b.nodes_pruned,
                unpruned,
                b.oracles,
                score(&b.tau)
            );
        }
        if let Some(tm) = &t.timings {
            let _ = writeln!(out, "  search {:.3} ms", tm.search_ms);
        }
    }
    if let Some(s) = &result.summary {
        let _ = write!(out, "summary tasks={}", s.tasks);
        let fields: [(&str, Option<String>); 8] = [
            ("median_oracles", s.median_oracles.map(|v| v.to_string())),
            (
                "multiple_oracle_rate",
                s.multiple_oracle_rate.map(|v| format!("{v:.4}")),
            ),
            ("mean_greedy_ratio", s.mean_greedy_ratio.map(|v| format!("{v:.4}"))),
            ("median_feasible", s.median_feasible.clone()),
            ("median_nodes_pruned", s.median_nodes_pruned.map(|v| v.to_string())),
            ("median_nodes_unpruned", s.median_nodes_unpruned.map(|v| v.to_string())),
            ("median_reduction", s.median_reduction.map(|v| format!("{v:.3}"))),
            ("median_search_ms", s.median_search_ms.map(|v| format!("{v:.3}"))),
        ];
        for (k, v) in fields {
            if let Some(v) = v {
                let _ = write!(out, " {k}={v}");
            }
        }
        out.push('\n');
    }
    if let Some(c) = &result.correlation {
        let _ = writeln!(
            out,
            "correlation over {} pairs: pearson {:.6} spearman {:.6}",
            c.observations, c.pearson, c.spearman
        );
    }
    for w in &result.warnings {
        let _ = writeln!(out, "warning {}: {}", w.input, w.message);
    }
    out
}
