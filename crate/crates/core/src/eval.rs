//! Evaluating a system's sentence selection against a family of oracles,
//! plus set overlap and correlation helpers.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("oracle family is empty")]
    EmptyFamily,
    #[error("oracle {0} is empty")]
    EmptyOracle(usize),
    #[error("oracles {0} and {1} are the same set")]
    DuplicateOracle(usize, usize),
    #[error("system summary is empty")]
    EmptySystem,
    #[error("both sets are empty")]
    EmptySets,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least two observations, got {0}")]
    TooFewObservations(usize),
    #[error("input has zero variance")]
    ZeroVariance,
    #[error("input contains NaN")]
    NotANumber,
    #[error("at least one trial and one resample are required")]
    NoTrials,
}

/// Non-empty list of distinct, non-empty sentence sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleFamily {
    oracles: Vec<Vec<usize>>,
}

impl OracleFamily {
    pub fn new(oracles: Vec<Vec<usize>>) -> Result<Self, EvalError> {
        if oracles.is_empty() {
            return Err(EvalError::EmptyFamily);
        }
        let mut normalized = Vec::with_capacity(oracles.len());
        for (i, mut set) in oracles.into_iter().enumerate() {
            set.sort_unstable();
            set.dedup();
            if set.is_empty() {
                return Err(EvalError::EmptyOracle(i));
            }
            if let Some(j) = normalized.iter().position(|o| *o == set) {
                return Err(EvalError::DuplicateOracle(j, i));
            }
            normalized.push(set);
        }
        Ok(OracleFamily { oracles: normalized })
    }

    pub fn oracles(&self) -> &[Vec<usize>] {
        &self.oracles
    }

    pub fn len(&self) -> usize {
        self.oracles.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

impl Prf {
    fn from_pr(precision: f64, recall: f64) -> Self {
        Prf {
            precision,
            recall,
            f_measure: f_measure(precision, recall),
        }
    }
}

/// Harmonic mean of precision and recall; zero when both are zero.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    /// Computed from the averaged precision and recall.
    pub f_measure: f64,
    pub per_oracle: Vec<Prf>,
}

fn normalized(set: &[usize]) -> Vec<usize> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

fn overlap(a: &[usize], b: &[usize]) -> usize {
    a.iter().filter(|x| b.binary_search(x).is_ok()).count()
}

fn against(system: &[usize], oracle: &[usize]) -> Prf {
    let hit = overlap(system, oracle) as f64;
    Prf::from_pr(hit / system.len() as f64, hit / oracle.len() as f64)
}

/// Precision and recall of `system` averaged over all oracles, and the
/// F-measure of those averages.
pub fn multi_oracle_prf(system: &[usize], family: &OracleFamily) -> Result<EvalReport, EvalError> {
    let system = normalized(system);
    if system.is_empty() {
        return Err(EvalError::EmptySystem);
    }
    let per_oracle: Vec<Prf> = family.oracles.iter().map(|o| against(&system, o)).collect();
    let m = per_oracle.len() as f64;
    let precision = per_oracle.iter().map(|p| p.precision).sum::<f64>() / m;
    let recall = per_oracle.iter().map(|p| p.recall).sum::<f64>() / m;
    Ok(EvalReport {
        precision,
        recall,
        f_measure: f_measure(precision, recall),
        per_oracle,
    })
}

pub fn jaccard(a: &[usize], b: &[usize]) -> Result<f64, EvalError> {
    let a = normalized(a);
    let b = normalized(b);
    let inter = overlap(&a, &b);
    let union = a.len() + b.len() - inter;
    if union == 0 {
        return Err(EvalError::EmptySets);
    }
    Ok(inter as f64 / union as f64)
}

fn check_pair(xs: &[f64], ys: &[f64]) -> Result<(), EvalError> {
    if xs.len() != ys.len() {
        return Err(EvalError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(EvalError::TooFewObservations(xs.len()));
    }
    if xs.iter().chain(ys).any(|v| v.is_nan()) {
        return Err(EvalError::NotANumber);
    }
    Ok(())
}

/// Sample Pearson product-moment correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, EvalError> {
    check_pair(xs, ys)?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EvalError::ZeroVariance);
    }
    let r = sxy / libm::sqrt(sxx * syy);
    Ok(r.clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]] == values[idx[start]] {
            end += 1;
        }
        // ranks start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman's rank correlation: Pearson over average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64, EvalError> {
    check_pair(xs, ys)?;
    pearson(&average_ranks(xs), &average_ranks(ys))
}

/// Mean F-measure over repeated draws of a single random oracle, with a
/// percentile bootstrap interval.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomOracleReport {
    pub trials: usize,
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub mean_f_measure: f64,
    /// 95% bootstrap interval of the mean F-measure.
    pub f_interval: (f64, f64),
}

/// Draws one oracle uniformly per trial, scores `system` against it alone,
/// then bootstraps the mean F-measure with `resamples` resamples.
pub fn random_single_oracle<R: Rng + ?Sized>(
    system: &[usize],
    family: &OracleFamily,
    trials: usize,
    resamples: usize,
    rng: &mut R,
) -> Result<RandomOracleReport, EvalError> {
    if trials == 0 || resamples == 0 {
        return Err(EvalError::NoTrials);
    }
    let system = normalized(system);
    if system.is_empty() {
        return Err(EvalError::EmptySystem);
    }
    let draws: Vec<Prf> = (0..trials)
        .map(|_| against(&system, &family.oracles[rng.gen_range(0..family.len())]))
        .collect();
    let n = trials as f64;
    let mean = |f: fn(&Prf) -> f64| draws.iter().map(f).sum::<f64>() / n;
    let mut boot: Vec<f64> = (0..resamples)
        .map(|_| {
            (0..trials)
                .map(|_| draws[rng.gen_range(0..trials)].f_measure)
                .sum::<f64>()
                / n
        })
        .collect();
    boot.sort_by(f64::total_cmp);
    let pick = |q: f64| boot[((q * (resamples - 1) as f64) + 0.5) as usize];
    Ok(RandomOracleReport {
        trials,
        mean_precision: mean(|p| p.precision),
        mean_recall: mean(|p| p.recall),
        mean_f_measure: mean(|p| p.f_measure),
        f_interval: (pick(0.025), pick(0.975)),
    })
}
