//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Instances come from a fixed seed, so every run
//! checks the same cases.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use oracle_summ_core::{
    build_ilp, count_feasible, count_feasible_relevant, enumerate_oracles, exhaustive_oracles, multi_oracle_prf,
    upper_bound, BigUint, Budget, NGram, NGramMultiset, OracleFamily, OracleProblem, ReferenceBank, SearchOptions,
    EXHAUSTIVE_CAP,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Large enough that the pruning median over the |D| >= 12 subset is stable
/// across seeds; at 500 it moves by about 0.3 between seeds.
const SUITE_SIZE: usize = 2000;

struct Instance {
    problem: OracleProblem,
    budget: Budget,
}

fn grams(words: &[u8], n: usize) -> NGramMultiset {
    words
        .windows(n)
        .map(|w| {
            let names: Vec<String> = w.iter().map(|x| format!("w{x}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            NGram::from_words(&refs)
        })
        .collect()
}

/// How reference words are drawn.
#[derive(Clone, Copy)]
enum References {
    /// Spans copied from the documents mixed with random words, the way
    /// abstracts reuse source phrasing.
    Overlapping,
    /// Uniform random words, unrelated to the documents.
    Independent,
}

fn reference_words(rng: &mut ChaCha8Rng, sentences: &[Vec<u8>], vocab: u8, kind: References) -> Vec<u8> {
    let target = rng.gen_range(2..=20);
    let mut words = Vec::with_capacity(target);
    while words.len() < target {
        match kind {
            References::Overlapping if rng.gen_bool(0.7) => {
                let s = &sentences[rng.gen_range(0..sentences.len())];
                let start = rng.gen_range(0..s.len());
                let end = (start + rng.gen_range(1..=4)).min(s.len());
                words.extend_from_slice(&s[start..end]);
            }
            _ => words.push(rng.gen_range(0..vocab)),
        }
    }
    words.truncate(target);
    words
}

/// |D| ≤ 15, lengths 1..=12, vocabulary ≤ 20, n ∈ {1, 2}, L_max ≤ 30.
fn random_instance(rng: &mut ChaCha8Rng, kind: References) -> Instance {
    loop {
        let vocab = rng.gen_range(2u8..=20);
        let n = rng.gen_range(1..=2);
        let size = rng.gen_range(1..=15);
        let sentences: Vec<Vec<u8>> = (0..size)
            .map(|_| (0..rng.gen_range(1..=12)).map(|_| rng.gen_range(0..vocab)).collect())
            .collect();
        let references: Vec<NGramMultiset> = (0..rng.gen_range(1..=3))
            .map(|_| grams(&reference_words(rng, &sentences, vocab, kind), n))
            .collect();
        let sents: Vec<NGramMultiset> = sentences.iter().map(|s| grams(s, n)).collect();
        let Ok(bank) = ReferenceBank::new(references, &sents) else {
            continue;
        };
        let problem = OracleProblem::new(bank, sentences.iter().map(Vec::len).collect()).unwrap();
        let budget = Budget::new(rng.gen_range(1..=30)).unwrap();
        return Instance { problem, budget };
    }
}

fn suite(kind: References) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(20260101);
    (0..SUITE_SIZE).map(|_| random_instance(&mut rng, kind)).collect()
}

fn subsets(items: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0u64..1 << items.len()).map(move |mask| {
        items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &s)| s)
            .collect()
    })
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn option_cycle(i: usize) -> SearchOptions {
    SearchOptions {
        prune: true,
        skip_irrelevant: i.is_multiple_of(2),
        minimal_only: i % 4 >= 2,
    }
}

fn oracle_exactness(suite: &[Instance]) -> Outcome {
    let start = Instant::now();
    let mut mismatches = 0;
    for (i, inst) in suite.iter().enumerate() {
        let opts = option_cycle(i);
        let fast = enumerate_oracles(&inst.problem, inst.budget, &opts);
        let slow = exhaustive_oracles(&inst.problem, inst.budget, &opts, EXHAUSTIVE_CAP).unwrap();
        if fast.tau != slow.tau || fast.oracles != slow.oracles {
            mismatches += 1;
        }
    }
    let took = start.elapsed();
    outcome(
        mismatches == 0 && took < Duration::from_secs(60),
        format!(
            "{} instances, {mismatches} mismatches, {:.2} s",
            suite.len(),
            took.as_secs_f64()
        ),
    )
}

fn decomposition(suite: &[Instance]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut splits = 0usize;
    let mut failures = 0usize;
    let mut worst = 0f64;
    while splits < 10_000 {
        let inst = &suite[rng.gen_range(0..suite.len())];
        let bank = inst.problem.bank();
        let (mut v, mut w) = (Vec::new(), Vec::new());
        for s in 0..inst.problem.len() {
            match rng.gen_range(0..3) {
                0 => v.push(s),
                1 => w.push(s),
                _ => {}
            }
        }
        let mut union = [v.clone(), w.clone()].concat();
        union.sort_unstable();
        let lhs = bank.numerator(&union).unwrap();
        let rhs = bank.numerator(&v).unwrap() + bank.rouge_prime_numerator(&v, &w).unwrap();
        if lhs != rhs {
            failures += 1;
        }
        let d = bank.rouge_n(&union).unwrap().as_f64()
            - bank.rouge_n(&v).unwrap().as_f64()
            - bank.rouge_prime(&v, &w).unwrap().as_f64();
        worst = worst.max(d.abs());
        splits += 1;
    }
    outcome(
        failures == 0 && worst <= 1e-12,
        format!("{splits} splits, {failures} exact failures, max float residual {worst:.1e}"),
    )
}

fn bound_admissibility(suite: &[Instance]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut states, mut violations) = (0usize, 0usize);
    while states < 1_000 {
        let inst = &suite[rng.gen_range(0..suite.len())];
        let p = &inst.problem;
        let mut ids: Vec<usize> = (0..p.len()).collect();
        ids.shuffle(&mut rng);
        let split = rng.gen_range(0..=ids.len());
        let mut chosen: Vec<usize> = ids[..split].iter().copied().filter(|_| rng.gen_bool(0.3)).collect();
        while p.set_length(&chosen) > inst.budget.words() {
            chosen.pop();
        }
        let descendants: Vec<usize> = ids[split..].iter().copied().take(12).collect();
        let bound = upper_bound(p, &chosen, &descendants, inst.budget).unwrap();
        let best = subsets(&descendants)
            .map(|omega| [chosen.clone(), omega].concat())
            .filter(|set| p.set_length(set) <= inst.budget.words())
            .map(|set| p.bank().numerator(&set).unwrap())
            .max()
            .unwrap();
        if !bound.admits(best) {
            violations += 1;
        }
        states += 1;
    }
    outcome(violations == 0, format!("{states} states, {violations} violations"))
}

fn greedy_guarantee(suite: &[Instance]) -> Outcome {
    let floor = 0.5 * (1.0 - (-1f64).exp());
    let (mut violations, mut ratios) = (0usize, Vec::new());
    for inst in suite {
        let r = enumerate_oracles(&inst.problem, inst.budget, &SearchOptions::default());
        let (g, t) = (r.greedy.score.numerator as f64, r.tau.numerator as f64);
        if g < floor * t {
            violations += 1;
        }
        if t > 0.0 {
            ratios.push(g / t);
        }
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(
        violations == 0,
        format!("{violations} below {floor:.4}*tau, mean ratio {mean:.4}, min ratio {min:.4}"),
    )
}

fn ilp_faithfulness(suite: &[Instance]) -> Outcome {
    let (mut optimum_mismatch, mut bad_oracles) = (0usize, 0usize);
    for inst in suite {
        let model = build_ilp(&inst.problem, inst.budget);
        let all: Vec<usize> = (0..inst.problem.len()).collect();
        let best = subsets(&all)
            .filter_map(|s| model.evaluate_assignment(&s).ok())
            .max()
            .unwrap();
        let opts = SearchOptions {
            skip_irrelevant: false,
            ..SearchOptions::default()
        };
        let found = enumerate_oracles(&inst.problem, inst.budget, &opts);
        if best != found.tau.numerator {
            optimum_mismatch += 1;
        }
        for o in &found.oracles {
            let a = model.complete(o).unwrap();
            if !model.is_feasible(&a) || model.objective(&a) != best {
                bad_oracles += 1;
            }
        }
    }
    outcome(
        optimum_mismatch == 0 && bad_oracles == 0,
        format!("{optimum_mismatch} optimum mismatches, {bad_oracles} infeasible or suboptimal oracle assignments"),
    )
}

fn counting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = 0usize;
    let instances = 200;
    for _ in 0..instances {
        let size = rng.gen_range(0..=18);
        let lengths: Vec<usize> = (0..size).map(|_| rng.gen_range(1..=12)).collect();
        let l_max = rng.gen_range(1..=40);
        let all: Vec<usize> = (0..size).collect();
        let brute = subsets(&all)
            .filter(|s| !s.is_empty() && s.iter().map(|&i| lengths[i]).sum::<usize>() <= l_max)
            .count();
        if count_feasible(&lengths, l_max) != BigUint::from(brute) {
            failures += 1;
        }
        let total: usize = lengths.iter().sum();
        let unconstrained = (BigUint::from(1u8) << size) - BigUint::from(1u8);
        if count_feasible(&lengths, total.max(1)) != unconstrained {
            failures += 1;
        }
    }
    let big = count_feasible(&[1; 130], 130);
    let expected = (BigUint::from(1u8) << 130usize) - BigUint::from(1u8);
    outcome(
        failures == 0 && big == expected,
        format!("{instances} brute-force instances, {failures} failures, 130 ones -> {big}"),
    )
}

fn worked_f_measure() -> Outcome {
    let family = OracleFamily::new(vec![vec![1, 2, 5, 6], vec![1, 2, 3]]).unwrap();
    let r = multi_oracle_prf(&[1, 2, 3, 4], &family).unwrap();
    let (o1, o2) = (&r.per_oracle[0], &r.per_oracle[1]);
    let eq = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    let passed = eq(o1.precision, 0.5)
        && eq(o1.recall, 0.5)
        && eq(o1.f_measure, 0.5)
        && eq(o2.precision, 0.75)
        && eq(o2.recall, 1.0)
        && (o2.f_measure - 0.857).abs() <= 1e-3
        && eq(r.precision, 0.625)
        && eq(r.recall, 0.75);
    outcome(
        passed,
        format!(
            "O1 ({}, {}, {}), O2 ({}, {}, {:.4}), P {} R {}",
            o1.precision, o1.recall, o1.f_measure, o2.precision, o2.recall, o2.f_measure, r.precision, r.recall
        ),
    )
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

struct PruningStats {
    worse: usize,
    /// Reduction factors on instances with at least 12 sentences.
    large: Vec<f64>,
    /// Reduction factors on instances with at least 12 branching candidates.
    branching: Vec<f64>,
}

fn pruning_stats(suite: &[Instance]) -> PruningStats {
    let mut stats = PruningStats {
        worse: 0,
        large: Vec::new(),
        branching: Vec::new(),
    };
    for inst in suite {
        let pruned = enumerate_oracles(&inst.problem, inst.budget, &SearchOptions::default());
        let full = enumerate_oracles(
            &inst.problem,
            inst.budget,
            &SearchOptions {
                prune: false,
                ..SearchOptions::default()
            },
        );
        if pruned.nodes_checked > full.nodes_checked {
            stats.worse += 1;
        }
        debug_assert_eq!(
            BigUint::from(full.nodes_checked),
            count_feasible_relevant(&inst.problem, inst.budget.words())
        );
        let reduction = full.nodes_checked as f64 / pruned.nodes_checked.max(1) as f64;
        if inst.problem.len() >= 12 {
            stats.large.push(reduction);
        }
        if pruned.candidates >= 12 {
            stats.branching.push(reduction);
        }
    }
    stats
}

fn pruning(suite: &[Instance]) -> Outcome {
    let stats = pruning_stats(suite);
    let (count, worse) = (stats.large.len(), stats.worse);
    let gate = median(stats.large);
    let branching = median(stats.branching);
    let independent = median(pruning_stats(&self::suite(References::Independent)).large);
    outcome(
        worse == 0 && gate >= 2.0,
        format!(
            "{worse} instances with more pruned nodes, median reduction {gate:.2} over {count} instances with |D| >= 12 \
             (informational: {branching:.2} with >= 12 branching candidates, {independent:.2} when references share \
             no phrasing with the documents)"
        ),
    )
}

fn run_cli(args: &[&str]) -> (Vec<u8>, bool) {
    let out = Command::new(env!("CARGO_BIN_EXE_oracle-summ"))
        .args(args)
        .env("ORACLE_SUMM_LOG", "off")
        .output()
        .expect("binary runs");
    (out.stdout, out.status.success())
}

fn determinism() -> Outcome {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let tasks = fixtures.join("tasks");
    let news = tasks.join("news.json");
    let oracles = fixtures.join("oracles.json");
    let scores = fixtures.join("scores.txt");
    let tmp = std::env::temp_dir().join(format!("oracle-summ-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    let s = |p: &PathBuf| p.display().to_string();
    let lp = [tmp.join("a.lp"), tmp.join("b.lp")];
    let runs: Vec<(&str, Vec<Vec<String>>)> = vec![
        ("oracle", vec![vec!["oracle".into(), s(&tasks)]; 2]),
        (
            "enumerate",
            vec![
                vec!["enumerate".into(), s(&tasks), "--jobs".into(), "1".into()],
                vec!["enumerate".into(), s(&tasks), "--jobs".into(), "4".into()],
            ],
        ),
        (
            "enumerate text",
            vec![vec!["enumerate".into(), s(&tasks), "--format".into(), "text".into()]; 2],
        ),
        ("greedy", vec![vec!["greedy".into(), s(&tasks)]; 2]),
        ("count", vec![vec!["count".into(), s(&tasks)]; 2]),
        (
            "evaluate",
            vec![
                vec![
                    "evaluate".into(),
                    s(&news),
                    "--system".into(),
                    "0,3".into(),
                    "--random-single".into(),
                    "50".into(),
                    "--seed".into(),
                    "7".into()
                ];
                2
            ],
        ),
        (
            "evaluate file",
            vec![
                vec![
                    "evaluate".into(),
                    "--system".into(),
                    "1,2,3,4".into(),
                    "--oracles".into(),
                    s(&oracles)
                ];
                2
            ],
        ),
        ("bench", vec![vec!["bench".into(), s(&tasks)]; 2]),
        ("correlate", vec![vec!["correlate".into(), s(&scores)]; 2]),
    ];
    let mut failed = Vec::new();
    for (name, pair) in &runs {
        let outs: Vec<(Vec<u8>, bool)> = pair
            .iter()
            .map(|a| run_cli(&a.iter().map(String::as_str).collect::<Vec<_>>()))
            .collect();
        if !outs.iter().all(|o| o.1) || outs[0].0 != outs[1].0 {
            failed.push(name.to_string());
        }
    }
    let lp_runs: Vec<(Vec<u8>, bool)> = lp
        .iter()
        .map(|p| run_cli(&["export-lp", &s(&news), "--out", &s(p)]))
        .collect();
    let files: Vec<Vec<u8>> = lp.iter().map(|p| std::fs::read(p).unwrap_or_default()).collect();
    if !lp_runs.iter().all(|o| o.1) || files[0].is_empty() || files[0] != files[1] {
        failed.push("export-lp".into());
    }
    let _ = std::fs::remove_dir_all(&tmp);
    outcome(
        failed.is_empty(),
        if failed.is_empty() {
            format!("{} commands byte-identical across repeated runs", runs.len() + 1)
        } else {
            format!("differing output: {}", failed.join(", "))
        },
    )
}

fn main() {
    let suite = suite(References::Overlapping);
    type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let criteria: Vec<(&str, Check)> = vec![
        ("oracle exactness", Box::new(|| oracle_exactness(&suite))),
        ("decomposition identity", Box::new(|| decomposition(&suite))),
        ("bound admissibility", Box::new(|| bound_admissibility(&suite))),
        ("greedy guarantee", Box::new(|| greedy_guarantee(&suite))),
        ("ILP faithfulness", Box::new(|| ilp_faithfulness(&suite))),
        ("counting DP", Box::new(counting)),
        ("worked F-measure example", Box::new(worked_f_measure)),
        ("pruning effectiveness", Box::new(|| pruning(&suite))),
        ("CLI determinism", Box::new(determinism)),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.passed {
            failures += 1;
        }
        println!(
            "criterion {} {} {name}: {}",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
