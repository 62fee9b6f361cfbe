//! Oracle search: greedy warm start, knapsack upper bound, branch-and-bound
//! enumeration of every optimal summary, and a brute-force reference search.
//!
//! Sentences are branched in descending order of their singleton score
//! (ties by ascending id). A node is the set of sentences on the path from
//! the root; its descendants are the sentences after the last one in that
//! order. At each feasible node:
//!
//! 1. score >= tau: raise tau to the score, record the node, descend;
//! 2. score < tau and bound < tau: prune the subtree;
//! 3. score < tau and bound >= tau: descend without recording.
//!
//! Recorded nodes that do not reach the final tau are dropped at the end.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::problem::{Budget, OracleProblem};
use crate::rouge::{Coverage, RougeError, Score};

/// Largest source size the brute-force search accepts by default.
pub const EXHAUSTIVE_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error(transparent)]
    Rouge(#[from] RougeError),
    #[error("exhaustive search refuses {sentences} sentences (cap {cap})")]
    TooLarge { sentences: usize, cap: usize },
    #[error("chosen sentences use {used} words, over the budget of {budget}")]
    OverBudget { used: usize, budget: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Apply the bound test; when off every feasible node is expanded.
    pub prune: bool,
    /// Leave sentences without any reference gram out of the branching set.
    pub skip_irrelevant: bool,
    /// Keep only oracles with no proper subset that is also an oracle.
    pub minimal_only: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            prune: true,
            skip_irrelevant: true,
            minimal_only: false,
        }
    }
}

/// A sentence set (ascending ids) with its score.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summary {
    pub sentences: Vec<usize>,
    pub score: Score,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub tau: Score,
    /// Every optimal set, ascending ids, sorted lexicographically.
    pub oracles: Vec<Vec<usize>>,
    /// Feasible nodes evaluated.
    pub nodes_checked: u64,
    pub greedy: Summary,
    /// Size of the branching set.
    pub candidates: usize,
}

/// Greedy warm start: repeatedly take the sentence with the best gain per
/// word, keeping it only if it still fits, then return the better of that
/// set and the best fitting single sentence.
pub fn greedy_initial(problem: &OracleProblem, budget: Budget) -> Summary {
    let bank = problem.bank();
    let lengths = problem.lengths();
    let l_max = budget.words();
    let mut coverage = Coverage::new(bank);
    let mut remaining: Vec<usize> = (0..problem.len()).collect();
    let mut chosen = Vec::new();
    let mut used = 0usize;

    while !remaining.is_empty() {
        let mut best = 0usize;
        let mut best_gain = coverage.gain(remaining[0]);
        for (slot, &s) in remaining.iter().enumerate().skip(1) {
            let gain = coverage.gain(s);
            let lhs = u128::from(gain) * lengths[remaining[best]] as u128;
            let rhs = u128::from(best_gain) * lengths[s] as u128;
            if lhs > rhs {
                best = slot;
                best_gain = gain;
            }
        }
        let s = remaining.remove(best);
        if used + lengths[s] <= l_max {
            used += lengths[s];
            coverage.add(s);
            chosen.push(s);
        }
    }
    chosen.sort_unstable();
    let greedy_numerator = coverage.numerator();

    let single = (0..problem.len())
        .filter(|&i| lengths[i] <= l_max)
        .map(|i| (Coverage::new(bank).gain(i), i))
        .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));

    match single {
        Some((numerator, i)) if numerator > greedy_numerator => Summary {
            sentences: vec![i],
            score: bank.score(numerator),
        },
        _ => Summary {
            sentences: chosen,
            score: bank.score(greedy_numerator),
        },
    }
}

/// Fractional-knapsack bound, held exactly in numerator units as
/// `whole + fraction_num / fraction_den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnapsackBound {
    whole: u64,
    fraction_num: u128,
    fraction_den: u128,
    denominator: u64,
}

impl KnapsackBound {
    /// Whether the bound is at least `numerator`.
    pub fn admits(&self, numerator: u64) -> bool {
        u128::from(self.whole) * self.fraction_den + self.fraction_num >= u128::from(numerator) * self.fraction_den
    }

    pub fn numerator_f64(&self) -> f64 {
        self.whole as f64 + self.fraction_num as f64 / self.fraction_den as f64
    }

    pub fn as_f64(&self) -> f64 {
        self.numerator_f64() / self.denominator as f64
    }
}

/// LP relaxation of the 0-1 knapsack over `(value, weight)` items, solved by
/// filling in order of value density and splitting the first item that does
/// not fit.
fn fractional_knapsack(
    base: u64,
    mut items: Vec<(u64, usize)>,
    mut capacity: usize,
    denominator: u64,
) -> KnapsackBound {
    items.retain(|&(value, _)| value > 0);
    items.sort_by(|a, b| {
        let lhs = u128::from(a.0) * b.1 as u128;
        let rhs = u128::from(b.0) * a.1 as u128;
        rhs.cmp(&lhs)
    });
    let mut bound = KnapsackBound {
        whole: base,
        fraction_num: 0,
        fraction_den: 1,
        denominator,
    };
    for (value, weight) in items {
        if weight <= capacity {
            bound.whole += value;
            capacity -= weight;
        } else {
            bound.fraction_num = u128::from(value) * capacity as u128;
            bound.fraction_den = weight as u128;
            break;
        }
    }
    bound
}

/// Upper bound on the score of any feasible `chosen ∪ Ω` with
/// `Ω ⊆ descendants`, given `budget - ℓ(chosen)` words of room.
pub fn upper_bound(
    problem: &OracleProblem,
    chosen: &[usize],
    descendants: &[usize],
    budget: Budget,
) -> Result<KnapsackBound, SearchError> {
    let bank = problem.bank();
    bank.check_set(chosen)?;
    bank.check_set(descendants)?;
    if let Some(&id) = descendants.iter().find(|id| chosen.contains(id)) {
        return Err(RougeError::OverlappingSets(id).into());
    }
    let used = problem.set_length(chosen);
    if used > budget.words() {
        return Err(SearchError::OverBudget {
            used,
            budget: budget.words(),
        });
    }
    let mut coverage = Coverage::new(bank);
    for &s in chosen {
        coverage.add(s);
    }
    let items = descendants
        .iter()
        .map(|&w| (coverage.gain(w), problem.lengths()[w]))
        .collect();
    Ok(fractional_knapsack(
        coverage.numerator(),
        items,
        budget.words() - used,
        bank.denominator(),
    ))
}

/// Branching set for a budget: sentences that fit on their own (and, if
/// requested, share a gram with some reference), in descending singleton
/// score with ties by ascending id.
pub fn candidate_order(problem: &OracleProblem, budget: Budget, options: &SearchOptions) -> Vec<usize> {
    let bank = problem.bank();
    let empty = Coverage::new(bank);
    let mut scored: Vec<(u64, usize)> = (0..problem.len())
        .filter(|&i| problem.lengths()[i] <= budget.words())
        .filter(|&i| !options.skip_irrelevant || bank.is_relevant(i))
        .map(|i| (empty.gain(i), i))
        .collect();
    scored.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    scored.into_iter().map(|(_, i)| i).collect()
}

/// Path through the search tree.
#[derive(Debug, Clone)]
pub struct SearchState<'a> {
    problem: &'a OracleProblem,
    order: Vec<usize>,
    /// Positions in `order`, strictly increasing.
    path: Vec<usize>,
    used_length: usize,
    coverage: Coverage<'a>,
}

impl<'a> SearchState<'a> {
    pub fn new(problem: &'a OracleProblem, order: Vec<usize>) -> Self {
        SearchState {
            problem,
            order,
            path: Vec::new(),
            used_length: 0,
            coverage: Coverage::new(problem.bank()),
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Sentence ids on the path, in branching order.
    pub fn chosen(&self) -> Vec<usize> {
        self.path.iter().map(|&p| self.order[p]).collect()
    }

    pub fn used_length(&self) -> usize {
        self.used_length
    }

    pub fn numerator(&self) -> u64 {
        self.coverage.numerator()
    }

    /// Position after the last chosen sentence; descendants start here.
    pub fn frontier(&self) -> usize {
        self.path.last().map_or(0, |&p| p + 1)
    }

    pub fn descendants(&self) -> &[usize] {
        &self.order[self.frontier()..]
    }

    /// Extends the path with the sentence at `position`, which must lie at
    /// or after the frontier.
    pub fn push(&mut self, position: usize) {
        debug_assert!(position >= self.frontier());
        let s = self.order[position];
        self.path.push(position);
        self.used_length += self.problem.lengths()[s];
        self.coverage.add(s);
        debug_assert_eq!(
            Ok(self.coverage.numerator()),
            self.problem.bank().numerator(&self.chosen())
        );
    }

    pub fn pop(&mut self) {
        if let Some(position) = self.path.pop() {
            let s = self.order[position];
            self.used_length -= self.problem.lengths()[s];
            self.coverage.remove(s);
        }
    }

    pub fn upper_bound(&self, budget: Budget) -> KnapsackBound {
        let lengths = self.problem.lengths();
        let items = self
            .descendants()
            .iter()
            .map(|&w| (self.coverage.gain(w), lengths[w]))
            .collect();
        fractional_knapsack(
            self.coverage.numerator(),
            items,
            budget.words().saturating_sub(self.used_length),
            self.problem.bank().denominator(),
        )
    }
}

enum Record {
    All(Vec<(u64, Vec<usize>)>),
    Incumbent(Option<Vec<usize>>),
}

struct BranchAndBound<'a> {
    state: SearchState<'a>,
    budget: Budget,
    prune: bool,
    tau: u64,
    record: Record,
    nodes: u64,
}

impl BranchAndBound<'_> {
    fn descend(&mut self) {
        let lengths = self.state.problem.lengths();
        for position in self.state.frontier()..self.state.order.len() {
            let s = self.state.order[position];
            if self.state.used_length + lengths[s] > self.budget.words() {
                continue;
            }
            self.state.push(position);
            self.nodes += 1;
            let score = self.state.numerator();
            if score >= self.tau {
                let improved = score > self.tau;
                self.tau = score;
                match &mut self.record {
                    Record::All(found) => found.push((score, self.state.chosen())),
                    Record::Incumbent(best) => {
                        if improved || best.is_none() {
                            *best = Some(self.state.chosen());
                        }
                    }
                }
                self.descend();
            } else if !self.prune || self.state.upper_bound(self.budget).admits(self.tau) {
                self.descend();
            }
            self.state.pop();
        }
    }
}

fn run<'a>(
    problem: &'a OracleProblem,
    budget: Budget,
    options: &SearchOptions,
    record: Record,
) -> (BranchAndBound<'a>, Summary) {
    let greedy = greedy_initial(problem, budget);
    let order = candidate_order(problem, budget, options);
    let mut search = BranchAndBound {
        state: SearchState::new(problem, order),
        budget,
        prune: options.prune,
        tau: greedy.score.numerator,
        record,
        nodes: 0,
    };
    search.descend();
    (search, greedy)
}

fn normalize(mut family: Vec<Vec<usize>>, minimal_only: bool) -> Vec<Vec<usize>> {
    for set in &mut family {
        set.sort_unstable();
    }
    family.sort();
    family.dedup();
    if minimal_only {
        let keep: Vec<bool> = family
            .iter()
            .map(|set| {
                !family
                    .iter()
                    .any(|other| other.len() < set.len() && other.iter().all(|x| set.binary_search(x).is_ok()))
            })
            .collect();
        family = family
            .into_iter()
            .zip(keep)
            .filter_map(|(set, k)| k.then_some(set))
            .collect();
    }
    family
}

/// Enumerates every optimal summary under the budget.
pub fn enumerate_oracles(problem: &OracleProblem, budget: Budget, options: &SearchOptions) -> OracleResult {
    let (search, greedy) = run(problem, budget, options, Record::All(Vec::new()));
    let tau = search.tau;
    let found = match search.record {
        Record::All(found) => found,
        Record::Incumbent(_) => unreachable!(),
    };
    let oracles = found
        .into_iter()
        .filter(|(score, _)| *score == tau)
        .map(|(_, set)| set)
        .collect();
    OracleResult {
        tau: problem.bank().score(tau),
        oracles: normalize(oracles, options.minimal_only),
        nodes_checked: search.nodes,
        greedy,
        candidates: search.state.order.len(),
    }
}

/// Same search, keeping only the first set that reaches the final tau.
pub fn extract_one_oracle(problem: &OracleProblem, budget: Budget, options: &SearchOptions) -> Summary {
    let (search, greedy) = run(problem, budget, options, Record::Incumbent(None));
    let mut sentences = match search.record {
        Record::Incumbent(best) => best.unwrap_or_default(),
        Record::All(_) => unreachable!(),
    };
    sentences.sort_unstable();
    debug_assert!(search.tau >= greedy.score.numerator);
    Summary {
        sentences,
        score: problem.bank().score(search.tau),
    }
}

/// Scores every subset of the branching set from scratch. Intended as a
/// reference for small inputs.
pub fn exhaustive_oracles(
    problem: &OracleProblem,
    budget: Budget,
    options: &SearchOptions,
    cap: usize,
) -> Result<OracleResult, SearchError> {
    if problem.len() > cap {
        return Err(SearchError::TooLarge {
            sentences: problem.len(),
            cap,
        });
    }
    let bank = problem.bank();
    let mut pool: Vec<usize> = candidate_order(problem, budget, options);
    pool.sort_unstable();
    let mut best = 0u64;
    let mut family: Vec<Vec<usize>> = Vec::new();
    let mut nodes = 0u64;
    for mask in 1u64..(1u64 << pool.len()) {
        let set: Vec<usize> = pool
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask >> bit & 1 == 1)
            .map(|(_, &s)| s)
            .collect();
        if problem.set_length(&set) > budget.words() {
            continue;
        }
        nodes += 1;
        let numerator = bank.numerator(&set)?;
        match numerator.cmp(&best) {
            Ordering::Greater => {
                best = numerator;
                family.clear();
                family.push(set);
            }
            Ordering::Equal => family.push(set),
            Ordering::Less => {}
        }
    }
    Ok(OracleResult {
        tau: bank.score(best),
        oracles: normalize(family, options.minimal_only),
        nodes_checked: nodes,
        greedy: greedy_initial(problem, budget),
        candidates: pool.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rouge::{NGram, NGramMultiset, ReferenceBank};

    fn ms(words: &[&str]) -> NGramMultiset {
        words.iter().map(|w| NGram::from_words(&[w])).collect()
    }

    /// Reference {a:2, b:1, c:1}; s1=[a,b], s2=[c,a], s3=[b,b], all length 2.
    fn example(extra: &[&[&str]]) -> OracleProblem {
        let mut sents = vec![ms(&["a", "b"]), ms(&["c", "a"]), ms(&["b", "b"])];
        sents.extend(extra.iter().map(|s| ms(s)));
        let lengths = vec![2; sents.len()];
        let bank = ReferenceBank::new(vec![ms(&["a", "a", "b", "c"])], &sents).unwrap();
        OracleProblem::new(bank, lengths).unwrap()
    }

    fn budget(words: usize) -> Budget {
        Budget::new(words).unwrap()
    }

    #[test]
    fn greedy_examples() {
        let p = example(&[]);
        let g = greedy_initial(&p, budget(4));
        assert_eq!(g.sentences, [0, 1]);
        assert_eq!(g.score.as_f64(), 1.0);
        let g = greedy_initial(&p, budget(2));
        assert_eq!(g.sentences, [0]);
        assert_eq!(g.score.as_f64(), 0.5);
        let g = greedy_initial(&p, budget(1));
        assert!(g.sentences.is_empty());
        assert_eq!(g.score.numerator, 0);
    }

    #[test]
    fn greedy_prefers_single_sentence_when_better() {
        // one long sentence covering everything beats two cheap dense ones
        let sents = vec![ms(&["a"]), ms(&["b", "c", "d", "e", "f", "g", "h", "i"])];
        let bank = ReferenceBank::new(vec![ms(&["a", "b", "c", "d", "e", "f", "g", "h", "i"])], &sents).unwrap();
        let p = OracleProblem::new(bank, vec![1, 9]).unwrap();
        let g = greedy_initial(&p, budget(9));
        assert_eq!(g.sentences, [1]);
        assert_eq!(g.score.numerator, 8);
    }

    #[test]
    fn bound_examples() {
        let p = example(&[]);
        let b = upper_bound(&p, &[0], &[1, 2], budget(4)).unwrap();
        assert_eq!(b.as_f64(), 1.0);
        let b = upper_bound(&p, &[0, 1], &[2], budget(4)).unwrap();
        assert_eq!(b.as_f64(), 1.0);
        let b = upper_bound(&p, &[], &[0], budget(1)).unwrap();
        assert_eq!(b.as_f64(), 0.25);
        assert!(b.admits(1) && !b.admits(2));
        assert_eq!(
            upper_bound(&p, &[0, 1, 2], &[], budget(4)).unwrap_err(),
            SearchError::OverBudget { used: 6, budget: 4 }
        );
    }

    #[test]
    fn enumerate_examples() {
        let p = example(&[]);
        let r = enumerate_oracles(&p, budget(4), &SearchOptions::default());
        assert_eq!(r.tau.as_f64(), 1.0);
        assert_eq!(r.oracles, vec![vec![0, 1]]);

        let dup = example(&[&["c", "a"]]);
        let r = enumerate_oracles(&dup, budget(4), &SearchOptions::default());
        assert_eq!(r.tau.as_f64(), 1.0);
        assert_eq!(r.oracles, vec![vec![0, 1], vec![0, 3]]);

        let sents = vec![ms(&["a", "x"])];
        let bank = ReferenceBank::new(vec![ms(&["a", "b"])], &sents).unwrap();
        let single = OracleProblem::new(bank, vec![2]).unwrap();
        let r = enumerate_oracles(&single, budget(5), &SearchOptions::default());
        assert_eq!(r.oracles, vec![vec![0]]);
        assert_eq!(r.tau, Score::new(1, 2));
    }

    #[test]
    fn one_oracle_examples() {
        let p = example(&[]);
        let s = extract_one_oracle(&p, budget(4), &SearchOptions::default());
        assert_eq!((s.sentences, s.score.as_f64()), (vec![0, 1], 1.0));
        let s = extract_one_oracle(&p, budget(2), &SearchOptions::default());
        assert_eq!((s.sentences, s.score.as_f64()), (vec![0], 0.5));

        let bank = ReferenceBank::new(vec![ms(&["a"])], &[]).unwrap();
        let empty = OracleProblem::new(bank, vec![]).unwrap();
        let s = extract_one_oracle(&empty, budget(3), &SearchOptions::default());
        assert!(s.sentences.is_empty());
        assert_eq!(s.score.numerator, 0);
    }

    #[test]
    fn exhaustive_examples() {
        let p = example(&[]);
        let r = exhaustive_oracles(&p, budget(4), &SearchOptions::default(), EXHAUSTIVE_CAP).unwrap();
        assert_eq!(r.oracles, vec![vec![0, 1]]);
        assert_eq!(r.tau.as_f64(), 1.0);
        let r = exhaustive_oracles(&p, budget(100), &SearchOptions::default(), EXHAUSTIVE_CAP).unwrap();
        assert_eq!(r.oracles, vec![vec![0, 1], vec![0, 1, 2]]);
        let r = exhaustive_oracles(
            &p,
            budget(100),
            &SearchOptions {
                minimal_only: true,
                ..SearchOptions::default()
            },
            EXHAUSTIVE_CAP,
        )
        .unwrap();
        assert_eq!(r.oracles, vec![vec![0, 1]]);
        assert_eq!(
            exhaustive_oracles(&p, budget(4), &SearchOptions::default(), 2).unwrap_err(),
            SearchError::TooLarge { sentences: 3, cap: 2 }
        );
    }

    #[test]
    fn irrelevant_sentences_follow_option() {
        let p = example(&[&["zzz"]]);
        let keep = SearchOptions {
            skip_irrelevant: false,
            ..SearchOptions::default()
        };
        let r = enumerate_oracles(&p, budget(6), &keep);
        assert!(r.oracles.contains(&vec![0, 1, 3]));
        let r = enumerate_oracles(&p, budget(6), &SearchOptions::default());
        assert!(r.oracles.iter().all(|o| !o.contains(&3)));
        assert_eq!(candidate_order(&p, budget(6), &SearchOptions::default()), [0, 1, 2]);
    }

    #[test]
    fn state_push_pop() {
        let p = example(&[]);
        let mut st = SearchState::new(&p, candidate_order(&p, budget(4), &SearchOptions::default()));
        assert_eq!(st.order(), &[0, 1, 2]);
        st.push(0);
        st.push(2);
        assert_eq!(st.chosen(), [0, 2]);
        assert_eq!(st.used_length(), 4);
        assert_eq!(st.numerator(), 2);
        assert!(st.descendants().is_empty());
        st.pop();
        assert_eq!(st.descendants(), &[1, 2]);
        assert_eq!(st.upper_bound(budget(4)).as_f64(), 1.0);
    }
}
