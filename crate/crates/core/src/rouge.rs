//! N-gram multisets and exact ROUGE-n arithmetic.
//!
//! Every score is kept as an integer numerator over the constant reference
//! denominator `sum_k |R_k|`. The search compares numerators directly, so
//! ties and improvements are decided without rounding.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::textprep::Token;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RougeError {
    #[error("reference summaries contain no n-grams")]
    EmptyReferences,
    #[error("sentence id {id} out of range for {len} sentences")]
    SentenceOutOfRange { id: usize, len: usize },
    #[error("sentence id {0} listed twice")]
    DuplicateSentence(usize),
    #[error("sentence id {0} is in both sets")]
    OverlappingSets(usize),
    #[error("reference index {index} out of range for {len} references")]
    ReferenceOutOfRange { index: usize, len: usize },
}

/// An ordered sequence of `n` tokens. Ordering is lexicographic over tokens.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NGram(Vec<Token>);

impl NGram {
    pub fn new(tokens: Vec<Token>) -> Self {
        NGram(tokens)
    }

    /// Convenience for tests and literals; words that are not valid tokens
    /// are skipped.
    pub fn from_words(words: &[&str]) -> Self {
        NGram(words.iter().filter_map(|w| Token::new(*w)).collect())
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for NGram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(t.as_str())?;
        }
        Ok(())
    }
}

/// Multiset of n-grams. Zero counts are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NGramMultiset {
    counts: BTreeMap<NGram, u32>,
}

impl NGramMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, gram: NGram, count: u32) {
        if count > 0 {
            *self.counts.entry(gram).or_insert(0) += count;
        }
    }

    /// Multiset sum.
    pub fn add_all(&mut self, other: &NGramMultiset) {
        for (g, &c) in &other.counts {
            self.insert(g.clone(), c);
        }
    }

    pub fn count(&self, gram: &NGram) -> u32 {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    /// Number of distinct grams, `|U(.)|`.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| u64::from(c)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Distinct grams in sorted order.
    pub fn keys(&self) -> impl Iterator<Item = &NGram> {
        self.counts.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NGram, u32)> {
        self.counts.iter().map(|(g, &c)| (g, c))
    }

    /// Per-gram `min` of the two counts.
    pub fn intersection(&self, other: &NGramMultiset) -> NGramMultiset {
        let mut out = NGramMultiset::new();
        for (g, c) in self.iter() {
            out.insert(g.clone(), c.min(other.count(g)));
        }
        out
    }
}

impl FromIterator<NGram> for NGramMultiset {
    fn from_iter<I: IntoIterator<Item = NGram>>(iter: I) -> Self {
        let mut m = NGramMultiset::new();
        for g in iter {
            m.insert(g, 1);
        }
        m
    }
}

/// Saturating per-gram difference `a \ b`.
pub fn multiset_minus(a: &NGramMultiset, b: &NGramMultiset) -> NGramMultiset {
    let mut out = NGramMultiset::new();
    for (g, c) in a.iter() {
        out.insert(g.clone(), c.saturating_sub(b.count(g)));
    }
    out
}

/// Clipped contribution of one gram split across disjoint sets `V` and `W`:
/// what `V` clips against the reference, plus what `W` clips against the
/// reference's residual after `V`.
pub fn clipped_overlap(reference: u32, in_v: u32, in_w: u32) -> u32 {
    reference.min(in_v) + reference.saturating_sub(in_v).min(in_w)
}

/// A ROUGE-n value as an exact fraction over the reference denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Score {
    pub numerator: u64,
    pub denominator: u64,
}

impl Score {
    pub fn new(numerator: u64, denominator: u64) -> Self {
        Score { numerator, denominator }
    }

    pub fn as_f64(&self) -> f64 {
        if self.denominator == 0 {
            0.0
        } else {
            self.numerator as f64 / self.denominator as f64
        }
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = u128::from(self.numerator) * u128::from(other.denominator);
        let rhs = u128::from(other.numerator) * u128::from(self.denominator);
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// References for one task, interned against the source sentences.
///
/// Grams are numbered over the union of the references' key sets, in sorted
/// order. Each source sentence keeps only the grams that appear in at least
/// one reference; all other grams can never be clipped and are dropped.
#[derive(Debug, Clone)]
pub struct ReferenceBank {
    references: Vec<NGramMultiset>,
    grams: Vec<NGram>,
    /// Per gram id: `(reference index, N(g, R_k))` for every reference holding it.
    demand: Vec<Vec<(usize, u32)>>,
    /// Per sentence: `(gram id, N(g, s_i))`, sorted by gram id.
    sentence_counts: Vec<Vec<(usize, u32)>>,
    denominator: u64,
}

impl ReferenceBank {
    pub fn new(references: Vec<NGramMultiset>, sentences: &[NGramMultiset]) -> Result<Self, RougeError> {
        let denominator: u64 = references.iter().map(NGramMultiset::total).sum();
        if denominator == 0 {
            return Err(RougeError::EmptyReferences);
        }
        let mut index: BTreeMap<&NGram, usize> = BTreeMap::new();
        for r in &references {
            for g in r.keys() {
                index.entry(g).or_insert(0);
            }
        }
        for (i, id) in index.values_mut().enumerate() {
            *id = i;
        }
        let grams: Vec<NGram> = index.keys().map(|g| (*g).clone()).collect();
        let mut demand = vec![Vec::new(); grams.len()];
        for (k, r) in references.iter().enumerate() {
            for (g, c) in r.iter() {
                demand[index[g]].push((k, c));
            }
        }
        let sentence_counts = sentences
            .iter()
            .map(|s| s.iter().filter_map(|(g, c)| index.get(g).map(|&id| (id, c))).collect())
            .collect();
        Ok(ReferenceBank {
            references,
            grams,
            demand,
            sentence_counts,
            denominator,
        })
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn references(&self) -> &[NGramMultiset] {
        &self.references
    }

    pub fn num_sentences(&self) -> usize {
        self.sentence_counts.len()
    }

    /// Distinct grams across all references.
    pub fn grams(&self) -> &[NGram] {
        &self.grams
    }

    pub fn gram_id(&self, gram: &NGram) -> Option<usize> {
        self.grams.binary_search(gram).ok()
    }

    /// `(reference index, count)` pairs for one gram id.
    pub fn demand(&self, gram: usize) -> &[(usize, u32)] {
        &self.demand[gram]
    }

    /// Clip-relevant `(gram id, count)` pairs of one sentence.
    pub fn sentence_counts(&self, sentence: usize) -> &[(usize, u32)] {
        &self.sentence_counts[sentence]
    }

    /// Whether the sentence shares at least one gram with some reference.
    pub fn is_relevant(&self, sentence: usize) -> bool {
        !self.sentence_counts[sentence].is_empty()
    }

    pub fn score(&self, numerator: u64) -> Score {
        Score::new(numerator, self.denominator)
    }

    pub(crate) fn check_set(&self, set: &[usize]) -> Result<(), RougeError> {
        let len = self.num_sentences();
        let mut seen = vec![false; len];
        for &id in set {
            if id >= len {
                return Err(RougeError::SentenceOutOfRange { id, len });
            }
            if seen[id] {
                return Err(RougeError::DuplicateSentence(id));
            }
            seen[id] = true;
        }
        Ok(())
    }

    /// `N(g, S)` for every gram id, summed over the sentences of `set`.
    pub fn system_counts(&self, set: &[usize]) -> Result<Vec<u32>, RougeError> {
        self.check_set(set)?;
        let mut counts = vec![0u32; self.grams.len()];
        for &s in set {
            for &(g, c) in &self.sentence_counts[s] {
                counts[g] += c;
            }
        }
        Ok(counts)
    }

    /// Clipped-count numerator of ROUGE-n for `set`, computed from scratch.
    pub fn numerator(&self, set: &[usize]) -> Result<u64, RougeError> {
        let counts = self.system_counts(set)?;
        Ok(self.clip_total(&counts))
    }

    fn clip_total(&self, counts: &[u32]) -> u64 {
        counts
            .iter()
            .zip(&self.demand)
            .map(|(&c, refs)| refs.iter().map(|&(_, r)| u64::from(r.min(c))).sum::<u64>())
            .sum()
    }

    pub fn rouge_n(&self, set: &[usize]) -> Result<Score, RougeError> {
        Ok(self.score(self.numerator(set)?))
    }

    fn check_disjoint(&self, v: &[usize], w: &[usize]) -> Result<(), RougeError> {
        self.check_set(v)?;
        self.check_set(w)?;
        if let Some(&id) = w.iter().find(|id| v.contains(id)) {
            return Err(RougeError::OverlappingSets(id));
        }
        Ok(())
    }

    /// Numerator of the marginal score of `w` once `v` is already chosen:
    /// `W` is clipped against each reference minus the grams of `V`.
    pub fn rouge_prime_numerator(&self, v: &[usize], w: &[usize]) -> Result<u64, RougeError> {
        self.check_disjoint(v, w)?;
        let in_v = self.system_counts(v)?;
        let in_w = self.system_counts(w)?;
        let mut total = 0u64;
        for (k, reference) in self.references.iter().enumerate() {
            for (g, r) in reference.iter() {
                let id = self.grams.binary_search(g).expect("reference gram is interned");
                debug_assert!(self.demand[id].iter().any(|&(kk, _)| kk == k));
                let residual = r.saturating_sub(in_v[id]);
                total += u64::from(residual.min(in_w[id]));
            }
        }
        Ok(total)
    }

    pub fn rouge_prime(&self, v: &[usize], w: &[usize]) -> Result<Score, RougeError> {
        Ok(self.score(self.rouge_prime_numerator(v, w)?))
    }

    /// Per-gram clipped overlap of disjoint `V` and `W` against reference `k`.
    pub fn clipped_overlap(&self, gram: &NGram, reference: usize, v: &[usize], w: &[usize]) -> Result<u32, RougeError> {
        self.check_disjoint(v, w)?;
        let r = self
            .references
            .get(reference)
            .ok_or(RougeError::ReferenceOutOfRange {
                index: reference,
                len: self.references.len(),
            })?
            .count(gram);
        let (in_v, in_w) = match self.gram_id(gram) {
            Some(id) => (self.system_counts(v)?[id], self.system_counts(w)?[id]),
            None => (0, 0),
        };
        Ok(clipped_overlap(r, in_v, in_w))
    }
}

/// Running system-side counts for a growing and shrinking sentence set.
///
/// Adding or removing a sentence costs one pass over its clip-relevant grams.
#[derive(Debug, Clone)]
pub struct Coverage<'a> {
    bank: &'a ReferenceBank,
    counts: Vec<u32>,
    numerator: u64,
}

impl<'a> Coverage<'a> {
    pub fn new(bank: &'a ReferenceBank) -> Self {
        Coverage {
            bank,
            counts: vec![0; bank.grams.len()],
            numerator: 0,
        }
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    /// Numerator increase from adding `sentence` to the current set.
    pub fn gain(&self, sentence: usize) -> u64 {
        self.bank.sentence_counts[sentence]
            .iter()
            .map(|&(g, x)| {
                let have = self.counts[g];
                self.bank.demand[g]
                    .iter()
                    .map(|&(_, r)| u64::from(r.min(have + x) - r.min(have)))
                    .sum::<u64>()
            })
            .sum()
    }

    pub fn add(&mut self, sentence: usize) -> u64 {
        let gain = self.gain(sentence);
        for &(g, x) in &self.bank.sentence_counts[sentence] {
            self.counts[g] += x;
        }
        self.numerator += gain;
        gain
    }

    pub fn remove(&mut self, sentence: usize) {
        for &(g, x) in &self.bank.sentence_counts[sentence] {
            let have = self.counts[g];
            let loss: u64 = self.bank.demand[g]
                .iter()
                .map(|&(_, r)| u64::from(r.min(have) - r.min(have - x)))
                .sum();
            self.counts[g] = have - x;
            self.numerator -= loss;
        }
    }
}
