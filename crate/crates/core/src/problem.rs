//! A scored extraction task: reference bank plus per-sentence word lengths.

use alloc::vec::Vec;

use crate::rouge::{NGramMultiset, ReferenceBank, RougeError};
use crate::textprep::{DocumentSet, Preprocessor, ReferenceSummary};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProblemError {
    #[error(transparent)]
    Rouge(#[from] RougeError),
    #[error("{lengths} sentence lengths given for {sentences} sentences")]
    LengthMismatch { lengths: usize, sentences: usize },
    #[error("sentence {0} has zero length")]
    ZeroLength(usize),
}

/// Word budget `L_max`; always at least one word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Budget(usize);

impl Budget {
    pub fn new(words: usize) -> Option<Self> {
        (words >= 1).then_some(Budget(words))
    }

    pub fn words(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone)]
pub struct OracleProblem {
    bank: ReferenceBank,
    lengths: Vec<usize>,
}

impl OracleProblem {
    pub fn new(bank: ReferenceBank, lengths: Vec<usize>) -> Result<Self, ProblemError> {
        if lengths.len() != bank.num_sentences() {
            return Err(ProblemError::LengthMismatch {
                lengths: lengths.len(),
                sentences: bank.num_sentences(),
            });
        }
        if let Some(i) = lengths.iter().position(|&l| l == 0) {
            return Err(ProblemError::ZeroLength(i));
        }
        Ok(OracleProblem { bank, lengths })
    }

    /// Builds the bank from preprocessed text; lengths follow the
    /// preprocessor's length mode.
    pub fn from_text(
        pre: &Preprocessor,
        documents: &DocumentSet,
        references: &[ReferenceSummary],
    ) -> Result<Self, ProblemError> {
        let refs = references.iter().map(|r| pre.reference_ngrams(r)).collect();
        let sents: Vec<NGramMultiset> = documents.sentences().iter().map(|s| pre.sentence_ngrams(s)).collect();
        let bank = ReferenceBank::new(refs, &sents)?;
        Self::new(bank, documents.lengths(pre.config().length_mode))
    }

    pub fn bank(&self) -> &ReferenceBank {
        &self.bank
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn set_length(&self, set: &[usize]) -> usize {
        set.iter().map(|&i| self.lengths[i]).sum()
    }
}
