//! Exact extractive oracle summaries under ROUGE-n.
//!
//! Given source sentences, one or more reference summaries and a word
//! budget, this crate finds the sentence subsets with the highest ROUGE-n
//! score. It enumerates *all* of them with a branch-and-bound search seeded
//! by a greedy solution and pruned with a fractional-knapsack bound. It also
//! builds the equivalent integer program, counts feasible summaries, and
//! scores system summaries against a family of oracles.
//!
//! The crate is `no_std` (it needs `alloc`). File formats and the command
//! line live in the `oracle-summ` crate.
//!
//! ```
//! use oracle_summ_core::{
//!     enumerate_oracles, Budget, OracleProblem, PreprocessConfig, Preprocessor, SearchOptions,
//! };
//!
//! let pre = Preprocessor::new(PreprocessConfig::for_order(1)).unwrap();
//! let docs = pre.documents(["the cat sat", "one dog barked", "the cat barked"]).unwrap();
//! let refs = [pre.reference(0, ["a cat barked"]).unwrap()];
//! let problem = OracleProblem::from_text(&pre, &docs, &refs).unwrap();
//!
//! let result = enumerate_oracles(&problem, Budget::new(3).unwrap(), &SearchOptions::default());
//! assert_eq!(result.oracles, vec![vec![2]]);
//! assert!((result.tau.as_f64() - 2.0 / 3.0).abs() < 1e-12);
//! ```

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod count;
pub mod eval;
pub mod ilp;
pub mod problem;
pub mod rouge;
pub mod search;
pub mod textprep;

pub use count::{count_feasible, count_feasible_relevant, CountTable};
pub use eval::{
    jaccard, multi_oracle_prf, pearson, random_single_oracle, spearman, EvalError, EvalReport, OracleFamily, Prf,
    RandomOracleReport,
};
pub use ilp::{build_ilp, objective_to_rouge, Assignment, IlpError, IlpModel};
pub use problem::{Budget, OracleProblem, ProblemError};
pub use rouge::{clipped_overlap, multiset_minus, NGram, NGramMultiset, ReferenceBank, RougeError, Score};
pub use search::{
    enumerate_oracles, exhaustive_oracles, extract_one_oracle, greedy_initial, upper_bound, KnapsackBound,
    OracleResult, SearchError, SearchOptions, SearchState, Summary, EXHAUSTIVE_CAP,
};
pub use textprep::{
    extract_ngrams, porter_stem, tokenize, DocumentSet, LengthMode, PreprocessConfig, Preprocessor, ReferenceScope,
    ReferenceSummary, Sentence, TextError, Token,
};

pub use num_bigint::BigUint;
