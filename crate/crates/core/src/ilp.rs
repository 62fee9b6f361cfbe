//! 0-1 integer program whose optimum is the oracle ROUGE-n numerator, and
//! its CPLEX LP text form.
//!
//! ```text
//! maximize    sum_{k,j} z_kj
//! subject to  sum_i l(s_i) x_i          <= L_max
//!             sum_i N(g_j, s_i) x_i     >= z_kj      for every (k, j)
//!             N(g_j, R_k)               >= z_kj      for every (k, j)
//!             x_i in {0, 1},  z_kj in Z+
//! ```
//!
//! `j` indexes the distinct grams of reference `k` in lexicographic order.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::problem::{Budget, OracleProblem};
use crate::rouge::{NGram, RougeError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IlpError {
    #[error(transparent)]
    Rouge(#[from] RougeError),
    #[error("assignment uses {used} words, over the budget of {budget}")]
    LengthViolated { used: u64, budget: u64 },
    #[error("row {0} is violated")]
    RowViolated(String),
    #[error("assignment has {got} {kind} values, model has {expected}")]
    ShapeMismatch {
        kind: &'static str,
        got: usize,
        expected: usize,
    },
}

/// Integer count variable `z_kj` with its demand and supply rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountVar {
    pub reference: usize,
    pub index: usize,
    pub gram: NGram,
    /// `N(g_j, R_k)`.
    pub demand: u64,
    /// Nonzero `(sentence, N(g_j, s_i))` coefficients.
    pub supply: Vec<(usize, u64)>,
}

impl CountVar {
    pub fn name(&self) -> String {
        alloc::format!("z_{}_{}", self.reference, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpModel {
    /// `l(s_i)` for each binary `x_i`.
    pub lengths: Vec<u64>,
    pub budget: u64,
    /// Ordered by `(reference, index)`.
    pub counts: Vec<CountVar>,
}

/// Values for all variables of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub x: Vec<bool>,
    pub z: Vec<u64>,
}

pub fn build_ilp(problem: &OracleProblem, budget: Budget) -> IlpModel {
    let bank = problem.bank();
    // per gram id, the sentences that contain it
    let mut holders: Vec<Vec<(usize, u64)>> = alloc::vec![Vec::new(); bank.grams().len()];
    for i in 0..problem.len() {
        for &(g, c) in bank.sentence_counts(i) {
            holders[g].push((i, u64::from(c)));
        }
    }
    let mut counts = Vec::new();
    for (k, reference) in bank.references().iter().enumerate() {
        // BTreeMap iteration is already in lexicographic gram order
        for (j, (gram, demand)) in reference.iter().enumerate() {
            let id = bank.gram_id(gram).expect("reference gram is interned");
            counts.push(CountVar {
                reference: k,
                index: j,
                gram: gram.clone(),
                demand: u64::from(demand),
                supply: holders[id].clone(),
            });
        }
    }
    IlpModel {
        lengths: problem.lengths().iter().map(|&l| l as u64).collect(),
        budget: budget.words() as u64,
        counts,
    }
}

/// Converts an objective value back to a ROUGE-n score.
pub fn objective_to_rouge(denominator: u64, objective: u64) -> f64 {
    objective as f64 / denominator as f64
}

impl IlpModel {
    pub fn num_binaries(&self) -> usize {
        self.lengths.len()
    }

    pub fn num_integers(&self) -> usize {
        self.counts.len()
    }

    /// Length row plus one supply and one demand row per count variable.
    pub fn num_constraints(&self) -> usize {
        usize::from(!self.lengths.is_empty()) + 2 * self.counts.len()
    }

    /// Best `z` for a fixed sentence choice: each count takes the smaller
    /// of its demand and supply.
    pub fn complete(&self, chosen: &[usize]) -> Result<Assignment, IlpError> {
        let n = self.lengths.len();
        let mut x = alloc::vec![false; n];
        for &i in chosen {
            if i >= n {
                return Err(RougeError::SentenceOutOfRange { id: i, len: n }.into());
            }
            if x[i] {
                return Err(RougeError::DuplicateSentence(i).into());
            }
            x[i] = true;
        }
        let used: u64 = chosen.iter().map(|&i| self.lengths[i]).sum();
        if used > self.budget {
            return Err(IlpError::LengthViolated {
                used,
                budget: self.budget,
            });
        }
        let z = self
            .counts
            .iter()
            .map(|v| {
                let supply: u64 = v.supply.iter().filter(|(i, _)| x[*i]).map(|(_, c)| c).sum();
                supply.min(v.demand)
            })
            .collect();
        Ok(Assignment { x, z })
    }

    pub fn objective(&self, assignment: &Assignment) -> u64 {
        assignment.z.iter().sum()
    }

    /// Objective of the optimal completion of `chosen`.
    pub fn evaluate_assignment(&self, chosen: &[usize]) -> Result<u64, IlpError> {
        Ok(self.objective(&self.complete(chosen)?))
    }

    /// Checks the length, supply and demand rows.
    pub fn check(&self, assignment: &Assignment) -> Result<(), IlpError> {
        if assignment.x.len() != self.lengths.len() {
            return Err(IlpError::ShapeMismatch {
                kind: "binary",
                got: assignment.x.len(),
                expected: self.lengths.len(),
            });
        }
        if assignment.z.len() != self.counts.len() {
            return Err(IlpError::ShapeMismatch {
                kind: "integer",
                got: assignment.z.len(),
                expected: self.counts.len(),
            });
        }
        let used: u64 = self
            .lengths
            .iter()
            .zip(&assignment.x)
            .filter(|(_, &on)| on)
            .map(|(l, _)| l)
            .sum();
        if used > self.budget {
            return Err(IlpError::LengthViolated {
                used,
                budget: self.budget,
            });
        }
        for (v, &z) in self.counts.iter().zip(&assignment.z) {
            let supply: u64 = v.supply.iter().filter(|(i, _)| assignment.x[*i]).map(|(_, c)| c).sum();
            if supply < z {
                return Err(IlpError::RowViolated(alloc::format!("sup_{}_{}", v.reference, v.index)));
            }
            if v.demand < z {
                return Err(IlpError::RowViolated(alloc::format!("dem_{}_{}", v.reference, v.index)));
            }
        }
        Ok(())
    }

    pub fn is_feasible(&self, assignment: &Assignment) -> bool {
        self.check(assignment).is_ok()
    }

    /// Writes the model in CPLEX LP format. Rows are named `len`,
    /// `sup_<k>_<j>` and `dem_<k>_<j>`; long expressions wrap onto
    /// continuation lines.
    pub fn write_lp<W: Write>(&self, out: &mut W) -> fmt::Result {
        out.write_str("Maximize\n")?;
        let objective: Vec<(u64, String)> = self.counts.iter().map(|v| (1, v.name())).collect();
        write_row(out, "obj", &objective, &[], None)?;

        out.write_str("Subject To\n")?;
        let length_terms: Vec<(u64, String)> = self
            .lengths
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, alloc::format!("x_{i}")))
            .collect();
        if !length_terms.is_empty() {
            write_row(out, "len", &length_terms, &[], Some(("<=", self.budget)))?;
        }
        for v in &self.counts {
            let terms: Vec<(u64, String)> = v.supply.iter().map(|&(i, c)| (c, alloc::format!("x_{i}"))).collect();
            let name = alloc::format!("sup_{}_{}", v.reference, v.index);
            write_row(out, &name, &terms, &[(1, v.name())], Some((">=", 0)))?;
        }
        for v in &self.counts {
            let name = alloc::format!("dem_{}_{}", v.reference, v.index);
            write_row(out, &name, &[(1, v.name())], &[], Some(("<=", v.demand)))?;
        }

        out.write_str("Bounds\n")?;
        for v in &self.counts {
            writeln!(out, " 0 <= {} <= {}", v.name(), v.demand)?;
        }
        out.write_str("Generals\n")?;
        write_names(out, self.counts.iter().map(CountVar::name))?;
        out.write_str("Binaries\n")?;
        write_names(out, (0..self.lengths.len()).map(|i| alloc::format!("x_{i}")))?;
        out.write_str("End\n")
    }

    pub fn to_lp_string(&self) -> String {
        let mut s = String::new();
        self.write_lp(&mut s).expect("writing to a String cannot fail");
        s
    }
}

const TERMS_PER_LINE: usize = 8;

fn write_row<W: Write>(
    out: &mut W,
    name: &str,
    plus: &[(u64, String)],
    minus: &[(u64, String)],
    rhs: Option<(&str, u64)>,
) -> fmt::Result {
    write!(out, " {name}:")?;
    let terms = plus
        .iter()
        .map(|t| ('+', t))
        .chain(minus.iter().map(|t| ('-', t)))
        .filter(|(_, (c, _))| *c != 0);
    let mut written = 0usize;
    for (sign, (coef, var)) in terms {
        if written > 0 && written.is_multiple_of(TERMS_PER_LINE) {
            out.write_str("\n  ")?;
        }
        let first = written == 0;
        match (first, sign) {
            (true, '+') => out.write_str(" ")?,
            (_, s) => write!(out, " {s} ")?,
        }
        if *coef == 1 {
            out.write_str(var)?;
        } else {
            write!(out, "{coef} {var}")?;
        }
        written += 1;
    }
    debug_assert!(written > 0, "row {name} has no terms");
    if let Some((op, value)) = rhs {
        write!(out, " {op} {value}")?;
    }
    out.write_str("\n")
}

fn write_names<W: Write, I: Iterator<Item = String>>(out: &mut W, names: I) -> fmt::Result {
    let mut names = names.peekable();
    if names.peek().is_none() {
        return Ok(());
    }
    for (i, name) in names.enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.write_str("\n")?;
        }
        write!(out, " {name}")?;
    }
    out.write_str("\n")
}
