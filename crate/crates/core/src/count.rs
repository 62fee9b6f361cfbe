//! Number of feasible summaries, by subset-sum dynamic programming.
//!
//! `C[i][j]` counts subsets of the first `i` sentences whose lengths add up
//! to exactly `j`. Starting from `C[0][0] = 1`,
//! `C[i][j] = C[i-1][j] + C[i-1][j - l(s_i)]` (second term only when
//! `j >= l(s_i)`). Feasible summaries are the non-empty subsets, i.e. the
//! sum of the last row over `1..=L_max`. Counts exceed `u128` on realistic
//! inputs, so they are arbitrary precision.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::problem::OracleProblem;

/// Non-empty subsets of `lengths` whose total length is at most `l_max`.
pub fn count_feasible(lengths: &[usize], l_max: usize) -> BigUint {
    let mut row = vec![BigUint::from(0u8); l_max + 1];
    row[0] = BigUint::from(1u8);
    for &len in lengths {
        if len > l_max {
            continue;
        }
        for j in (len..=l_max).rev() {
            let (low, high) = row.split_at_mut(j);
            high[0] += &low[j - len];
        }
    }
    row.iter().skip(1).sum()
}

/// Same count restricted to sentences sharing at least one gram with a
/// reference.
pub fn count_feasible_relevant(problem: &OracleProblem, l_max: usize) -> BigUint {
    let lengths: Vec<usize> = (0..problem.len())
        .filter(|&i| problem.bank().is_relevant(i))
        .map(|i| problem.lengths()[i])
        .collect();
    count_feasible(&lengths, l_max)
}

/// The full `(|D| + 1) x (L_max + 1)` table, for per-prefix diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    rows: Vec<Vec<BigUint>>,
}

impl CountTable {
    pub fn build(lengths: &[usize], l_max: usize) -> Self {
        let mut first = vec![BigUint::from(0u8); l_max + 1];
        first[0] = BigUint::from(1u8);
        let mut rows = vec![first];
        for &len in lengths {
            let prev = rows.last().expect("table has a first row");
            let next = (0..=l_max)
                .map(|j| {
                    if j >= len {
                        &prev[j] + &prev[j - len]
                    } else {
                        prev[j].clone()
                    }
                })
                .collect();
            rows.push(next);
        }
        CountTable { rows }
    }

    /// Subsets of the first `i` sentences with total length exactly `j`.
    pub fn get(&self, i: usize, j: usize) -> &BigUint {
        &self.rows[i][j]
    }

    pub fn prefixes(&self) -> usize {
        self.rows.len() - 1
    }

    /// Non-empty subsets of the first `i` sentences that fit the budget.
    pub fn feasible_in_prefix(&self, i: usize) -> BigUint {
        self.rows[i].iter().skip(1).sum()
    }

    pub fn feasible(&self) -> BigUint {
        self.feasible_in_prefix(self.prefixes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(lengths: &[usize], l_max: usize) -> u64 {
        (1u64..1 << lengths.len())
            .filter(|mask| {
                let total: usize = (0..lengths.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| lengths[i])
                    .sum();
                total <= l_max
            })
            .count() as u64
    }

    #[test]
    fn examples() {
        assert_eq!(count_feasible(&[3, 4], 5), BigUint::from(2u8));
        assert_eq!(count_feasible(&[2, 2, 2], 4), BigUint::from(6u8));
        assert_eq!(count_feasible(&[], 10), BigUint::from(0u8));
        assert_eq!(count_feasible(&[1, 2], 0), BigUint::from(0u8));
    }

    #[test]
    fn table_invariants() {
        let lengths = [3, 1, 4, 1, 5, 9, 2, 6];
        let t = CountTable::build(&lengths, 12);
        assert_eq!(*t.get(0, 0), BigUint::from(1u8));
        assert!((1..=12).all(|j| *t.get(0, j) == BigUint::from(0u8)));
        for i in 1..=t.prefixes() {
            assert!(t.feasible_in_prefix(i) >= t.feasible_in_prefix(i - 1));
        }
        assert_eq!(t.feasible(), count_feasible(&lengths, 12));
        assert_eq!(t.feasible(), BigUint::from(brute(&lengths, 12)));
    }

    #[test]
    fn unconstrained_is_all_nonempty_subsets() {
        let lengths = [2, 7, 1, 1, 3];
        assert_eq!(count_feasible(&lengths, 14), BigUint::from(31u8));
    }

    #[test]
    fn large_counts_are_exact() {
        let ones = vec![1usize; 130];
        let expected = (BigUint::from(1u8) << 130usize) - BigUint::from(1u8);
        assert_eq!(count_feasible(&ones, 130), expected);
    }
}
