//! Ground truth by enumerating all of `S_n`.
//!
//! Permutations are streamed in lexicographic order, one worker per first
//! entry, so memory stays flat; tallies are merged in first-entry order.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::clusterengine::marked_blocks;
use crate::clusterposet::MarkSet;
use crate::error::Budget;
use crate::permcore::{
    inverse_offsets, next_permutation, occurrences, overlap_set, window_matches, Permutation,
};
use crate::{Error, Result};

pub const DEFAULT_LIMIT: usize = 11;

/// Largest `n` the brute-force routines accept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oracle {
    pub limit: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle { limit: DEFAULT_LIMIT }
    }
}

/// Histogram of occurrence sets over `S_n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OccurrenceStats {
    /// `S -> a_{n,S}`, only nonzero entries.
    pub by_set: BTreeMap<Vec<usize>, u64>,
    /// `k -> a_{n,k}` for `k = 0..=n-m+1` (or just `k = 0` when `n < m`).
    pub by_k: Vec<u64>,
}

impl OccurrenceStats {
    pub fn a(&self, marks: &[usize]) -> u64 {
        self.by_set.get(marks).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.by_k.iter().sum()
    }
}

impl Oracle {
    fn check(&self, n: usize) -> Result<()> {
        if n > self.limit {
            return Err(Error::Resource { budget: Budget::OracleLength, limit: self.limit as u64 });
        }
        Ok(())
    }

    /// Calls `visit` once per permutation of `S_n`, in parallel over the
    /// first entry; returns the per-worker results in first-entry order.
    fn sweep<T, F>(&self, n: usize, visit: F) -> Result<Vec<T>>
    where
        T: Default + Send,
        F: Fn(&mut T, &[usize]) + Sync,
    {
        self.check(n)?;
        if n == 0 {
            let mut t = T::default();
            visit(&mut t, &[]);
            return Ok(vec![t]);
        }
        Ok((1..=n)
            .into_par_iter()
            .map(|first| {
                let mut w: Vec<usize> = std::iter::once(first).chain((1..=n).filter(|&v| v != first)).collect();
                let mut acc = T::default();
                loop {
                    visit(&mut acc, &w);
                    if !next_permutation(&mut w[1..]) {
                        break;
                    }
                }
                acc
            })
            .collect())
    }

    pub fn enumerate_stats(&self, pattern: &Permutation, n: usize) -> Result<OccurrenceStats> {
        let m = pattern.len();
        let inv = inverse_offsets(pattern);
        let slots = (n + 1).saturating_sub(m);
        if slots > 64 {
            return Err(Error::Resource { budget: Budget::OracleLength, limit: self.limit as u64 });
        }
        let parts = self.sweep(n, |acc: &mut HashMap<u64, u64>, w| {
            let mut mask = 0u64;
            for i in 0..slots {
                if window_matches(&inv, w, i) {
                    mask |= 1 << i;
                }
            }
            *acc.entry(mask).or_default() += 1;
        })?;
        let mut stats = OccurrenceStats { by_set: BTreeMap::new(), by_k: vec![0; slots + 1] };
        for part in parts {
            for (mask, count) in part {
                let marks: Vec<usize> = (0..slots).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
                stats.by_k[marks.len()] += count;
                *stats.by_set.entry(marks).or_default() += count;
            }
        }
        Ok(stats)
    }

    /// `#{sigma in S_n : S subset of Em(pattern, sigma)}`.
    pub fn brute_b(&self, pattern: &Permutation, n: usize, marks: &[usize]) -> Result<BigUint> {
        let m = pattern.len();
        if marks.iter().any(|&i| i == 0 || i + m > n + 1) {
            return Err(Error::invalid(format!("marks {marks:?} do not fit n={n}, m={m}")));
        }
        let inv = inverse_offsets(pattern);
        let parts = self.sweep(n, |acc: &mut u64, w| {
            if marks.iter().all(|&i| window_matches(&inv, w, i - 1)) {
                *acc += 1;
            }
        })?;
        Ok(BigUint::from(parts.into_iter().sum::<u64>()))
    }

    /// `brute_b` restricted to cluster sets; 0 for anything else.
    pub fn brute_r(&self, pattern: &Permutation, n: usize, marks: &[usize]) -> Result<BigUint> {
        let m = pattern.len();
        let feasible = m >= 2 && MarkSet::is_cluster(n, m, marks, &overlap_set(pattern)?);
        let single = m == 1 && n == 1 && marks == [1];
        if !(feasible || single) {
            self.check(n)?;
            return Ok(BigUint::zero());
        }
        self.brute_b(pattern, n, marks)
    }
}

pub fn enumerate_stats(pattern: &Permutation, n: usize) -> Result<OccurrenceStats> {
    Oracle::default().enumerate_stats(pattern, n)
}

pub fn brute_b(pattern: &Permutation, n: usize, marks: &[usize]) -> Result<BigUint> {
    Oracle::default().brute_b(pattern, n, marks)
}

pub fn brute_r(pattern: &Permutation, n: usize, marks: &[usize]) -> Result<BigUint> {
    Oracle::default().brute_r(pattern, n, marks)
}

/// Reverses the window spanned by each maximal block of overlapping marks.
/// Maps `{sigma : S subset of Em(pi, sigma)}` onto the same set for `pi^R`
/// when `pi` is non-overlapping; its own inverse when applied with `pi^R`.
pub fn block_reverse_bijection(perm: &Permutation, pattern: &Permutation, marks: &[usize]) -> Result<Permutation> {
    if !overlap_set(pattern)?.is_minimal() {
        return Err(Error::invalid(format!("{pattern} overlaps itself")));
    }
    let em = occurrences(pattern, perm);
    if let Some(i) = marks.iter().find(|&&i| !em.contains(i)) {
        return Err(Error::invalid(format!("{pattern} does not occur at position {i} of {perm}")));
    }
    let mut sorted = marks.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let m = pattern.len();
    let mut w = perm.as_slice().to_vec();
    for block in marked_blocks(&sorted, m) {
        let lo = block[0] - 1;
        let hi = block.last().unwrap() + m - 1;
        w[lo..hi].reverse();
    }
    Permutation::new(w)
}
