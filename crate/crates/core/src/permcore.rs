//! Permutation fundamentals: standardization, consecutive occurrences,
//! the dihedral-type symmetries, standard form and overlap sets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// A permutation of `{1..n}` in one-line notation. Also used as a pattern.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    word: Vec<usize>,
}

impl Permutation {
    /// Validates that `word` is a bijection onto `{1..n}` with `n >= 1`.
    pub fn new(word: Vec<usize>) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::invalid("permutation must have length at least 1"));
        }
        let n = word.len();
        let mut seen = vec![false; n + 1];
        for &v in &word {
            if v == 0 || v > n {
                return Err(Error::invalid(format!("entry {v} outside 1..={n}")));
            }
            if seen[v] {
                return Err(Error::invalid(format!("entry {v} repeated")));
            }
            seen[v] = true;
        }
        Ok(Permutation { word })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { word: (1..=n).collect() }
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.word
    }

    pub fn first(&self) -> usize {
        self.word[0]
    }

    pub fn last(&self) -> usize {
        self.word[self.word.len() - 1]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.word.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { word: inv }
    }

    pub fn reverse(&self) -> Permutation {
        Permutation { word: self.word.iter().rev().copied().collect() }
    }

    pub fn complement(&self) -> Permutation {
        let n = self.len();
        Permutation { word: self.word.iter().map(|&v| n + 1 - v).collect() }
    }

    pub fn reverse_complement(&self) -> Permutation {
        self.reverse().complement()
    }

    pub fn apply(&self, sym: Symmetry) -> Permutation {
        match sym {
            Symmetry::Identity => self.clone(),
            Symmetry::Reverse => self.reverse(),
            Symmetry::Complement => self.complement(),
            Symmetry::ReverseComplement => self.reverse_complement(),
        }
    }

    /// `pi_1 < pi_m` and `pi_1 + pi_m <= m + 1`.
    pub fn is_standard_form(&self) -> bool {
        let m = self.len();
        m >= 2 && self.first() < self.last() && self.first() + self.last() <= m + 1
    }

    /// Digit string when every entry is a single digit, comma form otherwise.
    pub fn to_compact(&self) -> String {
        if self.word.iter().all(|&v| v <= 9) {
            self.word.iter().map(|v| char::from(b'0' + *v as u8)).collect()
        } else {
            self.to_string()
        }
    }

    /// All permutations of length `n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        let mut next = Some((1..=n).collect::<Vec<_>>());
        std::iter::from_fn(move || {
            let cur = next.take()?;
            let mut succ = cur.clone();
            if next_permutation(&mut succ) {
                next = Some(succ);
            }
            Some(Permutation { word: cur })
        })
    }
}

/// Lexicographic successor in place; returns `false` on the last permutation.
pub fn next_permutation<T: Ord>(w: &mut [T]) -> bool {
    if w.len() < 2 {
        return false;
    }
    let mut i = w.len() - 1;
    while i > 0 && w[i - 1] >= w[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = w.len() - 1;
    while w[j] <= w[i - 1] {
        j -= 1;
    }
    w.swap(i - 1, j);
    w[i..].reverse();
    true
}

/// Canonical comma-separated form, e.g. `2,3,5,1,4`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.word.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({})", self.to_compact())
    }
}

/// Accepts `2,3,5,1,4` or the digit shortcut `23514`.
impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::invalid("empty pattern"));
        }
        let word = if s.contains(',') {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::invalid(format!("bad entry `{t}` in `{s}`")))
                })
                .collect::<Result<Vec<_>>>()?
        } else if s.bytes().all(|b| b.is_ascii_digit()) {
            s.bytes().map(|b| (b - b'0') as usize).collect()
        } else {
            return Err(Error::invalid(format!("cannot parse `{s}` as a permutation")));
        };
        Permutation::new(word)
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_compact())
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    Identity,
    Reverse,
    Complement,
    ReverseComplement,
}

impl Symmetry {
    pub const ALL: [Symmetry; 4] = [
        Symmetry::Identity,
        Symmetry::Reverse,
        Symmetry::Complement,
        Symmetry::ReverseComplement,
    ];
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symmetry::Identity => "identity",
            Symmetry::Reverse => "reverse",
            Symmetry::Complement => "complement",
            Symmetry::ReverseComplement => "reverse_complement",
        })
    }
}

/// Rank word of a sequence of distinct entries.
pub fn standardize<T: Ord>(word: &[T]) -> Result<Permutation> {
    if word.is_empty() {
        return Err(Error::invalid("cannot standardize an empty word"));
    }
    let mut idx: Vec<usize> = (0..word.len()).collect();
    idx.sort_by(|&a, &b| word[a].cmp(&word[b]));
    if idx.windows(2).any(|w| word[w[0]] == word[w[1]]) {
        return Err(Error::invalid("standardization needs pairwise distinct entries"));
    }
    let mut ranks = vec![0; word.len()];
    for (rank, i) in idx.into_iter().enumerate() {
        ranks[i] = rank + 1;
    }
    Ok(Permutation { word: ranks })
}

/// Whether the window of `word` starting at 0-based `start` standardizes to
/// the pattern whose inverse is `pattern_inv` (0-based offsets). Walks the
/// chain `w[start+eta_1] < w[start+eta_2] < ...`.
#[inline]
pub(crate) fn window_matches<T: Ord>(pattern_inv: &[usize], word: &[T], start: usize) -> bool {
    pattern_inv
        .windows(2)
        .all(|p| word[start + p[0]] < word[start + p[1]])
}

/// 0-based inverse offsets `eta_j - 1`, the form [`window_matches`] wants.
pub(crate) fn inverse_offsets(pattern: &Permutation) -> Vec<usize> {
    pattern.inverse().word.iter().map(|&v| v - 1).collect()
}

/// `Em(pattern, perm)`: 1-based positions of consecutive occurrences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OccurrenceSet {
    pub positions: Vec<usize>,
    #[serde(skip)]
    pub pattern_len: usize,
    #[serde(skip)]
    pub ambient_len: usize,
}

impl OccurrenceSet {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.positions.binary_search(&pos).is_ok()
    }
}

pub fn occurrences(pattern: &Permutation, perm: &Permutation) -> OccurrenceSet {
    occurrences_in(pattern, perm.as_slice())
}

/// Occurrences inside an arbitrary word of distinct entries.
pub fn occurrences_in<T: Ord>(pattern: &Permutation, word: &[T]) -> OccurrenceSet {
    let m = pattern.len();
    let n = word.len();
    let inv = inverse_offsets(pattern);
    let positions = if m > n {
        Vec::new()
    } else {
        (0..=n - m)
            .filter(|&i| window_matches(&inv, word, i))
            .map(|i| i + 1)
            .collect()
    };
    OccurrenceSet { positions, pattern_len: m, ambient_len: n }
}

/// The set of shifts `i in [m-1]` at which a pattern can overlap itself.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OverlapSet {
    #[serde(skip)]
    m: usize,
    indices: Vec<usize>,
}

impl OverlapSet {
    pub fn pattern_len(&self) -> usize {
        self.m
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn is_minimal(&self) -> bool {
        self.indices.len() == 1
    }
}

pub fn overlap_set(pattern: &Permutation) -> Result<OverlapSet> {
    let m = pattern.len();
    if m < 2 {
        return Err(Error::invalid("overlap set needs a pattern of length at least 2"));
    }
    Ok(overlap_set_unchecked(pattern))
}

/// Same as [`overlap_set`] but defined (empty) for `m = 1`.
pub(crate) fn overlap_set_unchecked(pattern: &Permutation) -> OverlapSet {
    let w = pattern.as_slice();
    let m = w.len();
    let indices = (1..m)
        .filter(|&i| {
            let suffix = standardize(&w[i..]).expect("distinct");
            let prefix = standardize(&w[..m - i]).expect("distinct");
            suffix == prefix
        })
        .collect();
    OverlapSet { m, indices }
}

pub fn is_nonoverlapping(pattern: &Permutation) -> Result<bool> {
    Ok(overlap_set(pattern)?.is_minimal())
}

/// The lexicographically least of `pi, pi^R, pi^C, pi^RC` in standard form,
/// with the symmetry that produced it.
pub fn to_standard_form(pattern: &Permutation) -> Result<(Permutation, Symmetry)> {
    if pattern.len() < 2 {
        return Err(Error::invalid("standard form needs a pattern of length at least 2"));
    }
    Symmetry::ALL
        .iter()
        .map(|&s| (pattern.apply(s), s))
        .filter(|(p, _)| p.is_standard_form())
        .min()
        .ok_or_else(|| Error::Internal(format!("no symmetry image of {pattern} is in standard form")))
}
