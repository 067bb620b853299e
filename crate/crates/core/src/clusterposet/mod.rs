//! Cluster posets: the partial order forced on `sigma_1..sigma_n` by
//! requiring an occurrence of the pattern at every marked position, and
//! exact counting of their linear extensions.
//!
//! Elements are stored 0-based; every textual surface (edge lists, mark
//! sets) is 1-based to match position labels.

mod extensions;
mod iso;

use std::fmt::Write as _;

use fixedbitset::FixedBitSet;

use crate::permcore::{overlap_set_unchecked, OverlapSet, Permutation};
use crate::error::Budget;
use crate::{Error, Result};

pub use extensions::{count_linear_extensions, count_linear_extensions_with, Pendant, SpinePoset};
pub use iso::{canonical_form, poset_isomorphic, poset_isomorphic_with, CanonicalForm};

/// Limits for the exact poset algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountConfig {
    /// Maximum number of downsets materialized by the generic counter.
    pub max_states: u64,
    /// Largest poset accepted by the isomorphism test.
    pub max_iso_size: usize,
    /// Maximum leaves of the canonical-labelling search tree.
    pub max_iso_leaves: u64,
    /// Maximum cluster sets enumerated for one `r_{n,k}` or one row.
    pub max_mark_sets: u64,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig { max_states: 50_000_000, max_iso_size: 40, max_iso_leaves: 1_000_000, max_mark_sets: 2_000_000 }
    }
}

/// A set of marked occurrence positions `S = {i_1 < ... < i_k}` in a
/// permutation of length `n`, for a pattern of length `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkSet {
    n: usize,
    m: usize,
    marks: Vec<usize>,
}

impl MarkSet {
    /// Checked constructor: `S` must start at 1, end at `n-m+1` and have
    /// every consecutive gap in the overlap set.
    pub fn new(n: usize, m: usize, marks: Vec<usize>, overlap: &OverlapSet) -> Result<Self> {
        if !Self::is_cluster(n, m, &marks, overlap) {
            return Err(Error::invalid(format!(
                "marks {marks:?} are not a cluster set for n={n}, m={m}, overlap {:?}",
                overlap.indices()
            )));
        }
        Ok(MarkSet { n, m, marks })
    }

    /// No cluster conditions checked; only sortedness and range.
    /// [`build_poset`] reports violations of the gap condition as
    /// [`Error::Infeasible`].
    pub fn unchecked(n: usize, m: usize, marks: Vec<usize>) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::invalid(format!("pattern length {m} does not fit in {n}")));
        }
        if marks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("marks must be strictly increasing"));
        }
        if marks.iter().any(|&i| i == 0 || i > n - m + 1) {
            return Err(Error::invalid(format!("marks {marks:?} outside [1, {}]", n - m + 1)));
        }
        Ok(MarkSet { n, m, marks })
    }

    /// `S(k, m) = {1, m, 2m-1, ..., 1+(k-1)(m-1)}` with `n = 1+k(m-1)`.
    pub fn chained(k: usize, m: usize) -> Self {
        assert!(k >= 1 && m >= 2);
        MarkSet {
            n: 1 + k * (m - 1),
            m,
            marks: (0..k).map(|j| 1 + j * (m - 1)).collect(),
        }
    }

    pub fn is_cluster(n: usize, m: usize, marks: &[usize], overlap: &OverlapSet) -> bool {
        if m == 0 || n < m || marks.is_empty() {
            return false;
        }
        marks[0] == 1
            && *marks.last().unwrap() == n - m + 1
            && marks.windows(2).all(|w| w[1] > w[0] && overlap.contains(w[1] - w[0]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pattern_len(&self) -> usize {
        self.m
    }

    pub fn marks(&self) -> &[usize] {
        &self.marks
    }

    pub fn len(&self) -> usize {
        self.marks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marks.is_empty()
    }
}

/// All cluster mark sets of length `n` for `pattern`: compositions of
/// `n - m` into parts from the overlap set, prefix-summed from 1.
pub fn feasible_marks(pattern: &Permutation, n: usize) -> Vec<MarkSet> {
    let m = pattern.len();
    if n < m {
        return Vec::new();
    }
    let overlap = overlap_set_unchecked(pattern);
    feasible_marks_with(&overlap, m, n, None, u64::MAX).expect("unbounded enumeration")
}

/// Cluster sets of length `n`, restricted to `k` marks when given. Fails
/// once more than `limit` sets would be produced.
pub(crate) fn feasible_marks_with(
    overlap: &OverlapSet,
    m: usize,
    n: usize,
    k: Option<usize>,
    limit: u64,
) -> Result<Vec<MarkSet>> {
    struct Walk<'a> {
        parts: &'a [usize],
        gaps: Option<usize>,
        limit: u64,
        out: Vec<Vec<usize>>,
    }
    impl Walk<'_> {
        fn rec(&mut self, remaining: usize, cur: &mut Vec<usize>) -> Result<()> {
            let used = cur.len() - 1;
            if let Some(g) = self.gaps {
                // every remaining gap is at least the smallest and at most the largest part
                let left = g - used;
                let (lo, hi) = (self.parts[0], *self.parts.last().unwrap());
                if remaining < left * lo || remaining > left * hi {
                    return Ok(());
                }
            }
            if remaining == 0 {
                if self.out.len() as u64 >= self.limit {
                    return Err(Error::Resource { budget: Budget::MarkSets, limit: self.limit });
                }
                self.out.push(cur.clone());
                return Ok(());
            }
            for i in 0..self.parts.len() {
                let p = self.parts[i];
                if p > remaining {
                    break;
                }
                cur.push(cur.last().unwrap() + p);
                self.rec(remaining - p, cur)?;
                cur.pop();
            }
            Ok(())
        }
    }
    if n < m || k == Some(0) {
        return Ok(Vec::new());
    }
    let mut walk = Walk { parts: overlap.indices(), gaps: k.map(|k| k - 1), limit, out: Vec::new() };
    walk.rec(n - m, &mut vec![1])?;
    let mut out = walk.out;
    out.sort();
    Ok(out.into_iter().map(|marks| MarkSet { n, m, marks }).collect())
}

/// A finite poset on `0..size`, stored as strict down-sets (the transitive
/// closure) plus cover relations and the chains it was generated from.
#[derive(Clone)]
pub struct ClusterPoset {
    size: usize,
    below: Vec<FixedBitSet>,
    lower_covers: Vec<Vec<usize>>,
    upper_covers: Vec<Vec<usize>>,
    chains: Vec<Vec<usize>>,
}

impl PartialEq for ClusterPoset {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size && self.below == other.below
    }
}

impl Eq for ClusterPoset {}

impl std::fmt::Debug for ClusterPoset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClusterPoset")
            .field("size", &self.size)
            .field("covers", &self.cover_pairs())
            .finish()
    }
}

impl ClusterPoset {
    /// Transitive closure of the given chains (each listed bottom to top).
    pub fn from_chains(size: usize, chains: Vec<Vec<usize>>) -> Result<Self> {
        let mut edges = Vec::new();
        for c in &chains {
            for w in c.windows(2) {
                edges.push((w[0], w[1]));
            }
        }
        let mut covered = vec![false; size];
        for &v in chains.iter().flatten() {
            if v >= size {
                return Err(Error::invalid(format!("element {v} out of range 0..{size}")));
            }
            covered[v] = true;
        }
        let mut chains = chains;
        chains.extend((0..size).filter(|&v| !covered[v]).map(|v| vec![v]));
        Self::build(size, &edges, chains)
    }

    /// Transitive closure of relations `(u, v)` meaning `u < v`.
    pub fn from_relations(size: usize, relations: &[(usize, usize)]) -> Result<Self> {
        let chains = relations.iter().map(|&(u, v)| vec![u, v]).collect();
        Self::from_chains(size, chains)
    }

    pub fn chain(size: usize) -> Self {
        Self::from_chains(size, vec![(0..size).collect()]).expect("a chain is acyclic")
    }

    pub fn antichain(size: usize) -> Self {
        Self::from_chains(size, Vec::new()).expect("no relations")
    }

    fn build(size: usize, edges: &[(usize, usize)], chains: Vec<Vec<usize>>) -> Result<Self> {
        let mut succ = vec![Vec::new(); size];
        let mut indeg = vec![0usize; size];
        for &(u, v) in edges {
            if u >= size || v >= size {
                return Err(Error::invalid(format!("relation {u}<{v} out of range 0..{size}")));
            }
            if u == v {
                return Err(Error::Infeasible(format!("element {} below itself", u + 1)));
            }
            succ[u].push(v);
            indeg[v] += 1;
        }
        let mut order = Vec::with_capacity(size);
        let mut stack: Vec<usize> = (0..size).filter(|&v| indeg[v] == 0).collect();
        while let Some(u) = stack.pop() {
            order.push(u);
            for &v in &succ[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    stack.push(v);
                }
            }
        }
        if order.len() < size {
            return Err(Error::Infeasible(
                "generating chains order some pair of positions both ways".into(),
            ));
        }
        let mut pred = vec![Vec::new(); size];
        for &(u, v) in edges {
            pred[v].push(u);
        }
        let mut below = vec![FixedBitSet::with_capacity(size); size];
        for &v in &order {
            let mut set = FixedBitSet::with_capacity(size);
            for &u in &pred[v] {
                set.insert(u);
                set.union_with(&below[u]);
            }
            below[v] = set;
        }
        let mut lower_covers = vec![Vec::new(); size];
        let mut upper_covers = vec![Vec::new(); size];
        for v in 0..size {
            let mut implied = FixedBitSet::with_capacity(size);
            for w in below[v].ones() {
                implied.union_with(&below[w]);
            }
            for u in below[v].ones() {
                if !implied.contains(u) {
                    lower_covers[v].push(u);
                    upper_covers[u].push(v);
                }
            }
        }
        Ok(ClusterPoset { size, below, lower_covers, upper_covers, chains })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Strict order `u < v`.
    pub fn less_than(&self, u: usize, v: usize) -> bool {
        self.below[v].contains(u)
    }

    pub fn comparable(&self, u: usize, v: usize) -> bool {
        self.less_than(u, v) || self.less_than(v, u)
    }

    pub fn strict_down_set(&self, v: usize) -> &FixedBitSet {
        &self.below[v]
    }

    pub fn lower_covers(&self, v: usize) -> &[usize] {
        &self.lower_covers[v]
    }

    pub fn upper_covers(&self, v: usize) -> &[usize] {
        &self.upper_covers[v]
    }

    pub fn chains(&self) -> &[Vec<usize>] {
        &self.chains
    }

    /// Cover pairs `(u, v)` with `u` covered by `v`, sorted.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<_> = (0..self.size)
            .flat_map(|v| self.lower_covers[v].iter().map(move |&u| (u, v)))
            .collect();
        pairs.sort_unstable();
        pairs
    }

    pub fn is_chain(&self) -> bool {
        (0..self.size).all(|v| self.lower_covers[v].len() <= 1 && self.upper_covers[v].len() <= 1)
            && (0..self.size).filter(|&v| self.lower_covers[v].is_empty()).count() <= 1
    }

    /// The same elements with every relation reversed.
    pub fn dual(&self) -> ClusterPoset {
        let chains = self
            .chains
            .iter()
            .map(|c| c.iter().rev().copied().collect())
            .collect();
        let edges: Vec<_> = self.cover_pairs().into_iter().map(|(u, v)| (v, u)).collect();
        Self::build(self.size, &edges, chains).expect("dual of an acyclic relation is acyclic")
    }

    /// Vertex sets of the connected components of the comparability graph.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.size];
        let mut out = Vec::new();
        for start in 0..self.size {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut i = 0;
            while i < members.len() {
                let v = members[i];
                i += 1;
                for &w in self.lower_covers[v].iter().chain(&self.upper_covers[v]) {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Sub-poset induced on `members` (relabelled `0..members.len()` in order).
    pub fn induced(&self, members: &[usize]) -> ClusterPoset {
        let mut index = vec![usize::MAX; self.size];
        for (i, &v) in members.iter().enumerate() {
            index[v] = i;
        }
        let edges: Vec<_> = self
            .cover_pairs()
            .into_iter()
            .filter(|&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|(u, v)| (index[u], index[v]))
            .collect();
        let chains = edges.iter().map(|&(u, v)| vec![u, v]).collect();
        Self::build(members.len(), &edges, chains).expect("induced order is acyclic")
    }

    /// One cover pair `u<v` per line, 1-based labels.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.cover_pairs() {
            writeln!(out, "{}<{}", u + 1, v + 1).unwrap();
        }
        out
    }

    /// Parses [`ClusterPoset::to_edge_list`] output. `size` defaults to the
    /// largest label seen.
    pub fn from_edge_list(text: &str, size: Option<usize>) -> Result<Self> {
        let mut rel = Vec::new();
        let mut max = 0;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (u, v) = line
                .split_once('<')
                .ok_or_else(|| Error::invalid(format!("bad edge line `{line}`")))?;
            let parse = |t: &str| {
                t.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&x| x >= 1)
                    .ok_or_else(|| Error::invalid(format!("bad label `{t}`")))
            };
            let (u, v) = (parse(u)?, parse(v)?);
            max = max.max(u).max(v);
            rel.push((u - 1, v - 1));
        }
        let size = size.unwrap_or(max);
        Self::from_relations(size, &rel)
    }

    /// Brute-force count of linear extensions by enumerating all orderings.
    /// Only for tests and tiny posets.
    pub fn brute_force_extensions(&self) -> u64 {
        let mut order: Vec<usize> = (0..self.size).collect();
        let mut count = 0;
        loop {
            let mut pos = vec![0; self.size];
            for (i, &v) in order.iter().enumerate() {
                pos[v] = i;
            }
            if (0..self.size).all(|v| self.below[v].ones().all(|u| pos[u] < pos[v])) {
                count += 1;
            }
            if !crate::permcore::next_permutation(&mut order) {
                break;
            }
        }
        count
    }
}

/// `P^pi_{n,S}`: for each mark `i`, the chain
/// `sigma_{i-1+eta_1} < ... < sigma_{i-1+eta_m}` with `eta = pi^{-1}`.
pub fn build_poset(pattern: &Permutation, marks: &MarkSet) -> Result<ClusterPoset> {
    let m = pattern.len();
    if marks.pattern_len() != m {
        return Err(Error::invalid(format!(
            "mark set built for pattern length {}, pattern has length {m}",
            marks.pattern_len()
        )));
    }
    let eta = pattern.inverse();
    let chains = marks
        .marks()
        .iter()
        .map(|&i| eta.as_slice().iter().map(|&e| i + e - 2).collect())
        .collect();
    ClusterPoset::from_chains(marks.n(), chains).map_err(|e| match e {
        Error::Infeasible(_) => Error::Infeasible(format!(
            "marks {:?} violate the overlap condition for {}",
            marks.marks(),
            pattern.to_compact()
        )),
        other => other,
    })
}

/// All relations reversed.
pub fn poset_dual(poset: &ClusterPoset) -> ClusterPoset {
    poset.dual()
}

/// `P^pi_k` for any non-overlapping `pi` with `pi_1 = a`, `pi_m = b`: a spine
/// with `k-1` chains of `m-b+a` nodes hanging off it.
pub fn nonoverlapping_poset(m: usize, a: usize, b: usize, k: usize) -> Result<ClusterPoset> {
    SpinePoset::nonoverlapping(m, a, b, k)?.to_poset()
}
