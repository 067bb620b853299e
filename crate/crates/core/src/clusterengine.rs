//! Cluster numbers and the occurrence-set counts built from them.
//!
//! `b(S)` counts permutations with an occurrence at every position of `S`;
//! it factors over maximal blocks of marks closer than `m`, each block
//! contributing a refined cluster number. `a(S)`, the count with occurrence
//! set exactly `S`, is the alternating sum of `b` over supersets of `S`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

use crate::bigmath::{binomial, factorial, multinomial};
use crate::cache::{CacheKey, CountCache};
use crate::clusterposet::{
    build_poset, count_linear_extensions_with, feasible_marks_with, CountConfig, MarkSet, SpinePoset,
};
use crate::gfseries::{self, TruncatedSeries};
use crate::permcore::{overlap_set_unchecked, to_standard_form, OverlapSet, Permutation};
use crate::{Error, Result};

/// Counting context for one pattern. Results are memoized per engine and,
/// when a [`CountCache`] is attached, across processes.
pub struct ClusterEngine {
    pattern: Permutation,
    overlap: OverlapSet,
    /// `(a, b)` of the standard form, for non-overlapping patterns.
    spine: Option<(usize, usize)>,
    config: CountConfig,
    cache: Option<Arc<CountCache>>,
    refined: Mutex<HashMap<(usize, Vec<usize>), BigUint>>,
    avoiders: Mutex<Vec<BigUint>>,
    recursive: Mutex<HashMap<(usize, Vec<usize>), BigInt>>,
}

impl ClusterEngine {
    pub fn new(pattern: &Permutation) -> Self {
        Self::with_config(pattern, CountConfig::default(), None)
    }

    pub fn with_config(pattern: &Permutation, config: CountConfig, cache: Option<Arc<CountCache>>) -> Self {
        let overlap = overlap_set_unchecked(pattern);
        let m = pattern.len();
        let spine = (m >= 2 && overlap.is_minimal()).then(|| {
            let (std, _) = to_standard_form(pattern).expect("m >= 2");
            (std.first(), std.last())
        });
        ClusterEngine {
            pattern: pattern.clone(),
            overlap,
            spine,
            config,
            cache,
            refined: Mutex::new(HashMap::new()),
            avoiders: Mutex::new(Vec::new()),
            recursive: Mutex::new(HashMap::new()),
        }
    }

    pub fn pattern(&self) -> &Permutation {
        &self.pattern
    }

    pub fn overlap(&self) -> &OverlapSet {
        &self.overlap
    }

    fn m(&self) -> usize {
        self.pattern.len()
    }

    fn check_subset(&self, n: usize, marks: &[usize]) -> Result<()> {
        let m = self.m();
        if n < m {
            if marks.is_empty() {
                return Ok(());
            }
            return Err(Error::invalid(format!("no occurrence positions when n={n} < m={m}")));
        }
        if marks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("marks must be strictly increasing"));
        }
        if marks.iter().any(|&i| i == 0 || i > n - m + 1) {
            return Err(Error::invalid(format!("marks {marks:?} outside [1, {}]", n - m + 1)));
        }
        Ok(())
    }

    /// `r_{n,S}`: linear extensions of the cluster poset, or 0 when `S` is
    /// not a cluster set or its chains conflict.
    pub fn refined_cluster_number(&self, n: usize, marks: &[usize]) -> Result<BigUint> {
        let m = self.m();
        if !MarkSet::is_cluster(n, m, marks, &self.overlap) {
            return Ok(BigUint::zero());
        }
        let memo_key = (n, marks.to_vec());
        if let Some(v) = self.refined.lock().unwrap().get(&memo_key) {
            return Ok(v.clone());
        }
        let cache_key = CacheKey::Refined { pattern: self.pattern.clone(), n, marks: marks.to_vec() };
        let value = match self.cache.as_ref().and_then(|c| c.get(&cache_key)) {
            Some(v) => v,
            None => {
                let v = self.compute_refined(n, marks)?;
                if let Some(c) = &self.cache {
                    c.put(cache_key, v.clone());
                }
                v
            }
        };
        self.refined.lock().unwrap().insert(memo_key, value.clone());
        Ok(value)
    }

    fn compute_refined(&self, n: usize, marks: &[usize]) -> Result<BigUint> {
        let m = self.m();
        if let Some((a, b)) = self.spine {
            // the only cluster sets are S(k, m); the poset depends on (a, b) alone
            return Ok(SpinePoset::nonoverlapping(m, a, b, marks.len())?.count());
        }
        let set = MarkSet::unchecked(n, m, marks.to_vec())?;
        match build_poset(&self.pattern, &set) {
            Ok(poset) => count_linear_extensions_with(&poset, &self.config),
            Err(Error::Infeasible(_)) => Ok(BigUint::zero()),
            Err(e) => Err(e),
        }
    }

    /// `r_{n,k}`: sum of `r_{n,S}` over cluster sets with `|S| = k`.
    pub fn cluster_number(&self, n: usize, k: usize) -> Result<BigUint> {
        let cache_key = CacheKey::Cluster { pattern: self.pattern.clone(), n, k };
        if let Some(v) = self.cache.as_ref().and_then(|c| c.get(&cache_key)) {
            return Ok(v);
        }
        let mut total = BigUint::zero();
        for set in feasible_marks_with(&self.overlap, self.m(), n, Some(k), self.config.max_mark_sets)? {
            total += self.refined_cluster_number(n, set.marks())?;
        }
        if let Some(c) = &self.cache {
            c.put(cache_key, total.clone());
        }
        Ok(total)
    }

    /// `r[n][k]` for `0 <= n <= nmax`; row `n` has length `max k + 1`.
    pub fn cluster_numbers_upto(&self, nmax: usize) -> Result<Vec<Vec<BigUint>>> {
        let mut rows = Vec::with_capacity(nmax + 1);
        for n in 0..=nmax {
            let mut row: Vec<BigUint> = Vec::new();
            for set in feasible_marks_with(&self.overlap, self.m(), n, None, self.config.max_mark_sets)? {
                let k = set.len();
                if row.len() <= k {
                    row.resize(k + 1, BigUint::zero());
                }
                row[k] += self.refined_cluster_number(n, set.marks())?;
            }
            rows.push(row);
        }
        Ok(rows)
    }

    /// Whether occurrences at `i < j` can coexist: either disjoint-or-touching
    /// windows, or a shift in the overlap set.
    fn compatible(&self, i: usize, j: usize) -> bool {
        let d = j - i;
        d >= self.m() || self.overlap.contains(d)
    }

    /// `b_{n,S}` for any `S` within `[n-m+1]`.
    pub fn b_count(&self, n: usize, marks: &[usize]) -> Result<BigUint> {
        self.check_subset(n, marks)?;
        let m = self.m();
        for (x, &i) in marks.iter().enumerate() {
            for &j in &marks[x + 1..] {
                if j - i >= m {
                    break;
                }
                if !self.compatible(i, j) {
                    return Ok(BigUint::zero());
                }
            }
        }
        let blocks = marked_blocks(marks, m);
        let lens: Vec<usize> = blocks.iter().map(|b| b.last().unwrap() - b[0] + m).collect();
        let rest = n - lens.iter().sum::<usize>();
        let mut parts = lens.clone();
        parts.push(rest);
        // n! / prod len_i!, the unmarked letters ordered freely
        let mut total = multinomial(&parts) * factorial(rest);
        for (block, &len) in blocks.iter().zip(&lens) {
            let shifted: Vec<usize> = block.iter().map(|&j| j - block[0] + 1).collect();
            let r = self.refined_cluster_number(len, &shifted)?;
            if r.is_zero() {
                return Ok(r);
            }
            total *= r;
        }
        Ok(total)
    }

    /// `a_{n,S}` by inclusion-exclusion over supersets `T` of `S`.
    pub fn a_refined(&self, n: usize, marks: &[usize]) -> Result<BigUint> {
        self.check_subset(n, marks)?;
        let m = self.m();
        if n < m {
            return Ok(if n == 0 { BigUint::one() } else { factorial(n) });
        }
        let base = self.b_count(n, marks)?;
        if base.is_zero() {
            return Ok(base);
        }
        let free: Vec<usize> = (1..=n - m + 1).filter(|i| marks.binary_search(i).is_err()).collect();
        let mut total = BigInt::from(base);
        let mut current = marks.to_vec();
        self.superset_sum(n, &free, 0, &mut current, 1, &mut total)?;
        to_count(total, || format!("a_{{{n},{marks:?}}} for {}", self.pattern))
    }

    fn superset_sum(
        &self,
        n: usize,
        free: &[usize],
        from: usize,
        current: &mut Vec<usize>,
        depth: usize,
        total: &mut BigInt,
    ) -> Result<()> {
        for idx in from..free.len() {
            let p = free[idx];
            if current.iter().any(|&q| q.abs_diff(p) < self.m() && !self.compatible(q.min(p), q.max(p))) {
                continue;
            }
            let pos = current.binary_search(&p).unwrap_err();
            current.insert(pos, p);
            let b = self.b_count(n, current)?;
            if !b.is_zero() {
                let b = BigInt::from(b);
                if depth % 2 == 1 {
                    *total -= b;
                } else {
                    *total += b;
                }
                self.superset_sum(n, free, idx + 1, current, depth + 1, total)?;
            }
            current.remove(pos);
        }
        Ok(())
    }

    /// `a_{i,0}` for `i <= n`, from the cluster-method series.
    fn avoiders_upto(&self, n: usize) -> Result<Vec<BigUint>> {
        let mut cached = self.avoiders.lock().unwrap();
        if cached.len() <= n {
            let series = gfseries::pattern_gf_with(self, n)?;
            *cached = (0..=n).map(|i| gfseries::extract_a(&series, i, 0)).collect::<Result<_>>()?;
        }
        Ok(cached[..=n].to_vec())
    }

    /// The pattern-counting series `F` up to `z^nmax`.
    pub fn pattern_series(&self, nmax: usize) -> Result<TruncatedSeries> {
        gfseries::pattern_gf_with(self, nmax)
    }

    /// `a_{n,k}`, read off the cluster-method series.
    pub fn a_count(&self, n: usize, k: usize) -> Result<BigUint> {
        let series = gfseries::pattern_gf_with(self, n)?;
        gfseries::extract_a(&series, n, k)
    }

    /// `a_{n,S}` for a non-overlapping pattern, by induction on `max S`
    /// from the avoider counts alone.
    pub fn a_nonoverlap_recursive(&self, n: usize, marks: &[usize]) -> Result<BigUint> {
        if !(self.m() >= 2 && self.overlap.is_minimal()) {
            return Err(Error::invalid(format!("{} overlaps itself; the recursion needs a non-overlapping pattern", self.pattern)));
        }
        self.check_subset(n, marks)?;
        let avoiders = self.avoiders_upto(n)?;
        let value = self.recurse(n, marks, &avoiders)?;
        to_count(value, || format!("recursive a_{{{n},{marks:?}}} for {}", self.pattern))
    }

    fn recurse(&self, n: usize, marks: &[usize], avoiders: &[BigUint]) -> Result<BigInt> {
        let m = self.m();
        let Some((&l, rest)) = marks.split_last() else {
            return Ok(BigInt::from(avoiders[n].clone()));
        };
        if n < l + m - 1 || marks.windows(2).any(|w| w[1] - w[0] < m - 1) {
            return Ok(BigInt::zero());
        }
        let key = (n, marks.to_vec());
        if let Some(v) = self.recursive.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let mut value = BigInt::from(binomial(n, l))
            * self.recurse(l, rest, avoiders)?
            * BigInt::from(avoiders[n - l].clone());
        value -= self.recurse(n, rest, avoiders)?;
        let mut with_j = rest.to_vec();
        for j in (l + 2).saturating_sub(m).max(1)..l {
            with_j.push(j);
            value -= self.recurse(n, &with_j, avoiders)?;
            with_j.pop();
        }
        self.recursive.lock().unwrap().insert(key, value.clone());
        Ok(value)
    }
}

fn to_count(value: BigInt, what: impl FnOnce() -> String) -> Result<BigUint> {
    match value.sign() {
        Sign::Minus => Err(Error::Internal(format!("{} came out negative: {value}", what()))),
        _ => Ok(value.magnitude().clone()),
    }
}

/// Maximal runs of `marks` whose consecutive gaps are below `m`, i.e. blocks
/// of overlapping occurrences.
pub fn marked_blocks(marks: &[usize], m: usize) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for &i in marks {
        match blocks.last_mut() {
            Some(b) if i - b.last().unwrap() < m => b.push(i),
            _ => blocks.push(vec![i]),
        }
    }
    blocks
}

pub fn refined_cluster_number(pattern: &Permutation, n: usize, marks: &[usize]) -> Result<BigUint> {
    ClusterEngine::new(pattern).refined_cluster_number(n, marks)
}

pub fn cluster_number(pattern: &Permutation, n: usize, k: usize) -> Result<BigUint> {
    ClusterEngine::new(pattern).cluster_number(n, k)
}

pub fn b_count(pattern: &Permutation, n: usize, marks: &[usize]) -> Result<BigUint> {
    ClusterEngine::new(pattern).b_count(n, marks)
}

pub fn a_refined(pattern: &Permutation, n: usize, marks: &[usize]) -> Result<BigUint> {
    ClusterEngine::new(pattern).a_refined(n, marks)
}

pub fn a_count(pattern: &Permutation, n: usize, k: usize) -> Result<BigUint> {
    ClusterEngine::new(pattern).a_count(n, k)
}

pub fn a_nonoverlap_recursive(pattern: &Permutation, n: usize, marks: &[usize]) -> Result<BigUint> {
    ClusterEngine::new(pattern).a_nonoverlap_recursive(n, marks)
}
