//! Poset isomorphism by canonical labelling: colour refinement on
//! (colour, colours below, colours above), then individualize-and-refine
//! search for the lexicographically least relation matrix.

use super::{ClusterPoset, CountConfig};
use crate::error::Budget;
use crate::{Error, Result};

/// Relation matrix of a poset under its canonical labelling, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    size: usize,
    bits: Vec<u64>,
}

impl CanonicalForm {
    pub fn size(&self) -> usize {
        self.size
    }
}

pub fn poset_isomorphic(p: &ClusterPoset, q: &ClusterPoset) -> Result<bool> {
    poset_isomorphic_with(p, q, &CountConfig::default())
}

pub fn poset_isomorphic_with(p: &ClusterPoset, q: &ClusterPoset, config: &CountConfig) -> Result<bool> {
    if p.size() != q.size() {
        return Ok(false);
    }
    if p.cover_pairs().len() != q.cover_pairs().len() {
        return Ok(false);
    }
    Ok(canonical_form(p, config)? == canonical_form(q, config)?)
}

struct Search<'a> {
    poset: &'a ClusterPoset,
    down: Vec<Vec<usize>>,
    up: Vec<Vec<usize>>,
    twin: Vec<usize>,
    best: Option<Vec<u64>>,
    leaves: u64,
    max_leaves: u64,
}

pub fn canonical_form(poset: &ClusterPoset, config: &CountConfig) -> Result<CanonicalForm> {
    let n = poset.size();
    if n > config.max_iso_size {
        return Err(Error::Resource { budget: Budget::IsomorphismSize, limit: config.max_iso_size as u64 });
    }
    let down: Vec<Vec<usize>> = (0..n).map(|v| poset.strict_down_set(v).ones().collect()).collect();
    let up: Vec<Vec<usize>> =
        (0..n).map(|v| (0..n).filter(|&w| poset.less_than(v, w)).collect()).collect();
    // u and v are twins when swapping them is an automorphism
    let mut twin = vec![0; n];
    for v in 0..n {
        twin[v] = (0..=v).find(|&u| down[u] == down[v] && up[u] == up[v]).unwrap();
    }
    let mut search = Search { poset, down, up, twin, best: None, leaves: 0, max_leaves: config.max_iso_leaves };
    let colours = search.refine(vec![0; n]);
    search.descend(colours)?;
    Ok(CanonicalForm { size: n, bits: search.best.unwrap_or_default() })
}

impl Search<'_> {
    fn refine(&self, mut colours: Vec<u32>) -> Vec<u32> {
        let n = colours.len();
        let mut distinct = count_distinct(&colours);
        loop {
            let sigs: Vec<(u32, Vec<u32>, Vec<u32>)> = (0..n)
                .map(|v| {
                    let mut d: Vec<u32> = self.down[v].iter().map(|&u| colours[u]).collect();
                    let mut u: Vec<u32> = self.up[v].iter().map(|&w| colours[w]).collect();
                    d.sort_unstable();
                    u.sort_unstable();
                    (colours[v], d, u)
                })
                .collect();
            let mut sorted: Vec<&(u32, Vec<u32>, Vec<u32>)> = sigs.iter().collect();
            sorted.sort();
            sorted.dedup();
            colours = sigs
                .iter()
                .map(|s| sorted.binary_search(&s).unwrap() as u32)
                .collect();
            let now = sorted.len();
            if now == distinct {
                return colours;
            }
            distinct = now;
        }
    }

    fn descend(&mut self, colours: Vec<u32>) -> Result<()> {
        let n = colours.len();
        let mut cells: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            cells[colours[v] as usize].push(v);
        }
        let Some(target) = cells.iter().find(|c| c.len() > 1).cloned() else {
            return self.leaf(&colours);
        };
        let mut tried_twins: Vec<usize> = Vec::new();
        for &v in &target {
            if tried_twins.contains(&self.twin[v]) {
                continue;
            }
            tried_twins.push(self.twin[v]);
            let split: Vec<u32> = (0..n)
                .map(|w| 2 * colours[w] + u32::from(colours[w] == colours[v] && w != v))
                .collect();
            let refined = self.refine(split);
            self.descend(refined)?;
        }
        Ok(())
    }

    fn leaf(&mut self, colours: &[u32]) -> Result<()> {
        self.leaves += 1;
        if self.leaves > self.max_leaves {
            return Err(Error::Resource { budget: Budget::IsomorphismLeaves, limit: self.max_leaves });
        }
        let n = colours.len();
        let mut order = vec![0; n];
        for v in 0..n {
            order[colours[v] as usize] = v;
        }
        let mut bits = vec![0u64; (n * n).div_ceil(64)];
        for (i, &u) in order.iter().enumerate() {
            for (j, &v) in order.iter().enumerate() {
                if self.poset.less_than(u, v) {
                    let idx = i * n + j;
                    bits[idx / 64] |= 1 << (63 - idx % 64);
                }
            }
        }
        if self.best.as_ref().is_none_or(|b| bits < *b) {
            self.best = Some(bits);
        }
        Ok(())
    }
}

fn count_distinct(colours: &[u32]) -> usize {
    let mut c = colours.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}
