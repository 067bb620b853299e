//! Exact linear-extension counting.
//!
//! The generic counter walks the lattice of downsets one rank at a time,
//! keeping only the current frontier. Connected components are counted
//! separately and recombined with a multinomial. Posets shaped like a
//! spine with pendant chains (every non-overlapping cluster poset, and the
//! bounding posets built from them) go through [`SpinePoset::count`], which
//! is polynomial in the size.

use std::collections::HashMap;
use std::ops::AddAssign;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{ClusterPoset, CountConfig};
use crate::bigmath::{binomial, multinomial, BinomialTable};
use crate::error::Budget;
use crate::{Error, Result};

pub fn count_linear_extensions(poset: &ClusterPoset) -> Result<BigUint> {
    count_linear_extensions_with(poset, &CountConfig::default())
}

pub fn count_linear_extensions_with(poset: &ClusterPoset, config: &CountConfig) -> Result<BigUint> {
    let comps = poset.components();
    let mut states = 0u64;
    if comps.len() == 1 {
        return count_connected(poset, config, &mut states);
    }
    let sizes: Vec<usize> = comps.iter().map(Vec::len).collect();
    let mut total = multinomial(&sizes);
    for members in &comps {
        if members.len() == 1 {
            continue;
        }
        total *= count_connected(&poset.induced(members), config, &mut states)?;
    }
    Ok(total)
}

fn count_connected(poset: &ClusterPoset, config: &CountConfig, states: &mut u64) -> Result<BigUint> {
    let n = poset.size();
    if n <= 1 || poset.is_chain() {
        return Ok(BigUint::one());
    }
    // Intermediate counts are extension counts of sub-posets, bounded by n!,
    // and 34! < 2^128.
    if n <= 34 {
        return downset_dp::<1, u128>(poset, config, states).map(BigUint::from);
    }
    match n {
        0..=64 => downset_dp::<1, BigUint>(poset, config, states),
        65..=128 => downset_dp::<2, BigUint>(poset, config, states),
        129..=256 => downset_dp::<4, BigUint>(poset, config, states),
        _ => Err(Error::Resource { budget: Budget::PosetSize, limit: 256 }),
    }
}

type Mask<const W: usize> = [u64; W];

#[inline]
fn contains_all<const W: usize>(set: &Mask<W>, sub: &Mask<W>) -> bool {
    set.iter().zip(sub).all(|(s, x)| x & !s == 0)
}

fn downset_dp<const W: usize, C>(poset: &ClusterPoset, config: &CountConfig, states: &mut u64) -> Result<C>
where
    C: Clone + Zero + One + for<'a> AddAssign<&'a C>,
{
    let n = poset.size();
    let preds: Vec<Mask<W>> = (0..n)
        .map(|v| {
            let mut mask = [0u64; W];
            for &u in poset.lower_covers(v) {
                mask[u / 64] |= 1 << (u % 64);
            }
            mask
        })
        .collect();
    let mut layer: HashMap<Mask<W>, C> = HashMap::new();
    layer.insert([0u64; W], C::one());
    for _ in 0..n {
        let mut next: HashMap<Mask<W>, C> = HashMap::with_capacity(layer.len() * 2);
        for (mask, count) in &layer {
            for v in 0..n {
                if mask[v / 64] >> (v % 64) & 1 == 1 || !contains_all(mask, &preds[v]) {
                    continue;
                }
                let mut succ = *mask;
                succ[v / 64] |= 1 << (v % 64);
                next.entry(succ).or_insert_with(C::zero).add_assign(count);
            }
        }
        *states += next.len() as u64;
        if *states > config.max_states {
            return Err(Error::Resource { budget: Budget::DownsetStates, limit: config.max_states });
        }
        layer = next;
    }
    let (_, total) = layer.into_iter().next().expect("the full set is the only top downset");
    Ok(total)
}

/// A chain hanging off spine node `at` (1-based): `below` elements under
/// it and `above` elements over it, each forming a chain through the node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pendant {
    pub at: usize,
    pub below: usize,
    pub above: usize,
}

/// A chain `c_1 < ... < c_L` with pendant chains attached at spine nodes,
/// plus free chains unrelated to anything else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinePoset {
    spine_len: usize,
    pendants: Vec<Pendant>,
    free_chains: Vec<usize>,
}

impl SpinePoset {
    pub fn new(spine_len: usize, mut pendants: Vec<Pendant>, free_chains: Vec<usize>) -> Result<Self> {
        if spine_len == 0 {
            return Err(Error::invalid("spine must be non-empty"));
        }
        if let Some(p) = pendants.iter().find(|p| p.at == 0 || p.at > spine_len) {
            return Err(Error::invalid(format!("pendant at {} off a spine of {spine_len}", p.at)));
        }
        pendants.sort_by_key(|p| p.at);
        Ok(SpinePoset { spine_len, pendants, free_chains })
    }

    fn check_params(m: usize, a: usize, b: usize, k: usize) -> Result<()> {
        if !(1 <= a && a < b && b <= m && a + b <= m + 1 && k >= 1) {
            return Err(Error::invalid(format!(
                "need 1 <= a < b <= m, a+b <= m+1, k >= 1; got m={m}, a={a}, b={b}, k={k}"
            )));
        }
        Ok(())
    }

    fn spine_len_for(m: usize, a: usize, b: usize, k: usize) -> usize {
        1 + k * (m - 1) - (k - 1) * (m - b + a - 1)
    }

    fn attachment(b: usize, a: usize, i: usize) -> usize {
        b + (i - 1) * (b - a)
    }

    /// `P_k` for a pattern with first letter `a` and last letter `b`: spine
    /// of `b+(k-2)(b-a)+m-a` nodes, chain `D_i` meeting it at its
    /// `(b+(i-1)(b-a))`-th node with `a-1` nodes below and `m-b` above.
    pub fn nonoverlapping(m: usize, a: usize, b: usize, k: usize) -> Result<Self> {
        Self::check_params(m, a, b, k)?;
        let pendants = (1..k)
            .map(|i| Pendant { at: Self::attachment(b, a, i), below: a - 1, above: m - b })
            .collect();
        Self::new(Self::spine_len_for(m, a, b, k), pendants, Vec::new())
    }

    /// `P_k` with every relation between the lower parts of the `D_i` and
    /// the rest removed; has at least as many extensions.
    pub fn upper_relaxation(m: usize, a: usize, b: usize, k: usize) -> Result<Self> {
        Self::check_params(m, a, b, k)?;
        let pendants = (1..k)
            .map(|i| Pendant { at: Self::attachment(b, a, i), below: 0, above: m - b })
            .collect();
        let free = if a > 1 { vec![a - 1; k - 1] } else { Vec::new() };
        Self::new(Self::spine_len_for(m, a, b, k), pendants, free)
    }

    /// `P_k` with the lower parts of all `D_i` forced below the `b`-th spine
    /// node; has at most as many extensions.
    pub fn lower_tightening(m: usize, a: usize, b: usize, k: usize) -> Result<Self> {
        Self::check_params(m, a, b, k)?;
        let mut pendants: Vec<Pendant> = (1..k)
            .map(|i| Pendant { at: Self::attachment(b, a, i), below: 0, above: m - b })
            .collect();
        pendants.extend((1..k).map(|_| Pendant { at: b, below: a - 1, above: 0 }));
        Self::new(Self::spine_len_for(m, a, b, k), pendants, Vec::new())
    }

    pub fn size(&self) -> usize {
        self.spine_len
            + self.pendants.iter().map(|p| p.below + p.above).sum::<usize>()
            + self.free_chains.iter().sum::<usize>()
    }

    /// Exact count by a left-to-right pass over the spine. The state is
    /// `h[p]`: extensions of everything absorbed so far with the current
    /// spine node at position `p`.
    pub fn count(&self) -> BigUint {
        let total_size = self.size();
        let binom = BinomialTable::new(total_size);
        let mut h: Vec<BigUint> = vec![BigUint::zero(), BigUint::one()];
        let mut size = 1;
        let mut pend = self.pendants.iter().peekable();
        for node in 1..=self.spine_len {
            if node > 1 {
                // new spine node above the previous one: g[r] = sum_{p<r} h[p]
                let mut g = vec![BigUint::zero(); size + 2];
                let mut acc = BigUint::zero();
                for r in 1..=size + 1 {
                    acc += &h[r - 1];
                    g[r] = acc.clone();
                }
                h = g;
                size += 1;
            }
            while let Some(p) = pend.next_if(|p| p.at == node) {
                if p.below > 0 {
                    let x = p.below;
                    let mut g = vec![BigUint::zero(); size + x + 1];
                    for pos in 1..=size {
                        if !h[pos].is_zero() {
                            g[pos + x] = &h[pos] * binom.get_ref(pos + x - 1, x).unwrap();
                        }
                    }
                    h = g;
                    size += x;
                }
                if p.above > 0 {
                    let y = p.above;
                    let mut g = vec![BigUint::zero(); size + y + 1];
                    for pos in 1..=size {
                        if !h[pos].is_zero() {
                            g[pos] = &h[pos] * binom.get_ref(size - pos + y, y).unwrap();
                        }
                    }
                    h = g;
                    size += y;
                }
            }
        }
        let mut total: BigUint = h.iter().sum();
        for &len in &self.free_chains {
            total *= binomial(size + len, len);
            size += len;
        }
        debug_assert_eq!(size, total_size);
        total
    }

    /// The same poset as an explicit [`ClusterPoset`]: spine first, then
    /// each pendant's lower and upper elements, then the free chains.
    pub fn to_poset(&self) -> Result<ClusterPoset> {
        let mut chains = vec![(0..self.spine_len).collect::<Vec<_>>()];
        let mut next = self.spine_len;
        let mut fresh = |len: usize| {
            let v: Vec<usize> = (next..next + len).collect();
            next += len;
            v
        };
        for p in &self.pendants {
            let mut c = fresh(p.below);
            c.push(p.at - 1);
            c.extend(fresh(p.above));
            chains.push(c);
        }
        for &len in &self.free_chains {
            chains.push(fresh(len));
        }
        ClusterPoset::from_chains(self.size(), chains)
    }
}
