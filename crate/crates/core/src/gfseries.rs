//! Truncated exponential generating functions with polynomial coefficients.
//!
//! Entry `n` of a [`TruncatedSeries`] holds `n! [z^n]` of the series, a
//! polynomial in the marker variable with exact integer coefficients. Every
//! operation stays in these scaled integers; products of EGFs become
//! binomial convolutions.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::bigmath::BinomialTable;
use crate::clusterengine::ClusterEngine;
use crate::permcore::Permutation;
use crate::{Error, Result};

/// Polynomial in one variable, lowest degree first, no trailing zeros.
pub type Poly = Vec<BigInt>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<Poly>,
}

#[derive(Serialize)]
struct DegreeRecord {
    coeffs: Vec<String>,
    n: usize,
}

impl TruncatedSeries {
    /// Entries `0..=order`; missing entries are zero and trailing zero
    /// coefficients are dropped.
    pub fn new(order: usize, mut coeffs: Vec<Poly>) -> Self {
        coeffs.resize(order + 1, Poly::new());
        coeffs.iter_mut().for_each(trim);
        TruncatedSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(order, Vec::new())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Polynomial coefficient of `z^n / n!`.
    pub fn coeff(&self, n: usize) -> &[BigInt] {
        &self.coeffs[n]
    }

    /// Coefficient of `u^k z^n / n!`.
    pub fn get(&self, n: usize, k: usize) -> BigInt {
        self.coeffs.get(n).and_then(|p| p.get(k)).cloned().unwrap_or_default()
    }

    /// Every polynomial evaluated at `u`.
    pub fn evaluate(&self, u: &BigInt) -> Vec<BigInt> {
        self.coeffs
            .iter()
            .map(|p| p.iter().rev().fold(BigInt::zero(), |acc, c| acc * u + c))
            .collect()
    }

    /// `[{"coeffs": [...], "n": n}, ...]` with integers as decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        let records: Vec<DegreeRecord> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, p)| DegreeRecord { coeffs: p.iter().map(ToString::to_string).collect(), n })
            .collect();
        serde_json::to_value(records).expect("plain data serializes")
    }
}

fn trim(p: &mut Poly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Poly::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

/// `sum_k c_k (u-1)^k` expanded in powers of `u`.
fn shift_down(c: &[BigUint], binom: &BinomialTable) -> Poly {
    let mut out = vec![BigInt::zero(); c.len()];
    for (k, ck) in c.iter().enumerate() {
        if ck.is_zero() {
            continue;
        }
        let ck = BigInt::from(ck.clone());
        for (j, slot) in out.iter_mut().enumerate().take(k + 1) {
            let term = &ck * BigInt::from(binom.get(k, j));
            if (k - j) % 2 == 1 {
                *slot -= term;
            } else {
                *slot += term;
            }
        }
    }
    trim(&mut out);
    out
}

/// The cluster series `R(t, z)`: entry `n` is `sum_k r_{n,k} t^k`.
pub fn cluster_gf(pattern: &Permutation, order: usize) -> Result<TruncatedSeries> {
    cluster_gf_with(&ClusterEngine::new(pattern), order)
}

pub fn cluster_gf_with(engine: &ClusterEngine, order: usize) -> Result<TruncatedSeries> {
    let rows = engine.cluster_numbers_upto(order)?;
    let coeffs = rows.into_iter().map(|row| row.into_iter().map(BigInt::from).collect()).collect();
    Ok(TruncatedSeries::new(order, coeffs))
}

/// `F(u, z) = 1 / (1 - z - R(u-1, z))`, whose entry `n` is
/// `sum_k a_{n,k} u^k`.
pub fn pattern_gf(pattern: &Permutation, order: usize) -> Result<TruncatedSeries> {
    pattern_gf_with(&ClusterEngine::new(pattern), order)
}

pub fn pattern_gf_with(engine: &ClusterEngine, order: usize) -> Result<TruncatedSeries> {
    let rows = engine.cluster_numbers_upto(order)?;
    let binom = BinomialTable::new(order.max(rows.iter().map(Vec::len).max().unwrap_or(0)));
    let g: Vec<Poly> = rows
        .iter()
        .enumerate()
        .map(|(n, row)| {
            let mut p = shift_down(row, &binom);
            if n == 1 {
                if p.is_empty() {
                    p.push(BigInt::zero());
                }
                p[0] += 1;
                trim(&mut p);
            }
            p
        })
        .collect();
    Ok(reciprocal_of_one_minus(&g, order, &binom))
}

/// `1 / (1 - G)` for an EGF `G` with `G_0 = 0`: `f_n = sum_j C(n,j) g_j f_{n-j}`.
fn reciprocal_of_one_minus(g: &[Poly], order: usize, binom: &BinomialTable) -> TruncatedSeries {
    let mut f: Vec<Poly> = vec![vec![BigInt::one()]];
    for n in 1..=order {
        let mut acc = Poly::new();
        for j in 1..=n {
            if g[j].is_empty() || f[n - j].is_empty() {
                continue;
            }
            let mut term = poly_mul(&g[j], &f[n - j]);
            let c = BigInt::from(binom.get(n, j));
            term.iter_mut().for_each(|x| *x *= &c);
            if acc.len() < term.len() {
                acc.resize(term.len(), BigInt::zero());
            }
            for (a, t) in acc.iter_mut().zip(term) {
                *a += t;
            }
        }
        trim(&mut acc);
        f.push(acc);
    }
    TruncatedSeries::new(order, f)
}

/// `a_{n,k}`: the `u^k` coefficient of entry `n`, checked nonnegative.
pub fn extract_a(series: &TruncatedSeries, n: usize, k: usize) -> Result<BigUint> {
    if n > series.order() {
        return Err(Error::invalid(format!("degree {n} beyond series order {}", series.order())));
    }
    let c = series.get(n, k);
    match c.sign() {
        Sign::Minus => Err(Error::Internal(format!("coefficient of u^{k} z^{n}/{n}! is negative: {c}"))),
        _ => Ok(c.magnitude().clone()),
    }
}
