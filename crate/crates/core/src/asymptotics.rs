//! Non-overlapping constructions and exact bounds on their cluster numbers.
//!
//! For a non-overlapping pattern in standard form with `pi_1 = a`,
//! `pi_m = b`, the k-mark cluster number `r_k = r_{1+k(m-1),k}` is the
//! number of linear extensions of the spine poset `P_k`. Dropping the
//! relations below each pendant chain gives `u_k = s_k q_k >= r_k`; pushing
//! those chains under spine node `b` gives `l_k = t_k q_k <= r_k`.

use std::io::Write;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::bigmath::{binomial, factorial, ln_biguint, ser_decimal};
use crate::clusterposet::{build_poset, count_linear_extensions, MarkSet, SpinePoset};
use crate::permcore::{overlap_set, to_standard_form, Permutation};
use crate::{Error, Result};

/// `a, a+1, ..., b-1, b+1, ..., m-1, 1, ..., a-1, m, b`: non-overlapping,
/// first letter `a`, last letter `b`.
pub fn nonoverlap_construct(m: usize, a: usize, b: usize) -> Result<Permutation> {
    if !(1 <= a && a < b && b < m && a + b <= m + 1) {
        return Err(Error::invalid(format!("need 1 <= a < b < m and a+b <= m+1; got m={m}, a={a}, b={b}")));
    }
    let word: Vec<usize> = (a..b).chain(b + 1..m).chain(1..a).chain([m, b]).collect();
    let p = Permutation::new(word)?;
    // the one small exception is (4, 2, 3) -> 2143
    if !overlap_set(&p)?.is_minimal() {
        return Err(Error::invalid(format!("construction for m={m}, a={a}, b={b} gives {p}, which overlaps itself")));
    }
    Ok(p)
}

fn check_bound_params(m: usize, a: usize, b: usize, k: usize) -> Result<()> {
    if !(1 <= a && a < b && b <= m && a + b <= m + 1 && k >= 2) {
        return Err(Error::invalid(format!(
            "need 1 <= a < b <= m, a+b <= m+1, k >= 2; got m={m}, a={a}, b={b}, k={k}"
        )));
    }
    Ok(())
}

/// `(1+k(m-1))! / ((a-1)!^(k-1) (a+k(m-a))!)`.
pub fn bound_s(m: usize, a: usize, b: usize, k: usize) -> Result<BigUint> {
    check_bound_params(m, a, b, k)?;
    let denom = factorial(a - 1).pow((k - 1) as u32) * factorial(a + k * (m - a));
    Ok(factorial(1 + k * (m - 1)) / denom)
}

/// `prod_{i=1}^{k-1} C(i(m-a)+m-b, m-b)`.
pub fn bound_q(m: usize, a: usize, b: usize, k: usize) -> Result<BigUint> {
    check_bound_params(m, a, b, k)?;
    Ok((1..k).map(|i| binomial(i * (m - a) + m - b, m - b)).product())
}

/// `(b-1+(k-1)(a-1))! / ((b-1)! (a-1)!^(k-1))`.
pub fn bound_t(m: usize, a: usize, b: usize, k: usize) -> Result<BigUint> {
    check_bound_params(m, a, b, k)?;
    let denom = factorial(b - 1) * factorial(a - 1).pow((k - 1) as u32);
    Ok(factorial(b - 1 + (k - 1) * (a - 1)) / denom)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundTriple {
    pub k: usize,
    #[serde(serialize_with = "ser_decimal")]
    pub lower: BigUint,
    #[serde(serialize_with = "ser_decimal")]
    pub actual: BigUint,
    #[serde(serialize_with = "ser_decimal")]
    pub upper: BigUint,
    #[serde(serialize_with = "ser_decimal")]
    pub s: BigUint,
    #[serde(serialize_with = "ser_decimal")]
    pub q: BigUint,
    #[serde(serialize_with = "ser_decimal")]
    pub t: BigUint,
}

fn triple(m: usize, a: usize, b: usize, k: usize) -> Result<BoundTriple> {
    let (s, q, t) = (bound_s(m, a, b, k)?, bound_q(m, a, b, k)?, bound_t(m, a, b, k)?);
    let lower = &t * &q;
    let upper = &s * &q;
    let actual = SpinePoset::nonoverlapping(m, a, b, k)?.count();
    // the closed forms must count the relaxed and tightened posets exactly
    let relaxed = SpinePoset::upper_relaxation(m, a, b, k)?.count();
    let tightened = SpinePoset::lower_tightening(m, a, b, k)?.count();
    if relaxed != upper || tightened != lower {
        return Err(Error::Internal(format!(
            "bound formulas disagree with their posets at m={m}, a={a}, b={b}, k={k}"
        )));
    }
    if !(lower <= actual && actual <= upper) {
        return Err(Error::Internal(format!(
            "sandwich violated at m={m}, a={a}, b={b}, k={k}: {lower} <= {actual} <= {upper}"
        )));
    }
    Ok(BoundTriple { k, lower, actual, upper, s, q, t })
}

/// `l_k <= r_k <= u_k` for `k = 2..=kmax`, in order of `k`.
pub fn sandwich_check(m: usize, a: usize, b: usize, kmax: usize) -> Result<Vec<BoundTriple>> {
    check_bound_params(m, a, b, 2)?;
    (2..=kmax).into_par_iter().map(|k| triple(m, a, b, k)).collect()
}

/// `(m, a, b)` of the standard form of a non-overlapping pattern.
fn standard_params(pattern: &Permutation) -> Result<(usize, usize, usize)> {
    if !overlap_set(pattern)?.is_minimal() {
        return Err(Error::invalid(format!("{pattern} overlaps itself")));
    }
    let (std, _) = to_standard_form(pattern)?;
    Ok((std.len(), std.first(), std.last()))
}

/// One point of the `N_k` curve with its sandwich images.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NkPoint {
    pub k: usize,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `x^(1/k) / k^e` through logarithms.
fn scaled_root(x: &BigUint, k: usize, e: usize) -> f64 {
    (ln_biguint(x) / k as f64 - e as f64 * (k as f64).ln()).exp()
}

/// `N_k = r_k^(1/k) / k^(m-b+a-1)` for `k = 2..=kmax`, where `(a, b)` are
/// the end letters of the pattern's standard form.
pub fn nk_sequence(pattern: &Permutation, kmax: usize) -> Result<Vec<NkPoint>> {
    let (m, a, b) = standard_params(pattern)?;
    let e = m - b + a - 1;
    Ok(sandwich_check(m, a, b, kmax)?
        .into_iter()
        .map(|t| NkPoint {
            k: t.k,
            value: scaled_root(&t.actual, t.k, e),
            lower: scaled_root(&t.lower, t.k, e),
            upper: scaled_root(&t.upper, t.k, e),
        })
        .collect())
}

/// `x` to 12 significant digits, positional notation.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let decimals = (11 - x.abs().log10().floor() as i64).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Writes `k,N_k,lower_bound,upper_bound,pattern,a,b` rows.
pub fn write_nk_csv(out: &mut impl Write, pattern: &Permutation, points: &[NkPoint]) -> Result<()> {
    let (_, a, b) = standard_params(pattern)?;
    writeln!(out, "k,N_k,lower_bound,upper_bound,pattern,a,b")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{a},{b}",
            p.k,
            format_sig12(p.value),
            format_sig12(p.lower),
            format_sig12(p.upper),
            pattern.to_compact()
        )?;
    }
    Ok(())
}

/// How well `log r_k / (k log k)` pins down `pi_m - pi_1` at one `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryReport {
    pub k: usize,
    /// `log l_k / (k log k)`, `log r_k / (k log k)`, `log u_k / (k log k)`.
    pub log_lower: f64,
    pub log_actual: f64,
    pub log_upper: f64,
    /// Exact integer check `l_k <= r_k <= u_k`.
    pub contains_actual: bool,
    /// Interval for `pi_m - pi_1` implied by the sandwich: `m-1` minus the
    /// upper and lower rates.
    pub difference_low: f64,
    pub difference_high: f64,
    /// Integers inside `[difference_low, difference_high]`.
    pub integer_bracket: Vec<usize>,
    pub estimate: f64,
    pub true_difference: usize,
    pub bracket_contains_true: bool,
    pub rounded_estimate_matches: bool,
}

pub fn recover_difference(pattern: &Permutation, kmax: usize) -> Result<RecoveryReport> {
    let (m, a, b) = standard_params(pattern)?;
    if kmax < 2 {
        return Err(Error::invalid("recovery needs kmax >= 2"));
    }
    let t = triple(m, a, b, kmax)?;
    let k = kmax as f64;
    let rate = |x: &BigUint| ln_biguint(x) / (k * k.ln());
    let (log_lower, log_actual, log_upper) = (rate(&t.lower), rate(&t.actual), rate(&t.upper));
    let top = (m - 1) as f64;
    let difference_low = top - log_upper;
    let difference_high = top - log_lower;
    // a hair of slack against rounding in the logarithms
    const SLACK: f64 = 1e-9;
    let lo = (difference_low - SLACK).ceil().max(0.0) as usize;
    let hi = (difference_high + SLACK).floor().max(0.0) as usize;
    let integer_bracket: Vec<usize> = (lo..=hi).filter(|&d| d as f64 >= difference_low - SLACK).collect();
    let estimate = top - log_actual;
    let true_difference = b - a;
    Ok(RecoveryReport {
        k: kmax,
        log_lower,
        log_actual,
        log_upper,
        contains_actual: t.lower <= t.actual && t.actual <= t.upper,
        difference_low,
        difference_high,
        bracket_contains_true: integer_bracket.contains(&true_difference),
        integer_bracket,
        estimate,
        true_difference,
        rounded_estimate_matches: estimate.round() == true_difference as f64,
    })
}

/// `r_{2m-1,2}` for the construction with letters `(a, a+1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diff1Row {
    pub m: usize,
    pub a: usize,
    pub pattern: Permutation,
    #[serde(serialize_with = "ser_decimal")]
    pub r2: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diff1Report {
    pub rows: Vec<Diff1Row>,
    /// Lengths where `r_{2m-1,2}` fails to decrease strictly in `a`.
    pub violations: Vec<usize>,
}

impl Diff1Report {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every `5 <= m <= mmax`, compares the two-mark cluster numbers of the
/// constructions with `pi_m - pi_1 = 1`, counted on explicit cluster posets.
pub fn diff1_check(mmax: usize) -> Result<Diff1Report> {
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for m in 5..=mmax {
        let mut prev: Option<BigUint> = None;
        for a in 1.. {
            let b = a + 1;
            if b >= m || a + b > m + 1 {
                break;
            }
            let pattern = nonoverlap_construct(m, a, b)?;
            let poset = build_poset(&pattern, &MarkSet::chained(2, m))?;
            let r2 = count_linear_extensions(&poset)?;
            if prev.as_ref().is_some_and(|p| *p <= r2) && !violations.contains(&m) {
                violations.push(m);
            }
            prev = Some(r2.clone());
            rows.push(Diff1Row { m, a, pattern, r2 });
        }
    }
    Ok(Diff1Report { rows, violations })
}
