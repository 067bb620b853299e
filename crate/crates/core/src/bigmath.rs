//! Exact factorials, binomials and multinomials, plus natural logarithms
//! of big integers accurate to double precision.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

pub fn factorial(n: usize) -> BigUint {
    (2..=n as u64).fold(BigUint::one(), |acc, i| acc * i)
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= (n - i) as u64;
        acc /= (i + 1) as u64;
    }
    acc
}

/// `(Σ parts)! / Π parts!`.
pub fn multinomial(parts: &[usize]) -> BigUint {
    let mut total = 0;
    let mut acc = BigUint::one();
    for &p in parts {
        total += p;
        acc *= binomial(total, p);
    }
    acc
}

/// Table of binomial coefficients `C(i, j)` for `0 <= j <= i <= n`.
pub struct BinomialTable {
    rows: Vec<Vec<BigUint>>,
}

impl BinomialTable {
    pub fn new(n: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut row = vec![BigUint::one(); i + 1];
            for j in 1..i {
                row[j] = &rows[i - 1][j - 1] + &rows[i - 1][j];
            }
            rows.push(row);
        }
        BinomialTable { rows }
    }

    pub fn get(&self, n: usize, k: usize) -> BigUint {
        if k > n {
            BigUint::zero()
        } else {
            self.rows[n][k].clone()
        }
    }

    pub fn get_ref(&self, n: usize, k: usize) -> Option<&BigUint> {
        self.rows.get(n).and_then(|r| r.get(k))
    }
}

/// Natural log of a positive integer. The top 64 bits are converted to
/// `f64` and the shifted-out bit count is added back as a multiple of
/// `ln 2`, so the relative error stays at machine precision for any size.
pub fn ln_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "ln of zero");
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64 bits");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Serializes a count as a decimal string, so no JSON reader rounds it.
pub fn ser_decimal<S: serde::Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}
