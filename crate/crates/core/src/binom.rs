//! Exact binomial coefficients and log-domain helpers for big integers.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// `C(n, k)` as an exact big integer (zero when `k > n`).
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// The row `C(n, 0), C(n, 1), ..., C(n, k_max)`, grown term by term with
/// `C(n, k+1) = C(n, k) (n - k) / (k + 1)`.
#[derive(Debug, Clone)]
pub struct BinomialRow {
    n: u64,
    values: Vec<BigUint>,
}

impl BinomialRow {
    pub fn new(n: u64, k_max: u64) -> Self {
        let top = k_max.min(n);
        let mut values = Vec::with_capacity(top as usize + 1);
        let mut cur = BigUint::one();
        values.push(cur.clone());
        for k in 0..top {
            cur *= n - k;
            cur /= k + 1;
            values.push(cur.clone());
        }
        Self { n, values }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `C(n, k)`; zero for `k > n`. Panics if `k` exceeds the row's `k_max`
    /// while still being `<= n`.
    pub fn get(&self, k: u64) -> &BigUint {
        static ZERO: std::sync::OnceLock<BigUint> = std::sync::OnceLock::new();
        if k > self.n {
            return ZERO.get_or_init(BigUint::zero);
        }
        &self.values[k as usize]
    }
}

/// `log2(x)` with about 52 bits of mantissa precision; `-inf` for zero.
pub fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return x.to_u64().map(|v| (v as f64).log2()).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).log2() + shift as f64
}

/// `log2(num / den)`.
pub fn log2_ratio(num: &BigUint, den: &BigUint) -> f64 {
    log2_big(num) - log2_big(den)
}

/// `num / den` as an `f64`, computed in the log domain so that huge
/// operands do not overflow.
pub fn ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    log2_ratio(num, den).exp2()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal(n: usize) -> Vec<Vec<BigUint>> {
        let mut rows: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
        for i in 1..=n {
            let prev = &rows[i - 1];
            let mut row = vec![BigUint::one(); i + 1];
            for k in 1..i {
                row[k] = &prev[k - 1] + &prev[k];
            }
            rows.push(row);
        }
        rows
    }

    #[test]
    fn matches_pascal_triangle() {
        let tri = pascal(60);
        for (n, row) in tri.iter().enumerate() {
            let br = BinomialRow::new(n as u64, n as u64 + 3);
            for (k, expected) in row.iter().enumerate() {
                assert_eq!(&binomial(n as u64, k as u64), expected);
                assert_eq!(br.get(k as u64), expected);
            }
            assert!(binomial(n as u64, n as u64 + 1).is_zero());
            assert!(br.get(n as u64 + 1).is_zero());
        }
    }

    #[test]
    fn log2_precision() {
        let x = BigUint::one() << 1000u32;
        assert!((log2_big(&x) - 1000.0).abs() < 1e-12);
        let c = binomial(389_978, 84);
        let direct: f64 = (0..84u64)
            .map(|i| ((389_978 - i) as f64).log2() - ((i + 1) as f64).log2())
            .sum();
        assert!((log2_big(&c) - direct).abs() < 1e-6);
        assert_eq!(log2_big(&BigUint::zero()), f64::NEG_INFINITY);
        assert!((ratio_f64(&BigUint::from(3u32), &BigUint::from(12u32)) - 0.25).abs() < 1e-15);
    }
}
