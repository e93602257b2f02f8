//! Binomial coefficients: exact in integers while they fit, logarithmic beyond.

/// Largest `n` for which every `C(n, k)` is evaluated exactly.
pub const EXACT_LIMIT: usize = 64;

/// Exact `C(n, k)`; `None` if `k > n` or the value overflows `u128`.
pub fn binomial_exact(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return None;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `ln C(n, k)` as a sum of logarithms; `-inf` when `k > n`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum()
}

/// `C(n, k)` as a float. Exact up to rounding of the final value for
/// `n <= EXACT_LIMIT`, via `exp(ln C)` otherwise. Zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= EXACT_LIMIT {
        if let Some(v) = binomial_exact(n, k) {
            return v as f64;
        }
    }
    ln_binomial(n, k).exp()
}
