//! The antisymmetric matrix Υ, inverse of the difference matrix
//! D_{k,m} = δ_{k+1,m} − δ_{k,m+1}, and its bilinear forms.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Υ(k, m) for k, m ≥ 1: −1 when k is odd, m even and m > k; +1 when k is
/// even, m odd and m < k; 0 otherwise. Index 0 (used by the D·Υ identity)
/// gives 0.
pub fn upsilon(k: u64, m: u64) -> i8 {
    if k == 0 || m == 0 {
        return 0;
    }
    match (k % 2, m % 2) {
        (1, 0) if m > k => -1,
        (0, 1) if m < k => 1,
        _ => 0,
    }
}

/// D_{k,m} = δ_{k+1,m} − δ_{k,m+1}.
pub fn difference_entry(k: u64, m: u64) -> i8 {
    (k + 1 == m) as i8 - (k == m + 1) as i8
}

/// Σ_{k,m=1}^{K} a_k Υ(k,m) b_m with `a[0]`, `b[0]` holding index 1.
///
/// Uses the row structure of Υ: odd rows pair with the suffix of even
/// columns, even rows with the prefix of odd columns. O(K).
pub fn upsilon_form(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let len = a.len().min(b.len());
    // suffix sums over even indices (1-based) and prefix sums over odd ones
    let mut even_suffix = vec![Complex64::new(0.0, 0.0); len + 2];
    for idx in (1..=len).rev() {
        even_suffix[idx] = even_suffix[idx + 1]
            + if idx % 2 == 0 {
                b[idx - 1]
            } else {
                Complex64::new(0.0, 0.0)
            };
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut odd_prefix = Complex64::new(0.0, 0.0);
    for idx in 1..=len {
        if idx % 2 == 1 {
            total -= a[idx - 1] * even_suffix[idx + 1];
            odd_prefix += b[idx - 1];
        } else {
            // odd m < idx: all odd indices seen so far
            total += a[idx - 1] * odd_prefix;
        }
    }
    total
}

/// Truncated Σ_{k,m=1}^{K} Υ(k,m) w1^{−k} w2^{−m}.
pub fn upsilon_bilinear(w1: Complex64, w2: Complex64, truncation: usize) -> Result<Complex64> {
    check_outside_unit_disk(w1, w2)?;
    let powers = |w: Complex64| -> Vec<Complex64> {
        let inv = w.inv();
        std::iter::successors(Some(inv), |p| Some(p * inv))
            .take(truncation)
            .collect()
    };
    Ok(upsilon_form(&powers(w1), &powers(w2)))
}

/// w1 w2 (w2 − w1) / ((w1 w2 − 1)(w1² − 1)(w2² − 1)), the sum of the full
/// series for |w1|, |w2| > 1.
pub fn upsilon_bilinear_closed(w1: Complex64, w2: Complex64) -> Result<Complex64> {
    check_outside_unit_disk(w1, w2)?;
    Ok(w1 * w2 * (w2 - w1) / ((w1 * w2 - 1.0) * (w1 * w1 - 1.0) * (w2 * w2 - 1.0)))
}

fn check_outside_unit_disk(w1: Complex64, w2: Complex64) -> Result<()> {
    if w1.norm() <= 1.0 || w2.norm() <= 1.0 {
        return Err(Error::Domain(format!(
            "Υ generating series needs |w1|, |w2| > 1, got {} and {}",
            w1.norm(),
            w2.norm()
        )));
    }
    Ok(())
}
