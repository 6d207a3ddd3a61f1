//! Young diagrams and the box products built on them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Integer partition stored as its non-zero parts in weakly decreasing order.
///
/// Parts past the length are implicit zeros; `part(i)` returns 0 for them.
/// Serializes as a JSON array of parts, the empty partition as `[]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "partition parts must be positive: {parts:?}"
            )));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(format!(
                "partition parts must be weakly decreasing: {parts:?}"
            )));
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// |λ|
    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// l(λ)
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// λ_i with 1-based `i`; zero beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        assert!(i >= 1, "rows are 1-based");
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    /// λ′ with λ′_j = #{i : λ_i ≥ j}.
    pub fn conjugate(&self) -> Partition {
        let width = self.parts.first().copied().unwrap_or(0);
        let parts = (1..=width)
            .map(|j| self.parts.iter().take_while(|&&p| p >= j).count() as u32)
            .collect();
        Partition { parts }
    }

    /// Boxes (i, j), 1-based, row by row.
    pub fn boxes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| (1..=p as usize).map(move |c| (r + 1, c)))
    }

    /// First `count` points λ_i − 2i of the configuration D₂(λ).
    pub fn descent_set_d2(&self, count: usize) -> Vec<i64> {
        (1..=count).map(|i| self.part(i) as i64 - 2 * i as i64).collect()
    }

    /// Whether x ∈ D₂(λ) = {λ_i − 2i : i ≥ 1}.
    pub fn d2_contains(&self, x: i64) -> bool {
        let l = self.len() as i64;
        // rows past l(λ) contribute every even number ≤ −2(l+1)
        if x <= -2 * (l + 1) && x % 2 == 0 {
            return true;
        }
        self.parts
            .iter()
            .enumerate()
            .any(|(r, &p)| p as i64 - 2 * (r as i64 + 1) == x)
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of `n` in reverse lexicographic order, starting from (n)
/// and ending at (1,…,1).
///
/// Memory grows like p(n); n ≤ 60 (about a million partitions) is the
/// practical range.
pub fn enumerate_partitions(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(Partition::empty());
        return out;
    }
    let mut current = vec![n];
    loop {
        out.push(Partition { parts: current.clone() });
        // rightmost part that can be split
        let Some(k) = current.iter().rposition(|&p| p > 1) else {
            break;
        };
        let mut rest: u32 = current[k + 1..].iter().sum::<u32>() + 1;
        let value = current[k] - 1;
        current.truncate(k);
        current.push(value);
        while rest > 0 {
            let next = rest.min(value);
            current.push(next);
            rest -= next;
        }
    }
    out
}

/// Every partition with at most `max_size` boxes, grouped by size.
pub fn partitions_up_to(max_size: u32) -> Vec<Vec<Partition>> {
    (0..=max_size).map(enumerate_partitions).collect()
}

/// (H(λ,θ), H′(λ,θ)): products over boxes of arm + leg·θ + 1 and
/// arm + leg·θ + θ.
pub fn hook_products<T: Scalar>(lambda: &Partition, theta: &T) -> (T, T) {
    let conj = lambda.conjugate();
    let mut h = T::one();
    let mut h_prime = T::one();
    for (i, j) in lambda.boxes() {
        let arm = T::from_int(lambda.part(i) as i64 - j as i64);
        let leg = T::from_int(conj.part(j) as i64 - i as i64);
        let base = arm + leg * theta.clone();
        h = h * (base.clone() + T::one());
        h_prime = h_prime * (base + theta.clone());
    }
    (h, h_prime)
}

/// (ln H, ln H′) for real θ > 0; avoids overflow on large diagrams.
pub fn log_hook_products(lambda: &Partition, theta: f64) -> (f64, f64) {
    let conj = lambda.conjugate();
    lambda.boxes().fold((0.0, 0.0), |(lh, lhp), (i, j)| {
        let arm = lambda.part(i) as f64 - j as f64;
        let leg = conj.part(j) as f64 - i as f64;
        let base = arm + leg * theta;
        (lh + (base + 1.0).ln(), lhp + (base + theta).ln())
    })
}

/// Rising factorial (x)_n = x(x+1)…(x+n−1).
pub fn rising_factorial<T: Scalar>(x: &T, n: u32) -> T {
    (0..n).fold(T::one(), |acc, k| acc * (x.clone() + T::from_int(k as i64)))
}

/// (z)_{λ,θ} = ∏_i (z − (i−1)θ)_{λ_i}.
pub fn generalized_pochhammer<T: Scalar>(z: &T, lambda: &Partition, theta: &T) -> T {
    lambda.parts().iter().enumerate().fold(T::one(), |acc, (r, &p)| {
        let shifted = z.clone() - T::from_int(r as i64) * theta.clone();
        acc * rising_factorial(&shifted, p)
    })
}
