//! Field abstraction shared by the floating and exact (rational) code paths,
//! plus a small dense determinant that works for both.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, ToPrimitive};

pub trait Scalar: Clone + Debug + Num + Neg<Output = Self> + FromPrimitive {
    /// Size used for pivot selection only.
    fn magnitude(&self) -> f64;

    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer fits the scalar type")
    }
}

impl Scalar for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Scalar for BigRational {
    fn magnitude(&self) -> f64 {
        self.to_f64().map(f64::abs).unwrap_or(f64::INFINITY)
    }
}

impl Scalar for Complex<BigRational> {
    fn magnitude(&self) -> f64 {
        self.re.magnitude() + self.im.magnitude()
    }
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Determinant by Gaussian elimination, pivoting on the largest non-zero
/// entry of each column. Exact for `BigRational`.
pub fn determinant<T: Scalar>(mut rows: Vec<Vec<T>>) -> T {
    let n = rows.len();
    let mut det = T::one();
    for col in 0..n {
        let pivot = (col..n).filter(|&r| !rows[r][col].is_zero()).max_by(|&a, &b| {
            rows[a][col]
                .magnitude()
                .partial_cmp(&rows[b][col].magnitude())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let Some(pivot) = pivot else {
            return T::zero();
        };
        if pivot != col {
            rows.swap(pivot, col);
            det = -det;
        }
        let p = rows[col][col].clone();
        det = det * p.clone();
        for r in (col + 1)..n {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone() / p.clone();
            for c in col..n {
                let delta = factor.clone() * rows[col][c].clone();
                rows[r][c] = rows[r][c].clone() - delta;
            }
        }
    }
    det
}

/// Determinant of the given floating-point entries evaluated without
/// rounding error: every entry is converted to the rational it represents,
/// eliminated exactly, and the result rounded once. Suited to moderately
/// sized matrices whose elimination in floating point cancels badly.
pub fn determinant_exact(rows: &[Vec<Complex64>]) -> Complex64 {
    let to_rational = |x: f64| BigRational::from_float(x).expect("finite matrix entry");
    let exact = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|z| Complex::new(to_rational(z.re), to_rational(z.im)))
                .collect()
        })
        .collect();
    let det: Complex<BigRational> = determinant(exact);
    Complex64::new(det.re.to_f64().unwrap_or(f64::NAN), det.im.to_f64().unwrap_or(f64::NAN))
}

/// Neumaier-compensated sum of complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let (sum, comp) = *acc;
    let t = sum + x;
    let c = if sum.abs() >= x.abs() {
        (sum - t) + x
    } else {
        (x - t) + sum
    };
    *acc = (t, comp + c);
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}
