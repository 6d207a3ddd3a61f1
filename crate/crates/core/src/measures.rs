//! z-measures with general Jack parameter, their mixtures over levels, the
//! Poissonized Plancherel limit, and the determinantal forms at θ = 2.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partitions::{generalized_pochhammer, hook_products, rising_factorial, Partition};
use crate::scalar::{determinant, determinant_exact, Scalar};
use crate::special::inverse_factorial;
use crate::specializations::Specialization;

/// Parameters (z, z′, θ) and, for mixed measures, ξ ∈ (0, 1).
///
/// Positivity of the resulting measure is not required anywhere; signed and
/// complex parameter choices are accepted as they are.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZMeasureParams {
    z: Complex64,
    z_prime: Complex64,
    theta: f64,
    xi: Option<f64>,
}

impl ZMeasureParams {
    pub fn new(z: Complex64, z_prime: Complex64, theta: f64, xi: Option<f64>) -> Result<Self> {
        if !(theta > 0.0) {
            return Err(Error::InvalidParameter(format!("theta must be positive, got {theta}")));
        }
        if let Some(xi) = xi {
            if !(xi > 0.0 && xi < 1.0) {
                return Err(Error::InvalidParameter(format!("xi must lie in (0, 1), got {xi}")));
            }
        }
        Ok(Self { z, z_prime, theta, xi })
    }

    /// The θ = 2, z′ = z − 1 family with a mixing parameter.
    pub fn theta2(z: Complex64, xi: f64) -> Result<Self> {
        Self::new(z, z - 1.0, 2.0, Some(xi))
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn z_prime(&self) -> Complex64 {
        self.z_prime
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn xi(&self) -> Option<f64> {
        self.xi
    }

    /// t = z z′ / θ
    pub fn t(&self) -> Complex64 {
        self.z * self.z_prime / self.theta
    }

    fn require_xi(&self) -> Result<f64> {
        self.xi
            .ok_or_else(|| Error::InvalidParameter("mixed measure needs xi".into()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlancherelParams {
    eta: f64,
}

impl PlancherelParams {
    pub fn new(eta: f64) -> Result<Self> {
        if eta == 0.0 || !eta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "eta must be finite and non-zero, got {eta}"
            )));
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// M^{(n)}_{z,z′,θ}(λ) = n! (z)_{λ,θ} (z′)_{λ,θ} / ((t)_n H(λ,θ) H′(λ,θ)),
/// over any scalar field. The empty diagram has mass 1.
pub fn level_measure_in<T: Scalar>(z: &T, z_prime: &T, theta: &T, lambda: &Partition) -> Result<T> {
    let n = lambda.size();
    if n == 0 {
        return Ok(T::one());
    }
    let t = z.clone() * z_prime.clone() / theta.clone();
    let t_n = rising_factorial(&t, n);
    if t_n.is_zero() {
        return Err(Error::Pole(format!("(t)_{n} vanishes for t = {t:?}")));
    }
    let n_fact = rising_factorial(&T::one(), n);
    let (h, h_prime) = hook_products(lambda, theta);
    Ok(
        n_fact * generalized_pochhammer(z, lambda, theta) * generalized_pochhammer(z_prime, lambda, theta)
            / (t_n * h * h_prime),
    )
}

pub fn level_measure(p: &ZMeasureParams, lambda: &Partition) -> Result<Complex64> {
    let theta = Complex64::from(p.theta);
    let t_n = rising_factorial(&p.t(), lambda.size());
    if lambda.size() > 0 && t_n.norm() <= 1e-300 {
        return Err(Error::Pole(format!("(t)_{} vanishes for t = {}", lambda.size(), p.t())));
    }
    level_measure_in(&p.z, &p.z_prime, &theta, lambda)
}

/// (1−ξ)^t with the real positive base 1 − ξ.
fn one_minus_xi_pow(xi: f64, t: Complex64) -> Complex64 {
    Complex64::from(1.0 - xi).powc(t)
}

/// M_{z,z′,θ,ξ}(λ) = (1−ξ)^t ξ^{|λ|} (z)_{λ,θ}(z′)_{λ,θ} / (H H′).
pub fn mixed_measure(p: &ZMeasureParams, lambda: &Partition) -> Result<Complex64> {
    let xi = p.require_xi()?;
    let theta = Complex64::from(p.theta);
    let (h, h_prime) = hook_products(lambda, &theta);
    let poch = generalized_pochhammer(&p.z, lambda, &theta) * generalized_pochhammer(&p.z_prime, lambda, &theta);
    Ok(one_minus_xi_pow(xi, p.t()) * xi.powi(lambda.size() as i32) * poch / (h * h_prime))
}

/// Total mass of level n: (1−ξ)^t ξ^n (t)_n / n!.
pub fn level_mass(p: &ZMeasureParams, n: u32) -> Result<Complex64> {
    let xi = p.require_xi()?;
    let t = p.t();
    let mut mass = one_minus_xi_pow(xi, t);
    for k in 0..n {
        mass *= (t + k as f64) * xi / (k as f64 + 1.0);
    }
    Ok(mass)
}

/// e^{−η²} (η²)^{|λ|} θ^{|λ|} / (H(λ,θ) H′(λ,θ)).
pub fn plancherel_mixed(p: &PlancherelParams, theta: f64, lambda: &Partition) -> f64 {
    let (h, h_prime) = hook_products(lambda, &theta);
    let eta2 = p.eta * p.eta;
    (-eta2).exp() * (eta2 * theta).powi(lambda.size() as i32) / (h * h_prime)
}

/// Poisson weight e^{−η²} η^{2n} / n! of level n.
pub fn poisson_level_mass(p: &PlancherelParams, n: u32) -> f64 {
    let eta2 = p.eta * p.eta;
    (0..n).fold((-eta2).exp(), |acc, k| acc * eta2 / (k as f64 + 1.0))
}

/// det[e(λ_j − 2j + i + 1), e(λ_j − 2j + i)] with 1 ≤ i ≤ 2l(λ),
/// 1 ≤ j ≤ l(λ); columns come in (j = 1 pair, j = 2 pair, …) order.
pub fn schur2_determinant<T: Scalar>(lambda: &Partition, e: impl Fn(i64) -> T) -> T {
    determinant(schur2_rows(lambda, e))
}

fn schur2_rows<T>(lambda: &Partition, e: impl Fn(i64) -> T) -> Vec<Vec<T>> {
    let l = lambda.len();
    (1..=2 * l as i64)
        .map(|i| {
            (1..=l)
                .flat_map(|j| {
                    let base = lambda.part(j) as i64 - 2 * j as i64 + i;
                    [e(base + 1), e(base)]
                })
                .collect()
        })
        .collect()
}

/// Determinantal form of M_{z,z−1,2,ξ}(λ):
/// (1−ξ)^{z(z−1)/2} ξ^{|λ|} (z)_{λ,2}(z−1)_{λ,2} det[1/(·+1)!, 1/(·)!].
pub fn determinant_form_z(z: Complex64, xi: f64, lambda: &Partition) -> Complex64 {
    let two = Complex64::from(2.0);
    let det = factorial_determinant(lambda);
    let poch = generalized_pochhammer(&z, lambda, &two) * generalized_pochhammer(&(z - 1.0), lambda, &two);
    one_minus_xi_pow(xi, z * (z - 1.0) / 2.0) * xi.powi(lambda.size() as i32) * poch * det
}

/// M_{z,z−1,2,ξ}(λ) as (1−ξ)^{z(z−1)/2} det[π_{−z}(e_{·+1}), π_{−z}(e_·)].
///
/// π_{−z}(e_k) = ξ^{k/2} c_k and every term of the determinant has total
/// degree 2|λ| in √ξ, so ξ^{|λ|} is factored out and the determinant is
/// taken over the c_k alone.
pub fn specialization_form_z(z: Complex64, xi: f64, lambda: &Partition) -> Result<Complex64> {
    Specialization::pi_z(-z, xi)?;
    let top = lambda.part(1) as usize + 2 * lambda.len() + 1;
    let mut c = Vec::with_capacity(top + 1);
    let mut term = Complex64::new(1.0, 0.0);
    for k in 0..=top {
        c.push(term);
        term *= (-z - k as f64) / (k as f64 + 1.0);
    }
    let det = determinant_exact(&schur2_rows(lambda, |k| {
        if k < 0 {
            Complex64::new(0.0, 0.0)
        } else {
            c[k as usize]
        }
    }));
    Ok(one_minus_xi_pow(xi, z * (z - 1.0) / 2.0) * xi.powi(lambda.size() as i32) * det)
}

/// Both sides of 1/(H(λ,2) H′(λ,2)) = det[1/(·+1)!, 1/(·)!] in floating point.
pub fn hook_determinant_identity(lambda: &Partition) -> (f64, f64) {
    let (h, h_prime) = hook_products(lambda, &2.0);
    (1.0 / (h * h_prime), schur2_determinant(lambda, inverse_factorial))
}

fn inverse_factorial_exact(m: i64) -> BigRational {
    if m < 0 {
        return BigRational::zero();
    }
    BigRational::one() / rising_factorial(&BigRational::one(), m as u32)
}

/// Exact rational version of [`hook_determinant_identity`].
pub fn hook_determinant_identity_exact(lambda: &Partition) -> (BigRational, BigRational) {
    let two = BigRational::from_int(2);
    let (h, h_prime) = hook_products(lambda, &two);
    (
        BigRational::one() / (h * h_prime),
        schur2_determinant(lambda, inverse_factorial_exact),
    )
}

/// det[1/(·+1)!, 1/(·)!] evaluated exactly and rounded once. In floating
/// point this determinant loses up to eight digits for a single long column.
pub fn factorial_determinant(lambda: &Partition) -> f64 {
    schur2_determinant(lambda, inverse_factorial_exact)
        .to_f64()
        .unwrap_or(f64::NAN)
}

/// e^{−η²} det[(√2η)^{·+1}/(·+1)!, (√2η)^{·}/(·)!], equal to the
/// Plancherel measure at θ = 2. Every term of the determinant carries
/// (√2η)^{2|λ|}, which is pulled out before the exact evaluation.
pub fn plancherel_determinant_form(p: &PlancherelParams, lambda: &Partition) -> f64 {
    let a2 = 2.0 * p.eta * p.eta;
    (-(p.eta * p.eta)).exp() * a2.powi(lambda.size() as i32) * factorial_determinant(lambda)
}

/// Same determinant with (√2η)^k/k! entries summed term by term in
/// floating point, without the rescaling.
pub fn plancherel_determinant_form_direct(p: &PlancherelParams, lambda: &Partition) -> f64 {
    let a = std::f64::consts::SQRT_2 * p.eta;
    let det = schur2_determinant(lambda, |m| {
        if m < 0 {
            0.0
        } else {
            a.powi(m as i32) * inverse_factorial(m)
        }
    });
    (-(p.eta * p.eta)).exp() * det
}

/// Unnormalized Pfaffian Schur weight det[π(e_{λ_j−2j+i+1}), π(e_{λ_j−2j+i})].
pub fn pfaffian_schur_weight(spec: &Specialization, lambda: &Partition) -> Complex64 {
    let e = spec.e_coefficients(lambda.part(1) as usize + 2 * lambda.len() + 1);
    schur2_determinant(lambda, |k| if k < 0 { Complex64::new(0.0, 0.0) } else { e[k as usize] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::enumerate_partitions;
    use crate::scalar::rational;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn level_measure_examples() {
        let params = ZMeasureParams::new(c(2.0), c(1.0), 2.0, None).unwrap();
        assert_eq!(params.t(), c(1.0));
        assert!((level_measure(&params, &p(&[1])).unwrap() - c(1.0)).norm() < 1e-15);
        assert_eq!(level_measure(&params, &Partition::empty()).unwrap(), c(1.0));
        let ones = ZMeasureParams::new(c(1.0), c(1.0), 1.0, None).unwrap();
        let total = level_measure(&ones, &p(&[2])).unwrap() + level_measure(&ones, &p(&[1, 1])).unwrap();
        assert!((total - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn level_measure_pole() {
        // t = -1: (t)_2 = 0
        let params = ZMeasureParams::new(c(1.0), c(-2.0), 2.0, None).unwrap();
        assert!(matches!(level_measure(&params, &p(&[1, 1])), Err(Error::Pole(_))));
        assert!(level_measure(&params, &p(&[1])).is_ok());
    }

    #[test]
    fn level_sums_are_exactly_one() {
        let z = rational(7, 3);
        let zp = rational(-5, 4);
        for theta in [rational(2, 1), rational(1, 2), rational(3, 1)] {
            for n in 1..=8 {
                let total = enumerate_partitions(n)
                    .iter()
                    .map(|l| level_measure_in(&z, &zp, &theta, l).unwrap())
                    .fold(BigRational::zero(), |a, b| a + b);
                assert_eq!(total, BigRational::one(), "n = {n}, theta = {theta}");
            }
        }
    }

    #[test]
    fn conjugation_symmetry_of_level_measure() {
        let z = Complex64::new(1.3, 0.7);
        let zp = Complex64::new(-0.4, 2.1);
        for theta in [2.0, 0.5] {
            let a = ZMeasureParams::new(z, zp, theta, None).unwrap();
            let b = ZMeasureParams::new(-z / theta, -zp / theta, 1.0 / theta, None).unwrap();
            for n in 1..=10 {
                for l in enumerate_partitions(n) {
                    let lhs = level_measure(&a, &l).unwrap();
                    let rhs = level_measure(&b, &l.conjugate()).unwrap();
                    assert!(rel(lhs, rhs) < 1e-12, "{l}");
                }
            }
        }
    }

    #[test]
    fn mixed_measure_examples() {
        let params = ZMeasureParams::new(c(2.0), c(1.0), 2.0, Some(0.5)).unwrap();
        assert!((mixed_measure(&params, &p(&[1])).unwrap() - c(0.25)).norm() < 1e-15);
        let z = ZMeasureParams::theta2(c(2.5), 0.3).unwrap();
        let empty = mixed_measure(&z, &Partition::empty()).unwrap();
        assert!((empty - c(0.7f64.powf(2.5 * 1.5 / 2.0))).norm() < 1e-15);
        assert!(ZMeasureParams::theta2(c(2.5), 1.2).is_err());
        let level_only = ZMeasureParams::new(c(2.0), c(1.0), 2.0, None).unwrap();
        assert!(mixed_measure(&level_only, &p(&[1])).is_err());
    }

    #[test]
    fn mixed_equals_weighted_level_measure() {
        let params = ZMeasureParams::new(Complex64::new(2.2, 0.4), Complex64::new(1.7, -0.3), 2.0, Some(0.35)).unwrap();
        for n in 1..=8 {
            let weight = level_mass(&params, n).unwrap();
            for l in enumerate_partitions(n) {
                let lhs = mixed_measure(&params, &l).unwrap();
                let rhs = weight * level_measure(&params, &l).unwrap();
                assert!(rel(lhs, rhs) < 1e-12);
            }
        }
    }

    #[test]
    fn mixed_measure_normalizes() {
        let params = ZMeasureParams::new(c(2.5), c(1.5), 2.0, Some(0.3)).unwrap();
        let total: Complex64 = (0..=40)
            .flat_map(enumerate_partitions)
            .map(|l| mixed_measure(&params, &l).unwrap())
            .sum();
        assert!((total - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn plancherel_examples() {
        let params = PlancherelParams::new(1.0).unwrap();
        let e1 = (-1f64).exp();
        assert!((plancherel_mixed(&params, 2.0, &Partition::empty()) - e1).abs() < 1e-16);
        assert!((plancherel_mixed(&params, 2.0, &p(&[1])) - e1).abs() < 1e-16);
        let level2: f64 = enumerate_partitions(2)
            .iter()
            .map(|l| plancherel_mixed(&params, 2.0, l))
            .sum();
        assert!((level2 - e1 / 2.0).abs() < 1e-16);
        for n in 0..=10 {
            for theta in [0.5, 2.0] {
                let level: f64 = enumerate_partitions(n)
                    .iter()
                    .map(|l| plancherel_mixed(&params, theta, l))
                    .sum();
                assert!((level - poisson_level_mass(&params, n)).abs() < 1e-12);
            }
        }
        assert!(PlancherelParams::new(0.0).is_err());
    }

    #[test]
    fn determinant_forms() {
        assert_eq!(hook_determinant_identity(&Partition::empty()), (1.0, 1.0));
        let (l, r) = hook_determinant_identity(&p(&[1]));
        assert!((l - 0.5).abs() < 1e-16 && (r - 0.5).abs() < 1e-16);
        let (l, r) = hook_determinant_identity_exact(&p(&[2, 1]));
        assert_eq!(l, rational(1, 80));
        assert_eq!(r, rational(1, 80));

        let z = 2.5;
        let xi = 0.3;
        let empty = determinant_form_z(c(z), xi, &Partition::empty());
        assert!((empty - c((1.0 - xi).powf(z * (z - 1.0) / 2.0))).norm() < 1e-15);
        let params = ZMeasureParams::theta2(c(3.0), 0.5).unwrap();
        let lhs = determinant_form_z(c(3.0), 0.5, &p(&[1]));
        assert!(rel(lhs, mixed_measure(&params, &p(&[1])).unwrap()) < 1e-12);
    }

    #[test]
    fn specialization_form_matches_mixed_measure() {
        for z in [
            Complex64::new(2.5, 0.0),
            Complex64::new(3.3, 0.0),
            Complex64::new(1.2, 0.8),
        ] {
            let params = ZMeasureParams::theta2(z, 0.3).unwrap();
            for n in 0..=8 {
                for l in enumerate_partitions(n) {
                    let m = mixed_measure(&params, &l).unwrap();
                    let d = determinant_form_z(z, 0.3, &l);
                    let s = specialization_form_z(z, 0.3, &l).unwrap();
                    let scale = m.norm().max(1e-300);
                    assert!((m - d).norm() / scale < 1e-12, "{l}: {m} vs {d}");
                    // rounding of the c_k alone moves this determinant by up to
                    // ~2e-9 relative (one long column at z = 3.3)
                    assert!((m - s).norm() / scale < 1e-8, "{l}: {m} vs {s}");
                }
            }
        }
    }

    #[test]
    fn plancherel_determinant_matches() {
        let params = PlancherelParams::new(0.9).unwrap();
        for n in 0..=10 {
            for l in enumerate_partitions(n) {
                let a = plancherel_mixed(&params, 2.0, &l);
                let b = plancherel_determinant_form(&params, &l);
                assert!((a - b).abs() <= 1e-12 * a, "{l}");
                let c = plancherel_determinant_form_direct(&params, &l);
                assert!((a - c).abs() <= 1e-6 * a, "{l}");
            }
        }
    }
}
