//! Brute-force ground truth: sums over enumerated partitions for
//! correlation functions and partition functions, and a suite of exact and
//! floating-point identity checks.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{
    hook_determinant_identity_exact, level_mass, level_measure, level_measure_in, mixed_measure, pfaffian_schur_weight,
    plancherel_determinant_form, plancherel_mixed, poisson_level_mass, schur2_determinant, PlancherelParams,
    ZMeasureParams,
};
use crate::partitions::{enumerate_partitions, generalized_pochhammer, hook_products, Partition};
use crate::pfaffian::CorrelationQuery;
use crate::scalar::{rational, CompensatedSum, Scalar};
use crate::specializations::Specialization;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TruncationPolicy {
    /// Largest |λ| enumerated (N_cut).
    pub max_size: u32,
    /// Largest acceptable tail estimate.
    pub tol: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            max_size: 40,
            tol: 1e-8,
        }
    }
}

impl TruncationPolicy {
    pub fn new(max_size: u32, tol: f64) -> Result<Self> {
        if max_size < 1 {
            return Err(Error::InvalidParameter("N_cut must be at least 1".into()));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        Ok(Self { max_size, tol })
    }
}

/// Measure whose weights the oracle enumerates.
#[derive(Clone, Debug)]
pub enum MeasureEvaluator {
    /// M_{z,z′,θ,ξ}.
    ZMixed(ZMeasureParams),
    /// Poissonized Plancherel measure at θ = 2.
    Plancherel(PlancherelParams),
    /// det[π(e_{λ_j−2j+i+1}), π(e_{λ_j−2j+i})], normalized by its truncated sum.
    Schur2(Specialization),
}

impl MeasureEvaluator {
    pub fn weight(&self, lambda: &Partition) -> Result<Complex64> {
        match self {
            MeasureEvaluator::ZMixed(p) => mixed_measure(p, lambda),
            MeasureEvaluator::Plancherel(p) => Ok(Complex64::from(plancherel_mixed(p, 2.0, lambda))),
            MeasureEvaluator::Schur2(spec) => Ok(pfaffian_schur_weight(spec, lambda)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleValue {
    pub value: Complex64,
    pub tail_estimate: f64,
}

/// All weights with |λ| ≤ N_cut, computed once and reused across queries.
#[derive(Clone, Debug)]
pub struct WeightedEnsemble {
    measure: MeasureEvaluator,
    policy: TruncationPolicy,
    levels: Vec<Vec<(Partition, Complex64)>>,
    level_abs: Vec<f64>,
    total: Complex64,
    tail: f64,
}

impl WeightedEnsemble {
    pub fn new(measure: MeasureEvaluator, policy: TruncationPolicy) -> Result<Self> {
        let levels = (0..=policy.max_size)
            .into_par_iter()
            .map(|n| {
                enumerate_partitions(n)
                    .into_iter()
                    .map(|l| measure.weight(&l).map(|w| (l, w)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let level_abs: Vec<f64> = levels
            .iter()
            .map(|lvl| lvl.iter().map(|(_, w)| w.norm()).sum())
            .collect();
        let mut sum = CompensatedSum::new();
        levels.iter().flatten().for_each(|(_, w)| sum.add(*w));
        let tail = tail_estimate(&measure, &level_abs, policy)?;
        if tail > policy.tol {
            return Err(Error::Tail {
                estimate: tail,
                tol: policy.tol,
            });
        }
        Ok(Self {
            measure,
            policy,
            levels,
            level_abs,
            total: sum.value(),
            tail,
        })
    }

    pub fn measure(&self) -> &MeasureEvaluator {
        &self.measure
    }

    pub fn policy(&self) -> TruncationPolicy {
        self.policy
    }

    /// Σ_{|λ|=n} |weight(λ)| for n = 0..=N_cut.
    pub fn level_report(&self) -> &[f64] {
        &self.level_abs
    }

    pub fn partition_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Truncated total mass with its tail estimate.
    pub fn total(&self) -> OracleValue {
        OracleValue {
            value: self.total,
            tail_estimate: self.tail,
        }
    }

    /// ρ(X) = mass of {λ : X ⊂ D₂(λ)}.
    pub fn rho(&self, query: &CorrelationQuery) -> OracleValue {
        let mut sum = CompensatedSum::new();
        for (lambda, w) in self.levels.iter().flatten() {
            if query.points().iter().all(|&x| lambda.d2_contains(x)) {
                sum.add(*w);
            }
        }
        let mut value = sum.value();
        if let MeasureEvaluator::Schur2(_) = self.measure {
            value /= self.total;
        }
        OracleValue {
            value,
            tail_estimate: self.tail,
        }
    }
}

/// Exact Poisson tail for Plancherel. Otherwise a heuristic: the last three
/// level sums must be below tol/10 and shrinking, and the remainder is
/// extrapolated geometrically from their ratio. Not a rigorous bound.
fn tail_estimate(measure: &MeasureEvaluator, level_abs: &[f64], policy: TruncationPolicy) -> Result<f64> {
    let n_cut = policy.max_size;
    match measure {
        MeasureEvaluator::Plancherel(p) => {
            let mut tail = 0.0;
            let mut n = n_cut + 1;
            loop {
                let term = poisson_level_mass(p, n);
                tail += term;
                if term <= tail * 1e-17 || n > n_cut + 10_000 {
                    return Ok(tail);
                }
                n += 1;
            }
        }
        _ => {
            if level_abs.len() < 4 {
                return Ok(f64::INFINITY);
            }
            let last = &level_abs[level_abs.len() - 4..];
            let shrinking = last.windows(2).all(|w| w[1] < w[0]);
            let magnitudes_shrinking = match measure {
                MeasureEvaluator::ZMixed(p) => {
                    let m = (n_cut - 3..=n_cut)
                        .map(|n| level_mass(p, n).map(|v| v.norm()))
                        .collect::<Result<Vec<_>>>()?;
                    m.windows(2).all(|w| w[1] <= w[0])
                }
                _ => true,
            };
            let quiet = last[1..].iter().all(|&a| a < policy.tol / 10.0);
            if last[3] == 0.0 {
                return Ok(0.0);
            }
            if !(shrinking && magnitudes_shrinking && quiet) {
                return Ok(f64::INFINITY.min(last[3].max(policy.tol * 10.0)));
            }
            let q = last[1..].windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
            Ok(last[3] * q / (1.0 - q))
        }
    }
}

/// One-off ρ(X); for many queries build a [`WeightedEnsemble`] once.
pub fn brute_force_rho(
    measure: MeasureEvaluator,
    query: &CorrelationQuery,
    policy: TruncationPolicy,
) -> Result<OracleValue> {
    Ok(WeightedEnsemble::new(measure, policy)?.rho(query))
}

/// Truncated Z = Σ_λ det[π(e_{λ_j−2j+i+1}), π(e_{λ_j−2j+i})].
pub fn partition_function_schur2(spec: &Specialization, policy: TruncationPolicy) -> Result<OracleValue> {
    Ok(WeightedEnsemble::new(MeasureEvaluator::Schur2(spec.clone()), policy)?.total())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    /// Checked in rational arithmetic; deviation is then 0 or 1.
    pub exact: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub max_size: u32,
    pub checks: Vec<IdentityCheck>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteParams {
    /// Largest |λ| used by the identity checks.
    pub max_size: u32,
    /// Relative tolerance of the floating-point checks.
    pub tol: f64,
    /// Complex (z, z′) pair for the floating-point checks.
    pub z: Complex64,
    pub z_prime: Complex64,
    pub xi: f64,
    pub eta: f64,
    pub degeneration_zs: Vec<f64>,
    pub degeneration_eta: f64,
    pub degeneration_max_size: u32,
    pub degeneration_tol: f64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            max_size: 10,
            tol: 1e-12,
            z: Complex64::new(2.2, 0.4),
            z_prime: Complex64::new(1.7, -0.3),
            xi: 0.35,
            eta: 0.9,
            degeneration_zs: vec![50.0, 100.0, 200.0],
            degeneration_eta: 1.0,
            degeneration_max_size: 6,
            degeneration_tol: 2e-2,
        }
    }
}

fn exact_check(name: &str, holds: bool) -> IdentityCheck {
    IdentityCheck {
        name: name.into(),
        max_deviation: if holds { 0.0 } else { 1.0 },
        tolerance: 0.0,
        exact: true,
        passed: holds,
    }
}

fn float_check(name: &str, deviation: f64, tolerance: f64) -> IdentityCheck {
    IdentityCheck {
        name: name.into(),
        max_deviation: deviation,
        tolerance,
        exact: false,
        passed: deviation <= tolerance,
    }
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn all_partitions(max_size: u32) -> impl Iterator<Item = Partition> {
    (0..=max_size).flat_map(enumerate_partitions)
}

/// (−θ)^n and θ^n as exact rationals.
fn rational_pow(base: &BigRational, n: u32) -> BigRational {
    (0..n).fold(BigRational::one(), |acc, _| acc * base.clone())
}

fn rational_pow_factorial(k: u32) -> BigRational {
    (1..=k as i64).fold(BigRational::one(), |acc, i| acc * BigRational::from_int(i))
}

/// π_z(e_k) = s^k z(z−1)…(z−k+1)/k! with s = √ξ rational.
fn binomial_e_exact(z: &BigRational, s: &BigRational, k: i64) -> BigRational {
    if k < 0 {
        return BigRational::zero();
    }
    (0..k).fold(BigRational::one(), |acc, i| {
        acc * (z.clone() - BigRational::from_int(i)) * s.clone() / BigRational::from_int(i + 1)
    })
}

pub fn identity_suite(params: &SuiteParams) -> IdentityReport {
    let n_max = params.max_size;
    let thetas = [rational(1, 2), rational(2, 1), rational(3, 1)];
    let z = rational(7, 3);
    let z_prime = rational(-5, 4);
    let mut checks = Vec::new();

    // H(λ,θ) = θ^{|λ|} H′(λ′,1/θ), (z)_{λ,θ} = (−θ)^{|λ|} (−z/θ)_{λ′,1/θ}
    let mut hook_ok = true;
    let mut poch_ok = true;
    for theta in &thetas {
        let inv = BigRational::one() / theta.clone();
        for l in all_partitions(n_max) {
            let n = l.size();
            let conj = l.conjugate();
            let (h, _) = hook_products(&l, theta);
            let (_, hp_conj) = hook_products(&conj, &inv);
            hook_ok &= h == rational_pow(theta, n) * hp_conj;
            let lhs = generalized_pochhammer(&z, &l, theta);
            let rhs =
                rational_pow(&-theta.clone(), n) * generalized_pochhammer(&(-z.clone() / theta.clone()), &conj, &inv);
            poch_ok &= lhs == rhs;
        }
    }
    checks.push(exact_check("hook_conjugation", hook_ok));
    checks.push(exact_check("pochhammer_conjugation", poch_ok));

    // M^{(n)}_{z,z′,θ}(λ) = M^{(n)}_{−z/θ,−z′/θ,1/θ}(λ′) and Σ_{|λ|=n} M^{(n)} = 1
    let mut symmetry_ok = true;
    let mut normalization_ok = true;
    for theta in &thetas {
        let inv = BigRational::one() / theta.clone();
        let (zc, zpc) = (-z.clone() / theta.clone(), -z_prime.clone() / theta.clone());
        for n in 0..=n_max {
            let mut total = BigRational::zero();
            for l in enumerate_partitions(n) {
                match (
                    level_measure_in(&z, &z_prime, theta, &l),
                    level_measure_in(&zc, &zpc, &inv, &l.conjugate()),
                ) {
                    (Ok(a), Ok(b)) => {
                        symmetry_ok &= a == b;
                        total += a;
                    }
                    _ => {
                        symmetry_ok = false;
                        normalization_ok = false;
                    }
                }
            }
            normalization_ok &= total == BigRational::one();
        }
    }
    checks.push(exact_check("level_measure_conjugation", symmetry_ok));
    let mut conj_dev = 0.0f64;
    for theta in [2.0, 0.5] {
        let pair = (
            ZMeasureParams::new(params.z, params.z_prime, theta, None),
            ZMeasureParams::new(-params.z / theta, -params.z_prime / theta, 1.0 / theta, None),
        );
        let (Ok(a), Ok(b)) = pair else {
            conj_dev = f64::INFINITY;
            continue;
        };
        for l in all_partitions(n_max).filter(|l| !l.is_empty()) {
            conj_dev = conj_dev.max(match (level_measure(&a, &l), level_measure(&b, &l.conjugate())) {
                (Ok(x), Ok(y)) => relative(x, y),
                _ => f64::INFINITY,
            });
        }
    }
    checks.push(float_check("level_measure_conjugation_complex", conj_dev, params.tol));
    checks.push(exact_check("level_normalization", normalization_ok));

    // M_{z,z′,θ,ξ}(λ) = (1−ξ)^t ξ^n (t)_n/n! · M^{(n)}(λ)
    let mut mixed_dev = 0.0f64;
    let mut mixed_failed = false;
    for theta in [2.0, 0.5] {
        let Ok(p) = ZMeasureParams::new(params.z, params.z_prime, theta, Some(params.xi)) else {
            mixed_failed = true;
            continue;
        };
        for l in all_partitions(n_max) {
            match (mixed_measure(&p, &l), level_mass(&p, l.size()), level_measure(&p, &l)) {
                (Ok(m), Ok(w), Ok(lm)) => mixed_dev = mixed_dev.max(relative(m, w * lm)),
                _ => mixed_failed = true,
            }
        }
    }
    checks.push(float_check(
        "mixed_level_relation",
        if mixed_failed { f64::INFINITY } else { mixed_dev },
        params.tol,
    ));

    // 1/(H(λ,2)H′(λ,2)) = det[1/(·+1)!, 1/(·)!]
    let det_ok = all_partitions(n_max).all(|l| {
        let (a, b) = hook_determinant_identity_exact(&l);
        a == b
    });
    checks.push(exact_check("hook_determinant", det_ok));

    // ξ^{|λ|}(z)_{λ,2}(z−1)_{λ,2}/(HH′) = det[π_{−z}(e_{·+1}), π_{−z}(e_·)], √ξ = 1/2
    let s = rational(1, 2);
    let xi = s.clone() * s.clone();
    let two = rational(2, 1);
    let mut spec_ok = true;
    for zr in [rational(5, 2), rational(33, 10), rational(-7, 4)] {
        let minus_z = -zr.clone();
        for l in all_partitions(n_max) {
            let (h, hp) = hook_products(&l, &two);
            let lhs = rational_pow(&xi, l.size())
                * generalized_pochhammer(&zr, &l, &two)
                * generalized_pochhammer(&(zr.clone() - BigRational::one()), &l, &two)
                / (h * hp);
            let rhs = schur2_determinant(&l, |k| binomial_e_exact(&minus_z, &s, k));
            spec_ok &= lhs == rhs;
        }
    }
    checks.push(exact_check("specialization_determinant", spec_ok));

    // integer z = 4: det[π_4(e_{·+1}), π_4(e_·)] = ξ^{|λ|} (−4)_{λ,2} (−5)_{λ,2} det[1/(·+1)!, 1/(·)!]
    let four = rational(4, 1);
    let binomial_ok = all_partitions(n_max).all(|l| {
        let lhs = schur2_determinant(&l, |k| binomial_e_exact(&four, &s, k));
        let (_, det) = hook_determinant_identity_exact(&l);
        let rhs = rational_pow(&xi, l.size())
            * generalized_pochhammer(&-four.clone(), &l, &two)
            * generalized_pochhammer(&(-four.clone() - BigRational::one()), &l, &two)
            * det;
        lhs == rhs
    });
    checks.push(exact_check("integer_z_binomial_determinant", binomial_ok));

    // (√2η)^{2|λ|}/(H H′) = det[(√2η)^{·+1}/(·+1)!, (√2η)^·/(·)!] at √2η = 6/5
    let a = rational(6, 5);
    let plancherel_exact = all_partitions(n_max).all(|l| {
        let (h, hp) = hook_products(&l, &two);
        let lhs = rational_pow(&(a.clone() * a.clone()), l.size()) / (h * hp);
        let rhs = schur2_determinant(&l, |k| {
            if k < 0 {
                BigRational::zero()
            } else {
                rational_pow(&a, k as u32) / rational_pow_factorial(k as u32)
            }
        });
        lhs == rhs
    });
    checks.push(exact_check("plancherel_determinant_exact", plancherel_exact));

    // Plancherel at θ = 2 against its determinantal form, and level masses
    match PlancherelParams::new(params.eta) {
        Ok(p) => {
            let det_dev = all_partitions(n_max)
                .map(|l| {
                    relative(
                        Complex64::from(plancherel_mixed(&p, 2.0, &l)),
                        Complex64::from(plancherel_determinant_form(&p, &l)),
                    )
                })
                .fold(0.0, f64::max);
            checks.push(float_check("plancherel_determinant", det_dev, params.tol));
            let mass_dev = (0..=n_max)
                .map(|n| {
                    let level: f64 = enumerate_partitions(n)
                        .iter()
                        .map(|l| plancherel_mixed(&p, 2.0, l))
                        .sum();
                    (level - poisson_level_mass(&p, n)).abs()
                })
                .fold(0.0, f64::max);
            checks.push(float_check("plancherel_level_masses", mass_dev, params.tol));
        }
        Err(_) => {
            checks.push(float_check("plancherel_determinant", f64::INFINITY, params.tol));
            checks.push(float_check("plancherel_level_masses", f64::INFINITY, params.tol));
        }
    }

    // θ = 1: H = H′
    let one = BigRational::one();
    let coincide = all_partitions(n_max).all(|l| {
        let (h, hp) = hook_products(&l, &one);
        h == hp
    });
    checks.push(exact_check("hook_coincidence_theta_one", coincide));

    let degeneration = degeneration_gaps(
        &params.degeneration_zs,
        params.degeneration_eta,
        params.degeneration_max_size,
    );
    let decreasing = degeneration.windows(2).all(|w| w[1] < w[0]);
    let last = degeneration.last().copied().unwrap_or(f64::INFINITY);
    let mut check = float_check("plancherel_degeneration", last, params.degeneration_tol);
    check.passed &= decreasing;
    checks.push(check);

    let passed = checks.iter().all(|c| c.passed);
    IdentityReport {
        max_size: n_max,
        checks,
        passed,
    }
}

/// max_{|λ| ≤ n_max} |M_{z,z−1,2,ξ}(λ) − Plancherel_η(λ)| with
/// ξ = 2η²/(z(z−1)), for each z.
pub fn degeneration_gaps(zs: &[f64], eta: f64, n_max: u32) -> Vec<f64> {
    let Ok(plancherel) = PlancherelParams::new(eta) else {
        return vec![f64::INFINITY; zs.len()];
    };
    zs.iter()
        .map(|&z| {
            let xi = 2.0 * eta * eta / (z * (z - 1.0));
            let Ok(p) = ZMeasureParams::theta2(Complex64::from(z), xi) else {
                return f64::INFINITY;
            };
            all_partitions(n_max)
                .map(|l| match mixed_measure(&p, &l) {
                    Ok(m) => (m - plancherel_mixed(&plancherel, 2.0, &l)).norm(),
                    Err(_) => f64::INFINITY,
                })
                .fold(0.0, f64::max)
        })
        .collect()
}
