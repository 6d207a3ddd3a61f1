//! Acceptance run: each criterion is evaluated at its pinned tolerance and
//! reported on one line. Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pfpart::kernels::finite::{m_matrix, toeplitz_factorization, FiniteKernel};
use pfpart::kernels::upsilon::{difference_entry, upsilon, upsilon_bilinear, upsilon_bilinear_closed};
use pfpart::measures::{PlancherelParams, ZMeasureParams};
use pfpart::oracle::{
    degeneration_gaps, identity_suite, MeasureEvaluator, SuiteParams, TruncationPolicy, WeightedEnsemble,
};
use pfpart::pfaffian::correlation_pfaffian;
use pfpart::{
    AntisymmetricMatrix, CorrelationQuery, KernelFamily, KernelSettings, Result, Route, ScalarKernel, Specialization,
    TabulatedKernel,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

const Z_QUERIES: [&[i64]; 25] = [
    &[],
    &[0],
    &[1],
    &[-1],
    &[-2],
    &[-5],
    &[4],
    &[-8],
    &[0, 1],
    &[-4, -2],
    &[-3, 1],
    &[-1, 2],
    &[3, 4],
    &[-8, -7],
    &[-6, 0],
    &[-5, 2],
    &[0, 1, 2],
    &[-6, -4, -2],
    &[-1, 1, 3],
    &[-3, 0, 4],
    &[-8, -4, 0],
    &[-7, -2, 1],
    &[-1, 2, 4],
    &[-5, -4, -3],
    &[-6, 1, 3],
];

const PLANCHEREL_QUERIES: [&[i64]; 15] = [
    &[-2],
    &[-4, -2],
    &[0],
    &[2],
    &[-8],
    &[-1],
    &[-3, -1],
    &[0, 2],
    &[-6, -4, -2],
    &[-5, 0, 1],
    &[-8, -3, 2],
    &[-7, -6, -5],
    &[1, 2],
    &[-2, -1, 0],
    &[-4],
];

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn kernel(family: KernelFamily, route: Route) -> Result<ScalarKernel> {
    ScalarKernel::new(family, route, KernelSettings::default())
}

fn max_grid_gap(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max)
}

fn theorem_z_end_to_end() -> Result<Outcome> {
    let policy = TruncationPolicy::new(40, 1e-8)?;
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    for z in [2.5, 3.3] {
        for xi in [0.2, 0.35] {
            let family = KernelFamily::ZMeasure { z: real(z), xi };
            let table = TabulatedKernel::new(&kernel(family, Route::Contour)?, -8, 5)?;
            let ensemble =
                WeightedEnsemble::new(MeasureEvaluator::ZMixed(ZMeasureParams::theta2(real(z), xi)?), policy)?;
            for points in Z_QUERIES {
                let query = CorrelationQuery::new(points.to_vec())?;
                let pf = correlation_pfaffian(&table, &query)?;
                let gap = (pf - ensemble.rho(&query).value).norm();
                if gap > worst {
                    worst = gap;
                    worst_at = format!("z={z} xi={xi} X={points:?}");
                }
            }
        }
    }
    Ok(outcome(
        worst < 1e-7,
        format!("max |Pf - oracle| = {worst:.2e} at {worst_at} (bound 1e-7)"),
    ))
}

fn route_agreement(family: KernelFamily, tol: f64) -> Result<(bool, f64)> {
    let xs: Vec<i64> = (-10..=6).collect();
    let contour = kernel(family.clone(), Route::Contour)?.scalar_grid(&xs, &xs)?;
    let closed = kernel(family, Route::Closed)?.scalar_grid(&xs, &xs)?;
    let gap = max_grid_gap(&contour, &closed);
    Ok((gap < tol, gap))
}

use pfpart::KernelSource;

fn theorem_z_routes() -> Result<Outcome> {
    let (ok, gap) = route_agreement(KernelFamily::ZMeasure { z: real(2.5), xi: 0.2 }, 1e-9)?;
    Ok(outcome(
        ok,
        format!("max |contour - hypergeometric series| = {gap:.2e} on [-10,6]^2 (bound 1e-9)"),
    ))
}

fn theorem_plancherel_routes() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut ok = true;
    for eta in [0.5, 1.0] {
        let (pass, gap) = route_agreement(KernelFamily::Plancherel { eta }, 1e-10)?;
        ok &= pass;
        worst = worst.max(gap);
    }
    Ok(outcome(
        ok,
        format!("max |contour - Bessel series| = {worst:.2e} for eta in {{0.5, 1}} (bound 1e-10)"),
    ))
}

fn theorem_plancherel_end_to_end() -> Result<Outcome> {
    let eta = 0.8;
    let table = TabulatedKernel::new(&kernel(KernelFamily::Plancherel { eta }, Route::Contour)?, -8, 3)?;
    let ensemble = WeightedEnsemble::new(
        MeasureEvaluator::Plancherel(PlancherelParams::new(eta)?),
        TruncationPolicy::new(40, 1e-8)?,
    )?;
    let mut worst = 0.0f64;
    let mut in_range = true;
    for points in PLANCHEREL_QUERIES {
        let query = CorrelationQuery::new(points.to_vec())?;
        let pf = correlation_pfaffian(&table, &query)?;
        worst = worst.max((pf - ensemble.rho(&query).value).norm());
        in_range &= pf.re >= -1e-8 && pf.re <= 1.0 + 1e-8 && pf.im.abs() <= 1e-8;
    }
    Ok(outcome(
        worst < 1e-8 && in_range,
        format!("max |Pf - oracle| = {worst:.2e} (bound 1e-8), 0 <= rho <= 1+1e-8: {in_range}"),
    ))
}

fn upsilon_bilinear_form() -> Result<Outcome> {
    let points: [(f64, f64, f64, f64); 12] = [
        (1.3, 0.0, 1.3, 1.1),
        (1.3, 0.7, 3.0, -2.0),
        (1.5, 0.3, 2.0, 1.0),
        (1.6, -1.2, 1.4, 2.5),
        (1.8, 2.0, 2.6, 0.4),
        (2.0, 0.0, 3.0, 0.0),
        (2.0, 1.0, 1.7, -0.6),
        (2.2, -2.4, 2.9, 3.0),
        (2.5, 0.5, 1.9, -1.5),
        (2.7, 3.1, 2.3, 1.2),
        (3.0, -0.9, 1.5, 0.2),
        (3.0, 2.2, 3.0, -2.8),
    ];
    let mut worst = 0.0f64;
    let mut worst_at = (0.0, 0.0);
    for (r1, a1, r2, a2) in points {
        let w1 = Complex64::from_polar(r1, a1);
        let w2 = Complex64::from_polar(r2, a2);
        let gap = (upsilon_bilinear(w1, w2, 80)? - upsilon_bilinear_closed(w1, w2)?).norm();
        if gap > worst {
            worst = gap;
            worst_at = (r1, r2);
        }
    }
    let anchor = upsilon_bilinear_closed(real(2.0), real(3.0))?;
    let anchor_ok = (anchor - 0.05).norm() < 1e-15;
    Ok(outcome(
        worst < 1e-10 && anchor_ok,
        format!(
            "K=80 max |truncated - closed| = {worst:.2e} at |w1|={}, |w2|={} (bound 1e-10); closed(2,3) = {:.15}",
            worst_at.0, worst_at.1, anchor.re
        ),
    ))
}

fn moment_structure() -> Result<Outcome> {
    let mut identity = true;
    for i in 1..=100u64 {
        for j in 1..=100u64 {
            let lhs: i64 = (1..=101u64)
                .map(|k| difference_entry(i, k) as i64 * upsilon(k, j) as i64)
                .sum();
            identity &= lhs == i64::from(i == j);
        }
    }
    let spec = Specialization::plancherel(1.0)?;
    let n = 8;
    let m = m_matrix(&spec, n);
    let tdt = toeplitz_factorization(&spec, n);
    let factor_gap = (&m - &tdt).iter().map(|z| z.norm()).fold(0.0, f64::max);

    let exact = kernel(KernelFamily::Plancherel { eta: 1.0 }, Route::Contour)?
        .evaluate(-1, -2)?
        .value;
    let gaps = [4usize, 8, 16]
        .iter()
        .map(|&n| Ok((FiniteKernel::new(&spec, n)?.s(-1, -2) - exact).norm()))
        .collect::<Result<Vec<f64>>>()?;
    let converging = gaps[2] < gaps[0] && gaps[2] < 1e-8;
    Ok(outcome(
        identity && factor_gap < 1e-12 && converging,
        format!(
            "D*Upsilon = I up to 100: {identity}; max |M - T D T^T| = {factor_gap:.2e} (bound 1e-12); finite-N gaps N=4,8,16: {:.1e}, {:.1e}, {:.1e} (bound 1e-8)",
            gaps[0], gaps[1], gaps[2]
        ),
    ))
}

fn identities() -> Result<Outcome> {
    let report = identity_suite(&SuiteParams::default());
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    let worst = report
        .checks
        .iter()
        .filter(|c| !c.exact && c.name != "plancherel_degeneration")
        .map(|c| c.max_deviation)
        .fold(0.0, f64::max);
    Ok(outcome(
        report.passed,
        format!(
            "{} checks over |lambda| <= 10, worst floating deviation {worst:.2e} (bound 1e-12), failed: {failed:?}",
            report.checks.len()
        ),
    ))
}

fn degeneration() -> Result<Outcome> {
    let gaps = degeneration_gaps(&[50.0, 100.0, 200.0], 1.0, 6);
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    Ok(outcome(
        decreasing && gaps[2] < 2e-2,
        format!(
            "max |mixed - plancherel| at z=50,100,200: {:.2e}, {:.2e}, {:.2e} (decreasing, last < 2e-2)",
            gaps[0], gaps[1], gaps[2]
        ),
    ))
}

fn pfaffian_engine() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = 2 * rng.gen_range(1..=6);
        let mut m = DMatrix::from_element(n, n, real(0.0));
        for i in 0..n {
            for j in i + 1..n {
                let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = v;
                m[(j, i)] = -v;
            }
        }
        let det = m.clone().determinant();
        let pf = AntisymmetricMatrix::new(m)?.pfaffian()?;
        worst = worst.max((pf * pf - det).norm() / det.norm());
    }
    let two = AntisymmetricMatrix::from_rows(&[vec![real(0.0), real(1.75)], vec![real(-1.75), real(0.0)]])?;
    let (a, b, c, d, e, f) = (2.0, -3.0, 0.5, 1.25, 4.0, -0.75);
    let four = AntisymmetricMatrix::from_rows(&[
        vec![real(0.0), real(a), real(b), real(c)],
        vec![real(-a), real(0.0), real(d), real(e)],
        vec![real(-b), real(-d), real(0.0), real(f)],
        vec![real(-c), real(-e), real(-f), real(0.0)],
    ])?;
    let closed = two.pfaffian()? == real(1.75) && four.pfaffian()? == real(a * f - b * e + c * d);
    Ok(outcome(
        worst < 1e-10 && closed,
        format!("max relative |Pf^2 - det| = {worst:.2e} over 100 matrices (bound 1e-10); 2x2 and 4x4 closed forms exact: {closed}"),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 9] = [
        ("z-measure Pfaffian vs oracle", theorem_z_end_to_end),
        ("z-kernel contour vs hypergeometric series", theorem_z_routes),
        ("Plancherel kernel contour vs Bessel series", theorem_plancherel_routes),
        ("Plancherel Pfaffian vs oracle", theorem_plancherel_end_to_end),
        ("Upsilon bilinear form", upsilon_bilinear_form),
        ("moment matrix structure", moment_structure),
        ("identity suite", identities),
        ("Plancherel degeneration", degeneration),
        ("Pfaffian engine", pfaffian_engine),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        let (passed, detail) = match result {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "criterion {}: {} [{name}] {detail} ({secs:.1}s)",
            i + 1,
            if passed { "PASS" } else { "FAIL" }
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
