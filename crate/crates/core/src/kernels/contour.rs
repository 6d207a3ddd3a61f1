//! Trapezoidal quadrature on circles: single contours for the Laurent
//! coefficients Φ, the tensor-product rule for the double integral of S.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specializations::{Annulus, Specialization};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    /// Radius of the w1 contour (and of w2 unless `radius2` is set).
    pub radius: Option<f64>,
    pub radius2: Option<f64>,
    pub initial_nodes: usize,
    pub max_nodes: usize,
    /// Successive node doublings must agree to tol · max(1, |value|).
    pub tol: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            radius: None,
            radius2: None,
            initial_nodes: 64,
            max_nodes: 4096,
            tol: 1e-12,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub nodes: usize,
}

/// Default radius for the double contour: inside the annulus and outside
/// the unit circle. Geometric mean of the bounds when the annulus is
/// bounded, otherwise 2 (or twice the inner bound if that is larger).
pub fn default_kernel_radius(annulus: &Annulus) -> f64 {
    let lower = annulus.inner.max(1.0);
    if annulus.outer.is_finite() {
        (lower * annulus.outer).sqrt()
    } else {
        (2.0 * lower).max(2.0)
    }
}

/// Default radius for single-contour Laurent coefficients: the unit circle
/// when it lies in the annulus, which keeps negative and positive powers
/// equally well conditioned.
pub fn default_phi_radius(annulus: &Annulus) -> f64 {
    if annulus.contains(1.0) {
        1.0
    } else if annulus.outer.is_finite() {
        (annulus.inner * annulus.outer).sqrt()
    } else {
        2.0 * annulus.inner
    }
}

/// Kernel contour radii after validation: 1 < r < outer and r > inner.
pub fn kernel_radii(spec: &Specialization, settings: &QuadratureSettings) -> Result<(f64, f64)> {
    let annulus = spec.annulus();
    let r1 = settings.radius.unwrap_or_else(|| default_kernel_radius(&annulus));
    let r2 = settings.radius2.or(settings.radius).unwrap_or(r1);
    for r in [r1, r2] {
        if !(r > 1.0 && annulus.contains(r)) {
            return Err(Error::Domain(format!(
                "contour radius {r} must exceed 1 and lie in ({}, {})",
                annulus.inner, annulus.outer
            )));
        }
    }
    Ok((r1, r2))
}

fn node(radius: f64, j: usize, m: usize) -> Complex64 {
    Complex64::from_polar(radius, 2.0 * PI * j as f64 / m as f64)
}

/// w^p on the circle |w| = r at angle 2πj/m, evaluated in polar form.
fn node_power(radius: f64, j: usize, m: usize, p: i64) -> Complex64 {
    let angle = 2.0 * PI * ((j as i64 * p).rem_euclid(m as i64)) as f64 / m as f64;
    Complex64::from_polar(radius.powi(p as i32), angle)
}

/// Changes below this multiple of `tol` that no longer shrink under
/// doubling are taken as the round-off floor.
const STAGNATION_FACTOR: f64 = 1e3;

fn doubling<T>(
    settings: &QuadratureSettings,
    start: usize,
    mut eval: impl FnMut(usize) -> Result<T>,
    mut change: impl FnMut(&T, &T) -> f64,
) -> Result<(T, f64, usize)> {
    let cap = settings.max_nodes.max(start);
    let mut m = start.max(4);
    let mut previous = eval(m)?;
    let mut delta = f64::NAN;
    while 2 * m <= cap {
        let next = eval(2 * m)?;
        let last = delta;
        delta = change(&previous, &next);
        m *= 2;
        // spectral convergence roughly squares the error per doubling; a
        // change that fails to halve means rounding noise dominates
        let stalled = delta <= STAGNATION_FACTOR * settings.tol && delta > 0.5 * last;
        if delta <= settings.tol || stalled {
            return Ok((next, delta, m));
        }
        previous = next;
    }
    Err(Error::Quadrature {
        nodes: m,
        change: delta,
    })
}

fn scaled_gap(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Φ_k(x) = (1/2πi) ∮ E(w)/E(1/w) dw / w^{k+x+1}: the Laurent coefficient
/// [w^{k+x}] of the ratio.
pub fn phi_contour(spec: &Specialization, k: i64, x: i64, settings: &QuadratureSettings) -> Result<Estimate> {
    let annulus = spec.annulus();
    let r = settings.radius.unwrap_or_else(|| default_phi_radius(&annulus));
    if !annulus.contains(r) {
        return Err(Error::Domain(format!(
            "radius {r} outside ({}, {})",
            annulus.inner, annulus.outer
        )));
    }
    let n = k + x;
    let (value, error, nodes) = doubling(
        settings,
        settings.initial_nodes,
        |m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..m {
                acc += spec.e_ratio(node(r, j, m))? * node_power(r, j, m, -n);
            }
            Ok(acc / m as f64)
        },
        |a, b| scaled_gap(*a, *b),
    )?;
    Ok(Estimate { value, error, nodes })
}

/// Laurent coefficients c_n of E(w)/E(1/w) for lo ≤ n ≤ hi.
#[derive(Clone, Debug)]
pub struct LaurentTable {
    pub offset: i64,
    pub values: Vec<Complex64>,
    pub error: f64,
    pub nodes: usize,
}

impl LaurentTable {
    pub fn get(&self, n: i64) -> Complex64 {
        let idx = n - self.offset;
        assert!(
            idx >= 0 && (idx as usize) < self.values.len(),
            "coefficient {n} outside table"
        );
        self.values[idx as usize]
    }
}

/// All coefficients c_lo..=c_hi from one FFT per node count.
pub fn laurent_coefficients(
    spec: &Specialization,
    lo: i64,
    hi: i64,
    settings: &QuadratureSettings,
) -> Result<LaurentTable> {
    assert!(lo <= hi);
    let annulus = spec.annulus();
    let r = settings.radius.unwrap_or_else(|| default_phi_radius(&annulus));
    if !annulus.contains(r) {
        return Err(Error::Domain(format!(
            "radius {r} outside ({}, {})",
            annulus.inner, annulus.outer
        )));
    }
    let span = lo.unsigned_abs().max(hi.unsigned_abs()) as usize;
    let start = settings.initial_nodes.max((2 * span + 2).next_power_of_two());
    let mut planner = FftPlanner::<f64>::new();
    let mut coefficients = |m: usize| -> Result<Vec<Complex64>> {
        let mut buf = (0..m)
            .map(|j| spec.e_ratio(node(r, j, m)))
            .collect::<Result<Vec<_>>>()?;
        let fft: Arc<dyn rustfft::Fft<f64>> = planner.plan_fft_forward(m);
        fft.process(&mut buf);
        Ok((lo..=hi)
            .map(|n| buf[n.rem_euclid(m as i64) as usize] / m as f64 * r.powi(-n as i32))
            .collect())
    };
    let (values, error, nodes) = doubling(
        &QuadratureSettings {
            max_nodes: settings.max_nodes.max(2 * start),
            ..*settings
        },
        start,
        &mut coefficients,
        |a, b| {
            let peak = b.iter().map(|c| c.norm()).fold(1.0, f64::max);
            a.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max) / peak
        },
    )?;
    Ok(LaurentTable {
        offset: lo,
        values,
        error,
        nodes,
    })
}

/// Tensor-product trapezoid rule for
/// S(x,y) = (2πi)^{-2} ∮∮ R(w1) R(w2) (w2−w1) / ((w1w2−1)(w1²−1)(w2²−1)) dw1 dw2 / (w1^x w2^y)
/// on a whole grid of (x, y) at once; R = E(w)/E(1/w).
pub fn s_contour_grid(
    spec: &Specialization,
    xs: &[i64],
    ys: &[i64],
    settings: &QuadratureSettings,
) -> Result<Vec<Vec<Estimate>>> {
    let (r1, r2) = kernel_radii(spec, settings)?;
    let (grid, _, nodes) = doubling(
        settings,
        settings.initial_nodes,
        |m| contour_grid_at(spec, xs, ys, r1, r2, m),
        |a, b| a.iter().zip(b).map(|(p, q)| scaled_gap(*p, *q)).fold(0.0, f64::max),
    )?;
    // error per entry: gap to the previous doubling
    let coarse = contour_grid_at(spec, xs, ys, r1, r2, nodes / 2)?;
    Ok(xs
        .iter()
        .enumerate()
        .map(|(ix, _)| {
            ys.iter()
                .enumerate()
                .map(|(iy, _)| {
                    let idx = ix * ys.len() + iy;
                    Estimate {
                        value: grid[idx],
                        error: (grid[idx] - coarse[idx]).norm(),
                        nodes,
                    }
                })
                .collect()
        })
        .collect())
}

const ROW_BLOCK: usize = 32;

fn contour_grid_at(
    spec: &Specialization,
    xs: &[i64],
    ys: &[i64],
    r1: f64,
    r2: f64,
    m: usize,
) -> Result<Vec<Complex64>> {
    let w1: Vec<Complex64> = (0..m).map(|j| node(r1, j, m)).collect();
    let w2: Vec<Complex64> = (0..m).map(|j| node(r2, j, m)).collect();
    let f1 = w1.iter().map(|&w| spec.e_ratio(w)).collect::<Result<Vec<_>>>()?;
    let f2 = w2.iter().map(|&w| spec.e_ratio(w)).collect::<Result<Vec<_>>>()?;
    // u_x(j) = R(w1_j) w1_j^{1-x},  v_y(j) = R(w2_j) w2_j^{1-y}
    let u: Vec<Vec<Complex64>> = xs
        .iter()
        .map(|&x| (0..m).map(|j| f1[j] * node_power(r1, j, m, 1 - x)).collect())
        .collect();
    let v: Vec<Vec<Complex64>> = ys
        .iter()
        .map(|&y| (0..m).map(|j| f2[j] * node_power(r2, j, m, 1 - y)).collect())
        .collect();
    let w2_sq_minus_one: Vec<Complex64> = w2.iter().map(|w| w * w - 1.0).collect();

    let cells = xs.len() * ys.len();
    let partials: Vec<Vec<Complex64>> = (0..m)
        .collect::<Vec<_>>()
        .par_chunks(ROW_BLOCK)
        .map(|rows| {
            let mut acc = vec![Complex64::new(0.0, 0.0); cells];
            let mut t = vec![Complex64::new(0.0, 0.0); ys.len()];
            for &j1 in rows {
                let a = w1[j1];
                let a_sq_minus_one = a * a - 1.0;
                t.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
                for j2 in 0..m {
                    let b = w2[j2];
                    let kernel = (b - a) / ((a * b - 1.0) * a_sq_minus_one * w2_sq_minus_one[j2]);
                    for (iy, vy) in v.iter().enumerate() {
                        t[iy] += kernel * vy[j2];
                    }
                }
                for (ix, ux) in u.iter().enumerate() {
                    let weight = ux[j1];
                    for (iy, ty) in t.iter().enumerate() {
                        acc[ix * ys.len() + iy] += weight * ty;
                    }
                }
            }
            acc
        })
        .collect();
    let scale = 1.0 / (m as f64 * m as f64);
    let mut total = vec![Complex64::new(0.0, 0.0); cells];
    for block in partials {
        for (dst, src) in total.iter_mut().zip(block) {
            *dst += src;
        }
    }
    total.iter_mut().for_each(|c| *c *= scale);
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::bessel_j;
    use std::f64::consts::SQRT_2;

    #[test]
    fn radii_defaults() {
        let z = Specialization::pi_z(Complex64::new(-2.5, 0.0), 0.2).unwrap();
        let (r1, r2) = kernel_radii(&z, &QuadratureSettings::default()).unwrap();
        assert!((r1 - 0.2f64.powf(-0.25)).abs() < 1e-15 && r1 == r2);
        let p = Specialization::plancherel(1.0).unwrap();
        assert_eq!(kernel_radii(&p, &QuadratureSettings::default()).unwrap(), (2.0, 2.0));
        let bad = QuadratureSettings {
            radius: Some(0.9),
            ..Default::default()
        };
        assert!(matches!(kernel_radii(&p, &bad), Err(Error::Domain(_))));
        let outside = QuadratureSettings {
            radius: Some(2.5),
            ..Default::default()
        };
        assert!(kernel_radii(&z, &outside).is_err());
    }

    #[test]
    fn phi_trivial_specialization_is_a_delta() {
        let t = Specialization::trivial();
        let settings = QuadratureSettings::default();
        for (k, x) in [(1, -1), (2, -1), (3, 0), (1, -3)] {
            let v = phi_contour(&t, k, x, &settings).unwrap().value;
            let expected = if k + x == 0 { 1.0 } else { 0.0 };
            assert!((v - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn phi_plancherel_is_bessel() {
        let eta = 0.9;
        let spec = Specialization::plancherel(eta).unwrap();
        let settings = QuadratureSettings::default();
        for (k, x) in [(1, 0), (2, -5), (4, 3), (1, -7)] {
            let v = phi_contour(&spec, k, x, &settings).unwrap().value;
            let expected = bessel_j(k + x, 2.0 * SQRT_2 * eta);
            assert!((v - expected).norm() < 1e-13, "k={k} x={x}");
        }
    }

    #[test]
    fn fft_table_matches_single_contours() {
        let spec = Specialization::pi_z(Complex64::new(-2.5, 0.0), 0.2).unwrap();
        let settings = QuadratureSettings::default();
        let table = laurent_coefficients(&spec, -12, 40, &settings).unwrap();
        for n in [-12, -3, 0, 1, 7, 40] {
            let single = phi_contour(&spec, 1, n - 1, &settings).unwrap().value;
            assert!((table.get(n) - single).norm() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn laurent_coefficients_independent_of_radius() {
        let spec = Specialization::pi_z(Complex64::new(-1.7, 0.4), 0.3).unwrap();
        let a = laurent_coefficients(&spec, -6, 12, &QuadratureSettings::default()).unwrap();
        let b = laurent_coefficients(
            &spec,
            -6,
            12,
            &QuadratureSettings {
                radius: Some(1.4),
                ..Default::default()
            },
        )
        .unwrap();
        for n in -6..=12 {
            assert!((a.get(n) - b.get(n)).norm() < 1e-12);
        }
    }

    #[test]
    fn double_contour_diagonal_vanishes() {
        let spec = Specialization::plancherel(1.0).unwrap();
        let xs = [-3, 0, 2];
        let grid = s_contour_grid(&spec, &xs, &xs, &QuadratureSettings::default()).unwrap();
        for i in 0..3 {
            assert!(grid[i][i].value.norm() < 1e-14);
            for j in 0..3 {
                assert!((grid[i][j].value + grid[j][i].value).norm() < 1e-13);
            }
        }
    }
}
