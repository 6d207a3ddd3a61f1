//! Υ-form series S(x,y) = Σ_{k,m≥1} Φ_k(x) Υ(k,m) Φ_m(y), with Φ from an
//! FFT table, from Gauss hypergeometric functions, or from Bessel functions.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use super::contour::{laurent_coefficients, QuadratureSettings};
use super::upsilon::upsilon_form;
use crate::error::{Error, Result};
use crate::special::{bessel_j, hyp2f1, pochhammer_shift, principal_pow, regularized_2f1};
use crate::specializations::Specialization;

/// Φ_k(x) for the z-family at n = k + x:
/// (−1)^n ξ^{n/2} (1−ξ)^z (z)_n F(1−z, −z; n+1; ξ/(ξ−1)) / n!.
/// For n < 0 the 1/n! is absorbed in the regularized 2F1.
pub fn phi_closed_form_z(z: Complex64, xi: f64, n: i64) -> Result<Complex64> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::InvalidParameter(format!("xi must lie in (0, 1), got {xi}")));
    }
    let one = Complex64::new(1.0, 0.0);
    let w = xi / (xi - 1.0);
    let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let prefactor = principal_pow(Complex64::from(1.0 - xi), z)? * sign * xi.powf(n as f64 / 2.0);
    let c = Complex64::from((n + 1) as f64);
    if n >= 0 {
        // (z)_n / n! as a single running product
        let mut ratio = one;
        for i in 0..n {
            ratio *= (z + i as f64) / (i + 1) as f64;
        }
        Ok(prefactor * ratio * hyp2f1(one - z, -z, c, w)?)
    } else {
        Ok(prefactor * pochhammer_shift(z, n)? * regularized_2f1(one - z, -z, c, w)?)
    }
}

/// Φ_k(x) for the Plancherel family: J_{k+x}(2√2 η).
pub fn phi_bessel(eta: f64, n: i64) -> f64 {
    bessel_j(n, 2.0 * SQRT_2 * eta)
}

/// How Φ is produced for a series evaluation.
#[derive(Clone, Debug)]
pub enum PhiSource<'a> {
    /// FFT of E(w)/E(1/w) on a circle.
    Contour(&'a Specialization, QuadratureSettings),
    Hypergeometric {
        z: Complex64,
        xi: f64,
    },
    Bessel {
        eta: f64,
    },
}

/// Φ values indexed by n = k + x over a contiguous window.
#[derive(Clone, Debug)]
pub struct PhiTable {
    offset: i64,
    values: Vec<Complex64>,
}

impl PhiTable {
    pub fn build(source: &PhiSource<'_>, lo: i64, hi: i64) -> Result<Self> {
        let values = match source {
            PhiSource::Contour(spec, settings) => laurent_coefficients(spec, lo, hi, settings)?.values,
            PhiSource::Hypergeometric { z, xi } => (lo..=hi)
                .map(|n| phi_closed_form_z(*z, *xi, n))
                .collect::<Result<Vec<_>>>()?,
            PhiSource::Bessel { eta } => (lo..=hi).map(|n| Complex64::from(phi_bessel(*eta, n))).collect(),
        };
        Ok(Self { offset: lo, values })
    }

    pub fn range(&self) -> (i64, i64) {
        (self.offset, self.offset + self.values.len() as i64 - 1)
    }

    pub fn get(&self, n: i64) -> Complex64 {
        let idx = n - self.offset;
        assert!(
            idx >= 0 && (idx as usize) < self.values.len(),
            "Φ index {n} outside table"
        );
        self.values[idx as usize]
    }

    /// Φ_1(x), …, Φ_len(x).
    pub fn row(&self, x: i64, len: usize) -> &[Complex64] {
        let start = (x + 1 - self.offset) as usize;
        &self.values[start..start + len]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesSettings {
    /// Fixed truncation K; adaptive when absent.
    pub truncation: Option<usize>,
    pub step: usize,
    pub max_truncation: usize,
    pub rel_tol: f64,
}

impl Default for SeriesSettings {
    fn default() -> Self {
        Self {
            truncation: None,
            step: 16,
            max_truncation: 512,
            rel_tol: 1e-13,
        }
    }
}

impl SeriesSettings {
    /// Largest K the evaluation may touch.
    pub fn reach(&self) -> usize {
        self.truncation.unwrap_or(self.max_truncation)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesEstimate {
    pub value: Complex64,
    /// |S_K − S_{K−step}|, the last increment.
    pub tail: f64,
    pub truncation: usize,
    pub converged: bool,
}

/// Truncated S_K(x,y) from a Φ table covering x+1..=x+K and y+1..=y+K.
///
/// Both orientations are summed and halved, so S_K(y,x) = −S_K(x,y)
/// holds bit for bit and the diagonal is exactly zero.
pub fn s_series_truncated(table: &PhiTable, x: i64, y: i64, k: usize) -> Complex64 {
    let (a, b) = (table.row(x, k), table.row(y, k));
    (upsilon_form(a, b) - upsilon_form(b, a)) * 0.5
}

pub fn s_series(table: &PhiTable, x: i64, y: i64, settings: &SeriesSettings) -> SeriesEstimate {
    let step = settings.step.max(1);
    if let Some(k) = settings.truncation {
        let value = s_series_truncated(table, x, y, k);
        let previous = s_series_truncated(table, x, y, k.saturating_sub(step));
        return SeriesEstimate {
            value,
            tail: (value - previous).norm(),
            truncation: k,
            converged: true,
        };
    }
    // magnitude of the individual terms, so entries that cancel to nothing
    // (the diagonal, say) still meet a sensible threshold
    let peak = |x: i64| {
        table
            .row(x, settings.max_truncation)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    };
    let mut scale = peak(x) * peak(y);
    let mut previous = Complex64::new(0.0, 0.0);
    let mut tail = f64::INFINITY;
    let mut k = step;
    while k <= settings.max_truncation {
        let value = s_series_truncated(table, x, y, k);
        scale = scale.max(value.norm());
        tail = (value - previous).norm();
        if k > step && tail <= settings.rel_tol * scale {
            return SeriesEstimate {
                value,
                tail,
                truncation: k,
                converged: true,
            };
        }
        previous = value;
        k += step;
    }
    SeriesEstimate {
        value: previous,
        tail,
        truncation: k - step,
        converged: false,
    }
}

/// Φ table window needed for evaluating every pair drawn from `points`.
pub fn table_window(points: &[i64], settings: &SeriesSettings) -> (i64, i64) {
    let lo = points.iter().copied().min().unwrap_or(0) + 1;
    let hi = points.iter().copied().max().unwrap_or(0) + settings.reach() as i64;
    (lo, hi)
}
