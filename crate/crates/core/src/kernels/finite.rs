//! Finite-N kernel built from the 2N × 2N moment matrix M(N).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specializations::Specialization;

/// Inverses with a 1-norm condition estimate above this are refused.
pub const MAX_CONDITION: f64 = 1e14;

/// Relative size below which the e-sequence is cut off.
const COEFFICIENT_TOL: f64 = 1e-20;

fn coefficients(spec: &Specialization, n: usize) -> Vec<Complex64> {
    let cutoff = spec.coefficient_cutoff(COEFFICIENT_TOL);
    spec.e_coefficients(cutoff + 2 * n + 2)
}

fn lookup(e: &[Complex64], k: i64) -> Complex64 {
    if k < 0 || k as usize >= e.len() {
        Complex64::new(0.0, 0.0)
    } else {
        e[k as usize]
    }
}

/// M(N)_{ij} = Σ_x (e_{x+i+1} e_{x+j} − e_{x+j+1} e_{x+i}), 1 ≤ i, j ≤ 2N.
pub fn m_matrix(spec: &Specialization, n: usize) -> DMatrix<Complex64> {
    m_matrix_from(&coefficients(spec, n), n)
}

fn m_matrix_from(e: &[Complex64], n: usize) -> DMatrix<Complex64> {
    let size = 2 * n;
    let top = e.len() as i64;
    DMatrix::from_fn(size, size, |r, c| {
        let (i, j) = (r as i64 + 1, c as i64 + 1);
        let mut acc = Complex64::new(0.0, 0.0);
        for x in -(size as i64) - 2..=top {
            acc += lookup(e, x + i + 1) * lookup(e, x + j) - lookup(e, x + j + 1) * lookup(e, x + i);
        }
        acc
    })
}

/// T D Tᵀ with T_{ik} = e_{k−i} and D_{km} = δ_{k+1,m} − δ_{k,m+1}; equals
/// M(N) once the e-sequence is exhausted.
pub fn toeplitz_factorization(spec: &Specialization, n: usize) -> DMatrix<Complex64> {
    let e = coefficients(spec, n);
    let size = 2 * n;
    let inner = e.len() + size + 1;
    let t = DMatrix::from_fn(size, inner, |r, k| lookup(&e, k as i64 - r as i64));
    let d = DMatrix::from_fn(inner, inner, |k, m| {
        if k + 1 == m {
            Complex64::new(1.0, 0.0)
        } else if m + 1 == k {
            Complex64::new(-1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    &t * d * t.transpose()
}

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct FiniteKernel {
    n: usize,
    e: Vec<Complex64>,
    m_inverse: DMatrix<Complex64>,
    condition: f64,
}

impl FiniteKernel {
    pub fn new(spec: &Specialization, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        let e = coefficients(spec, n);
        let m = m_matrix_from(&e, n);
        let m_inverse = m.clone().try_inverse().ok_or(Error::SingularMatrix {
            condition: f64::INFINITY,
        })?;
        let condition = one_norm(&m) * one_norm(&m_inverse);
        if !(condition <= MAX_CONDITION) {
            return Err(Error::SingularMatrix { condition });
        }
        Ok(Self {
            n,
            e,
            m_inverse,
            condition,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// ‖M‖₁ ‖M⁻¹‖₁.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    fn psi(&self, x: i64) -> Vec<Complex64> {
        (1..=2 * self.n as i64).map(|i| lookup(&self.e, x + i)).collect()
    }

    /// S^{(N)}(x,y) = Σ_{i,j} e_{x+i} (M⁻¹)_{ij} e_{y+j}; tends to S(x,y).
    pub fn s(&self, x: i64, y: i64) -> Complex64 {
        let (px, py) = (self.psi(x), self.psi(y));
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, a) in px.iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let row: Complex64 = py.iter().enumerate().map(|(j, b)| self.m_inverse[(i, j)] * b).sum();
            acc += a * row;
        }
        acc
    }
}

impl super::KernelSource for FiniteKernel {
    fn scalar_grid(&self, xs: &[i64], ys: &[i64]) -> Result<Vec<Vec<Complex64>>> {
        Ok(xs.iter().map(|&x| ys.iter().map(|&y| self.s(x, y)).collect()).collect())
    }
}
