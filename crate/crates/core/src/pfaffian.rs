//! Pfaffians of antisymmetric matrices and the Pfaffian correlation
//! functions ρ(X) = Pf[K(x_i, x_j)].

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSource;

/// Allowed max |a_ij + a_ji| relative to the largest entry.
pub const ANTISYMMETRY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct AntisymmetricMatrix {
    inner: DMatrix<Complex64>,
}

impl AntisymmetricMatrix {
    /// Accepts a square matrix that is antisymmetric up to
    /// [`ANTISYMMETRY_TOL`] and replaces it by (A − Aᵀ)/2.
    pub fn new(a: DMatrix<Complex64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidParameter(format!(
                "matrix is {}×{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let n = a.nrows();
        let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut deviation = 0.0f64;
        for i in 0..n {
            for j in i..n {
                deviation = deviation.max((a[(i, j)] + a[(j, i)]).norm());
            }
        }
        if deviation > ANTISYMMETRY_TOL * scale {
            return Err(Error::Asymmetry { deviation });
        }
        let inner = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(0.0, 0.0)
            } else {
                (a[(i, j)] - a[(j, i)]) * 0.5
            }
        });
        Ok(Self { inner })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter("rows of unequal length".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn order(&self) -> usize {
        self.inner.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    /// Pf(A) by skew-symmetric Gaussian elimination with partial pivoting.
    pub fn pfaffian(&self) -> Result<Complex64> {
        let n = self.order();
        if n % 2 == 1 {
            return Err(Error::OddOrder(n));
        }
        let mut a = self.inner.clone();
        let mut pf = Complex64::new(1.0, 0.0);
        for k in (0..n.saturating_sub(1)).step_by(2) {
            let pivot = (k + 1..n)
                .max_by(|&p, &q| a[(p, k)].norm().total_cmp(&a[(q, k)].norm()))
                .unwrap_or(k + 1);
            if pivot != k + 1 {
                a.swap_rows(k + 1, pivot);
                a.swap_columns(k + 1, pivot);
                pf = -pf;
            }
            let head = a[(k, k + 1)];
            if head == Complex64::new(0.0, 0.0) {
                return Ok(Complex64::new(0.0, 0.0));
            }
            pf *= head;
            for i in k + 2..n {
                let tau_i = a[(k, i)] / head;
                let col_i = a[(i, k + 1)];
                for j in k + 2..n {
                    let tau_j = a[(k, j)] / head;
                    let col_j = a[(j, k + 1)];
                    a[(i, j)] += tau_i * col_j - col_i * tau_j;
                }
            }
        }
        Ok(pf)
    }

    /// Expansion along the first row; exponential cost, kept as an oracle.
    pub fn pfaffian_by_expansion(&self) -> Result<Complex64> {
        let n = self.order();
        if n % 2 == 1 {
            return Err(Error::OddOrder(n));
        }
        let idx: Vec<usize> = (0..n).collect();
        Ok(expand(&self.inner, &idx))
    }
}

fn expand(a: &DMatrix<Complex64>, idx: &[usize]) -> Complex64 {
    if idx.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (pos, &j) in idx.iter().enumerate().skip(1) {
        let rest: Vec<usize> = idx[1..].iter().copied().filter(|&r| r != j).collect();
        let sign = if pos % 2 == 1 { 1.0 } else { -1.0 };
        total += a[(idx[0], j)] * sign * expand(a, &rest);
    }
    total
}

/// Finite set X ⊂ ℤ, stored sorted and without repeats.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct CorrelationQuery {
    points: Vec<i64>,
}

impl CorrelationQuery {
    pub fn new(mut points: Vec<i64>) -> Result<Self> {
        points.sort_unstable();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(format!("repeated point in {points:?}")));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[i64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl TryFrom<Vec<i64>> for CorrelationQuery {
    type Error = Error;

    fn try_from(points: Vec<i64>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<CorrelationQuery> for Vec<i64> {
    fn from(q: CorrelationQuery) -> Self {
        q.points
    }
}

/// The 2n × 2n matrix with 2×2 blocks K(x_i, x_j).
pub fn correlation_matrix(source: &impl KernelSource, query: &CorrelationQuery) -> Result<AntisymmetricMatrix> {
    let mut nodes: Vec<i64> = query.points().iter().flat_map(|&x| [x, x + 1]).collect();
    nodes.sort_unstable();
    nodes.dedup();
    let position: BTreeMap<i64, usize> = nodes.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let grid = source.scalar_grid(&nodes, &nodes)?;
    let s = |a: i64, b: i64| grid[position[&a]][position[&b]];
    let pts = query.points();
    let n = pts.len();
    let mat = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let (x, y) = (pts[r / 2], pts[c / 2]);
        match (r % 2, c % 2) {
            (0, 0) => s(x + 1, y + 1),
            (0, 1) => -s(x + 1, y),
            (1, 0) => -s(x, y + 1),
            _ => s(x, y),
        }
    });
    AntisymmetricMatrix::new(mat)
}

/// ρ(X) = Pf[K(x_i, x_j)]; ρ(∅) = 1.
pub fn correlation_pfaffian(source: &impl KernelSource, query: &CorrelationQuery) -> Result<Complex64> {
    if query.is_empty() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    correlation_matrix(source, query)?.pfaffian()
}
