//! Correlation kernels of the Pfaffian point processes: the scalar kernel
//! S(x,y) by several routes and the 2×2 matrix kernel built from it.

pub mod contour;
pub mod finite;
pub mod series;
pub mod upsilon;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specializations::Specialization;
use contour::{kernel_radii, s_contour_grid, QuadratureSettings};
use series::{s_series, table_window, PhiSource, PhiTable, SeriesSettings};

#[derive(Clone, Debug, PartialEq)]
pub enum KernelFamily {
    /// Kernel of the z-measure; evaluated through the specialization π_{−z}.
    ZMeasure {
        z: Complex64,
        xi: f64,
    },
    Plancherel {
        eta: f64,
    },
    Generic(Specialization),
}

impl KernelFamily {
    pub fn specialization(&self) -> Result<Specialization> {
        match self {
            KernelFamily::ZMeasure { z, xi } => Specialization::pi_z(-z, *xi),
            KernelFamily::Plancherel { eta } => Specialization::plancherel(*eta),
            KernelFamily::Generic(spec) => Ok(spec.clone()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelFamily::ZMeasure { .. } => "z",
            KernelFamily::Plancherel { .. } => "plancherel",
            KernelFamily::Generic(_) => "generic",
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelFamily::ZMeasure { z, xi } => write!(f, "z(z={z}, xi={xi})"),
            KernelFamily::Plancherel { eta } => write!(f, "plancherel(eta={eta})"),
            KernelFamily::Generic(spec) => write!(f, "generic({})", spec.label()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Tensor trapezoid rule on the double contour integral.
    Contour,
    /// Υ-series with Φ taken from FFT Laurent coefficients.
    Series,
    /// Υ-series with Φ in closed form (hypergeometric or Bessel).
    Closed,
}

impl Route {
    pub const ALL: [Route; 3] = [Route::Contour, Route::Series, Route::Closed];

    pub fn as_str(&self) -> &'static str {
        match self {
            Route::Contour => "contour",
            Route::Series => "series",
            Route::Closed => "closed",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "contour" => Ok(Route::Contour),
            "series" => Ok(Route::Series),
            "closed" => Ok(Route::Closed),
            other => Err(Error::InvalidParameter(format!(
                "unknown route '{other}' (expected contour, series or closed)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct KernelSettings {
    pub quadrature: QuadratureSettings,
    pub series: SeriesSettings,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: Complex64,
    /// Quadrature change between the last two node counts, or the last
    /// series increment.
    pub error: f64,
}

/// Anything that can tabulate S on a grid.
pub trait KernelSource {
    fn scalar_grid(&self, xs: &[i64], ys: &[i64]) -> Result<Vec<Vec<Complex64>>>;
}

#[derive(Clone, Debug)]
pub struct ScalarKernel {
    family: KernelFamily,
    route: Route,
    settings: KernelSettings,
    spec: Specialization,
}

impl ScalarKernel {
    pub fn new(family: KernelFamily, route: Route, settings: KernelSettings) -> Result<Self> {
        let spec = family.specialization()?;
        if route == Route::Closed && matches!(family, KernelFamily::Generic(_)) {
            return Err(Error::InvalidParameter(
                "the closed route needs the z or plancherel family".into(),
            ));
        }
        if route == Route::Contour {
            kernel_radii(&spec, &settings.quadrature)?;
        }
        Ok(Self {
            family,
            route,
            settings,
            spec,
        })
    }

    pub fn family(&self) -> &KernelFamily {
        &self.family
    }

    pub fn route(&self) -> Route {
        self.route
    }

    pub fn settings(&self) -> &KernelSettings {
        &self.settings
    }

    pub fn specialization(&self) -> &Specialization {
        &self.spec
    }

    pub fn evaluate(&self, x: i64, y: i64) -> Result<KernelValue> {
        Ok(self.evaluate_grid(&[x], &[y])?[0][0])
    }

    pub fn evaluate_grid(&self, xs: &[i64], ys: &[i64]) -> Result<Vec<Vec<KernelValue>>> {
        if self.route == Route::Contour {
            return Ok(s_contour_grid(&self.spec, xs, ys, &self.settings.quadrature)?
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|e| KernelValue {
                            value: e.value,
                            error: e.error,
                        })
                        .collect()
                })
                .collect());
        }
        let table = self.phi_table(xs, ys)?;
        xs.iter()
            .map(|&x| {
                ys.iter()
                    .map(|&y| {
                        let est = s_series(&table, x, y, &self.settings.series);
                        if !est.converged {
                            return Err(Error::Convergence(format!(
                                "S({x},{y}) series still changing by {:e} at K = {}",
                                est.tail, est.truncation
                            )));
                        }
                        Ok(KernelValue {
                            value: est.value,
                            error: est.tail,
                        })
                    })
                    .collect()
            })
            .collect()
    }

    fn phi_table(&self, xs: &[i64], ys: &[i64]) -> Result<PhiTable> {
        let points: Vec<i64> = xs.iter().chain(ys).copied().collect();
        let (lo, hi) = table_window(&points, &self.settings.series);
        let source = match (self.route, &self.family) {
            (Route::Closed, KernelFamily::ZMeasure { z, xi }) => PhiSource::Hypergeometric { z: *z, xi: *xi },
            (Route::Closed, KernelFamily::Plancherel { eta }) => PhiSource::Bessel { eta: *eta },
            _ => PhiSource::Contour(
                &self.spec,
                // Φ lives on its own circle; the kernel radii do not apply
                QuadratureSettings {
                    radius: None,
                    radius2: None,
                    ..self.settings.quadrature
                },
            ),
        };
        PhiTable::build(&source, lo, hi)
    }
}

impl KernelSource for ScalarKernel {
    fn scalar_grid(&self, xs: &[i64], ys: &[i64]) -> Result<Vec<Vec<Complex64>>> {
        Ok(self
            .evaluate_grid(xs, ys)?
            .into_iter()
            .map(|row| row.into_iter().map(|v| v.value).collect())
            .collect())
    }
}

/// S tabulated once on a square window [lo, hi]², for repeated queries.
#[derive(Clone, Debug)]
pub struct TabulatedKernel {
    lo: i64,
    hi: i64,
    values: Vec<Vec<Complex64>>,
}

impl TabulatedKernel {
    pub fn new(source: &impl KernelSource, lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidParameter(format!("empty window [{lo}, {hi}]")));
        }
        let points: Vec<i64> = (lo..=hi).collect();
        Ok(Self {
            lo,
            hi,
            values: source.scalar_grid(&points, &points)?,
        })
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn get(&self, x: i64, y: i64) -> Result<Complex64> {
        let inside = |p: i64| (self.lo..=self.hi).contains(&p);
        if !(inside(x) && inside(y)) {
            return Err(Error::InvalidParameter(format!(
                "({x}, {y}) outside the tabulated window [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(self.values[(x - self.lo) as usize][(y - self.lo) as usize])
    }
}

impl KernelSource for TabulatedKernel {
    fn scalar_grid(&self, xs: &[i64], ys: &[i64]) -> Result<Vec<Vec<Complex64>>> {
        xs.iter()
            .map(|&x| ys.iter().map(|&y| self.get(x, y)).collect())
            .collect()
    }
}

/// K(x,y) = [[S(x+1,y+1), −S(x+1,y)], [−S(x,y+1), S(x,y)]].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MatrixKernel2x2 {
    pub entries: [[Complex64; 2]; 2],
}

impl MatrixKernel2x2 {
    pub fn from_scalar(mut s: impl FnMut(i64, i64) -> Complex64, x: i64, y: i64) -> Self {
        Self {
            entries: [[s(x + 1, y + 1), -s(x + 1, y)], [-s(x, y + 1), s(x, y)]],
        }
    }

    pub fn transpose(&self) -> Self {
        let e = self.entries;
        Self {
            entries: [[e[0][0], e[1][0]], [e[0][1], e[1][1]]],
        }
    }

    /// max |K(x,y) + K(y,x)ᵀ| entrywise, zero for an antisymmetric kernel.
    pub fn asymmetry_against(&self, mirror: &MatrixKernel2x2) -> f64 {
        let t = mirror.transpose();
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.entries[i][j] + t.entries[i][j]).norm());
            }
        }
        worst
    }
}

pub fn matrix_kernel(source: &impl KernelSource, x: i64, y: i64) -> Result<MatrixKernel2x2> {
    let xs = [x, x + 1];
    let ys = [y, y + 1];
    let grid = source.scalar_grid(&xs, &ys)?;
    Ok(MatrixKernel2x2::from_scalar(
        |a, b| grid[(a - x) as usize][(b - y) as usize],
        x,
        y,
    ))
}
