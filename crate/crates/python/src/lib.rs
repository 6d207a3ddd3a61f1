//! Python bindings: partitions, specializations, kernels, Pfaffians and the
//! brute-force oracle.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use pfpart::kernels::contour::QuadratureSettings;
use pfpart::kernels::matrix_kernel;
use pfpart::measures::{mixed_measure, plancherel_mixed, PlancherelParams, ZMeasureParams};
use pfpart::oracle::{identity_suite, MeasureEvaluator, SuiteParams, TruncationPolicy, WeightedEnsemble};
use pfpart::pfaffian::correlation_pfaffian;
use pfpart::{AntisymmetricMatrix, CorrelationQuery, KernelFamily, KernelSettings, KernelSource, Route};

create_exception!(pfpart, PfpartError, PyException);

fn py_err(e: pfpart::Error) -> PyErr {
    match e {
        pfpart::Error::InvalidParameter(_) | pfpart::Error::Domain(_) => PyValueError::new_err(e.to_string()),
        other => PfpartError::new_err(other.to_string()),
    }
}

#[pyclass(name = "Partition", module = "pfpart", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyPartition(pfpart::Partition);

#[pymethods]
impl PyPartition {
    #[new]
    fn new(parts: Vec<u32>) -> PyResult<Self> {
        pfpart::Partition::new(parts).map(Self).map_err(py_err)
    }

    #[getter]
    fn parts(&self) -> Vec<u32> {
        self.0.parts().to_vec()
    }

    #[getter]
    fn size(&self) -> u32 {
        self.0.size()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn conjugate(&self) -> Self {
        Self(self.0.conjugate())
    }

    fn descent_set_d2(&self, count: usize) -> Vec<i64> {
        self.0.descent_set_d2(count)
    }

    /// (H(λ, θ), H′(λ, θ))
    fn hook_products(&self, theta: f64) -> (f64, f64) {
        pfpart::partitions::hook_products(&self.0, &theta)
    }

    fn __repr__(&self) -> String {
        format!("Partition({:?})", self.0.parts())
    }
}

#[pyfunction]
fn enumerate_partitions(n: u32) -> Vec<PyPartition> {
    pfpart::partitions::enumerate_partitions(n)
        .into_iter()
        .map(PyPartition)
        .collect()
}

#[pyclass(name = "Specialization", module = "pfpart", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpecialization(pfpart::Specialization);

#[pymethods]
impl PySpecialization {
    #[staticmethod]
    fn pi_z(z: Complex64, xi: f64) -> PyResult<Self> {
        pfpart::Specialization::pi_z(z, xi).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn plancherel(eta: f64) -> PyResult<Self> {
        pfpart::Specialization::plancherel(eta).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn from_coefficients(coefficients: Vec<Complex64>) -> PyResult<Self> {
        pfpart::Specialization::from_coefficients(coefficients)
            .map(Self)
            .map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        pfpart::Specialization::from_json(text).map(Self).map_err(py_err)
    }

    fn e(&self, k: i64) -> Complex64 {
        self.0.e(k)
    }

    fn e_coefficients(&self, max: usize) -> Vec<Complex64> {
        self.0.e_coefficients(max)
    }

    fn e_series(&self, w: Complex64) -> PyResult<Complex64> {
        self.0.e_series(w).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Specialization({})", self.0.label())
    }
}

fn family_from_args(
    family: &str,
    z: Option<Complex64>,
    xi: Option<f64>,
    eta: Option<f64>,
    specialization: Option<&PySpecialization>,
) -> PyResult<KernelFamily> {
    let missing = |what: &str| PyValueError::new_err(format!("family '{family}' needs {what}"));
    match family {
        "z" => Ok(KernelFamily::ZMeasure {
            z: z.ok_or_else(|| missing("z"))?,
            xi: xi.ok_or_else(|| missing("xi"))?,
        }),
        "plancherel" => Ok(KernelFamily::Plancherel {
            eta: eta.ok_or_else(|| missing("eta"))?,
        }),
        "generic" => Ok(KernelFamily::Generic(
            specialization.ok_or_else(|| missing("specialization"))?.0.clone(),
        )),
        other => Err(PyValueError::new_err(format!(
            "unknown family '{other}' (expected z, plancherel or generic)"
        ))),
    }
}

/// The scalar kernel S(x, y) by one of the routes contour, series, closed.
#[pyclass(name = "ScalarKernel", module = "pfpart", frozen)]
struct PyScalarKernel(pfpart::ScalarKernel);

#[pymethods]
impl PyScalarKernel {
    #[new]
    #[pyo3(signature = (family, route = "closed", *, z = None, xi = None, eta = None, specialization = None, radius = None))]
    fn new(
        family: &str,
        route: &str,
        z: Option<Complex64>,
        xi: Option<f64>,
        eta: Option<f64>,
        specialization: Option<PyRef<'_, PySpecialization>>,
        radius: Option<f64>,
    ) -> PyResult<Self> {
        let family = family_from_args(family, z, xi, eta, specialization.as_deref())?;
        let route: Route = route.parse().map_err(py_err)?;
        let settings = KernelSettings {
            quadrature: QuadratureSettings {
                radius,
                radius2: radius,
                ..QuadratureSettings::default()
            },
            ..KernelSettings::default()
        };
        pfpart::ScalarKernel::new(family, route, settings)
            .map(Self)
            .map_err(py_err)
    }

    #[getter]
    fn route(&self) -> &'static str {
        self.0.route().as_str()
    }

    /// (S(x, y), error estimate)
    fn evaluate(&self, py: Python<'_>, x: i64, y: i64) -> PyResult<(Complex64, f64)> {
        let v = py.detach(|| self.0.evaluate(x, y)).map_err(py_err)?;
        Ok((v.value, v.error))
    }

    fn grid(&self, py: Python<'_>, xs: Vec<i64>, ys: Vec<i64>) -> PyResult<Vec<Vec<Complex64>>> {
        py.detach(|| self.0.scalar_grid(&xs, &ys)).map_err(py_err)
    }

    /// K(x, y) as a nested 2×2 list.
    fn matrix(&self, py: Python<'_>, x: i64, y: i64) -> PyResult<Vec<Vec<Complex64>>> {
        let k = py.detach(|| matrix_kernel(&self.0, x, y)).map_err(py_err)?;
        Ok(k.entries.iter().map(|row| row.to_vec()).collect())
    }

    /// ρ(X) as the Pfaffian of the 2×2 kernel blocks.
    fn correlation(&self, py: Python<'_>, points: Vec<i64>) -> PyResult<Complex64> {
        let query = CorrelationQuery::new(points).map_err(py_err)?;
        py.detach(|| correlation_pfaffian(&self.0, &query)).map_err(py_err)
    }
}

#[pyfunction]
fn pfaffian(rows: Vec<Vec<Complex64>>) -> PyResult<Complex64> {
    AntisymmetricMatrix::from_rows(&rows)
        .and_then(|a| a.pfaffian())
        .map_err(py_err)
}

#[pyfunction]
fn z_measure(z: Complex64, xi: f64, partition: &PyPartition) -> PyResult<Complex64> {
    let p = ZMeasureParams::theta2(z, xi).map_err(py_err)?;
    mixed_measure(&p, &partition.0).map_err(py_err)
}

#[pyfunction]
fn plancherel_measure(eta: f64, partition: &PyPartition) -> PyResult<f64> {
    let p = PlancherelParams::new(eta).map_err(py_err)?;
    Ok(plancherel_mixed(&p, 2.0, &partition.0))
}

/// Brute-force ρ(X) by enumeration; returns (value, tail estimate).
#[pyfunction]
#[pyo3(signature = (family, points, *, z = None, xi = None, eta = None, specialization = None, n_cut = 40, tol = 1e-8))]
#[allow(clippy::too_many_arguments)]
fn oracle_rho(
    py: Python<'_>,
    family: &str,
    points: Vec<i64>,
    z: Option<Complex64>,
    xi: Option<f64>,
    eta: Option<f64>,
    specialization: Option<PyRef<'_, PySpecialization>>,
    n_cut: u32,
    tol: f64,
) -> PyResult<(Complex64, f64)> {
    let measure = match family_from_args(family, z, xi, eta, specialization.as_deref())? {
        KernelFamily::ZMeasure { z, xi } => MeasureEvaluator::ZMixed(ZMeasureParams::theta2(z, xi).map_err(py_err)?),
        KernelFamily::Plancherel { eta } => MeasureEvaluator::Plancherel(PlancherelParams::new(eta).map_err(py_err)?),
        KernelFamily::Generic(spec) => MeasureEvaluator::Schur2(spec),
    };
    let query = CorrelationQuery::new(points).map_err(py_err)?;
    let policy = TruncationPolicy::new(n_cut, tol).map_err(py_err)?;
    let value = py
        .detach(|| WeightedEnsemble::new(measure, policy).map(|e| e.rho(&query)))
        .map_err(py_err)?;
    Ok((value.value, value.tail_estimate))
}

/// Runs the identity suite with default parameters; returns
/// (passed, [(name, max_deviation, tolerance, passed), ...]).
#[pyfunction]
fn verify_identities(py: Python<'_>) -> (bool, Vec<(String, f64, f64, bool)>) {
    let report = py.detach(|| identity_suite(&SuiteParams::default()));
    let checks = report
        .checks
        .into_iter()
        .map(|c| (c.name, c.max_deviation, c.tolerance, c.passed))
        .collect();
    (report.passed, checks)
}

#[pymodule]
#[pyo3(name = "pfpart")]
fn pfpart_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PfpartError", m.py().get_type::<PfpartError>())?;
    m.add_class::<PyPartition>()?;
    m.add_class::<PySpecialization>()?;
    m.add_class::<PyScalarKernel>()?;
    m.add_function(wrap_pyfunction!(enumerate_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(pfaffian, m)?)?;
    m.add_function(wrap_pyfunction!(z_measure, m)?)?;
    m.add_function(wrap_pyfunction!(plancherel_measure, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_rho, m)?)?;
    m.add_function(wrap_pyfunction!(verify_identities, m)?)?;
    Ok(())
}
