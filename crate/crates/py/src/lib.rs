//! Python module `tnnball`: Plücker coordinates, the cyclic-shift flow and
//! its ball maps, unipotent and amplituhedron flows, and the electrical
//! operators.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde::Serialize;
use serde_json::Value;
use tnnball_cli::verify::{run_verify_suite, Suite, VerifyConfig};
use tnnball_core::amplituhedron::{self as amp, cyclic_polytope_oracle};
use tnnball_core::cyclic::{self, ChartPoint, GrChartFlow};
use tnnball_core::electrical::{self as elec, NoncrossingPartition};
use tnnball_core::flow::{extend_from_ball, retract_to_ball, ContractiveFlow};
use tnnball_core::grassmann::{classify_positivity, plucker_raw, Normalization};
use tnnball_core::unipotent::{self as uni, UnipotentMatrix};
use tnnball_core::{Matrix, Rational, Scalar};

fn err(e: tnnball_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A Python object built through `json.loads`.
fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<Matrix<f64>> {
    Matrix::from_rows(rows).map_err(err)
}

fn exact_matrix(rows: Vec<Vec<String>>) -> PyResult<Matrix<Rational>> {
    let parsed = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|s| Rational::parse_str(s).ok_or_else(|| PyValueError::new_err(format!("not a rational: {s:?}"))))
                .collect::<PyResult<Vec<_>>>()
        })
        .collect::<PyResult<Vec<_>>>()?;
    Matrix::from_rows(parsed).map_err(err)
}

fn normalization(name: &str) -> PyResult<Normalization> {
    match name {
        "max_abs" => Ok(Normalization::MaxAbs),
        "first_nonzero" => Ok(Normalization::FirstNonzero),
        "raw" => Ok(Normalization::Raw),
        _ => Err(PyValueError::new_err(format!("unknown normalization {name:?}"))),
    }
}

fn keyed<T>(p: &tnnball_core::grassmann::PluckerVector<T>, f: impl Fn(&T) -> Value) -> Vec<(String, Value)>
where
    T: Scalar,
{
    p.iter()
        .map(|(s, x)| (s.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(","), f(x)))
        .collect()
}

/// Plücker coordinates as `{"1,2": value, ..}`.
#[pyfunction]
#[pyo3(signature = (rows, normalize = "max_abs"))]
fn plucker<'py>(py: Python<'py>, rows: Vec<Vec<f64>>, normalize: &str) -> PyResult<Bound<'py, PyAny>> {
    let p = plucker_raw(&matrix(rows)?).map_err(err)?.normalized(normalization(normalize)?);
    let map: serde_json::Map<String, Value> = keyed(&p, |x| Value::from(*x)).into_iter().collect();
    to_py(py, &map)
}

/// Exact Plücker coordinates of a matrix of `"p/q"` strings.
#[pyfunction]
#[pyo3(signature = (rows, normalize = "first_nonzero"))]
fn plucker_exact<'py>(py: Python<'py>, rows: Vec<Vec<String>>, normalize: &str) -> PyResult<Bound<'py, PyAny>> {
    let p = plucker_raw(&exact_matrix(rows)?).map_err(err)?.normalized(normalization(normalize)?);
    let map: serde_json::Map<String, Value> = keyed(&p, |x| Value::from(x.to_string())).into_iter().collect();
    to_py(py, &map)
}

/// `"TP"`, `"TNN_boundary"` or `"not_TNN"` for the row span of a matrix.
#[pyfunction]
#[pyo3(signature = (rows, tol = 1e-9))]
fn classify(rows: Vec<Vec<f64>>, tol: f64) -> PyResult<&'static str> {
    let p = plucker_raw(&matrix(rows)?).map_err(err)?.normalized(Normalization::MaxAbs);
    Ok(classify_positivity(&p, tol).label())
}

#[pyfunction]
fn tau_eigenvalues(k: usize, n: usize) -> PyResult<Vec<f64>> {
    cyclic::tau_eigenvalues(k, n).map_err(err)
}

/// Unnormalized Plücker coordinates of the fixed point `X0`.
#[pyfunction]
fn x0_plucker(k: usize, n: usize) -> PyResult<Vec<f64>> {
    Ok(cyclic::x0_plucker(k, n).map_err(err)?.coords().to_vec())
}

/// The cyclic-shift flow on Gr(k, n) and its chart around `X0`.
#[pyclass(frozen)]
struct TauEigensystem {
    inner: cyclic::TauEigensystem,
}

#[pymethods]
impl TauEigensystem {
    #[new]
    fn new(k: usize, n: usize) -> PyResult<Self> {
        Ok(Self { inner: cyclic::TauEigensystem::new(k, n).map_err(err)? })
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn lambdas(&self) -> Vec<f64> {
        self.inner.lambdas().to_vec()
    }

    #[getter]
    fn spectral_gap(&self) -> f64 {
        self.inner.spectral_gap()
    }

    fn basis(&self) -> Vec<Vec<f64>> {
        self.inner.basis().to_rows()
    }

    fn x0(&self) -> Vec<Vec<f64>> {
        self.inner.x0().to_rows()
    }

    fn chart_embed(&self, a: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        Ok(self.inner.chart_embed(&ChartPoint::new(matrix(a)?)).map_err(err)?.to_rows())
    }

    fn chart_invert(&self, m: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        Ok(self.inner.chart_invert(&matrix(m)?).map_err(err)?.a.to_rows())
    }

    fn flow_chart(&self, t: f64, a: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        Ok(self.inner.flow_chart(t, &ChartPoint::new(matrix(a)?)).map_err(err)?.a.to_rows())
    }

    fn flow_grassmann(&self, t: f64, m: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        Ok(self.inner.flow_grassmann(t, &matrix(m)?).map_err(err)?.to_rows())
    }

    /// `"interior"`, `"closure_boundary"` or `"outside"` for a flat chart point.
    #[pyo3(signature = (point, tol = 1e-9))]
    fn membership<'py>(&self, py: Python<'py>, point: Vec<f64>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &GrChartFlow::new(self.inner.clone()).membership(&point, tol))
    }

    /// The retraction onto the sphere of radius `r`, on flat chart points.
    #[pyo3(signature = (point, r, tol = 1e-10))]
    fn retract_to_ball<'py>(&self, py: Python<'py>, point: Vec<f64>, r: f64, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let f = GrChartFlow::new(self.inner.clone());
        to_py(py, &retract_to_ball(&f, &point, r, tol).map_err(err)?)
    }

    #[pyo3(signature = (point, r, tol = 1e-10))]
    fn extend_from_ball<'py>(&self, py: Python<'py>, point: Vec<f64>, r: f64, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let f = GrChartFlow::new(self.inner.clone());
        to_py(py, &extend_from_ball(&f, &point, r, tol).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!("TauEigensystem(k={}, n={})", self.inner.k(), self.inner.n())
    }
}

/// `a(t) . x` for the unipotent matrix with strict upper part `upper`,
/// listed row by row.
#[pyfunction]
fn a_flow(n: usize, upper: Vec<f64>, t: f64) -> PyResult<Vec<Vec<f64>>> {
    let x = UnipotentMatrix::from_upper(n, &upper).map_err(err)?;
    Ok(uni::a_flow(&t, &x).map_err(err)?.matrix().to_rows())
}

/// b-coordinates `b_ij`, `i < j`, row by row.
#[pyfunction]
#[pyo3(signature = (n, upper, c = 2.0))]
fn b_coords(n: usize, upper: Vec<f64>, c: f64) -> PyResult<Vec<f64>> {
    let x = UnipotentMatrix::from_upper(n, &upper).map_err(err)?;
    Ok(uni::b_coords(&x, &c).map_err(err)?.values)
}

/// `"U_gt0"`, `"U_ge0_boundary"` or `"not_TNN"`.
#[pyfunction]
#[pyo3(signature = (n, upper, tol = 1e-9))]
fn classify_unipotent(n: usize, upper: Vec<f64>, tol: f64) -> PyResult<&'static str> {
    let x = UnipotentMatrix::from_upper(n, &upper).map_err(err)?;
    Ok(uni::classify_u_positivity(&x, tol).label())
}

/// The amplituhedron `Z0 . Gr(k, n)` and its flow.
#[pyclass(frozen)]
struct Amplituhedron {
    inner: amp::AmplituhedronSpec,
}

#[pymethods]
impl Amplituhedron {
    #[new]
    fn new(k: usize, m: usize, n: usize) -> PyResult<Self> {
        Ok(Self { inner: amp::build_spec(k, m, n).map_err(err)? })
    }

    fn z0(&self) -> Vec<Vec<f64>> {
        self.inner.z0().to_rows()
    }

    #[pyo3(signature = (m, tol = 1e-9))]
    fn map(&self, m: Vec<Vec<f64>>, tol: f64) -> PyResult<Vec<Vec<f64>>> {
        Ok(self.inner.amplituhedron_map(&matrix(m)?, tol).map_err(err)?.a.to_rows())
    }

    fn chart_project(&self, a: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        Ok(self.inner.chart_project(&ChartPoint::new(matrix(a)?)).map_err(err)?.a.to_rows())
    }

    fn flow(&self, t: f64, a: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        let p = amp::AmplituhedronPoint { a: matrix(a)? };
        Ok(self.inner.flow_m(t, &p).map_err(err)?.a.to_rows())
    }

    /// Facets of the cyclic polytope; `k = 1` only.
    #[pyo3(signature = (tol = 1e-9))]
    fn hull<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &cyclic_polytope_oracle(&self.inner, tol).map_err(err)?)
    }
}

#[pyfunction]
fn enumerate_nc(n: usize) -> PyResult<Vec<String>> {
    Ok(elec::enumerate_nc(n).map_err(err)?.iter().map(|s| s.to_string()).collect())
}

#[pyfunction]
fn kreweras(n: usize, sigma: &str) -> PyResult<Vec<Vec<usize>>> {
    Ok(NoncrossingPartition::parse(n, sigma).map_err(err)?.kreweras())
}

/// Support of `A_sigma` as `{"1,4": 1, ..}`.
#[pyfunction]
fn a_sigma<'py>(py: Python<'py>, n: usize, sigma: &str) -> PyResult<Bound<'py, PyAny>> {
    let s = NoncrossingPartition::parse(n, sigma).map_err(err)?;
    let map: serde_json::Map<String, Value> = elec::a_sigma(&s).support().into_iter().map(|(k, c)| (k, c.into())).collect();
    to_py(py, &map)
}

#[pyfunction]
fn verify_lemma_ud<'py>(py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &elec::verify_lemma_ud(n).map_err(err)?)
}

/// Exact response matrix; conductances are `"p/q"` strings.
#[pyfunction]
fn response_matrix(boundary: Vec<usize>, edges: Vec<(usize, usize, String)>) -> PyResult<Vec<Vec<String>>> {
    let edges = edges
        .into_iter()
        .map(|(u, v, c)| {
            Rational::parse_str(&c)
                .map(|c| (u, v, c))
                .ok_or_else(|| PyValueError::new_err(format!("not a rational: {c:?}")))
        })
        .collect::<PyResult<Vec<_>>>()?;
    let net = elec::ResistorNetwork::new(boundary, edges).map_err(err)?;
    let lam = elec::response_matrix(&net).map_err(err)?;
    Ok(lam.matrix.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect())
}

#[pyfunction]
#[pyo3(signature = (n, seed = 0, tol = 1e-10))]
fn xn_search<'py>(py: Python<'py>, n: usize, seed: u64, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let h = elec::h_subspace(n).map_err(err)?;
    to_py(py, &elec::xn_search(&h, seed, tol).map_err(err)?)
}

/// Runs a verification suite (`gr`, `flow`, `u`, `amp`, `en` or `all`).
#[pyfunction]
#[pyo3(signature = (suite, seed = 0, tol = None, n = None))]
fn verify<'py>(py: Python<'py>, suite: &str, seed: u64, tol: Option<f64>, n: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let suite = Suite::from_name(suite).ok_or_else(|| PyValueError::new_err(format!("unknown suite {suite:?}")))?;
    let report = py.detach(|| run_verify_suite(suite, &VerifyConfig { seed, tol, n }));
    to_py(py, &report)
}

#[pymodule]
pub fn tnnball(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<TauEigensystem>()?;
    m.add_class::<Amplituhedron>()?;
    m.add_function(wrap_pyfunction!(plucker, m)?)?;
    m.add_function(wrap_pyfunction!(plucker_exact, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(tau_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(x0_plucker, m)?)?;
    m.add_function(wrap_pyfunction!(a_flow, m)?)?;
    m.add_function(wrap_pyfunction!(b_coords, m)?)?;
    m.add_function(wrap_pyfunction!(classify_unipotent, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_nc, m)?)?;
    m.add_function(wrap_pyfunction!(kreweras, m)?)?;
    m.add_function(wrap_pyfunction!(a_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(verify_lemma_ud, m)?)?;
    m.add_function(wrap_pyfunction!(response_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(xn_search, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
