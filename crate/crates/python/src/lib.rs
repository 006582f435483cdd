use nalgebra::{DMatrix, DVector};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ulamfloat_core::floating::{self, BodyApproximation, CheckReport};
use ulamfloat_core::weights::{WeightFunction, WeightSpec};
use ulamfloat_core::{asa, calculus, floatsim, special, BodyHandle, BodySpec, Direction};

fn err(e: ulamfloat_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

fn direction(v: &[f64]) -> PyResult<Direction> {
    Direction::from_slice(v).map_err(err)
}

/// A convex body: ball, ellipsoid or polytope.
#[pyclass(name = "Body", frozen)]
struct PyBody(BodyHandle);

#[pymethods]
impl PyBody {
    #[staticmethod]
    fn ball(center: Vec<f64>, radius: f64) -> PyResult<Self> {
        BodyHandle::ball(vec(&center), radius).map(Self).map_err(err)
    }

    /// `{x : (x-c)^T A (x-c) <= 1}` with `A` given row by row.
    #[staticmethod]
    fn ellipsoid(center: Vec<f64>, shape: Vec<Vec<f64>>) -> PyResult<Self> {
        let n = shape.len();
        if shape.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("shape must be square"));
        }
        let a = DMatrix::from_fn(n, n, |i, j| shape[i][j]);
        BodyHandle::ellipsoid(vec(&center), a).map(Self).map_err(err)
    }

    #[staticmethod]
    fn polytope(vertices: Vec<Vec<f64>>) -> PyResult<Self> {
        BodyHandle::polytope(vertices.iter().map(|v| vec(v)).collect()).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(spec: &str) -> PyResult<Self> {
        BodySpec::from_json(spec).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0.to_spec()).unwrap_or_default()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn volume(&self) -> f64 {
        self.0.volume()
    }

    #[getter]
    fn barycenter(&self) -> Vec<f64> {
        self.0.barycenter().as_slice().to_vec()
    }

    #[getter]
    fn diameter(&self) -> f64 {
        self.0.diameter()
    }

    fn support(&self, v: Vec<f64>) -> f64 {
        self.0.support(&vec(&v))
    }

    fn contains(&self, x: Vec<f64>) -> bool {
        self.0.contains(&vec(&x))
    }

    /// Volume 1, barycenter at the origin.
    fn normalized(&self) -> PyResult<Self> {
        self.0.normalized().map(Self).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Body({})", self.to_json())
    }
}

/// Weight function; `None` in the functions below means uniform.
#[pyclass(name = "Weight", frozen)]
struct PyWeight(WeightFunction);

#[pymethods]
impl PyWeight {
    #[staticmethod]
    fn uniform() -> Self {
        Self(WeightFunction::uniform())
    }

    #[staticmethod]
    fn gaussian(center: Vec<f64>, sigma: f64) -> PyResult<Self> {
        WeightFunction::gaussian(vec(&center), sigma).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(spec: &str, host: &PyBody) -> PyResult<Self> {
        WeightSpec::from_json(spec, &host.0).map(Self).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Weight({})", self.0.label())
    }
}

fn weighted(body: &PyBody, weight: Option<&PyWeight>) -> PyResult<floating::WeightedBody> {
    let w = weight.map_or_else(WeightFunction::uniform, |w| w.0.clone());
    floating::WeightedBody::new(body.0.clone(), w).map_err(err)
}

fn approximation<'py>(py: Python<'py>, a: &BodyApproximation) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("kind", format!("{:?}", a.kind))?;
    d.set_item("param", a.param)?;
    d.set_item("directions", a.directions.iter().map(|t| t.as_slice().to_vec()).collect::<Vec<_>>())?;
    d.set_item("support", a.support_values.clone())?;
    d.set_item("boundary_points", a.boundary_points.iter().map(|x| x.as_slice().to_vec()).collect::<Vec<_>>())?;
    d.set_item("volume", a.volume_bracket())?;
    d.set_item("hausdorff", a.hausdorff)?;
    Ok(d)
}

fn report<'py>(py: Python<'py>, r: &CheckReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("name", &r.name)?;
    d.set_item("holds", r.holds)?;
    d.set_item("worst", r.worst)?;
    d.set_item("tolerance", r.tolerance)?;
    d.set_item("witness", r.witness.as_ref().map(|w| format!("{w:?}")))?;
    Ok(d)
}

/// Total mass of the weight on the body.
#[pyfunction]
#[pyo3(signature = (body, weight=None))]
fn total_mass(body: &PyBody, weight: Option<&PyWeight>) -> PyResult<f64> {
    Ok(weighted(body, weight)?.total)
}

/// `(d, barycenter)` of the cap `{<x,theta> >= d}` of mass `delta`.
#[pyfunction]
#[pyo3(signature = (body, theta, delta, weight=None))]
fn cap_cut(body: &PyBody, theta: Vec<f64>, delta: f64, weight: Option<&PyWeight>) -> PyResult<(f64, Vec<f64>)> {
    let c = weighted(body, weight)?.cap_cut(&direction(&theta)?, delta).map_err(err)?;
    Ok((c.d, c.barycenter.as_slice().to_vec()))
}

/// `(h, x)`: support value and boundary point of `M_delta` in direction `theta`.
#[pyfunction]
#[pyo3(signature = (body, theta, delta, weight=None))]
fn ulam_support(body: &PyBody, theta: Vec<f64>, delta: f64, weight: Option<&PyWeight>) -> PyResult<(f64, Vec<f64>)> {
    let (h, x) = floating::ulam_support(&weighted(body, weight)?, &direction(&theta)?, delta).map_err(err)?;
    Ok((h, x.as_slice().to_vec()))
}

#[pyfunction]
#[pyo3(signature = (body, delta, directions=512, weight=None))]
fn ulam_body<'py>(
    py: Python<'py>,
    body: &PyBody,
    delta: f64,
    directions: usize,
    weight: Option<&PyWeight>,
) -> PyResult<Bound<'py, PyDict>> {
    let wb = weighted(body, weight)?;
    let a = py.detach(|| floating::build_ulam_body(&wb, delta, directions)).map_err(err)?;
    approximation(py, &a)
}

#[pyfunction]
#[pyo3(signature = (body, delta, directions=512, weight=None))]
fn floating_body<'py>(
    py: Python<'py>,
    body: &PyBody,
    delta: f64,
    directions: usize,
    weight: Option<&PyWeight>,
) -> PyResult<Bound<'py, PyDict>> {
    let wb = weighted(body, weight)?;
    let a = py.detach(|| floating::build_floating_body(&wb, delta, directions)).map_err(err)?;
    approximation(py, &a)
}

#[pyfunction]
#[pyo3(signature = (body, p, directions=512))]
fn zp_body<'py>(py: Python<'py>, body: &PyBody, p: f64, directions: usize) -> PyResult<Bound<'py, PyDict>> {
    let a = py.detach(|| floating::build_zp_body(&body.0, p, directions)).map_err(err)?;
    approximation(py, &a)
}

#[pyfunction]
#[pyo3(signature = (body, delta, directions=512, weight=None))]
fn sandwich_check<'py>(
    py: Python<'py>,
    body: &PyBody,
    delta: f64,
    directions: usize,
    weight: Option<&PyWeight>,
) -> PyResult<Bound<'py, PyDict>> {
    let wb = weighted(body, weight)?;
    let r = py.detach(|| floating::sandwich_check(&wb, delta, directions)).map_err(err)?;
    report(py, &r)
}

#[pyfunction]
#[pyo3(signature = (body, delta, directions=64))]
fn symmetry_check<'py>(py: Python<'py>, body: &PyBody, delta: f64, directions: usize) -> PyResult<Bound<'py, PyDict>> {
    let r = py.detach(|| floating::symmetry_check(&body.0, delta, directions)).map_err(err)?;
    report(py, &r)
}

#[pyfunction]
fn asa_p(body: &PyBody, p: f64) -> PyResult<f64> {
    asa::asa_p(&body.0, p).map_err(err)
}

/// `rho - r` where `M_delta` of the ball of radius `rho` has radius `r`.
#[pyfunction]
fn ball_shrinkage(n: usize, rho: f64, delta: f64) -> PyResult<f64> {
    asa::ball_shrinkage(n, rho, delta).map_err(err)
}

#[pyfunction]
fn shrinkage_constant(n: usize) -> f64 {
    special::shrinkage_constant(n)
}

/// `[(delta, ratio_lo, ratio_hi)]` and the extrapolated limit.
#[pyfunction]
#[pyo3(signature = (body, steps=6, weight=None))]
fn limit_experiment(
    py: Python<'_>,
    body: &PyBody,
    steps: usize,
    weight: Option<&PyWeight>,
) -> PyResult<(Vec<(f64, f64, f64)>, f64, f64)> {
    let wb = weighted(body, weight)?;
    let opts = asa::ExperimentOptions {
        steps,
        ..Default::default()
    };
    let r = py.detach(|| asa::limit_experiment(&wb, &opts)).map_err(err)?;
    let rows = r.steps.iter().map(|s| (s.delta, s.ratio_lo, s.ratio_hi)).collect();
    Ok((rows, r.extrapolated, r.reference))
}

/// `(grad delta(a), DU(a))` from the section formulas.
#[pyfunction]
fn cap_gradients(body: &PyBody, a: Vec<f64>) -> PyResult<(Vec<f64>, Vec<Vec<f64>>)> {
    let p = calculus::evaluate(&body.0, &vec(&a)).map_err(err)?;
    let jac = p.jac_u.row_iter().map(|r| r.iter().copied().collect()).collect();
    Ok((p.grad_delta.as_slice().to_vec(), jac))
}

/// Equilibrium angles of a planar body of area 1 and density `rho`.
#[pyfunction]
#[pyo3(signature = (body, rho, resolution=4096, tol=1e-10))]
fn equilibria(py: Python<'_>, body: &PyBody, rho: f64, resolution: usize, tol: f64) -> PyResult<(Vec<f64>, bool)> {
    let e = py
        .detach(|| floatsim::equilibrium_directions(&body.0, rho, resolution, tol))
        .map_err(err)?;
    Ok((e.angles, e.floats_in_every_position))
}

#[pymodule]
fn ulamfloat(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBody>()?;
    m.add_class::<PyWeight>()?;
    m.add_function(wrap_pyfunction!(total_mass, m)?)?;
    m.add_function(wrap_pyfunction!(cap_cut, m)?)?;
    m.add_function(wrap_pyfunction!(ulam_support, m)?)?;
    m.add_function(wrap_pyfunction!(ulam_body, m)?)?;
    m.add_function(wrap_pyfunction!(floating_body, m)?)?;
    m.add_function(wrap_pyfunction!(zp_body, m)?)?;
    m.add_function(wrap_pyfunction!(sandwich_check, m)?)?;
    m.add_function(wrap_pyfunction!(symmetry_check, m)?)?;
    m.add_function(wrap_pyfunction!(asa_p, m)?)?;
    m.add_function(wrap_pyfunction!(ball_shrinkage, m)?)?;
    m.add_function(wrap_pyfunction!(shrinkage_constant, m)?)?;
    m.add_function(wrap_pyfunction!(limit_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(cap_gradients, m)?)?;
    m.add_function(wrap_pyfunction!(equilibria, m)?)?;
    Ok(())
}
