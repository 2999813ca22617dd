//! Python bindings for the percolab core crate.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use percolab::estimators as est;
use percolab::geometry::{LatticeBox, Vertex};
use percolab::percolation::{cluster_labels, Configuration as CoreConfiguration, ModelParams, Slab};
use percolab::topology::{self, VertexSet, Window};
use percolab::{format, tree, Error};

fn err(e: Error) -> PyErr {
    match e {
        Error::InvalidDimension(_)
        | Error::DimensionMismatch { .. }
        | Error::InvalidProbability(_)
        | Error::InvalidParameter(_)
        | Error::Precondition(_)
        | Error::BoxTooSmall { .. }
        | Error::WindowTooSmall { .. }
        | Error::NotConnected(_)
        | Error::Parse(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn vertex_set(points: Vec<Vec<i32>>) -> PyResult<VertexSet> {
    let vs: Vec<Vertex> = points
        .iter()
        .map(|c| Vertex::new(c))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    VertexSet::try_from_iter(vs).map_err(err)
}

/// `p_fin(T_b)` in closed form.
#[pyfunction]
fn pfin_tree(b: u32) -> PyResult<f64> {
    tree::pfin_tree(b).map(tree::real_to_f64).map_err(err)
}

/// Probability that the origin lies in an infinite component of `X` on `T_b`.
#[pyfunction]
fn kappa(b: u32, p: f64) -> PyResult<f64> {
    tree::kappa(b, p).map(tree::real_to_f64).map_err(err)
}

/// `lim κ(p_fin - ε)/ε` for `T_b`.
#[pyfunction]
fn c_b(b: u32) -> PyResult<f64> {
    tree::c_b(b).map(|l| l.value).map_err(err)
}

/// Extinction probability, moments and the percolation criterion on `T_b`.
#[pyfunction]
fn tree_row<'py>(py: Python<'py>, b: u32, p: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = tree::tree_row(b, p).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("b", r.b)?;
    d.set_item("p", r.p)?;
    d.set_item("eta", r.eta)?;
    d.set_item("t1", r.t1)?;
    d.set_item("k1", r.k1)?;
    d.set_item("percolates", r.percolates)?;
    d.set_item("kappa", r.kappa)?;
    Ok(d)
}

/// `[(n, P(rad C_0 >= n), ci_half_width)]` from one set of samples.
#[pyfunction]
#[pyo3(signature = (d, p, ns, samples, seed, s = 0))]
fn one_arm_curve(
    py: Python<'_>,
    d: usize,
    p: f64,
    ns: Vec<u32>,
    samples: u64,
    seed: u64,
    s: u32,
) -> PyResult<Vec<(u32, f64, f64)>> {
    let params = ModelParams::new(d, p, s, 0).map_err(err)?;
    let curve = py
        .detach(|| est::one_arm_curve(params, &ns, samples, seed))
        .map_err(err)?;
    Ok(curve
        .points
        .iter()
        .map(|pt| (pt.n, pt.estimate.value, pt.estimate.ci_half_width))
        .collect())
}

/// Left-right crossing frequency of `B_n`, as `(value, ci_half_width)`.
#[pyfunction]
fn crossing_probability(py: Python<'_>, d: usize, p: f64, n: u32, samples: u64, seed: u64) -> PyResult<(f64, f64)> {
    let params = ModelParams::nearest(d, p).map_err(err)?;
    let e = py
        .detach(|| est::crossing_probability(params, n, samples, seed))
        .map_err(err)?;
    Ok((e.value, e.ci_half_width))
}

/// Bisection estimate of `p_c` on `B_n`, as `(value, ci_half_width)`.
#[pyfunction]
#[pyo3(signature = (d, n, tol, samples, seed, s = 0))]
fn estimate_pc(py: Python<'_>, d: usize, n: u32, tol: f64, samples: u64, seed: u64, s: u32) -> PyResult<(f64, f64)> {
    let settings = est::Bisection::new(tol, samples);
    let t = py.detach(|| est::estimate_pc(d, s, n, &settings, seed)).map_err(err)?;
    Ok((t.estimate.value, t.estimate.ci_half_width))
}

/// Plaquettes of `Π(A)` for a finite connected `A`, one text line each.
#[pyfunction]
#[pyo3(signature = (points, margin = 4))]
fn pi_of(points: Vec<Vec<i32>>, margin: u32) -> PyResult<Vec<String>> {
    let a = vertex_set(points)?;
    let w = Window::fitting(&a, margin).map_err(err)?;
    let pi = topology::pi_of(&a, &w).map_err(err)?;
    Ok(pi.iter().map(format::facet_to_line).collect())
}

/// Structural checks of `Π(A)`: surface, separation, minimality, fill invariance.
#[pyfunction]
#[pyo3(signature = (points, margin = 4, minimality = true))]
fn lemma_check<'py>(
    py: Python<'py>,
    points: Vec<Vec<i32>>,
    margin: u32,
    minimality: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let a = vertex_set(points)?;
    let c = topology::lemma_check(&a, margin, minimality).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("surface", c.surface)?;
    d.set_item("separates", c.separates)?;
    d.set_item("minimal", c.minimal)?;
    d.set_item("fill_invariant", c.fill_invariant)?;
    d.set_item("passed", c.passed())?;
    Ok(d)
}

/// Hyperplane-surface construction in a slab of `Z^3`.
#[pyfunction]
#[pyo3(signature = (p, height, half_width, seed, d = 3))]
fn hyperplane_experiment<'py>(
    py: Python<'py>,
    p: f64,
    height: u32,
    half_width: u32,
    seed: u64,
    d: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let slab = Slab::new(d, height, half_width).map_err(err)?;
    let (r, _) = py.detach(|| est::hyperplane_experiment(p, &slab, seed)).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("plaquettes", r.plaquettes)?;
    out.set_item("interior_boundary", r.interior_boundary)?;
    out.set_item("interior_plaquettes", r.interior_plaquettes)?;
    out.set_item("phi_injective", r.phi_injective)?;
    out.set_item("censored", r.censored)?;
    Ok(out)
}

/// A sampled bond configuration on `B_n = (-n, n]^d`.
#[pyclass(frozen)]
struct Configuration {
    inner: CoreConfiguration,
}

#[pymethods]
impl Configuration {
    #[staticmethod]
    #[pyo3(signature = (d, p, n, seed, s = 0, f = 0))]
    fn sample(d: usize, p: f64, n: u32, seed: u64, s: u32, f: u32) -> PyResult<Self> {
        let params = ModelParams::new(d, p, s, f).map_err(err)?;
        let bx = LatticeBox::new(d, n).map_err(err)?;
        Ok(Configuration {
            inner: CoreConfiguration::sample(params, bx, seed).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        Ok(Configuration {
            inner: CoreConfiguration::read_from(data).map_err(err)?,
        })
    }

    fn to_bytes<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyBytes>> {
        let mut buf = Vec::new();
        self.inner.write_to(&mut buf).map_err(err)?;
        Ok(PyBytes::new(py, &buf))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.params().d
    }

    #[getter]
    fn p(&self) -> f64 {
        self.inner.params().p
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn open_count(&self) -> usize {
        self.inner.open_count()
    }

    fn is_open(&self, x: Vec<i32>, y: Vec<i32>) -> PyResult<Option<bool>> {
        let x = Vertex::new(&x).map_err(err)?;
        let y = Vertex::new(&y).map_err(err)?;
        Ok(self.inner.is_open(&x, &y))
    }

    /// Sizes of all clusters, largest first.
    fn cluster_sizes(&self) -> Vec<u32> {
        let mut sizes = cluster_labels(&self.inner).sizes().to_vec();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    fn connected(&self, x: Vec<i32>, y: Vec<i32>) -> PyResult<bool> {
        let x = Vertex::new(&x).map_err(err)?;
        let y = Vertex::new(&y).map_err(err)?;
        Ok(cluster_labels(&self.inner).connected(&x, &y))
    }

    fn __repr__(&self) -> String {
        let p = self.inner.params();
        format!(
            "Configuration(d={}, p={}, seed={}, open={}/{})",
            p.d,
            p.p,
            self.inner.seed(),
            self.inner.open_count(),
            self.inner.edge_count()
        )
    }
}

#[pymodule]
pub fn percolab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(pfin_tree, m)?)?;
    m.add_function(wrap_pyfunction!(kappa, m)?)?;
    m.add_function(wrap_pyfunction!(c_b, m)?)?;
    m.add_function(wrap_pyfunction!(tree_row, m)?)?;
    m.add_function(wrap_pyfunction!(one_arm_curve, m)?)?;
    m.add_function(wrap_pyfunction!(crossing_probability, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_pc, m)?)?;
    m.add_function(wrap_pyfunction!(pi_of, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_check, m)?)?;
    m.add_function(wrap_pyfunction!(hyperplane_experiment, m)?)?;
    m.add_class::<Configuration>()?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
