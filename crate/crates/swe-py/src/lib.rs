//! Python bindings for the shallow-water solver suite: configuration and
//! presets, full runs with conservation summaries, the equivariance and
//! convergence harnesses, single 1D scheme steps, and the conserved-quantity
//! and difference-invariant evaluators.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use swe::config::{SchemeId, SimulationConfig};
use swe::diagnostics::{conserved_1d, conserved_2d};
use swe::model::{Grid1D, Grid2D, State1D, State2D};
use swe::runner::{self, StudyAxis};
use swe::schemes1d::{
    step_conservative_explicit, step_conservative_trapezoidal, step_lagrangian_explicit,
    step_lagrangian_trapezoidal,
};
use swe::symmetry::difference_invariants_1d;

fn py_err(e: swe::error::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Simulation configuration: scheme, grid, step sizes, monitor/weight
/// parameters, and output strides.
#[pyclass(name = "Config")]
#[derive(Clone)]
struct PyConfig {
    inner: SimulationConfig,
}

#[pymethods]
impl PyConfig {
    /// Builds one of the bundled presets: fig2, fig3, fig4, fig5, fig5-smoke.
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        Ok(Self { inner: SimulationConfig::preset(name).map_err(py_err)? })
    }

    /// Parses the flat key-value config format used by the CLI.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self { inner: SimulationConfig::parse(text).map_err(py_err)? })
    }

    /// Overrides one key using the same names as the config file format.
    fn set(&mut self, key: &str, value: &str) -> PyResult<()> {
        // The parser honors the first occurrence of a key, so the override
        // goes in front of the serialized current configuration.
        let text = format!("{key} = {value}\n{}", self.inner.to_config_text());
        self.inner = SimulationConfig::parse(&text).map_err(py_err)?;
        Ok(())
    }

    #[getter]
    fn scheme(&self) -> &'static str {
        self.inner.scheme.as_str()
    }

    #[getter]
    fn tau(&self) -> f64 {
        self.inner.tau
    }

    #[getter]
    fn t_final(&self) -> f64 {
        self.inner.t_final
    }

    #[getter]
    fn steps(&self) -> usize {
        self.inner.steps()
    }

    fn __repr__(&self) -> String {
        format!(
            "Config(scheme={}, tau={}, t_final={})",
            self.inner.scheme.as_str(),
            self.inner.tau,
            self.inner.t_final
        )
    }
}

/// Runs a configured simulation; returns a summary dict with the step count,
/// final time, and the relative drift of each conserved quantity. Pass an
/// output directory to also write the CSV files the CLI produces.
#[pyfunction]
#[pyo3(signature = (config, out_dir=None))]
fn run<'py>(
    py: Python<'py>,
    config: &PyConfig,
    out_dir: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let out = runner::run(&config.inner, out_dir.map(std::path::Path::new)).map_err(py_err)?;
    let d = PyDict::new_bound(py);
    d.set_item("steps", out.steps)?;
    d.set_item("t_end", out.t_end)?;
    if let Some(last) = out.series_1d.last() {
        d.set_item("rel_mass", last.rel_m)?;
        d.set_item("rel_momentum", last.rel_p)?;
        d.set_item("rel_energy", last.rel_h)?;
    }
    if let Some(last) = out.series_2d.last() {
        d.set_item("rel_mass", last.rel_m)?;
        d.set_item("rel_momentum_x", last.rel_px)?;
        d.set_item("rel_momentum_y", last.rel_py)?;
        d.set_item("rel_energy", last.rel_h)?;
    }
    if let Some(worst) = out
        .mesh_residuals
        .iter()
        .cloned()
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
    {
        d.set_item("mesh_residual_max", worst)?;
    }
    Ok(d)
}

/// Runs the two-path equivariance suite for the config's dimensionality;
/// returns one dict per scheme × generator × step-count cell.
#[pyfunction]
fn invariance<'py>(py: Python<'py>, config: &PyConfig) -> PyResult<Bound<'py, PyList>> {
    let rows = runner::invariance_suite(&config.inner).map_err(py_err)?;
    let list = PyList::empty_bound(py);
    for row in rows {
        let d = PyDict::new_bound(py);
        d.set_item("scheme", row.scheme.as_str())?;
        d.set_item("generator", row.generator)?;
        d.set_item("steps", row.steps)?;
        d.set_item("discrepancy", row.discrepancy)?;
        d.set_item("tolerance", row.tolerance)?;
        d.set_item("passed", row.passed())?;
        list.append(d)?;
    }
    Ok(list)
}

/// Runs a Richardson self-convergence study. `axis` is "temporal" or
/// "spatial"; returns one dict per refinement comparison.
#[pyfunction]
#[pyo3(signature = (config, levels=3, axis="temporal"))]
fn converge<'py>(
    py: Python<'py>,
    config: &PyConfig,
    levels: usize,
    axis: &str,
) -> PyResult<Bound<'py, PyList>> {
    let axis = match axis {
        "temporal" => StudyAxis::Temporal,
        "spatial" => StudyAxis::Spatial,
        other => {
            return Err(PyValueError::new_err(format!(
                "axis must be 'temporal' or 'spatial', got '{other}'"
            )))
        }
    };
    let rows = runner::convergence_study(&config.inner, levels, axis).map_err(py_err)?;
    let list = PyList::empty_bound(py);
    for row in rows {
        let d = PyDict::new_bound(py);
        d.set_item("level", row.level)?;
        d.set_item("resolution", row.resolution)?;
        d.set_item("error", row.error)?;
        d.set_item("order", row.order)?;
        list.append(d)?;
    }
    Ok(list)
}

fn grid_state_1d(x: Vec<f64>, u: Vec<f64>, h: Vec<f64>, length: f64) -> PyResult<(Grid1D, State1D)> {
    let grid = Grid1D::new(x, length).map_err(py_err)?;
    let state = State1D::new(u, h).map_err(py_err)?;
    Ok((grid, state))
}

/// Advances one step of a 1D scheme ("lagrangian-explicit",
/// "lagrangian-trapezoidal", "conservative-explicit",
/// "conservative-trapezoidal") and returns (x, u, h) at the next level.
#[pyfunction]
#[pyo3(signature = (scheme, x, u, h, length, tau, tol=1e-12, max_iter=200))]
#[allow(clippy::too_many_arguments)]
fn step_1d(
    scheme: &str,
    x: Vec<f64>,
    u: Vec<f64>,
    h: Vec<f64>,
    length: f64,
    tau: f64,
    tol: f64,
    max_iter: usize,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let id = SchemeId::parse(scheme).map_err(py_err)?;
    let (grid, state) = grid_state_1d(x, u, h, length)?;
    let r = match id {
        SchemeId::LagrangianExplicit => step_lagrangian_explicit(&grid, &state, tau),
        SchemeId::LagrangianTrapezoidal => {
            step_lagrangian_trapezoidal(&grid, &state, tau, tol, max_iter)
        }
        SchemeId::ConservativeExplicit => step_conservative_explicit(&grid, &state, tau),
        SchemeId::ConservativeTrapezoidal => {
            step_conservative_trapezoidal(&grid, &state, tau, tol, max_iter)
        }
        other => {
            return Err(PyValueError::new_err(format!(
                "step_1d drives the mesh-free schemes; '{}' needs the full runner",
                other.as_str()
            )))
        }
    }
    .map_err(py_err)?;
    Ok((r.grid.nodes().to_vec(), r.state.u, r.state.h))
}

/// Mass, momentum, and energy of a 1D state on its grid.
#[pyfunction]
fn conserved_quantities_1d(
    x: Vec<f64>,
    u: Vec<f64>,
    h: Vec<f64>,
    length: f64,
) -> PyResult<(f64, f64, f64)> {
    let (grid, state) = grid_state_1d(x, u, h, length)?;
    let c = conserved_1d(&grid, &state);
    Ok((c.m, c.p, c.h))
}

/// Mass, both momenta, and energy of a 2D state on its grid (row-major
/// (j, k) layout, j indexing x).
#[pyfunction]
#[pyo3(signature = (x, y, u, v, h, nx, ny, lx, ly))]
#[allow(clippy::too_many_arguments)]
fn conserved_quantities_2d(
    x: Vec<f64>,
    y: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
    h: Vec<f64>,
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
) -> PyResult<(f64, f64, f64, f64)> {
    let grid = Grid2D::new(x, y, nx, ny, lx, ly, 1.0, 1.0).map_err(py_err)?;
    let state = State2D::new(u, v, h).map_err(py_err)?;
    let c = conserved_2d(&grid, &state, grid.dxi, grid.deta);
    Ok((c.m, c.px, c.py, c.h))
}

/// The twelve difference invariants of the two-level stencil at node i.
#[pyfunction]
#[pyo3(signature = (x, u, h, x_hat, u_hat, h_hat, length, tau, i))]
#[allow(clippy::too_many_arguments)]
fn invariants_1d(
    x: Vec<f64>,
    u: Vec<f64>,
    h: Vec<f64>,
    x_hat: Vec<f64>,
    u_hat: Vec<f64>,
    h_hat: Vec<f64>,
    length: f64,
    tau: f64,
    i: usize,
) -> PyResult<Vec<f64>> {
    let (grid, state) = grid_state_1d(x, u, h, length)?;
    let (hat_grid, hat_state) = grid_state_1d(x_hat, u_hat, h_hat, length)?;
    let set = difference_invariants_1d(&grid, &hat_grid, &state, &hat_state, tau, i as i64)
        .map_err(py_err)?;
    Ok(set.as_array().to_vec())
}

#[pymodule]
fn swe_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfig>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(invariance, m)?)?;
    m.add_function(wrap_pyfunction!(converge, m)?)?;
    m.add_function(wrap_pyfunction!(step_1d, m)?)?;
    m.add_function(wrap_pyfunction!(conserved_quantities_1d, m)?)?;
    m.add_function(wrap_pyfunction!(conserved_quantities_2d, m)?)?;
    m.add_function(wrap_pyfunction!(invariants_1d, m)?)?;
    Ok(())
}
