//! Python bindings: spectra, zeta functions, complex dimensions, Dixmier
//! values, graph/tree/gasket distances and measure states.
//!
//! Shapes are selected by the same strings as the CLI: `gasket`, `tree:f2`,
//! `edge:LEN`, `circle:R[:translated]`, `tree:FILE`, `graph:FILE`.

use std::cell::RefCell;

use num_complex::Complex64;
use pyo3::exceptions::{PyStopIteration, PyValueError};
use pyo3::prelude::*;

use fractal_spectra::cli::{parse_shape, CliError};
use fractal_spectra::dimension as dim;
use fractal_spectra::gasket::{self, PlanePoint};
use fractal_spectra::graph::{GraphPoint, WeightedGraph};
use fractal_spectra::spectrum::{self, SpectrumSpec, SpectrumStream};
use fractal_spectra::tree::{Tree, TreePoint};
use fractal_spectra::zeta;

fn core_err(e: fractal_spectra::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn cli_err(e: CliError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn spec_for(shape: &str) -> PyResult<SpectrumSpec> {
    let parsed = parse_shape(shape).map_err(cli_err)?;
    fractal_spectra::cli::shape_spectrum_spec(&parsed).map_err(cli_err)
}

/// Wraps a Python callable as a plane function, capturing the first error.
fn with_plane_function<R>(
    f: &Bound<'_, PyAny>,
    body: impl FnOnce(&dyn Fn(PlanePoint) -> f64) -> R,
) -> PyResult<R> {
    let failure: RefCell<Option<PyErr>> = RefCell::new(None);
    let g = |p: PlanePoint| -> f64 {
        match f.call1((p.x, p.y)).and_then(|v| v.extract::<f64>()) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let out = body(&g);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

// ---------------------------------------------------------------------------
// zeta functions and dimensions
// ---------------------------------------------------------------------------

#[pyfunction]
fn riemann_zeta(z: Complex64) -> PyResult<Complex64> {
    zeta::riemann_zeta(z).map_err(core_err)
}

#[pyfunction]
fn odd_zeta_factor(z: Complex64) -> PyResult<Complex64> {
    zeta::odd_zeta_factor(z).map_err(core_err)
}

#[pyfunction]
fn gasket_zeta(z: Complex64) -> PyResult<Complex64> {
    zeta::gasket_zeta(z).map_err(core_err)
}

/// Truncated spectral zeta sum with its certified tail bound.
#[pyfunction]
#[pyo3(signature = (shape, z, target=1e-8))]
fn truncated_spectral_zeta(shape: &str, z: Complex64, target: f64) -> PyResult<(Complex64, f64)> {
    zeta::truncated_spectral_zeta(&spec_for(shape)?, z, target).map_err(core_err)
}

#[pyfunction]
fn gasket_dimension() -> f64 {
    gasket::gasket_dimension()
}

/// Poles of the shape's zeta form in a rectangular window:
/// `(location, order, residue)` triples.
#[pyfunction]
fn complex_dimensions(
    shape: &str,
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
) -> PyResult<Vec<(Complex64, u32, Complex64)>> {
    let form = form_for(shape)?;
    let window = dim::Window::new(re_min, re_max, im_min, im_max).map_err(core_err)?;
    Ok(dim::complex_dimensions(&form, &window)
        .map_err(core_err)?
        .into_iter()
        .map(|p| (p.location, p.order, p.residue))
        .collect())
}

fn form_for(shape: &str) -> PyResult<zeta::MeromorphicForm> {
    match shape {
        "gasket" => Ok(zeta::MeromorphicForm::gasket()),
        "tree:f2" => zeta::MeromorphicForm::tree(&zeta::GeometricLengthFamily::f2())
            .map_err(core_err),
        other => Err(PyValueError::new_err(format!(
            "no meromorphic form for shape `{other}`"
        ))),
    }
}

#[pyfunction]
fn dixmier_residue(shape: &str, d: f64) -> PyResult<f64> {
    dim::dixmier_residue(&form_for(shape)?, d).map_err(core_err)
}

#[pyfunction]
fn dixmier_partial_sums(shape: &str, d: f64, n_list: Vec<u64>) -> PyResult<Vec<f64>> {
    let stream = spec_for(shape)?.stream().map_err(core_err)?;
    dim::dixmier_partial_sums(stream, d, &n_list).map_err(core_err)
}

#[pyfunction]
fn counting_function(shape: &str, lambda: f64) -> PyResult<u64> {
    Ok(spectrum::counting_function(
        spec_for(shape)?.stream().map_err(core_err)?,
        lambda,
    ))
}

/// Regression estimate of the metric dimension: `(slope, band)`.
#[pyfunction]
fn metric_dimension_empirical(shape: &str, lambda_min: f64, lambda_max: f64) -> PyResult<(f64, f64)> {
    let fit = dim::metric_dimension_empirical(
        spec_for(shape)?.stream().map_err(core_err)?,
        lambda_min,
        lambda_max,
    )
    .map_err(core_err)?;
    Ok((fit.slope, fit.band))
}

// ---------------------------------------------------------------------------
// spectra
// ---------------------------------------------------------------------------

/// Lazy spectrum iterator yielding `(magnitude, multiplicity)` pairs.
#[pyclass(unsendable)]
struct Spectrum {
    stream: SpectrumStream,
}

#[pymethods]
impl Spectrum {
    #[new]
    fn new(shape: &str) -> PyResult<Self> {
        Ok(Spectrum {
            stream: spec_for(shape)?.stream().map_err(core_err)?,
        })
    }

    fn __iter__(slf: PyRef<'_, Self>) -> PyRef<'_, Self> {
        slf
    }

    fn __next__(&mut self) -> PyResult<(f64, u64)> {
        match self.stream.next() {
            Some(line) => Ok((line.magnitude, line.multiplicity)),
            None => Err(PyStopIteration::new_err(())),
        }
    }

    /// Next `n` lines as a list.
    fn take(&mut self, n: usize) -> Vec<(f64, u64)> {
        (&mut self.stream)
            .take(n)
            .map(|l| (l.magnitude, l.multiplicity))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// length families
// ---------------------------------------------------------------------------

/// Self-similar edge-length family: `count_ratio^(n-1) * initial_count`
/// edges of length `initial_length * length_ratio^(n-1)` at level `n`.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct LengthFamily {
    inner: zeta::GeometricLengthFamily,
}

#[pymethods]
impl LengthFamily {
    #[new]
    fn new(initial_count: u64, count_ratio: f64, initial_length: f64, length_ratio: f64) -> PyResult<Self> {
        Ok(LengthFamily {
            inner: zeta::GeometricLengthFamily::new(
                initial_count,
                count_ratio,
                initial_length,
                length_ratio,
            )
            .map_err(core_err)?,
        })
    }

    #[staticmethod]
    fn f2() -> Self {
        LengthFamily {
            inner: zeta::GeometricLengthFamily::f2(),
        }
    }

    fn count(&self, n: u32) -> f64 {
        self.inner.count(n)
    }

    fn length(&self, n: u32) -> f64 {
        self.inner.length(n)
    }

    fn metric_dimension(&self) -> f64 {
        dim::metric_dimension_analytic(&self.inner)
    }

    fn geometric_zeta(&self, z: Complex64) -> PyResult<Complex64> {
        zeta::geometric_zeta(&self.inner, z).map_err(core_err)
    }

    fn tree_zeta(&self, z: Complex64) -> PyResult<Complex64> {
        zeta::tree_zeta(&self.inner, z).map_err(core_err)
    }
}

// ---------------------------------------------------------------------------
// graphs
// ---------------------------------------------------------------------------

/// Finite weighted metric graph; points are `(edge, offset)` pairs.
#[pyclass(name = "WeightedGraph")]
struct PyWeightedGraph {
    inner: WeightedGraph,
}

#[pymethods]
impl PyWeightedGraph {
    #[new]
    fn new(vertex_count: usize, edges: Vec<(usize, usize, f64)>) -> PyResult<Self> {
        Ok(PyWeightedGraph {
            inner: WeightedGraph::new(vertex_count, &edges).map_err(core_err)?,
        })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyWeightedGraph {
            inner: WeightedGraph::from_edge_list_text(text).map_err(core_err)?,
        })
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    /// Shortest-path distance; `inf` when disconnected.
    fn geodesic(&self, p: (usize, f64), q: (usize, f64)) -> PyResult<f64> {
        let p = self.inner.point(p.0, p.1).map_err(core_err)?;
        let q = self.inner.point(q.0, q.1).map_err(core_err)?;
        self.inner.geodesic_distance(p, q).map_err(core_err)
    }

    /// Sup of `f(p) - f(q)` over slope-bounded vertex assignments; equals
    /// the geodesic distance on connected graphs.
    fn lipschitz_dual(&self, p: (usize, f64), q: (usize, f64)) -> PyResult<f64> {
        let p = GraphPoint { edge: p.0, offset: p.1 };
        let q = GraphPoint { edge: q.0, offset: q.1 };
        self.inner.lipschitz_sup_distance(p, q).map_err(core_err)
    }
}

// ---------------------------------------------------------------------------
// trees
// ---------------------------------------------------------------------------

/// Rooted tree with sequence-space metrics; the flagship constructor is the
/// truncated Cayley tree of the two-generator free group.
#[pyclass(name = "Tree")]
struct PyTree {
    inner: Tree,
}

#[pymethods]
impl PyTree {
    #[staticmethod]
    fn cayley_f2(depth: usize) -> PyResult<Self> {
        Ok(PyTree {
            inner: Tree::cayley_f2(depth).map_err(core_err)?,
        })
    }

    #[staticmethod]
    fn from_text(text: &str, root: usize) -> PyResult<Self> {
        let graph = WeightedGraph::from_edge_list_text(text).map_err(core_err)?;
        Ok(PyTree {
            inner: Tree::from_graph(graph, root).map_err(core_err)?,
        })
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.graph().vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.graph().edge_count()
    }

    /// Edge counts per level.
    fn census(&self) -> Vec<(u32, usize)> {
        self.inner.edge_census()
    }

    fn word(&self, vertex: usize) -> PyResult<String> {
        self.inner.vertex_word(vertex).map_err(core_err)
    }

    fn dp(&self, x: (usize, f64), y: (usize, f64), p: f64) -> PyResult<f64> {
        let x = self.inner.point(x.0, x.1).map_err(core_err)?;
        let y = self.inner.point(y.0, y.1).map_err(core_err)?;
        self.inner.dp_distance(x, y, p).map_err(core_err)
    }

    fn dinf(&self, x: (usize, f64), y: (usize, f64)) -> PyResult<f64> {
        let x = self.inner.point(x.0, x.1).map_err(core_err)?;
        let y = self.inner.point(y.0, y.1).map_err(core_err)?;
        self.inner.dinf_distance(x, y).map_err(core_err)
    }

    fn geodesic(&self, x: (usize, f64), y: (usize, f64)) -> PyResult<f64> {
        let x = self.inner.point(x.0, x.1).map_err(core_err)?;
        let y = self.inner.point(y.0, y.1).map_err(core_err)?;
        self.inner.geodesic_distance(x, y).map_err(core_err)
    }

    /// Max `|d_p^(u) - d_p^(v)|` over the given point pairs.
    fn rebase_discrepancy(
        &self,
        u: usize,
        v: usize,
        pairs: Vec<((usize, f64), (usize, f64))>,
        p: f64,
    ) -> PyResult<f64> {
        let pts: Vec<(TreePoint, TreePoint)> = pairs
            .into_iter()
            .map(|(a, b)| {
                Ok((
                    self.inner.point(a.0, a.1).map_err(core_err)?,
                    self.inner.point(b.0, b.1).map_err(core_err)?,
                ))
            })
            .collect::<PyResult<_>>()?;
        Ok(self
            .inner
            .rebase_isometry_check(u, v, &pts, p)
            .map_err(core_err)?
            .max_discrepancy)
    }
}

// ---------------------------------------------------------------------------
// gasket geometry and states
// ---------------------------------------------------------------------------

#[pyfunction]
fn on_gasket(p: (f64, f64)) -> bool {
    gasket::on_gasket(PlanePoint::new(p.0, p.1))
}

#[pyfunction]
fn gasket_geodesic(p: (f64, f64), q: (f64, f64)) -> PyResult<f64> {
    gasket::geodesic(PlanePoint::new(p.0, p.1), PlanePoint::new(q.0, q.1)).map_err(core_err)
}

#[pyfunction]
fn gasket_geodesic_graph(p: (f64, f64), q: (f64, f64), level: u32) -> PyResult<f64> {
    gasket::geodesic_graph(PlanePoint::new(p.0, p.1), PlanePoint::new(q.0, q.1), level)
        .map_err(core_err)
}

#[pyfunction]
fn gasket_vertex_geodesic(corner: usize, p: (f64, f64)) -> PyResult<f64> {
    gasket::vertex_geodesic(corner, PlanePoint::new(p.0, p.1)).map_err(core_err)
}

/// Average of a Python callable `f(x, y)` over the level-`n` side midpoints.
#[pyfunction]
fn midpoint_state(f: Bound<'_, PyAny>, n: u32) -> PyResult<f64> {
    with_plane_function(&f, |g| gasket::midpoint_state(&g, n))
}

/// Average of a Python callable over the level-`n` graph vertices.
#[pyfunction]
fn vertex_state(f: Bound<'_, PyAny>, n: u32) -> PyResult<f64> {
    with_plane_function(&f, |g| gasket::vertex_state(&g, n))
}

/// Localized gasket trace of a Python callable at `z` (levels `<= level_cap`).
#[pyfunction]
#[pyo3(signature = (f, z, level_cap=10, quad_points=8))]
fn localized_gasket_trace(
    f: Bound<'_, PyAny>,
    z: Complex64,
    level_cap: u32,
    quad_points: u32,
) -> PyResult<Complex64> {
    with_plane_function(&f, |g| {
        zeta::localized_gasket_trace(g, z, level_cap, quad_points)
    })?
    .map_err(core_err)
}

/// Residue-vs-state comparison for the Hausdorff functional:
/// `(dixmier_value, state_value, relative_discrepancy)`.
#[pyfunction]
#[pyo3(signature = (f, level_cap=10, z_margin=0.5))]
fn hausdorff_check(f: Bound<'_, PyAny>, level_cap: u32, z_margin: f64) -> PyResult<(f64, f64, f64)> {
    let report = with_plane_function(&f, |g| {
        gasket::hausdorff_functional_check(&g, z_margin, level_cap)
    })?
    .map_err(core_err)?;
    Ok((
        report.dixmier_value,
        report.state_value,
        report.relative_discrepancy,
    ))
}

#[pymodule]
fn fractal_spectra_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Spectrum>()?;
    m.add_class::<LengthFamily>()?;
    m.add_class::<PyWeightedGraph>()?;
    m.add_class::<PyTree>()?;
    m.add_function(wrap_pyfunction!(riemann_zeta, m)?)?;
    m.add_function(wrap_pyfunction!(odd_zeta_factor, m)?)?;
    m.add_function(wrap_pyfunction!(gasket_zeta, m)?)?;
    m.add_function(wrap_pyfunction!(truncated_spectral_zeta, m)?)?;
    m.add_function(wrap_pyfunction!(gasket_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(complex_dimensions, m)?)?;
    m.add_function(wrap_pyfunction!(dixmier_residue, m)?)?;
    m.add_function(wrap_pyfunction!(dixmier_partial_sums, m)?)?;
    m.add_function(wrap_pyfunction!(counting_function, m)?)?;
    m.add_function(wrap_pyfunction!(metric_dimension_empirical, m)?)?;
    m.add_function(wrap_pyfunction!(on_gasket, m)?)?;
    m.add_function(wrap_pyfunction!(gasket_geodesic, m)?)?;
    m.add_function(wrap_pyfunction!(gasket_geodesic_graph, m)?)?;
    m.add_function(wrap_pyfunction!(gasket_vertex_geodesic, m)?)?;
    m.add_function(wrap_pyfunction!(midpoint_state, m)?)?;
    m.add_function(wrap_pyfunction!(vertex_state, m)?)?;
    m.add_function(wrap_pyfunction!(localized_gasket_trace, m)?)?;
    m.add_function(wrap_pyfunction!(hausdorff_check, m)?)?;
    Ok(())
}
