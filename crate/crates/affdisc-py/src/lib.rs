//! Python bindings: bodies, Fourier averages, point sets and discrepancy.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use affdisc::bodies::{self, IntermediateBodySpec};
use affdisc::discrepancy::{self, AffineTransform, D2Result};
use affdisc::experiment;
use affdisc::fourier::{self, AvgOptions, SpectralWeightTable as Table, TableSpec};
use affdisc::pointsets::{self, AnisotropicLatticeSpec, RotatedLatticeSpec};
use affdisc::{AngleInterval, ConvexBody, Vec2};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// A planar convex body.
#[pyclass(name = "Body", module = "pyaffdisc", frozen, skip_from_py_object)]
pub struct PyBody {
    inner: ConvexBody,
}

#[pymethods]
impl PyBody {
    /// Parses `disc`, `square`, `hexagon`, `polygon:N`, `rect:WxH`, `C:PHI:ALPHA`, `H:PHI:ALPHA` or a JSON path.
    #[staticmethod]
    fn parse(spec: &str) -> PyResult<Self> {
        Ok(PyBody { inner: experiment::parse_body(spec).map_err(value_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (radius = 1.0, center = (0.0, 0.0)))]
    fn disc(radius: f64, center: (f64, f64)) -> PyResult<Self> {
        if !(radius > 0.0) {
            return Err(value_err("radius must be positive"));
        }
        Ok(PyBody { inner: bodies::disc(Vec2::new(center.0, center.1), radius) })
    }

    #[staticmethod]
    fn polygon(vertices: Vec<(f64, f64)>) -> PyResult<Self> {
        let v: Vec<Vec2> = vertices.into_iter().map(|(x, y)| Vec2::new(x, y)).collect();
        Ok(PyBody { inner: ConvexBody::polygon(&v).map_err(value_err)? })
    }

    #[staticmethod]
    fn intermediate(phi: f64, alpha: f64) -> PyResult<Self> {
        Ok(PyBody { inner: bodies::make_c(&IntermediateBodySpec::new(phi, alpha)).map_err(value_err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyBody { inner: ConvexBody::from_json(text).map_err(value_err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Copy with diameter 0.8 and centroid (1/2, 1/2).
    fn normalized_for_torus(&self) -> Self {
        PyBody { inner: discrepancy::normalize_for_torus(&self.inner) }
    }

    #[getter]
    fn area(&self) -> f64 {
        self.inner.area()
    }

    #[getter]
    fn perimeter(&self) -> f64 {
        self.inner.perimeter()
    }

    /// `(L, S)`: longest directional diameter and minimal maximal chord.
    fn diameters(&self) -> (f64, f64) {
        self.inner.diameters()
    }

    #[getter]
    fn psi(&self) -> f64 {
        self.inner.angular_trace().psi
    }

    fn chord(&self, theta: f64, lam: f64) -> PyResult<f64> {
        self.inner.chord_length(theta, lam).map_err(value_err)
    }

    fn gamma(&self, theta: f64, lam: f64) -> PyResult<f64> {
        self.inner.gamma(theta, lam).map_err(value_err)
    }

    /// `(left, right)` semi-chord lengths.
    fn semi_chords(&self, theta: f64, lam: f64) -> PyResult<(f64, f64)> {
        let s = self.inner.semi_chords(theta, lam).map_err(value_err)?;
        Ok((s.left_len, s.right_len))
    }

    fn portion_of_perimeter(&self, start: f64, length: f64) -> f64 {
        self.inner.portion_of_perimeter(&AngleInterval::new(start, length))
    }

    fn semichord_average(&self, start: f64, length: f64, lam: f64) -> PyResult<f64> {
        Ok(self.inner.semichord_average(&AngleInterval::new(start, length), lam).map_err(runtime_err)?.value)
    }

    /// Body report as a JSON string.
    fn info(&self) -> String {
        serde_json::to_string(&experiment::body_info(&self.inner)).expect("serializable")
    }

    fn __repr__(&self) -> String {
        format!("Body(area={:.6}, perimeter={:.6})", self.inner.area(), self.inner.perimeter())
    }
}

/// Fourier transform of the indicator at `(x, y)`.
#[pyfunction]
fn ft(body: &PyBody, x: f64, y: f64) -> PyResult<Complex64> {
    fourier::ft(&body.inner, Vec2::new(x, y)).map_err(runtime_err)
}

/// `∫_0^1 δ^p |FT(δρu(θ))|² dδ` for each radius.
#[pyfunction]
#[pyo3(signature = (body, theta, rhos, delta_power = 4))]
fn dilation_avg_sq(body: &PyBody, theta: f64, rhos: Vec<f64>, delta_power: i32) -> PyResult<Vec<f64>> {
    fourier::dilation_avg_sq_many(&body.inner, theta, &rhos, delta_power).map_err(runtime_err)
}

/// Rotation average over `[start, start + length]` of the dilation average.
#[pyfunction]
#[pyo3(signature = (body, start, length, rhos, rel_tol = 1e-6))]
fn rotation_dilation_avg_sq(body: &PyBody, start: f64, length: f64, rhos: Vec<f64>, rel_tol: f64) -> PyResult<Vec<f64>> {
    let opts = AvgOptions { rel_tol, ..AvgOptions::default() };
    let r = fourier::rotation_dilation_avg_sq_many(&body.inner, &AngleInterval::new(start, length), &rhos, &opts)
        .map_err(runtime_err)?;
    Ok(r.value)
}

/// `N` points on the torus, possibly with a lattice structure.
#[pyclass(name = "PointSet", module = "pyaffdisc", frozen, skip_from_py_object)]
pub struct PyPointSet {
    inner: discrepancy::PointSet,
}

#[pymethods]
impl PyPointSet {
    #[new]
    fn new(points: Vec<(f64, f64)>) -> PyResult<Self> {
        let p = points.into_iter().map(|(x, y)| Vec2::new(x, y)).collect();
        Ok(PyPointSet { inner: discrepancy::PointSet::generic(p).map_err(value_err)? })
    }

    #[staticmethod]
    fn square_lattice(k: u64) -> PyResult<Self> {
        Ok(PyPointSet { inner: pointsets::square_lattice(k).map_err(value_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (n, q1 = 1, q2 = 2))]
    fn rotated_lattice(n: u64, q1: i64, q2: i64) -> PyResult<Self> {
        let spec = RotatedLatticeSpec::new(n, q1, q2).map_err(value_err)?;
        Ok(PyPointSet { inner: pointsets::rotated_lattice(&spec).map_err(value_err)? })
    }

    #[staticmethod]
    fn anisotropic_lattice(n: u64, alpha: f64) -> PyResult<Self> {
        let spec = AnisotropicLatticeSpec::new(n, alpha).map_err(value_err)?;
        Ok(PyPointSet { inner: pointsets::anisotropic_lattice(&spec).map_err(value_err)? })
    }

    /// Exactly `n` points from at most four rotated-lattice blocks.
    #[staticmethod]
    #[pyo3(signature = (n, q1 = 1, q2 = 2))]
    fn compose(n: u64, q1: i64, q2: i64) -> PyResult<Self> {
        RotatedLatticeSpec::new(1, q1, q2).map_err(value_err)?;
        let c = pointsets::compose_general_n(n, (0.6, 0.4), 4, |k| {
            pointsets::rotated_lattice(&RotatedLatticeSpec { n: k, q1, q2 })
        })
        .map_err(value_err)?;
        Ok(PyPointSet { inner: c.set })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn points(&self) -> Vec<(f64, f64)> {
        self.inner.points().iter().map(|p| (p.x, p.y)).collect()
    }

    fn exp_sum(&self, m1: i64, m2: i64) -> Complex64 {
        self.inner.exp_sum((m1, m2))
    }

    fn translated(&self, x: f64, y: f64) -> Self {
        PyPointSet { inner: self.inner.translated(Vec2::new(x, y)) }
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        Ok(PyPointSet { inner: discrepancy::PointSet::from_csv(text).map_err(value_err)? })
    }

    /// Truncation radius `multiple × frequency scale`.
    fn truncation_radius(&self, multiple: f64) -> f64 {
        discrepancy::truncation_radius(&self.inner, multiple)
    }
}

/// Tabulated spectral weights `W(ρ, ω)` for one body and rotation interval.
#[pyclass(name = "WeightTable", module = "pyaffdisc", frozen, skip_from_py_object)]
pub struct PyWeightTable {
    inner: Table,
}

#[pymethods]
impl PyWeightTable {
    #[new]
    #[pyo3(signature = (body, start, length, rho_max, angle_step = 0.01, cache_dir = None))]
    fn new(body: &PyBody, start: f64, length: f64, rho_max: f64, angle_step: f64, cache_dir: Option<String>) -> PyResult<Self> {
        let mut spec = TableSpec::new(rho_max);
        spec.angle_step = angle_step;
        let t = experiment::load_or_build_table(
            &body.inner,
            &AngleInterval::new(start, length),
            &spec,
            cache_dir.as_deref().map(std::path::Path::new),
        )
        .map_err(runtime_err)?;
        Ok(PyWeightTable { inner: t })
    }

    fn weight(&self, rho: f64, omega: f64) -> PyResult<f64> {
        self.inner.weight(rho, omega).map_err(value_err)
    }

    #[getter]
    fn rho_max(&self) -> f64 {
        self.inner.rho_max()
    }

    fn save_csv(&self, path: &str) -> PyResult<()> {
        self.inner.save_csv(std::path::Path::new(path)).map_err(runtime_err)
    }

    #[staticmethod]
    fn load_csv(path: &str) -> PyResult<Self> {
        Ok(PyWeightTable { inner: Table::load_csv(std::path::Path::new(path)).map_err(runtime_err)? })
    }
}

fn result_dict<'py>(py: Python<'py>, r: &D2Result) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("n", r.n)?;
    d.set_item("method", serde_json::to_value(r.method).expect("serializable").as_str())?;
    d.set_item("value", r.value)?;
    d.set_item("r", r.r)?;
    d.set_item("tail", r.tail)?;
    d.set_item("stderr", r.stderr)?;
    d.set_item("seed", r.seed)?;
    d.set_item("samples", r.samples)?;
    d.set_item("frequencies", r.frequencies)?;
    Ok(d)
}

/// `D(P, τ + δσ_θC)`.
#[pyfunction]
fn discrepancy_at(points: &PyPointSet, body: &PyBody, tau: (f64, f64), delta: f64, theta: f64) -> f64 {
    let t = AffineTransform { tau: Vec2::new(tau.0, tau.1), delta, theta };
    discrepancy::discrepancy(points.inner.points(), &body.inner, &t)
}

/// Mean-square discrepancy from the truncated frequency sum.
#[pyfunction]
fn d2_parseval<'py>(
    py: Python<'py>,
    points: &PyPointSet,
    body: &PyBody,
    start: f64,
    length: f64,
    r: f64,
    table: &PyWeightTable,
) -> PyResult<Bound<'py, PyDict>> {
    let res = discrepancy::d2_parseval(&points.inner, &body.inner, &AngleInterval::new(start, length), r, &table.inner)
        .map_err(runtime_err)?;
    result_dict(py, &res)
}

/// Mean-square discrepancy by Monte-Carlo sampling of `(τ, δ, θ)`.
#[pyfunction]
#[pyo3(signature = (points, body, start, length, samples = 100_000, seed = 1))]
fn d2_montecarlo<'py>(
    py: Python<'py>,
    points: &PyPointSet,
    body: &PyBody,
    start: f64,
    length: f64,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let res = py
        .detach(|| discrepancy::d2_montecarlo(&points.inner, &body.inner, &AngleInterval::new(start, length), samples, seed))
        .map_err(runtime_err)?;
    result_dict(py, &res)
}

/// `(lhs, rhs, pass)` of the Cassels-Montgomery inequality on `[−M₁, M₁] × [−M₂, M₂]`.
#[pyfunction]
fn cassels_montgomery(points: &PyPointSet, omega_half: (f64, f64), u_half: (f64, f64)) -> (f64, f64, bool) {
    let r = discrepancy::cassels_montgomery_check(
        &points.inner,
        Vec2::new(omega_half.0, omega_half.1),
        Vec2::new(u_half.0, u_half.1),
    );
    (r.lhs, r.rhs, r.pass)
}

#[pymodule]
fn pyaffdisc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBody>()?;
    m.add_class::<PyPointSet>()?;
    m.add_class::<PyWeightTable>()?;
    m.add_function(wrap_pyfunction!(ft, m)?)?;
    m.add_function(wrap_pyfunction!(dilation_avg_sq, m)?)?;
    m.add_function(wrap_pyfunction!(rotation_dilation_avg_sq, m)?)?;
    m.add_function(wrap_pyfunction!(discrepancy_at, m)?)?;
    m.add_function(wrap_pyfunction!(d2_parseval, m)?)?;
    m.add_function(wrap_pyfunction!(d2_montecarlo, m)?)?;
    m.add_function(wrap_pyfunction!(cassels_montgomery, m)?)?;
    Ok(())
}
