//! Python bindings for the toolkit's main types and operations.
//!
//! The module mirrors the library's exact/numeric split: spectrum and
//! dGBV pipelines return exact data (rationals as `"p/q"` strings,
//! integers as Python ints), the A_n chart pipeline returns floats and
//! complex numbers.  Reports come back as plain dicts shaped like the
//! CLI's JSON bodies.

use num::BigInt;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use frobenius_core::algfile::{algebra_from_text, algebra_to_text};
use frobenius_core::catalog;
use frobenius_core::dgbv::{
    check_dgbv, conditions_check, identity_suite, integral_check, CheckReport, DGBVAlgebra,
};
use frobenius_core::germ::{compare_germs, germ_from_text, germ_to_text, SemisimpleGerm};
use frobenius_core::mc::{
    cubic_directional_check, euler_check, metric, potential, solve_master, wdvv_check,
    FormalBase,
};
use frobenius_core::qc::{p2_generate, CorrelatorKey};
use frobenius_core::saito::{
    critical_data, direct_sum_verify as ds_verify, eta_jacobian_from_critical, euler_checks,
    flat_coordinates as flat_coords, special_v_matrix, verify_special_point as vsp, AnChart,
};
use frobenius_core::scalar::{rat_is_integer, rat_to_string, Rat};
use frobenius_core::spectrum as spec;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn check_dict<'py>(py: Python<'py>, rep: &CheckReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("checks", rep.checks)?;
    d.set_item("pass", rep.pass())?;
    d.set_item("violations", rep.violations.clone())?;
    Ok(d)
}

fn rat_strings(rs: &[Rat]) -> Vec<String> {
    rs.iter().map(rat_to_string).collect()
}

fn cmatrix_rows(m: &frobenius_core::cmatrix::CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn qmatrix_rows(m: &frobenius_core::qmatrix::QMatrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| rat_to_string(&m[(i, j)])).collect())
        .collect()
}

// ---------------------------------------------------------------- spectrum

/// Betti numbers of the ⊗_k A_{n_k−1} spectrum (exact integers).
#[pyfunction]
fn betti(ns: Vec<usize>) -> PyResult<Vec<u128>> {
    spec::betti(&ns).map_err(value_err)
}

/// The spectrum constant d as `"p/q"` plus its integrality verdict.
#[pyfunction]
fn integrality(ns: Vec<usize>) -> PyResult<(String, bool)> {
    let (d, ok) = spec::integrality(&ns).map_err(value_err)?;
    Ok((rat_to_string(&d), ok))
}

/// Total multiplicity ∏ n_k of the profile.
#[pyfunction]
fn gepner_total(ns: Vec<usize>) -> u128 {
    spec::gepner_total(&ns)
}

// ---------------------------------------------------------------- saito

/// Flat coordinates of the chart with the given coefficients.
#[pyfunction]
#[pyo3(signature = (coeffs, order = 6))]
fn flat_coordinates(coeffs: Vec<Complex64>, order: usize) -> PyResult<Vec<Complex64>> {
    let chart = AnChart::new(coeffs.len(), coeffs).map_err(value_err)?;
    Ok(flat_coords(&chart, order))
}

/// Numeric chain vs. closed forms at `(0,…,0,a_{n−1},a_n)`.
#[pyfunction]
#[pyo3(signature = (n, a_nm1, a_n, tol = 1e-8))]
fn verify_special_point(
    py: Python<'_>,
    n: usize,
    a_nm1: Complex64,
    a_n: Complex64,
    tol: f64,
) -> PyResult<Bound<'_, PyDict>> {
    let rep = vsp(n, a_nm1, a_n, tol).map_err(runtime_err)?;
    let d = PyDict::new(py);
    d.set_item("u_dev", rep.u_dev)?;
    d.set_item("eta_dev", rep.eta_dev)?;
    d.set_item("v_dev", rep.v_dev)?;
    d.set_item("max_dev", rep.max_dev)?;
    d.set_item("permutation", rep.permutation)?;
    Ok(d)
}

/// Direct-sum framework report for two charts, with the product germ.
#[pyfunction]
#[pyo3(signature = (coeffs_a, coeffs_b, tol = 1e-8))]
fn direct_sum_verify(
    py: Python<'_>,
    coeffs_a: Vec<Complex64>,
    coeffs_b: Vec<Complex64>,
    tol: f64,
) -> PyResult<Bound<'_, PyDict>> {
    let ca = AnChart::new(coeffs_a.len(), coeffs_a).map_err(value_err)?;
    let cb = AnChart::new(coeffs_b.len(), coeffs_b).map_err(value_err)?;
    let rep = ds_verify(&ca, &cb, tol).map_err(runtime_err)?;
    let d = PyDict::new(py);
    d.set_item("u_dev", rep.u_dev)?;
    d.set_item("eta_dev", rep.eta_dev)?;
    d.set_item("eta_jac_dev", rep.eta_jac_dev)?;
    d.set_item("block_zero_dev", rep.block_zero_dev)?;
    d.set_item("max_dev", rep.max_dev)?;
    d.set_item("germ", Germ { inner: rep.germ })?;
    Ok(d)
}

// ---------------------------------------------------------------- classes

/// Miniversal A_n chart with numeric critical-point data.
#[pyclass]
struct Chart {
    inner: AnChart,
}

#[pymethods]
impl Chart {
    #[new]
    fn new(coeffs: Vec<Complex64>) -> PyResult<Self> {
        let inner = AnChart::new(coeffs.len(), coeffs).map_err(value_err)?;
        Ok(Chart { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Critical values, residues, and the tameness verdict.
    #[pyo3(signature = (tol = 1e-8))]
    fn critical_data<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyDict>> {
        let cd = critical_data(&self.inner, tol).map_err(runtime_err)?;
        let d = PyDict::new(py);
        d.set_item("u", cd.u.clone())?;
        d.set_item("eta", cd.eta.clone())?;
        d.set_item("sum_eta", cd.sum_eta())?;
        d.set_item("tame", cd.tame)?;
        Ok(d)
    }

    /// Max |η_{jk} − η_{kj}| over the η-Jacobian.
    #[pyo3(signature = (tol = 1e-8))]
    fn eta_symmetry_residual(&self, tol: f64) -> PyResult<f64> {
        let cd = critical_data(&self.inner, tol).map_err(runtime_err)?;
        let ej = eta_jacobian_from_critical(&cd).map_err(runtime_err)?;
        Ok(ej.symmetry_residual())
    }

    /// Euler-field checks by central differences.
    #[pyo3(signature = (tol = 1e-8))]
    fn euler_checks<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyDict>> {
        let rep = euler_checks(&self.inner, tol).map_err(runtime_err)?;
        let d = PyDict::new(py);
        d.set_item("flat_eigen_dev", rep.flat_eigen_dev)?;
        d.set_item("e_eta_dev", rep.e_eta_dev)?;
        d.set_item("euler_eta_dev", rep.euler_eta_dev)?;
        d.set_item("conformal_weight", rep.d_big)?;
        d.set_item("max_dev", rep.max_dev)?;
        Ok(d)
    }

    /// Flat coordinates by series inversion.
    #[pyo3(signature = (order = 6))]
    fn flat(&self, order: usize) -> Vec<Complex64> {
        flat_coords(&self.inner, order)
    }

    /// The chart's semisimple germ (u, η, v); needs a tame chart.
    #[pyo3(signature = (tol = 1e-8))]
    fn germ(&self, tol: f64) -> PyResult<Germ> {
        let cd = critical_data(&self.inner, tol).map_err(runtime_err)?;
        if !cd.tame {
            return Err(runtime_err("chart is not tame; (u, η, v) is undefined here"));
        }
        let ej = eta_jacobian_from_critical(&cd).map_err(runtime_err)?;
        let v = special_v_matrix(&cd, &ej);
        let inner = SemisimpleGerm::new(cd.u, cd.eta, v).map_err(runtime_err)?;
        Ok(Germ { inner })
    }
}

/// Semisimple Frobenius germ: canonical values u, residues η, and the
/// v-matrix.
#[pyclass]
struct Germ {
    inner: SemisimpleGerm,
}

#[pymethods]
impl Germ {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        germ_from_text(text)
            .map(|inner| Germ { inner })
            .map_err(value_err)
    }

    /// The one-point identity germ at canonical value `u`.
    #[staticmethod]
    #[pyo3(signature = (u = Complex64::new(0.0, 0.0)))]
    fn identity(u: Complex64) -> Self {
        Germ {
            inner: SemisimpleGerm::identity_point(u),
        }
    }

    fn to_text(&self) -> String {
        germ_to_text(&self.inner)
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    #[getter]
    fn u(&self) -> Vec<Complex64> {
        self.inner.u().to_vec()
    }

    #[getter]
    fn eta(&self) -> Vec<Complex64> {
        self.inner.eta().to_vec()
    }

    #[getter]
    fn v(&self) -> Vec<Vec<Complex64>> {
        cmatrix_rows(self.inner.v())
    }

    #[getter]
    fn min_u_gap(&self) -> f64 {
        self.inner.min_u_gap()
    }

    #[getter]
    fn reciprocity_residual(&self) -> f64 {
        self.inner.reciprocity_residual()
    }

    /// Tensor product of germs; canonical values add, residues multiply.
    #[pyo3(signature = (other, tol = 1e-8))]
    fn tensor(&self, other: &Germ, tol: f64) -> PyResult<Germ> {
        frobenius_core::germ::tensor(&self.inner, &other.inner, tol)
            .map(|inner| Germ { inner })
            .map_err(runtime_err)
    }

    /// Match against another germ up to relabeling.
    #[pyo3(signature = (other, tol = 1e-8))]
    fn compare<'py>(
        &self,
        py: Python<'py>,
        other: &Germ,
        tol: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let m = compare_germs(&self.inner, &other.inner, tol).map_err(runtime_err)?;
        let d = PyDict::new(py);
        d.set_item("isomorphic", m.isomorphic)?;
        d.set_item("max_dev", m.max_dev)?;
        d.set_item("permutation", m.permutation)?;
        Ok(d)
    }
}

/// Finite-dimensional dGBV algebra with δΔ-condition and
/// master-equation pipelines (exact rational arithmetic).
#[pyclass]
struct Algebra {
    inner: DGBVAlgebra,
    label: String,
}

#[pymethods]
impl Algebra {
    /// Load a built-in catalog instance by name.
    #[staticmethod]
    fn catalog(name: &str) -> PyResult<Self> {
        catalog::by_name(name)
            .map(|inner| Algebra {
                inner,
                label: format!("catalog:{name}"),
            })
            .ok_or_else(|| value_err(format!("no catalog entry named '{name}'")))
    }

    /// Names of the built-in catalog instances.
    #[staticmethod]
    fn catalog_names() -> Vec<String> {
        catalog::all().into_iter().map(|(n, _)| n.to_string()).collect()
    }

    /// Parse an algebra-spec file.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        algebra_from_text(text)
            .map(|inner| Algebra {
                inner,
                label: "from-text".into(),
            })
            .map_err(value_err)
    }

    fn to_text(&self) -> String {
        algebra_to_text(&self.inner)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn label(&self) -> String {
        self.label.clone()
    }

    /// Structural axioms, the graded integral, and seeded identity
    /// sampling in one report.
    #[pyo3(signature = (samples = 100, seed = 0))]
    fn check<'py>(
        &self,
        py: Python<'py>,
        samples: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let mut rep = check_dgbv(&self.inner);
        rep.merge(integral_check(&self.inner));
        rep.merge(identity_suite(&self.inner, samples, seed));
        check_dict(py, &rep)
    }

    /// δΔ-conditions (A), (B), (C) and the homology dimensions.
    fn conditions<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let cr = conditions_check(&self.inner).map_err(runtime_err)?;
        let d = PyDict::new(py);
        d.set_item("condition_a", cr.condition_a)?;
        d.set_item("condition_b", cr.condition_b)?;
        d.set_item("condition_c", cr.condition_c)?;
        let (x, y, z) = cr.homology_dims;
        d.set_item("homology_dims", (x, y, z))?;
        Ok(d)
    }

    /// Tensor product of dGBV algebras.
    fn tensor(&self, other: &Algebra) -> PyResult<Algebra> {
        frobenius_core::dgbv::tensor(&self.inner, &other.inner)
            .map(|inner| Algebra {
                inner,
                label: format!("{}⊗{}", self.label, other.label),
            })
            .map_err(runtime_err)
    }

    /// Solve the master equation and return potential, metric, and the
    /// verification reports.
    #[pyo3(signature = (order = 6, seed = 0))]
    fn potential<'py>(
        &self,
        py: Python<'py>,
        order: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let base = FormalBase::new(&self.inner, order).map_err(runtime_err)?;
        let sol = solve_master(&self.inner, &base).map_err(runtime_err)?;
        let ver = sol.verify(&self.inner);
        let g = metric(&self.inner, &base).map_err(runtime_err)?;
        let phi = potential(&self.inner, &sol).map_err(runtime_err)?;
        let w_order = order.saturating_sub(3).max(1);
        let wd = wdvv_check(&phi, &g, w_order).map_err(runtime_err)?;
        let cubic = cubic_directional_check(&self.inner, &sol, &phi, 20, seed)
            .map_err(runtime_err)?;
        let eu = euler_check(&self.inner, &base, &phi, &g);

        let d = PyDict::new(py);
        d.set_item("order", order)?;
        d.set_item("phi", phi.render())?;
        d.set_item("metric", qmatrix_rows(&g))?;
        d.set_item("verify", check_dict(py, &ver)?)?;
        d.set_item("wdvv_order", w_order)?;
        d.set_item("wdvv", check_dict(py, &wd)?)?;
        d.set_item("cubic_directional", check_dict(py, &cubic)?)?;
        let e = PyDict::new(py);
        e.set_item("applicable", eu.applicable)?;
        if eu.applicable {
            e.set_item("d_charges", rat_strings(&eu.d_charges))?;
            e.set_item(
                "conformal_weight",
                eu.conformal_weight.as_ref().map(rat_to_string),
            )?;
            e.set_item("report", check_dict(py, &eu.report)?)?;
        }
        d.set_item("euler", e)?;
        Ok(d)
    }
}

// ---------------------------------------------------------------- qc

/// Gromov–Witten numbers N_d of P² from the WDVV solve (Python ints).
#[pyfunction]
fn p2_gw_numbers(max_degree: usize) -> PyResult<Vec<BigInt>> {
    let qc = p2_generate(max_degree).map_err(runtime_err)?;
    (1..=max_degree)
        .map(|d| {
            let key = CorrelatorKey::new(vec![d as i64], vec![2; 3 * d - 1]);
            let n = qc.correlators()[&key].clone();
            if !rat_is_integer(&n) {
                return Err(runtime_err(format!("N_{d} is not integral: {n}")));
            }
            Ok(n.numer().clone())
        })
        .collect()
}

#[pymodule]
fn frobenius_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Chart>()?;
    m.add_class::<Germ>()?;
    m.add_class::<Algebra>()?;
    m.add_function(wrap_pyfunction!(betti, m)?)?;
    m.add_function(wrap_pyfunction!(integrality, m)?)?;
    m.add_function(wrap_pyfunction!(gepner_total, m)?)?;
    m.add_function(wrap_pyfunction!(flat_coordinates, m)?)?;
    m.add_function(wrap_pyfunction!(verify_special_point, m)?)?;
    m.add_function(wrap_pyfunction!(direct_sum_verify, m)?)?;
    m.add_function(wrap_pyfunction!(p2_gw_numbers, m)?)?;
    Ok(())
}
