//! Python bindings: meshes, quadrature, single solves and convergence
//! studies of the layer-adapted streamline-diffusion solver.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use layerfem::study::{Column, Method, StudyConfig};
use layerfem::{build_stype_mesh, mesh_ratio_q, MeshKind, TensorMesh};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_kind(kind: &str) -> PyResult<MeshKind> {
    kind.parse().map_err(err)
}

/// Gauss-Lobatto nodes and weights of degree `p` on [-1, 1].
#[pyfunction]
fn gauss_lobatto(p: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let rule = layerfem::quad::gauss_lobatto_nodes(p).map_err(err)?;
    Ok((rule.nodes().to_vec(), rule.weights().to_vec()))
}

/// n-point Gauss-Legendre rule on [-1, 1].
#[pyfunction]
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = layerfem::quad::gauss_legendre_rule(n);
    (rule.nodes().to_vec(), rule.weights().to_vec())
}

/// Exact solution of the model problem: `(u, u_x, u_y)` at a point.
#[pyfunction]
fn exact_solution(eps: f64, x: f64, y: f64) -> PyResult<(f64, f64, f64)> {
    let prob = layerfem::model_problem(eps).map_err(err)?;
    Ok(prob.exact.as_ref().unwrap().eval_grad(x, y))
}

/// Worst reference-element identity discrepancy for one smooth function.
#[pyfunction]
#[pyo3(signature = (p, t_star = 0.37))]
fn lemma_identity_discrepancy(p: usize, t_star: f64) -> PyResult<f64> {
    layerfem::interp::verify_lemma_identity(
        p,
        |x, y| (3.0 * x + 1.0).sin() * (2.0 * y).cos(),
        t_star,
    )
    .map_err(err)
}

/// S-type tensor mesh of the unit square.
#[pyclass(name = "Mesh")]
struct PyMesh {
    inner: TensorMesh,
}

#[pymethods]
impl PyMesh {
    #[new]
    #[pyo3(signature = (kind, n, sigma, epsilon, beta = 1.0))]
    fn new(kind: &str, n: usize, sigma: f64, epsilon: f64, beta: f64) -> PyResult<Self> {
        let inner = build_stype_mesh(n, sigma, epsilon, beta, parse_kind(kind)?).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn xs(&self) -> Vec<f64> {
        self.inner.xs().to_vec()
    }

    #[getter]
    fn ys(&self) -> Vec<f64> {
        self.inner.ys().to_vec()
    }

    #[getter]
    fn lambda_x(&self) -> f64 {
        self.inner.lambda_x()
    }

    #[getter]
    fn lambda_y(&self) -> f64 {
        self.inner.lambda_y()
    }

    #[getter]
    fn max_psi_prime(&self) -> f64 {
        self.inner.max_psi_prime()
    }

    fn ratio_q(&self) -> f64 {
        mesh_ratio_q(&self.inner)
    }

    fn dump(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.dump(&mut buf).map_err(err)?;
        Ok(String::from_utf8(buf).expect("dump is ASCII"))
    }

    fn __repr__(&self) -> String {
        format!(
            "Mesh(kind='{}', n={}, sigma={}, epsilon={:e})",
            self.inner.family_name(),
            self.inner.n(),
            self.inner.sigma(),
            self.inner.eps()
        )
    }
}

/// Report of a convergence study.
#[pyclass(name = "StudyReport")]
struct PyStudyReport {
    columns: Vec<String>,
    rows: Vec<(usize, Vec<f64>, Vec<Option<f64>>)>,
    csv: String,
    text: String,
}

#[pymethods]
impl PyStudyReport {
    #[getter]
    fn columns(&self) -> Vec<String> {
        self.columns.clone()
    }

    /// Rows as `(N, errors, rates)` tuples; the last row's rates are None.
    #[getter]
    fn rows(&self) -> Vec<(usize, Vec<f64>, Vec<Option<f64>>)> {
        self.rows.clone()
    }

    fn to_csv(&self) -> String {
        self.csv.clone()
    }

    fn __str__(&self) -> String {
        self.text.clone()
    }
}

/// Run a convergence study of the model problem.
#[pyfunction]
#[pyo3(signature = (kind = "shishkin", n_list = vec![8, 16], p = 3, sigma = None,
                    epsilon = 1e-6, c_stab = 1.0, method = "sdfem",
                    columns = vec!["convergence".to_string()], sharper_delta21 = false,
                    threads = 1))]
#[allow(clippy::too_many_arguments)]
fn run_study(
    kind: &str,
    n_list: Vec<usize>,
    p: usize,
    sigma: Option<f64>,
    epsilon: f64,
    c_stab: f64,
    method: &str,
    columns: Vec<String>,
    sharper_delta21: bool,
    threads: usize,
) -> PyResult<PyStudyReport> {
    let mut cfg = StudyConfig::default();
    cfg.kind = parse_kind(kind)?;
    cfg.n_list = n_list;
    cfg.p = p;
    cfg.sigma = sigma.unwrap_or((p + 2) as f64);
    cfg.eps = epsilon;
    cfg.c_stab = c_stab;
    cfg.method = method.parse::<Method>().map_err(err)?;
    cfg.sharper_delta21 = sharper_delta21;
    cfg.threads = threads.max(1);
    cfg.columns = columns
        .iter()
        .map(|c| c.parse::<Column>().map_err(err))
        .collect::<PyResult<Vec<_>>>()?;
    let report = layerfem::run_study(&cfg).map_err(err)?;
    Ok(PyStudyReport {
        columns: report.columns.iter().map(|c| c.to_string()).collect(),
        rows: report
            .rows
            .iter()
            .map(|r| (r.n, r.errors.clone(), r.rates.clone()))
            .collect(),
        csv: report.to_csv(),
        text: report.to_text(),
    })
}

/// Run the verification suites; returns `(name, max_discrepancy,
/// tolerance, passed)` per check.
#[pyfunction]
#[pyo3(signature = (seed = 2024))]
fn verify(seed: u64) -> PyResult<Vec<(String, f64, f64, bool)>> {
    let checks = layerfem::verify::full_suite(seed).map_err(err)?;
    Ok(checks
        .into_iter()
        .map(|c| (c.name.clone(), c.max_discrepancy, c.tolerance, c.passed()))
        .collect())
}

#[pymodule]
fn layerfem_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMesh>()?;
    m.add_class::<PyStudyReport>()?;
    m.add_function(wrap_pyfunction!(gauss_lobatto, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_legendre, m)?)?;
    m.add_function(wrap_pyfunction!(exact_solution, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_identity_discrepancy, m)?)?;
    m.add_function(wrap_pyfunction!(run_study, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
