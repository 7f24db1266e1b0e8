//! Python bindings for `hypergiant-core`.

use hypergiant_core::{asymptotics, crosscheck, exact, forests, params, verify};
use hypergiant_core::{EnumerationInstance, Error, ModelParams, RhoProfile};
use num_bigint::BigUint;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::NoSuchHypergraph { .. } | Error::Invalid { .. } | Error::TooLarge { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// The random hypergraph `H^r(n, p)`.
#[pyclass(name = "ModelParams", frozen, from_py_object)]
#[derive(Clone)]
struct PyModelParams(ModelParams);

#[pymethods]
impl PyModelParams {
    /// Exactly one of `eps`, `lam` (branching factor) or `p`.
    #[new]
    #[pyo3(signature = (r, n, *, eps=None, lam=None, p=None))]
    fn new(r: u32, n: u64, eps: Option<f64>, lam: Option<f64>, p: Option<f64>) -> PyResult<Self> {
        let mp = match (eps, lam, p) {
            (Some(e), None, None) => ModelParams::from_eps(r, n, e),
            (None, Some(l), None) => ModelParams::from_lambda(r, n, l),
            (None, None, Some(p)) => ModelParams::from_p(r, n, p),
            _ => return Err(PyValueError::new_err("give exactly one of eps, lam, p")),
        };
        mp.map(PyModelParams).map_err(err)
    }

    #[getter]
    fn r(&self) -> u32 {
        self.0.r
    }

    #[getter]
    fn n(&self) -> u64 {
        self.0.n
    }

    #[getter]
    fn p(&self) -> f64 {
        self.0.p
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.0.lambda
    }

    #[getter]
    fn eps(&self) -> f64 {
        self.0.eps
    }

    fn eps3n(&self) -> f64 {
        self.0.eps3n()
    }

    fn rho_profile(&self) -> PyResult<PyRhoProfile> {
        self.0.rho_profile().map(PyRhoProfile).map_err(err)
    }

    /// `(sigma_n, sigma_star)`.
    fn sigmas(&self) -> PyResult<(f64, f64)> {
        params::sigmas(&self.0).map_err(err)
    }

    /// Local-limit probability of `L1 = x, N1 = y`.
    fn llt_joint(&self, x: i64, y: i64) -> PyResult<f64> {
        asymptotics::llt_joint(&self.0, x, y).map(|pt| pt.prob).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "ModelParams(r={}, n={}, p={:e}, lam={}, eps={})",
            self.0.r, self.0.n, self.0.p, self.0.lambda, self.0.eps
        )
    }
}

#[pyclass(name = "RhoProfile", frozen)]
struct PyRhoProfile(RhoProfile);

#[pymethods]
impl PyRhoProfile {
    #[getter]
    fn r(&self) -> u32 {
        self.0.r
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.0.lambda
    }

    #[getter]
    fn eps(&self) -> f64 {
        self.0.eps
    }

    #[getter]
    fn rho2(&self) -> f64 {
        self.0.rho2
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.0.rho
    }

    #[getter]
    fn rho_star(&self) -> f64 {
        self.0.rho_star
    }

    #[getter]
    fn lambda_dual(&self) -> f64 {
        self.0.lambda_dual
    }

    fn __repr__(&self) -> String {
        format!(
            "RhoProfile(r={}, lam={}, rho={}, rho_star={})",
            self.0.r, self.0.lambda, self.0.rho, self.0.rho_star
        )
    }
}

/// Connected `r`-uniform hypergraphs on `s` vertices with nullity `t`.
#[pyclass(name = "EnumerationInstance", frozen)]
struct PyInstance(EnumerationInstance);

#[pymethods]
impl PyInstance {
    #[new]
    fn new(r: u32, s: u64, t: u64) -> PyResult<Self> {
        params::solve_rho(r, s, t).map(PyInstance).map_err(err)
    }

    #[getter]
    fn r(&self) -> u32 {
        self.0.r
    }

    #[getter]
    fn s(&self) -> u64 {
        self.0.s
    }

    #[getter]
    fn t(&self) -> u64 {
        self.0.t
    }

    #[getter]
    fn m(&self) -> u64 {
        self.0.m
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.0.rho
    }

    /// `log10` of the asymptotic count.
    fn log10_c(&self) -> PyResult<f64> {
        asymptotics::log_c(&self.0).log10().map_err(err)
    }

    /// `log10` of the asymptotic probability of connectedness.
    fn log10_p(&self) -> PyResult<f64> {
        asymptotics::log_p(&self.0).log10().map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "EnumerationInstance(r={}, s={}, t={}, m={}, rho={})",
            self.0.r, self.0.s, self.0.t, self.0.m, self.0.rho
        )
    }
}

#[pyfunction]
fn psi(r: u32, rho: f64) -> PyResult<f64> {
    params::psi_r(r, rho).map_err(err)
}

#[pyfunction]
fn connected_count(r: u32, s: u64, t: u64) -> PyResult<BigUint> {
    exact::connected_count_by_nullity(r, s, t).map_err(err)
}

#[pyfunction]
fn forest_count(r: u32, a: u64, k: u64) -> PyResult<BigUint> {
    exact::forest_count(r, a, k).map_err(err)
}

/// Split pmf as a list indexed by `k`.
#[pyfunction]
fn smoothing_pmf(r: u32, m: u64, a: u64) -> PyResult<Vec<f64>> {
    forests::smoothing_pmf(r, m, a).map(|p| p.probs).map_err(err)
}

#[pyfunction]
fn expected_trees(r: u32, m: u64, p: f64, k: u64) -> PyResult<f64> {
    verify::expected_trees(r, m, p, k).map_err(err)
}

/// Per-trial `(L1, M1, N1, L2, core_size, excore_size)`.
#[pyfunction]
#[pyo3(signature = (params, trials, seed=1, threads=None))]
fn simulate(
    py: Python<'_>,
    params: PyModelParams,
    trials: usize,
    seed: u64,
    threads: Option<usize>,
) -> PyResult<Vec<(u64, u64, u64, u64, u64, u64)>> {
    let config = verify::BatchConfig {
        params: params.0,
        trials,
        seed,
        mark_prob: None,
    };
    let batch = py.detach(|| verify::run_batch(config, threads)).map_err(err)?;
    Ok(batch
        .records
        .iter()
        .map(|r| (r.l1, r.m1, r.n1, r.l2, r.core_size, r.excore_size))
        .collect())
}

/// `a(x)` of the Bender-Canfield-McKay formula along `x = 1 + Psi_2(rho)`.
#[pyfunction]
fn bck_a(rho: f64) -> f64 {
    crosscheck::bck_a_of_rho(rho)
}

#[pymodule]
fn hypergiant(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyRhoProfile>()?;
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(connected_count, m)?)?;
    m.add_function(wrap_pyfunction!(forest_count, m)?)?;
    m.add_function(wrap_pyfunction!(smoothing_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(expected_trees, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(bck_a, m)?)?;
    Ok(())
}
