//! Python bindings for `pfrac`.
//!
//! Rationals cross the boundary as `fractions.Fraction` (anything whose
//! `str()` is `p` or `p/q` is accepted on input); big integers as `int`.

use std::collections::HashMap;

use pfrac::{OutputFormat, Rational};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    obj.str()?.to_str()?.trim().parse().map_err(value_error)
}

fn to_fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((r.to_string(),))
}

fn to_int<'py>(py: Python<'py>, n: &num_bigint::BigInt) -> PyResult<Bound<'py, PyAny>> {
    py.import("builtins")?
        .getattr("int")?
        .call1((n.to_string(),))
}

fn to_bindings(dict: Option<&Bound<'_, PyDict>>) -> PyResult<HashMap<String, Rational>> {
    let mut out = HashMap::new();
    if let Some(d) = dict {
        for (k, v) in d.iter() {
            out.insert(k.extract::<String>()?, to_rational(&v)?);
        }
    }
    Ok(out)
}

/// A canonical symbolic expression.
#[pyclass(name = "Expr", module = "pfrac_py", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyExpr(pfrac::Expr);

#[pymethods]
impl PyExpr {
    #[new]
    fn new(src: &str) -> PyResult<Self> {
        pfrac::parse_expr(src).map(PyExpr).map_err(value_error)
    }

    fn expand(&self) -> Self {
        PyExpr(self.0.expand())
    }

    fn symbols(&self) -> Vec<String> {
        self.0.symbols().into_iter().collect()
    }

    #[pyo3(signature = (bindings=None))]
    fn evaluate<'py>(
        &self,
        py: Python<'py>,
        bindings: Option<&Bound<'py, PyDict>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let v = self
            .0
            .evaluate(&to_bindings(bindings)?)
            .map_err(value_error)?;
        to_fraction(py, &v)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expr('{}')", self.0)
    }
}

/// The result of a decomposition together with its input.
#[pyclass(name = "Decomposition", module = "pfrac_py", frozen)]
struct PyDecomposition {
    spec: pfrac::RationalFunctionSpec,
    inner: pfrac::Decomposition,
}

#[pymethods]
impl PyDecomposition {
    /// `[(degree, coefficient)]` for the polynomial part.
    #[getter]
    fn monomials(&self) -> Vec<(u32, PyExpr)> {
        self.inner
            .monomials
            .iter()
            .map(|m| (m.degree, PyExpr(m.coefficient.clone())))
            .collect()
    }

    /// `[(root, order, coefficient)]` for each `coefficient / (x - root)^order`.
    #[getter]
    fn poles(&self) -> Vec<(PyExpr, u32, PyExpr)> {
        self.inner
            .poles
            .iter()
            .map(|p| {
                (
                    PyExpr(self.inner.roots[p.pole_index].clone()),
                    p.order,
                    PyExpr(p.coefficient.clone()),
                )
            })
            .collect()
    }

    #[pyo3(signature = (format="infix", expand=false))]
    fn serialize(&self, format: &str, expand: bool) -> PyResult<String> {
        let mut fmt = match format {
            "infix" => OutputFormat::infix(),
            "structured" => OutputFormat::structured(),
            other => return Err(value_error(format!("unknown format `{other}`"))),
        };
        fmt.expand_coefficients = expand;
        Ok(pfrac::serialize(&self.inner, &fmt))
    }

    /// Value of the decomposed form at `x`.
    #[pyo3(signature = (x, bindings=None))]
    fn evaluate<'py>(
        &self,
        py: Python<'py>,
        x: &Bound<'py, PyAny>,
        bindings: Option<&Bound<'py, PyDict>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let v = self
            .inner
            .evaluate(&to_rational(x)?, &to_bindings(bindings)?)
            .map_err(value_error)?;
        to_fraction(py, &v)
    }

    /// Compares input and result at random rational points; returns
    /// `(passed, report)`.
    #[pyo3(signature = (trials=20, seed=0))]
    fn verify(&self, trials: usize, seed: u64) -> (bool, String) {
        let rep = pfrac::check_by_substitution(&self.spec, &self.inner, trials, seed);
        (rep.passed(), rep.to_string())
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        pfrac::serialize(&self.inner, &OutputFormat::default())
    }

    fn __repr__(&self) -> String {
        format!("Decomposition({} terms)", self.inner.len())
    }
}

/// Decomposes `x^l / prod (x - roots[i])^multiplicities[i]`. `roots` is a
/// list of expression strings or a single comma-separated string.
#[pyfunction]
fn decompose(
    l: u32,
    roots: &Bound<'_, PyAny>,
    multiplicities: Vec<u32>,
) -> PyResult<PyDecomposition> {
    let roots = if let Ok(s) = roots.extract::<String>() {
        pfrac::parse_root_list(&s).map_err(value_error)?
    } else {
        roots
            .extract::<Vec<String>>()?
            .iter()
            .map(|s| pfrac::parse_expr(s).map_err(value_error))
            .collect::<PyResult<_>>()?
    };
    if roots.len() != multiplicities.len() {
        return Err(value_error(format!(
            "{} roots but {} multiplicities",
            roots.len(),
            multiplicities.len()
        )));
    }
    let spec = pfrac::RationalFunctionSpec::new(l, roots.into_iter().zip(multiplicities))
        .map_err(value_error)?;
    let inner = pfrac::decompose(&spec).map_err(value_error)?;
    Ok(PyDecomposition { spec, inner })
}

#[pyfunction]
fn parse_expr(src: &str) -> PyResult<PyExpr> {
    PyExpr::new(src)
}

#[pyfunction]
fn binomial(py: Python<'_>, n: u64, k: i64) -> PyResult<Bound<'_, PyAny>> {
    to_int(py, &pfrac::binomial(n, k))
}

#[pyfunction]
fn multinomial(py: Python<'_>, m: u64, parts: Vec<u64>) -> PyResult<Bound<'_, PyAny>> {
    let v = pfrac::multinomial(m, &parts).map_err(value_error)?;
    to_int(py, &v)
}

/// All weak compositions of `m` into `k` parts, lexicographically.
#[pyfunction]
fn compositions(m: usize, k: usize) -> Vec<Vec<usize>> {
    pfrac::compositions(m, k).map(|c| c.0).collect()
}

#[pymodule]
pub fn pfrac_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyExpr>()?;
    m.add_class::<PyDecomposition>()?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(parse_expr, m)?)?;
    m.add_function(wrap_pyfunction!(binomial, m)?)?;
    m.add_function(wrap_pyfunction!(multinomial, m)?)?;
    m.add_function(wrap_pyfunction!(compositions, m)?)?;
    Ok(())
}
