//! Python bindings: function tables, spectra, circuits, formulas,
//! membership reports and approximation plans, driven by the core
//! crate.  Bit tuples cross the boundary as lists of 0/1 integers.

use cloneforge_core::table::Signedness;
use cloneforge_core::{circuit, fourier, ising, json, membership, pps, verify, DEFAULT_TOL};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: cloneforge_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_bits(raw: Vec<u8>) -> Vec<bool> {
    raw.into_iter().map(|b| b != 0).collect()
}

fn from_bits(bits: &[bool]) -> Vec<u8> {
    bits.iter().map(|&b| u8::from(b)).collect()
}

/// Dense table of a pseudo-Boolean function.
#[pyclass(name = "FunctionTable", skip_from_py_object)]
#[derive(Clone)]
struct PyFunctionTable {
    inner: cloneforge_core::table::FunctionTable,
}

impl From<cloneforge_core::table::FunctionTable> for PyFunctionTable {
    fn from(inner: cloneforge_core::table::FunctionTable) -> Self {
        PyFunctionTable { inner }
    }
}

#[pymethods]
impl PyFunctionTable {
    /// Build from the full value table (length a power of two).
    /// Negative entries require `signed=True`.
    #[new]
    #[pyo3(signature = (values, signed = false))]
    fn new(values: Vec<f64>, signed: bool) -> PyResult<Self> {
        let len = values.len();
        if !len.is_power_of_two() {
            return Err(PyValueError::new_err(format!(
                "table length {len} is not a power of two"
            )));
        }
        let arity = len.trailing_zeros() as usize;
        let signedness = if signed {
            Signedness::Signed
        } else {
            Signedness::NonNegative
        };
        cloneforge_core::table::FunctionTable::with_signedness(arity, values, signedness)
            .map(Into::into)
            .map_err(err)
    }

    /// Symmetric shorthand: value per Hamming weight.
    #[staticmethod]
    fn from_symmetric(weights: Vec<f64>) -> PyResult<Self> {
        cloneforge_core::table::FunctionTable::symmetric(&weights)
            .map(Into::into)
            .map_err(err)
    }

    #[staticmethod]
    fn equality() -> Self {
        cloneforge_core::table::FunctionTable::equality().into()
    }

    #[staticmethod]
    fn xor() -> Self {
        cloneforge_core::table::FunctionTable::xor().into()
    }

    #[staticmethod]
    fn hising(k: usize, lam: f64) -> PyResult<Self> {
        ising::hising(k, lam).map(Into::into).map_err(err)
    }

    #[staticmethod]
    fn parity(k: usize, lam: f64) -> PyResult<Self> {
        ising::parity_fn(k, lam).map(Into::into).map_err(err)
    }

    #[staticmethod]
    fn force_odd(k: usize) -> PyResult<Self> {
        ising::force_odd(k).map(Into::into).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        json::table_from_json(text).map(Into::into).map_err(err)
    }

    #[getter]
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    #[getter]
    fn signed(&self) -> bool {
        self.inner.is_signed()
    }

    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn to_json(&self) -> String {
        json::table_to_json(&self.inner)
    }

    fn eval(&self, x: Vec<u8>) -> PyResult<f64> {
        self.inner.eval(&to_bits(x)).map_err(err)
    }

    fn transform(&self) -> Self {
        fourier::transform(&self.inner).into()
    }

    fn inverse_transform(&self) -> Self {
        fourier::inverse_transform(&self.inner).into()
    }

    fn convolve(&self, other: &PyFunctionTable) -> PyResult<Self> {
        fourier::convolve(&self.inner, &other.inner)
            .map(Into::into)
            .map_err(err)
    }

    fn product(&self, other: &PyFunctionTable) -> PyResult<Self> {
        self.inner
            .product(&other.inner)
            .map(Into::into)
            .map_err(err)
    }

    fn sum_out_last(&self) -> PyResult<Self> {
        self.inner.sum_out_last().map(Into::into).map_err(err)
    }

    fn add_fictitious(&self) -> PyResult<Self> {
        self.inner.add_fictitious().map(Into::into).map_err(err)
    }

    fn permute(&self, perm: Vec<usize>) -> PyResult<Self> {
        self.inner.permute_args(&perm).map(Into::into).map_err(err)
    }

    fn complement(&self) -> Self {
        self.inner.complement().into()
    }

    fn scale(&self, c: f64) -> PyResult<Self> {
        self.inner.scale(c).map(Into::into).map_err(err)
    }

    fn linf_distance(&self, other: &PyFunctionTable) -> PyResult<f64> {
        self.inner.linf_distance(&other.inner).map_err(err)
    }

    fn pin(&self, position: usize, bit: u8) -> PyResult<Self> {
        self.inner
            .pin(position, bit != 0)
            .map(Into::into)
            .map_err(err)
    }

    /// Two-surviving-variable restriction from a template like "xy00".
    fn two_pinning(&self, template: &str) -> PyResult<Self> {
        let slots = cloneforge_core::table::parse_template(template).map_err(err)?;
        self.inner.two_pinning(&slots).map(Into::into).map_err(err)
    }

    #[pyo3(signature = (tol = DEFAULT_TOL))]
    fn tilde(&self, tol: f64) -> Self {
        self.inner.tilde(tol).into()
    }

    #[pyo3(signature = (tol = DEFAULT_TOL))]
    fn equiv_blocks(&self, tol: f64) -> Vec<Vec<usize>> {
        self.inner.equiv_relation(tol).blocks().to_vec()
    }

    fn is_permissive(&self) -> bool {
        self.inner.is_permissive()
    }

    /// JSON membership report (verdicts plus witnesses).
    #[pyo3(signature = (alpha = 1.0, tol = DEFAULT_TOL))]
    fn classify_json(&self, alpha: f64, tol: f64) -> PyResult<String> {
        membership::classify(&self.inner, alpha, tol)
            .map(|report| json::report_to_json(&report))
            .map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "FunctionTable(arity={}, values={:?}{})",
            self.inner.arity(),
            self.inner.values(),
            if self.inner.is_signed() {
                ", signed"
            } else {
                ""
            }
        )
    }
}

/// Weighted match- or even-circuit with ordered terminals.
#[pyclass(name = "Circuit", skip_from_py_object)]
#[derive(Clone)]
struct PyCircuit {
    inner: circuit::Circuit,
}

impl From<circuit::Circuit> for PyCircuit {
    fn from(inner: circuit::Circuit) -> Self {
        PyCircuit { inner }
    }
}

#[pymethods]
impl PyCircuit {
    #[new]
    #[pyo3(signature = (kind, externals, internals, edges))]
    fn new(
        kind: &str,
        externals: Vec<u32>,
        internals: Vec<u32>,
        edges: Vec<(u32, u32, f64)>,
    ) -> PyResult<Self> {
        let kind = match kind {
            "match" => circuit::CircuitKind::Match,
            "even" => circuit::CircuitKind::Even,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown circuit kind {other:?}"
                )))
            }
        };
        circuit::Circuit::new(
            kind,
            externals,
            internals,
            edges
                .into_iter()
                .map(|(a, b, w)| circuit::Edge::new(a, b, w))
                .collect(),
        )
        .map(Into::into)
        .map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        json::circuit_from_json(text).map(Into::into).map_err(err)
    }

    #[staticmethod]
    fn eq_match() -> Self {
        circuit::gadget_eq_match().into()
    }

    #[staticmethod]
    fn ising_half_match() -> Self {
        circuit::gadget_ising_half_match().into()
    }

    #[staticmethod]
    fn sdp3(a: f64, b: f64, c: f64, d: f64) -> PyResult<Self> {
        circuit::gadget_sdp3(a, b, c, d)
            .map(Into::into)
            .map_err(err)
    }

    #[staticmethod]
    fn sym4(c0: f64, c2: f64, c4: f64) -> PyResult<Self> {
        circuit::gadget_sym4(c0, c2, c4)
            .map(Into::into)
            .map_err(err)
    }

    #[staticmethod]
    fn even_eq() -> Self {
        circuit::gadget_even_eq().into()
    }

    /// Returns `(circuit, scale)` with `scale * realized == hising(2, lam)`.
    #[staticmethod]
    fn even_ising(lam: f64) -> PyResult<(Self, f64)> {
        circuit::gadget_even_ising(lam)
            .map(|(c, s)| (c.into(), s))
            .map_err(err)
    }

    #[getter]
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.inner.kind() {
            circuit::CircuitKind::Match => "match",
            circuit::CircuitKind::Even => "even",
        }
    }

    fn to_json(&self) -> String {
        json::circuit_to_json(&self.inner)
    }

    fn eval(&self, y: Vec<u8>) -> PyResult<f64> {
        self.inner.eval(&to_bits(y)).map_err(err)
    }

    fn implemented(&self) -> PyResult<PyFunctionTable> {
        self.inner
            .implemented_function()
            .map(Into::into)
            .map_err(err)
    }

    #[pyo3(signature = (tol = DEFAULT_TOL))]
    fn realized_pbf(&self, tol: f64) -> PyResult<PyFunctionTable> {
        self.inner.realized_pbf(tol).map(Into::into).map_err(err)
    }

    fn product(&self, other: &PyCircuit) -> PyResult<Self> {
        circuit::gadget_product(&self.inner, &other.inner)
            .map(Into::into)
            .map_err(err)
    }

    fn fictitious(&self) -> PyResult<Self> {
        circuit::gadget_fictitious(&self.inner)
            .map(Into::into)
            .map_err(err)
    }

    fn sum_out(&self) -> PyResult<Self> {
        circuit::gadget_sum(&self.inner)
            .map(Into::into)
            .map_err(err)
    }

    /// Pairwise Ising system of an even-circuit, as a dict.
    #[pyo3(signature = (tol = 1e-8))]
    fn even_to_ising<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyDict>> {
        let system = circuit::even_to_ising(&self.inner, tol).map_err(err)?;
        let dict = PyDict::new(py);
        dict.set_item("variables", system.variables.clone())?;
        dict.set_item("interactions", system.interactions.clone())?;
        dict.set_item("terminal_map", system.terminal_map.clone())?;
        dict.set_item("constant", system.constant)?;
        Ok(dict)
    }

    fn __repr__(&self) -> String {
        format!(
            "Circuit(kind={:?}, arity={}, edges={})",
            self.kind(),
            self.inner.arity(),
            self.inner.edges().len()
        )
    }
}

/// Product-summation formula over non-negative atoms.
#[pyclass(name = "PpsFormula")]
struct PyPpsFormula {
    inner: pps::PpsFormula,
}

#[pymethods]
impl PyPpsFormula {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        json::formula_from_json(text)
            .map(|inner| PyPpsFormula { inner })
            .map_err(err)
    }

    /// The ForceOdd recursion over four-ary ForceOdd and equality atoms.
    #[staticmethod]
    fn force_odd_from_fo4(k: usize) -> PyResult<Self> {
        ising::force_odd_from_fo4(k)
            .map(|inner| PyPpsFormula { inner })
            .map_err(err)
    }

    /// Weighted parity expressed through ForceOdd and one Ising edge.
    #[staticmethod]
    fn parity_from_forceodd(k: usize, lam: f64) -> PyResult<Self> {
        ising::parity_from_forceodd(k, lam)
            .map(|inner| PyPpsFormula { inner })
            .map_err(err)
    }

    #[getter]
    fn free_arity(&self) -> usize {
        self.inner.free_arity()
    }

    #[getter]
    fn bound_count(&self) -> usize {
        self.inner.bound_count()
    }

    fn eval(&self) -> PyFunctionTable {
        self.inner.eval().into()
    }
}

#[pyfunction]
fn hising_hat(k: usize, lam: f64) -> PyResult<PyFunctionTable> {
    fourier::hising_hat(k, lam).map(Into::into).map_err(err)
}

#[pyfunction]
fn parity_hat(k: usize, lam: f64) -> PyResult<PyFunctionTable> {
    fourier::parity_hat(k, lam).map(Into::into).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (f, a, tol = DEFAULT_TOL))]
fn neg_coeff_reduce(f: &PyFunctionTable, a: Vec<u8>, tol: f64) -> PyResult<PyFunctionTable> {
    fourier::neg_coeff_reduce(&f.inner, &to_bits(a), tol)
        .map(Into::into)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (f, k, tol = DEFAULT_TOL))]
fn tech_lift(f: &PyFunctionTable, k: usize, tol: f64) -> PyResult<PyFunctionTable> {
    fourier::tech_lift(&f.inner, k, tol)
        .map(Into::into)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (h, tol = DEFAULT_TOL))]
fn nand_from_witness(h: &PyFunctionTable, tol: f64) -> PyResult<PyFunctionTable> {
    fourier::nand_from_witness(&h.inner, tol)
        .map(Into::into)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (fhat, tol = DEFAULT_TOL))]
fn matchineq_check(fhat: &PyFunctionTable, tol: f64) -> PyResult<(bool, f64)> {
    circuit::matchineq_check(&fhat.inner, tol).map_err(err)
}

fn stretch_plan_dict<'py>(
    py: Python<'py>,
    plan: ising::StretchPlan,
) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    dict.set_item("antiferro", plan.antiferro)?;
    dict.set_item("chain_len", plan.chain_len)?;
    dict.set_item("strands", plan.strands)?;
    dict.set_item("log_scale", plan.log_scale)?;
    dict.set_item("achieved_error", plan.achieved_error)?;
    dict.set_item("realized", PyFunctionTable::from(plan.realized))?;
    Ok(dict)
}

#[pyfunction]
fn stretch_plan_antiferro(
    py: Python<'_>,
    lambda_src: f64,
    lambda_tgt: f64,
    eps: f64,
) -> PyResult<Bound<'_, PyDict>> {
    let plan = ising::stretch_plan_antiferro(lambda_src, lambda_tgt, eps).map_err(err)?;
    stretch_plan_dict(py, plan)
}

#[pyfunction]
fn stretch_plan_ferro(
    py: Python<'_>,
    lambda_src: f64,
    lambda_tgt: f64,
    eps: f64,
) -> PyResult<Bound<'_, PyDict>> {
    let plan = ising::stretch_plan_ferro(lambda_src, lambda_tgt, eps).map_err(err)?;
    stretch_plan_dict(py, plan)
}

#[pyfunction]
fn antiferro_to_ferro_series(lam: f64) -> PyResult<f64> {
    ising::antiferro_to_ferro_series(lam, 1e-12).map_err(err)
}

#[pyfunction]
fn chain_values(y: f64, ell: u32) -> PyResult<(f64, f64)> {
    ising::chain_values(y, ell).map_err(err)
}

/// Returns `(a, b, achieved_error)` with `|a + b ln 2 - z| < delta`.
#[pyfunction]
fn dirichlet_const(z: f64, delta: f64) -> PyResult<(i64, i64, f64)> {
    ising::dirichlet_const(z, delta)
        .map(|d| (d.a, d.b, d.achieved_error))
        .map_err(err)
}

/// Returns `(exponent, achieved_error, power_table, base_table)`.
#[pyfunction]
fn force_odd4_approx(eps: f64) -> PyResult<(u32, f64, PyFunctionTable, PyFunctionTable)> {
    ising::force_odd4_approx(eps)
        .map(|a| (a.exponent, a.achieved_error, a.power.into(), a.raw.into()))
        .map_err(err)
}

/// Parity factors of a permissive self-dual table:
/// list of `(support_bits, lambda)`.
#[pyfunction]
#[pyo3(signature = (f, tol = DEFAULT_TOL))]
fn sd_parity_decompose(f: &PyFunctionTable, tol: f64) -> PyResult<Vec<(Vec<u8>, f64)>> {
    ising::sd_parity_decompose(&f.inner, tol)
        .map(|factors| {
            factors
                .into_iter()
                .map(|fac| (from_bits(&fac.support), fac.lambda))
                .collect()
        })
        .map_err(err)
}

#[pyfunction]
fn permissive_lift(f: &PyFunctionTable, j: u32) -> PyResult<PyFunctionTable> {
    ising::permissive_lift(&f.inner, j)
        .map(Into::into)
        .map_err(err)
}

/// Returns `(target_bit, [h_1, ..., h_n])`.
#[pyfunction]
#[pyo3(signature = (f, n, tol = DEFAULT_TOL))]
fn delta_pin(f: &PyFunctionTable, n: u32, tol: f64) -> PyResult<(bool, Vec<PyFunctionTable>)> {
    ising::delta_pin(&f.inner, n, tol)
        .map(|seq| {
            (
                seq.target_bit,
                seq.terms.into_iter().map(Into::into).collect(),
            )
        })
        .map_err(err)
}

/// Ternary factorization as a dict: `kind` plus the branch data.
#[pyfunction]
#[pyo3(signature = (f, tol = DEFAULT_TOL))]
fn collapse2_factorize<'py>(
    py: Python<'py>,
    f: &PyFunctionTable,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    match ising::collapse2_factorize(&f.inner, tol).map_err(err)? {
        ising::TernaryFactorization::Product {
            lambda_xy,
            lambda_xz,
            lambda_yz,
        } => {
            dict.set_item("kind", "product")?;
            dict.set_item("lambda_xy", lambda_xy)?;
            dict.set_item("lambda_xz", lambda_xz)?;
            dict.set_item("lambda_yz", lambda_yz)?;
        }
        ising::TernaryFactorization::Zero => dict.set_item("kind", "zero")?,
        ising::TernaryFactorization::DoubleEquality => dict.set_item("kind", "double-equality")?,
        ising::TernaryFactorization::EqualityIsing { eq, ising, lambda } => {
            dict.set_item("kind", "equality-ising")?;
            dict.set_item("eq", eq)?;
            dict.set_item("ising", ising)?;
            dict.set_item("lambda", lambda)?;
        }
    }
    Ok(dict)
}

/// Runs the verification suite; returns `(id, passed, details)` rows.
#[pyfunction]
#[pyo3(signature = (only = None, tol = DEFAULT_TOL))]
fn run_checks(only: Option<Vec<String>>, tol: f64) -> PyResult<Vec<(String, bool, Vec<String>)>> {
    let results = match only {
        None => verify::run_all(tol),
        Some(ids) => {
            let mut selected = Vec::new();
            for id in ids {
                match verify::run_check(&id, tol) {
                    Some(result) => selected.push(result),
                    None => return Err(PyValueError::new_err(format!("unknown check {id:?}"))),
                }
            }
            selected
        }
    };
    Ok(results
        .into_iter()
        .map(|r| (r.id.to_string(), r.passed, r.details))
        .collect())
}

#[pyfunction]
fn check_ids() -> Vec<&'static str> {
    verify::check_ids()
}

#[pymodule]
fn cloneforge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFunctionTable>()?;
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyPpsFormula>()?;
    m.add_function(wrap_pyfunction!(hising_hat, m)?)?;
    m.add_function(wrap_pyfunction!(parity_hat, m)?)?;
    m.add_function(wrap_pyfunction!(neg_coeff_reduce, m)?)?;
    m.add_function(wrap_pyfunction!(tech_lift, m)?)?;
    m.add_function(wrap_pyfunction!(nand_from_witness, m)?)?;
    m.add_function(wrap_pyfunction!(matchineq_check, m)?)?;
    m.add_function(wrap_pyfunction!(stretch_plan_antiferro, m)?)?;
    m.add_function(wrap_pyfunction!(stretch_plan_ferro, m)?)?;
    m.add_function(wrap_pyfunction!(antiferro_to_ferro_series, m)?)?;
    m.add_function(wrap_pyfunction!(chain_values, m)?)?;
    m.add_function(wrap_pyfunction!(dirichlet_const, m)?)?;
    m.add_function(wrap_pyfunction!(force_odd4_approx, m)?)?;
    m.add_function(wrap_pyfunction!(sd_parity_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(permissive_lift, m)?)?;
    m.add_function(wrap_pyfunction!(delta_pin, m)?)?;
    m.add_function(wrap_pyfunction!(collapse2_factorize, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    m.add_function(wrap_pyfunction!(check_ids, m)?)?;
    m.add("DEFAULT_TOL", DEFAULT_TOL)?;
    Ok(())
}
