//! Python bindings, importable as `volkenborn`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Ratio;
use padic_volkenborn as core;
use padic_volkenborn::coherent::{NormCoherentSequence, SequenceRule};
use padic_volkenborn::volkenborn::{MahlerFunction, TabulatedDistribution};
use pyo3::exceptions::{PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

fn err(e: core::Error) -> PyErr {
    match e {
        core::Error::DivisionByZero => PyZeroDivisionError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// serde_json value to plain Python objects.
fn to_py(py: Python<'_>, v: &Value) -> PyResult<PyObject> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_py(py),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_py(py),
            None => n.as_f64().unwrap_or(f64::NAN).into_py(py),
        },
        Value::String(s) => s.into_py(py),
        Value::Array(a) => {
            let items = a
                .iter()
                .map(|x| to_py(py, x))
                .collect::<PyResult<Vec<_>>>()?;
            PyList::new_bound(py, items).into_py(py)
        }
        Value::Object(m) => {
            let d = PyDict::new_bound(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_py(py)
        }
    })
}

fn report<T: serde::Serialize>(py: Python<'_>, x: &T) -> PyResult<PyObject> {
    let v = serde_json::to_value(x).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// An element of Q_p known to finite absolute precision.
#[pyclass(name = "PadicScalar", module = "volkenborn", frozen)]
#[derive(Clone)]
pub struct PyPadicScalar(pub core::PadicScalar);

#[pymethods]
impl PyPadicScalar {
    #[new]
    #[pyo3(signature = (p, n, digits = 32))]
    fn new(p: u32, n: i64, digits: u32) -> PyResult<Self> {
        if !is_prime(p) {
            return Err(PyValueError::new_err(format!("{p} is not an odd prime")));
        }
        Ok(PyPadicScalar(core::PadicScalar::from_int(p, n, digits)))
    }

    #[staticmethod]
    #[pyo3(signature = (p, num, den, digits = 32))]
    fn from_ratio(p: u32, num: i64, den: i64, digits: u32) -> PyResult<Self> {
        core::PadicScalar::from_ratio(p, num, den, digits)
            .map(PyPadicScalar)
            .map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (p, a, digits = 32))]
    fn teichmuller(p: u32, a: i64, digits: u32) -> PyResult<Self> {
        core::padic::teichmuller(p, a, digits)
            .map(PyPadicScalar)
            .map_err(err)
    }

    #[getter]
    fn prime(&self) -> u32 {
        self.0.prime()
    }

    /// `None` for zero.
    #[getter]
    fn valuation(&self) -> Option<i64> {
        self.0.valuation()
    }

    #[getter]
    fn absolute_precision(&self) -> i64 {
        self.0.absolute_precision()
    }

    /// Base-p digits of the unit part, least significant first.
    fn digits(&self) -> Vec<u32> {
        self.0.unit_digits()
    }

    /// Integer representative (requires non-negative valuation).
    fn to_int(&self) -> Option<BigInt> {
        self.0.to_integer()
    }

    fn log(&self) -> PyResult<Self> {
        core::padic::log_one_unit(&self.0)
            .map(PyPadicScalar)
            .map_err(err)
    }

    fn inverse(&self) -> PyResult<Self> {
        self.0.inv().map(PyPadicScalar).map_err(err)
    }

    fn __add__(&self, o: &Self) -> PyResult<Self> {
        same_prime(&self.0, &o.0)?;
        Ok(PyPadicScalar(self.0.add(&o.0)))
    }

    fn __sub__(&self, o: &Self) -> PyResult<Self> {
        same_prime(&self.0, &o.0)?;
        Ok(PyPadicScalar(self.0.sub(&o.0)))
    }

    fn __mul__(&self, o: &Self) -> PyResult<Self> {
        same_prime(&self.0, &o.0)?;
        Ok(PyPadicScalar(self.0.mul(&o.0)))
    }

    fn __truediv__(&self, o: &Self) -> PyResult<Self> {
        self.0.div(&o.0).map(PyPadicScalar).map_err(err)
    }

    fn __neg__(&self) -> Self {
        PyPadicScalar(self.0.neg())
    }

    fn __pow__(&self, e: u64, _modulo: Option<u64>) -> Self {
        PyPadicScalar(self.0.pow(e))
    }

    /// Equality up to the common precision.
    fn __eq__(&self, o: &Self) -> bool {
        self.0.prime() == o.0.prime() && self.0.eq_to_precision(&o.0)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("PadicScalar({})", self.0)
    }
}

fn same_prime(a: &core::PadicScalar, b: &core::PadicScalar) -> PyResult<()> {
    if a.prime() != b.prime() {
        return Err(err(core::Error::PrimeMismatch(a.prime(), b.prime())));
    }
    Ok(())
}

fn is_prime(p: u32) -> bool {
    p > 2
        && p % 2 == 1
        && (3..)
            .step_by(2)
            .take_while(|d| d * d <= p)
            .all(|d| p % d != 0)
}

/// The field `K_n = Q_p(zeta_{p^{n+1}})` at a working precision.
#[pyclass(name = "Field", module = "volkenborn", frozen)]
#[derive(Clone)]
pub struct PyField(pub Arc<core::FieldContext>);

#[pymethods]
impl PyField {
    #[new]
    #[pyo3(signature = (p, level = 0, precision = 32))]
    fn new(p: u32, level: u32, precision: u32) -> PyResult<Self> {
        core::FieldContext::get(p, level, precision)
            .map(PyField)
            .map_err(err)
    }

    #[getter]
    fn prime(&self) -> u32 {
        self.0.prime()
    }

    #[getter]
    fn level(&self) -> u32 {
        self.0.level()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.0.degree()
    }

    #[getter]
    fn precision(&self) -> u32 {
        self.0.precision()
    }

    fn one(&self) -> PyCycloElement {
        PyCycloElement(self.0.one())
    }

    fn from_int(&self, n: i64) -> PyCycloElement {
        PyCycloElement(self.0.from_int(n))
    }

    fn from_scalar(&self, x: &PyPadicScalar) -> PyCycloElement {
        PyCycloElement(self.0.from_scalar(&x.0))
    }

    /// `zeta_{p^{n+1}}^k`.
    #[pyo3(signature = (k = 1))]
    fn zeta(&self, k: i64) -> PyCycloElement {
        PyCycloElement(self.0.zeta_pow(k))
    }

    /// The uniformizer `zeta - 1`.
    fn pi(&self) -> PyCycloElement {
        PyCycloElement(self.0.pi())
    }

    fn __repr__(&self) -> String {
        format!(
            "Field(p={}, level={}, precision={})",
            self.0.prime(),
            self.0.level(),
            self.0.precision()
        )
    }
}

#[pyclass(name = "CycloElement", module = "volkenborn", frozen)]
#[derive(Clone)]
pub struct PyCycloElement(pub core::CycloElement);

#[pymethods]
impl PyCycloElement {
    #[getter]
    fn field(&self) -> PyField {
        PyField(self.0.context().clone())
    }

    /// `v_pi`, normalized so that `v_pi(p) = e`; `None` for zero.
    #[getter]
    fn valuation(&self) -> Option<i64> {
        self.0.pi_valuation()
    }

    /// `v_p` as a string fraction, or "inf".
    fn size(&self) -> String {
        self.0.size().to_string()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    #[getter]
    fn absolute_precision(&self) -> i64 {
        self.0.absolute_precision()
    }

    /// Coordinates in the basis `1, pi, pi^2, ...`.
    fn coeffs(&self) -> Vec<PyPadicScalar> {
        self.0.coeffs().into_iter().map(PyPadicScalar).collect()
    }

    /// The element as a scalar when it lies in Q_p.
    fn as_scalar(&self) -> Option<PyPadicScalar> {
        self.0.as_scalar().map(PyPadicScalar)
    }

    /// `sigma_a: zeta -> zeta^a`.
    fn galois(&self, a: i64) -> PyResult<Self> {
        self.0.galois(a).map(PyCycloElement).map_err(err)
    }

    fn norm(&self) -> PyResult<Self> {
        self.0.norm_to_sublevel().map(PyCycloElement).map_err(err)
    }

    fn embed(&self, target: &PyField) -> PyResult<Self> {
        self.0.embed(&target.0).map(PyCycloElement).map_err(err)
    }

    /// Iwasawa logarithm (`log p = 0`).
    fn log(&self) -> PyResult<Self> {
        self.0.iwasawa_log().map(PyCycloElement).map_err(err)
    }

    fn inverse(&self) -> PyResult<Self> {
        self.0.inv().map(PyCycloElement).map_err(err)
    }

    fn __add__(&self, o: &Self) -> PyResult<Self> {
        op(&self.0, &o.0, core::cyclo::FieldOp::Add)
    }

    fn __sub__(&self, o: &Self) -> PyResult<Self> {
        op(&self.0, &o.0, core::cyclo::FieldOp::Sub)
    }

    fn __mul__(&self, o: &Self) -> PyResult<Self> {
        op(&self.0, &o.0, core::cyclo::FieldOp::Mul)
    }

    fn __truediv__(&self, o: &Self) -> PyResult<Self> {
        op(&self.0, &o.0, core::cyclo::FieldOp::Div)
    }

    fn __neg__(&self) -> Self {
        PyCycloElement(-&self.0)
    }

    fn __pow__(&self, e: u64, _modulo: Option<u64>) -> Self {
        PyCycloElement(self.0.pow(e))
    }

    fn __eq__(&self, o: &Self) -> bool {
        self.0.context().prime() == o.0.context().prime()
            && self.0.level() == o.0.level()
            && self.0.eq_to_precision(&o.0)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        serde_json::from_str(s)
            .map(PyCycloElement)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("CycloElement({})", self.0)
    }
}

fn op(
    a: &core::CycloElement,
    b: &core::CycloElement,
    o: core::cyclo::FieldOp,
) -> PyResult<PyCycloElement> {
    core::cyclo::field_arith(a, b, o)
        .map(PyCycloElement)
        .map_err(err)
}

/// `omega^tame * psi^wild` modulo `p^{level+1}`.
#[pyclass(name = "DirichletCharacter", module = "volkenborn", frozen)]
#[derive(Clone)]
pub struct PyCharacter(pub core::DirichletCharacter);

#[pymethods]
impl PyCharacter {
    #[new]
    #[pyo3(signature = (p, level = 0, tame = 0, wild = 0))]
    fn new(p: u32, level: u32, tame: i64, wild: i64) -> PyResult<Self> {
        core::DirichletCharacter::new(p, level, tame, wild)
            .map(PyCharacter)
            .map_err(err)
    }

    /// Parses `omega^j*psi^u@p^k`.
    #[staticmethod]
    fn parse(s: &str) -> PyResult<Self> {
        s.parse().map(PyCharacter).map_err(err)
    }

    #[getter]
    fn conductor(&self) -> u64 {
        self.0.conductor()
    }

    fn is_even(&self) -> bool {
        self.0.is_even()
    }

    fn is_trivial(&self) -> bool {
        self.0.is_trivial()
    }

    fn conj(&self) -> Self {
        PyCharacter(self.0.conj())
    }

    fn value(&self, field: &PyField, a: i64) -> PyResult<PyCycloElement> {
        self.0.value(&field.0, a).map(PyCycloElement).map_err(err)
    }

    fn gauss_sum(&self, field: &PyField) -> PyResult<PyCycloElement> {
        self.0.gauss_sum(&field.0).map(PyCycloElement).map_err(err)
    }

    /// `tau(phi) tau(conj phi) - phi(-1) f` as a valuation string ("inf" when exact).
    fn gauss_identity_residual(&self, field: &PyField) -> PyResult<String> {
        self.0
            .gauss_identity_residual(&field.0)
            .map(|v| v.to_string())
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("DirichletCharacter('{}')", self.0)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

/// A distribution on Z_p tabulated on the levels `0..=depth`.
#[pyclass(name = "Distribution", module = "volkenborn", frozen)]
#[derive(Clone)]
pub struct PyDistribution(pub TabulatedDistribution);

#[pymethods]
impl PyDistribution {
    #[staticmethod]
    fn haar(field: &PyField, depth: u32) -> Self {
        PyDistribution(TabulatedDistribution::haar(&field.0, depth))
    }

    #[staticmethod]
    fn dirac(field: &PyField, c: i64, depth: u32) -> Self {
        PyDistribution(TabulatedDistribution::dirac(&field.0, c, depth))
    }

    #[staticmethod]
    fn from_group_ring(field: &PyField, coeffs: Vec<PyCycloElement>, depth: u32) -> PyResult<Self> {
        let c: Vec<_> = coeffs.into_iter().map(|x| x.0).collect();
        TabulatedDistribution::from_group_ring(&field.0, &c, depth)
            .map(PyDistribution)
            .map_err(err)
    }

    /// `lambda` (or `lambda_chi` when `tame` is given) of a built-in sequence.
    #[staticmethod]
    #[pyo3(signature = (seq, p, depth, tame = None, precision = 32))]
    fn from_sequence(
        seq: &str,
        p: u32,
        depth: u32,
        tame: Option<i64>,
        precision: u32,
    ) -> PyResult<Self> {
        let rule: SequenceRule = seq.parse().map_err(err)?;
        let s = NormCoherentSequence::build(rule, p, depth, precision).map_err(err)?;
        let d = match tame {
            None => s.lambda(depth),
            Some(j) => s.lambda_chi(j, depth),
        };
        d.map(PyDistribution).map_err(err)
    }

    #[getter]
    fn depth(&self) -> u32 {
        self.0.depth()
    }

    #[getter]
    fn field(&self) -> PyField {
        PyField(self.0.context().clone())
    }

    fn value(&self, j: u32, a: i64) -> PyResult<PyCycloElement> {
        if j > self.0.depth() {
            return Err(PyValueError::new_err(format!(
                "level {j} exceeds depth {}",
                self.0.depth()
            )));
        }
        Ok(PyCycloElement(self.0.value(j, a).clone()))
    }

    /// Worst residual of the distribution relation, "inf" when exact.
    fn check_relation(&self) -> String {
        self.0.check_distribution_relation().to_string()
    }

    fn volkenborn_defect(&self) -> String {
        self.0.volkenborn_defect().to_string()
    }

    /// `int f dmu` for a polynomial given by coefficients (ints or `(num, den)` pairs).
    fn integrate_polynomial(&self, py: Python<'_>, coeffs: Vec<PyObject>) -> PyResult<PyObject> {
        let c = coeffs
            .iter()
            .map(|x| {
                if let Ok(n) = x.extract::<i64>(py) {
                    Ok(Ratio::from(n))
                } else {
                    let (a, b): (i64, i64) = x.extract(py)?;
                    if b == 0 {
                        return Err(PyZeroDivisionError::new_err("zero denominator"));
                    }
                    Ok(Ratio::new(a, b))
                }
            })
            .collect::<PyResult<Vec<_>>>()?;
        self.integral(py, &MahlerFunction::Polynomial(c))
    }

    /// `int C(x, m) dmu`.
    fn integrate_binomial(&self, py: Python<'_>, m: u64) -> PyResult<PyObject> {
        self.integral(py, &MahlerFunction::Binomial(m))
    }

    fn convolve(&self, other: &Self, j: u32) -> PyResult<Self> {
        self.0
            .convolve(&other.0, j)
            .map(PyDistribution)
            .map_err(err)
    }

    /// `mu-hat(zeta_{p^j}^k)`.
    fn fourier_at_root(&self, j: u32, k: i64) -> PyResult<PyCycloElement> {
        let root = core::volkenborn::RootOfUnity { order_exp: j, k };
        self.0
            .fourier_eval_at_root(root)
            .map(PyCycloElement)
            .map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!(
            "Distribution(p={}, depth={}, level={})",
            self.0.prime(),
            self.0.depth(),
            self.0.ambient_level()
        )
    }
}

impl PyDistribution {
    fn integral(&self, py: Python<'_>, f: &MahlerFunction) -> PyResult<PyObject> {
        let r = self.0.volkenborn_integral(f).map_err(err)?;
        let d = PyDict::new_bound(py);
        d.set_item("value", PyCycloElement(r.value).into_py(py))?;
        d.set_item("cauchy_defect", r.cauchy_defect.to_string())?;
        d.set_item("levels_used", r.levels_used)?;
        Ok(d.into_py(py))
    }
}

/// Two-path check of the interpolation formula; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (p, tame, wild, level, t = 0, depth = None, precision = 32))]
fn verify_interpolation(
    py: Python<'_>,
    p: u32,
    tame: i64,
    wild: i64,
    level: u32,
    t: i64,
    depth: Option<u32>,
    precision: u32,
) -> PyResult<PyObject> {
    let r = core::interp::verify_interpolation(
        p,
        tame,
        wild,
        level,
        t,
        depth.unwrap_or(level),
        precision,
    )
    .map_err(err)?;
    report(py, &r)
}

#[pyfunction]
#[pyo3(signature = (p, tame, level = 0, wild = 0, precision = 32))]
fn leopoldt_lp1(
    p: u32,
    tame: i64,
    level: u32,
    wild: i64,
    precision: u32,
) -> PyResult<PyCycloElement> {
    let phi = core::DirichletCharacter::new(p, level, tame, wild).map_err(err)?;
    core::interp::leopoldt_lp1(&phi, precision)
        .map(PyCycloElement)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (p, tame, n = 1, precision = 32))]
fn unit_ratio_table(
    py: Python<'_>,
    p: u32,
    tame: i64,
    n: u32,
    precision: u32,
) -> PyResult<PyObject> {
    report(
        py,
        &core::interp::unit_ratio_table(p, tame, n, precision).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (p, tame, c, n = 1, precision = 32))]
fn annihilator(
    py: Python<'_>,
    p: u32,
    tame: i64,
    c: i64,
    n: u32,
    precision: u32,
) -> PyResult<PyObject> {
    report(
        py,
        &core::interp::annihilator_m(p, tame, c, n, precision).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (p, tame, c, n = 1, precision = 32))]
fn regulator(
    py: Python<'_>,
    p: u32,
    tame: i64,
    c: i64,
    n: u32,
    precision: u32,
) -> PyResult<PyObject> {
    report(
        py,
        &core::interp::regulator_product_check(p, tame, c, n, precision).map_err(err)?,
    )
}

/// Worst norm-coherence residual of a built-in sequence ("inf" when exact).
#[pyfunction]
#[pyo3(signature = (seq, p, depth, precision = 32))]
fn norm_coherence(seq: &str, p: u32, depth: u32, precision: u32) -> PyResult<String> {
    let rule: SequenceRule = seq.parse().map_err(err)?;
    let s = NormCoherentSequence::build(rule, p, depth, precision).map_err(err)?;
    s.verify_norm_coherence()
        .map(|v| v.to_string())
        .map_err(err)
}

/// Runs the `volk` command line with the given arguments; returns the exit code.
#[pyfunction]
fn run_cli(args: Vec<String>) -> i32 {
    core::cli::run(std::iter::once("volk".to_string()).chain(args))
}

#[pymodule]
#[pyo3(name = "volkenborn")]
pub fn volkenborn_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPadicScalar>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyCycloElement>()?;
    m.add_class::<PyCharacter>()?;
    m.add_class::<PyDistribution>()?;
    m.add_function(wrap_pyfunction!(verify_interpolation, m)?)?;
    m.add_function(wrap_pyfunction!(leopoldt_lp1, m)?)?;
    m.add_function(wrap_pyfunction!(unit_ratio_table, m)?)?;
    m.add_function(wrap_pyfunction!(annihilator, m)?)?;
    m.add_function(wrap_pyfunction!(regulator, m)?)?;
    m.add_function(wrap_pyfunction!(norm_coherence, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
