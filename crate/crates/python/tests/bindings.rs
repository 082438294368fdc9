use padic_volkenborn_py::volkenborn_module;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyModule};

fn run(code: &str) {
    pyo3::prepare_freethreaded_python();
    Python::with_gil(|py| {
        let m = PyModule::new_bound(py, "volkenborn").unwrap();
        volkenborn_module(&m).unwrap();
        let globals = PyDict::new_bound(py);
        globals.set_item("vk", m).unwrap();
        if let Err(e) = py.run_bound(code, Some(&globals), None) {
            e.print(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn scalar_arithmetic() {
    run(r#"
a = vk.PadicScalar(5, 2)
assert (a.inverse() * a) == vk.PadicScalar(5, 1)
assert a.inverse().to_int() % 25 == 13
assert vk.PadicScalar.teichmuller(5, 2, 3).to_int() == 57
assert vk.PadicScalar(5, 250).valuation == 3
try:
    vk.PadicScalar(5, 1) / vk.PadicScalar(5, 0)
    raise AssertionError("expected ZeroDivisionError")
except ZeroDivisionError:
    pass
try:
    vk.PadicScalar(5, 1) + vk.PadicScalar(3, 1)
    raise AssertionError("expected ValueError")
except ValueError:
    pass
"#);
}

#[test]
fn field_and_characters() {
    run(r#"
k = vk.Field(3, 1, 20)
assert k.degree == 6
z = k.zeta()
assert z ** 9 == k.one()
assert (k.one() - z).valuation == 1
assert (k.one() - z).log().valuation is not None
for s in ["omega^1*psi^1@3^2", "omega^0*psi^2@3^2"]:
    phi = vk.DirichletCharacter.parse(s)
    assert str(phi) == s
    assert phi.gauss_identity_residual(k) == "inf"
assert vk.DirichletCharacter(3, 1, 1, 0).conductor == 3
"#);
}

#[test]
fn distributions_and_reports() {
    run(r#"
k = vk.Field(3, 1, 24)
haar = vk.Distribution.haar(k, 4)
mu = vk.Distribution.dirac(k, 2, 4)
assert haar.check_relation() == "inf"
assert haar.volkenborn_defect() == "inf"
conv = haar.convolve(mu, 2)
assert conv.fourier_at_root(2, 1) == haar.fourier_at_root(2, 1) * mu.fourier_at_root(2, 1)
r = mu.integrate_polynomial([1, (1, 2)])
assert r["value"] == k.from_int(2)
rep = vk.verify_interpolation(3, 0, 1, 1)
assert rep["digits"] >= 10
assert vk.norm_coherence("one-minus-zeta", 3, 2) == "inf"
try:
    vk.leopoldt_lp1(5, 1)
    raise AssertionError("expected ValueError")
except ValueError:
    pass
"#);
}
