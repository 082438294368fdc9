"""Smoke test for the `volkenborn` extension module.

Build it first (from the repository root):

    cargo build --release -p padic-volkenborn-py --features extension-module
    cp target/release/libpadic_volkenborn_py.so python/volkenborn.so
    python3 python/smoke_test.py
"""

import os
import sys
from fractions import Fraction

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import volkenborn as vk


def rational(p, x, digits=32):
    x = Fraction(x)
    return vk.PadicScalar.from_ratio(p, x.numerator, x.denominator, digits)


def main():
    p = 5

    # Q_p arithmetic
    two = vk.PadicScalar(p, 2)
    assert (two.inverse() * two) == vk.PadicScalar(p, 1)
    assert vk.PadicScalar(p, 50).valuation == 2
    w = vk.PadicScalar.teichmuller(p, 2)
    assert w ** 4 == vk.PadicScalar(p, 1)
    u, v = vk.PadicScalar(p, 6), vk.PadicScalar(p, 11)
    assert (u * v).log() == u.log() + v.log()

    # the tower
    k1 = vk.Field(p, 1)
    zeta = k1.zeta()
    assert zeta ** 25 == k1.one()
    assert (k1.one() - zeta).valuation == 1
    assert (k1.one() - zeta).norm() == vk.Field(p, 0).one() - vk.Field(p, 0).zeta()
    x = zeta + k1.from_int(3)
    assert x.galois(2).galois(3) == x.galois(6)
    back = vk.CycloElement.from_json(x.to_json())
    assert back == x

    # characters and Gauss sums
    phi = vk.DirichletCharacter.parse("omega^2*psi^1@5^2")
    assert phi.conductor == 25 and phi.is_even()
    assert phi.gauss_identity_residual(k1) == "inf"

    # Volkenborn integrals against Haar: int x = -1/2, int x^2 = 1/6
    k0 = vk.Field(p, 0)
    haar = vk.Distribution.haar(k0, 3)
    assert haar.check_relation() == "inf"
    r = haar.integrate_polynomial([0, 0, 1])
    diff = r["value"] - k0.from_scalar(rational(p, Fraction(1, 6)))
    assert diff.valuation >= 3, diff
    r = haar.integrate_binomial(1)
    assert (r["value"] - k0.from_scalar(rational(p, Fraction(-1, 2)))).valuation >= 2

    # norm-coherent sequences and interpolation
    assert vk.norm_coherence("cyclo-unit:c=1", p, 2) == "inf"
    lam = vk.Distribution.from_sequence("cyclo-unit:c=0", p, 1, tame=2)
    assert lam.check_relation() == "inf"
    rep = vk.verify_interpolation(p, 2, 1, 1, t=0)
    assert rep["digits"] >= 10, rep["digits"]

    # unit ratios, annihilator and regulator
    table = vk.unit_ratio_table(p, 2, 1)
    assert table["valid"], table
    c = table["valid"][0]
    m = vk.annihilator(p, 2, c, 1)
    assert m["integrality"]["integral"]
    reg = vk.regulator(p, 2, c, 1)
    assert reg["ratio_valuation"] == 0

    # the command line
    assert vk.run_cli(["coherence", "--p", "3", "--seq", "one-minus-zeta", "--format", "csv"]) == 0

    print("smoke test passed")


if __name__ == "__main__":
    main()
