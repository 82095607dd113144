import math

import pytest
import sympy
from hypothesis import given, strategies as st

from intmatcount.errors import InvalidInput, NotSquarefree
from intmatcount.polyalg import (IntPolynomial, discriminant, is_irreducible, real_root_count,
                                 resultant, roots, signature)

x = sympy.Symbol("x")


def as_sympy(p):
    return sympy.Poly(list(p.coeffs), x)


monic = st.lists(st.integers(-6, 6), min_size=2, max_size=4).map(lambda c: IntPolynomial((1, *c)))


def test_parse_and_eval():
    p = IntPolynomial.parse("1,0,1")
    assert p.degree == 2 and p(2) == 5 and p.low_first == (1, 0, 1)


@pytest.mark.parametrize("text", ["2,0,1", "1", "1,a,3", ""])
def test_parse_rejects(text):
    with pytest.raises(InvalidInput):
        IntPolynomial.parse(text)


@pytest.mark.parametrize("coeffs,disc", [((1, 0, 1), -4), ((1, -1, -1), 5), ((1, 0, -1, -1), -23),
                                         ((1, 0, 3), -12), ((1, 0, 0, -2), -108)])
def test_discriminant_values(coeffs, disc):
    assert discriminant(IntPolynomial(coeffs)) == disc


@given(monic)
def test_discriminant_matches_sympy(p):
    assert discriminant(p) == sympy.discriminant(as_sympy(p))


@given(monic, monic)
def test_resultant_matches_sympy(p, q):
    assert resultant(list(p.low_first), list(q.low_first)) == sympy.resultant(as_sympy(p), as_sympy(q))


@given(monic)
def test_irreducibility_matches_sympy(p):
    _, factors = sympy.factor_list(as_sympy(p))
    expected = len(factors) == 1 and factors[0][1] == 1
    assert is_irreducible(p) == expected


def test_reducible_without_rational_roots():
    assert not is_irreducible(IntPolynomial((1, 0, 0, 0, 4)))  # (x^2+2x+2)(x^2-2x+2)


@given(monic)
def test_signature_matches_real_root_count(p):
    if sympy.discriminant(as_sympy(p)) == 0:
        with pytest.raises(NotSquarefree):
            signature(p)
        return
    r1, r2 = signature(p)
    assert r1 + 2 * r2 == p.degree
    assert r1 == real_root_count(p) == len(sympy.real_roots(as_sympy(p)))


@given(monic)
def test_roots_certified(p):
    if sympy.discriminant(as_sympy(p)) == 0:
        return
    rs = roots(p)
    truth = [complex(r) for r in sympy.Poly(as_sympy(p)).nroots(n=30)]
    got = rs.values
    r1, r2 = rs.signature
    for r in rs.roots:
        assert min(abs(r.mid - t) for t in truth) <= max(r.radius, 1e-12)
    # canonical order: reals ascending, then Im > 0 representatives, then conjugates
    reals = [v.real for v in got[:r1]]
    assert reals == sorted(reals)
    for k in range(r2):
        assert got[r1 + k].imag > 0
        assert abs(got[r1 + r2 + k] - got[r1 + k].conjugate()) < 1e-12


def test_roots_of_cubic():
    v = roots(IntPolynomial((1, 0, -1, -1))).values
    assert v[0].real == pytest.approx(1.3247179572447460)
    assert v[1] == pytest.approx(complex(-0.6623589786223730, 0.5622795120623012))
