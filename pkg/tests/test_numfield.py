from fractions import Fraction

import sympy
from hypothesis import given, strategies as st

from intmatcount.numfield import (FieldElement, embed, field_arithmetic, norm, regular_representation,
                                  trace)
from intmatcount.polyalg import IntPolynomial

x = sympy.Symbol("x")
POLYS = [IntPolynomial(c) for c in [(1, 0, 5), (1, -1, -1), (1, 0, -1, -1), (1, 0, 0, -2), (1, 0, 0, 0, -2)]]

coords = st.lists(st.integers(-9, 9), min_size=4, max_size=4)


def elem(c, P):
    return FieldElement.from_poly(c[:P.degree], P)


def to_sympy(e):
    return sum(sympy.Rational(c.numerator, c.denominator) * x ** i for i, c in enumerate(e.coords))


@given(st.sampled_from(POLYS), coords, coords)
def test_product_matches_polynomial_remainder(P, a, b):
    A, B = elem(a, P), elem(b, P)
    mod = sympy.Poly(list(P.coeffs), x)
    expect = sympy.Poly(sympy.rem(to_sympy(A) * to_sympy(B), mod.as_expr(), x), x)
    got = sympy.Poly(to_sympy(field_arithmetic(A, B, "mul")), x) if (A * B) else sympy.Poly(0, x)
    assert (got - expect).is_zero


@given(st.sampled_from(POLYS), coords)
def test_inverse(P, a):
    A = elem(a, P)
    if not A:
        return
    assert A * A.inv() == FieldElement.rational(1, P)
    assert field_arithmetic(A, field_arithmetic(A, A, "inv"), "mul") == FieldElement.rational(1, P)


@given(st.sampled_from(POLYS), coords)
def test_norm_is_resultant(P, a):
    A = elem(a, P)
    # N(β) = Res(P, β(x)) for monic P
    r = sympy.resultant(sympy.Poly(list(P.coeffs), x).as_expr(), to_sympy(A), x)
    assert norm(A) == Fraction(int(r))


@given(st.sampled_from(POLYS), coords)
def test_norm_trace_from_embeddings(P, a):
    A = elem(a, P)
    vals = [embed(A, i).value for i in range(1, P.degree + 1)]
    prod = 1
    for v in vals:
        prod *= v
    assert abs(prod - float(norm(A))) <= 1e-8 * max(1.0, abs(float(norm(A))))
    assert abs(sum(vals) - float(trace(A))) <= 1e-8 * max(1.0, abs(float(trace(A))))


def test_regular_representation_in_basis():
    P = IntPolynomial((1, 0, 5))
    a = FieldElement.generator(P)
    basis = [FieldElement.rational(2, P), FieldElement.from_poly((1, 1), P)]
    R = regular_representation(a, basis)
    assert [[int(v) for v in row] for row in R] == [[-1, -3], [2, 1]]


def test_generator_regular_representation_has_char_poly_P():
    P = IntPolynomial((1, 0, -1, -1))
    R = sympy.Matrix(regular_representation(FieldElement.generator(P)))
    assert sympy.Poly(R.charpoly(x).as_expr(), x).all_coeffs() == list(P.coeffs)
