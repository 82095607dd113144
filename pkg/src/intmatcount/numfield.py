"""Exact arithmetic in K = Q[λ]/(P) on the power basis 1, α, ..., α^(n-1)."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import _linalg as la
from .errors import InvalidInput
from .polyalg import DEFAULT_EPS, IntPolynomial, roots


def _reduce(coeffs, poly: IntPolynomial):
    """Reduce a low-first coefficient list modulo the monic P."""
    n = poly.degree
    c = [Fraction(x) for x in coeffs]
    low = poly.low_first
    for k in range(len(c) - 1, n - 1, -1):
        top = c[k]
        if top:
            # α^k = -Σ c_i α^(k-n+i)
            for i in range(n):
                c[k - n + i] -= top * low[i]
        c[k] = Fraction(0)
    c = c[:n] + [Fraction(0)] * (n - len(c))
    return tuple(c)


@dataclass(frozen=True)
class FieldElement:
    coords: tuple
    poly: IntPolynomial

    def __post_init__(self):
        c = tuple(Fraction(x) for x in self.coords)
        if len(c) != self.poly.degree:
            raise InvalidInput("coordinate vector has wrong length")
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_poly(cls, coeffs, poly):
        return cls(_reduce(coeffs, poly), poly)

    @classmethod
    def rational(cls, c, poly):
        return cls((c,) + (0,) * (poly.degree - 1), poly)

    @classmethod
    def generator(cls, poly):
        """The class of λ, i.e. the root α."""
        return cls.from_poly([0, 1], poly)

    def _check(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElement.rational(other, self.poly)
        if not isinstance(other, FieldElement) or other.poly != self.poly:
            raise InvalidInput("elements live in different fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FieldElement(tuple(a + b for a, b in zip(self.coords, other.coords)), self.poly)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(tuple(-a for a in self.coords), self.poly)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        n = self.poly.degree
        prod = [Fraction(0)] * (2 * n - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    prod[i + j] += a * b
        return FieldElement.from_poly(prod, self.poly)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return self.inv() ** (-k)
        out = FieldElement.rational(1, self.poly)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other):
        return self * self._check(other).inv()

    def __bool__(self):
        return any(self.coords)

    def is_rational(self):
        return not any(self.coords[1:])

    def is_integral_coords(self):
        return all(c.denominator == 1 for c in self.coords)

    def inv(self):
        """Inverse via the extended Euclidean algorithm in Q[λ]."""
        if not self:
            raise ZeroDivisionError("inverse of zero")
        from .polyalg import _divmod, _trim

        a = [Fraction(x) for x in self.poly.low_first]
        b = _trim(list(self.coords))
        # invariant: s*self ≡ r (mod P)
        r0, s0 = a, [Fraction(0)]
        r1, s1 = b, [Fraction(1)]
        while any(r1) and len(_trim(r1)) > 1:
            q, r = _divmod(r0, r1)
            s = _poly_sub(s0, _poly_mul(q, s1))
            r0, s0, r1, s1 = r1, s1, r, s
        if not any(r1):
            raise InvalidInput("element is not invertible (P reducible?)")
        c = r1[0]
        return FieldElement.from_poly([x / c for x in s1], self.poly)

    def __str__(self):
        parts = []
        for k, c in enumerate(self.coords):
            if c:
                mono = "" if k == 0 else ("α" if k == 1 else f"α^{k}")
                parts.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(parts) or "0"


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_sub(a, b):
    m = max(len(a), len(b))
    a = list(a) + [0] * (m - len(a))
    b = list(b) + [0] * (m - len(b))
    return [x - y for x, y in zip(a, b)]


def field_arithmetic(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inv()
    raise InvalidInput(f"unknown operation {op!r}")


def coord_matrix(basis):
    """Columns are the power-basis coordinates of the basis elements."""
    return la.transpose([list(b.coords) for b in basis])


def regular_representation(beta: FieldElement, basis=None):
    """Matrix Y with beta * basis_j = sum_i Y[i][j] basis_i."""
    n = beta.poly.degree
    if basis is None:
        basis = [FieldElement.generator(beta.poly) ** k for k in range(n)]
    if len(basis) != n:
        raise InvalidInput("basis has wrong size")
    B = coord_matrix(basis)
    if la.det(B) == 0:
        raise InvalidInput("basis is not linearly independent")
    images = coord_matrix([beta * b for b in basis])
    return la.mat_mul(la.inverse(B), images)


def norm_trace(beta: FieldElement):
    y = regular_representation(beta)
    return Fraction(la.det(y)), Fraction(sum(y[i][i] for i in range(len(y))))


def norm(beta):
    return norm_trace(beta)[0]


def trace(beta):
    return norm_trace(beta)[1]


@dataclass(frozen=True)
class Embedding:
    value: complex
    radius: float


def embed(beta: FieldElement, i: int, eps: float = DEFAULT_EPS) -> Embedding:
    """sigma_i(beta), 1-based index in the canonical root order."""
    n = beta.poly.degree
    if not 1 <= i <= n:
        raise InvalidInput("embedding index out of range")
    rs = roots(beta.poly, eps).roots[i - 1]
    z = mpmath.mpc(rs.mid)
    val = mpmath.mpf(0)
    # |d/dz| bound on the disc gives the propagated radius
    deriv_bound = mpmath.mpf(0)
    for k, c in enumerate(beta.coords):
        cf = mpmath.mpf(c.numerator) / c.denominator
        val += cf * z ** k
        if k:
            deriv_bound += abs(cf) * k * (abs(z) + rs.radius) ** (k - 1)
    v = complex(val)
    if beta.poly.degree and rs.is_real:
        v = complex(v.real, 0.0)
    return Embedding(v, float(deriv_bound * rs.radius) + 4e-16 * max(1.0, abs(v)))
