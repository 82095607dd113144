"""Invariants of quadratic orders: conductors, class numbers, units, regulators.

An order is named by its discriminant d = g^2 D (D fundamental, g the
conductor). Class numbers count lattice classes under K*-scaling whose
multiplicator ring is exactly the order, i.e. the ordinary (wide) Picard
group. They are computed from reduced binary quadratic forms.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

import mpmath
import sympy

from .errors import InvalidInput, UnsupportedDegree
from .lattice import (LatticeHNF, equation_order, equivalent, hnf_from_generators,
                      ideals_of_index, order_discriminant)
from .numfield import FieldElement, norm
from .polyalg import IntPolynomial, discriminant, is_irreducible, signature


@dataclass(frozen=True)
class OrderInvariants:
    disc_order: int
    conductor: int
    h: int
    R: float
    w: int
    r1: int
    r2: int
    h_plus: int | None = None  # proper form classes (differs from h only for real orders)

    def to_dict(self):
        return {"disc": self.disc_order, "conductor": self.conductor, "h": self.h,
                "R": self.R, "w": self.w, "r1": self.r1, "r2": self.r2}


def _check_disc(d):
    d = int(d)
    if d % 4 not in (0, 1):
        raise InvalidInput(f"{d} is not a quadratic discriminant")
    if d >= 0 and isqrt(d) ** 2 == d:
        raise InvalidInput(f"{d} is a square")
    return d


def split_discriminant(d):
    """d = g^2 D with D fundamental; returns (D, g)."""
    d = _check_disc(d)
    core = -1 if d < 0 else 1
    sq = 1
    for p, e in sympy.factorint(abs(d)).items():
        if e % 2:
            core *= p
        sq *= p ** (e // 2)
    if core % 4 == 1:
        return core, sq
    return 4 * core, sq // 2


def conductor(d):
    return split_discriminant(d)[1]


# -- reduced forms -----------------------------------------------------------

def reduced_definite_forms(d):
    """Primitive reduced positive definite forms (a, b, c) of discriminant d < 0."""
    out = []
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a + 1, a + 1):
            if (b * b - d) % (4 * a):
                continue
            c = (b * b - d) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if gcd(gcd(a, b), c) == 1:
                out.append((a, b, c))
        a += 1
    return out


def _is_reduced_indefinite(a, b, d):
    # 0 < b < √d and √d - b < 2|a| < √d + b
    if b <= 0 or b * b >= d:
        return False
    t = 2 * abs(a) + b
    if t * t <= d:
        return False
    u = 2 * abs(a) - b
    return u < 0 or u * u < d


def reduced_indefinite_forms(d):
    s = isqrt(d)
    out = []
    for a in range(-s, s + 1):
        if a == 0:
            continue
        for b in range(1, s + 1):
            if (b * b - d) % (4 * a):
                continue
            c = (b * b - d) // (4 * a)
            if gcd(gcd(a, b), c) == 1 and _is_reduced_indefinite(a, b, d):
                out.append((a, b, c))
    return out


def _rho(form, d):
    a, b, c = form
    s = isqrt(d)
    m = 2 * abs(c)
    b2 = s - (s + b) % m
    return c, b2, (b2 * b2 - d) // (4 * c)


def indefinite_cycles(d):
    forms = set(reduced_indefinite_forms(d))
    cycles = []
    while forms:
        start = min(forms)
        cyc = [start]
        f = _rho(start, d)
        while f != start:
            cyc.append(f)
            f = _rho(f, d)
        forms -= set(cyc)
        cycles.append(cyc)
    return cycles


# -- units -------------------------------------------------------------------

def _floor_quad(P, Q, D):
    """floor((P + √D) / Q) for integer P, Q != 0 and non-square D > 0."""
    s = isqrt(D)
    if Q > 0:
        return (P + s) // Q
    return (-P - s - 1) // (-Q)


def _pqa(P0, Q0, D):
    """Continued fraction of (P0 + √D)/Q0; returns the fundamental solution
    (G, B) of the associated ±Q0^2 norm equation and its sign."""
    A2, A1 = 0, 1
    B2, B1 = 1, 0
    G2, G1 = -P0, Q0
    P, Q = P0, Q0
    first = None
    i = 0
    hist = []
    while True:
        a = _floor_quad(P, Q, D)
        A2, A1 = A1, a * A1 + A2
        B2, B1 = B1, a * B1 + B2
        G2, G1 = G1, a * G1 + G2
        hist.append((G1, B1))
        P = a * Q - P
        Q = (D - P * P) // Q
        i += 1
        if i == 1:
            first = (P, Q)
        elif (P, Q) == first:
            l = i - 1
            G, B = hist[l - 1]
            return G, B, (-1) ** l


@lru_cache(maxsize=None)
def pell_fundamental(d):
    """Minimal (x, y), y > 0, with x^2 - d y^2 = ±4; returns (x, y, sign)."""
    d = _check_disc(d)
    if d < 0:
        raise InvalidInput("no fundamental unit for negative discriminants")
    if d % 4 == 1:
        x, y, sgn = _pqa(1, 2, d)
    else:
        x, y, sgn = _pqa(0, 1, d // 4)
        x *= 2
    assert x * x - d * y * y == 4 * sgn
    return x, y, sgn


def order_polynomial(d):
    """λ^2 - dλ + (d^2 - d)/4, whose root generates the order of discriminant d."""
    d = _check_disc(d)
    return IntPolynomial((1, -d, (d * d - d) // 4))


def _sqrt_disc(d, poly):
    """√d as an element of the field of the quadratic ``poly``."""
    c1 = poly.coeffs[1]
    delta = discriminant(poly)
    ratio = Fraction(d, delta)
    r = Fraction(isqrt(ratio.numerator), isqrt(ratio.denominator))
    if r * r != ratio:
        raise InvalidInput(f"discriminant {d} does not belong to this field")
    alpha = FieldElement.generator(poly)
    return (2 * alpha + c1) * r


def fundamental_unit(d, poly: IntPolynomial | None = None) -> FieldElement:
    """ε = (x + y√d)/2 > 1 (in the embedding with √d > 0) generating O_d^× / ±1."""
    x, y, _ = pell_fundamental(d)
    poly = poly or order_polynomial(d)
    return (FieldElement.rational(x, poly) + y * _sqrt_disc(d, poly)) * Fraction(1, 2)


def fundamental_unit_of_order(O: LatticeHNF) -> FieldElement:
    return fundamental_unit(order_discriminant(O), O.poly)


def unit_norm(d):
    return pell_fundamental(d)[2]


def regulator(d, dps=30):
    d = _check_disc(d)
    if d < 0:
        return 1.0
    x, y, _ = pell_fundamental(d)
    with mpmath.workdps(dps):
        return float(mpmath.log((x + y * mpmath.sqrt(d)) / 2))


def roots_of_unity(d):
    d = _check_disc(d)
    return {-4: 4, -3: 6}.get(d, 2)


# -- class numbers -----------------------------------------------------------

def proper_class_number(d):
    """Number of proper equivalence classes of primitive forms (narrow for d > 0)."""
    d = _check_disc(d)
    if d < 0:
        return len(reduced_definite_forms(d))
    return len(indefinite_cycles(d))


def class_number(d):
    """Lattice classes with multiplicator ring exactly the order of disc d."""
    hp = proper_class_number(d)
    if d < 0 or unit_norm(d) == -1:
        return hp
    return hp // 2


def class_number_bruteforce(d, max_index=None):
    """Count lattice classes directly: sublattices of O_d with multiplicator
    ring O_d, up to index ``max_index``, partitioned by equivalence."""
    d = _check_disc(d)
    poly = order_polynomial(d)
    O = equation_order(poly)
    if max_index is None:
        max_index = isqrt(abs(d)) + 1
    reps = []
    for k in range(1, max_index + 1):
        for S in ideals_of_index(O, k):
            if not any(equivalent(r, S) for r in reps):
                reps.append(S)
    return len(reps)


def order_of_conductor(poly: IntPolynomial, g: int) -> LatticeHNF:
    """Z + Z·g·ω_K inside the field of the quadratic ``poly``."""
    delta = discriminant(poly)
    D, f = split_discriminant(delta)
    if f % g:
        raise InvalidInput(f"{g} does not divide the conductor {f}")
    sqrtD = _sqrt_disc(D, poly)
    omega = (FieldElement.rational(D, poly) + sqrtD) * Fraction(1, 2)
    return hnf_from_generators([FieldElement.rational(1, poly), omega * g])


def invariants(d) -> OrderInvariants:
    d = _check_disc(d)
    _, g = split_discriminant(d)
    real = d > 0
    return OrderInvariants(d, g, class_number(d), regulator(d), roots_of_unity(d),
                           2 if real else 0, 0 if real else 1, proper_class_number(d))


def orders_containing(poly: IntPolynomial):
    """Orders of K containing Z[α], with invariants, by increasing conductor."""
    if poly.degree != 2:
        raise UnsupportedDegree("order invariants are only computed for degree 2")
    if not is_irreducible(poly):
        raise InvalidInput(f"{poly} is reducible")
    delta = discriminant(poly)
    D, f = split_discriminant(delta)
    out = []
    for g in sympy.divisors(f):
        out.append((order_of_conductor(poly, g), invariants(g * g * D)))
    r1, _ = signature(poly)
    assert all(inv.r1 == r1 for _, inv in out)
    return out
