"""Exact arithmetic on monic integer polynomials.

Coefficients are stored leading-first: ``x^2 - x - 1`` is ``(1, -1, -1)``.
Real-root counting uses Sturm chains in exact rationals; complex roots are
found numerically and then certified (see :func:`roots`).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb, isqrt

import mpmath
import numpy as np

from .errors import InvalidInput, NotSquarefree, PrecisionError

DEFAULT_EPS = 1e-12
MAX_PRECISION_ROUNDS = 4


@dataclass(frozen=True)
class IntPolynomial:
    coeffs: tuple

    def __post_init__(self):
        c = tuple(int(x) for x in self.coeffs)
        object.__setattr__(self, "coeffs", c)
        if len(c) < 3:
            raise InvalidInput("degree must be at least 2")
        if c[0] != 1:
            raise InvalidInput("polynomial must be monic")

    @classmethod
    def parse(cls, text):
        """Parse ``"1,0,1"`` (leading coefficient first)."""
        try:
            return cls(tuple(int(t) for t in str(text).split(",")))
        except ValueError as exc:
            raise InvalidInput(f"cannot parse polynomial {text!r}") from exc

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def low_first(self):
        """Coefficients c_0, c_1, ..., c_n (constant term first)."""
        return self.coeffs[::-1]

    def __call__(self, x):
        acc = 0
        for c in self.coeffs:
            acc = acc * x + c
        return acc

    def __str__(self):
        n = self.degree
        terms = []
        for k, c in enumerate(self.coeffs):
            e = n - k
            if c == 0:
                continue
            mono = "" if e == 0 else ("λ" if e == 1 else f"λ^{e}")
            mag = abs(c)
            body = f"{mag}{mono}" if (mag != 1 or e == 0) else mono
            terms.append(("-" if c < 0 else "+", body))
        s = "".join(f" {sgn} {b}" for sgn, b in terms).strip()
        return s[2:] if s.startswith("+ ") else s


# -- dense polynomial helpers (low-degree-first lists) ----------------------

def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _deg(p):
    p = _trim(p)
    return -1 if p == [0] else len(p) - 1


def _derivative(p):
    return _trim([k * p[k] for k in range(1, len(p))] or [0])


def _divmod(a, b):
    """Polynomial division over Q; returns (quotient, remainder)."""
    a = [Fraction(x) for x in _trim(a)]
    b = [Fraction(x) for x in _trim(b)]
    db = len(b) - 1
    q = [Fraction(0)] * max(len(a) - db, 1)
    while _deg(a) >= db and any(a):
        shift = len(a) - 1 - db
        f = a[-1] / b[-1]
        q[shift] = f
        for i, x in enumerate(b):
            a[i + shift] -= f * x
        a = _trim(a[:-1] if a[-1] == 0 else a)
        if len(a) - 1 < db:
            break
    return _trim(q), _trim(a)


def _prem(a, b):
    """Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b over Z."""
    a = _trim(a)
    b = _trim(b)
    db = len(b) - 1
    lb = b[-1]
    e = len(a) - 1 - db + 1
    while len(a) - 1 >= db and any(a):
        shift = len(a) - 1 - db
        la = a[-1]
        a = [x * lb for x in a]
        for i, x in enumerate(b):
            a[i + shift] -= la * x
        a = _trim(a[:-1])
        e -= 1
    return [x * lb ** e for x in a]


def resultant(a, b):
    """Resultant of two integer polynomials (low-first lists), subresultant PRS."""
    a = _trim(a)
    b = _trim(b)
    if not any(a) or not any(b):
        return 0
    da, db = len(a) - 1, len(b) - 1
    s = 1
    if da < db:
        a, b = b, a
        da, db = db, da
        if da % 2 and db % 2:
            s = -1
    if db == 0:
        return s * b[0] ** da
    g = h = 1
    while True:
        da, db = len(a) - 1, len(b) - 1
        delta = da - db
        if da % 2 and db % 2:
            s = -s
        r = _prem(a, b)
        a = b
        div = g * h ** delta
        b = [x // div for x in r]
        if not any(b):
            return 0
        g = a[-1]
        h = g ** delta // h ** (delta - 1) if delta >= 1 else h
        if len(b) == 1:
            da = len(a) - 1
            return s * b[0] ** da // h ** (da - 1) if da >= 1 else s * b[0]


def discriminant(p: IntPolynomial) -> int:
    """disc(P) = (-1)^{n(n-1)/2} Res(P, P') for monic P."""
    lf = list(p.low_first)
    n = p.degree
    return (-1) ** (n * (n - 1) // 2) * resultant(lf, _derivative(lf))


# -- Sturm chains ------------------------------------------------------------

def sturm_chain(p: IntPolynomial):
    lf = [Fraction(x) for x in p.low_first]
    chain = [lf, [Fraction(x) for x in _derivative(lf)]]
    while _deg(chain[-1]) > 0:
        _, r = _divmod(chain[-2], chain[-1])
        if not any(r):
            break
        chain.append([-x for x in r])
    return chain


def _sign_changes(signs):
    s = [x for x in signs if x != 0]
    return sum(1 for u, v in zip(s, s[1:]) if (u > 0) != (v > 0))


def real_root_count(p: IntPolynomial) -> int:
    chain = sturm_chain(p)
    at_pos = [q[-1] for q in chain]
    at_neg = [q[-1] * (-1) ** (len(q) - 1) for q in chain]
    return _sign_changes(at_neg) - _sign_changes(at_pos)


def signature(p: IntPolynomial):
    """(r1, r2): real roots and conjugate pairs."""
    if discriminant(p) == 0:
        raise NotSquarefree(f"{p} has a repeated root")
    r1 = real_root_count(p)
    return r1, (p.degree - r1) // 2


# -- irreducibility ----------------------------------------------------------

def _divisors(n):
    n = abs(n)
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _exact_monic_quotient(a, b):
    """a / b for integer polys with b monic, or None if b does not divide a."""
    q, r = _divmod(a, b)
    if any(r):
        return None
    return q


def is_irreducible(p: IntPolynomial) -> bool:
    """Irreducibility over Q by bounded exhaustive search for monic factors.

    Degree-1 factors come from the rational root test; higher degrees up to
    n/2 are enumerated with coefficients inside the Mignotte bound and the
    constant term restricted to divisors of P(0).
    """
    n = p.degree
    lf = list(p.low_first)
    c0 = lf[0]
    if c0 == 0:
        return False
    for d in _divisors(c0):
        if p(d) == 0 or p(-d) == 0:
            return False
    norm2 = sum(c * c for c in lf) ** 0.5
    for d in range(2, n // 2 + 1):
        bounds = [int(comb(d, j) * norm2) for j in range(1, d)]
        consts = [s * x for x in _divisors(c0) for s in (1, -1)]
        for c in consts:
            for mids in product(*[range(-b, b + 1) for b in bounds]):
                f = [c, *mids, 1]
                if _exact_monic_quotient(lf, f) is not None:
                    return False
    return True


# -- certified roots ---------------------------------------------------------

@dataclass(frozen=True)
class RootInterval:
    """Disc centred at ``mid`` of radius ``radius`` holding exactly one root."""
    mid: complex
    radius: float

    @property
    def is_real(self):
        return self.mid.imag == 0


@dataclass(frozen=True)
class RootSet:
    roots: tuple
    signature: tuple
    precision_bits: int

    @property
    def values(self):
        return np.array([r.mid for r in self.roots], dtype=complex)

    def __len__(self):
        return len(self.roots)


def _newton_polish(coeffs, z, iters=60):
    for _ in range(iters):
        v = mpmath.polyval(coeffs, z)
        dv = mpmath.polyval(_mp_derivative(coeffs), z)
        if dv == 0:
            break
        step = v / dv
        z -= step
        if abs(step) < mpmath.mpf(2) ** (-mpmath.mp.prec + 4) * max(1, abs(z)):
            break
    return z


def _mp_derivative(coeffs):
    n = len(coeffs) - 1
    return [c * (n - i) for i, c in enumerate(coeffs[:-1])]


def roots(p: IntPolynomial, eps: float = DEFAULT_EPS) -> RootSet:
    """Certified isolating discs for all roots of ``p``.

    Order: real roots ascending, then one representative (positive imaginary
    part) per conjugate pair sorted by real then imaginary part, then the
    conjugates of those representatives in the same order.
    """
    if eps <= 0:
        raise InvalidInput("eps must be positive")
    r1, r2 = signature(p)
    n = p.degree
    approx = np.roots(np.array(p.coeffs, dtype=float))
    dps = 30
    for _ in range(MAX_PRECISION_ROUNDS + 1):
        with mpmath.workdps(dps):
            coeffs = [mpmath.mpf(c) for c in p.coeffs]
            dcoeffs = _mp_derivative(coeffs)
            order = np.argsort(np.abs(approx.imag))
            real_idx, cplx_idx = order[:r1], order[r1:]
            reals = sorted(_newton_polish(coeffs, mpmath.mpf(float(approx[i].real))) for i in real_idx)
            reps = []
            for i in cplx_idx:
                if approx[i].imag > 0:
                    reps.append(_newton_polish(coeffs, mpmath.mpc(complex(approx[i]))))
            reps.sort(key=lambda z: (float(z.real), float(z.imag)))
            pts = [mpmath.mpc(x) for x in reals] + reps + [mpmath.conj(z) for z in reps]
            if len(pts) != n:
                dps *= 2
                continue
            radii = []
            for z in pts:
                v = abs(mpmath.polyval(coeffs, z))
                dv = abs(mpmath.polyval(dcoeffs, z))
                # some root lies within n|P/P'| of z
                bound = n * v / dv if dv else mpmath.inf
                # widen by the rounding of the midpoint to double
                radii.append(float(bound + abs(mpmath.mpc(complex(z)) - z)))
            mids = [complex(z) for z in pts]
            ok = all(r <= eps for r in radii)
            for i in range(n):
                for j in range(i + 1, n):
                    if abs(pts[i] - pts[j]) <= radii[i] + radii[j]:
                        ok = False
            if ok and all(z.imag > radii[k] for k, z in enumerate(pts[r1:r1 + r2], start=r1)):
                ivs = tuple(RootInterval(complex(m.real, 0.0) if k < r1 else m, max(r, 0.0))
                            for k, (m, r) in enumerate(zip(mids, radii)))
                return RootSet(ivs, (r1, r2), mpmath.mp.prec)
        dps *= 2
    raise PrecisionError(f"could not certify roots of {p} to {eps}")
