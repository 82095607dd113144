"""Counting integer matrices with characteristic polynomial P in a Frobenius ball.

All norm comparisons are done on squared norms in exact integers: the weak
rule keeps ||X||^2 <= floor(T^2), the strict rule ||X||^2 <= ceil(T^2) - 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, gamma, isqrt, pi

import numpy as np
import sympy

from .errors import BudgetExceeded, InvalidInput
from .lmd import char_poly
from .polyalg import IntPolynomial, is_irreducible

DEFAULT_BUDGET = 5e9


def power_sum_targets(P: IntPolynomial):
    """p_k = tr(X^k) for X with char poly P, k = 1..n, via Newton's identities."""
    n = P.degree
    # e_k = (-1)^k c_{n-k}, coefficients read leading-first
    e = [(-1) ** k * P.coeffs[k] for k in range(n + 1)]
    p = [0] * (n + 1)
    for k in range(1, n + 1):
        s = (-1) ** (k - 1) * k * e[k]
        for i in range(1, k):
            s += (-1) ** (i - 1) * e[i] * p[k - i]
        p[k] = s
    return tuple(p[1:])


def companion(P: IntPolynomial):
    n = P.degree
    low = P.low_first
    C = [[0] * n for _ in range(n)]
    for i in range(1, n):
        C[i][i - 1] = 1
    for i in range(n):
        C[i][n - 1] = -low[i]
    assert char_poly(C) == P
    return tuple(tuple(r) for r in C)


def _as_fraction(T):
    if isinstance(T, float):
        return Fraction(str(T))
    return Fraction(T)


def norm_cap(T, norm_rule="weak"):
    """Largest admissible squared Frobenius norm."""
    T = _as_fraction(T)
    if T <= 0:
        raise InvalidInput("radius must be positive")
    t2 = T * T
    if norm_rule == "weak":
        return floor(t2)
    if norm_rule == "strict":
        return ceil(t2) - 1
    raise InvalidInput(f"unknown norm rule {norm_rule!r}")


@dataclass
class BallCensus:
    poly: IntPolynomial
    T: Fraction
    norm_rule: str
    count: int
    boundary: int = 0  # matrices with ||X||^2 == T^2 exactly
    matrices: list | None = field(default=None, repr=False)

    @property
    def m(self):
        n = self.poly.degree
        return n * (n - 1) // 2

    @property
    def normalized(self):
        return self.count / float(self.T) ** self.m


def projected_nodes(P: IntPolynomial, T):
    n = P.degree
    T = float(T)
    if n == 2:
        return 2 * T * (1 + T ** 0.5)
    if n == 3:
        # (d1, d2) ellipse times the 4-dim ball of off-diagonal pairs
        return (pi * T * T / 3 ** 0.5) * (pi ** 2 / 2) * T ** 4 / 3
    dim = n * n - 1
    return pi ** (dim / 2) / gamma(dim / 2 + 1) * T ** dim


# -- n = 2 ---------------------------------------------------------------------

def _count_2x2(P, cap, want_matrices, cap_eq):
    p1 = -P.coeffs[1]
    c0 = P.coeffs[2]
    count = 0
    boundary = 0
    out = [] if want_matrices else None
    amax = isqrt(cap)
    for a in range(-amax, amax + 1):
        e = p1 - a
        rem = cap - a * a - e * e
        if rem < 0:
            continue
        k = a * e - c0  # b c = k
        if k == 0:
            r = isqrt(rem)
            count += 4 * r + 1
            if want_matrices:
                out.extend(((a, 0), (c, e)) for c in range(-r, r + 1))
                out.extend(((a, b), (0, e)) for b in range(-r, r + 1) if b)
            if cap_eq is not None:
                s = cap_eq - a * a - e * e
                if s >= 0:
                    r2 = isqrt(s)
                    boundary += 4 * (r2 * r2 == s and s > 0) + (s == 0)
            continue
        ak = abs(k)
        if 2 * ak > rem:  # b^2 + c^2 >= 2|bc|
            continue
        for d in sympy.divisors(ak):
            q = ak // d
            s = d * d + q * q
            if s > rem:
                if d > q:
                    break
                continue
            # b = ±d, c = k / b
            count += 2
            if want_matrices:
                out.append(((a, d), (k // d, e)))
                out.append(((a, -d), (-(k // d), e)))
            if cap_eq is not None and a * a + e * e + s == cap_eq:
                boundary += 2
    return count, boundary, out


# -- n = 3 ---------------------------------------------------------------------

def _ball_grid(dim, cap):
    """All integer vectors v in Z^dim with |v|^2 <= cap, with their squared norms."""
    r = isqrt(cap)
    pts = np.zeros((1, 0), dtype=np.int64)
    nrm = np.zeros(1, dtype=np.int64)
    for _ in range(dim):
        vals = np.arange(-r, r + 1, dtype=np.int64)
        new_n = (nrm[:, None] + vals[None, :] ** 2)
        keep = new_n <= cap
        idx, vi = np.nonzero(keep)
        pts = np.concatenate([pts[idx], vals[vi][:, None]], axis=1)
        nrm = new_n[idx, vi]
    return pts, nrm


def _count_3x3(P, cap, want_matrices, cap_eq):
    _, c2, c1, c0 = P.coeffs
    p1 = -c2
    count = 0
    boundary = 0
    out = [] if want_matrices else None
    r = isqrt(cap)
    grids = {}
    for d1 in range(-r, r + 1):
        for d2 in range(-r, r + 1):
            d3 = p1 - d1 - d2
            dn = d1 * d1 + d2 * d2 + d3 * d3
            if dn > cap:
                continue
            rem = cap - dn
            if rem not in grids:
                grids[rem] = _ball_grid(4, rem)
            g, gn = grids[rem]
            x12, x21, x13, x23 = (g[:, i] for i in range(4))
            # x13 x31 + x23 x32 = K  (sum of principal 2x2 minors)
            K = d1 * d2 + d1 * d3 + d2 * d3 - x12 * x21 - c1
            # a21 x31 + b22 x32 = R  (determinant)
            a21 = x12 * x23 - x13 * d2
            b22 = x13 * x21 - d1 * x23
            R = -c0 - d1 * d2 * d3 + x12 * x21 * d3
            det = x13 * b22 - x23 * a21
            left = rem - gn
            nz = det != 0
            # regular rows: Cramer's rule
            num31 = K * b22 - x23 * R
            num32 = x13 * R - a21 * K
            sel = nz & (num31 % np.where(nz, det, 1) == 0) & (num32 % np.where(nz, det, 1) == 0)
            idx = np.nonzero(sel)[0]
            x31 = num31[idx] // det[idx]
            x32 = num32[idx] // det[idx]
            tail = x31 * x31 + x32 * x32
            ok = tail <= left[idx]
            idx, x31, x32, tail = idx[ok], x31[ok], x32[ok], tail[ok]
            count += len(idx)
            if cap_eq is not None:
                boundary += int(np.sum(dn + gn[idx] + tail == cap_eq))
            if want_matrices:
                for j, a, b in zip(idx, x31, x32):
                    out.append(((d1, int(x12[j]), int(x13[j])), (int(x21[j]), d2, int(x23[j])), (int(a), int(b), d3)))
            # degenerate rows: solutions on a line (x13 = x23 = 0 forces a rational root)
            for j in np.nonzero(~nz & ((x13 != 0) | (x23 != 0)))[0]:
                sols = _line_solutions(int(x13[j]), int(x23[j]), int(a21[j]), int(b22[j]),
                                       int(K[j]), int(R[j]), int(left[j]))
                for a, b in sols:
                    count += 1
                    if cap_eq is not None and dn + int(gn[j]) + a * a + b * b == cap_eq:
                        boundary += 1
                    if want_matrices:
                        out.append(((d1, int(x12[j]), int(x13[j])), (int(x21[j]), d2, int(x23[j])), (a, b, d3)))
    return count, boundary, out


def _line_solutions(p, q, a, b, K, R, left):
    """Integer (x, y) with p x + q y = K, a x + b y = R (dependent rows), x^2 + y^2 <= left."""
    from math import gcd

    g = gcd(p, q)
    if K % g:
        return []
    # particular solution via extended gcd
    def egcd(u, v):
        if v == 0:
            return (u, 1, 0) if u >= 0 else (-u, -1, 0)
        d, s, t = egcd(v, u % v)
        return d, t, s - (u // v) * t

    _, s, t = egcd(p, q)
    x0, y0 = s * (K // g), t * (K // g)
    dx, dy = q // g, -p // g
    # x = x0 + k dx, y = y0 + k dy ; keep |.|^2 <= left
    nn = dx * dx + dy * dy
    center = -(x0 * dx + y0 * dy) / nn
    span = (left / nn) ** 0.5 + 2
    out = []
    for k in range(floor(center - span), ceil(center + span) + 1):
        x, y = x0 + k * dx, y0 + k * dy
        if x * x + y * y <= left and a * x + b * y == R:
            out.append((x, y))
    return out


# -- generic n -----------------------------------------------------------------

def _count_generic(P, cap, want_matrices, cap_eq):
    n = P.degree
    p1 = -P.coeffs[1]
    offs = [(i, j) for i in range(n) for j in range(n) if i != j]
    count = 0
    boundary = 0
    out = [] if want_matrices else None
    diag, dn = _ball_grid(n - 1, cap)
    for dv, dnn in zip(diag, dn):
        last = p1 - int(dv.sum())
        tot = int(dnn) + last * last
        if tot > cap:
            continue
        g, gn = _ball_grid(len(offs), cap - tot)
        for v, vn in zip(g, gn):
            X = [[0] * n for _ in range(n)]
            for i in range(n - 1):
                X[i][i] = int(dv[i])
            X[n - 1][n - 1] = last
            for (i, j), x in zip(offs, v):
                X[i][j] = int(x)
            if char_poly(X) == P:
                count += 1
                if cap_eq is not None and tot + int(vn) == cap_eq:
                    boundary += 1
                if want_matrices:
                    out.append(tuple(tuple(r) for r in X))
    return count, boundary, out


def count_in_ball(P: IntPolynomial, T, norm_rule="weak", collect=False, stream=None,
                  budget=DEFAULT_BUDGET, check_irreducible=True) -> BallCensus:
    """Exact census of V_P(Z) in the Frobenius ball of radius T.

    ``stream`` may be a writable text handle; matrices are written one per
    line, row-major, space separated, in sorted order.
    """
    if check_irreducible and not is_irreducible(P):
        raise InvalidInput(f"{P} is reducible")
    Tq = _as_fraction(T)
    cap = norm_cap(Tq, norm_rule)
    t2 = Tq * Tq
    cap_eq = int(t2) if t2.denominator == 1 else None
    nodes = projected_nodes(P, Tq)
    if nodes > budget:
        raise BudgetExceeded(nodes, budget)
    want = collect or stream is not None
    n = P.degree
    if n == 2:
        count, boundary, mats = _count_2x2(P, cap, want, cap_eq)
    elif n == 3:
        count, boundary, mats = _count_3x3(P, cap, want, cap_eq)
    else:
        count, boundary, mats = _count_generic(P, cap, want, cap_eq)
    if norm_rule == "strict":
        # strict caps never reach T^2, so nothing sits on the boundary
        boundary = 0
    if mats is not None:
        mats.sort()
        if stream is not None:
            write_stream(stream, mats)
    return BallCensus(P, Tq, norm_rule, count, boundary, mats if collect else None)


def write_stream(handle, matrices):
    for X in matrices:
        handle.write(" ".join(str(v) for row in X for v in row) + "\n")


def read_stream(handle, n):
    out = []
    for line in handle:
        vals = [int(v) for v in line.split()]
        if vals:
            out.append(tuple(tuple(vals[i * n:(i + 1) * n]) for i in range(n)))
    return out


def count_orbit_in_ball(X0, P: IntPolynomial, T, norm_rule="weak", cache=None, budget=DEFAULT_BUDGET):
    """Number of matrices in the ball lying in the GL_n(Z)-orbit of X0."""
    from .lmd import InvariantCache, orbit_invariant

    cache = cache or InvariantCache()
    target = orbit_invariant(X0, P, cache)
    census = count_in_ball(P, T, norm_rule, collect=True, budget=budget)
    return sum(1 for X in census.matrices if orbit_invariant(X, P, cache) == target)
