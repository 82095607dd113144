"""Small exact linear algebra over Z and Q.

Matrices are lists of rows. Entries are ``int`` or ``fractions.Fraction``;
nothing here touches floating point except :func:`lll_float`.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

import numpy as np

from .errors import InvalidInput, NotFullRank


def identity(n, one=1):
    return [[one if i == j else 0 * one for j in range(n)] for i in range(n)]


def transpose(a):
    return [list(r) for r in zip(*a)]


def mat_mul(a, b):
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def det(a):
    """Determinant by fraction-free Bareiss elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(r) for r in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0 * prev
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num // prev if isinstance(num, int) and isinstance(prev, int) else num / prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def inverse(a):
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            raise InvalidInput("singular matrix")
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        m[c] = [x / piv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def solve(a, b):
    """Solve a x = b exactly (a square and nonsingular)."""
    return mat_vec(inverse(a), b)


def common_denominator(rows):
    d = 1
    for row in rows:
        for x in row:
            if isinstance(x, Fraction):
                d = lcm(d, x.denominator)
    return d


def hnf_columns(m):
    """Hermite normal form of the column span of an integer matrix.

    ``m`` has ``n`` rows and any number of columns spanning a rank-``n``
    lattice. Returns the ``n x n`` upper triangular basis with positive
    diagonal and ``0 <= h[i][j] < h[i][i]`` for ``j > i``.
    """
    n = len(m)
    cols = [list(c) for c in zip(*m)]
    cols = [c for c in cols if any(c)]
    pivots = [None] * n
    for i in reversed(range(n)):
        active = [c for c in cols if c[i] != 0]
        rest = [c for c in cols if c[i] == 0]
        while len(active) > 1:
            active.sort(key=lambda c: abs(c[i]))
            p = active[0]
            nxt = [p]
            for c in active[1:]:
                q = c[i] // p[i]
                c = [x - q * y for x, y in zip(c, p)]
                if c[i] != 0:
                    nxt.append(c)
                elif any(c):
                    rest.append(c)
            active = nxt
        if not active:
            raise NotFullRank("generators do not span a full-rank lattice")
        p = active[0]
        if p[i] < 0:
            p = [-x for x in p]
        pivots[i] = p
        cols = rest
    if any(any(c) for c in cols):
        raise NotFullRank("generators do not span a full-rank lattice")
    for j in range(n):
        for i in reversed(range(j)):
            q = pivots[j][i] // pivots[i][i]
            if q:
                pivots[j] = [x - q * y for x, y in zip(pivots[j], pivots[i])]
    return transpose(pivots)


def hnf_rational(m):
    """Column HNF of a rational matrix (canonical for the lattice it spans)."""
    d = common_denominator(m)
    ints = [[int(x * d) for x in row] for row in m]
    h = hnf_columns(ints)
    return [[Fraction(x, d) for x in row] for row in h]


def integer_kernel(a):
    """Basis of {x in Z^N : a x = 0} for an integer matrix ``a`` (r x N)."""
    r = len(a)
    ncols = len(a[0])
    cols = [[a[i][j] for i in range(r)] + [int(k == j) for k in range(ncols)] for j in range(ncols)]
    done = []
    for i in range(r):
        active = [c for c in cols if c[i] != 0]
        rest = [c for c in cols if c[i] == 0]
        while len(active) > 1:
            active.sort(key=lambda c: abs(c[i]))
            p = active[0]
            nxt = [p]
            for c in active[1:]:
                q = c[i] // p[i]
                c = [x - q * y for x, y in zip(c, p)]
                (nxt if c[i] != 0 else rest).append(c)
            active = nxt
        done.extend(active)
        cols = rest
    return [c[r:] for c in cols]


def _gram_schmidt(b):
    n = len(b)
    bstar = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    norms = []
    for i in range(n):
        v = [Fraction(x) for x in b[i]]
        for j in range(i):
            mu[i][j] = sum(Fraction(x) * y for x, y in zip(b[i], bstar[j])) / norms[j]
            v = [x - mu[i][j] * y for x, y in zip(v, bstar[j])]
        bstar.append(v)
        norms.append(sum(x * x for x in v))
    return bstar, mu, norms


def lll(basis, delta=Fraction(3, 4)):
    """Exact LLL reduction of integer/rational row vectors."""
    b = [list(v) for v in basis]
    n = len(b)
    k = 1
    bstar, mu, norms = _gram_schmidt(b)
    while k < n:
        for j in reversed(range(k)):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                bstar, mu, norms = _gram_schmidt(b)
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            bstar, mu, norms = _gram_schmidt(b)
            k = max(k - 1, 1)
    return b


def lll_float(vectors, delta=0.99):
    """LLL on real row vectors; returns the integer transform ``u`` with
    ``u @ vectors`` reduced. Used only to shorten search boxes."""
    b = np.array(vectors, dtype=float)
    n = b.shape[0]
    u = [[int(i == j) for j in range(n)] for i in range(n)]

    def gso(b):
        bs = np.zeros_like(b)
        mu = np.zeros((n, n))
        for i in range(n):
            v = b[i].copy()
            for j in range(i):
                mu[i, j] = b[i] @ bs[j] / (bs[j] @ bs[j])
                v -= mu[i, j] * bs[j]
            bs[i] = v
        return bs, mu

    bs, mu = gso(b)
    k = 1
    guard = 0
    while k < n and guard < 10000:
        guard += 1
        for j in reversed(range(k)):
            q = int(round(mu[k, j]))
            if q:
                b[k] -= q * b[j]
                u[k] = [x - q * y for x, y in zip(u[k], u[j])]
                bs, mu = gso(b)
        if bs[k] @ bs[k] >= (delta - mu[k, k - 1] ** 2) * (bs[k - 1] @ bs[k - 1]):
            k += 1
        else:
            b[[k, k - 1]] = b[[k - 1, k]]
            u[k], u[k - 1] = u[k - 1], u[k]
            bs, mu = gso(b)
            k = max(k - 1, 1)
    return u


def vec_gcd(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    return g
