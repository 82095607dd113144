"""Integer matrices with characteristic polynomial P and their GL_n(Z)-orbits.

A matrix X is sent to the lattice spanned by the entries of an eigenvector
ω ∈ Z[α]^n (X ω = α ω). Conjugate matrices give equivalent lattices, and
the orbit is labelled by (multiplicator ring, canonical class representative).
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from . import _linalg as la
from .errors import ConsistencyError, InvalidInput
from .lattice import (LatticeHNF, equation_order, equivalent, from_matrix,
                      ideals_of_index, lattice_index, multiplicator_ring)
from .numfield import FieldElement
from .polyalg import IntPolynomial

MAX_CLASS_INDEX = 200


def as_matrix(X):
    return tuple(tuple(int(v) for v in row) for row in X)


def char_poly(X) -> IntPolynomial:
    """det(λI - X) by Faddeev-LeVerrier, exact over Z."""
    X = [list(r) for r in X]
    n = len(X)
    coeffs = [1]
    M = la.identity(n)
    for k in range(1, n + 1):
        AM = la.mat_mul(X, M)
        c = -sum(AM[i][i] for i in range(n)) // k
        coeffs.append(c)
        M = [[AM[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
    return IntPolynomial(tuple(coeffs))


def _check_in_vp(X, poly):
    if len(X) != poly.degree or any(len(r) != poly.degree for r in X):
        raise InvalidInput("matrix size does not match the polynomial degree")
    if char_poly(X) != poly:
        raise InvalidInput("characteristic polynomial differs from P")


def adjugate_columns(X):
    """adj(λI - X) = Σ_k λ^(n-1-k) M_k with M_0 = I, M_{k+1} = X M_k + c_{k+1} I.

    Returns the list [M_0, ..., M_{n-1}] of integer matrices.
    """
    X = [list(r) for r in X]
    n = len(X)
    coeffs = char_poly(X).coeffs
    Ms = [la.identity(n)]
    for k in range(1, n):
        XM = la.mat_mul(X, Ms[-1])
        Ms.append([[XM[i][j] + (coeffs[k] if i == j else 0) for j in range(n)] for i in range(n)])
    return Ms


def eigenvector(X):
    """Integer coordinates (power basis) of a nonzero column ω of adj(αI - X).

    Returns W with W[k][i] = coefficient of α^k in ω_i.
    """
    Ms = adjugate_columns(X)
    n = len(X)
    for j in range(n):
        W = [[Ms[n - 1 - k][i][j] for i in range(n)] for k in range(n)]
        if any(any(r) for r in W):
            return W
    raise ConsistencyError("adjugate of αI - X vanishes; P cannot be irreducible")


def eigen_ideal(X, poly: IntPolynomial) -> LatticeHNF:
    """I_X = Z ω_1 + ... + Z ω_n."""
    _check_in_vp(X, poly)
    I = from_matrix(eigenvector(X), poly)
    alpha = FieldElement.generator(poly)
    if not all(I.contains(alpha * g) for g in I.gens()):
        raise ConsistencyError("eigenvector lattice is not stable under α")
    return I


# -- orbit invariants ----------------------------------------------------------

@dataclass(frozen=True)
class OrbitInvariant:
    order: LatticeHNF
    class_id: LatticeHNF | None  # None when the class could not be resolved

    @property
    def resolved(self):
        return self.class_id is not None

    def sort_key(self):
        return (self.order.key(), () if self.class_id is None else self.class_id.key())


@dataclass
class _ClassTable:
    """Class representatives of one order, in (index, HNF) order."""
    order: LatticeHNF
    reps: list = field(default_factory=list)
    next_index: int = 1
    exhausted: bool = False

    def extend(self, mode, bound):
        """Scan the next index; return False once the cap is reached."""
        k = self.next_index
        if k > MAX_CLASS_INDEX:
            self.exhausted = True
            return False
        for S in sorted(ideals_of_index(self.order, k), key=LatticeHNF.key):
            if all(equivalent(r, S, mode, bound).status == "no" for r in self.reps):
                self.reps.append(S)
        self.next_index += 1
        return True


class InvariantCache:
    """Caches class tables per order and invariants per eigen-ideal."""

    def __init__(self, bound=50):
        self.tables = {}
        self.by_ideal = {}
        self.bound = bound

    def table(self, order):
        if order not in self.tables:
            self.tables[order] = _ClassTable(order)
        return self.tables[order]

    def classify(self, I: LatticeHNF) -> OrbitInvariant:
        if I in self.by_ideal:
            return self.by_ideal[I]
        order = multiplicator_ring(I)
        mode = "quadratic-exact" if I.n == 2 else "bounded-search"
        inv = None
        if mode == "quadratic-exact":
            tab = self.table(order)
            scanned = 0
            while inv is None:
                for r in tab.reps[scanned:]:
                    if equivalent(r, I, mode):
                        inv = OrbitInvariant(order, r)
                        break
                scanned = len(tab.reps)
                if inv is None and not tab.extend(mode, self.bound):
                    inv = OrbitInvariant(order, None)
        else:
            inv = self._classify_bounded(order, I)
        self.by_ideal[I] = inv
        return inv

    def _classify_bounded(self, order, I):
        # first candidate in (index, HNF) order that is provably equivalent;
        # an inconclusive earlier candidate leaves the class unresolved
        for k in range(1, 1 + min(MAX_CLASS_INDEX, int(lattice_index(order, I)) + 1)):
            for S in sorted(ideals_of_index(order, k), key=LatticeHNF.key):
                res = equivalent(S, I, "bounded-search", self.bound)
                if res.status == "yes":
                    return OrbitInvariant(order, S)
                if res.status == "inconclusive":
                    return OrbitInvariant(order, None)
        return OrbitInvariant(order, None)


_DEFAULT_CACHE = InvariantCache()


def orbit_invariant(X, poly: IntPolynomial, cache: InvariantCache | None = None) -> OrbitInvariant:
    cache = cache or _DEFAULT_CACHE
    return cache.classify(eigen_ideal(X, poly))


# -- conjugator search ---------------------------------------------------------

@dataclass(frozen=True)
class OrbitSearch:
    status: str  # "yes" | "no-by-invariant" | "inconclusive"
    gamma: tuple | None = None


def commutation_kernel(X, Y):
    """Integer basis (as n x n matrices) of {γ : γX = Yγ}."""
    n = len(X)
    rows = []
    # (γX - Yγ)_{ij} = Σ_k γ_ik X_kj - Y_ik γ_kj, unknown γ flattened row-major
    for i in range(n):
        for j in range(n):
            row = [0] * (n * n)
            for k in range(n):
                row[i * n + k] += X[k][j]
                row[k * n + j] -= Y[i][k]
            rows.append(row)
    basis = la.integer_kernel(rows)
    return [[b[i * n:(i + 1) * n] for i in range(n)] for b in basis]


def find_conjugator(X, Y, bound):
    """Search γ ∈ GL_n(Z) with entries in [-bound, bound] and γX = Yγ."""
    n = len(X)
    ker = commutation_kernel(X, Y)
    if not ker:
        return None
    vecs = np.array([[v for row in g for v in row] for g in ker], dtype=float)
    u = la.lll_float(vecs)
    red = np.array(u, dtype=np.int64) @ np.array([[v for row in g for v in row] for g in ker], dtype=np.int64)
    # entries bounded by B in sup norm => coefficients bounded via the pseudo-inverse
    pinv = np.linalg.pinv(red.astype(float).T)
    cb = np.ceil(np.abs(pinv).sum(axis=1) * bound + 1e-9).astype(int)
    axes = [np.arange(-c, c + 1) for c in cb]
    total = int(np.prod([len(a) for a in axes]))
    if total > 5_000_000:
        cb = np.minimum(cb, int(round(5_000_000 ** (1 / len(cb)) / 2)))
        axes = [np.arange(-c, c + 1) for c in cb]
    coeffs = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, len(axes))
    # prefer small conjugators
    coeffs = coeffs[np.argsort(np.abs(coeffs).sum(axis=1), kind="stable")]
    gam = coeffs @ red
    ok = np.abs(gam).max(axis=1) <= bound
    gam = gam[ok]
    dets = np.rint(np.linalg.det(gam.reshape(-1, n, n).astype(float))).astype(np.int64)
    for g in gam[np.abs(dets) == 1]:
        G = [[int(v) for v in g[i * n:(i + 1) * n]] for i in range(n)]
        if abs(la.det(G)) == 1 and la.mat_mul(G, [list(r) for r in X]) == la.mat_mul([list(r) for r in Y], G):
            return as_matrix(G)
    return None


def same_orbit(X, Y, poly: IntPolynomial, bound=8, cache=None) -> OrbitSearch:
    _check_in_vp(X, poly)
    _check_in_vp(Y, poly)
    g = find_conjugator(X, Y, bound)
    if g is not None:
        return OrbitSearch("yes", g)
    ix, iy = orbit_invariant(X, poly, cache), orbit_invariant(Y, poly, cache)
    if ix.resolved and iy.resolved and ix != iy:
        return OrbitSearch("no-by-invariant")
    return OrbitSearch("inconclusive")


# -- decomposition -------------------------------------------------------------

@dataclass
class OrbitCensus:
    poly: IntPolynomial
    groups: list  # [(OrbitInvariant, [matrix, ...])] sorted by invariant
    unresolved: list
    classes_per_order: dict  # order -> number of distinct classes seen

    @property
    def num_orbits(self):
        return len(self.groups)

    def sizes(self):
        return [len(ms) for _, ms in self.groups]

    def expected_total(self):
        """Σ h over orders containing Z[α] (degree 2 only)."""
        if self.poly.degree != 2:
            return None
        from .quadorder import orders_containing

        return sum(inv.h for _, inv in orders_containing(self.poly))


def orbit_decompose(matrices, poly: IntPolynomial, cache: InvariantCache | None = None) -> OrbitCensus:
    cache = cache or InvariantCache()
    buckets = defaultdict(list)
    unresolved = []
    for X in matrices:
        X = as_matrix(X)
        inv = orbit_invariant(X, poly, cache)
        if inv.resolved:
            buckets[inv].append(X)
        else:
            unresolved.append(X)
    groups = sorted(buckets.items(), key=lambda kv: kv[0].sort_key())
    per_order = defaultdict(int)
    for inv, _ in groups:
        per_order[inv.order] += 1
    return OrbitCensus(poly, groups, unresolved, dict(per_order))


def conductor_of(order: LatticeHNF):
    """[O : Z[α]] for an order containing Z[α]."""
    idx = lattice_index(order, equation_order(order.poly))
    return int(idx) if Fraction(idx).denominator == 1 else idx
