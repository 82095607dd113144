"""Full-rank Z-lattices in K = Q(α), stored as canonical column HNF bases.

Columns of ``basis`` are power-basis coordinates of a Z-basis. Because the
HNF is canonical, two lattices are equal exactly when their bases are.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, ceil, isqrt

import numpy as np

from . import _linalg as la
from .errors import InvalidInput, NotFullRank
from .numfield import FieldElement, regular_representation
from .polyalg import IntPolynomial, roots

DEFAULT_SEARCH_BOUND = 50


@dataclass(frozen=True)
class LatticeHNF:
    basis: tuple
    poly: IntPolynomial = field(compare=True)

    @property
    def n(self):
        return self.poly.degree

    @property
    def denominator(self):
        return la.common_denominator(self.basis)

    @property
    def matrix(self):
        return [list(r) for r in self.basis]

    def gens(self):
        n = self.n
        return [FieldElement(tuple(self.basis[i][j] for i in range(n)), self.poly) for j in range(n)]

    def det(self):
        return abs(Fraction(la.det(self.matrix)))

    def coords_of(self, x: FieldElement):
        """Coordinates of x in this lattice's basis (rational)."""
        # the HNF basis is upper triangular: back-substitute
        b = self.basis
        n = len(b)
        y = [Fraction(0)] * n
        for i in reversed(range(n)):
            s = x.coords[i] - sum(b[i][j] * y[j] for j in range(i + 1, n))
            y[i] = s / b[i][i]
        return y

    def contains(self, x: FieldElement):
        return all(c.denominator == 1 for c in self.coords_of(x))

    def contains_lattice(self, other):
        return all(self.contains(g) for g in other.gens())

    def scale(self, lam: FieldElement):
        if not lam:
            raise InvalidInput("cannot scale by zero")
        return hnf_from_generators([lam * g for g in self.gens()])

    def key(self):
        """Sort key: flattened basis entries."""
        return tuple(x for row in self.basis for x in row)

    def __str__(self):
        return "<" + ", ".join(str(g) for g in self.gens()) + ">"


def from_matrix(m, poly):
    """Lattice spanned by the columns of a rational matrix."""
    h = la.hnf_rational([[Fraction(x) for x in row] for row in m])
    return LatticeHNF(tuple(tuple(r) for r in h), poly)


def hnf_from_generators(gens) -> LatticeHNF:
    if not gens:
        raise NotFullRank("no generators")
    poly = gens[0].poly
    if any(g.poly != poly for g in gens):
        raise InvalidInput("generators from different fields")
    m = la.transpose([list(g.coords) for g in gens])
    return from_matrix(m, poly)


def equation_order(poly: IntPolynomial) -> LatticeHNF:
    """Z[α]."""
    n = poly.degree
    return LatticeHNF(tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)), poly)


def colon(N: LatticeHNF, M: LatticeHNF) -> LatticeHNF:
    """(N : M) = {x in K : x M ⊆ N}.

    x M ⊆ N is the system B_N^{-1} R(m_j) c ∈ Z^n over the generators m_j,
    so the answer is the dual of the Z-span of the rows of that system.
    """
    n = N.n
    binv = la.inverse(N.matrix)
    rows = []
    for m in M.gens():
        rows.extend(la.mat_mul(binv, regular_representation(m)))
    # row span W of the stacked functionals, then the dual lattice W^{-T}
    w = la.hnf_rational(la.transpose(rows))
    dual = la.inverse(la.transpose(w))
    return from_matrix(dual, N.poly)


def multiplicator_ring(M: LatticeHNF) -> LatticeHNF:
    """O(M) = {β : βM ⊆ M}."""
    ring = colon(M, M)
    one = FieldElement.rational(1, M.poly)
    gens = ring.gens()
    assert ring.contains(one)
    assert all(ring.contains(a * b) for a in gens for b in gens)
    return ring


def lattice_index(M: LatticeHNF, N: LatticeHNF) -> Fraction:
    """Generalized index [M : N] = |det B_N| / |det B_M|."""
    return N.det() / M.det()


def is_order(M: LatticeHNF) -> bool:
    return multiplicator_ring(M) == M


def order_discriminant(O: LatticeHNF):
    """det(Tr(e_i e_j)) over a Z-basis of O."""
    from .numfield import trace

    g = O.gens()
    return la.det([[trace(a * b) for b in g] for a in g])


# -- equivalence ---------------------------------------------------------------

@dataclass(frozen=True)
class EquivalenceResult:
    status: str  # "yes" | "no" | "inconclusive"
    witness: FieldElement | None = None

    def __bool__(self):
        return self.status == "yes"


def _witness_ok(lam, M, N):
    return M.scale(lam) == N


def _norm_form(C: LatticeHNF):
    """Exact binary form z -> N(z1 c1 + z2 c2) as (a, b, c) with rationals."""
    from .numfield import norm

    c1, c2 = C.gens()
    a = norm(c1)
    c = norm(c2)
    b = norm(c1 + c2) - a - c
    return a, b, c


def _rational_sqrt(q: Fraction):
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def _solve_z1(a, b, c, z2, target):
    """Integers z1 with a z1^2 + b z1 z2 + c z2^2 = target."""
    if a == 0:
        lin = b * z2
        rest = target - c * z2 * z2
        if lin == 0:
            return []
        z1 = rest / lin
        return [int(z1)] if z1.denominator == 1 else []
    disc = (b * z2) ** 2 - 4 * a * (c * z2 * z2 - target)
    r = _rational_sqrt(disc)
    if r is None:
        return []
    out = set()
    for s in (r, -r):
        z1 = (-b * z2 + s) / (2 * a)
        if z1.denominator == 1:
            out.add(int(z1))
    return sorted(out)


def _equiv_quadratic(M, N):
    C = colon(N, M)
    q = lattice_index(M, N)
    a, b, c = _norm_form(C)
    c1, c2 = C.gens()
    dform = b * b - 4 * a * c
    if dform < 0:
        # definite: N(λ) = q > 0, bound |z2| from a z1^2 + b z1 z2 + c z2^2 >= (4ac-b^2) z2^2 / (4a)
        bound = floor((4 * a * q / (-dform)) ** 0.5) + 1
        for z2 in range(-bound, bound + 1):
            for z1 in _solve_z1(a, b, c, z2, q):
                lam = z1 * c1 + z2 * c2
                if lam and _witness_ok(lam, M, N):
                    return EquivalenceResult("yes", lam)
        return EquivalenceResult("no")
    return _equiv_real_quadratic(M, N, C, q)


def _embed_real(x: FieldElement, rs):
    return [float(sum(float(c) * r ** k for k, c in enumerate(x.coords))) for r in rs]


def _equiv_real_quadratic(M, N, C, q):
    """Search λ ∈ (N:M) with |N(λ)| = q and √q ≤ |σ(λ)| < √q·ε.

    Every solution can be moved into that window by ±ε^k. The window is cut
    into dyadic slices; in each slice the hyperbola fits in a box which is
    rescaled to a square and LLL-reduced before enumerating. Candidates are
    tested with the exact norm form, since in floating point the small
    conjugate is lost to cancellation once ε is large.
    """
    from .quadorder import fundamental_unit_of_order

    O = multiplicator_ring(M)
    eps = fundamental_unit_of_order(O)
    rs = [z.real for z in roots(M.poly).values]
    e = _embed_real(eps, rs)
    e_big = max(abs(e[0]), abs(e[1]))
    gens = C.gens()
    fa, fb, fc = _norm_form(C)
    E = np.array([_embed_real(g, rs) for g in gens]).T  # rows: embeddings
    sq = float(q) ** 0.5
    L = sq * (1 - 1e-9)
    while L < sq * e_big * (1 + 1e-9):
        # slice L <= |s1| <= 2L forces |s2| <= q/L
        scale = np.array([1.0 / (2 * L), L / float(q)])
        Es = E * scale[:, None]
        u = la.lll_float(Es.T)
        Er = Es @ np.array(u, dtype=float).T
        zb = np.abs(np.linalg.inv(Er)).sum(axis=1)
        r0, r1 = int(ceil(zb[0])) + 1, int(ceil(zb[1])) + 1
        for z1 in range(-r0, r0 + 1):
            for z2 in range(-r1, r1 + 1):
                c0 = u[0][0] * z1 + u[1][0] * z2
                c1 = u[0][1] * z1 + u[1][1] * z2
                if abs(fa * c0 * c0 + fb * c0 * c1 + fc * c1 * c1) != q:
                    continue
                lam = c0 * gens[0] + c1 * gens[1]
                if _witness_ok(lam, M, N):
                    return EquivalenceResult("yes", lam)
        L *= 2
    return EquivalenceResult("no")


def _equiv_bounded(M, N, bound):
    """Shell search for λ ∈ (N:M) with |N(λ)| = [M:N]; never answers "no"."""
    from .numfield import norm

    n = M.n
    C = colon(N, M)
    q = lattice_index(M, N)
    rs = roots(M.poly).values
    gens = C.gens()
    emb = np.array([[sum(complex(float(x)) * r ** k for k, x in enumerate(g.coords)) for r in rs] for g in gens])
    real = np.concatenate([emb.real, emb.imag], axis=1)
    u = la.lll_float(real)
    red = [sum((u[i][j] * gens[j] for j in range(n)), FieldElement.rational(0, M.poly)) for i in range(n)]
    remb = np.array(u, dtype=float) @ emb
    qf = float(q)
    radius = 1
    seen = 0
    while True:
        r = min(radius, bound)
        axes = [np.arange(-r, r + 1)] * n
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, n)
        if seen:
            grid = grid[np.abs(grid).max(axis=1) > seen]
        vals = grid.astype(complex) @ remb
        nrm = np.abs(np.prod(vals, axis=1))
        hits = np.nonzero(np.abs(nrm - qf) <= 1e-6 * qf)[0]
        for h in hits:
            lam = sum((int(grid[h][i]) * red[i] for i in range(n)), FieldElement.rational(0, M.poly))
            if lam and abs(norm(lam)) == q and _witness_ok(lam, M, N):
                return EquivalenceResult("yes", lam)
        seen = r
        if r >= bound:
            return EquivalenceResult("inconclusive")
        radius *= 2


def equivalent(M: LatticeHNF, N: LatticeHNF, mode="quadratic-exact", bound=DEFAULT_SEARCH_BOUND):
    """Is N = λM for some λ ∈ K*?"""
    if M.poly != N.poly:
        raise InvalidInput("lattices in different fields")
    if mode == "quadratic-exact" and M.n != 2:
        raise InvalidInput("quadratic-exact mode needs degree 2")
    if mode not in ("quadratic-exact", "bounded-search"):
        raise InvalidInput(f"unknown mode {mode!r}")
    if M == N:
        return EquivalenceResult("yes", FieldElement.rational(1, M.poly))
    if multiplicator_ring(M) != multiplicator_ring(N):
        return EquivalenceResult("no")
    if mode == "quadratic-exact":
        return _equiv_quadratic(M, N)
    return _equiv_bounded(M, N, bound)


# -- sublattice enumeration ----------------------------------------------------

def hnf_matrices(n, k):
    """All n x n upper-triangular column HNF integer matrices of determinant k."""
    def diags(n, k):
        if n == 1:
            yield (k,)
            return
        for d in range(1, k + 1):
            if k % d == 0:
                for rest in diags(n - 1, k // d):
                    yield (d,) + rest

    def fill(diag, i, j, m):
        # entries above diagonal reduced modulo the diagonal of their row
        if j == len(diag):
            yield [r[:] for r in m]
            return
        if i == j:
            yield from fill(diag, 0, j + 1, m)
            return
        for v in range(diag[i]):
            m[i][j] = v
            yield from fill(diag, i + 1, j, m)
        m[i][j] = 0

    for diag in diags(n, k):
        m = [[0] * n for _ in range(n)]
        for i in range(n):
            m[i][i] = diag[i]
        yield from fill(diag, 0, 1, m)


def sublattices(L: LatticeHNF, k: int):
    """All sublattices of L of index k."""
    b = L.matrix
    for h in hnf_matrices(L.n, k):
        yield from_matrix(la.mat_mul(b, h), L.poly)


def ideals_of_index(O: LatticeHNF, k: int, exact_ring=True):
    """Sublattices of the order O of index k that are O-modules.

    With ``exact_ring`` only those whose multiplicator ring is exactly O.
    """
    og = O.gens()
    for S in sublattices(O, k):
        if all(S.contains(a * s) for a in og for s in S.gens()):
            if not exact_ring or multiplicator_ring(S) == O:
                yield S
