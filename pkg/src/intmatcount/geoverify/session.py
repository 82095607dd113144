"""Block-diagonal model X1 of V_P and the maps Ψ, δ, tilde-δ, Θ.

X1 = diag(d_1, ..., d_{r1+r2}) with real 1x1 blocks σ_i(α) and 2x2
rotation-scaling blocks [[a, -b], [b, a]] for the complex roots a + bi.
Coordinates (s, z): s ∈ R^{r2} scales the unipotent part inside each 2x2
block, z collects the strictly upper block entries (the space U).

Everything here works on batches: arrays carry a leading sample axis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConsistencyError, InvalidInput
from ..polyalg import IntPolynomial, discriminant, is_irreducible, roots


@dataclass
class GeometrySession:
    poly: IntPolynomial
    rootset: object
    X1: np.ndarray
    blocks: list  # [(start, size)]
    b: np.ndarray  # imaginary parts of the complex representatives
    upper: list  # [(i, j)] block pairs with i < j, in (j - i, i) order
    z_slices: dict  # (i, j) -> slice into the z vector
    S_inv: dict  # (i, j) -> inverse of S_ij acting on row-major vec
    S_mat: dict

    @property
    def n(self):
        return self.poly.degree

    @property
    def r1(self):
        return self.rootset.signature[0]

    @property
    def r2(self):
        return self.rootset.signature[1]

    @property
    def m(self):
        return self.n * (self.n - 1) // 2

    @property
    def dim_u(self):
        return self.m - self.r2

    def block(self, i):
        s, k = self.blocks[i]
        return self.X1[s:s + k, s:s + k]


def _s_matrix(di, dj):
    """Matrix of x -> x dj - di x on row-major vec(x), x of shape (ki, kj)."""
    ki, kj = di.shape[0], dj.shape[0]
    # row-major vec: vec(A x B) = (A ⊗ B^T) vec(x)
    return np.kron(np.eye(ki), dj.T) - np.kron(di, np.eye(kj))


def build_session(P: IntPolynomial, eps=1e-12) -> GeometrySession:
    if not is_irreducible(P):
        raise InvalidInput(f"{P} is reducible")
    rs = roots(P, eps)
    r1, r2 = rs.signature
    vals = rs.values
    n = P.degree
    X1 = np.zeros((n, n))
    blocks = []
    pos = 0
    for i in range(r1):
        X1[pos, pos] = vals[i].real
        blocks.append((pos, 1))
        pos += 1
    b = []
    for i in range(r2):
        z = vals[r1 + i]
        X1[pos:pos + 2, pos:pos + 2] = [[z.real, -z.imag], [z.imag, z.real]]
        blocks.append((pos, 2))
        b.append(z.imag)
        pos += 2
    nb = len(blocks)
    upper = [(i, i + k) for k in range(1, nb) for i in range(nb - k)]
    z_slices = {}
    off = 0
    S_mat, S_inv = {}, {}
    for (i, j) in sorted(upper):
        size = blocks[i][1] * blocks[j][1]
        z_slices[(i, j)] = slice(off, off + size)
        off += size
        di = X1[blocks[i][0]:blocks[i][0] + blocks[i][1], blocks[i][0]:blocks[i][0] + blocks[i][1]]
        dj = X1[blocks[j][0]:blocks[j][0] + blocks[j][1], blocks[j][0]:blocks[j][0] + blocks[j][1]]
        S = _s_matrix(di, dj)
        S_mat[(i, j)] = S
        S_inv[(i, j)] = np.linalg.inv(S)
    sess = GeometrySession(P, rs, X1, blocks, np.array(b), upper, z_slices, S_inv, S_mat)
    assert off == sess.dim_u
    # X1 reproduces P
    cp = np.poly(X1)
    if not np.allclose(cp, P.coeffs, rtol=1e-9, atol=1e-9 * max(1, max(abs(c) for c in P.coeffs))):
        raise ConsistencyError("block-diagonal model does not reproduce P")
    return sess


# -- group elements --------------------------------------------------------------

def h_matrix(sess, sqrt_t):
    """Batch of h(t^{1/2}): identity with sqrt_t in the (0,1) slot of each 2x2 block."""
    N = sqrt_t.shape[0]
    n = sess.n
    H = np.broadcast_to(np.eye(n), (N, n, n)).copy()
    for k in range(sess.r2):
        s, _ = sess.blocks[sess.r1 + k]
        H[:, s, s + 1] = sqrt_t[:, k]
    return H


def u_matrix(sess, x):
    N = x.shape[0]
    n = sess.n
    U = np.broadcast_to(np.eye(n), (N, n, n)).copy()
    for (i, j), sl in sess.z_slices.items():
        si, ki = sess.blocks[i]
        sj, kj = sess.blocks[j]
        U[:, si:si + ki, sj:sj + kj] = x[:, sl].reshape(N, ki, kj)
    return U


def unit_upper_inverse(U):
    """Inverse of a batch of unit upper triangular matrices by back-substitution."""
    N, n, _ = U.shape
    V = np.broadcast_to(np.eye(n), (N, n, n)).copy()
    for i in reversed(range(n)):
        for j in range(i + 1, n):
            # row i of V: V[i] = e_i - Σ_{k>i} U[i,k] V[k]
            V[:, i, :] -= U[:, i, j, None] * V[:, j, :]
    return V


def conjugate_X1(sess, sqrt_t, x):
    """Ψ X1 Ψ^{-1} with Ψ = h(t^{1/2}) u(x)."""
    H = h_matrix(sess, sqrt_t)
    Hinv = h_matrix(sess, -sqrt_t)
    U = u_matrix(sess, x)
    Uinv = unit_upper_inverse(U)
    return H @ U @ sess.X1 @ Uinv @ Hinv


def conj_norm(sess, t, x):
    return np.linalg.norm(conjugate_X1(sess, np.sqrt(t), x), axis=(1, 2))


# -- δ maps --------------------------------------------------------------------

def _h_block(sess, i, sqrt_t, sign):
    """Per-sample 2x2 (or 1x1) h factor for block i."""
    N = sqrt_t.shape[0]
    k = sess.blocks[i][1]
    M = np.broadcast_to(np.eye(k), (N, k, k)).copy()
    if k == 2:
        M[:, 0, 1] = sign * sqrt_t[:, i - sess.r1]
    return M


def solve_x(sess, sqrt_t, z):
    """Recursion x_ij = S_ij^{-1}(h(-√t_i) z_ij h(√t_j) - Q_ij), by increasing j - i."""
    N = z.shape[0]
    x = np.zeros((N, sess.dim_u))
    nb = len(sess.blocks)
    for k in range(1, nb):
        W = conjugate_X1(sess, np.zeros((N, sess.r2)), x)  # u X1 u^{-1}; diagonal k still zero in x
        for i in range(nb - k):
            j = i + k
            si, ki = sess.blocks[i]
            sj, kj = sess.blocks[j]
            sl = sess.z_slices[(i, j)]
            zij = z[:, sl].reshape(N, ki, kj)
            target = _h_block(sess, i, sqrt_t, -1) @ zij @ _h_block(sess, j, sqrt_t, +1)
            Q = W[:, si:si + ki, sj:sj + kj]
            rhs = (target - Q).reshape(N, ki * kj)
            x[:, sl] = rhs @ sess.S_inv[(i, j)].T
    return x


def delta(sess, s, z):
    """Polynomial-like map δ(s, z) = (t', x') with t' = s / |b|."""
    s = np.atleast_2d(s)
    z = np.atleast_2d(z)
    t = s / np.abs(sess.b) if sess.r2 else s
    x = solve_x(sess, np.sqrt(np.maximum(t, 0)), z)
    return t, x


def delta_tilde(sess, s, z):
    """Exact map onto D^1 coordinates: t = sqrt(s^2/b^2 + 4) - 2."""
    s = np.atleast_2d(s)
    z = np.atleast_2d(z)
    t = np.sqrt(s ** 2 / sess.b ** 2 + 4) - 2 if sess.r2 else s
    x = solve_x(sess, np.sqrt(t), z)
    return t, x


def delta_tilde_inverse(sess, t, x):
    """(t, x) -> (s, z) with s_i = sqrt(b_i^2 (t_i^2 + 4 t_i)) and z = upper blocks of Ψ X1 Ψ^{-1}."""
    t = np.atleast_2d(t)
    x = np.atleast_2d(x)
    N = x.shape[0]
    s = np.sqrt(sess.b ** 2 * (t ** 2 + 4 * t)) if sess.r2 else t
    C = conjugate_X1(sess, np.sqrt(t), x)
    z = np.zeros((N, sess.dim_u))
    for (i, j), sl in sess.z_slices.items():
        si, ki = sess.blocks[i]
        sj, kj = sess.blocks[j]
        z[:, sl] = C[:, si:si + ki, sj:sj + kj].reshape(N, ki * kj)
    return s, z


def delta_inverse(sess, t, x):
    """Inverse of δ: s = |b| t and z from the conjugated upper blocks."""
    t = np.atleast_2d(t)
    _, z = delta_tilde_inverse(sess, t, x)
    s = np.abs(sess.b) * t if sess.r2 else t
    return s, z


def theta(sess, s, z):
    """Θ(s, z) = Ψ(δ(s^2, z)); uses √t' = s / √|b| so that Θ is polynomial on all of R^m."""
    s = np.atleast_2d(s)
    z = np.atleast_2d(z)
    sqrt_t = s / np.sqrt(np.abs(sess.b)) if sess.r2 else s
    x = solve_x(sess, sqrt_t, z)
    return h_matrix(sess, sqrt_t) @ u_matrix(sess, x)


def split_coords(sess, v):
    """Split stacked coordinates (..., m) into (s, z)."""
    v = np.atleast_2d(v)
    return v[:, :sess.r2], v[:, sess.r2:]


def s_ij_det(sess, i, j, tol=1e-9):
    """|det S_ij| from the dense map and from root differences; they must agree."""
    if not i < j:
        raise InvalidInput("need i < j")
    dense = abs(np.linalg.det(sess.S_mat[(i, j)]))
    vals = sess.rootset.values
    r1, r2 = sess.r1, sess.r2

    def hat(k):
        return [k] if k < r1 else [k, k + r2]

    prod = 1.0
    for a in hat(i):
        for c in hat(j):
            prod *= abs(vals[c] - vals[a])
    if abs(dense - prod) > tol * max(1.0, prod):
        raise ConsistencyError(f"det S_{i}{j}: dense {dense} vs roots {prod}")
    return dense


def jacobian_closed_form(sess):
    return 2 ** sess.r2 / abs(discriminant(sess.poly)) ** 0.5
