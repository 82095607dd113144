"""Numerical checks of the geometry behind c_η and Vol(SM_2)."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from math import pi, sqrt

import numpy as np
from scipy.stats import qmc

from ..constants import c_eta as c_eta_closed, vol_ball
from ..errors import InvalidInput
from .session import (GeometrySession, build_session, conj_norm, delta, delta_inverse,
                      delta_tilde, delta_tilde_inverse, jacobian_closed_form, theta)

REPLICATES = 16


@dataclass
class VerificationReport:
    check: str
    params: dict
    lhs: float
    rhs: float
    abs_err: float
    rel_err: float
    passed: bool
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def _report(check, params, lhs, rhs, passed, **extra):
    abs_err = abs(lhs - rhs)
    rel = abs_err / abs(rhs) if rhs else abs_err
    return VerificationReport(check, params, float(lhs), float(rhs), float(abs_err), float(rel),
                              bool(passed), extra)


def _flat(sess, s, z):
    return np.concatenate([s, z], axis=1)


def _delta_flat(sess, v):
    t, x = delta(sess, v[:, :sess.r2], v[:, sess.r2:])
    return np.concatenate([t, x], axis=1)


def fd_jacobians(sess, points, h=1e-5):
    """Central-difference Jacobian determinants of δ with one Richardson step."""
    m = sess.m
    dets = []
    for p in points:
        def jac(step):
            J = np.zeros((m, m))
            for k in range(m):
                e = np.zeros(m)
                e[k] = step
                fp = _delta_flat(sess, (p + e)[None])[0]
                fm = _delta_flat(sess, (p - e)[None])[0]
                J[:, k] = (fp - fm) / (2 * step)
            return J
        J = (4 * jac(h / 2) - jac(h)) / 3
        dets.append(abs(np.linalg.det(J)))
    return np.array(dets)


def _random_points(sess, count, rng, scale=3.0):
    s = rng.uniform(1.0, 1.0 + scale, size=(count, sess.r2))
    z = rng.normal(scale=scale, size=(count, sess.dim_u))
    return _flat(sess, s, z)


def jacobian_check(sess: GeometrySession, points=10, h=1e-5, seed=0, tol=1e-6):
    rng = np.random.default_rng(seed)
    pts = _random_points(sess, points, rng)
    dets = fd_jacobians(sess, pts, h)
    closed = jacobian_closed_form(sess)
    mean = float(dets.mean())
    spread = float((dets.max() - dets.min()) / mean)
    rep = _report("jacobian", {"poly": list(sess.poly.coeffs), "points": points, "h": h, "seed": seed},
                  mean, closed, False, spread=spread)
    rep.passed = spread < tol and rep.rel_err < tol
    if not rep.passed:
        worst = int(np.argmax(np.abs(dets - closed)))
        rep.extra["worst_point"] = pts[worst].tolist()
    return rep


def _sample_positive_ball(sess, R, count, rng):
    """Uniform points of B^+_R: the s-coordinates are nonnegative."""
    m = sess.m
    g = rng.normal(size=(count, m))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    g[:, :sess.r2] = np.abs(g[:, :sess.r2])
    r = R * rng.uniform(size=(count, 1)) ** (1.0 / m)
    return g * r


def inner_radius(sess, T, rule="corrected"):
    """Radius whose δ-image lies inside D^1_T.

    The shift between δ and tilde-δ moves each s_i by at most 2|b_i|, so the
    safe radius is T - 2 max(1, |b|) - |X1|^2 / T; the "unit" rule uses 2.
    """
    x1 = float(np.linalg.norm(sess.X1) ** 2)
    bn = float(np.linalg.norm(sess.b)) if sess.r2 else 0.0
    if rule == "corrected":
        return T - 2 * max(1.0, bn) - x1 / T
    if rule == "unit":
        return T - 2 - x1 / T
    raise InvalidInput(f"unknown radius rule {rule!r}")


def sandwich_check(sess: GeometrySession, T, samples=100_000, seed=0, rule="corrected"):
    x1n = float(np.linalg.norm(sess.X1))
    if T <= x1n + 2:
        raise InvalidInput(f"need T > |X1| + 2 = {x1n + 2:.6g}")
    rng = np.random.default_rng(seed)
    R_in = inner_radius(sess, T, rule)
    inner_viol = 0
    outer_viol = 0
    witness = None
    for start in range(0, samples, 20_000):
        k = min(20_000, samples - start)
        v = _sample_positive_ball(sess, R_in, k, rng)
        t, x = delta(sess, v[:, :sess.r2], v[:, sess.r2:])
        bad = conj_norm(sess, t, x) >= T
        inner_viol += int(bad.sum())
        if witness is None and bad.any():
            witness = {"side": "inner", "point": v[np.argmax(bad)].tolist()}
        # D^1_T points via tilde-δ, then pull back through δ
        w = _sample_positive_ball(sess, sqrt(T * T - x1n ** 2), k, rng)
        t, x = delta_tilde(sess, w[:, :sess.r2], w[:, sess.r2:])
        s, z = delta_inverse(sess, t, x)
        back = np.sqrt((s ** 2).sum(axis=1) + (z ** 2).sum(axis=1))
        bad = back >= T
        outer_viol += int(bad.sum())
        if witness is None and bad.any():
            witness = {"side": "outer", "point": w[np.argmax(bad)].tolist()}
    total = inner_viol + outer_viol
    rep = _report("sandwich", {"poly": list(sess.poly.coeffs), "T": T, "samples": samples,
                               "seed": seed, "rule": rule},
                  total, 0, total == 0, inner_violations=inner_viol,
                  outer_violations=outer_viol, inner_radius=R_in)
    if witness:
        rep.extra["witness"] = witness
    return rep


def _sobol_replicates(dim, per_rep, seed, reps=REPLICATES):
    m = max(1, int(round(np.log2(per_rep))))
    seqs = np.random.SeedSequence(seed).spawn(reps)
    for ss in seqs:
        sob = qmc.Sobol(d=dim, scramble=True, seed=np.random.default_rng(ss))
        yield sob.random_base2(m)


def mc_c_eta(P, T=1e8, samples=2 ** 20, seed=0, box=1.5, sess=None):
    """Monte Carlo estimate of c_η from the volume of δ^{-1}(D^1_T).

    ℓ(D^1_T) = Jac(δ) · vol{(s, z) : δ(s, z) ∈ D^1_T}; the Jacobian is the
    finite-difference value, not the closed form.
    """
    sess = sess or build_session(P)
    m, r2 = sess.m, sess.r2
    jac = float(fd_jacobians(sess, _random_points(sess, 3, np.random.default_rng(seed))).mean())
    lo = np.array([0.0] * r2 + [-box * T] * sess.dim_u)
    hi = np.array([box * T] * m)
    vol_box = float(np.prod(hi - lo))
    ests = []
    for u in _sobol_replicates(m, samples // REPLICATES, seed):
        v = lo + u * (hi - lo)
        inside = 0
        for chunk in np.array_split(v, max(1, len(v) // 50_000)):
            t, x = delta(sess, chunk[:, :r2], chunk[:, r2:])
            inside += int((conj_norm(sess, t, x) < T).sum())
        ell = jac * vol_box * inside / len(v)
        ests.append((2 * pi) ** r2 * 2.0 ** (-(sess.n - 1)) * ell / T ** m)
    ests = np.array(ests)
    est = float(ests.mean())
    stderr = float(ests.std(ddof=1) / np.sqrt(len(ests)))
    ref = c_eta_closed(sess.poly)
    rep = _report("ceta", {"poly": list(sess.poly.coeffs), "T": T, "samples": samples, "seed": seed},
                  est, ref, abs(est - ref) <= 3 * stderr, stderr=stderr, jacobian_fd=jac)
    return rep


def ball_volume_check(sess, T=10.0, samples=2 ** 20, seed=0):
    """ℓ(B^+_T) against 2^{-r2} Vol(B^m) T^m."""
    m, r2 = sess.m, sess.r2
    lo = np.array([0.0] * r2 + [-T] * sess.dim_u)
    hi = np.array([T] * m)
    vol_box = float(np.prod(hi - lo))
    ests = []
    for u in _sobol_replicates(m, samples // REPLICATES, seed):
        v = lo + u * (hi - lo)
        ests.append(vol_box * float((np.linalg.norm(v, axis=1) < T).mean()))
    ests = np.array(ests)
    est, stderr = float(ests.mean()), float(ests.std(ddof=1) / np.sqrt(len(ests)))
    ref = 2.0 ** (-r2) * vol_ball(m) * T ** m
    return _report("ball_volume", {"poly": list(sess.poly.coeffs), "T": T, "samples": samples},
                   est, ref, abs(est - ref) <= 3 * stderr + 1e-12 * ref, stderr=stderr)


def roundtrip_check(sess, samples=1000, seed=0, tol=1e-10):
    """(s, z) -> tilde-δ -> inverse reproduces the input."""
    rng = np.random.default_rng(seed)
    v = _random_points(sess, samples, rng)
    s, z = v[:, :sess.r2], v[:, sess.r2:]
    t, x = delta_tilde(sess, s, z)
    s2, z2 = delta_tilde_inverse(sess, t, x)
    err = float(np.abs(np.concatenate([s2 - s, z2 - z], axis=1)).max()) if sess.m else 0.0
    scale = float(np.abs(v).max())
    return _report("roundtrip", {"poly": list(sess.poly.coeffs), "samples": samples},
                   err / scale, 0.0, err / scale < tol)


def theta_polynomial_check(sess, degree=8, points=100, seed=0, tol=1e-8, radius=2.0):
    """Interpolate each entry of Θ on a tensor Chebyshev grid and test off-grid."""
    from numpy.polynomial import chebyshev as C

    m = sess.m
    nodes = np.cos(np.pi * (np.arange(degree + 1) + 0.5) / (degree + 1))
    grid = np.stack(np.meshgrid(*([nodes] * m), indexing="ij"), -1).reshape(-1, m)
    vals = theta(sess, radius * grid[:, :sess.r2], radius * grid[:, sess.r2:])
    n = sess.n
    V = C.chebvander(nodes, degree)
    Vinv = np.linalg.inv(V)
    coef = vals.reshape((degree + 1,) * m + (n, n))
    for ax in range(m):
        coef = np.moveaxis(np.tensordot(Vinv, coef, axes=([1], [ax])), 0, ax)
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1, 1, size=(points, m))
    truth = theta(sess, radius * pts[:, :sess.r2], radius * pts[:, sess.r2:])
    worst = 0.0
    for p, tr in zip(pts, truth):
        c = coef
        for ax in range(m):
            c = np.tensordot(C.chebvander(np.array([p[ax]]), degree)[0], c, axes=([0], [0]))
        worst = max(worst, float(np.abs(c - tr).max()))
    scale = float(np.abs(vals).max())
    return _report("theta_polynomial", {"poly": list(sess.poly.coeffs), "degree": degree,
                                        "points": points},
                   worst / scale, 0.0, worst / scale < tol)


def theta_at_zero(sess):
    Z = theta(sess, np.zeros((1, sess.r2)), np.zeros((1, sess.dim_u)))[0]
    err = float(np.abs(Z - np.eye(sess.n)).max())
    return _report("theta_zero", {"poly": list(sess.poly.coeffs)}, err, 0.0, err == 0.0)


def minkowski2_integrand(u, v):
    """dW in the unit-square chart y11 = 2u/√3, y12 = v y11 / 2 (constant 1/√3 on the domain)."""
    inside = (4.0 * u * u / 3.0) * (1.0 - v * v / 4.0) <= 1.0
    return np.where(inside, 1.0 / sqrt(3.0), 0.0)


def minkowski2_quadrature(grid=2000, tol=None):
    """Midpoint rule for the dW-volume of reduced determinant-one binary forms."""
    c = (np.arange(grid) + 0.5) / grid
    total = 0.0
    for row in np.array_split(c, max(1, grid // 500)):
        U, Vv = np.meshgrid(row, c, indexing="ij")
        total += float(minkowski2_integrand(U, Vv).sum())
    value = total / grid ** 2
    ref = pi / 6
    if tol is None:
        tol = 1e-3 if grid >= 1000 else 1e-2
    return _report("minkowski2", {"grid": grid}, value, ref, abs(value - ref) < tol)
