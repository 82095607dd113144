"""Haar integrals on SL_2(R) in Iwasawa (KNA), Cartan (KAK) and KNK coordinates.

k(θ) is rotation by 2πθ, h(t) = [[1, t], [0, 1]], a(λ) = diag(λ, 1/λ).
Identities checked:
    KNA            = (π/2) KAK   with KAK weight |α^2 - α^-2| dα/α
    KNK (dt^2)     = KAK
    KNA            = (π/2) KNK
Integrals are computed by scrambled Sobol QMC over truncated boxes after
logarithmic substitutions; the stderr comes from independent scramblings.
"""
from __future__ import annotations

from math import pi

import numpy as np

from ..errors import InvalidInput
from .checks import REPLICATES, _report, _sobol_replicates

LOG_RANGE = 2.75  # |log λ| cut-off; the integrands carry exp(-λ^2 - λ^-2)
T_RANGE = 8.0


def _sq_norm(g):
    return (g ** 2).sum(axis=(1, 2))


CATALOGUE = {
    "gauss": lambda g: np.exp(-_sq_norm(g)),
    "gauss_g11sq": lambda g: np.exp(-_sq_norm(g)) * g[:, 0, 0] ** 2,
    "gauss_poly": lambda g: np.exp(-_sq_norm(g)) * (1 + g[:, 0, 1] - 2 * g[:, 1, 0] + g[:, 0, 0] * g[:, 1, 1]) ** 2,
}


def rot(theta):
    c, s = np.cos(2 * pi * theta), np.sin(2 * pi * theta)
    R = np.empty(theta.shape + (2, 2))
    R[..., 0, 0], R[..., 0, 1], R[..., 1, 0], R[..., 1, 1] = c, -s, s, c
    return R


def hmat(t):
    H = np.zeros(t.shape + (2, 2))
    H[..., 0, 0] = H[..., 1, 1] = 1
    H[..., 0, 1] = t
    return H


def amat(lam):
    A = np.zeros(lam.shape + (2, 2))
    A[..., 0, 0] = lam
    A[..., 1, 1] = 1 / lam
    return A


def _f(spec):
    if spec not in CATALOGUE:
        raise InvalidInput(f"unknown test function {spec!r}; choose from {sorted(CATALOGUE)}")
    return CATALOGUE[spec]


def kna_integral(f, u):
    """∫ f(k(θ) h(t) a(λ)) dθ dt dλ/λ with λ = e^w, t = λ τ."""
    th = u[:, 0]
    w = (2 * u[:, 1] - 1) * LOG_RANGE
    tau = (2 * u[:, 2] - 1) * T_RANGE
    lam = np.exp(w)
    g = rot(th) @ hmat(lam * tau) @ amat(lam)
    vol = (2 * LOG_RANGE) * (2 * T_RANGE)
    return vol * float(np.mean(f(g) * lam))


def kak_integral(f, u, weighted=True):
    """∫ f(k(θ2) a(α) k(θ)) |α^2 - α^-2| dθ2 dα/α dθ, split at α = 1."""
    half = len(u) // 2
    total = 0.0
    for part, sign in ((u[:half], -1.0), (u[half:], 1.0)):
        th2, th = part[:, 0], part[:, 2]
        v = sign * part[:, 1] * LOG_RANGE
        al = np.exp(v)
        g = rot(th2) @ amat(al) @ rot(th)
        wt = np.abs(al ** 2 - al ** -2) if weighted else 1.0
        total += LOG_RANGE * float(np.mean(f(g) * wt))
    return total


def knk_integral(f, u):
    """∫ f(k(φ') h(t) k(φ)) dφ' d(t^2) dφ over t > 0."""
    ph2, ph = u[:, 0], u[:, 2]
    t = u[:, 1] * T_RANGE
    g = rot(ph2) @ hmat(t) @ rot(ph)
    return T_RANGE * float(np.mean(f(g) * 2 * t))


IDENTITIES = {
    "iwasawa-cartan": (kna_integral, lambda f, u: (pi / 2) * kak_integral(f, u)),
    "knk-cartan": (knk_integral, kak_integral),
    "iwasawa-knk": (kna_integral, lambda f, u: (pi / 2) * knk_integral(f, u)),
}


def haar_identity_check(identity, f_spec="gauss", samples=1_000_000, seed=0, tol=1e-3,
                        drop_density=False):
    """Both sides of a decomposition identity; ``drop_density`` removes the
    |α^2 - α^-2| factor on the Cartan side (a deliberately wrong control)."""
    if identity not in IDENTITIES:
        raise InvalidInput(f"unknown identity {identity!r}; choose from {sorted(IDENTITIES)}")
    f = _f(f_spec)
    lhs_fn, rhs_fn = IDENTITIES[identity]
    if drop_density:
        if "cartan" not in identity:
            raise InvalidInput("the density control applies to identities with a Cartan side")
        rhs_fn = (lambda f, u: (pi / 2) * kak_integral(f, u, weighted=False)) if identity == "iwasawa-cartan" \
            else (lambda f, u: kak_integral(f, u, weighted=False))
    L, R = [], []
    for u in _sobol_replicates(3, samples // REPLICATES, seed):
        L.append(lhs_fn(f, u))
        R.append(rhs_fn(f, u))
    L, R = np.array(L), np.array(R)
    lhs, rhs = float(L.mean()), float(R.mean())
    stderr = float(np.sqrt(L.var(ddof=1) + R.var(ddof=1)) / np.sqrt(len(L)))
    rep = _report("haar", {"identity": identity, "f": f_spec, "samples": samples, "seed": seed,
                           "drop_density": drop_density}, lhs, rhs, False, stderr=stderr)
    rep.passed = rep.rel_err < tol
    return rep
