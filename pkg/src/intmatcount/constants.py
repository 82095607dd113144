"""Closed-form constants and the assembled asymptotic constant C_P.

C_P = Σ_O κ(O) Vol(B^m) / Vol(SM_n), κ(O) = 2^r1 (2π)^r2 h R / (w √|D|),
summed over the orders O ⊇ Z[α]. The same total is also assembled as
Σ c_η ν_H h / μ(G/Γ) and the two routes are required to agree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, gamma, pi, sqrt

from .errors import ConsistencyError, InvalidInput, MissingInvariants
from .polyalg import IntPolynomial, discriminant, is_irreducible, signature

CONSISTENCY_TOL = 1e-9


def _borwein_d(n):
    d = []
    acc = Fraction(0)
    for i in range(n + 1):
        acc += Fraction(factorial(n + i - 1) * 4 ** i, factorial(n - i) * factorial(2 * i))
        d.append(n * acc)
    return d


_D = _borwein_d(40)


def zeta(s: int) -> float:
    """ζ(s) for integer s >= 2 from the accelerated alternating series."""
    if s < 2 or int(s) != s:
        raise InvalidInput("zeta is only provided for integers s >= 2")
    s = int(s)
    n = len(_D) - 1
    dn = _D[n]
    acc = Fraction(0)
    for k in range(n):
        acc += Fraction((-1) ** k) * (_D[k] - dn) / Fraction((k + 1) ** s)
    eta = -acc / dn
    return float(eta / (1 - Fraction(2) ** (1 - s)))


def vol_ball(m: int) -> float:
    """Volume of the unit ball in R^m."""
    if m < 1:
        raise InvalidInput("dimension must be positive")
    return pi ** (m / 2) / gamma(1 + m / 2)


def vol_minkowski(n: int) -> float:
    """Volume of the Minkowski domain of determinant-one reduced forms."""
    if n < 2:
        raise InvalidInput("n must be at least 2")
    v = 1.0
    for k in range(2, n + 1):
        v *= pi ** (-k / 2) * gamma(k / 2) * zeta(k)
    return v


def vol_G_mod_Gamma(n: int) -> float:
    return 2.0 ** (-(n - 1)) * vol_minkowski(n)


def nu_H(inv) -> float:
    return 2 ** inv.r1 * inv.R / inv.w


def kappa(inv, disc: int) -> float:
    return 2 ** inv.r1 * (2 * pi) ** inv.r2 * inv.h * inv.R / (inv.w * sqrt(abs(disc)))


def c_eta_value(n: int, r2: int, disc: int) -> float:
    m = n * (n - 1) // 2
    return (2 * pi) ** r2 * vol_ball(m) / (2 ** (n - 1) * sqrt(abs(disc)))


def c_eta(P: IntPolynomial, disc_choice="poly", disc_field=None) -> float:
    """Growth constant of the invariant volume of {g : g X0 g^-1 ∈ B_T}."""
    _, r2 = signature(P)
    if disc_choice == "poly":
        d = discriminant(P)
    elif disc_choice == "field":
        if disc_field is None:
            disc_field = _field_disc(P)
        d = disc_field
    else:
        raise InvalidInput(f"unknown disc choice {disc_choice!r}")
    return c_eta_value(P.degree, r2, d)


def _field_disc(P):
    if P.degree != 2:
        raise MissingInvariants("field discriminant must be supplied for degree >= 3")
    from .quadorder import split_discriminant

    return split_discriminant(discriminant(P))[0]


@dataclass
class OrderRow:
    inv: object
    nu_H: float
    kappa_poly: float
    kappa_field: float | None
    contribution_poly: float
    contribution_field: float | None

    def to_dict(self):
        d = dict(self.inv.to_dict())
        d.update(nu_H=self.nu_H, kappa=self.kappa_poly, contribution=self.contribution_poly,
                 kappa_field=self.kappa_field, contribution_field=self.contribution_field)
        return d


@dataclass
class PredictionReport:
    P: IntPolynomial
    disc_poly: int
    disc_field: int | None
    r1: int
    r2: int
    m: int
    vol_ball: float
    vol_mink: float
    vol_G_mod_Gamma: float
    c_eta_poly: float
    c_eta_field: float | None
    rows: list = field(default_factory=list)
    C_P_disc_poly: float = 0.0
    C_P_disc_field: float | None = None
    mode: str = "poly"

    @property
    def C_P(self):
        return self.C_P_disc_poly if self.mode == "poly" else self.C_P_disc_field

    @property
    def c_eta(self):
        return self.c_eta_poly if self.mode == "poly" else self.c_eta_field

    def to_dict(self):
        return {
            "poly": list(self.P.coeffs),
            "n": self.P.degree,
            "m": self.m,
            "r1": self.r1,
            "r2": self.r2,
            "disc_poly": self.disc_poly,
            "disc_field": self.disc_field,
            "disc_choice": self.mode,
            "C_P": self.C_P,
            "C_P_disc_poly": self.C_P_disc_poly,
            "C_P_disc_field": self.C_P_disc_field,
            "c_eta": self.c_eta,
            "c_eta_poly": self.c_eta_poly,
            "c_eta_field": self.c_eta_field,
            "vol_ball": self.vol_ball,
            "vol_minkowski": self.vol_mink,
            "vol_G_mod_Gamma": self.vol_G_mod_Gamma,
            "orders": [r.to_dict() for r in self.rows],
        }


def _load_invariants(P, invariants):
    from .quadorder import OrderInvariants

    r1, r2 = signature(P)
    out = []
    for item in invariants:
        if isinstance(item, OrderInvariants):
            item = item.to_dict()
        try:
            out.append(OrderInvariants(int(item["disc"]), int(item["conductor"]), int(item["h"]),
                                       float(item["R"]), int(item["w"]), r1, r2))
        except KeyError as exc:
            raise MissingInvariants(f"invariant entry lacks {exc}") from exc
    return out


def predict_CP(P: IntPolynomial, invariants=None, disc_choice="poly") -> PredictionReport:
    """Assemble C_P; ``invariants`` is required for degree >= 3.

    ``invariants`` is a list of OrderInvariants or dicts with keys
    disc, conductor, h, R, w. Signature data always comes from P.
    """
    if disc_choice not in ("poly", "field"):
        raise InvalidInput(f"unknown disc choice {disc_choice!r}")
    if not is_irreducible(P):
        raise InvalidInput(f"{P} is reducible")
    n = P.degree
    r1, r2 = signature(P)
    m = n * (n - 1) // 2
    dpoly = discriminant(P)
    if invariants is None:
        if n != 2:
            raise MissingInvariants("order invariants must be supplied for degree >= 3")
        from .quadorder import orders_containing

        invs = [inv for _, inv in orders_containing(P)]
    else:
        invs = _load_invariants(P, invariants)
    if not invs:
        raise MissingInvariants("empty invariant list")
    maximal = [i for i in invs if i.conductor == 1]
    dfield = maximal[0].disc_order if maximal else None
    vb, vm, vg = vol_ball(m), vol_minkowski(n), vol_G_mod_Gamma(n)
    rows = []
    for inv in invs:
        kp = kappa(inv, dpoly)
        kf = kappa(inv, dfield) if dfield is not None else None
        rows.append(OrderRow(inv, nu_H(inv), kp, kf, kp * vb / vm,
                             kf * vb / vm if kf is not None else None))
    total_poly = sum(r.contribution_poly for r in rows)
    total_field = sum(r.contribution_field for r in rows) if dfield is not None else None
    ce_poly = c_eta_value(n, r2, dpoly)
    ce_field = c_eta_value(n, r2, dfield) if dfield is not None else None
    # second route: c_eta nu_H h / mu(G/Gamma)
    alt = sum(ce_poly * r.nu_H * r.inv.h for r in rows) / vg
    if abs(alt - total_poly) > CONSISTENCY_TOL * max(1.0, abs(total_poly)):
        raise ConsistencyError(f"kappa route {total_poly} != c_eta route {alt}")
    if total_field is not None:
        alt_f = sum(ce_field * r.nu_H * r.inv.h for r in rows) / vg
        if abs(alt_f - total_field) > CONSISTENCY_TOL * max(1.0, abs(total_field)):
            raise ConsistencyError(f"kappa route {total_field} != c_eta route {alt_f}")
    return PredictionReport(P, dpoly, dfield, r1, r2, m, vb, vm, vg, ce_poly, ce_field, rows,
                            total_poly, total_field, disc_choice)
