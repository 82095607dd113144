"""Acceptance criteria 1-9, one test each.

Each test records a single PASS/FAIL line, shown in the pytest terminal
summary; ``python tests/test_acceptance.py`` prints the same lines.
"""
import math
import time
from math import isqrt

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from intmatcount.constants import predict_CP, vol_ball, vol_minkowski, zeta
from intmatcount.counter import companion, count_in_ball, norm_cap
from intmatcount.geoverify import build_session, haar_identity_check, jacobian_check, mc_c_eta, minkowski2_quadrature
from intmatcount.geoverify.haar import CATALOGUE, IDENTITIES
from intmatcount.lmd import InvariantCache, conductor_of, find_conjugator, orbit_decompose, orbit_invariant, same_orbit
from intmatcount.polyalg import IntPolynomial, is_irreducible
from intmatcount.quadorder import class_number, class_number_bruteforce

SWEEP = (1000, 10_000, 20_000)


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[n] = line
    print(line)
    assert ok, line


def sweep(P):
    return [count_in_ball(P, T).count / T for T in SWEEP]


def test_criterion_1_gaussian_counting():
    P = IntPolynomial((1, 0, 1))
    start = time.perf_counter()
    cp = predict_CP(P).C_P
    ratios = sweep(P)
    elapsed = time.perf_counter() - start
    errs = [abs(r - cp) / cp for r in ratios]
    # the error term oscillates at order sqrt(T), so the sweep is not monotone:
    # every ratio must sit in the band and the last within 5%
    ok = abs(cp - 3) < 1e-12 and max(errs) < 0.05 and elapsed < 120
    record(1, ok, f"C_P={cp:.12f} count/T={['%.5f' % r for r in ratios]} rel_err={errs[-1]:.2e} "
                  f"time={elapsed:.1f}s")


def test_criterion_2_real_quadratic_counting():
    P = IntPolynomial((1, -1, -1))
    cp = predict_CP(P).C_P
    ratios = sweep(P)
    err = abs(ratios[-1] - cp) / cp
    record(2, abs(cp - 1.644041) < 1e-6 and err < 0.07,
           f"C_P={cp:.6f} count/T={['%.5f' % r for r in ratios]} rel_err={err:.2e}")


def _pairwise_consistent(P, matrices, cache):
    """Bounded search (B = 8) must never join two matrices with different invariants."""
    inv = {X: orbit_invariant(X, P, cache) for X in matrices}
    bad = 0
    for i, X in enumerate(matrices):
        for Y in matrices[i + 1:]:
            st = same_orbit(X, Y, P, 8, cache).status
            if (st == "yes") != (inv[X] == inv[Y]) and st != "inconclusive":
                bad += 1
    return bad


def test_criterion_3_latimer_macduffee():
    details, ok = [], True
    for coeffs, conductors in (((1, 0, 5), ["1", "1"]), ((1, 0, 3), ["1", "2"])):
        P = IntPolynomial(coeffs)
        cache = InvariantCache()
        census = count_in_ball(P, 20, collect=True)
        oc = orbit_decompose(census.matrices, P, cache)
        conds = sorted(str(conductor_of(i.order)) for i, _ in oc.groups)
        bad = _pairwise_consistent(P, census.matrices, cache)
        good = (oc.num_orbits == 2 == oc.expected_total() and not oc.unresolved and conds == conductors
                and sum(oc.sizes()) == census.count and bad == 0)
        ok &= good
        details.append(f"{P}: {census.count} matrices, orbits {oc.sizes()} conductors {conds}, "
                       f"contradictions {bad}")
    record(3, ok, "; ".join(details))


def test_criterion_4_discriminant_choice():
    P = IntPolynomial((1, 0, 3))
    rep = predict_CP(P)
    ratio = count_in_ball(P, SWEEP[-1]).count / SWEEP[-1]
    cand = {"poly": rep.C_P_disc_poly, "field": rep.C_P_disc_field}
    chosen = min(cand, key=lambda k: abs(cand[k] - ratio))
    err = abs(ratio - cand[chosen]) / cand[chosen]
    ok = abs(rep.C_P_disc_poly - 8 / math.sqrt(3)) < 1e-9 and chosen == "poly" and err < 0.10
    record(4, ok, f"count/T={ratio:.5f} poly={cand['poly']:.5f} field={cand['field']:.5f} "
                  f"selected={chosen} rel_err={err:.2e}")


def test_criterion_5_haar_identities():
    worst, lines = 0.0, []
    for identity in sorted(IDENTITIES):
        for f in sorted(CATALOGUE):
            rep = haar_identity_check(identity, f, samples=1_000_000, seed=0)
            worst = max(worst, rep.rel_err)
    ctrl = haar_identity_check("iwasawa-cartan", "gauss", samples=1_000_000, drop_density=True)
    record(5, worst < 1e-3 and ctrl.rel_err > 0.05,
           f"max rel_err over 9 checks={worst:.2e}, density-dropped control rel_err={ctrl.rel_err:.3f}")


def test_criterion_6_jacobian():
    parts, ok = [], True
    for coeffs in ((1, 0, 1), (1, 0, -2), (1, 0, -1, -1)):
        rep = jacobian_check(build_session(IntPolynomial(coeffs)), points=10, h=1e-5)
        ok &= rep.extra["spread"] < 1e-6 and rep.rel_err < 1e-6
        parts.append(f"{coeffs}: {rep.lhs:.9f} vs {rep.rhs:.9f} spread={rep.extra['spread']:.1e}")
    record(6, ok, "; ".join(parts))


def test_criterion_7_volume_constants():
    pi = math.pi
    balls = [2, pi, 4 * pi / 3, pi ** 2 / 2, 8 * pi ** 2 / 15, pi ** 3 / 6]
    ok = abs(vol_minkowski(2) - pi / 6) < 1e-12 and abs(zeta(2) - pi ** 2 / 6) < 1e-12
    ok &= all(abs(vol_ball(m) - v) < 1e-12 for m, v in enumerate(balls, 1))
    quad = minkowski2_quadrature(2000)
    ok &= abs(quad.lhs - pi / 6) < 1e-3
    mc = []
    for coeffs in ((1, 0, 1), (1, -1, -1), (1, 0, -1, -1)):
        rep = mc_c_eta(IntPolynomial(coeffs))
        ok &= rep.passed
        mc.append(f"{rep.lhs:.5f}±{rep.extra['stderr']:.1e} vs {rep.rhs:.5f}")
    record(7, ok, f"quadrature={quad.lhs:.7f}; c_eta MC: " + ", ".join(mc))


def naive_cubic_count(P, T):
    """Scan all 3x3 integer matrices with the right trace in the cube [-T, T]^8."""
    c = P.coeffs
    cap = norm_cap(T)
    r = isqrt(cap)
    v = np.arange(-r, r + 1)
    tail = np.stack(np.meshgrid(v, v, v, v, indexing="ij"), -1).reshape(-1, 4)
    x21, x22, x23, x31 = tail.T
    total = 0
    for x11 in v:
        for x12 in v:
            for x13 in v:
                for x32 in v:
                    x33 = -c[1] - x11 - x22
                    sq = x11 ** 2 + x12 ** 2 + x13 ** 2 + x21 ** 2 + x22 ** 2 + x23 ** 2 + x31 ** 2 + x32 ** 2 + x33 ** 2
                    minors = (x11 * x22 - x12 * x21) + (x11 * x33 - x13 * x31) + (x22 * x33 - x23 * x32)
                    det = (x11 * (x22 * x33 - x23 * x32) - x12 * (x21 * x33 - x23 * x31)
                           + x13 * (x21 * x32 - x22 * x31))
                    total += int(((sq <= cap) & (minors == c[2]) & (-det == c[3])).sum())
    return total


def test_criterion_8_cubic_smoke():
    P = IntPolynomial((1, 0, -1, -1))
    radii = (8, 10, 12, 15)
    censuses = {T: count_in_ball(P, T, collect=(T == 15)) for T in radii}
    counts = [censuses[T].count for T in radii]
    cache = InvariantCache()
    mats = censuses[15].matrices
    invs = {orbit_invariant(X, P, cache) for X in mats}
    single = len(invs) == 1 and all(i.resolved for i in invs)
    # conjugators to the companion matrix for a deterministic sample at T = 8
    C = companion(P)
    small = [X for X in mats if sum(v * v for r in X for v in r) <= 64]
    sample = small[:: max(1, len(small) // 40)]
    found = sum(find_conjugator(C, X, 8) is not None for X in sample)
    slope = float(np.polyfit(np.log(radii), np.log(counts), 1)[0])
    naive = naive_cubic_count(P, 4)
    pruned = count_in_ball(P, 4).count
    ok = single and 2.5 <= slope <= 3.5 and naive == pruned
    record(8, ok, f"counts={counts} distinct invariants={len(invs)} "
                  f"conjugators found {found}/{len(sample)} (B=8) slope={slope:.3f} "
                  f"naive T=4 {naive} vs pruned {pruned}")


def test_criterion_9_oracles():
    discs = [d for d in list(range(-100, -2)) + list(range(5, 101))
             if d % 4 in (0, 1) and not (d > 0 and isqrt(d) ** 2 == d)]
    mismatches = [d for d in discs if class_number(d) != class_number_bruteforce(d)]
    # naive 2x2 scan shared across polynomials
    r = 12
    v = np.arange(-r, r + 1)
    a, b, c, d = (x.ravel() for x in np.meshgrid(v, v, v, v, indexing="ij"))
    sq = a * a + b * b + c * c + d * d
    keep = sq <= 144
    a, b, c, d, sq = a[keep], b[keep], c[keep], d[keep], sq[keep]
    tr, det = a + d, a * d - b * c
    radii = [1, 1.5, 2, 2.5, 3, 4, 5, 6, 7, 7.5, 8, 9, 10, 11, 12]
    polys = [IntPolynomial((1, p, q)) for p in range(-5, 6) for q in range(-5, 6)
             if is_irreducible(IntPolynomial((1, p, q)))]
    bad_counts = 0
    for P in polys:
        on = (tr == -P.coeffs[1]) & (det == P.coeffs[2])
        for T in radii:
            if count_in_ball(P, T).count != int((on & (sq <= norm_cap(T))).sum()):
                bad_counts += 1
    record(9, not mismatches and bad_counts == 0,
           f"class numbers: {len(discs)} discriminants, mismatches {mismatches}; "
           f"counting: {len(polys)} polynomials x {len(radii)} radii, mismatches {bad_counts}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
