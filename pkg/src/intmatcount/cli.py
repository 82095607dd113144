"""Command-line front end: predict, count, orbits, verify."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from .constants import predict_CP
from .counter import DEFAULT_BUDGET, count_in_ball
from .errors import BudgetExceeded, InvalidInput, MissingInvariants
from .polyalg import IntPolynomial

EXIT_OK, EXIT_USAGE, EXIT_MISSING, EXIT_BUDGET, EXIT_VERIFY = 0, 1, 2, 3, 4
MAX_ORBIT_DEGREE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _radius(text):
    try:
        r = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad radius {text!r}") from exc
    if r <= 0:
        raise argparse.ArgumentTypeError("radius must be positive")
    return r


def _radius_list(text):
    return [_radius(t) for t in text.split(",") if t.strip()]


def _fmt_radius(T):
    return str(T.numerator) if T.denominator == 1 else str(float(T))


def _load_invariants(path):
    if path is None:
        return None
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise MissingInvariants(f"invariants file {path!r} not found") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"invariants file {path!r} is not valid JSON") from exc
    if not isinstance(data, list):
        raise InvalidInput("invariants file must hold a JSON array")
    return data


def _emit(rows, fmt, out, header=None):
    if fmt == "json":
        json.dump(rows, out, indent=2)
        out.write("\n")
        return
    rows = rows if isinstance(rows, list) else [rows]
    header = header or list(rows[0].keys())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if r.get(k) is None else r.get(k) for k in header])
    out.write(buf.getvalue())


# -- commands ------------------------------------------------------------------

def cmd_predict(args, out):
    P = IntPolynomial.parse(args.poly)
    rep = predict_CP(P, _load_invariants(args.invariants), args.disc_choice)
    d = rep.to_dict()
    if args.format == "csv":
        flat = {k: v for k, v in d.items() if k != "orders"}
        flat["poly"] = args.poly
        _emit([flat], "csv", out)
    else:
        _emit(d, "json", out)
    return EXIT_OK


def _prediction_or_none(P, invariants):
    try:
        return predict_CP(P, invariants)
    except MissingInvariants:
        return None


def cmd_count(args, out):
    P = IntPolynomial.parse(args.poly)
    radii = args.radius_sweep or ([args.radius] if args.radius is not None else None)
    if not radii:
        raise InvalidInput("give --radius or --radius-sweep")
    pred = _prediction_or_none(P, _load_invariants(args.invariants))
    rows = []
    stream = open(args.stream, "w") if args.stream else None
    try:
        for T in radii:
            census = count_in_ball(P, T, args.norm_rule, stream=stream, budget=args.budget)
            norm = census.normalized
            row = {"T": _fmt_radius(T), "count": census.count, "count_over_T_m": norm,
                   "C_P_poly": None, "C_P_field": None, "ratio": None, "closer": None}
            if pred is not None:
                row["C_P_poly"] = pred.C_P_disc_poly
                row["C_P_field"] = pred.C_P_disc_field
                chosen = pred.C_P_disc_poly if args.disc_choice == "poly" else pred.C_P_disc_field
                if chosen:
                    row["ratio"] = norm / chosen
                if pred.C_P_disc_field is not None:
                    dp = abs(norm - pred.C_P_disc_poly)
                    df = abs(norm - pred.C_P_disc_field)
                    row["closer"] = "poly" if dp < df else "field" if df < dp else "tie"
            rows.append(row)
    finally:
        if stream:
            stream.close()
    _emit(rows, args.format, out)
    return EXIT_OK


def _lattice_repr(L):
    return [[str(v) for v in row] for row in L.basis]


def cmd_orbits(args, out):
    from .lmd import InvariantCache, conductor_of, orbit_decompose, same_orbit
    from .errors import UnsupportedDegree

    P = IntPolynomial.parse(args.poly)
    if P.degree > MAX_ORBIT_DEGREE:
        raise UnsupportedDegree(f"orbit census supports degree <= {MAX_ORBIT_DEGREE}, got {P.degree}")
    census = count_in_ball(P, args.radius, args.norm_rule, collect=True, budget=args.budget)
    cache = InvariantCache()
    oc = orbit_decompose(census.matrices, P, cache)
    orbits = []
    for inv, mats in oc.groups:
        orbits.append({"conductor": str(conductor_of(inv.order)), "order": _lattice_repr(inv.order),
                       "class_rep": _lattice_repr(inv.class_id), "size": len(mats),
                       "representative": [list(r) for r in mats[0]]})
    res = {"poly": list(P.coeffs), "T": _fmt_radius(args.radius), "total": census.count,
           "num_orbits": oc.num_orbits, "unresolved": len(oc.unresolved),
           "expected_orbits": oc.expected_total(), "orbits": orbits}
    if args.cross_check:
        reps = [mats[0] for _, mats in oc.groups]
        contradictions = 0
        for i, a in enumerate(reps):
            for b in reps[i + 1:]:
                if same_orbit(a, b, P, args.conjugator_bound, cache).status == "yes":
                    contradictions += 1
        found = 0
        for (inv, mats), rep in zip(oc.groups, reps):
            for X in mats[1:args.cross_check_limit + 1]:
                found += same_orbit(rep, X, P, args.conjugator_bound, cache).status == "yes"
        res["cross_check"] = {"bound": args.conjugator_bound, "contradictions": contradictions,
                              "conjugators_found": found}
    if args.format == "csv":
        _emit([{"conductor": o["conductor"], "size": o["size"]} for o in orbits] or
              [{"conductor": None, "size": 0}], "csv", out)
    else:
        _emit(res, "json", out)
    return EXIT_OK


def _verify_reports(args):
    from . import geoverify as gv

    which = args.which
    if which == "haar":
        identities = [args.identity] if args.identity else sorted(gv.IDENTITIES)
        fs = [args.f] if args.f else sorted(gv.CATALOGUE)
        reps = []
        for idn in identities:
            for f in fs:
                reps.append(gv.haar_identity_check(idn, f, args.samples, args.seed))
        if args.negative_control:
            ctrl = gv.haar_identity_check("iwasawa-cartan", fs[0], args.samples, args.seed,
                                          drop_density=True)
            # the control passes when the broken identity is clearly violated
            ctrl.passed = ctrl.rel_err > 0.05
            ctrl.check = "haar_negative_control"
            reps.append(ctrl)
        return reps
    if which == "minkowski2":
        return [gv.minkowski2_quadrature(args.grid)]
    P = IntPolynomial.parse(args.poly)
    sess = gv.build_session(P)
    if which == "jacobian":
        return [gv.jacobian_check(sess, args.points, args.h, args.seed)]
    if which == "sandwich":
        return [gv.sandwich_check(sess, float(args.radius), args.samples, args.seed, args.rule)]
    if which == "ceta":
        return [gv.mc_c_eta(P, float(args.radius), args.samples, args.seed, sess=sess)]
    raise InvalidInput(f"unknown check {which!r}")


def cmd_verify(args, out):
    reports = _verify_reports(args)
    rows = [r.to_dict() for r in reports]
    if args.format == "csv":
        flat = [{k: (json.dumps(v, sort_keys=True) if isinstance(v, dict) else v) for k, v in r.items()}
                for r in rows]
        _emit(flat, "csv", out)
    else:
        _emit(rows, "json", out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY


# -- parser --------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="intmatcount", description=__doc__)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker count (results do not depend on it)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, poly=True):
        if poly:
            sp.add_argument("--poly", required=True, help="coefficients, leading first, e.g. 1,0,1")
        sp.add_argument("--format", choices=["json", "csv"], default="json")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("predict", help="asymptotic constant C_P")
    common(sp)
    sp.add_argument("--invariants", help="JSON array of {disc, conductor, h, R, w}")
    sp.add_argument("--disc-choice", choices=["poly", "field"], default="poly")
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("count", help="exact census in a Frobenius ball")
    common(sp)
    sp.add_argument("--radius", type=_radius)
    sp.add_argument("--radius-sweep", type=_radius_list)
    sp.add_argument("--norm-rule", choices=["weak", "strict"], default="weak")
    sp.add_argument("--disc-choice", choices=["poly", "field"], default="poly")
    sp.add_argument("--invariants")
    sp.add_argument("--stream", help="write matrices here, one per line")
    sp.add_argument("--budget", type=float, default=DEFAULT_BUDGET)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("orbits", help="GL_n(Z)-orbit decomposition of a census")
    common(sp)
    sp.add_argument("--radius", type=_radius, required=True)
    sp.add_argument("--norm-rule", choices=["weak", "strict"], default="weak")
    sp.add_argument("--budget", type=float, default=DEFAULT_BUDGET)
    sp.add_argument("--cross-check", action="store_true",
                    help="run the bounded conjugator search against the invariants")
    sp.add_argument("--conjugator-bound", type=int, default=8)
    sp.add_argument("--cross-check-limit", type=int, default=20)
    sp.set_defaults(func=cmd_orbits)

    sp = sub.add_parser("verify", help="numerical checks")
    sp.add_argument("which", choices=["haar", "jacobian", "sandwich", "ceta", "minkowski2"])
    common(sp, poly=False)
    sp.add_argument("--poly", default="1,0,1")
    sp.add_argument("--samples", type=int)
    sp.add_argument("--radius", type=float)
    sp.add_argument("--identity", choices=["iwasawa-cartan", "knk-cartan", "iwasawa-knk"])
    sp.add_argument("--f", help="test function from the catalogue")
    sp.add_argument("--negative-control", action="store_true")
    sp.add_argument("--grid", type=int, default=2000)
    sp.add_argument("--points", type=int, default=10)
    sp.add_argument("--h", type=float, default=1e-5)
    sp.add_argument("--rule", choices=["corrected", "unit"], default="corrected")
    sp.set_defaults(func=cmd_verify)
    return p


_VERIFY_DEFAULTS = {"haar": (1_000_000, None), "sandwich": (100_000, 10.0),
                    "ceta": (2 ** 20, 1e8)}


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        samples, radius = _VERIFY_DEFAULTS.get(args.which, (None, None))
        if args.samples is None:
            args.samples = samples
        if args.radius is None:
            args.radius = radius
    try:
        return args.func(args, out)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except MissingInvariants as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
