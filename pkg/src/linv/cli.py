"""Command-line driver: validate fixtures, compute L-invariants, sweep
refinement families, emit JSON or text reports.

Exit codes are a stable contract: 0 success, 1 validation failure,
2 singular refinement, 3 precision shortfall.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import engine, special
from .errors import (
    AmbiguousRankError,
    FixtureError,
    LinvError,
    OMinusSingularError,
    PrecisionError,
    SingularRefinementError,
)
from .fixtures import load_fixture, validate_arithmetic

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SINGULAR = 2
EXIT_PRECISION = 3

FIXTURE_DIR_ENV = "LINV_FIXTURE_DIR"


def resolve_fixture_path(path):
    if os.path.exists(path):
        return path
    search = os.environ.get(FIXTURE_DIR_ENV)
    if search:
        for d in search.split(os.pathsep):
            cand = os.path.join(d, path)
            if os.path.exists(cand):
                return cand
    return path


def _parse_s_token(tok, L):
    tok = tok.strip()
    if tok in ("inf", "oo", "∞", "infinity"):
        return None
    if "/" in tok:
        num, den = tok.split("/")
        return L.from_fraction(Fraction(int(num), int(den)))
    return L.from_fraction(Fraction(int(tok)))


def _line_refinement(prob, s, t):
    """Refinement for a sweep value: e1 + s e2 for 2-dimensional W, and
    t w1 + w2 + s w3 in the 3-dimensional adjoint shape."""
    L = prob.coeff_field
    d = prob.W.dim
    if d == 2:
        return engine.Refinement.line(prob, s)
    if d == 3:
        tval = t if t is not None else L.zero()
        if s is None:
            vec = [tval, L.zero(), L.one()]
        else:
            vec = [tval, L.one(), s]
        return engine.Refinement([vec], "sweep")
    raise LinvError("sweeps are supported for the 2- and 3-dimensional "
                    "parameterized families only")


def _refinement_line_params(prob, ref):
    """Recognize a named refinement as a point of the parameterized family:
    returns (s, t) with s = None at infinity, or None if unrecognizable."""
    if len(ref.basis) != 1:
        return None
    v = ref.basis[0]
    d = prob.W.dim
    if d == 2:
        if v[0].is_certified_nonzero():
            return (v[1] / v[0], None)
        return (None, None)
    if d == 3:
        if v[1].is_certified_nonzero():
            return (v[2] / v[1], v[0] / v[1])
        return (None, v[0])
    return None


def _cross_checks(prob, ref, report):
    """Closed-form comparisons applicable to this fixture."""
    out = []
    L = prob.coeff_field
    if prob.d_plus() == 0:
        rp = special.gross_regulator(prob)
        expected = rp if report.e % 2 == 0 else -rp
        out.append({
            "check": "gross_regulator",
            "value": repr(expected),
            "agree": bool(report.value.agrees_with(expected)),
        })
    params = _refinement_line_params(prob, ref)
    if "cm" in prob.special and params is not None:
        data = special.CMData.from_problem(prob)
        try:
            closed = special.cm_line_l_invariant(params[0], data)
            out.append({
                "check": "cm_line_formula",
                "value": repr(closed),
                "agree": bool(report.value.agrees_with(closed)),
            })
        except SingularRefinementError:
            out.append({"check": "cm_line_formula", "value": "singular",
                        "agree": False})
    if "adjoint_cm" in prob.special and params is not None:
        data = special.AdjointCMData.from_problem(prob)
        s, t = params
        tval = t if t is not None else L.zero()
        try:
            closed = special.adjoint_cm_l_invariant(s, tval, data)
            out.append({
                "check": "adjoint_cm_formula",
                "value": repr(closed),
                "agree": bool(report.value.agrees_with(closed)),
            })
        except SingularRefinementError:
            out.append({"check": "adjoint_cm_formula", "value": "singular",
                        "agree": False})
    return out


def cmd_validate(args):
    path = resolve_fixture_path(args.fixture)
    try:
        prob = load_fixture(path, precision_override=args.precision)
    except FixtureError as exc:
        print(f"validation failed: {exc}")
        for d in exc.details:
            print(f"  - {d}")
        return EXIT_VALIDATION
    report = validate_arithmetic(prob)
    for line in report.lines():
        print(line)
    if not report.ok:
        return EXIT_VALIDATION
    print("all checks pass")
    return EXIT_OK


def _emit(obj, fmt):
    if fmt == "json":
        print(json.dumps(obj, indent=2))
    else:
        _emit_text(obj)


def _emit_text(obj):
    if "rows" in obj:
        print(f"fixture: {obj.get('fixture')}")
        for row in obj["rows"]:
            if row.get("singular"):
                print(f"  s={row['s']}: singular refinement")
            else:
                print(f"  s={row['s']}: L = {row['value_repr']} "
                      f"(e={row['e']}, {row['certified_digits']} digits)")
        return
    print(f"fixture: {obj.get('fixture')}")
    print(f"refinement: {obj.get('refinement')}")
    print(f"e = {obj['e']}, dims = {obj['dims']}")
    print(f"L-invariant = {obj['value_repr']}")
    print(f"certified digits: {obj['certified_digits']}")
    for chk in obj.get("cross_checks", []):
        status = "agree" if chk["agree"] else "DISAGREE"
        print(f"cross-check [{chk['check']}]: {chk['value']} -> {status}")


def cmd_compute(args):
    path = resolve_fixture_path(args.fixture)
    try:
        prob = load_fixture(path, precision_override=args.precision)
    except FixtureError as exc:
        print(f"validation failed: {exc}")
        for d in exc.details:
            print(f"  - {d}")
        return EXIT_VALIDATION

    L = prob.coeff_field
    try:
        pipe = engine.Pipeline(prob)
    except (AmbiguousRankError, PrecisionError) as exc:
        print(f"precision shortfall: {exc}")
        print(f"estimate: needs roughly {2 * prob.precision} digits; the fixture "
              f"carries {prob.precision} (regenerate it at higher precision "
              "if the cap is the fixture itself)")
        return EXIT_PRECISION

    if args.sweep:
        if not ("cm" in prob.special or "adjoint_cm" in prob.special):
            print("sweep requested but the fixture carries no parameterized "
                  "refinement family (special.cm / special.adjoint_cm)")
            return EXIT_VALIDATION
        spec = args.sweep
        if not spec.startswith("s="):
            print("sweep spec must look like s=0,1,2,inf")
            return EXIT_VALIDATION
        tokens = spec[2:].split(",")
        tval = _parse_s_token(args.t, L) if args.t else None
        rows = []
        for tok in tokens:
            s = _parse_s_token(tok, L)
            ref = _line_refinement(prob, s, tval)
            row = {"s": tok.strip()}
            try:
                report = pipe.l_invariant(ref)
                row.update({
                    "value_repr": repr(report.value),
                    "value": report.value.to_payload(),
                    "e": report.e,
                    "certified_digits": report.certified_digits,
                })
            except SingularRefinementError:
                row["singular"] = True
            except (PrecisionError, OMinusSingularError) as exc:
                print(f"precision shortfall at s={tok}: {exc}")
                return EXIT_PRECISION
            rows.append(row)
        _emit({"fixture": prob.name or path, "rows": rows}, args.format)
        return EXIT_OK

    if args.refinement:
        ref = engine.Refinement.named(prob, args.refinement)
    elif len(prob.refinements) == 1:
        ref = engine.Refinement.named(prob, prob.refinements[0]["name"])
    else:
        print("fixture has several refinements; pick one with --refinement "
              f"(available: {[r['name'] for r in prob.refinements]})")
        return EXIT_VALIDATION

    try:
        report = pipe.l_invariant(ref)
    except SingularRefinementError as exc:
        print(f"singular refinement: {exc}")
        return EXIT_SINGULAR
    except (PrecisionError, OMinusSingularError, AmbiguousRankError) as exc:
        print(f"precision shortfall: {exc}")
        print(f"estimate: needs roughly {2 * prob.precision} digits; the fixture "
              f"carries {prob.precision} (regenerate it at higher precision "
              "if the cap is the fixture itself)")
        return EXIT_PRECISION

    payload = report.to_payload()
    payload["fixture"] = prob.name or path
    if args.cross_check:
        try:
            payload["cross_checks"] = _cross_checks(prob, ref, report)
        except (PrecisionError, LinvError) as exc:
            payload["cross_checks"] = [{"check": "error", "value": str(exc),
                                        "agree": False}]
    _emit(payload, args.format)
    if args.cross_check and any(not c["agree"]
                                for c in payload.get("cross_checks", [])):
        return EXIT_PRECISION
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="linv",
        description="p-adic L-invariants of Artin motives from unit data")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="load a fixture and run all checks")
    v.add_argument("fixture")
    v.add_argument("--precision", type=int, default=None)
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("compute", help="compute the L-invariant")
    c.add_argument("fixture")
    c.add_argument("--refinement", default=None,
                   help="name of the refinement to use")
    c.add_argument("--sweep", default=None,
                   help="sweep spec, e.g. s=0,1,2,inf (parameterized fixtures)")
    c.add_argument("--t", default=None,
                   help="t parameter for 3-dimensional family sweeps")
    c.add_argument("--cross-check", action="store_true",
                   help="also evaluate every applicable closed form")
    c.add_argument("--precision", type=int, default=None)
    c.add_argument("--format", choices=("json", "text"), default="text")
    c.set_defaults(func=cmd_compute)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LinvError as exc:
        print(f"error: {exc}")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
