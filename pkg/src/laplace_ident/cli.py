"""Command-line front end.

Exit codes: 0 success, 1 negative verdict, 2 usage, 3 bad input, 4 numeric
domain error (including violated standing assumptions).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import counterex, dsl, identify, laplace, ratio, series
from .errors import (AssumptionViolated, BadNormalization, BadParams, DivisionByZero,
                     DomainError, IdenticalFunctions, LaplaceIdentError)
from .fnmodel import PiecewiseExpPoly, power

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_INPUT, EXIT_DOMAIN = 0, 1, 2, 3, 4


# -- deterministic serialization ---------------------------------------------------

def _num(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return "%.17g" % x


def to_json(obj) -> str:
    """JSON with sorted keys and 17-digit floats; non-finite floats become strings."""
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ", ".join(f"{json.dumps(k)}: {to_json(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    return json.dumps(str(obj))


def _text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj, key=str):
            v = obj[k]
            if isinstance(v, (dict, list, tuple)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            if isinstance(v, dict):
                lines.append(f"{pad}- " + ", ".join(f"{k}={_scalar(v[k])}" for k in sorted(v)))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(obj))
    return lines


def _scalar(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    return str(v)


def write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])


# -- argument helpers ----------------------------------------------------------------

class _Usage(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise _Usage(f"expected comma-separated numbers, got {text!r}")


def _grid(text: str) -> np.ndarray:
    try:
        lo, hi, steps = text.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise _Usage(f"expected LO:HI:STEPS, got {text!r}")
    if steps < 1:
        raise _Usage("STEPS must be positive")
    return np.linspace(lo, hi, steps)


def _load(path: str, digest_parts: list) -> PiecewiseExpPoly:
    try:
        f = dsl.parse_file(path)
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc.strerror}")
    digest_parts.append(dsl.format_function(f))
    return f


class _InputError(Exception):
    pass


def _atoms(T: laplace.TransformExpr) -> list:
    return [{"delay": a.delay, "numerator": list(a.num),
             "factors": [{"re": f[0], "im": f[1], "mult": f[2]} for f in a.factors]}
            for a in T.atoms]


def _verdict_dict(v: identify.IdentVerdict) -> dict:
    return {"theorem": v.theorem, "verdict": v.verdict, "matched_condition": v.matched_condition,
            "conditions": {str(k): s for k, s in sorted(v.conditions.items())},
            "witnesses": [{"condition": c, "reason": r, "t": t, "value": val}
                          for c, r, t, val in v.witnesses],
            "class_constraints_on_q": v.class_constraints_on_q,
            "normalization": v.normalization, "notes": list(v.notes)}


# -- subcommands ---------------------------------------------------------------------

def cmd_transform(a, parts):
    f = _load(a.file, parts)
    T = laplace.transform(power(f, a.power) if a.power != 1 else f)
    res = {"power": a.power, "sigma": T.sigma, "atoms": _atoms(T)}
    rows = []
    if a.at:
        vals = [(lam, laplace.eval_transform(T, lam)) for lam in _floats(a.at)]
        res["values"] = [{"lambda": lam, "value": v} for lam, v in vals]
        rows = vals
    if a.asymptotic is not None:
        res["asymptotic"] = list(laplace.asymptotic_coeffs(T, a.asymptotic))
    return res, EXIT_OK, (["lambda", "value"], rows)


def cmd_ratio(a, parts):
    f = _load(a.file, parts)
    rows = [(float(lam), ratio.ratio_H(f, a.n, a.m, float(lam))) for lam in _grid(a.grid)]
    res = {"n": a.n, "m": a.m, "values": [{"lambda": lam, "H": h} for lam, h in rows]}
    return res, EXIT_OK, (["lambda", "H"], rows)


def cmd_equal(a, parts):
    p, q = _load(a.file_p, parts), _load(a.file_q, parts)
    rep = ratio.h_equal(p, q, a.n, a.m, tol=a.tol)
    res = {"verdict": rep.verdict, "n": a.n, "m": a.m,
           "tol": ratio.default_tol() if a.tol is None else a.tol,
           "max_grid_residual": rep.max_grid_residual,
           "exact_residuals": [{"delay": d, "residual": r} for d, r in sorted(rep.exact_residuals.items())],
           "witness_lambda": rep.witness_lambda}
    rows = [("lambda", lam, r) for lam, r in rep.grid]
    if a.conv_oracle:
        xs = _floats(a.conv_oracle)
        conv = ratio.conv_residual(p, q, a.n, a.m, xs)
        res["conv_residuals"] = [{"x": x, "residual": r} for x, r in zip(xs, conv)]
        rows += [("x", x, r) for x, r in zip(xs, conv)]
    code = EXIT_OK if rep.verdict == ratio.EQUAL else EXIT_NEGATIVE
    return res, code, (["axis", "point", "residual"], rows)


def cmd_identify(a, parts):
    p = _load(a.file_p, parts)
    q = _load(a.file_q, parts) if a.file_q else None
    v = identify.identify(p, q, a.n, a.m, a.theorem)
    code = EXIT_OK if v.verdict in (identify.IDENTIFIED, identify.UP_TO_SIGN) else EXIT_NEGATIVE
    return _verdict_dict(v), code, None


def cmd_obstruction(a, parts):
    p, q = _load(a.file_p, parts), _load(a.file_q, parts)
    L = series.obstruction_for_pair(p, q, a.n, a.m, a.order)
    res = {"T": L.T, "n": a.n, "m": a.m, "order": L.order,
           "d": list(L.d), "scales": list(L.scales), "all_zero": L.all_zero(),
           "first_nonzero": L.first_nonzero()}
    return res, EXIT_OK, (["i", "d", "scale"], [(i, d, s) for i, (d, s) in enumerate(zip(L.d, L.scales))])


def cmd_preset(a, parts):
    params = {k: getattr(a, k) for k in ("c", "a", "T", "n", "m") if getattr(a, k) is not None}
    parts.append(repr(sorted(params.items())))
    P = counterex.gen_preset(a.family, **params)
    res = {"family": P.family, "n": P.n, "m": P.m, "params": dict(P.params),
           "p": dsl.format_function(P.p), "q": dsl.format_function(P.q)}
    if a.emit:
        os.makedirs(a.emit, exist_ok=True)
        paths = []
        for tag, f in (("p", P.p), ("q", P.q)):
            path = os.path.join(a.emit, f"{a.family}_{tag}.fn")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(dsl.format_function(f) + "\n")
            paths.append(path)
        res["emitted"] = paths
    return res, EXIT_OK, None


def cmd_solve_c(a, parts):
    roots = counterex.solve_c(a.n, a.m, a.a, a.T)
    res = {"n": a.n, "m": a.m, "a": a.a, "T": a.T,
           "rhs": math.exp(-a.n * a.a * a.T) - math.exp(-a.m * a.a * a.T),
           "roots": [{"root": r.root, "trivial": r.trivial, "multiplicity": r.multiplicity,
                      "residual": r.residual} for r in roots]}
    return res, EXIT_OK, None


def cmd_classify(a, parts):
    fc = counterex.family_classify(a.n, a.m, a.a)
    res = {"case": fc.case, "members": list(fc.members), "includes_negatives": fc.includes_negatives,
           "singleton": fc.singleton, "T1": fc.T1, "T2": fc.T2, "b0": fc.b0}
    return res, EXIT_OK, None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--csv", metavar="PATH", help="write the grid evaluations as CSV")
    nm = argparse.ArgumentParser(add_help=False)
    nm.add_argument("-n", type=int, required=True)
    nm.add_argument("-m", type=int, required=True)

    ap = argparse.ArgumentParser(prog="laplace-ident",
                                 description="Ratios of Laplace transforms of powers and identifiability checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("transform", parents=[common], help="closed-form Laplace transform")
    s.add_argument("file")
    s.add_argument("--power", type=int, default=1)
    s.add_argument("--at", metavar="L1,L2,...")
    s.add_argument("--asymptotic", type=int, metavar="N")
    s.set_defaults(run=cmd_transform)

    s = sub.add_parser("ratio", parents=[common, nm], help="evaluate H_{n,m} on a grid")
    s.add_argument("file")
    s.add_argument("--grid", required=True, metavar="LO:HI:STEPS")
    s.set_defaults(run=cmd_ratio)

    s = sub.add_parser("equal", parents=[common, nm], help="decide whether two ratios coincide")
    s.add_argument("file_p")
    s.add_argument("file_q")
    s.add_argument("--tol", type=float)
    s.add_argument("--conv-oracle", metavar="X1,X2,...")
    s.set_defaults(run=cmd_equal)

    s = sub.add_parser("identify", parents=[common, nm], help="identifiability verdict")
    s.add_argument("file_p")
    s.add_argument("file_q", nargs="?")
    s.add_argument("--theorem", choices=["1", "2", "auto"], default="auto")
    s.set_defaults(run=cmd_identify)

    s = sub.add_parser("obstruction", parents=[common, nm], help="series obstruction coefficients")
    s.add_argument("file_p")
    s.add_argument("file_q")
    s.add_argument("--order", type=int, default=series.DEFAULT_ORDER)
    s.set_defaults(run=cmd_obstruction)

    s = sub.add_parser("preset", parents=[common], help="build a named counterexample pair")
    s.add_argument("family", choices=counterex.FAMILIES)
    s.add_argument("--c", type=float)
    s.add_argument("--a", type=float)
    s.add_argument("--T", type=float)
    s.add_argument("-n", type=int)
    s.add_argument("-m", type=int)
    s.add_argument("--emit", metavar="DIR")
    s.set_defaults(run=cmd_preset)

    s = sub.add_parser("solve-c", parents=[common, nm], help="roots of c^n - c^m = exp(-naT) - exp(-maT)")
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--T", type=float, required=True)
    s.set_defaults(run=cmd_solve_c)

    s = sub.add_parser("classify", parents=[common, nm], help="two-segment functions sharing the ratio of exp(-at)")
    s.add_argument("--a", type=float, required=True)
    s.set_defaults(run=cmd_classify)
    return ap


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    parts = [a.command] + [f"{k}={v!r}" for k, v in sorted(vars(a).items())
                           if k not in ("run", "json", "csv", "command", "file", "file_p", "file_q", "emit")]
    warnings: list[str] = []
    try:
        result, code, table = a.run(a, parts)
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (dsl.ParseError, _InputError, BadParams, BadNormalization, IdenticalFunctions) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AssumptionViolated as exc:
        print(f"assumption violated: {'; '.join(exc.report.details)}", file=sys.stderr)
        return EXIT_DOMAIN
    except (DomainError, DivisionByZero) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except LaplaceIdentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    if a.csv:
        if table is None or not table[1]:
            warnings.append("nothing to export as CSV for this command")
        else:
            write_csv(a.csv, *table)
    digest = hashlib.sha256("\n".join(parts).encode("utf-8")).hexdigest()
    envelope = {"command": a.command, "inputs_digest": digest, "result": result, "warnings": warnings}
    if a.json:
        out.write(to_json(envelope) + "\n")
    else:
        out.write("\n".join(_text(envelope)) + "\n")
    return code


def main() -> None:
    sys.exit(run())
