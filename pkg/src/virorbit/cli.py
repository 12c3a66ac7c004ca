"""Command-line entry point: classify, verify, orbit-table."""
import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .circle import SampledDensity
from .devmap import GroupPathSpec, from_group_path, from_potential, q_of
from .errors import VirorbitError
from .hill import HillPotential
from .sl2 import classify, hyperbolic, parabolic, rotation, translation_number
from .suites import SUITES, SuiteConfig, run_suite


class UsageError(Exception):
    pass


# ------------------------------------------------------------ serialization

def fmt(v):
    """17 significant digits; non-finite values become strings."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isfinite(v):
            return _Num(format(v, ".17g"))
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, dict):
        return {k: fmt(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [fmt(x) for x in v]
    return v


class _Num:
    """A number with fixed serialized text."""
    __slots__ = ("text",)

    def __init__(self, text):
        self.text = text


def _encode(o, indent, level):
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = ", " if indent is None else ","
    if isinstance(o, _Num):
        yield o.text
    elif isinstance(o, dict):
        if not o:
            yield "{}"
            return
        yield "{"
        for i, (k, v) in enumerate(o.items()):
            yield (sep if i else "") + pad + json.dumps(str(k)) + ": "
            yield from _encode(v, indent, level + 1)
        yield end + "}"
    elif isinstance(o, list):
        if not any(isinstance(v, (dict, list)) for v in o):
            yield "[" + ", ".join("".join(_encode(v, None, 0)) for v in o) + "]"
            return
        yield "["
        for i, v in enumerate(o):
            yield (sep if i else "") + pad
            yield from _encode(v, indent, level + 1)
        yield end + "]"
    else:
        yield json.dumps(o)


def dumps(obj):
    return "".join(_encode(fmt(obj), 2, 0)) + "\n"


def rows_to_csv(rows, columns):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _cell(v):
    v = fmt(v)
    if isinstance(v, _Num):
        return v.text
    if isinstance(v, (dict, list)):
        return "".join(_encode(v, None, 0))
    return "" if v is None else v


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------- classify

def _load_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _monodromy_report(h):
    cls = classify(h)
    tr = float(np.trace(h.g))
    return {"class": cls.to_json(), "translation_number": translation_number(h),
            "trace": tr, "abs_trace": abs(tr), "monodromy": h.to_json()}


def classify_input(data, grid_size=256, ode_steps=None):
    """Class, translation number and trace data for a potential or group-path spec."""
    try:
        if "factors" in data:
            spec = GroupPathSpec.from_json(data)
            gamma = from_group_path(spec, grid_size)
            kind = "group_path"
        else:
            T = HillPotential.of(SampledDensity.from_json(data, data.get("grid_size", grid_size)))
            gamma = from_potential(T, ode_steps)
            kind = "potential"
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, VirorbitError):
            raise
        raise UsageError(f"malformed input: {exc}") from exc
    out = {"input": kind}
    out.update(_monodromy_report(q_of(gamma, check=False)))
    return out


def cmd_classify(args):
    res = classify_input(_load_json(args.input), args.grid_size, args.ode_steps)
    if args.format == "csv":
        text = rows_to_csv([res], ["input", "class", "translation_number", "trace", "abs_trace"])
    else:
        text = dumps(res)
    _emit(text, args.out)
    return 0


# ------------------------------------------------------------------- verify

RECORD_COLUMNS = ["suite", "case_id", "seed", "residual", "tolerance", "pass", "details"]


def cmd_verify(args):
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    cfg = SuiteConfig(grid_size=args.grid_size, ode_steps=args.ode_steps, eps=args.eps,
                      tol=args.tol, cases=args.cases)
    report = run_suite(args.suite, seed=args.seed, cases=args.cases, cfg=cfg)
    data = report.to_json()
    if args.format == "csv":
        text = rows_to_csv(data["records"], RECORD_COLUMNS)
    else:
        text = dumps(data)
    _emit(text, args.out)
    return 0 if report.ok else 1


# -------------------------------------------------------------- orbit-table

def parse_grid(text):
    """'start:stop:count' (inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            a, b, n = text.split(":")
            n = int(n)
            if n < 1:
                raise ValueError
            return list(np.linspace(float(a), float(b), n))
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"bad grid {text!r}") from exc


def orbit_table(alphas, betas, windings):
    """Rows (family, parameter, n, class, tau, |trace|) over the class picture."""
    rows = []

    def add(family, param, n, h):
        cls = classify(h)
        rows.append({"family": family, "parameter": param, "n": n,
                     "class": cls.kind, "class_data": cls.to_json(),
                     "tau": translation_number(h), "abs_trace": abs(float(np.trace(h.g)))})

    for a in alphas:
        add("rotation", a, math.floor(a / math.pi), rotation(a))
    for n in windings:
        for b in betas:
            if b > 0:
                add("hyperbolic", b, n, hyperbolic(b, n))
        for sign in (1, -1):
            add("parabolic", float(sign), n, parabolic(sign, n))
    return rows


def cmd_orbit_table(args):
    rows = orbit_table(parse_grid(args.alpha_grid), parse_grid(args.beta_grid),
                       [int(v) for v in parse_grid(args.n_values)])
    cols = ["family", "parameter", "n", "class", "tau", "abs_trace"]
    text = dumps(rows) if args.format == "json" else rows_to_csv(rows, cols)
    _emit(text, args.out)
    return 0


# ------------------------------------------------------------------- parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid-size", type=int, default=256)
    common.add_argument("--ode-steps", type=int, default=None,
                        help="RK4 steps for the Hill ODE (default 16 * grid size)")
    common.add_argument("--eps", type=float, default=1e-4)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cases", type=int, default=None)
    common.add_argument("--out", default=None)

    p = argparse.ArgumentParser(prog="virorbit", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("classify", parents=[common], help="classify a potential or group path")
    c.add_argument("input", help="JSON file ('-' for stdin)")
    c.add_argument("--format", choices=["json", "csv"], default="json")
    c.set_defaults(func=cmd_classify)
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite")
    v.add_argument("--format", choices=["json", "csv"], default="json")
    v.set_defaults(func=cmd_verify)
    o = sub.add_parser("orbit-table", parents=[common], help="conjugacy-class plot data")
    o.add_argument("--alpha-grid", default="0.1:9.3:24")
    o.add_argument("--beta-grid", default="0.25:2:8")
    o.add_argument("--n-values", default="0,1,2")
    o.add_argument("--format", choices=["json", "csv"], default="csv")
    o.set_defaults(func=cmd_orbit_table)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        n = args.grid_size
        if n < 16 or n & (n - 1):
            raise UsageError("--grid-size must be a power of two >= 16")
        if args.eps <= 0:
            raise UsageError("--eps must be positive")
        if args.cases is not None and args.cases < 1:
            raise UsageError("--cases must be positive")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VirorbitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
