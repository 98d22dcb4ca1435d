"""Command-line entry point.

Subcommands: build, analyze, constant, recipe, ito, timechange, selftest.
Artifacts are JSON (machine interchange) or CSV (plotting interchange);
every run records the fully resolved configuration and its hash, either
inside the JSON artifact or in a sibling ``<output>.manifest.json``.
Identical argument lists produce byte-identical artifacts: the only
randomness is the named seed (default 0) and nothing is time-based.

Exit codes: 0 success, 2 validation/usage error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import acceptance, serialize
from .calculus import FunctionWithDerivatives, change_of_variable_residual
from .construct import (
    UniformMagnitudeSpec,
    recipe,
    reference_path,
    variation_constant,
)
from .errors import BudgetError, ValidationError
from .partition import power_table, qadic_table, random_refining_table
from .timechange import (
    build_homeomorphism,
    pullback_path,
    transported_pvar_check,
    transported_recipe,
)
from .variation import pvar_profile

TARGET_DENSITIES = {
    # name -> (hprime(t, rate), h(t, rate))  with h(0) = 0
    "linear": (lambda t, r: np.full_like(t, r), lambda t, r: r * t),
    "exp": (lambda t, r: r * np.exp(r * t), lambda t, r: np.exp(r * t) - 1.0),
    "log": (lambda t, r: r / (1.0 + r * t), lambda t, r: np.log1p(r * t)),
}


def _write_text(path: str, text: str) -> None:
    Path(path).write_text(text)


def _write_json(path: str, doc: dict) -> None:
    _write_text(path, serialize.canonical_dumps(doc))


def _manifest(args: argparse.Namespace, extra: dict | None = None) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    if extra:
        config.update(extra)
    return {"config": config, "config_hash": serialize.config_hash(config)}


def _sibling_manifest(out: str, args: argparse.Namespace, extra: dict | None = None) -> None:
    _write_json(out + ".manifest.json", _manifest(args, extra))


def _spec_from_args(args: argparse.Namespace) -> UniformMagnitudeSpec:
    signs = "plus" if args.signs == "plus" else int(args.seed)
    a = None
    if args.a is not None:
        a = tuple(float(v) for v in args.a.split(","))
    elif args.q >= 3:
        a = tuple(1.0 for _ in range(args.q - 1))
    return UniformMagnitudeSpec(
        q=args.q, p=args.p, levels=args.levels, signs=signs, a=a
    )


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_build(args) -> int:
    spec = _spec_from_args(args)
    path = reference_path(spec, args.levels)
    doc = serialize.path_to_dict(path)
    doc["manifest"] = _manifest(args)
    _write_json(args.output, doc)
    return 0


def _cmd_analyze(args) -> int:
    doc = _load_json(args.input)
    path = serialize.path_from_dict(doc)
    if args.q is not None and args.q != path.q:
        raise ValidationError(f"artifact has q={path.q}, requested q={args.q}")
    levels = args.levels if args.levels is not None else path.level
    if levels > path.level:
        raise ValidationError(
            f"artifact holds level {path.level} samples, cannot analyze to level {levels}"
        )
    profiles = [
        pvar_profile(path.restrict(n), args.p, eval_level=args.eval_level)
        for n in range(levels + 1)
    ]
    from io import StringIO

    buf = StringIO()
    serialize.write_profiles_csv(profiles, buf)
    _write_text(args.output, buf.getvalue())
    _sibling_manifest(args.output, args, {"input_hash": serialize.config_hash(doc)})
    return 0


def _cmd_constant(args) -> int:
    a = tuple(float(v) for v in args.a.split(",")) if args.a else None
    report = variation_constant(
        args.p, args.q, a, method=args.method, J=args.J, N=args.N,
        seed=args.seed, tol=args.tol,
    )
    doc = serialize.constant_to_dict(report)
    doc["manifest"] = _manifest(args)
    out = serialize.canonical_dumps(doc)
    if args.output:
        _write_text(args.output, out)
    else:
        sys.stdout.write(out)
    return 0


def _cmd_recipe(args) -> int:
    spec = _spec_from_args(args)
    hprime, h = TARGET_DENSITIES[args.target]
    result = recipe(lambda t: hprime(t, args.rate), spec, args.levels)
    prof = pvar_profile(result.y, args.p, eval_level=args.eval_level)
    target_vals = h(prof.eval_points, args.rate)
    gap = float(np.max(np.abs(prof.values - target_vals)))
    doc = serialize.path_to_dict(result.y)
    doc["manifest"] = _manifest(args, {
        "constant": result.constant.value,
        "target_sup_gap": gap,
    })
    _write_json(args.output, doc)
    if args.profile_csv:
        from io import StringIO

        buf = StringIO()
        serialize.write_profiles_csv([prof], buf)
        _write_text(args.profile_csv, buf.getvalue())
    return 0


def _cmd_ito(args) -> int:
    doc = _load_json(args.input)
    path = serialize.path_from_dict(doc)
    if args.level is not None:
        if args.level > path.level:
            raise ValidationError(
                f"artifact holds level {path.level}, cannot evaluate at level {args.level}"
            )
        path = path.restrict(args.level)
    coeffs = [float(v) for v in args.f.split(",")]
    f = FunctionWithDerivatives.polynomial(coeffs)
    report = change_of_variable_residual(f, path, args.p)
    from io import StringIO

    buf = StringIO()
    serialize.write_residual_csv(report.eval_points, report.residuals, buf)
    _write_text(args.output, buf.getvalue())
    _sibling_manifest(args.output, args, {"sup_residual": report.sup})
    return 0


def _cmd_timechange(args) -> int:
    if args.table:
        table_doc = _load_json(args.table)
        table = build_homeomorphism(serialize.table_from_dict(table_doc))
    else:
        depth = args.depth if args.depth is not None else args.levels
        makers = {
            "qadic": lambda: qadic_table(args.q, depth),
            "power": lambda: power_table(args.q, depth, args.exponent),
            "random": lambda: random_refining_table(args.q, depth, seed=args.seed),
        }
        raw = makers[args.make_table]()
        if args.table_out:
            _write_json(args.table_out, serialize.table_to_dict(raw))
        table = build_homeomorphism(raw)

    if args.mode == "check":
        src = serialize.path_from_dict(_load_json(args.path))
        gap = transported_pvar_check(src, table, args.p)
        doc = {"identity_gap": gap, "manifest": _manifest(args)}
        _write_json(args.output, doc)
        return 0
    if args.mode == "pullback":
        src = serialize.path_from_dict(_load_json(args.path))
        pulled = pullback_path(src, table)
        doc = serialize.path_to_dict(pulled)
        doc["manifest"] = _manifest(args)
        _write_json(args.output, doc)
        return 0
    # mode == "recipe"
    spec = _spec_from_args(args)
    _, h = TARGET_DENSITIES[args.target]
    result = transported_recipe(
        lambda s: h(s, args.rate), spec, table, args.levels
    )
    doc = serialize.path_to_dict(result.y)
    doc["manifest"] = _manifest(args, {"target_sup_gap": result.sup_gap})
    _write_json(args.output, doc)
    return 0


def _cmd_selftest(args) -> int:
    indices = None
    if args.criteria:
        indices = [int(v) for v in args.criteria.split(",")]
    results = acceptance.run_all(indices)
    for r in results:
        print(r.line())
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} criteria passed")
    return 0 if n_pass == len(results) else 1


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_spec_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--q", type=int, default=2, help="branching factor (default 2)")
    p.add_argument("--p", type=float, default=2.0, help="variation exponent (default 2)")
    p.add_argument("--levels", type=int, default=16, help="grid / truncation level")
    p.add_argument("--signs", choices=("plus", "random"), default="plus",
                   help="dyadic coefficient signs")
    p.add_argument("--seed", type=int, default=0, help="seed for all randomness (default 0)")
    p.add_argument("--a", type=str, default=None,
                   help="comma-separated branch weights for q >= 3 (default all ones)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pvarpath",
        description="Paths with prescribed p-th variation along refining partitions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="synthesize a reference path artifact")
    _add_spec_flags(b)
    b.add_argument("-o", "--output", required=True, help="output path JSON")
    b.set_defaults(func=_cmd_build)

    a = sub.add_parser("analyze", help="per-level variation profiles of a path artifact")
    a.add_argument("input", help="path JSON artifact")
    a.add_argument("--p", type=float, default=2.0)
    a.add_argument("--q", type=int, default=None, help="expected q (validated against artifact)")
    a.add_argument("--levels", type=int, default=None, help="finest level to profile")
    a.add_argument("--eval-level", type=int, default=10, help="profile evaluation subgrid level")
    a.add_argument("-o", "--output", required=True, help="output profile CSV")
    a.set_defaults(func=_cmd_analyze)

    c = sub.add_parser("constant", help="limiting variation constant by one of three oracles")
    c.add_argument("--p", type=float, required=True)
    c.add_argument("--q", type=int, default=2)
    c.add_argument("--a", type=str, default=None)
    c.add_argument("--method", choices=("exact", "mc", "monte-carlo", "closed", "closed-form"),
                   default="exact")
    c.add_argument("--J", type=int, default=None, help="enumeration truncation depth")
    c.add_argument("--N", type=int, default=10 ** 6, help="monte-carlo sample count")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--tol", type=float, default=1e-6, help="target truncation bound")
    c.add_argument("-o", "--output", default=None, help="output JSON (stdout if omitted)")
    c.set_defaults(func=_cmd_constant)

    r = sub.add_parser("recipe", help="construct a path with prescribed variation")
    _add_spec_flags(r)
    r.add_argument("--target", choices=tuple(TARGET_DENSITIES), default="linear")
    r.add_argument("--rate", type=float, default=1.0, help="target growth parameter")
    r.add_argument("--eval-level", type=int, default=10)
    r.add_argument("--profile-csv", default=None, help="also write the empirical profile CSV")
    r.add_argument("-o", "--output", required=True, help="output path JSON")
    r.set_defaults(func=_cmd_recipe)

    i = sub.add_parser("ito", help="compensated-sum change-of-variable residual")
    i.add_argument("input", help="path JSON artifact")
    i.add_argument("--f", required=True, help="ascending polynomial coefficients, e.g. 0,0,1")
    i.add_argument("--p", type=float, default=2.0, help="even variation order")
    i.add_argument("--level", type=int, default=None, help="restrict to a coarser level")
    i.add_argument("-o", "--output", required=True, help="output residual CSV")
    i.set_defaults(func=_cmd_ito)

    t = sub.add_parser("timechange", help="transport paths/targets through a time change")
    _add_spec_flags(t)
    t.add_argument("--mode", choices=("check", "pullback", "recipe"), required=True)
    t.add_argument("--table", default=None, help="refining table JSON")
    t.add_argument("--make-table", choices=("qadic", "power", "random"), default="power",
                   help="generate the table instead of reading one")
    t.add_argument("--depth", type=int, default=None, help="generated table depth")
    t.add_argument("--exponent", type=float, default=2.0, help="power-table exponent")
    t.add_argument("--table-out", default=None, help="persist the generated table")
    t.add_argument("--path", default=None, help="path JSON (check / pullback modes)")
    t.add_argument("--target", choices=tuple(TARGET_DENSITIES), default="linear")
    t.add_argument("--rate", type=float, default=1.0)
    t.add_argument("-o", "--output", required=True, help="output JSON")
    t.set_defaults(func=_cmd_timechange)

    s = sub.add_parser("selftest", help="run the acceptance criteria")
    s.add_argument("--criteria", default=None, help="comma-separated criterion indices")
    s.set_defaults(func=_cmd_selftest)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
