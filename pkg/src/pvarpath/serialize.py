"""JSON and CSV interchange for paths, coefficients, tables and reports.

JSON artifacts are written with sorted keys and compact separators, so a
fixed input produces byte-identical output.  CSV floats carry 17 significant
digits (shortest exact round-trip for float64 is at most 17).
"""

from __future__ import annotations

import hashlib
import json
from typing import IO

import numpy as np

from .construct import UniformMagnitudeSpec, VariationConstant
from .errors import ValidationError
from .partition import PartitionGrid, RefiningTable, qadic_grid
from .schauder import CoefficientArray, SampledPath
from .variation import VariationProfile


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_dumps(config).encode()).hexdigest()[:16]


def fmt_float(x: float) -> str:
    return f"{float(x):.17g}"


# ---------------------------------------------------------------------------
# SampledPath <-> JSON
# ---------------------------------------------------------------------------


def path_to_dict(path: SampledPath) -> dict:
    meta = dict(path.meta)
    if path.offset != 0.0:
        meta["offset"] = float(path.offset)
    meta["grid_generator"] = path.grid.generator
    if path.grid.generator != "q-adic":
        meta["grid_points"] = [float(v) for v in path.grid.points]
    return {
        "q": int(path.q),
        "level": int(path.level),
        "values": [float(v) for v in path.values],
        "meta": meta,
    }


def path_from_dict(d: dict) -> SampledPath:
    try:
        q, level = int(d["q"]), int(d["level"])
        values = np.asarray(d["values"], dtype=np.float64)
        meta = dict(d.get("meta", {}))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed path document: {exc}") from exc
    offset = float(meta.pop("offset", 0.0))
    generator = meta.pop("grid_generator", "q-adic")
    if generator == "q-adic":
        grid = qadic_grid(q, level)
    else:
        pts = np.asarray(meta.pop("grid_points"), dtype=np.float64)
        grid = PartitionGrid(q=q, level=level, points=pts, generator=generator)
    return SampledPath(grid=grid, values=values, offset=offset, meta=meta)


# ---------------------------------------------------------------------------
# CoefficientArray <-> JSON
# ---------------------------------------------------------------------------


def coeffs_to_dict(coeffs: CoefficientArray) -> dict:
    return {
        "q": int(coeffs.q),
        "boundary": [float(coeffs.boundary[0]), float(coeffs.boundary[1])],
        "levels": [np.asarray(lv).tolist() for lv in coeffs.levels],
    }


def coeffs_from_dict(d: dict) -> CoefficientArray:
    try:
        q = int(d["q"])
        boundary = (float(d["boundary"][0]), float(d["boundary"][1]))
        levels = tuple(np.asarray(lv, dtype=np.float64) for lv in d["levels"])
    except (KeyError, TypeError, IndexError) as exc:
        raise ValidationError(f"malformed coefficient document: {exc}") from exc
    return CoefficientArray(q=q, boundary=boundary, levels=levels)


# ---------------------------------------------------------------------------
# RefiningTable <-> JSON
# ---------------------------------------------------------------------------


def table_to_dict(table: RefiningTable) -> dict:
    return {
        "q": int(table.q),
        "levels": [[float(v) for v in g.points] for g in table.levels],
    }


def table_from_dict(d: dict) -> RefiningTable:
    try:
        q = int(d["q"])
        raw_levels = d["levels"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed table document: {exc}") from exc
    grids = []
    for n, pts in enumerate(raw_levels):
        arr = np.asarray(pts, dtype=np.float64)
        generator = "q-adic" if np.array_equal(arr, qadic_grid(q, n).points) else "table"
        grids.append(PartitionGrid(q=q, level=n, points=arr, generator=generator))
    return RefiningTable(q=q, levels=tuple(grids))


# ---------------------------------------------------------------------------
# Spec and constant reports
# ---------------------------------------------------------------------------


def spec_to_dict(spec: UniformMagnitudeSpec) -> dict:
    return spec.to_config()


def spec_from_dict(d: dict) -> UniformMagnitudeSpec:
    try:
        signs = d.get("signs", "plus")
        if isinstance(signs, dict):
            signs = int(signs["seed"])
        elif isinstance(signs, list):
            signs = tuple(tuple(row) for row in signs)
        c_rule = d.get("c_rule", "default")
        if isinstance(c_rule, list):
            c_rule = tuple(c_rule)
        a = d.get("a")
        return UniformMagnitudeSpec(
            q=int(d.get("q", 2)),
            p=float(d.get("p", 2.0)),
            levels=int(d.get("levels", 16)),
            c_rule=c_rule,
            signs=signs,
            a=None if a is None else tuple(a),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed spec document: {exc}") from exc


def constant_to_dict(report: VariationConstant) -> dict:
    out = {
        "value": float(report.value),
        "method": report.method,
        "error_bound": float(report.error_bound),
    }
    if report.stderr is not None:
        out["stderr"] = float(report.stderr)
    if report.details:
        out["details"] = report.details
    return out


# ---------------------------------------------------------------------------
# CSV writers
# ---------------------------------------------------------------------------


def write_profiles_csv(profiles, stream: IO[str]) -> None:
    """Rows "level,t,value" across one or more profiles."""
    stream.write("level,t,value\n")
    for prof in profiles:
        for t, v in zip(prof.eval_points, prof.values):
            stream.write(f"{prof.level},{fmt_float(t)},{fmt_float(v)}\n")


def write_grid_csv(grid: PartitionGrid, stream: IO[str]) -> None:
    """One grid point per line."""
    for t in grid.points:
        stream.write(fmt_float(t) + "\n")


def write_residual_csv(eval_points, residuals, stream: IO[str]) -> None:
    stream.write("t,residual\n")
    for t, r in zip(eval_points, residuals):
        stream.write(f"{fmt_float(t)},{fmt_float(r)}\n")


def norm_report_dict(selector_label: str, value: float) -> dict:
    return {"selector": selector_label, "value": float(value)}
