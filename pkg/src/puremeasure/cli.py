"""Batch front door: JSON config in, JSON report plus CSV delta-profiles out.

The CLI is a thin orchestrator; every task maps one-to-one onto a library
operation.  Reports echo the fully resolved configuration, so a report is a
reproducible record: identical configs (including the seed) give
byte-identical CSV outputs.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import fa_lattice
from .density_engine import (
    DEFAULT_TOL,
    DeltaSchedule,
    ProbeResult,
    action_profile,
    aura_report,
    cone_density,
    density_probe,
    sharp_integral,
    sigma_probe,
)
from .expressions import Expression, ExpressionError, parse_expression
from .geometry import (
    Feature,
    PointFeature,
    Region,
    RegionBoundary,
    feature_from_json,
    region_from_json,
)
from .quadrature import SampleSpec
from .surface_rep import SurfaceFixture, collar_average, gauss_check, surface_reference
from .trace_gradient import ScalarField, boundary_trace, calculus_rule_check, density_gradient

SCHEMA = "pure-measure/1"
DEFAULT_SAMPLES = 200_000


class ConfigError(ValueError):
    def __init__(self, message: str, pointer: str = "/"):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer


class ParseError(ConfigError):
    pass


class UnknownName(ConfigError):
    pass


class BadSchedule(ConfigError):
    pass


TASK_KINDS = (
    "density_ratio",
    "sharp_integral",
    "action_interval",
    "cone_density",
    "sigma_probe",
    "aura_report",
    "boundary_trace",
    "density_gradient",
    "calculus_rule_check",
    "collar_average",
    "gauss_check",
    "fa_lattice",
)


@dataclass
class Config:
    seed: int
    samples: int
    tol: float
    schedule: dict
    regions: dict[str, Region]
    features: dict[str, Feature]
    integrands: dict[str, Expression]
    tasks: list[dict]
    resolved: dict  # echoed verbatim into the report


def _require(condition: bool, exc: type[ConfigError], message: str, pointer: str):
    if not condition:
        raise exc(message, pointer)


def _check_schedule(node: dict, pointer: str) -> dict:
    out = {"delta0": None, "ratio": 0.5, "count": 12}
    out.update(node or {})
    if out["delta0"] is not None:
        _require(float(out["delta0"]) > 0, BadSchedule, "delta0 must be positive", pointer + "/delta0")
        out["delta0"] = float(out["delta0"])
    _require(0 < float(out["ratio"]) < 1, BadSchedule, "ratio must lie in (0, 1)", pointer + "/ratio")
    _require(int(out["count"]) >= 3, BadSchedule, "count must be at least 3", pointer + "/count")
    out["ratio"] = float(out["ratio"])
    out["count"] = int(out["count"])
    return out


def parse_config(text: str) -> Config:
    """Validate a JSON config; the first problem is reported with its location."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}", "/") from None
    if not isinstance(raw, dict):
        raise ParseError("config must be a JSON object", "/")
    version = raw.get("version", SCHEMA)
    _require(version == SCHEMA, ParseError, f"unrecognized version {version!r}", "/version")

    seed = int(raw.get("seed", 0))
    samples = int(raw.get("samples", DEFAULT_SAMPLES))
    _require(samples >= 2, ParseError, "samples must be at least 2", "/samples")
    tol = float(raw.get("tol", DEFAULT_TOL))
    schedule = _check_schedule(raw.get("schedule", {}), "/schedule")

    regions: dict[str, Region] = {}
    for name, node in dict(raw.get("regions", {})).items():
        try:
            regions[name] = region_from_json(node)
        except (ValueError, KeyError, TypeError) as e:
            raise ParseError(f"bad region: {e}", f"/regions/{name}") from None

    features: dict[str, Feature] = {}
    for name, node in dict(raw.get("features", {})).items():
        try:
            features[name] = feature_from_json(node)
        except (ValueError, KeyError, TypeError) as e:
            raise ParseError(f"bad feature: {e}", f"/features/{name}") from None

    integrands: dict[str, Expression] = {}
    for name, node in dict(raw.get("integrands", {})).items():
        try:
            integrands[name] = parse_expression(node)
        except ExpressionError as e:
            raise ParseError(f"bad expression: {e}", f"/integrands/{name}") from None

    tasks = list(raw.get("tasks", []))
    _require(bool(tasks), ParseError, "config defines no tasks", "/tasks")
    seen_names = set()
    for i, task in enumerate(tasks):
        ptr = f"/tasks/{i}"
        _require(isinstance(task, dict), ParseError, "task must be an object", ptr)
        kind = task.get("task")
        _require(kind in TASK_KINDS, ParseError, f"unknown task kind {kind!r}", ptr + "/task")
        task.setdefault("name", f"task{i}")
        _require(task["name"] not in seen_names, ParseError, f"duplicate task name {task['name']!r}", ptr + "/name")
        seen_names.add(task["name"])
        if "schedule" in task:
            task["schedule"] = _check_schedule(task["schedule"], ptr + "/schedule")
        _validate_references(task, regions, features, integrands, ptr)

    resolved = {
        "version": SCHEMA,
        "seed": seed,
        "samples": samples,
        "tol": tol,
        "schedule": schedule,
        "regions": raw.get("regions", {}),
        "features": raw.get("features", {}),
        "integrands": raw.get("integrands", {}),
        "tasks": tasks,
    }
    return Config(seed, samples, tol, schedule, regions, features, integrands, tasks, resolved)


_REFERENCE_FIELDS = {
    "density_ratio": {"regions": ["region", "omega"], "features": ["feature"], "integrands": []},
    "sharp_integral": {"regions": ["omega"], "features": ["feature"], "integrands": ["integrand"]},
    "action_interval": {"regions": ["omega"], "features": ["feature"], "integrands": ["integrand"]},
    "cone_density": {"regions": ["omega"], "features": [], "integrands": []},
    "sigma_probe": {"regions": ["omega", "union"], "features": ["feature"], "integrands": []},
    "aura_report": {"regions": ["omega"], "features": ["feature"], "integrands": []},
    "boundary_trace": {"regions": ["omega"], "features": [], "integrands": ["integrand"]},
    "density_gradient": {"regions": ["omega"], "features": [], "integrands": []},
    "calculus_rule_check": {"regions": ["omega"], "features": [], "integrands": []},
    "collar_average": {"regions": ["surface"], "features": [], "integrands": ["integrand"]},
    "gauss_check": {"regions": ["surface"], "features": [], "integrands": []},
    "fa_lattice": {"regions": [], "features": [], "integrands": []},
}


def _validate_references(task: dict, regions, features, integrands, ptr: str) -> None:
    kind = task["task"]
    spec = _REFERENCE_FIELDS[kind]
    for field in spec["regions"]:
        if field in task:
            _require(task[field] in regions, UnknownName, f"undefined region {task[field]!r}", f"{ptr}/{field}")
        else:
            _require(False, ParseError, f"task needs field {field!r}", ptr)
    for field in spec["features"]:
        _require(field in task, ParseError, f"task needs field {field!r}", ptr)
        _require(task[field] in features, UnknownName, f"undefined feature {task[field]!r}", f"{ptr}/{field}")
    for field in spec["integrands"]:
        _require(field in task, ParseError, f"task needs field {field!r}", ptr)
        _require(task[field] in integrands, UnknownName, f"undefined integrand {task[field]!r}", f"{ptr}/{field}")
    # optional or structured references
    if "weight" in task:
        _require(task["weight"] in integrands, UnknownName, f"undefined integrand {task['weight']!r}", f"{ptr}/weight")
    if kind == "sigma_probe":
        for j, member in enumerate(task.get("members", [])):
            _require(member in regions, UnknownName, f"undefined region {member!r}", f"{ptr}/members/{j}")
    if kind == "density_gradient":
        for j, g in enumerate(task.get("gradient", [])):
            _require(g in integrands, UnknownName, f"undefined integrand {g!r}", f"{ptr}/gradient/{j}")
        if "integrand" in task:
            _require(task["integrand"] in integrands, UnknownName,
                     f"undefined integrand {task['integrand']!r}", f"{ptr}/integrand")
    if kind == "calculus_rule_check":
        for side in ("f1", "f2"):
            body = task.get(side, {})
            _require(isinstance(body, dict) and "f" in body, ParseError, f"task needs {side}.f", f"{ptr}/{side}")
            _require(body["f"] in integrands, UnknownName, f"undefined integrand {body['f']!r}", f"{ptr}/{side}/f")
            for j, g in enumerate(body.get("grad", [])):
                _require(g in integrands, UnknownName, f"undefined integrand {g!r}", f"{ptr}/{side}/grad/{j}")
    if kind == "gauss_check":
        for j, g in enumerate(task.get("phi", [])):
            _require(g in integrands, UnknownName, f"undefined integrand {g!r}", f"{ptr}/phi/{j}")
        if "div" in task:
            _require(task["div"] in integrands, UnknownName, f"undefined integrand {task['div']!r}", f"{ptr}/div")


# -------------------------------------------------------------- serialization

def _jsonable(value: Any) -> Any:
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: _jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Fraction):
        return [value.numerator, value.denominator]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.floating, float)):
        v = float(value)
        if np.isnan(v):
            return "nan"
        if np.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(value, (np.integer, int)):
        return int(value)
    return value


def _format_float(x: float) -> str:
    return repr(float(x))


def _write_series_csv(path: Path, rows) -> None:
    lines = ["delta,value,stderr,hits"]
    for delta, value, stderr, hits in rows:
        lines.append(f"{_format_float(delta)},{_format_float(value)},{_format_float(stderr)},{int(hits)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _probe_rows(result: ProbeResult):
    return [(l.delta, l.value, l.stderr, l.hits) for l in result.series]


# ------------------------------------------------------------------ handlers

def _schedule_for(config: Config, task: dict, feature: Feature, omega: Region) -> DeltaSchedule:
    node = task.get("schedule", config.schedule)
    if node["delta0"] is None:
        auto = DeltaSchedule.auto(feature, omega, node["ratio"], node["count"])
        return auto
    return DeltaSchedule(node["delta0"], node["ratio"], node["count"])


def _spec_for(config: Config, task: dict) -> SampleSpec:
    return SampleSpec(int(task.get("samples", config.samples)), config.seed)


def _tol_for(config: Config, task: dict) -> float:
    return float(task.get("tol", config.tol))


def _weight_for(config: Config, task: dict):
    return config.integrands[task["weight"]] if "weight" in task else None


def _gradient_field(config: Config, task: dict, side: dict | None = None) -> ScalarField:
    if side is None:
        body, f_key, grad_key = task, "integrand", "gradient"
    else:
        body, f_key, grad_key = side, "f", "grad"
    f = config.integrands[body[f_key]] if f_key in body else None
    grad = None
    if body.get(grad_key):
        exprs = [config.integrands[g] for g in body[grad_key]]
        grad = lambda pts: np.column_stack([e(pts) for e in exprs])
    return ScalarField(f=f, grad=grad)


def _run_density_ratio(config: Config, task: dict, out_dir: Path):
    omega = config.regions[task["omega"]]
    feature = config.features[task["feature"]]
    result = density_probe(
        config.regions[task["region"]], feature, omega,
        _schedule_for(config, task, feature, omega), _spec_for(config, task),
        weight=_weight_for(config, task), tol=_tol_for(config, task),
    )
    csv = f"{task['name']}.csv"
    _write_series_csv(out_dir / csv, _probe_rows(result))
    return _jsonable(result), [csv], result.unintegrable


def _run_sharp_integral(config: Config, task: dict, out_dir: Path):
    omega = config.regions[task["omega"]]
    feature = config.features[task["feature"]]
    result = sharp_integral(
        config.integrands[task["integrand"]], feature, omega,
        _schedule_for(config, task, feature, omega), _spec_for(config, task),
        weight=_weight_for(config, task), tol=_tol_for(config, task),
    )
    csv = f"{task['name']}.csv"
    _write_series_csv(out_dir / csv, _probe_rows(result))
    return _jsonable(result), [csv], result.unintegrable


def _run_action_interval(config: Config, task: dict, out_dir: Path):
    omega = config.regions[task["omega"]]
    feature = config.features[task["feature"]]
    profile = action_profile(
        config.integrands[task["integrand"]], feature, omega,
        _schedule_for(config, task, feature, omega), _spec_for(config, task),
        tol=_tol_for(config, task),
    )
    return _jsonable(profile), [], False


def _run_cone_density(config: Config, task: dict, out_dir: Path):
    omega = config.regions[task["omega"]]
    x = tuple(float(c) for c in task["x"])
    feature = PointFeature(x)
    result = cone_density(
        x, tuple(float(c) for c in task["v"]), float(task["alpha"]), omega,
        _schedule_for(config, task, feature, omega), _spec_for(config, task),
        tol=_tol_for(config, task),
    )
    csv = f"{task['name']}.csv"
    _write_series_csv(out_dir / csv, _probe_rows(result))
    return _jsonable(result), [csv], False


def _run_sigma_probe(config: Config, task: dict, out_dir: Path):
    omega = config.regions[task["omega"]]
    feature = config.features[task["feature"]]
    report = sigma_probe(
        [config.regions[m] for m in task.get("members", [])],
        config.regions[task["union"]], feature, omega,
        _schedule_for(config, task, feature, omega), _spec_for(config, task),
        tol=_tol_for(config, task),
    )
    csvs = []
    for k, member in enumerate(report.members, start=1):
        csv = f"{task['name']}_member{k}.csv"
        _write_series_csv(out_dir / csv, _probe_rows(member))
        csvs.append(csv)
    union_csv = f"{task['name']}_union.csv"
    _write_series_csv(out_dir / union_csv, _probe_rows(report.union))
    csvs.append(union_csv)
    return _jsonable(report), csvs, False


def _run_aura_report(config: Config, task: dict, out_dir: Path):
    omega = config.regions[task["omega"]]
    feature = config.features[task["feature"]]
    report = aura_report(
        feature, omega, _schedule_for(config, task, feature, omega), _spec_for(config, task)
    )
    csv = f"{task['name']}.csv"
    _write_series_csv(
        out_dir / csv,
        [(l.delta, l.volume, l.volume_stderr, l.hits) for l in report.levels],
    )
    return _jsonable(report), [csv], False


def _run_boundary_trace(config: Config, task: dict, out_dir: Path):
    omega = config.regions[task["omega"]]
    x = tuple(float(c) for c in task["x"])
    feature = PointFeature(x)
    result = boundary_trace(
        config.integrands[task["integrand"]], omega, x,
        _schedule_for(config, task, feature, omega), _spec_for(config, task),
        tol=_tol_for(config, task),
    )
    csv = f"{task['name']}.csv"
    _write_series_csv(out_dir / csv, _probe_rows(result))
    return _jsonable(result), [csv], result.unintegrable


def _run_density_gradient(config: Config, task: dict, out_dir: Path):
    omega = config.regions[task["omega"]]
    x = tuple(float(c) for c in task["x"])
    field = _gradient_field(config, task)
    tol = _tol_for(config, task)
    report = density_gradient(
        omega, x, _schedule_for(config, task, PointFeature(x), omega), _spec_for(config, task),
        field=field, tol=tol,
    )
    payload = _jsonable(report)
    payload["verdicts"] = [
        "unbounded" if (p.unbounded_lo or p.unbounded_hi)
        else ("point" if p.interval.width <= tol else "interval")
        for p in report.profiles
    ]
    return payload, [], False


def _run_calculus_rule_check(config: Config, task: dict, out_dir: Path):
    omega = config.regions[task["omega"]]
    x = tuple(float(c) for c in task["x"])
    report = calculus_rule_check(
        task.get("rule", "sum"),
        _gradient_field(config, task, task["f1"]),
        _gradient_field(config, task, task["f2"]),
        x, omega, _schedule_for(config, task, PointFeature(x), omega), _spec_for(config, task),
        tol=_tol_for(config, task),
    )
    return _jsonable(report), [], False


def _run_collar_average(config: Config, task: dict, out_dir: Path):
    fixture = SurfaceFixture(config.regions[task["surface"]], int(task.get("nodes", 2048)))
    boundary = RegionBoundary(fixture.region)
    result = collar_average(
        config.integrands[task["integrand"]], fixture,
        _schedule_for(config, task, boundary, fixture.region), _spec_for(config, task),
        tol=_tol_for(config, task),
    )
    csv = f"{task['name']}.csv"
    _write_series_csv(out_dir / csv, _probe_rows(result))
    payload = _jsonable(result)
    payload["surface_reference"] = _jsonable(
        surface_reference(config.integrands[task["integrand"]], fixture)
    )
    return payload, [csv], result.unintegrable


def _run_gauss_check(config: Config, task: dict, out_dir: Path):
    fixture = SurfaceFixture(config.regions[task["surface"]], int(task.get("nodes", 2048)))
    exprs = [config.integrands[g] for g in task["phi"]]
    phi = lambda pts: np.column_stack([e(pts) for e in exprs])
    div = config.integrands[task["div"]] if "div" in task else None
    report = gauss_check(phi, fixture, _spec_for(config, task), div=div)
    return _jsonable(report), [], False


def _run_fa_lattice(config: Config, task: dict, out_dir: Path):
    mu = fa_lattice.measure_from_json(task["measure"])
    ground = mu.algebra.ground
    full = ground.full
    pos, neg = fa_lattice.jordan_decompose(mu)
    sigma_part, pure = fa_lattice.sigma_additive_part(mu)
    payload = {
        "total": _jsonable(fa_lattice.evaluate(mu, full)),
        "total_variation": _jsonable(fa_lattice.total_variation(mu, full)),
        "jordan": {
            "positive": fa_lattice.measure_to_json(pos),
            "negative": fa_lattice.measure_to_json(neg),
            "orthogonal": fa_lattice.lattice_meet(pos, neg, full) == 0,
        },
        "pure_part_zero": pure.is_zero,
    }
    if "band" in task:
        band = ground.subset(task["band"])
        inside, outside = fa_lattice.band_decompose(mu, band)
        payload["band"] = {
            "inside": fa_lattice.measure_to_json(inside),
            "outside": fa_lattice.measure_to_json(outside),
        }
    return payload, [], False


_HANDLERS: dict[str, Callable] = {
    "density_ratio": _run_density_ratio,
    "sharp_integral": _run_sharp_integral,
    "action_interval": _run_action_interval,
    "cone_density": _run_cone_density,
    "sigma_probe": _run_sigma_probe,
    "aura_report": _run_aura_report,
    "boundary_trace": _run_boundary_trace,
    "density_gradient": _run_density_gradient,
    "calculus_rule_check": _run_calculus_rule_check,
    "collar_average": _run_collar_average,
    "gauss_check": _run_gauss_check,
    "fa_lattice": _run_fa_lattice,
}


def run(config: Config, out_dir: str | Path, only: str | None = None) -> int:
    """Run all tasks (or the one named by `only`); 0 if every task succeeded."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    failed = False
    for task in config.tasks:
        if only is not None and task["name"] != only:
            continue
        entry = {"name": task["name"], "task": task["task"]}
        try:
            payload, csvs, unintegrable = _HANDLERS[task["task"]](config, task, out)
            entry["result"] = payload
            entry["csv"] = csvs
            if unintegrable:
                entry["status"] = "error"
                entry["error"] = {"type": "Unintegrable", "message": "integrand essentially unbounded near the feature"}
                failed = True
            else:
                entry["status"] = "ok"
        except Exception as e:  # per-task isolation: one failure never stops the batch
            entry["status"] = "error"
            entry["error"] = {"type": type(e).__name__, "message": str(e)}
            failed = True
        entries.append(entry)
    report = {"schema": SCHEMA, "config": config.resolved, "tasks": entries}
    (out / "report.json").write_text(
        json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return 2 if failed else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pure-measure",
        description="Run density-measure probes described by a JSON config.",
    )
    parser.add_argument("--config", required=True, help="path to the JSON config")
    parser.add_argument("--out", required=True, help="output directory for report.json and CSVs")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--samples", type=int, default=None, help="override samples per delta level")
    parser.add_argument("--task", default=None, help="run only the task with this name")
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as e:
        print(f"cannot read config: {e}", file=sys.stderr)
        return 1
    try:
        config = parse_config(text)
    except ConfigError as e:
        print(f"config error at {e}", file=sys.stderr)
        return 1
    if args.seed is not None:
        config.seed = int(args.seed)
        config.resolved["seed"] = config.seed
    if args.samples is not None:
        config.samples = int(args.samples)
        config.resolved["samples"] = config.samples
    if args.task is not None and all(t["name"] != args.task for t in config.tasks):
        print(f"no task named {args.task!r}", file=sys.stderr)
        return 1
    return run(config, args.out, only=args.task)


if __name__ == "__main__":
    raise SystemExit(main())
