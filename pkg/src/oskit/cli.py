"""``rp`` command line: run one scenario file or the built-in battery.

Exit codes: 0 all checks pass, 1 some check fails or errors, 2 input error.
"""

import argparse
import datetime
import json
import math
import pathlib
import sys
import time

import jsonschema
import numpy as np

from . import _accel
from .errors import OskitError
from .scenarios import MODULES, REGISTRY, battery

SCHEMA_VERSION = "oskit-report/1"
INPUT_ERRORS = ("PARSE_ERROR", "SCHEMA_ERROR")

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["name", "module", "payload"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "module": {"enum": list(MODULES)},
        "payload": {
            "type": "object",
            "required": ["check"],
            "properties": {
                "check": {"enum": sorted(REGISTRY)},
                "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
                "expect_not_psd": {"type": "boolean"},
                "expect_error": {"type": "string"},
            },
        },
        "tolerances": {"type": "object", "additionalProperties": {"type": "number"}},
    },
}


def _number(x):
    """JSON-safe float rounded to 12 significant digits."""
    x = float(x)
    if not math.isfinite(x):
        return str(x)
    return float(f"{x:.12g}")


def validate_scenario(obj):
    try:
        jsonschema.validate(obj, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise OskitError("SCHEMA_ERROR", exc.message) from None
    check = REGISTRY[obj["payload"]["check"]]
    if check.module != obj["module"]:
        raise OskitError("SCHEMA_ERROR", f"check {obj['payload']['check']!r} belongs to module {check.module!r}")
    try:
        jsonschema.validate(obj["payload"], check.schema)
    except jsonschema.ValidationError as exc:
        raise OskitError("SCHEMA_ERROR", exc.message) from None
    unknown = set(obj.get("tolerances", {})) - set(check.defaults)
    if unknown:
        raise OskitError("SCHEMA_ERROR", f"unknown tolerance keys {sorted(unknown)}")
    return check


def run_scenario(obj, seed=None, timestamps=True):
    """Validated scenario object -> (report dict, dumps)."""
    check = validate_scenario(obj)
    payload = obj["payload"]
    tol = {**check.defaults, **obj.get("tolerances", {})}
    effective_seed = seed if seed is not None and check.stochastic else payload.get("seed", 0)
    report = {"name": obj["name"], "module": obj["module"], "check": payload["check"]}
    if "seed" in payload or check.stochastic:
        report["seed"] = effective_seed
    start = time.perf_counter()
    dumps = {}
    try:
        result = check.func(payload, tol, effective_seed)
    except OskitError as exc:
        if exc.code in INPUT_ERRORS:
            raise
        expected = payload.get("expect_error")
        report["verdict"] = "PASS" if expected == exc.code else "ERROR"
        report["error"] = {"code": exc.code, "message": exc.message}
        report["residuals"] = {}
        report["provenance"] = []
    else:
        if "expect_error" in payload:
            report["verdict"] = "FAIL"
            report["error"] = {"code": "EXPECTED_ERROR_MISSING", "message": payload["expect_error"]}
        else:
            report["verdict"] = "PASS" if all(r.passed for r in result.residuals) else "FAIL"
        report["residuals"] = {
            r.name: {"value": _number(r.value), "relation": r.relation, "tolerance": _number(r.tolerance), "pass": r.passed}
            for r in result.residuals
        }
        report["provenance"] = result.provenance
        dumps = result.dumps
    report["tolerances"] = {k: _number(v) for k, v in sorted(tol.items())}
    if timestamps:
        report["wall_time"] = round(time.perf_counter() - start, 4)
    return report, dumps


def envelope(scenarios, timestamps=True):
    out = {"schema": SCHEMA_VERSION, "backend": _accel.BACKEND}
    if timestamps:
        out["generated"] = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    counts = {v: sum(s["verdict"] == v for s in scenarios) for v in ("PASS", "FAIL", "ERROR")}
    out["summary"] = {"total": len(scenarios), **counts}
    out["scenarios"] = scenarios
    return out


def serialize(report):
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def write_dumps(directory, name, dumps):
    directory = pathlib.Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for key, arr in sorted(dumps.items()):
        arr = np.atleast_1d(np.asarray(arr))
        if np.iscomplexobj(arr):
            arr = np.column_stack([arr.real.reshape(len(arr), -1), arr.imag.reshape(len(arr), -1)])
        np.savetxt(directory / f"{name}_{key}.csv", arr, delimiter=",", fmt="%.17g")


def load_scenario(path):
    try:
        text = pathlib.Path(path).read_text()
    except OSError as exc:
        raise OskitError("PARSE_ERROR", f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise OskitError("PARSE_ERROR", f"{path}: {exc}") from None


def run_battery(scenarios, seed=None, timestamps=True, dump_dir=None):
    reports = []
    for obj in scenarios:
        report, dumps = run_scenario(obj, seed, timestamps)
        reports.append(report)
        if dump_dir is not None and dumps:
            write_dumps(dump_dir, obj["name"], dumps)
    return reports


def determinism_report(scenarios, seed, first):
    """Rerun the battery and compare the timestamp-free serializations."""
    second = run_battery(scenarios, seed, timestamps=False)
    strip = lambda reps: [{k: v for k, v in r.items() if k != "wall_time"} for r in reps]
    a, b = serialize(strip(first)), serialize(strip(second))
    mismatched = sum(x != y for x, y in zip(strip(first), strip(second)))
    ok = a == b
    return {
        "name": "c14_determinism",
        "module": "cli",
        "check": "rerun",
        "verdict": "PASS" if ok else "FAIL",
        "residuals": {"mismatched_reports": {"value": float(mismatched), "relation": "<=", "tolerance": 0.0, "pass": ok}},
        "provenance": ["oskit.cli.run_battery"],
        "tolerances": {},
    }


def _emit_error(exc):
    sys.stdout.write(serialize({"schema": SCHEMA_VERSION, "error": {"code": exc.code, "message": exc.message}}))
    return 2


def cmd_run(args):
    try:
        obj = load_scenario(args.file)
        report, dumps = run_scenario(obj, args.seed, not args.no_timestamps)
    except OskitError as exc:
        return _emit_error(exc)
    if args.dump_dir and dumps:
        write_dumps(args.dump_dir, obj["name"], dumps)
    sys.stdout.write(serialize(envelope([report], not args.no_timestamps)))
    return 0 if report["verdict"] == "PASS" else 1


def cmd_suite(args):
    scenarios = battery()
    if args.filter:
        scenarios = [s for s in scenarios if s["module"] == args.filter]
    timestamps = not args.no_timestamps
    try:
        reports = run_battery(scenarios, args.seed, timestamps, args.dump_dir)
        if args.filter in (None, "cli"):
            reports.append(determinism_report(battery(), args.seed, reports if not args.filter else run_battery(battery(), args.seed, False)))
    except OskitError as exc:
        return _emit_error(exc)
    out = envelope(reports, timestamps)
    sys.stdout.write(serialize(out))
    return 0 if out["summary"]["PASS"] == out["summary"]["total"] else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="rp", description="Reflection positivity checks.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one scenario file")
    run.add_argument("file")
    suite = sub.add_parser("suite", help="run the built-in acceptance battery")
    suite.add_argument("--filter", choices=list(MODULES) + ["cli"], help="only scenarios of this module")
    for p in (run, suite):
        p.add_argument("--seed", type=int, help="override the seed of Monte-Carlo scenarios")
        p.add_argument("--dump-dir", help="write CSV dumps of eigenvalues and coefficients here")
        p.add_argument("--no-timestamps", action="store_true", help="omit wall times and generation time")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return cmd_run(args) if args.command == "run" else cmd_suite(args)


if __name__ == "__main__":
    sys.exit(main())
