"""Command-line harness: validate, simulate, sweep, plot, firecheck.

Exit codes: 0 success; 1 constraint violations or failing components;
2 unreadable or malformed input file; 3 solver failure; 4 sweep cell cap
exceeded; 5 plot schema mismatch or empty input.

Scenario files reference a gripper config by path or inline; relative
paths resolve against the current directory, then $JAMCORD_CONFIG_DIR,
then the bundled data directory.  All emitted bytes are deterministic
for fixed inputs.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import itertools
import json
import os
import sys

from .beads import BeadSpec, validate_bead_spec
from .errors import InputError, SchemaError, SolveError
from .gripper import DATA_DIR, GripperConfig
from .grasp import ObjectShape, Protocol, run_protocol
from .thermal import check_fire_exposure, load_bom, load_catalog
from .trace import read_trace_csv

SWEEP_CELL_CAP = 10_000


def resolve_input(path: str) -> str:
    if os.path.isabs(path) and os.path.exists(path):
        return path
    candidates = [path]
    env_dir = os.environ.get("JAMCORD_CONFIG_DIR")
    if env_dir:
        candidates.append(os.path.join(env_dir, path))
    candidates.append(os.path.join(DATA_DIR, path))
    for cand in candidates:
        if os.path.exists(cand):
            return cand
    raise FileNotFoundError(f"cannot find input file {path!r}")


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _say(args, *message):
    if not args.quiet:
        print(*message)


# -------------------------
# validate
# -------------------------

def cmd_validate(args) -> int:
    try:
        path = resolve_input(args.spec_file)
        data = _load_json(path)
    except (OSError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        if isinstance(data, dict) and "chain" in data:
            config = GripperConfig.from_json(data)
            spec = config.chain.bead
        else:
            spec = BeadSpec.from_json(data)
        report = validate_bead_spec(spec)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if report.valid:
        _say(args, "valid")
        return 0
    for v in report.violations:
        print(f"{v.constraint_id}: {v.message} "
              f"(measured={v.measured:g}, required={v.required:g})")
    return 1


# -------------------------
# simulate
# -------------------------

def _load_scenario(path: str) -> dict:
    data = _load_json(path)
    for key in ("id", "gripper", "object", "protocol"):
        if key not in data:
            raise InputError(f"scenario missing {key!r}")
    gripper = data["gripper"]
    if isinstance(gripper, str):
        gripper = _load_json(resolve_input(gripper))
    return {
        "id": str(data["id"]),
        "gripper": gripper,
        "object": data["object"],
        "protocol": data["protocol"],
    }


def _run_scenario(payload):
    """Worker for simulate/sweep cells; payload is plain JSON data."""
    config = GripperConfig.from_json(payload["gripper"])
    obj = ObjectShape.from_json(payload["object"])
    protocol = Protocol.from_json(payload["protocol"])
    trace, summary = run_protocol(config, obj, protocol, seed=payload.get("seed"))
    summary["id"] = payload["id"]
    return payload["id"], trace.to_csv_text(), summary


def _write_outputs(out_dir: str, cell_id: str, csv_text: str, summary: dict):
    os.makedirs(out_dir, exist_ok=True)
    trace_path = os.path.join(out_dir, f"{cell_id}_trace.csv")
    with open(trace_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text)
    summary_path = os.path.join(out_dir, f"{cell_id}_summary.json")
    with open(summary_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return trace_path, summary_path


def cmd_simulate(args) -> int:
    try:
        scenario = _load_scenario(resolve_input(args.scenario_file))
    except (OSError, FileNotFoundError, json.JSONDecodeError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    scenario["seed"] = args.seed
    out_dir = args.out or "."
    try:
        cell_id, csv_text, summary = _run_scenario(scenario)
    except SolveError as exc:
        os.makedirs(out_dir, exist_ok=True)
        diag = os.path.join(out_dir, f"{scenario['id']}_diagnostic.json")
        with open(diag, "w", encoding="utf-8", newline="") as fh:
            json.dump({"id": scenario["id"], "error": str(exc),
                       "worst_residual": exc.worst_residual}, fh, indent=2)
            fh.write("\n")
        print(f"solver failure: {exc}\ndiagnostic: {diag}", file=sys.stderr)
        return 3
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    trace_path, summary_path = _write_outputs(out_dir, cell_id, csv_text, summary)
    _say(args, f"trace: {trace_path}")
    _say(args, f"summary: {summary_path}")
    _say(args, f"max holding force: {summary['max_holding_force_N']:.6g} N")
    return 0


# -------------------------
# sweep
# -------------------------

def _set_path(data: dict, dotted: str, value):
    keys = dotted.split(".")
    node = data
    for k in keys[:-1]:
        if k not in node or not isinstance(node[k], dict):
            node[k] = {}
        node = node[k]
    node[keys[-1]] = value


def _cell_label(axis_values) -> str:
    parts = []
    for path, value in axis_values:
        leaf = path.split(".")[-1]
        parts.append(f"{leaf}={value:g}" if isinstance(value, float)
                     else f"{leaf}={value}")
    return "_".join(parts).replace(" ", "").replace("/", "-")


def cmd_sweep(args) -> int:
    try:
        sweep = _load_json(resolve_input(args.sweep_file))
        base = sweep.get("base")
        if isinstance(base, str):
            scenario = _load_scenario(resolve_input(base))
        elif isinstance(base, dict):
            if isinstance(base.get("gripper"), str):
                base = dict(base)
                base["gripper"] = _load_json(resolve_input(base["gripper"]))
            scenario = _load_scenario_dict(base)
        else:
            raise InputError("sweep requires a 'base' scenario")
        axes = sweep.get("axes") or []
        if not axes:
            raise InputError("sweep requires non-empty 'axes'")
        for ax in axes:
            if "path" not in ax or "values" not in ax or not ax["values"]:
                raise InputError("each axis needs 'path' and non-empty 'values'")
        parallelism = int(sweep.get("parallelism", 1))
    except (OSError, FileNotFoundError, json.JSONDecodeError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    n_cells = 1
    for ax in axes:
        n_cells *= len(ax["values"])
    cap = int(sweep.get("cell_cap", SWEEP_CELL_CAP))
    if n_cells > cap:
        print(f"refusing sweep: {n_cells} cells exceed cap {cap}", file=sys.stderr)
        return 4

    cells = []
    for combo in itertools.product(*(ax["values"] for ax in axes)):
        axis_values = list(zip((ax["path"] for ax in axes), combo))
        payload = json.loads(json.dumps(scenario))  # deep copy
        for path, value in axis_values:
            _set_path(payload, path, value)
        payload["id"] = f"{scenario['id']}_{_cell_label(axis_values)}"
        payload["seed"] = args.seed
        payload["_axes"] = axis_values
        cells.append(payload)

    out_dir = args.out or "."
    results = {}
    try:
        if parallelism > 1:
            with concurrent.futures.ProcessPoolExecutor(parallelism) as pool:
                for cell_id, csv_text, summary in pool.map(
                        _run_scenario, cells):
                    results[cell_id] = (csv_text, summary)
        else:
            for payload in cells:
                cell_id, csv_text, summary = _run_scenario(payload)
                results[cell_id] = (csv_text, summary)
    except SolveError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3

    axis_paths = [ax["path"] for ax in axes]
    lines = ["id," + ",".join(axis_paths) + ",max_holding_force_N,escaped"]
    for payload in sorted(cells, key=lambda c: c["id"]):
        cell_id = payload["id"]
        csv_text, summary = results[cell_id]
        _write_outputs(out_dir, cell_id, csv_text, summary)
        values = []
        for _, value in payload["_axes"]:
            values.append(f"{value:.6g}" if isinstance(value, (int, float))
                          else str(value))
        lines.append(
            f"{cell_id},{','.join(values)},"
            f"{summary['max_holding_force_N']:.6g},"
            f"{str(summary['escaped']).lower()}")
    os.makedirs(out_dir, exist_ok=True)
    agg_path = os.path.join(out_dir, "aggregate.csv")
    with open(agg_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    _say(args, f"{len(cells)} cells -> {agg_path}")
    return 0


def _load_scenario_dict(data: dict) -> dict:
    for key in ("id", "gripper", "object", "protocol"):
        if key not in data:
            raise InputError(f"scenario missing {key!r}")
    return {
        "id": str(data["id"]),
        "gripper": data["gripper"],
        "object": data["object"],
        "protocol": data["protocol"],
    }


# -------------------------
# plot
# -------------------------

def cmd_plot(args) -> int:
    if not args.trace_files:
        print("error: no trace files given", file=sys.stderr)
        return 5
    traces = []
    for path in args.trace_files:
        try:
            resolved = resolve_input(path)
            trace = read_trace_csv(resolved)
        except (SchemaError, FileNotFoundError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 5
        label = os.path.basename(path)
        for suffix in ("_trace.csv", ".csv"):
            if label.endswith(suffix):
                label = label[:-len(suffix)]
                break
        traces.append((label, trace))
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    svg_path = os.path.join(out_dir, args.name)
    from .plotting import render_traces_svg
    try:
        render_traces_svg(traces, svg_path)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    _say(args, f"plot: {svg_path}")
    return 0


# -------------------------
# firecheck
# -------------------------

def cmd_firecheck(args) -> int:
    try:
        catalog = (load_catalog(resolve_input(args.catalog))
                   if args.catalog else load_catalog())
        bom = load_bom(resolve_input(args.bom_file), catalog)
    except (InputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    findings = check_fire_exposure(bom, args.temp)
    if not findings:
        _say(args, f"all components withstand {args.temp:g} C")
        return 0
    for f in findings:
        print(f"FAIL {f.component}: {f.material} rated "
              f"{f.max_service_temp:g} C, deficit {f.margin_deficit:g} C")
    return 1


# -------------------------
# entry point
# -------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jamcord",
        description="Bead-chain jamming gripper simulator and experiment harness")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for the trial-noise hook")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress informational output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a bead spec against its constraints")
    p.add_argument("spec_file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="run one press/jam/lift scenario")
    p.add_argument("scenario_file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run a cartesian parameter sweep")
    p.add_argument("sweep_file")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="overlay trace CSVs into an SVG figure")
    p.add_argument("trace_files", nargs="*")
    p.add_argument("--name", default="traces.svg", help="output file name")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("firecheck", help="screen a BOM against a temperature")
    p.add_argument("bom_file")
    p.add_argument("temp", type=float)
    p.add_argument("--catalog", default=None, help="material catalog file")
    p.set_defaults(func=cmd_firecheck)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
