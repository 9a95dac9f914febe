"""Command-line entry point: headless runs, comparisons, and the live bridge.

Exit codes: 0 success, 2 validation, 3 safety violation, 4 I/O.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys

from . import engine as engine_mod
from . import metrics as metrics_mod
from .bridge import BridgeServer
from .errors import (
    RampMergeError,
    RosterMismatch,
    ScenarioParseError,
    ScenarioValidationError,
)
from .scenario import MODES, Scenario, apply_overrides, load_scenario

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SAFETY = 3
EXIT_IO = 4

OUT_DIR_ENV = "RAMPMERGE_OUT"


def _build_scenario(args) -> Scenario:
    if args.scenario:
        try:
            with open(args.scenario, encoding="utf-8") as fh:
                document = json.load(fh)
        except OSError as exc:
            raise ScenarioParseError(f"{args.scenario}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ScenarioParseError(f"{args.scenario}: {exc}") from exc
        if not isinstance(document, dict):
            raise ScenarioParseError(f"{args.scenario}: top level must be an object")
    else:
        document = {}
    if args.mode:
        document["mode"] = args.mode
    if args.seed is not None:
        document["seed"] = args.seed
    document = apply_overrides(document, args.override or [])
    return load_scenario(document)


def _grade_for(result: engine_mod.RunResult, vehicle_id: str) -> float:
    rows = [r for r in result.rows if r.vehicle_id == vehicle_id]
    if not rows:
        return 0.0
    path = next((p for p in result.paths if p.path_id == rows[0].path_id), None)
    return path.grade if path else 0.0


def compute_metrics(result: engine_mod.RunResult) -> dict:
    """Per-vehicle metrics over the measurement window, plus totals."""
    window = result.scenario.measurement_distance
    mass = result.scenario.doc["vehicle"]["mass_t"]
    records = []
    incomplete = []
    for vid in result.roster:
        anchor = result.anchors.get(vid)
        if anchor is None:
            incomplete.append(vid)
            continue
        try:
            records.append(
                metrics_mod.energy_emissions(
                    result.rows, vid, mass,
                    window=window, anchor=anchor, grade=_grade_for(result, vid),
                )
            )
        except RampMergeError:
            incomplete.append(vid)
    return metrics_mod.records_to_document(records, incomplete)


def write_artifacts(result: engine_mod.RunResult, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "trajectory.csv"), "w", encoding="utf-8") as fh:
        fh.write(result.trajectory_csv())
    with open(os.path.join(out_dir, "events.ndjson"), "w", encoding="utf-8") as fh:
        fh.write(result.events_ndjson())
    with open(os.path.join(out_dir, "metrics.json"), "w", encoding="utf-8") as fh:
        json.dump(compute_metrics(result), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(out_dir, "scenario.json"), "w", encoding="utf-8") as fh:
        fh.write(result.scenario.to_json())


def cmd_run(args) -> int:
    scenario = _build_scenario(args)
    result = engine_mod.run(scenario)
    out_dir = args.out or os.environ.get(OUT_DIR_ENV, "out")
    try:
        write_artifacts(result, out_dir)
    except OSError as exc:
        print(f"error: cannot write artifacts: {exc}", file=sys.stderr)
        return EXIT_IO
    if result.safety is not None:
        info = result.safety
        print(
            f"safety violation at t={info['t']}s: {info['rear']} contacted "
            f"{info['front']} (gap {info['gap']} m); artifacts in {out_dir}",
            file=sys.stderr,
        )
        return EXIT_SAFETY
    print(f"run complete ({result.reason}); artifacts in {out_dir}")
    return EXIT_OK


def _read_metrics_dir(path: str) -> list:
    metrics_file = os.path.join(path, "metrics.json")
    with open(metrics_file, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("incomplete"):
        raise RosterMismatch(f"{path}: incomplete vehicles {doc['incomplete']}")
    return metrics_mod.records_from_document(doc)


def cmd_compare(args) -> int:
    try:
        coop = _read_metrics_dir(args.coop)
        baselines = [_read_metrics_dir(d) for d in args.baseline]
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    report = metrics_mod.compare(coop, baselines)
    print(report.render(), end="")
    if args.out:
        try:
            os.makedirs(args.out, exist_ok=True)
            with open(os.path.join(args.out, "report.json"), "w", encoding="utf-8") as fh:
                json.dump(report.to_document(), fh, indent=2, sort_keys=True)
                fh.write("\n")
            with open(os.path.join(args.out, "report.txt"), "w", encoding="utf-8") as fh:
                fh.write(report.render())
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK


def cmd_serve(args) -> int:
    scenario = _build_scenario(args)
    if scenario.mode == "human" and not args.realtime:
        print("error: --mode human requires --realtime", file=sys.stderr)
        return EXIT_VALIDATION
    server = BridgeServer(
        scenario, args.port, pace=1.0 if args.realtime else 20.0
    )
    interrupted = False
    try:
        asyncio.run(server.serve())
    except OSError as exc:
        print(f"error: cannot bind port {args.port}: {exc}", file=sys.stderr)
        return EXIT_IO
    except KeyboardInterrupt:
        interrupted = True
        server.stop()
    result = server.result if server.result is not None else server.engine.result
    if interrupted and not any(e["kind"] == "partial_run" for e in result.events):
        result.events.append({"t": None, "kind": "partial_run"})
        result.reason = "interrupted"
    out_dir = args.out or os.environ.get(OUT_DIR_ENV, "out")
    try:
        write_artifacts(result, out_dir)
    except OSError as exc:
        print(f"error: cannot write artifacts: {exc}", file=sys.stderr)
        return EXIT_IO
    if result.safety is not None:
        return EXIT_SAFETY
    print(f"serve finished ({result.reason}); artifacts in {out_dir}")
    return EXIT_OK


def _add_scenario_args(parser) -> None:
    parser.add_argument("--scenario", help="scenario JSON file")
    parser.add_argument("--mode", choices=MODES, help="override the scenario mode")
    parser.add_argument("--seed", type=int, help="override the scenario seed")
    parser.add_argument(
        "--override",
        action="append",
        metavar="KEY=VALUE",
        help="dotted-path scenario override, e.g. gains.delta=0.3",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rampmerge",
        description="cooperative on-ramp merging simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="headless simulation run")
    _add_scenario_args(run_parser)
    run_parser.add_argument("--out", help=f"artifact directory (or ${OUT_DIR_ENV})")
    run_parser.set_defaults(func=cmd_run)

    compare_parser = sub.add_parser("compare", help="cooperative vs baseline report")
    compare_parser.add_argument("--coop", required=True, help="cooperative run dir")
    compare_parser.add_argument(
        "--baseline", required=True, nargs="+", help="baseline run dirs"
    )
    compare_parser.add_argument("--out", help="directory for report.json/report.txt")
    compare_parser.set_defaults(func=cmd_compare)

    serve_parser = sub.add_parser("serve", help="live bridge for the cockpit UI")
    _add_scenario_args(serve_parser)
    serve_parser.add_argument("--port", type=int, required=True)
    serve_parser.add_argument(
        "--realtime", action="store_true", help="pace physics to wall clock"
    )
    serve_parser.add_argument("--out", help=f"artifact directory (or ${OUT_DIR_ENV})")
    serve_parser.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioParseError, ScenarioValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except RosterMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except RampMergeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
