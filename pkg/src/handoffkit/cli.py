"""Batch entry point: run a scenario, sweep a tradeoff parameter, dump a Pareto set.

    handoffkit run    [--scenario F] [--out D] [--seed N] [--boundary B]
    handoffkit sweep  --param NAME --values LIST [--scenario F] [--out D] [--seed N]
    handoffkit pareto --time T [--scenario F] [--out D] [--seed N]
    handoffkit report [--scenario F] [--seed N] [--boundary B] [--out D]

Exit codes: 0 success, 2 scenario load error, 3 usage error, 4 IO error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .environment import World
from .errors import ConfigurationError, InputError, LoadError, UsageError
from .metrics import SWEEP_PARAMETERS, accumulate, run_radar, tradeoff_sweep
from .objectives import Feature, pareto_mask
from .pipeline import DEFAULT_CONTEXT, Scorer, discover, run_scenario
from .scenario import SCHEMA_VERSION, parse_scenario, reference_scenario_path

EXIT_OK, EXIT_LOAD, EXIT_USAGE, EXIT_IO = 0, 2, 3, 4

EVENT_COLUMNS = (
    "index", "start", "end", "source", "target", "il", "hol",
    "why", "when", "where", "how", "who", "dlat", "candidates",
    "decision_source", "best_available", "streak", "forced_disconnect",
    "failed", "tardy", "premature", "degraded_steps", "violations",
    "successful", "verdict",
) + tuple(f"score_{f.value}" for f in Feature)

SNAPSHOT_COLUMNS = ("time", "network", "variable", "value")


@dataclass(frozen=True)
class RunOutputs:
    events: Path
    snapshots: Path
    report: Path
    radar: Path


# --------------------------------------------------------------------------
# serialization helpers


def fmt(x) -> str:
    """CSV cell text: 9 significant digits for numbers, empty for None."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, Enum):
        return str(x.value)
    if isinstance(x, float):
        return format(x, ".9g")
    return str(x)


def jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, Enum):
        return x.value
    if isinstance(x, float):
        return float(format(x, ".9g")) if math.isfinite(x) else None
    if isinstance(x, int):
        return x
    if isinstance(x, dict):
        return {str(jsonable(k)): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "item"):
        return jsonable(x.item())
    return str(x)


def write_atomic(path: Path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: Path, doc: dict):
    body = {"schema_version": SCHEMA_VERSION}
    body.update(doc)
    write_atomic(path, json.dumps(jsonable(body), indent=2) + "\n")


def write_csv(path: Path, columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    write_atomic(path, buf.getvalue())


# --------------------------------------------------------------------------
# rows


def event_row(ev) -> tuple:
    d = ev.decision
    scores = ev.scores or {}
    return (
        ev.index, ev.start, ev.end, ev.source, ev.target, ev.il, ev.hol,
        d.why, d.when, d.where, d.how, d.who, d.dlat,
        ";".join(c.network_id for c in d.candidates),
        d.source, d.best_available, d.streak, d.forced_disconnect,
        ev.failed, ev.tardy, ev.premature, ev.degraded_steps, ";".join(ev.violations),
        ev.successful, ev.verdict,
    ) + tuple(scores.get(f) for f in Feature)


def snapshot_rows(snapshots):
    for s in snapshots:
        for name in sorted(s.values):
            yield (s.time, "", name, float(s.values[name]))
        for net in sorted(s.networks):
            vals = s.networks[net]
            for name in sorted(vals):
                yield (s.time, net, name, float(vals[name]))


def report_doc(trace, boundary) -> dict:
    counters = accumulate(trace)
    rep = run_radar(trace, boundary)
    return {
        "scenario": trace.spec.name,
        "seed": trace.config.seed,
        "duration": trace.duration,
        "dt": trace.spec.dt,
        "counters": counters.as_dict(),
        "radar": rep.as_dict(),
        "delivered_variables": list(trace.delivered_variables),
        "computable_features": [str(f) for f in trace.computable_features],
    }


def radar_doc(trace, boundary) -> dict:
    rep = run_radar(trace, boundary)
    events = []
    for ev in trace.events:
        if ev.scores is None:
            continue
        events.append(
            {
                "index": ev.index,
                "start": ev.start,
                "target": ev.target,
                "verdict": ev.verdict,
                "scores": {str(f): ev.scores[f] for f in Feature},
            }
        )
    return {
        "axes": [f.value for f in Feature],
        "boundary": rep.boundary,
        "run": rep.as_dict(),
        "events": events,
    }


# --------------------------------------------------------------------------
# commands


def _load(path, seed):
    return parse_scenario(path if path is not None else reference_scenario_path(), seed=seed)


def _run(loaded):
    scenario, specs, config, policies, constraints = loaded
    return run_scenario(scenario, config, specs, policies, constraints)


def _boundary(loaded, boundary):
    if boundary is None:
        return loaded.config.boundary
    if not 0.0 <= boundary <= 1.0:
        raise UsageError("--boundary must be in [0, 1]")
    return boundary


def cmd_run(scenario=None, out="out", seed=None, boundary=None) -> RunOutputs:
    loaded = _load(scenario, seed)
    b = _boundary(loaded, boundary)
    trace = _run(loaded)
    out = Path(out)
    paths = RunOutputs(out / "events.csv", out / "snapshots.csv", out / "report.json", out / "radar.json")
    write_csv(paths.events, EVENT_COLUMNS, (event_row(e) for e in trace.events))
    write_csv(paths.snapshots, SNAPSHOT_COLUMNS, snapshot_rows(trace.snapshots))
    write_json(paths.report, report_doc(trace, b))
    write_json(paths.radar, radar_doc(trace, b))
    return paths


def parse_values(text, parameter=None) -> list:
    """Comma list ``0,0.1,0.2`` or inclusive range ``start:stop:step``."""
    if text is None or not text.strip():
        raise UsageError("--values is empty")
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
                raise UsageError(f"bad range {text!r}; expected start:stop:step with step > 0")
            start, stop, step = parts
            n = int(math.floor((stop - start) / step + 1e-9))
            vals = [round(start + i * step, 12) for i in range(n + 1)]
        else:
            vals = [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --values {text!r}: {exc}") from None
    if not vals:
        raise UsageError("--values is empty")
    if parameter == "context_size":
        if any(v != int(v) or v < 0 for v in vals):
            raise UsageError("context_size values must be non-negative integers")
        vals = [int(v) for v in vals]
    return vals


def cmd_sweep(scenario=None, parameter=None, values=None, out="out", seed=None):
    if parameter not in SWEEP_PARAMETERS:
        raise UsageError(f"unsupported --param {parameter!r}; choose from {', '.join(SWEEP_PARAMETERS)}")
    if isinstance(values, str) or values is None:
        values = parse_values(values, parameter)
    values = list(values)
    if not values:
        raise UsageError("--values is empty")
    loaded = _load(scenario, seed)
    if parameter == "context_size":
        top = len(loaded.config.context_priority or DEFAULT_CONTEXT)
        if any(v > top for v in values):
            raise UsageError(f"context_size values must be <= {top}")
    try:
        result = tradeoff_sweep(loaded, parameter, values)
    except (InputError, ConfigurationError) as exc:
        raise UsageError(str(exc)) from None
    names = result.metric_names
    out = Path(out)
    csv_path = out / f"sweep_{parameter}.csv"
    json_path = out / f"frontier_{parameter}.json"
    write_csv(
        csv_path,
        ("value",) + names + ("non_dominated",),
        ((p.value,) + tuple(p.metrics) + (p.non_dominated,) for p in result.points),
    )
    write_json(
        json_path,
        {
            "parameter": parameter,
            "metrics": list(names),
            "frontier": [
                {"value": p.value, "metrics": dict(zip(names, p.metrics)), "extras": p.extras}
                for p in result.frontier
            ],
        },
    )
    return csv_path, json_path


def frozen_snapshot(loaded, t):
    """World snapshot at time ``t`` (0 is the initial state)."""
    spec = loaded.scenario
    duration = spec.n_steps * spec.dt
    if not (math.isfinite(t) and 0.0 <= t <= duration + 1e-9):
        raise UsageError(f"--time {t:g} outside [0, {duration:g}]")
    world = World(spec)
    k = min(spec.n_steps, int(round(t / spec.dt)))
    snap = world.snapshot()
    for _ in range(k):
        snap = world.step()
    return world, snap


def cmd_pareto(scenario=None, t=0.0, out="out", seed=None):
    loaded = _load(scenario, seed)
    world, snap = frozen_snapshot(loaded, float(t))
    scorer = Scorer(loaded.correlations, loaded.scenario.ranges, loaded.config)
    ids = discover(world, snap)
    evals = scorer.evaluate(snap, ids)
    front = pareto_mask([e.vector for e in evals]) if scorer.features else [True] * len(evals)
    cands = [
        {
            "network": e.network_id,
            "objectives": {str(f): v for f, v in e.vector.values.items()},
            "feasible": e.feasible,
            "score": e.score,
            "in_front": bool(f),
        }
        for e, f in zip(evals, front)
    ]
    path = Path(out) / f"pareto_t{snap.time:.9g}.json"
    write_json(path, {"time": snap.time, "features": [str(f) for f in scorer.features], "candidates": cands})
    return path


def cmd_report(scenario=None, seed=None, boundary=None, out=None) -> dict:
    loaded = _load(scenario, seed)
    b = _boundary(loaded, boundary)
    trace = _run(loaded)
    doc = report_doc(trace, b)
    if out is not None:
        write_json(Path(out) / "report.json", doc)
    return doc


# --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="handoffkit", description="Cognitive handoff simulator.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, out_default="out"):
        sp.add_argument("--scenario", type=Path, default=None, help="scenario JSON (default: bundled reference)")
        sp.add_argument("--out", type=Path, default=out_default, help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="override the scenario seed")

    sp = sub.add_parser("run", help="run one scenario and write traces and reports")
    common(sp)
    sp.add_argument("--boundary", type=float, default=None)

    sp = sub.add_parser("sweep", help="sweep one tradeoff parameter")
    common(sp)
    sp.add_argument("--param", required=True, help=f"one of {', '.join(SWEEP_PARAMETERS)}")
    sp.add_argument("--values", required=True, help="comma list or start:stop:step")

    sp = sub.add_parser("pareto", help="evaluate all candidates at one instant")
    common(sp)
    sp.add_argument("--time", type=float, required=True)

    sp = sub.add_parser("report", help="print counters and the radar verdict")
    common(sp, out_default=None)
    sp.add_argument("--boundary", type=float, default=None)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "run":
            paths = cmd_run(args.scenario, args.out, args.seed, args.boundary)
            for p in (paths.events, paths.snapshots, paths.report, paths.radar):
                print(p)
        elif args.command == "sweep":
            for p in cmd_sweep(args.scenario, args.param, args.values, args.out, args.seed):
                print(p)
        elif args.command == "pareto":
            print(cmd_pareto(args.scenario, args.time, args.out, args.seed))
        else:
            doc = cmd_report(args.scenario, args.seed, args.boundary, args.out)
            c, r = doc["counters"], doc["radar"]
            print(f"handoffs={c['handoffs']} HOR={c['HOR']:.4g}/min DTIB={c['DTIB']:.4g}s SHOR={c['SHOR']:.4g}")
            print(" ".join(f"{k}={v:.3f}" for k, v in r["scores"].items()), f"-> {r['verdict']}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LoadError as exc:
        print(f"load error: {exc}", file=sys.stderr)
        return EXIT_LOAD
    except ConfigurationError as exc:
        print(f"load error: {exc}", file=sys.stderr)
        return EXIT_LOAD
    except OSError as exc:
        where = exc.filename if getattr(exc, "filename", None) else ""
        print(f"io error: {where}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
