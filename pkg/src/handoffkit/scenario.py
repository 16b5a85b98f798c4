"""Scenario file format: one JSON document per handoff scenario.

Top-level sections::

    registry      {variable: [lower, upper]}        tolerance ranges
    networks      [ {id, provider, technology, center, radius, p0, ...} ]
    terminal      {id, position, velocity, battery_load, energy_rate, online_interventions}
    mobility      {kind, points, speed, loop, turn_std}
    applications  [ {name, type, constraints: [...]} ]            (optional)
    providers     {id: {preference, home}}                        (optional)
    correlations  [ {feature, K, positives: {var: w}, negatives: {var: w}} ]
    config        {duration, dt, seed, hysteresis, ..., execution: {...}}
    policies      [ {owner, rules: [{if: {var, op, value}, then}]} ]   (optional)
    constraints   [ {variable, bound, sense, applies_to} ]        (optional)
"""

from __future__ import annotations

import json
import math
from contextlib import contextmanager
from dataclasses import fields
from importlib import resources
from pathlib import Path
from typing import NamedTuple

from .context import (
    Condition,
    ExecutionModel,
    HandoffConfiguration,
    HandoffConstraint,
    HandoffPolicy,
    PolicyRule,
    ToleranceRange,
    is_registered,
)
from .environment import (
    ApplicationSpec,
    LoadProcess,
    Mobility,
    NetworkSpec,
    ProviderSpec,
    ScenarioSpec,
    TerminalState,
)
from .errors import (
    HandoffError,
    LoadError,
    MissingSectionError,
    RangeError,
    SchemaError,
    UnknownVariableError,
    WeightSumError,
)
from .objectives import WEIGHT_TOL, CorrelationSpec, Feature

SCHEMA_VERSION = 1
REQUIRED_SECTIONS = ("registry", "networks", "terminal", "mobility", "correlations", "config")
OPTIONAL_SECTIONS = ("applications", "providers", "policies", "constraints")


class LoadedScenario(NamedTuple):
    scenario: ScenarioSpec
    correlations: tuple
    config: HandoffConfiguration
    policies: tuple
    constraints: tuple


def reference_scenario_path() -> Path:
    return Path(str(resources.files("handoffkit") / "data" / "reference_scenario.json"))


@contextmanager
def _at(location):
    try:
        yield
    except LoadError:
        raise
    except (HandoffError, ValueError, TypeError, KeyError) as exc:
        raise SchemaError(str(exc).strip("'\""), location) from exc


def _var(name, location):
    if not isinstance(name, str) or not is_registered(name):
        raise UnknownVariableError(f"unknown context variable {name!r}", location)
    return name


def _section(doc, name):
    if name not in doc:
        raise MissingSectionError(f"required section {name!r} is missing", f"$.{name}")
    return doc[name]


def _weights_sum(items, location):
    total = math.fsum(float(w) for w in items)
    if abs(total - 1.0) > WEIGHT_TOL:
        raise WeightSumError(f"weights sum to {total:.12g}, expected 1", location)


def _constraint(d, loc):
    _var(d.get("variable"), f"{loc}.variable")
    with _at(loc):
        return HandoffConstraint(
            d["variable"], float(d["bound"]), d.get("sense", "max-allowed"), d.get("applies_to", "any")
        )


def load_scenario_dict(doc, seed=None) -> LoadedScenario:
    if not isinstance(doc, dict):
        raise SchemaError("scenario document must be a JSON object")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version!r}", "$.schema_version")
    for name in REQUIRED_SECTIONS:
        _section(doc, name)

    ranges = {}
    for name, bounds in doc["registry"].items():
        loc = f"$.registry.{name}"
        _var(name, loc)
        if isinstance(bounds, dict):
            bounds = [bounds.get("lower"), bounds.get("upper")]
        with _at(loc):
            lo, hi = float(bounds[0]), float(bounds[1])
        if not lo < hi:
            raise RangeError(f"lower bound {lo:g} must be below upper bound {hi:g}", loc)
        ranges[name] = ToleranceRange(lo, hi)

    providers = {}
    for pid, p in (doc.get("providers") or {}).items():
        with _at(f"$.providers.{pid}"):
            providers[pid] = ProviderSpec(pid, float(p.get("preference", 0.5)), bool(p.get("home", False)))

    networks = []
    for i, n in enumerate(_section(doc, "networks")):
        loc = f"$.networks[{i}]"
        with _at(loc):
            ld = n.get("load", {})
            load = LoadProcess(
                kind=ld.get("kind", "sine"),
                mean=float(ld.get("mean", 0.5)),
                amplitude=float(ld.get("amplitude", 0.0)),
                period=float(ld.get("period", 60.0)),
                step_std=float(ld.get("step_std", 0.0)),
                reversion=float(ld.get("reversion", 0.1)),
            )
            auth = n.get("authorized_terminals")
            networks.append(
                NetworkSpec(
                    id=str(n["id"]),
                    provider_id=str(n["provider"]),
                    technology=str(n.get("technology", "generic")),
                    center=tuple(n["center"]),
                    radius=float(n["radius"]),
                    p0=float(n["p0"]),
                    d0=float(n.get("d0", 1.0)),
                    n_exp=float(n.get("path_loss_exponent", 3.0)),
                    bandwidth=float(n.get("bandwidth", 10.0)),
                    base_delay=float(n.get("delay", 0.05)),
                    load=load,
                    price=float(n.get("price", 0.0)),
                    authorized_terminals=None if auth is None else frozenset(auth),
                    noise_floor=float(n.get("noise_floor", -100.0)),
                    auth_latency=float(n.get("auth_latency", 0.1)),
                    security_signaling=float(n.get("security_signaling", 512.0)),
                    attack_rate=float(n.get("attack_rate", 0.0)),
                    interventions=float(n.get("interventions", 0.0)),
                )
            )
        if providers and networks[-1].provider_id not in providers:
            raise SchemaError(f"unknown provider {networks[-1].provider_id!r}", f"{loc}.provider")

    t = doc["terminal"]
    with _at("$.terminal"):
        terminal = TerminalState(
            position=tuple(t.get("position", (0.0, 0.0))),
            velocity=tuple(t.get("velocity", (0.0, 0.0))),
            battery_load=float(t.get("battery_load", 1.0)),
            energy_rate=float(t.get("energy_rate", 0.0)),
            id=str(t.get("id", "mt0")),
        )
        interventions = tuple(float(x) for x in t.get("online_interventions", ()))

    m = doc["mobility"]
    with _at("$.mobility"):
        mobility = Mobility(
            kind=m.get("kind", "constant"),
            points=tuple(tuple(p) for p in m.get("points", ())),
            speed=float(m.get("speed", 0.0)),
            loop=bool(m.get("loop", False)),
            turn_std=float(m.get("turn_std", 0.0)),
        )

    apps = []
    for i, a in enumerate(doc.get("applications") or ()):
        loc = f"$.applications[{i}]"
        cons = tuple(_constraint(c, f"{loc}.constraints[{j}]") for j, c in enumerate(a.get("constraints", ())))
        with _at(loc):
            apps.append(ApplicationSpec(str(a.get("name", f"app{i}")), a.get("type", "non-real-time"), cons))

    specs = []
    for i, c in enumerate(doc["correlations"]):
        loc = f"$.correlations[{i}]"
        pos = c.get("positives", {})
        neg = c.get("negatives", {})
        for side, d in (("positives", pos), ("negatives", neg)):
            for name in d:
                _var(name, f"{loc}.{side}.{name}")
                if name not in ranges:
                    raise RangeError(f"variable {name!r} has no registered tolerance range", f"{loc}.{side}.{name}")
        _weights_sum(list(pos.values()) + list(neg.values()), loc)
        with _at(loc):
            specs.append(CorrelationSpec(c["feature"], tuple(pos.items()), tuple(neg.items()), float(c.get("K", 1.0))))
    feats = [s.feature for s in specs]
    if len(set(feats)) != len(feats):
        raise SchemaError("one correlation entry per feature", "$.correlations")

    cfg = dict(doc["config"])
    duration = cfg.pop("duration", None)
    dt = cfg.pop("dt", 0.1)
    if duration is None:
        raise MissingSectionError("config.duration is required", "$.config.duration")
    if seed is not None:
        cfg["seed"] = int(seed)
    fw = cfg.get("feature_weights")
    if fw is not None:
        for f in fw:
            with _at(f"$.config.feature_weights.{f}"):
                Feature(f)
        _weights_sum(fw.values(), "$.config.feature_weights")
    for key in ("thresholds",):
        for name in cfg.get(key, {}) or {}:
            _var(name, f"$.config.{key}.{name}")
    for key in ("context_priority", "user_variables", "provider_variables"):
        for j, name in enumerate(cfg.get(key, ()) or ()):
            _var(name, f"$.config.{key}[{j}]")
    known = {f.name for f in fields(HandoffConfiguration)}
    unknown = sorted(set(cfg) - known)
    if unknown:
        raise SchemaError(f"unknown config keys {unknown}", "$.config")
    with _at("$.config.execution"):
        if "execution" in cfg:
            e = cfg["execution"]
            cfg["execution"] = ExecutionModel(
                e.get("strategy", "break-before-make"),
                float(e.get("base_latency", 0.05)),
                {k: float(v) for k, v in (e.get("technology_latency") or {}).items()},
            )
    with _at("$.config"):
        for key in ("context_priority", "user_variables", "provider_variables"):
            if key in cfg:
                cfg[key] = tuple(cfg[key])
        config = HandoffConfiguration(**cfg)

    policies = []
    for i, p in enumerate(doc.get("policies") or ()):
        loc = f"$.policies[{i}]"
        rules = []
        for j, r in enumerate(p.get("rules", ())):
            rloc = f"{loc}.rules[{j}]"
            cond = r.get("if", {})
            var = cond.get("var")
            if var not in ("network", "provider", "technology"):
                _var(var, f"{rloc}.if.var")
            with _at(rloc):
                rules.append(PolicyRule(Condition(var, cond.get("op", "=="), cond.get("value")), r["then"]))
        with _at(loc):
            policies.append(HandoffPolicy(p.get("owner", "user"), tuple(rules)))

    constraints = tuple(_constraint(c, f"$.constraints[{i}]") for i, c in enumerate(doc.get("constraints") or ()))

    with _at("$"):
        scenario = ScenarioSpec(
            duration=float(duration),
            dt=float(dt),
            networks=tuple(networks),
            terminal=terminal,
            mobility=mobility,
            applications=tuple(apps),
            providers=providers,
            ranges=ranges,
            seed=config.seed,
            name=str(doc.get("name", "scenario")),
            interventions=interventions,
        )
    return LoadedScenario(scenario, tuple(specs), config, tuple(policies), constraints)


def parse_scenario(path, seed=None) -> LoadedScenario:
    """Load and validate a scenario file. ``seed`` overrides the file's seed."""
    path = Path(path)
    text = path.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}:{exc.colno}") from exc
    return load_scenario_dict(doc, seed=seed)


# --------------------------------------------------------------------------


def _constraint_dict(c: HandoffConstraint) -> dict:
    return {"variable": c.variable, "bound": c.bound, "sense": c.sense.value, "applies_to": c.applies_to.value}


def scenario_to_dict(loaded: LoadedScenario) -> dict:
    s, specs, cfg, policies, constraints = loaded
    nets = []
    for n in s.networks:
        nets.append(
            {
                "id": n.id,
                "provider": n.provider_id,
                "technology": n.technology,
                "center": list(n.center),
                "radius": n.radius,
                "p0": n.p0,
                "d0": n.d0,
                "path_loss_exponent": n.n_exp,
                "bandwidth": n.bandwidth,
                "delay": n.base_delay,
                "load": {
                    "kind": n.load.kind,
                    "mean": n.load.mean,
                    "amplitude": n.load.amplitude,
                    "period": n.load.period,
                    "step_std": n.load.step_std,
                    "reversion": n.load.reversion,
                },
                "price": n.price,
                "authorized_terminals": None if n.authorized_terminals is None else sorted(n.authorized_terminals),
                "noise_floor": n.noise_floor,
                "auth_latency": n.auth_latency,
                "security_signaling": n.security_signaling,
                "attack_rate": n.attack_rate,
                "interventions": n.interventions,
            }
        )
    config = {"duration": s.duration, "dt": s.dt}
    for f in fields(HandoffConfiguration):
        v = getattr(cfg, f.name)
        if isinstance(v, ExecutionModel):
            v = {
                "strategy": v.strategy.value,
                "base_latency": v.base_latency,
                "technology_latency": dict(v.technology_latency),
            }
        elif isinstance(v, tuple):
            v = list(v)
        elif isinstance(v, dict):
            v = {str(k): x for k, x in v.items()}
        config[f.name] = v
    return {
        "schema_version": SCHEMA_VERSION,
        "name": s.name,
        "registry": {k: [r.lower, r.upper] for k, r in s.ranges.items()},
        "networks": nets,
        "terminal": {
            "id": s.terminal.id,
            "position": list(s.terminal.position),
            "velocity": list(s.terminal.velocity),
            "battery_load": s.terminal.battery_load,
            "energy_rate": s.terminal.energy_rate,
            "online_interventions": list(s.interventions),
        },
        "mobility": {
            "kind": s.mobility.kind,
            "points": [list(p) for p in s.mobility.points],
            "speed": s.mobility.speed,
            "loop": s.mobility.loop,
            "turn_std": s.mobility.turn_std,
        },
        "applications": [
            {"name": a.name, "type": a.app_type.value, "constraints": [_constraint_dict(c) for c in a.constraints]}
            for a in s.applications
        ],
        "providers": {p.id: {"preference": p.preference, "home": p.home} for p in s.providers.values()},
        "correlations": [
            {
                "feature": sp.feature.value,
                "K": sp.K,
                "positives": dict(sp.positives),
                "negatives": dict(sp.negatives),
            }
            for sp in specs
        ],
        "config": config,
        "policies": [
            {
                "owner": p.owner,
                "rules": [
                    {
                        "if": {
                            "var": r.condition.var,
                            "op": r.condition.op,
                            "value": list(r.condition.value) if isinstance(r.condition.value, tuple) else r.condition.value,
                        },
                        "then": r.directive.value,
                    }
                    for r in p.rules
                ],
            }
            for p in policies
        ],
        "constraints": [_constraint_dict(c) for c in constraints],
    }
