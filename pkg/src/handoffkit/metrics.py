"""Performance counters, radar grading and tradeoff sweeps over completed traces."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from . import _kernels
from .context import normalize_variable
from .errors import InputError
from .objectives import CorrelationSpec, Feature
from .pipeline import Reason, Trace, run_scenario

SWEEP_PARAMETERS = ("hysteresis", "decision_budget", "context_size", "user_provider_weight_mix")

# metric pair per sweep parameter, both oriented for maximization
SWEEP_METRICS = {
    "hysteresis": ("DTIB", "-HOR"),
    "decision_budget": ("-DLat", "SHOR"),
    "context_size": ("context_volume", "-SO"),
    "user_provider_weight_mix": ("user_preference", "provider_preference"),
}


@dataclass(frozen=True)
class PerformanceCounters:
    duration: float
    n_steps: int
    handoffs: int
    imperative: int
    opportunist: int
    HOR: float
    IHOR: float
    OHOR: float
    dtib_steps: int
    DTIB: float
    not_in_best: float
    SHOR: float
    HOL_mean: float
    DLat_mean: float
    IL_mean: float
    IR: float
    SO: float
    THOR: float
    PHOR: float
    OUIR: float
    AL: float
    SSO: float
    failed: int = 0
    forced_disconnects: int = 0
    attachments: int = 0
    context_volume: int = 0

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _mean(xs):
    xs = list(xs)
    return math.fsum(xs) / len(xs) if xs else 0.0


def split_duration(k, n, dt):
    """Times for k of n steps and for the other n - k, summing exactly to n * dt.

    The larger share is k * dt (or (n - k) * dt); the smaller one is its
    difference from the duration, which is exact by Sterbenz's lemma.
    """
    duration = n * dt
    if 2 * k >= n:
        a = k * dt
        return a, duration - a
    b = (n - k) * dt
    return duration - b, b


def accumulate(trace: Trace) -> PerformanceCounters:
    """Handoff-performance measures of one run.

    Rates are per minute. DTIB counts whole steps spent on the step's argmax
    network. HOR is IHOR + OHOR. SHOR is 1 when no handoff finished evaluation.
    SO = delivered variables x snapshots x bytes per variable, per minute.
    """
    dt = trace.spec.dt
    n_steps = trace.n_steps
    duration = n_steps * dt
    per_min = 60.0 / duration
    events = trace.events
    n_imp = sum(1 for e in events if e.decision.why is Reason.IMPERATIVE)
    n_opp = sum(1 for e in events if e.decision.why is Reason.OPPORTUNIST)
    ihor = n_imp * per_min
    ohor = n_opp * per_min
    dtib_steps = sum(1 for s in trace.steps if s.in_best)
    dtib, not_in_best = split_duration(dtib_steps, n_steps, dt)
    graded = [e for e in events if e.scores is not None]
    shor = sum(1 for e in graded if e.successful) / len(graded) if graded else 1.0
    interruptions = sum(1 for e in events if e.il > 0 or e.failed) + len(trace.disconnects)
    volume = len(trace.delivered_variables)
    so = volume * len(trace.snapshots) * trace.config.bytes_per_variable * 60.0 / duration
    nets = {n.id: n for n in trace.spec.networks}
    intervention_events = sum(1 for e in events if nets[e.target].interventions > 0)
    return PerformanceCounters(
        duration=duration,
        n_steps=n_steps,
        handoffs=len(events),
        imperative=n_imp,
        opportunist=n_opp,
        HOR=ihor + ohor,
        IHOR=ihor,
        OHOR=ohor,
        dtib_steps=dtib_steps,
        DTIB=dtib,
        not_in_best=not_in_best,
        SHOR=shor,
        HOL_mean=_mean(e.hol for e in events),
        DLat_mean=_mean(e.decision.dlat for e in events),
        IL_mean=_mean(e.il for e in events),
        IR=interruptions * per_min,
        SO=so,
        THOR=sum(1 for e in events if e.tardy) * per_min,
        PHOR=sum(1 for e in events if e.premature) * per_min,
        OUIR=(trace.interventions + intervention_events) * per_min,
        AL=_mean(nets[e.target].auth_latency for e in events),
        SSO=math.fsum(nets[e.target].security_signaling for e in events) * per_min,
        failed=sum(1 for e in events if e.failed),
        forced_disconnects=len(trace.disconnects),
        attachments=trace.attachments,
        context_volume=volume,
    )


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RadarReport:
    scores: Mapping[Feature, float]
    boundary: float
    outliers: tuple = field(default=())

    @property
    def successful(self) -> bool:
        return not self.outliers

    @property
    def verdict(self) -> str:
        return "successful" if self.successful else "defective"

    def as_dict(self) -> dict:
        return {
            "scores": {str(f): v for f, v in self.scores.items()},
            "boundary": self.boundary,
            "verdict": self.verdict,
            "outliers": [str(f) for f in self.outliers],
        }


def radar(feature_scores: Mapping, boundary: float) -> RadarReport:
    """Successful iff every feature score is inside the boundary circle (>= boundary)."""
    if not 0.0 <= boundary <= 1.0:
        raise InputError("boundary must be in [0, 1]")
    scores = {Feature(k): float(v) for k, v in feature_scores.items()}
    missing = [f for f in Feature if f not in scores]
    if missing:
        raise InputError(f"missing feature scores: {[str(f) for f in missing]}")
    for f, v in scores.items():
        if not 0.0 <= v <= 1.0:
            raise InputError(f"{f} score {v} outside [0, 1]")
    ordered = {f: scores[f] for f in Feature}
    outliers = tuple(f for f, v in ordered.items() if v < boundary)
    return RadarReport(ordered, boundary, outliers)


def run_radar(trace: Trace, boundary: Optional[float] = None) -> RadarReport:
    """Run-level radar: mean of the per-handoff scores (all ones when nothing was graded)."""
    b = trace.config.boundary if boundary is None else boundary
    graded = [e.scores for e in trace.events if e.scores is not None]
    if not graded:
        return radar({f: 1.0 for f in Feature}, b)
    return radar({f: _mean(s[f] for s in graded) for f in Feature}, b)


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepPoint:
    value: float
    metrics: tuple
    non_dominated: bool
    extras: Mapping = field(default_factory=dict)


@dataclass(frozen=True)
class SweepResult:
    parameter: str
    metric_names: tuple
    points: tuple

    @property
    def frontier(self) -> list:
        return [p for p in self.points if p.non_dominated]


def non_dominated_flags(pairs) -> list:
    arr = np.asarray(pairs, dtype=float)
    if arr.size == 0:
        return []
    return [bool(x) for x in _kernels.pareto_mask(arr.reshape(len(pairs), -1))]


def mix_preferences(specs: Sequence[CorrelationSpec], user_vars, provider_vars, mix: float) -> list:
    """Split each spec's combined user+provider weight: (1 - mix) to the user side, mix to the provider side.

    Specs that lack either side are returned unchanged; per-spec weight sums are preserved.
    """
    if not 0.0 <= mix <= 1.0:
        raise InputError("weight mix must be in [0, 1]")
    out = []
    user_vars, provider_vars = set(user_vars), set(provider_vars)
    for spec in specs:
        items = list(spec.positives) + list(spec.negatives)
        u = [n for n, _ in items if n in user_vars]
        p = [n for n, _ in items if n in provider_vars]
        if not u or not p:
            out.append(spec)
            continue
        w = dict(items)
        budget = math.fsum(w[n] for n in u + p)
        for side, share in ((u, 1.0 - mix), (p, mix)):
            mass = math.fsum(w[n] for n in side)
            for n in side:
                w[n] = budget * share * (w[n] / mass if mass > 0 else 1.0 / len(side))
        # absorb rounding into the last touched weight
        rest = math.fsum(v for n, v in w.items() if n != p[-1])
        w[p[-1]] = max(0.0, 1.0 - rest)
        out.append(
            replace(
                spec,
                positives=tuple((n, w[n]) for n, _ in spec.positives),
                negatives=tuple((n, w[n]) for n, _ in spec.negatives),
            )
        )
    return out


def preference_scores(trace: Trace, specs, user_vars, provider_vars) -> tuple:
    """Time-averaged satisfaction of user-side and provider-side variables.

    Each variable contributes its normalized value on the connected network,
    flipped (1 - x) when it is negatively correlated somewhere; disconnected
    steps contribute 0.
    """
    negative = {n for s in specs for n, _ in s.negatives}
    ranges = trace.spec.ranges

    def sat(view, names):
        vals = []
        for n in names:
            if n not in view:
                continue
            x = normalize_variable(view[n], ranges[n]) if n in ranges else float(view[n])
            vals.append(1.0 - x if n in negative else x)
        return _mean(vals)

    u_tot, p_tot = 0.0, 0.0
    for step, snap in zip(trace.steps, trace.snapshots):
        if step.current is None or step.current not in snap.networks:
            continue
        view = snap.view(step.current)
        u_tot += sat(view, user_vars)
        p_tot += sat(view, provider_vars)
    n = max(1, trace.n_steps)
    return u_tot / n, p_tot / n


def tradeoff_sweep(loaded, parameter: str, values, *, trace_hook=None) -> SweepResult:
    """One full run per value on the same seed, graded on the parameter's metric pair."""
    if parameter not in SWEEP_PARAMETERS:
        raise InputError(f"unsupported sweep parameter {parameter!r}; choose from {SWEEP_PARAMETERS}")
    values = list(values)
    if not values:
        raise InputError("sweep needs at least one value")
    scenario, specs, config, policies, constraints = loaded
    rows = []
    for v in values:
        run_specs = list(specs)
        if parameter == "hysteresis":
            cfg = replace(config, hysteresis=float(v))
        elif parameter == "decision_budget":
            cfg = replace(config, decision_budget=float(v))
        elif parameter == "context_size":
            cfg = replace(config, context_size=int(v))
        else:
            cfg = config
            run_specs = mix_preferences(specs, config.user_variables, config.provider_variables, float(v))
        trace = run_scenario(scenario, cfg, run_specs, policies, constraints)
        if trace_hook is not None:
            trace_hook(v, trace)
        c = accumulate(trace)
        extras = {"HOR": c.HOR, "DTIB": c.DTIB, "SHOR": c.SHOR, "DLat_mean": c.DLat_mean, "SO": c.SO}
        if parameter == "hysteresis":
            pair = (c.DTIB, -c.HOR)
        elif parameter == "decision_budget":
            pair = (-c.DLat_mean, c.SHOR)
        elif parameter == "context_size":
            pair = (float(c.context_volume), -c.SO)
            extras["computable_features"] = len(trace.computable_features)
            extras["achievement"] = {str(f): s for f, s in run_radar(trace).scores.items()}
        else:
            pair = preference_scores(trace, run_specs, config.user_variables, config.provider_variables)
        rows.append((float(v), pair, extras))
    flags = non_dominated_flags([r[1] for r in rows])
    points = tuple(SweepPoint(v, pair, f, extras) for (v, pair, extras), f in zip(rows, flags))
    return SweepResult(parameter, SWEEP_METRICS[parameter], points)
