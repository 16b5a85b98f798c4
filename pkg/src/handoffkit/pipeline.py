"""Handoff control loop: context management, discovery, decision, execution, evaluation.

One :class:`HceState` (the handoff control entity) owns the terminal's
connection. Each tick the context manager hands it a (possibly stale,
possibly partial) snapshot; discovery lists reachable and authorized
networks; the decision stage answers why/when/where/how/who; execution turns
a decision into a :class:`HandoffEvent`; evaluation grades the event on the
five desirable features.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Optional, Sequence

from .context import (
    AppClass,
    ContextSnapshot,
    Directive,
    ExecutionModel,
    HandoffConfiguration,
    HandoffConstraint,
    Sense,
    Strategy,
    Verdict,
    apply_policies,
    check_constraint,
    normalize_variable,
)
from .environment import NETWORK_VARIABLES, TERMINAL_VARIABLES, NetworkSpec, ScenarioSpec, World
from .errors import InputError
from .objectives import (
    CandidateEvaluation,
    CorrelationSpec,
    Feature,
    ObjectiveTable,
    ObjectiveVector,
    argmax_candidate,
    feasible,
    restrict_weights,
    scalarize,
)

__all__ = [
    "DecisionRecord",
    "ExecutionModel",
    "HandoffEvent",
    "HceState",
    "Phase",
    "Reason",
    "Trace",
    "classify_reason",
    "decide",
    "discover",
    "evaluate",
    "execute",
    "run_scenario",
]

PERFORMANCE_VARIABLES = ("HOL", "IL", "DLat", "ETSLH")
DEFAULT_CONTEXT = NETWORK_VARIABLES + TERMINAL_VARIABLES + PERFORMANCE_VARIABLES

# thresholds on these are minimums; thresholds on anything else are maximums
HIGHER_IS_BETTER = frozenset({"RSS", "SNR", "SIR", "SNIR", "CIR", "NBW", "NT", "DTR", "BL", "PPref"})


class Phase(str, Enum):
    IDLE = "idle"
    DECIDING = "deciding"
    EXECUTING = "executing"
    EVALUATING = "evaluating"


LEGAL_TRANSITIONS = {
    Phase.IDLE: {Phase.DECIDING},
    Phase.DECIDING: {Phase.IDLE, Phase.EXECUTING},
    Phase.EXECUTING: {Phase.EVALUATING},
    Phase.EVALUATING: {Phase.IDLE},
}


class Reason(str, Enum):
    IMPERATIVE = "imperative"
    OPPORTUNIST = "opportunist"
    NONE = "none"


@dataclass
class HceState:
    current: Optional[str] = None
    phase: Phase = Phase.IDLE
    last_handoff_time: Optional[float] = None
    snapshot: Optional[ContextSnapshot] = None
    streak_target: Optional[str] = None
    streak: int = 0
    log: list = field(default_factory=list)

    def to(self, phase: Phase, t: float):
        if phase not in LEGAL_TRANSITIONS[self.phase]:
            raise RuntimeError(f"illegal HCE transition {self.phase.value} -> {phase.value}")
        self.phase = phase
        self.log.append((t, phase))

    def reset_streak(self):
        self.streak_target = None
        self.streak = 0


@dataclass(frozen=True)
class DecisionRecord:
    why: Reason
    when: float
    where: Optional[str]
    how: Strategy
    who: str
    dlat: float
    candidates: tuple
    source: Optional[str] = None
    best_available: Optional[str] = None
    streak: int = 0
    forced_disconnect: bool = False

    def __post_init__(self):
        if self.dlat < 0:
            raise InputError("decision latency must be >= 0")
        if self.where is not None and self.where not in {c.network_id for c in self.candidates}:
            raise InputError("decision target must be one of the considered candidates")


@dataclass
class HandoffEvent:
    index: int
    start: float
    end: float
    source: Optional[str]
    target: str
    il: float
    hol: float
    decision: DecisionRecord
    failed: bool = False
    tardy: bool = False
    premature: bool = False
    degraded_steps: int = 0
    violations: tuple = ()
    scores: Optional[dict] = None
    successful: Optional[bool] = None
    verdict: str = "pending"

    def __post_init__(self):
        if self.end < self.start:
            raise InputError("event end precedes start")
        if self.il > self.hol + 1e-15:
            raise InputError("interruption latency cannot exceed handoff latency")


@dataclass(frozen=True)
class StepRecord:
    k: int
    time: float
    current: Optional[str]
    best: Optional[str]
    in_best: bool
    available: tuple
    scores: Mapping[str, float]


@dataclass
class Trace:
    spec: ScenarioSpec
    config: HandoffConfiguration
    events: list
    snapshots: list
    steps: list
    phase_log: list
    disconnects: list
    attachments: int
    delivered_variables: tuple
    computable_features: tuple
    interventions: int

    @property
    def n_steps(self) -> int:
        return len(self.steps)

    @property
    def duration(self) -> float:
        return self.n_steps * self.spec.dt


# --------------------------------------------------------------------------
# context manager


class ContextManager:
    """Collects true snapshots and redistributes them aged and filtered."""

    def __init__(self, config: HandoffConfiguration):
        self.staleness = config.staleness
        priority = config.context_priority or DEFAULT_CONTEXT
        if config.context_size is None:
            self.delivered = tuple(priority)
        else:
            self.delivered = tuple(priority[: config.context_size])
        self._full = config.context_size is None and not config.context_priority
        self.history = []

    def push(self, snap: ContextSnapshot):
        self.history.append(snap)

    def filter(self, snap: ContextSnapshot) -> ContextSnapshot:
        return snap if self._full else snap.restrict(self.delivered)

    def deliver(self) -> ContextSnapshot:
        idx = max(0, len(self.history) - 1 - self.staleness)
        return self.filter(self.history[idx])


# --------------------------------------------------------------------------
# scoring


class Scorer:
    """Objective vectors and scalar scores for discovered candidates."""

    def __init__(self, specs, ranges, config: HandoffConfiguration, delivered=None):
        self.ranges = ranges
        self.config = config
        if delivered is None:
            usable = list(specs)
        else:
            have = set(delivered)
            usable = [s for s in specs if set(s.variables) <= have]
        self.table = ObjectiveTable(usable, ranges) if usable else None
        self.features = tuple(s.feature for s in usable)
        self.weights = restrict_weights(config.feature_weights, self.features) if usable else {}

    def evaluate(self, snap: ContextSnapshot, net_ids) -> list:
        views = [snap.view(n) for n in net_ids]
        if not views:
            return []
        if self.table is None:
            return [self._fallback(v) for v in views]
        mat = self.table.matrix(views)
        out = []
        for v, row in zip(views, mat):
            vec = ObjectiveVector(dict(zip(self.features, row.tolist())))
            out.append(CandidateEvaluation(v.network, v, vec, feasible(v, self.ranges), scalarize(vec, self.weights)))
        return out

    def _fallback(self, view):
        # no feature computable from the delivered context: signal strength only
        rss = view.get("RSS")
        if rss is None:
            score = 0.0
        elif "RSS" in self.ranges:
            score = math.log(normalize_variable(rss, self.ranges["RSS"]))
        else:
            score = rss / 100.0
        return CandidateEvaluation(view.network, view, ObjectiveVector({}), feasible(view, self.ranges), score)


# --------------------------------------------------------------------------
# stages


def discover(world: World, snapshot: Optional[ContextSnapshot] = None) -> list:
    """Reachable and authorized network ids, sorted.

    Reachability is read from ``snapshot`` when given (what the context
    manager reported), otherwise from the world itself.
    """
    term = world.spec.terminal.id
    if snapshot is None:
        ids = [net.id for net, _ in world.reachable_networks()]
    else:
        ids = sorted(snapshot.networks)
    return [i for i in ids if world.spec.network(i).authorizes(term)]


def threshold_breaches(view, thresholds: Mapping[str, float]) -> list:
    out = []
    for name, bound in thresholds.items():
        if name not in view:
            continue
        value = view[name]
        if (value < bound) if name in HIGHER_IS_BETTER else (value > bound):
            out.append(name)
    return out


def constraint_breaches(view, constraints, default_class=AppClass.ANY) -> list:
    out = []
    for item in constraints:
        c, app = item if isinstance(item, tuple) else (item, default_class)
        if c.variable not in view:
            continue
        if check_constraint(c, view, app) is Verdict.VIOLATED:
            out.append(c.variable)
    return out


def classify_reason(
    current_eval: Optional[CandidateEvaluation],
    best_eval: Optional[CandidateEvaluation],
    thresholds: Mapping[str, float],
    hysteresis: float = 0.0,
    constraints=(),
    connected: bool = True,
) -> Reason:
    """Imperative if the link is lost, degraded or infeasible; opportunist if some
    candidate beats the current score by more than ``hysteresis``."""
    if connected:
        if current_eval is None:
            return Reason.IMPERATIVE
        if not current_eval.feasible:
            return Reason.IMPERATIVE
        if threshold_breaches(current_eval.snapshot, thresholds):
            return Reason.IMPERATIVE
        if constraint_breaches(current_eval.snapshot, constraints):
            return Reason.IMPERATIVE
    elif best_eval is not None:
        return Reason.IMPERATIVE
    if (
        current_eval is not None
        and best_eval is not None
        and best_eval.network_id != current_eval.network_id
        and best_eval.score - current_eval.score > hysteresis
    ):
        return Reason.OPPORTUNIST
    return Reason.NONE


def _directives(evals, policies, user_first, nets):
    return {
        e.network_id: apply_policies(policies, e.snapshot, nets.get(e.network_id), user_first)
        for e in evals
    }


def _degraded(e, thresholds, constraints):
    return bool(threshold_breaches(e.snapshot, thresholds) or constraint_breaches(e.snapshot, constraints))


def _select(evals, directives, current, imperative, excluded=frozenset()):
    eligible = []
    for e in evals:
        d = directives.get(e.network_id)
        if d is Directive.FORBID_TARGET or not e.feasible or e.network_id in excluded:
            continue
        if d is Directive.REQUIRE_IMPERATIVE_ONLY and not imperative and e.network_id != current:
            continue
        if imperative and e.network_id == current:
            continue
        eligible.append(e)
    preferred = [e for e in eligible if directives.get(e.network_id) is Directive.PREFER_TARGET]
    return argmax_candidate(preferred or eligible, current)


def best_network(evals, policies, config: HandoffConfiguration, nets, current=None, constraints=()):
    """The argmax network an ideal decision would pick: feasible, permitted and not degraded."""
    directives = _directives(evals, policies, config.user_first, nets)
    excluded = {e.network_id for e in evals if _degraded(e, config.thresholds, constraints)}
    best = _select(evals, directives, current, imperative=False, excluded=excluded)
    return best.network_id if best is not None else None


def decide(
    hce: HceState,
    candidate_evals: Sequence[CandidateEvaluation],
    config: HandoffConfiguration,
    policies=(),
    *,
    nets: Optional[Mapping[str, NetworkSpec]] = None,
    constraints=(),
    now: Optional[float] = None,
    rss: Optional[Mapping[str, float]] = None,
) -> Optional[DecisionRecord]:
    """Decision stage. Returns a DecisionRecord, or None to stay put.

    A record with ``where=None`` and ``forced_disconnect=True`` means the link is
    lost and no permitted target exists. Mutates ``hce``'s dwell counter.
    """
    nets = nets or {}
    now = hce.snapshot.time if now is None and hce.snapshot is not None else (now or 0.0)
    evals = list(candidate_evals)
    current = hce.current
    connected = current is not None
    directives = _directives(evals, policies, config.user_first, nets)
    current_eval = next((e for e in evals if e.network_id == current), None)

    cur_forbidden = current_eval is not None and directives.get(current) is Directive.FORBID_TARGET
    imperative = (
        classify_reason(current_eval, None, config.thresholds, constraints=constraints, connected=connected)
        is Reason.IMPERATIVE
        or cur_forbidden
        or not connected
    )

    # scan order: strongest signal first, current network's context is free
    strength = rss or {}
    others = sorted(
        (e for e in evals if e.network_id != current),
        key=lambda e: (-strength.get(e.network_id, e.snapshot.get("RSS", -math.inf)), e.network_id),
    )
    budget = config.decision_budget * (config.imperative_budget_factor if imperative else 1.0)
    if config.eval_cost > 0:
        n_allowed = max(1, int(math.floor((budget - config.decision_base_latency) / config.eval_cost + 1e-9)))
    else:
        n_allowed = len(others)
    considered_others = others[:n_allowed]
    dlat = min(budget, config.decision_base_latency + config.eval_cost * len(considered_others))
    considered = ([current_eval] if current_eval is not None else []) + considered_others

    # degraded networks would trigger an imperative handoff straight away
    excluded = {e.network_id for e in evals if _degraded(e, config.thresholds, constraints)}
    full_best = _select(evals, directives, current, imperative, excluded)
    best = _select(considered, directives, current, imperative, excluded)

    def record(why, target, forced=False):
        return DecisionRecord(
            why=why,
            when=now,
            where=target.network_id if target is not None else None,
            how=config.execution.strategy,
            who=config.who,
            dlat=dlat,
            candidates=tuple(considered),
            source=current,
            best_available=full_best.network_id if full_best is not None else None,
            streak=hce.streak,
            forced_disconnect=forced,
        )

    if imperative:
        hce.reset_streak()
        if best is None:
            if connected and (current_eval is None or cur_forbidden):
                return record(Reason.IMPERATIVE, None, forced=True)
            return None
        return record(Reason.IMPERATIVE, best)

    reason = classify_reason(current_eval, best, config.thresholds, config.hysteresis, constraints, connected)
    if reason is not Reason.OPPORTUNIST:
        hce.reset_streak()
        return None
    if hce.streak_target == best.network_id:
        hce.streak += 1
    else:
        hce.streak_target = best.network_id
        hce.streak = 1
    if hce.streak < config.dwell:
        return None
    rec = record(Reason.OPPORTUNIST, best)
    hce.reset_streak()
    return rec


def execute(world: World, decision: DecisionRecord, exec_model: ExecutionModel, index: int = 0) -> HandoffEvent:
    """Schedule the connection change; completion is checked by :func:`complete`."""
    if decision.where is None:
        raise InputError("execute needs a decision with a target")
    net = world.spec.network(decision.where)
    hol = exec_model.handoff_latency(net.technology)
    il = exec_model.interruption_latency(net.technology)
    start = decision.when + decision.dlat
    return HandoffEvent(
        index=index,
        start=start,
        end=start + hol,
        source=decision.source,
        target=decision.where,
        il=il,
        hol=hol,
        decision=decision,
    )


def complete(world: World, event: HandoffEvent) -> HandoffEvent:
    """Mark the event failed if its target is unreachable at completion time."""
    reachable = {n.id for n, _ in world.reachable_networks()}
    event.failed = event.target not in reachable
    return event


def performance_violations(event: HandoffEvent, constraints, app_class=AppClass.ANY) -> tuple:
    perf = ContextSnapshot(event.end, {"IL": event.il, "HOL": event.hol, "DLat": event.decision.dlat})
    return tuple(constraint_breaches(perf, constraints, app_class))


def seamless_constraint(config: HandoffConfiguration) -> HandoffConstraint:
    return HandoffConstraint("IL", config.seamless_bound, Sense.MAX_ALLOWED, AppClass.ANY)


def _clip01(x):
    return min(1.0, max(0.0, x))


def evaluate(
    event: HandoffEvent,
    pre_snapshot: Optional[ContextSnapshot],
    post_snapshot: Optional[ContextSnapshot],
    specs,
    *,
    config: HandoffConfiguration,
    scorer: Optional[Scorer] = None,
    ranges=None,
    target_net: Optional[NetworkSpec] = None,
    interventions=(),
    history=(),
) -> Optional[dict]:
    """Per-feature scores in [0, 1], or None when the post snapshot is missing.

    seamlessness = (1 - min(1, IL / seamless_bound)) / (1 + degraded steps)
    autonomy     = 0 if an online intervention falls inside the event, else 1
    security     = (1 - min(1, AL/al_bound)) (1 - min(1, SSO/sso_bound)) (1 - min(1, DAR))
    correctness  = mean(beneficial, timely, selective, necessary)
    adaptability = share of scenario segments so far without a defective handoff
    """
    if post_snapshot is None:
        return None
    if scorer is None:
        scorer = Scorer(specs, ranges or {}, config)
    seamless = (1.0 - min(1.0, event.il / config.seamless_bound)) / (1.0 + event.degraded_steps)

    window_end = event.end + config.settle_delay
    intervened = any(event.decision.when <= t <= window_end for t in interventions)
    if target_net is not None and target_net.interventions > 0:
        intervened = True
    autonomy = 0.0 if intervened else 1.0

    if target_net is not None:
        al, sso, dar = target_net.auth_latency, target_net.security_signaling, target_net.attack_rate
    else:
        tv = post_snapshot.networks.get(event.target, {})
        al, sso, dar = tv.get("AL", 0.0), tv.get("SSO", 0.0), tv.get("DAR", 0.0)
    security = (1.0 - min(1.0, al / config.al_bound)) * (1.0 - min(1.0, sso / config.sso_bound)) * (1.0 - min(1.0, dar))

    beneficial = 0.0
    if not event.failed and event.target in post_snapshot.networks:
        post_eval = scorer.evaluate(post_snapshot, [event.target])[0]
        pre_score = -math.inf
        if pre_snapshot is not None and event.source in pre_snapshot.networks:
            pre_score = scorer.evaluate(pre_snapshot, [event.source])[0].score
        beneficial = 1.0 if post_eval.score > pre_score else 0.0
    timely = 0.0 if (event.tardy or event.premature) else 1.0
    selective = 1.0 if event.decision.best_available == event.target else 0.0
    necessary = 0.0 if event.decision.why is Reason.NONE else 1.0
    correctness = (beneficial + timely + selective + necessary) / 4.0

    scores = {
        Feature.SEAMLESSNESS: _clip01(seamless),
        Feature.AUTONOMY: autonomy,
        Feature.SECURITY: _clip01(security),
        Feature.CORRECTNESS: correctness,
    }
    seg = config.segment_length
    idx = int(math.floor(event.start / seg))
    bad = set()
    for prev in history:
        if prev.scores is not None and not prev.successful:
            bad.add(int(math.floor(prev.start / seg)))
    if event.failed or min(scores.values()) < config.boundary:
        bad.add(idx)
    bad = {b for b in bad if b <= idx}
    scores[Feature.ADAPTABILITY] = 1.0 - len(bad) / (idx + 1)
    return {f: scores[f] for f in Feature}


# --------------------------------------------------------------------------
# run loop


def run_scenario(
    scenario: ScenarioSpec,
    config: HandoffConfiguration,
    specs: Sequence[CorrelationSpec],
    policies=(),
    constraints=(),
) -> Trace:
    from .metrics import radar

    world = World(scenario)
    cm = ContextManager(config)
    delivered = cm.delivered if config.context_size is not None or config.context_priority else None
    scorer = Scorer(specs, scenario.ranges, config, delivered)
    nets = {n.id: n for n in scenario.networks}
    app_class = scenario.app_class
    must_hold = list(scenario.application_constraints())
    must_hold += [(c, app_class) for c in constraints]
    seamless = seamless_constraint(config)

    hce = HceState()
    events, steps, disconnects = [], [], []
    attachments = 0
    pending: Optional[HandoffEvent] = None
    pending_pre: Optional[ContextSnapshot] = None
    awaiting_eval: Optional[HandoffEvent] = None
    breach_since: Optional[float] = None
    dt = scenario.dt

    def finish_evaluation(ev, post, t):
        ev.scores = evaluate(
            ev, ev_pre.get(ev.index), post, specs,
            config=config, scorer=scorer, ranges=scenario.ranges,
            target_net=nets[ev.target], interventions=scenario.interventions,
            history=[e for e in events if e is not ev and e.scores is not None],
        )
        if ev.scores is None:
            ev.verdict = "evaluation-incomplete"
            ev.successful = None
        else:
            rep = radar(ev.scores, config.boundary)
            ev.successful = rep.successful and not ev.failed
            ev.verdict = "failed" if ev.failed else ("successful" if rep.successful else "defective")
        hce.to(Phase.IDLE, t)

    ev_pre = {}

    for k in range(1, scenario.n_steps + 1):
        t_prev = hce.last_handoff_time if hce.last_handoff_time is not None else 0.0
        world.performance["ETSLH"] = max(0.0, world.time - t_prev)
        true_snap = world.step()
        t = true_snap.time
        cm.push(true_snap)
        seen = cm.deliver()
        hce.snapshot = seen

        # ground truth for DTIB and tardiness, on the same variables the HCE receives
        truth = cm.filter(true_snap)
        true_ids = discover(world, truth)
        true_evals = scorer.evaluate(truth, true_ids)
        best = best_network(true_evals, policies, config, nets, hce.current, must_hold)
        cur_true = next((e for e in true_evals if e.network_id == hce.current), None)
        degraded = hce.current is not None and (
            cur_true is None
            or not cur_true.feasible
            or bool(threshold_breaches(cur_true.snapshot, config.thresholds))
            or bool(constraint_breaches(cur_true.snapshot, must_hold))
        )
        if degraded:
            if breach_since is None:
                breach_since = t
        else:
            breach_since = None

        # in-flight execution
        if pending is not None:
            if t >= pending.end - 1e-12:
                complete(world, pending)
                if pending.failed:
                    src_ok = pending.source in {n.id for n, _ in world.reachable_networks()}
                    keep_src = config.execution.strategy is Strategy.MAKE_BEFORE_BREAK and src_ok
                    hce.current = pending.source if keep_src else None
                else:
                    hce.current = pending.target
                hce.last_handoff_time = pending.end
                world.performance.update({"HOL": pending.hol, "IL": pending.il, "DLat": pending.decision.dlat})
                hce.to(Phase.EVALUATING, t)
                awaiting_eval, pending = pending, None
            elif t >= pending.start - 1e-12 and config.execution.strategy is Strategy.BREAK_BEFORE_MAKE:
                hce.current = None

        if awaiting_eval is not None and t >= awaiting_eval.end + config.settle_delay - 1e-12:
            finish_evaluation(awaiting_eval, true_snap, t)
            awaiting_eval = None

        if hce.phase is Phase.IDLE:
            ids = discover(world, seen)
            evals = scorer.evaluate(seen, ids)
            hce.to(Phase.DECIDING, t)
            rss = {i: seen.networks[i].get("RSS", -math.inf) for i in ids}
            rec = decide(hce, evals, config, policies, nets=nets, constraints=must_hold, now=t, rss=rss)
            if rec is None:
                hce.to(Phase.IDLE, t)
            elif rec.forced_disconnect:
                disconnects.append((t, hce.current))
                hce.current = None
                hce.reset_streak()
                hce.to(Phase.IDLE, t)
            elif rec.source is None:
                # (re)attachment of an idle terminal, not a handoff
                attachments += 1
                hce.current = rec.where
                hce.to(Phase.IDLE, t)
            else:
                ev = execute(world, rec, config.execution, index=len(events))
                ev.premature = rec.why is Reason.OPPORTUNIST and rec.streak < config.confirm_steps
                if breach_since is not None:
                    ev.degraded_steps = int(round((ev.start - breach_since) / dt))
                    ev.tardy = ev.start - breach_since > config.tardy_tolerance + 1e-12
                ev.violations = performance_violations(ev, [seamless] + [c for c, _ in must_hold], app_class)
                events.append(ev)
                ev_pre[ev.index] = seen
                hce.to(Phase.EXECUTING, t)
                if t >= ev.end - 1e-12:
                    complete(world, ev)
                    if not ev.failed:
                        hce.current = ev.target
                    elif config.execution.strategy is not Strategy.MAKE_BEFORE_BREAK:
                        hce.current = None
                    hce.last_handoff_time = ev.end
                    world.performance.update({"HOL": ev.hol, "IL": ev.il, "DLat": rec.dlat})
                    hce.to(Phase.EVALUATING, t)
                    if config.settle_delay <= 0:
                        finish_evaluation(ev, true_snap, t)
                    else:
                        awaiting_eval = ev
                else:
                    pending = ev
                    if t >= ev.start - 1e-12 and config.execution.strategy is Strategy.BREAK_BEFORE_MAKE:
                        hce.current = None

        steps.append(
            StepRecord(
                k=k,
                time=t,
                current=hce.current,
                best=best,
                in_best=hce.current == best,
                available=tuple(true_ids),
                scores={e.network_id: e.score for e in true_evals},
            )
        )

    for ev in (pending, awaiting_eval):
        if ev is not None:
            ev.scores = None
            ev.successful = None
            ev.verdict = "evaluation-incomplete"

    return Trace(
        spec=scenario,
        config=config,
        events=events,
        snapshots=cm.history,
        steps=steps,
        phase_log=hce.log,
        disconnects=disconnects,
        attachments=attachments,
        delivered_variables=cm.delivered,
        computable_features=scorer.features,
        interventions=sum(1 for x in scenario.interventions if 0 <= x <= scenario.n_steps * dt),
    )


def with_overrides(config: HandoffConfiguration, **kw) -> HandoffConfiguration:
    return replace(config, **kw)
