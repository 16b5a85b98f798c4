"""Acceptance gate. Run with ``pytest -s tests/test_acceptance.py`` to see the lines live."""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from handoffkit.cli import cmd_run
from handoffkit.context import EPS, ContextSnapshot, ExecutionModel, HandoffConfiguration, ToleranceRange
from handoffkit.environment import NetworkSpec, ScenarioSpec, World
from handoffkit.metrics import accumulate, non_dominated_flags, radar, run_radar, tradeoff_sweep
from handoffkit.objectives import (
    CandidateEvaluation,
    CorrelationSpec,
    Feature,
    ObjectiveTable,
    ObjectiveVector,
    argmax_candidate,
    pareto_front,
    scalarize,
)
from handoffkit.pipeline import (
    DecisionRecord,
    Reason,
    execute,
    performance_violations,
    run_scenario,
    seamless_constraint,
)
from handoffkit.scenario import load_scenario_dict

NAMES = ("RSS", "SNR", "NBW", "NL", "ND", "BL", "price", "PPref", "AL", "SSO")
UNIT = {n: ToleranceRange(0.0, 1.0) for n in NAMES}
FEATS = list(Feature)
HYSTERESIS = [round(0.05 * i, 2) for i in range(7)]


@pytest.fixture(scope="module")
def reference(reference_doc):
    return load_scenario_dict(reference_doc)


def random_spec(rng, feature=None, max_vars=5):
    k = int(rng.integers(1, max_vars + 1))
    names = list(rng.choice(NAMES, size=k, replace=False))
    w = rng.random(k)
    w[rng.random(k) < 0.2] = 0.0
    if w.sum() == 0:
        w[:] = 1.0
    w = w / w.sum()
    w[-1] = max(0.0, 1.0 - math.fsum(w[:-1]))
    sign = rng.random(k) < 0.5
    pos = tuple((n, float(x)) for n, x, s in zip(names, w, sign) if s)
    neg = tuple((n, float(x)) for n, x, s in zip(names, w, sign) if not s)
    K = float(rng.choice([1.0, rng.uniform(0.05, 4.0)]))
    return CorrelationSpec(feature or FEATS[int(rng.integers(len(FEATS)))], pos, neg, K)


def brute_front(rows):
    def dom(a, b):
        return all(x >= y for x, y in zip(a, b)) and any(x > y for x, y in zip(a, b))

    return [i for i, v in enumerate(rows) if not any(dom(u, v) for j, u in enumerate(rows) if j != i)]


def test_ac1_monotonicity(criterion):
    rng = np.random.default_rng(2024)
    with criterion("AC1", "objective monotone in every correlated variable (1000 cases)") as c:
        t0 = time.perf_counter()
        bad, strict_checked = [], 0
        for case in range(1000):
            spec = random_spec(rng)
            signs = {n: +1 for n, _ in spec.positives} | {n: -1 for n, _ in spec.negatives}
            weights = dict(spec.positives + spec.negatives)
            base = {n: float(rng.uniform(-0.2, 1.2)) for n in NAMES}
            var = spec.variables[int(rng.integers(len(spec.variables)))]
            raised = dict(base)
            raised[var] = base[var] + float(rng.uniform(0.01, 0.6))
            table = ObjectiveTable([spec], UNIT)
            f0, f1 = table.matrix([ContextSnapshot(0.0, base), ContextSnapshot(0.0, raised)])[:, 0]
            delta = (f1 - f0) * signs[var]
            if delta < -1e-12:
                bad.append((case, var, "reversed", delta))
            n0 = min(max(base[var], EPS), 1.0)
            n1 = min(max(raised[var], EPS), 1.0)
            if weights[var] > 0 and n1 != n0:
                strict_checked += 1
                if not delta > 1e-12:
                    bad.append((case, var, "not strict", delta))
        elapsed = time.perf_counter() - t0
        c.detail = f"{strict_checked} strict checks, {elapsed:.3f}s"
        assert not bad, bad[:3]
        assert elapsed < 1.0


def test_ac2_pareto_oracle(criterion):
    rng = np.random.default_rng(7)
    with criterion("AC2", "pareto_front equals brute-force dominance filter (1000 sets)") as c:
        t0 = time.perf_counter()
        mismatches = 0
        for _ in range(1000):
            n, k = int(rng.integers(1, 9)), int(rng.integers(1, 6))
            if rng.random() < 0.5:
                rows = rng.integers(-3, 4, size=(n, k)).astype(float)
            else:
                rows = rng.normal(size=(n, k))
            vs = [ObjectiveVector(dict(zip(FEATS[:k], r.tolist()))) for r in rows]
            front = pareto_front(vs)
            got = [i for i, v in enumerate(vs) if any(v is f for f in front)]
            mismatches += got != brute_front(rows.tolist())
        elapsed = time.perf_counter() - t0
        c.detail = f"{elapsed:.3f}s"
        assert mismatches == 0
        assert elapsed < 1.0


def test_ac3_always_best_connected_limit(criterion, reference):
    sc, specs, config, policies, constraints = reference
    # instant decisions and zero-latency execution; see the notes on this limit
    cfg = replace(
        config,
        hysteresis=0.0,
        staleness=0,
        dwell=1,
        eval_cost=0.0,
        decision_base_latency=0.0,
        execution=ExecutionModel("make-before-break", 0.0, {}),
    )
    with criterion("AC3", "DTIB = duration within one dt at hysteresis 0, IL 0, staleness 0") as c:
        t0 = time.perf_counter()
        counters = accumulate(run_scenario(sc, cfg, specs, policies, constraints))
        elapsed = time.perf_counter() - t0
        c.detail = f"DTIB {counters.DTIB:.3f} of {counters.duration:.3f}s, {elapsed:.3f}s"
        assert abs(counters.DTIB - counters.duration) <= sc.dt + 1e-9
        assert elapsed < 5.0


def test_ac4_hysteresis_tradeoff(criterion, reference):
    with criterion("AC4", "hysteresis sweep trades DTIB against HOR") as c:
        t0 = time.perf_counter()
        result = tradeoff_sweep(reference, "hysteresis", HYSTERESIS)
        elapsed = time.perf_counter() - t0
        dtib = [p.metrics[0] for p in result.points]
        hor = [-p.metrics[1] for p in result.points]
        flags = non_dominated_flags([p.metrics for p in result.points])
        c.detail = (
            "HOR " + ",".join(f"{h:g}" for h in hor)
            + "; DTIB " + ",".join(f"{d:.1f}" for d in dtib)
            + f"; {sum(flags)} non-dominated; {elapsed:.3f}s"
        )
        assert all(b <= a for a, b in zip(hor, hor[1:]))
        assert dtib[0] == max(dtib)
        assert sum(flags) >= 3
        assert elapsed < 10.0


def test_ac5_signaling_overhead(criterion, reference):
    sc, specs, config, policies, constraints = reference
    with criterion("AC5", "doubling delivered variables doubles SO, computable features never drop") as c:
        runs = {}
        for n in (1, 2, 4, 5, 10, 20):
            trace = run_scenario(sc, replace(config, context_size=n), specs, policies, constraints)
            assert len(trace.delivered_variables) == n
            runs[n] = (accumulate(trace).SO, len(trace.computable_features))
        pairs = [(1, 2), (2, 4), (5, 10), (10, 20)]
        c.detail = "; ".join(f"SO {runs[a][0]:g}->{runs[b][0]:g}, feats {runs[a][1]}->{runs[b][1]}" for a, b in pairs)
        for a, b in pairs:
            assert runs[b][0] == 2 * runs[a][0]
            assert runs[b][1] >= runs[a][1]


def _traces(reference, small_doc):
    sc, specs, config, policies, constraints = reference
    for seed in (1, 2, 3, 4):
        yield run_scenario(replace(sc, seed=seed), replace(config, seed=seed), specs, policies, constraints)
    yield run_scenario(sc, replace(config, dwell=1, hysteresis=0.0), specs, policies, constraints)
    yield run_scenario(sc, replace(config, context_size=5), specs, policies, constraints)
    swept = []
    tradeoff_sweep(reference, "hysteresis", HYSTERESIS, trace_hook=lambda v, t: swept.append(t))
    yield from swept
    small = load_scenario_dict(small_doc)
    yield run_scenario(small.scenario, small.config, small.correlations)
    bbm = replace(small.config, execution=ExecutionModel("break-before-make", 0.12, {}))
    yield run_scenario(small.scenario, bbm, small.correlations)


def test_ac6_accounting_invariants(criterion, reference, small_doc):
    with criterion("AC6", "DTIB + not-in-best = duration, IHOR + OHOR = HOR, verdict = min >= boundary") as c:
        n_traces = n_events = 0
        for trace in _traces(reference, small_doc):
            n_traces += 1
            k = accumulate(trace)
            assert k.DTIB + k.not_in_best == k.duration
            assert k.IHOR + k.OHOR == k.HOR
            assert k.imperative + k.opportunist == k.handoffs
            for e in trace.events:
                if e.scores is None:
                    continue
                n_events += 1
                expect = min(e.scores.values()) >= trace.config.boundary
                assert e.successful == expect
                assert e.verdict == ("successful" if expect else "defective")
                for b in (0.0, 0.5, trace.config.boundary, min(e.scores.values()), 1.0):
                    assert radar(e.scores, b).successful == (min(e.scores.values()) >= b)
            run = run_radar(trace)
            assert run.successful == (min(run.scores.values()) >= trace.config.boundary)
        c.detail = f"{n_traces} traces, {n_events} graded handoffs"


def test_ac7_seamless_bound(criterion):
    config = HandoffConfiguration()
    bound = seamless_constraint(config)
    world = World(ScenarioSpec(1.0, 0.1, (NetworkSpec("b", "P", "wlan", (0, 0), 10.0, -40.0),)))
    cand = CandidateEvaluation("b", ContextSnapshot(1.0, {}), ObjectiveVector({}), True, 0.0)
    rec = DecisionRecord(Reason.OPPORTUNIST, 1.0, "b", "break-before-make", "terminal-controlled", 0.0, (cand,), "a")
    with criterion("AC7", "IL 0.120 s violates the 0.100 s bound, IL 0.080 s does not") as c:
        got = {}
        for il in (0.120, 0.080):
            event = execute(world, rec, ExecutionModel("break-before-make", il, {}))
            assert event.il == il
            got[il] = "IL" in performance_violations(event, [bound])
        c.detail = f"0.120 -> {got[0.120]}, 0.080 -> {got[0.080]}"
        assert got == {0.120: True, 0.080: False}


def test_ac8_determinism(criterion, tmp_path):
    with criterion("AC8", "cmd_run twice with one seed gives byte-identical outputs") as c:
        checked = 0
        for seed in (None, 7):
            a = cmd_run(out=tmp_path / f"a{seed}", seed=seed)
            b = cmd_run(out=tmp_path / f"b{seed}", seed=seed)
            for x, y in zip(
                (a.events, a.snapshots, a.report, a.radar), (b.events, b.snapshots, b.report, b.radar)
            ):
                assert x.read_bytes() == y.read_bytes(), x.name
                checked += 1
        c.detail = f"{checked} file pairs"


def test_ac9_scale_argmax_invariance(criterion):
    rng = np.random.default_rng(99)
    with criterion("AC9", "scaling one variable's normalized values keeps the scalarized argmax (200 sets)") as c:
        flips = 0
        for _ in range(200):
            feats = list(rng.choice(FEATS, size=int(rng.integers(1, 6)), replace=False))
            specs = [random_spec(rng, f) for f in feats]
            w = rng.random(len(feats)) + 0.01
            w = w / w.sum()
            weights = dict(zip(feats, w.tolist()))
            weights[feats[-1]] = max(0.0, 1.0 - math.fsum(w[:-1]))
            used = sorted({n for s in specs for n in s.variables})
            var = used[int(rng.integers(len(used)))]
            factor = float(rng.choice([0.5, 2.0]))
            n = int(rng.integers(2, 9))
            base = []
            for _ in range(n):
                row = {v: float(rng.uniform(1e-3, 1.0)) for v in NAMES}
                row[var] = float(rng.uniform(1e-3, 0.5) if factor == 2.0 else rng.uniform(2e-3, 1.0))
                base.append(row)
            scaled = [dict(r, **{var: r[var] * factor}) for r in base]
            assert all(EPS < r[var] <= 1.0 for r in scaled)
            table = ObjectiveTable(specs, UNIT)

            def winner(rows):
                evals = []
                for i, (r, vec) in enumerate(zip(rows, table.vectors([ContextSnapshot(0.0, r) for r in rows]))):
                    evals.append(CandidateEvaluation(f"n{i}", ContextSnapshot(0.0, r), vec, True, scalarize(vec, weights)))
                return argmax_candidate(evals).network_id

            flips += winner(base) != winner(scaled)
        c.detail = f"{flips} flips"
        assert flips == 0

