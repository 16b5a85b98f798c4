import math
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from handoffkit.context import ContextSnapshot, HandoffConfiguration
from handoffkit.environment import NetworkSpec, ScenarioSpec
from handoffkit.errors import InputError
from handoffkit.metrics import (
    accumulate,
    mix_preferences,
    non_dominated_flags,
    radar,
    run_radar,
    tradeoff_sweep,
)
from handoffkit.objectives import CandidateEvaluation, Feature, ObjectiveVector
from handoffkit.pipeline import DecisionRecord, HandoffEvent, Reason, StepRecord, Trace
from handoffkit.scenario import load_scenario_dict

FEATS = list(Feature)


def synthetic_trace(n_events, n_steps=600, dt=0.1, in_best=None, reasons=None):
    spec = ScenarioSpec(n_steps * dt, dt, (NetworkSpec("a", "P", "wlan", (0, 0), 10.0, -40.0),))
    reasons = reasons or [Reason.OPPORTUNIST] * n_events
    cand = CandidateEvaluation("a", ContextSnapshot(0.0, {}), ObjectiveVector({}), True, 0.0)
    events = []
    for i, why in enumerate(reasons):
        d = DecisionRecord(why, float(i), "a", "make-before-break", "terminal-controlled", 0.01, (cand,))
        events.append(HandoffEvent(i, float(i), float(i) + 0.05, "a", "a", 0.0, 0.05, d))
    in_best = in_best if in_best is not None else [True] * n_steps
    steps = [StepRecord(k + 1, (k + 1) * dt, "a", "a" if b else "x", b, ("a",), {}) for k, b in enumerate(in_best)]
    return Trace(spec, HandoffConfiguration(), events, [], steps, [], [], 1, ("RSS",), (), 0)


def test_three_handoffs_per_minute():
    c = accumulate(synthetic_trace(3))
    assert c.duration == pytest.approx(60.0)
    assert c.HOR == pytest.approx(3.0)


def test_always_best_dtib_is_duration():
    c = accumulate(synthetic_trace(0))
    assert c.DTIB == pytest.approx(c.duration)
    assert c.HOR == 0.0 and c.SHOR == 1.0


@settings(max_examples=50)
@given(st.lists(st.booleans(), min_size=1, max_size=300), st.lists(st.booleans(), max_size=20))
def test_accounting_exact(in_best, kinds):
    reasons = [Reason.IMPERATIVE if k else Reason.OPPORTUNIST for k in kinds]
    c = accumulate(synthetic_trace(len(reasons), n_steps=len(in_best), in_best=in_best, reasons=reasons))
    assert c.dtib_steps + round(c.not_in_best / 0.1) == len(in_best)
    assert c.IHOR + c.OHOR == c.HOR
    assert c.DTIB <= c.duration + 1e-12
    assert all(v >= 0 for v in (c.HOR, c.IR, c.SO, c.THOR, c.PHOR, c.OUIR))


def test_radar_examples():
    s = dict(zip(FEATS, (0.8, 0.9, 0.7, 0.75, 0.85)))
    r = radar(s, 0.6)
    assert r.successful and r.outliers == () and r.verdict == "successful"
    s[Feature.SECURITY] = 0.4
    r = radar(s, 0.6)
    assert r.verdict == "defective" and r.outliers == (Feature.SECURITY,)
    assert radar({f: 0.0 for f in FEATS}, 0.0).successful


def test_radar_errors():
    with pytest.raises(InputError):
        radar({Feature.SECURITY: 0.5}, 0.6)
    with pytest.raises(InputError):
        radar({f: 1.2 for f in FEATS}, 0.6)
    with pytest.raises(InputError):
        radar({f: 0.5 for f in FEATS}, 1.5)


@given(st.lists(st.floats(0, 1), min_size=5, max_size=5), st.floats(0, 1))
def test_radar_matches_bruteforce(scores, boundary):
    r = radar(dict(zip(FEATS, scores)), boundary)
    assert r.successful == (min(scores) >= boundary)
    assert set(r.outliers) == {f for f, v in zip(FEATS, scores) if v < boundary}


@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=1, max_size=10))
def test_non_dominated_flags_match_oracle(pairs):
    def dom(a, b):
        return a[0] >= b[0] and a[1] >= b[1] and a != b

    expect = [not any(dom(q, p) for q in pairs) for p in pairs]
    assert non_dominated_flags([tuple(map(float, p)) for p in pairs]) == expect


def test_mix_preserves_weight_sums(reference_doc):
    loaded = load_scenario_dict(reference_doc)
    for mix in (0.0, 0.3, 1.0):
        for spec in mix_preferences(loaded.correlations, ("price",), ("PPref",), mix):
            assert math.fsum(w for _, w in spec.positives + spec.negatives) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(InputError):
        mix_preferences(loaded.correlations, ("price",), ("PPref",), 1.5)


def test_sweep_errors(reference_doc):
    loaded = load_scenario_dict(reference_doc)
    with pytest.raises(InputError):
        tradeoff_sweep(loaded, "hysteresis", [])
    with pytest.raises(InputError):
        tradeoff_sweep(loaded, "speed", [1])


def test_hysteresis_extremes(reference_doc):
    loaded = load_scenario_dict(reference_doc)
    r = tradeoff_sweep(loaded, "hysteresis", [0.0, 0.15, 0.3])
    dtib = [p.metrics[0] for p in r.points]
    hor = [-p.metrics[1] for p in r.points]
    assert dtib[0] == max(dtib) and hor[0] == max(hor)
    assert hor[-1] < hor[0]
    assert [p.non_dominated for p in r.points] == non_dominated_flags([p.metrics for p in r.points])


@pytest.mark.parametrize("param,values", [
    ("decision_budget", [0.02, 0.2]),
    ("context_size", [4, 20]),
    ("user_provider_weight_mix", [0.0, 1.0]),
])
def test_other_sweeps_run(reference_doc, param, values):
    r = tradeoff_sweep(load_scenario_dict(reference_doc), param, values)
    assert len(r.points) == 2
    assert all(len(p.metrics) == 2 and all(math.isfinite(x) for x in p.metrics) for p in r.points)


def test_weight_mix_moves_the_preferences(reference_doc):
    r = tradeoff_sweep(load_scenario_dict(reference_doc), "user_provider_weight_mix", [0.0, 1.0])
    (u0, p0), (u1, p1) = (p.metrics for p in r.points)
    assert u0 >= u1 and p1 >= p0


def test_run_radar_no_events():
    rep = run_radar(synthetic_trace(0))
    assert rep.successful and all(v == 1.0 for v in rep.scores.values())


def test_shor_counts_successful(small):
    from handoffkit.pipeline import run_scenario

    sc, specs, config, _, _ = small
    trace = run_scenario(sc, config, specs)
    graded = [e for e in trace.events if e.scores is not None]
    c = accumulate(trace)
    assert c.SHOR == sum(e.successful for e in graded) / len(graded)
    trace2 = run_scenario(sc, replace(config, boundary=1.0), specs)
    assert accumulate(trace2).SHOR <= c.SHOR
