"""Per-feature log-utility objectives, feasibility, dominance and scalarization.

For a desirable feature f with positively correlated variables P and
negatively correlated variables N::

    f(v) = sum_{i in P} (K + W_i) ln norm(V_i)  -  sum_{i in N} (K + W_i) ln norm(V_i)

where ``norm`` is :func:`handoffkit.context.normalize_variable`. The handoff
selection problem maximizes the vector (f_1, ..., f_k) over the finite set
of candidate networks, subject to every variable lying in its tolerance range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Sequence

import numpy as np

from . import _kernels
from .context import EPS, ContextSnapshot, ToleranceRange, lookup
from .errors import ConfigurationError, InputError, MissingContextError

WEIGHT_TOL = 1e-9


class Feature(str, Enum):
    SEAMLESSNESS = "Seamlessness"
    AUTONOMY = "Autonomy"
    SECURITY = "Security"
    CORRECTNESS = "Correctness"
    ADAPTABILITY = "Adaptability"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class CorrelationSpec:
    """Variables correlated with one feature, their signs, weights and scaling K."""

    feature: Feature
    positives: tuple = ()
    negatives: tuple = ()
    K: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "feature", Feature(self.feature))
        pos = _pairs(self.positives)
        neg = _pairs(self.negatives)
        object.__setattr__(self, "positives", pos)
        object.__setattr__(self, "negatives", neg)
        names = [n for n, _ in pos + neg]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise ConfigurationError(f"{self.feature}: variables {dup} listed twice (sets must be disjoint)")
        if not names:
            raise ConfigurationError(f"{self.feature}: no correlated variables")
        for n, w in pos + neg:
            lookup(n)
            if not 0.0 <= w <= 1.0:
                raise ConfigurationError(f"{self.feature}: weight of {n} outside [0, 1]")
        total = math.fsum(w for _, w in pos + neg)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ConfigurationError(f"{self.feature}: weights sum to {total:.12g}, expected 1")
        if not (math.isfinite(self.K) and self.K > 0):
            raise ConfigurationError(f"{self.feature}: K must be > 0")

    @property
    def variables(self) -> tuple:
        return tuple(n for n, _ in self.positives + self.negatives)

    @property
    def coefficients(self) -> np.ndarray:
        """Signed (K + W_i), positives first, aligned with :attr:`variables`."""
        return np.array(
            [self.K + w for _, w in self.positives] + [-(self.K + w) for _, w in self.negatives]
        )


def _pairs(items) -> tuple:
    if isinstance(items, Mapping):
        items = items.items()
    return tuple((str(n), float(w)) for n, w in items)


@dataclass(frozen=True)
class ObjectiveVector:
    values: Mapping[Feature, float]

    def __post_init__(self):
        vals = {Feature(k): float(v) for k, v in dict(self.values).items()}
        if not all(math.isfinite(v) for v in vals.values()):
            raise InputError("objective values must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def features(self) -> tuple:
        return tuple(self.values)

    def __getitem__(self, f):
        return self.values[Feature(f)]

    def __len__(self):
        return len(self.values)

    def as_array(self, order=None) -> np.ndarray:
        order = self.features if order is None else order
        return np.array([self.values[Feature(f)] for f in order])


@dataclass(frozen=True)
class CandidateEvaluation:
    network_id: str
    snapshot: ContextSnapshot
    vector: ObjectiveVector
    feasible: bool
    score: float


class ObjectiveTable:
    """Specs and ranges laid out as arrays so many candidates evaluate in one pass."""

    def __init__(self, specs: Sequence[CorrelationSpec], ranges: Mapping[str, ToleranceRange]):
        seen = [s.feature for s in specs]
        if len(set(seen)) != len(seen):
            raise InputError("one correlation spec per feature")
        self.specs = tuple(specs)
        self.features = tuple(seen)
        self._rows = []
        for spec in self.specs:
            missing = [n for n in spec.variables if n not in ranges]
            if missing:
                raise ConfigurationError(f"{spec.feature}: no tolerance range registered for {missing[0]!r}")
            lo = np.array([ranges[n].lower for n in spec.variables], dtype=float)
            hi = np.array([ranges[n].upper for n in spec.variables], dtype=float)
            self._rows.append((spec.variables, lo, hi, spec.coefficients))

    def matrix(self, snapshots: Sequence) -> np.ndarray:
        """(n_candidates, n_features) objective values."""
        out = np.empty((len(snapshots), len(self.specs)))
        for col, (names, lo, hi, coeffs) in enumerate(self._rows):
            raw = np.empty((len(snapshots), len(names)))
            for i, s in enumerate(snapshots):
                for j, n in enumerate(names):
                    if n not in s:
                        raise MissingContextError(n, f"needed by {self.specs[col].feature}")
                    raw[i, j] = s[n]
            if not np.all(np.isfinite(raw)):
                raise InputError(f"non-finite context value for {self.specs[col].feature}")
            norm = _kernels.normalize_matrix(raw, lo, hi, EPS)
            out[:, col] = _kernels.weighted_log_sum(norm, coeffs)
        return out

    def vectors(self, snapshots) -> list:
        m = self.matrix(snapshots)
        return [ObjectiveVector(dict(zip(self.features, row.tolist()))) for row in m]


def objective_value(spec: CorrelationSpec, s, ranges) -> float:
    return float(ObjectiveTable([spec], ranges).matrix([s])[0, 0])


def objective_vector(specs: Sequence[CorrelationSpec], s, ranges) -> ObjectiveVector:
    return ObjectiveTable(specs, ranges).vectors([s])[0]


def objective_from_normalized(norm: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Objective for rows of already-normalized values (each in (eps, 1])."""
    return _kernels.weighted_log_sum(np.ascontiguousarray(norm, dtype=float), np.asarray(coeffs, dtype=float))


def feasible(s, ranges: Mapping[str, ToleranceRange]) -> bool:
    """Every ranged variable present in ``s`` lies inside its range (inclusive)."""
    for name, value in s.values.items():
        rng = ranges.get(name)
        if rng is None:
            continue
        if not (math.isfinite(value) and rng.contains(value)):
            return False
    return True


def dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    """Maximization-sense Pareto dominance of ``a`` over ``b``."""
    if set(a.values) != set(b.values):
        raise InputError("cannot compare objective vectors over different features")
    better = False
    for f, av in a.values.items():
        bv = b.values[f]
        if av < bv:
            return False
        if av > bv:
            better = True
    return better


def pareto_mask(vectors: Sequence[ObjectiveVector]) -> np.ndarray:
    if not vectors:
        return np.zeros(0, dtype=bool)
    order = vectors[0].features
    for v in vectors[1:]:
        if set(v.values) != set(order):
            raise InputError("all candidates must share the feature set")
    arr = np.array([v.as_array(order) for v in vectors], dtype=float)
    return np.asarray(_kernels.pareto_mask(arr), dtype=bool)


def pareto_front(cands: Sequence) -> list:
    """Candidates not dominated by any other, input order kept.

    Accepts CandidateEvaluation objects or bare ObjectiveVectors.
    """
    cands = list(cands)
    vectors = [c.vector if isinstance(c, CandidateEvaluation) else c for c in cands]
    mask = pareto_mask(vectors)
    return [c for c, keep in zip(cands, mask) if keep]


def check_weights(weights: Mapping) -> dict:
    w = {Feature(k): float(v) for k, v in weights.items()}
    if any(not (math.isfinite(v) and v >= 0) for v in w.values()):
        raise ConfigurationError("feature weights must be non-negative")
    total = math.fsum(w.values())
    if abs(total - 1.0) > WEIGHT_TOL:
        raise ConfigurationError(f"feature weights sum to {total:.12g}, expected 1")
    return w


def scalarize(v: ObjectiveVector, feature_weights: Mapping) -> float:
    w = check_weights(feature_weights)
    extra = set(w) - set(v.values)
    if any(w[f] > 0 for f in extra):
        raise ConfigurationError(f"weights given for features absent from the vector: {sorted(map(str, extra))}")
    total = 0.0
    for f, value in v.values.items():
        total += w.get(f, 0.0) * value
    return total


def restrict_weights(feature_weights: Mapping, features) -> dict:
    """Renormalize weights onto ``features``; equal weights if they carry no mass."""
    feats = [Feature(f) for f in features]
    w = {Feature(k): float(v) for k, v in feature_weights.items()}
    mass = math.fsum(w.get(f, 0.0) for f in feats)
    if not feats:
        return {}
    if mass <= 0:
        return {f: 1.0 / len(feats) for f in feats}
    out = {f: w.get(f, 0.0) / mass for f in feats}
    # absorb rounding so check_weights accepts the result
    last = feats[-1]
    out[last] = max(0.0, 1.0 - math.fsum(out[f] for f in feats[:-1]))
    return out


def argmax_candidate(cands: Sequence[CandidateEvaluation], current: Optional[str] = None):
    """Highest score; ties go to ``current``, then to the lowest network id."""
    if not cands:
        return None
    return min(cands, key=lambda c: (-c.score, c.network_id != current, c.network_id))
