"""Structure of handoff context information.

Variable identities and their source domains, tolerance ranges, snapshots,
constraints, user/provider policies, and the handoff configuration profile.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Mapping, Optional, Sequence

from .errors import ConfigurationError, InputError, MissingContextError

EPS = 1e-6


class Domain(str, Enum):
    USER = "User"
    TERMINAL = "Terminal"
    APPLICATION = "Application"
    NETWORK = "Network"
    PROVIDER = "Provider"
    HANDOFF_PERFORMANCE = "HandoffPerformance"


@dataclass(frozen=True)
class ContextVariableId:
    name: str
    domain: Domain
    description: str = ""

    def __str__(self):
        return self.name


def _reg(domain, *pairs):
    return [ContextVariableId(n, domain, d) for n, d in pairs]


_ALL = (
    _reg(
        Domain.USER,
        ("UPref", "user preferences"),
        ("UPrio", "user priorities"),
        ("UProf", "user profile"),
        ("UHist", "user history"),
    )
    + _reg(
        Domain.TERMINAL,
        ("RSS", "received signal strength, dB"),
        ("SNR", "signal to noise ratio, dB"),
        ("SIR", "signal to interference ratio"),
        ("SNIR", "signal to noise and interference ratio"),
        ("BER", "bit error rate"),
        ("BLER", "block error rate"),
        ("CCI", "co-channel interference"),
        ("CIR", "carrier to interference ratio"),
        ("BT", "battery type"),
        ("BL", "battery load, fraction"),
        ("ECR", "energy-consumption rate, fraction/s"),
        ("TPC", "transmit power in current"),
        ("TPT", "transmit power in target"),
        ("PB", "power budget"),
        ("Vel", "terminal speed, m/s"),
        ("Dist", "distance to the base station, m"),
        ("Loc", "location"),
        ("MDir", "movement direction"),
        ("GCA", "coverage area"),
    )
    + _reg(
        Domain.APPLICATION,
        ("LP", "lost packets"),
        ("DP", "delayed packets"),
        ("CP", "corrupted packets"),
        ("DuP", "duplicated packets"),
        ("DTR", "data transfer rate (goodput)"),
        ("PJ", "packet jitter"),
        ("OOD", "out-of-order delivery"),
        ("AppT", "application type"),
    )
    + _reg(
        Domain.NETWORK,
        ("NBW", "available network bandwidth, Mb/s"),
        ("NL", "network load, fraction"),
        ("ND", "network delay, s"),
        ("NJ", "network jitter"),
        ("NT", "network throughput"),
        ("NMTU", "network maximum transmission unit"),
    )
    + _reg(
        Domain.PROVIDER,
        ("price", "connection fee, currency/unit"),
        ("BillM", "billing model"),
        ("Roam", "roaming agreements"),
        ("CovMap", "coverage area maps"),
        ("AAA", "security management"),
        ("SrvT", "types of services"),
        ("PPref", "provider preference for the network, [0,1]"),
        ("PPrio", "provider priorities"),
    )
    + _reg(
        Domain.HANDOFF_PERFORMANCE,
        ("CB", "call blocking"),
        ("CD", "call dropping"),
        ("HOB", "handoff blocking"),
        ("HOR", "handoff rate, 1/min"),
        ("HOL", "handoff latency, s"),
        ("DLat", "decision latency, s"),
        ("ExLat", "execution latency, s"),
        ("EvLat", "evaluation latency, s"),
        ("HOType", "handoff type"),
        ("ETSLH", "elapsed time since last handoff, s"),
        ("IR", "interruptions rate, 1/min"),
        ("IL", "interruption latency, s"),
        ("DR", "degradations rate"),
        ("DL", "degradation latency"),
        ("DI", "degradation intensity"),
        ("UF", "utility function"),
        ("SO", "signaling overload, bytes/min"),
        ("SSO", "security signaling overload, bytes"),
        ("ImpR", "improvement rate"),
        ("AppImpR", "application improvement rate"),
        ("UsrImpR", "user improvement rate"),
        ("TermImpR", "terminal improvement rate"),
        ("SHOR", "successful handoff rate"),
        ("IHOR", "imperative handoff rate"),
        ("OHOR", "opportunist handoff rate"),
        ("DTIB", "dwell time in the best network, s"),
        ("AL", "authentication latency, s"),
        ("DAR", "detected attacks rate"),
        ("OUIR", "online user interventions rate"),
        ("THOR", "tardy handoff rate"),
        ("PHOR", "premature handoff rate"),
    )
)

REGISTRY: Mapping[str, ContextVariableId] = MappingProxyType({v.name: v for v in _ALL})
assert len(REGISTRY) == len(_ALL), "duplicate context variable"


def lookup(name: str) -> ContextVariableId:
    try:
        return REGISTRY[name]
    except KeyError:
        raise ConfigurationError(f"unknown context variable {name!r}") from None


def is_registered(name: str) -> bool:
    return name in REGISTRY


@dataclass(frozen=True)
class ToleranceRange:
    lower: float
    upper: float

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise InputError("tolerance range bounds must be finite")
        if not self.lower < self.upper:
            raise InputError(f"tolerance range needs lower < upper, got [{self.lower}, {self.upper}]")

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def normalize_variable(value: float, rng: ToleranceRange) -> float:
    """Min-max scale ``value`` into ``[EPS, 1]`` against its tolerance range."""
    if not math.isfinite(value):
        raise InputError(f"cannot normalize non-finite value {value!r}")
    x = (value - rng.lower) / (rng.upper - rng.lower)
    return min(max(x, EPS), 1.0)


@dataclass(frozen=True)
class ContextSnapshot:
    """Context values observed at ``time``.

    ``values`` holds terminal-wide variables. ``networks`` holds, per network id,
    the variables that differ between candidates (RSS, NL, price, ...).
    ``view(net_id)`` flattens the two into what a single candidate sees.
    """

    time: float
    values: Mapping[str, float]
    networks: Mapping[str, Mapping[str, float]] = field(default_factory=dict)
    network: Optional[str] = None

    def __post_init__(self):
        if not self.time >= 0:
            raise InputError(f"snapshot time must be >= 0, got {self.time}")

    def __getitem__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise MissingContextError(name, f"t={self.time:g}") from None

    def __contains__(self, name):
        return name in self.values

    def get(self, name, default=None):
        return self.values.get(name, default)

    def view(self, net_id: str) -> ContextSnapshot:
        merged = dict(self.values)
        merged.update(self.networks[net_id])
        return ContextSnapshot(self.time, merged, network=net_id)

    def restrict(self, names) -> ContextSnapshot:
        """Keep only the variables in ``names`` (context delivery subset)."""
        keep = set(names)
        return ContextSnapshot(
            self.time,
            {k: v for k, v in self.values.items() if k in keep},
            {n: {k: v for k, v in vals.items() if k in keep} for n, vals in self.networks.items()},
            self.network,
        )


class AppClass(str, Enum):
    REAL_TIME = "real-time"
    NON_REAL_TIME = "non-real-time"
    ANY = "any"


class Sense(str, Enum):
    MAX_ALLOWED = "max-allowed"
    MIN_REQUIRED = "min-required"


class Verdict(str, Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    INAPPLICABLE = "inapplicable"


@dataclass(frozen=True)
class HandoffConstraint:
    variable: str
    bound: float
    sense: Sense = Sense.MAX_ALLOWED
    applies_to: AppClass = AppClass.ANY

    def __post_init__(self):
        lookup(self.variable)
        if not math.isfinite(self.bound):
            raise InputError(f"constraint bound on {self.variable} must be finite")
        object.__setattr__(self, "sense", Sense(self.sense))
        object.__setattr__(self, "applies_to", AppClass(self.applies_to))


def check_constraint(c: HandoffConstraint, s, app_class) -> Verdict:
    app_class = AppClass(app_class)
    if c.applies_to is not AppClass.ANY and app_class is not AppClass.ANY and c.applies_to is not app_class:
        return Verdict.INAPPLICABLE
    value = s[c.variable]
    if c.sense is Sense.MAX_ALLOWED:
        bad = value > c.bound
    else:
        bad = value < c.bound
    return Verdict.VIOLATED if bad else Verdict.SATISFIED


# --------------------------------------------------------------------------
# policies


class Directive(str, Enum):
    FORBID_TARGET = "forbid-target"
    PREFER_TARGET = "prefer-target"
    REQUIRE_IMPERATIVE_ONLY = "require-imperative-only"


_OPS = {
    ">": operator.gt,
    ">=": operator.ge,
    "<": operator.lt,
    "<=": operator.le,
    "==": operator.eq,
    "!=": operator.ne,
    "in": lambda a, b: a in b,
    "not in": lambda a, b: a not in b,
}

# pseudo-variables matched against the target network rather than the snapshot
TARGET_KEYS = ("network", "provider", "technology")


@dataclass(frozen=True)
class Condition:
    var: str
    op: str
    value: object

    def __post_init__(self):
        if self.op not in _OPS:
            raise ConfigurationError(f"unknown policy operator {self.op!r}")
        if self.var not in TARGET_KEYS:
            lookup(self.var)
        if isinstance(self.value, list):
            object.__setattr__(self, "value", tuple(self.value))

    def matches(self, s, target) -> bool:
        if self.var in TARGET_KEYS:
            if target is None:
                return False
            actual = {
                "network": getattr(target, "id", None),
                "provider": getattr(target, "provider_id", None),
                "technology": getattr(target, "technology", None),
            }[self.var]
        else:
            # undelivered context cannot trigger a rule
            if self.var not in s:
                return False
            actual = s[self.var]
        return bool(_OPS[self.op](actual, self.value))


@dataclass(frozen=True)
class PolicyRule:
    condition: Condition
    directive: Directive

    def __post_init__(self):
        object.__setattr__(self, "directive", Directive(self.directive))


@dataclass(frozen=True)
class HandoffPolicy:
    owner: str
    rules: tuple = ()

    def __post_init__(self):
        if self.owner not in ("user", "provider"):
            raise ConfigurationError(f"policy owner must be 'user' or 'provider', got {self.owner!r}")
        object.__setattr__(self, "rules", tuple(self.rules))


def apply_policies(
    policies: Sequence[HandoffPolicy], s, target, user_first: bool = True
) -> Optional[Directive]:
    """First matching rule's directive, scanning one owner's policies before the other's."""
    first, second = ("user", "provider") if user_first else ("provider", "user")
    for owner in (first, second):
        for policy in policies:
            if policy.owner != owner:
                continue
            for rule in policy.rules:
                if rule.condition.matches(s, target):
                    return rule.directive
    return None


# --------------------------------------------------------------------------
# configuration


class Strategy(str, Enum):
    BREAK_BEFORE_MAKE = "break-before-make"
    MAKE_BEFORE_BREAK = "make-before-break"


@dataclass(frozen=True)
class ExecutionModel:
    strategy: Strategy = Strategy.BREAK_BEFORE_MAKE
    base_latency: float = 0.05
    technology_latency: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        object.__setattr__(self, "technology_latency", dict(self.technology_latency))
        if self.base_latency < 0 or any(v < 0 for v in self.technology_latency.values()):
            raise ConfigurationError("execution latencies must be >= 0")

    def handoff_latency(self, technology: str) -> float:
        return self.base_latency + self.technology_latency.get(technology, 0.0)

    def interruption_latency(self, technology: str) -> float:
        if self.strategy is Strategy.MAKE_BEFORE_BREAK:
            return 0.0
        return self.handoff_latency(technology)


FEATURES = ("Seamlessness", "Autonomy", "Security", "Correctness", "Adaptability")


@dataclass(frozen=True)
class HandoffConfiguration:
    """Handoff profile: thresholds, timers, hysteresis, weights and friends.

    Times are seconds and scores are objective-score units. ``feature_weights``
    drives scalarization; ``thresholds`` are per-variable imperative triggers
    (signal-quality keys such as ``RSS`` are minimums, the rest maximums; see
    ``pipeline.HIGHER_IS_BETTER``).
    """

    hysteresis: float = 0.1
    decision_budget: float = 0.2
    thresholds: Mapping[str, float] = field(default_factory=lambda: {"RSS": -95.0})
    feature_weights: Mapping[str, float] = field(
        default_factory=lambda: {f: 0.2 for f in FEATURES}
    )
    seed: int = 1
    dwell: int = 3
    confirm_steps: int = 3
    staleness: int = 0
    settle_delay: float = 0.0
    eval_cost: float = 0.01
    decision_base_latency: float = 0.0
    imperative_budget_factor: float = 0.5
    execution: ExecutionModel = field(default_factory=ExecutionModel)
    seamless_bound: float = 0.100
    boundary: float = 0.6
    tardy_tolerance: float = 0.2
    bytes_per_variable: int = 16
    context_size: Optional[int] = None
    context_priority: tuple = ()
    segment_length: float = 10.0
    al_bound: float = 1.0
    sso_bound: float = 4096.0
    who: str = "terminal-controlled"
    user_first: bool = True
    user_variables: tuple = ("price",)
    provider_variables: tuple = ("PPref",)

    def __post_init__(self):
        if self.hysteresis < 0:
            raise ConfigurationError("hysteresis must be >= 0")
        if self.decision_budget < 0:
            raise ConfigurationError("decision_budget must be >= 0")
        if self.dwell < 1 or self.confirm_steps < 1:
            raise ConfigurationError("dwell and confirm_steps must be >= 1")
        if self.staleness < 0:
            raise ConfigurationError("staleness must be >= 0")
        if self.settle_delay < 0 or self.eval_cost < 0 or self.decision_base_latency < 0:
            raise ConfigurationError("timers must be >= 0")
        if not 0.0 <= self.boundary <= 1.0:
            raise ConfigurationError("boundary must be in [0, 1]")
        if self.context_size is not None and self.context_size < 0:
            raise ConfigurationError("context_size must be >= 0")
        if self.who not in ("terminal-controlled", "network-controlled"):
            raise ConfigurationError(f"unknown handoff controller {self.who!r}")
        for name in self.thresholds:
            lookup(name)
        for name in tuple(self.context_priority) + tuple(self.user_variables) + tuple(self.provider_variables):
            lookup(name)
        object.__setattr__(self, "thresholds", dict(self.thresholds))
        object.__setattr__(self, "feature_weights", dict(self.feature_weights))
        object.__setattr__(self, "context_priority", tuple(self.context_priority))
        object.__setattr__(self, "user_variables", tuple(self.user_variables))
        object.__setattr__(self, "provider_variables", tuple(self.provider_variables))
