"""Deterministic, fixed-step external handoff environment.

Networks with coverage discs and a load process, one moving terminal,
applications and providers. All randomness (random-walk mobility and
random-walk load) is drawn from generators seeded by the scenario seed, so a
given ScenarioSpec always replays the same snapshot sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from . import _kernels
from .context import (
    AppClass,
    ContextSnapshot,
    HandoffConstraint,
    ToleranceRange,
    Verdict,
    check_constraint,
)
from .errors import InputError

NETWORK_VARIABLES = ("RSS", "SNR", "NBW", "NL", "ND", "Dist", "price", "PPref", "AL", "SSO", "DAR", "OUIR")
TERMINAL_VARIABLES = ("BL", "ECR", "Vel", "AppT")


@dataclass(frozen=True)
class LoadProcess:
    """``sine``: mean + amplitude*sin(2*pi*t/period), clamped to [0, 1].

    ``random_walk``: mean-reverting walk started at ``mean`` with per-sqrt-second
    noise ``step_std`` and pull ``reversion`` (1/s), clamped to [0, 1].
    """

    kind: str = "sine"
    mean: float = 0.5
    amplitude: float = 0.0
    period: float = 60.0
    step_std: float = 0.0
    reversion: float = 0.1

    def __post_init__(self):
        if self.kind not in ("sine", "random_walk"):
            raise InputError(f"unknown load process {self.kind!r}")
        if not 0.0 <= self.mean <= 1.0:
            raise InputError("load mean must be in [0, 1]")
        if self.period <= 0:
            raise InputError("load period must be > 0")
        if self.amplitude < 0 or self.step_std < 0 or self.reversion < 0:
            raise InputError("load amplitude, step_std and reversion must be >= 0")


@dataclass(frozen=True)
class NetworkSpec:
    id: str
    provider_id: str
    technology: str
    center: tuple
    radius: float
    p0: float
    d0: float = 1.0
    n_exp: float = 3.0
    bandwidth: float = 10.0
    base_delay: float = 0.05
    load: LoadProcess = field(default_factory=LoadProcess)
    price: float = 0.0
    # None means every terminal is authorized
    authorized_terminals: Optional[frozenset] = None
    noise_floor: float = -100.0
    auth_latency: float = 0.1
    security_signaling: float = 512.0
    attack_rate: float = 0.0
    interventions: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if self.authorized_terminals is not None:
            object.__setattr__(self, "authorized_terminals", frozenset(self.authorized_terminals))
        if not self.radius > 0:
            raise InputError(f"network {self.id}: coverage_radius must be > 0")
        if not self.d0 > 0:
            raise InputError(f"network {self.id}: d0 must be > 0")
        if not self.n_exp > 0:
            raise InputError(f"network {self.id}: path_loss_exponent must be > 0")

    def authorizes(self, terminal_id: str) -> bool:
        return self.authorized_terminals is None or terminal_id in self.authorized_terminals


@dataclass(frozen=True)
class TerminalState:
    position: tuple = (0.0, 0.0)
    velocity: tuple = (0.0, 0.0)
    battery_load: float = 1.0
    energy_rate: float = 0.0
    id: str = "mt0"

    def __post_init__(self):
        object.__setattr__(self, "position", (float(self.position[0]), float(self.position[1])))
        object.__setattr__(self, "velocity", (float(self.velocity[0]), float(self.velocity[1])))
        if not 0.0 <= self.battery_load <= 1.0:
            raise InputError("battery_load must be in [0, 1]")


@dataclass(frozen=True)
class Mobility:
    """``constant`` keeps the terminal's velocity; ``waypoints`` steers through
    ``points`` at ``speed``; ``random_walk`` perturbs the heading by
    N(0, turn_std^2 * dt) each step at constant ``speed``."""

    kind: str = "constant"
    points: tuple = ()
    speed: float = 0.0
    loop: bool = False
    turn_std: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "waypoints", "random_walk"):
            raise InputError(f"unknown mobility kind {self.kind!r}")
        object.__setattr__(self, "points", tuple((float(x), float(y)) for x, y in self.points))
        if self.kind == "waypoints" and not self.points:
            raise InputError("waypoint mobility needs at least one point")
        if self.speed < 0:
            raise InputError("speed must be >= 0")


@dataclass(frozen=True)
class ApplicationSpec:
    name: str
    app_type: AppClass = AppClass.NON_REAL_TIME
    constraints: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "app_type", AppClass(self.app_type))
        object.__setattr__(self, "constraints", tuple(self.constraints))


@dataclass(frozen=True)
class ProviderSpec:
    id: str
    preference: float = 0.5
    home: bool = False


@dataclass(frozen=True)
class ScenarioSpec:
    duration: float
    dt: float
    networks: tuple
    terminal: TerminalState = field(default_factory=TerminalState)
    mobility: Mobility = field(default_factory=Mobility)
    applications: tuple = ()
    providers: Mapping[str, ProviderSpec] = field(default_factory=dict)
    ranges: Mapping[str, ToleranceRange] = field(default_factory=dict)
    seed: int = 1
    name: str = "scenario"
    interventions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "networks", tuple(self.networks))
        object.__setattr__(self, "applications", tuple(self.applications))
        object.__setattr__(self, "interventions", tuple(float(t) for t in self.interventions))
        if not self.dt > 0:
            raise InputError("dt must be > 0")
        if not self.duration >= self.dt:
            raise InputError("duration must be >= dt")
        if not self.networks:
            raise InputError("a scenario needs at least one network")
        ids = [n.id for n in self.networks]
        if len(set(ids)) != len(ids):
            raise InputError("duplicate network ids")

    @property
    def n_steps(self) -> int:
        return int(math.floor(self.duration / self.dt + 1e-9))

    @property
    def app_class(self) -> AppClass:
        if any(a.app_type is AppClass.REAL_TIME for a in self.applications):
            return AppClass.REAL_TIME
        return AppClass.NON_REAL_TIME

    def network(self, net_id: str) -> NetworkSpec:
        for n in self.networks:
            if n.id == net_id:
                return n
        raise KeyError(net_id)

    def application_constraints(self):
        """(constraint, app class) pairs for every active application."""
        return [(c, a.app_type) for a in self.applications for c in a.constraints]


# --------------------------------------------------------------------------


def link_quality(net: NetworkSpec, pos) -> Optional[float]:
    """Log-distance RSS in dB at ``pos``; None when outside the coverage disc."""
    d = math.hypot(pos[0] - net.center[0], pos[1] - net.center[1])
    if d > net.radius:
        return None
    return net.p0 - 10.0 * net.n_exp * math.log10(max(d, net.d0) / net.d0)


def sample_load(net: NetworkSpec, t: float) -> float:
    if t < 0:
        raise InputError("t must be >= 0")
    lp = net.load
    x = lp.mean + lp.amplitude * math.sin(2.0 * math.pi * t / lp.period)
    return min(max(x, 0.0), 1.0)


def _random_walk_series(lp: LoadProcess, n: int, dt: float, rng) -> np.ndarray:
    out = np.empty(n + 1)
    x = lp.mean
    out[0] = x
    noise = rng.standard_normal(n)
    sq = math.sqrt(dt)
    for k in range(n):
        x = x + lp.reversion * (lp.mean - x) * dt + lp.step_std * sq * noise[k]
        x = min(max(x, 0.0), 1.0)
        out[k + 1] = x
    return out


class World:
    """Mutable simulation state; owned by exactly one run."""

    def __init__(self, spec: ScenarioSpec):
        self.spec = spec
        self.k = 0
        self.position = spec.terminal.position
        self.velocity = spec.terminal.velocity
        self.battery = spec.terminal.battery_load
        self.waypoint = 0
        self.rng = np.random.default_rng(spec.seed)
        self.performance = {}
        n = spec.n_steps
        self._series = {}
        for i, net in enumerate(spec.networks):
            if net.load.kind == "random_walk":
                self._series[net.id] = _random_walk_series(
                    net.load, n, spec.dt, np.random.default_rng([spec.seed, i])
                )
        nets = spec.networks
        self._cx = np.array([n.center[0] for n in nets])
        self._cy = np.array([n.center[1] for n in nets])
        self._radius = np.array([n.radius for n in nets], dtype=float)
        self._p0 = np.array([n.p0 for n in nets], dtype=float)
        self._d0 = np.array([n.d0 for n in nets], dtype=float)
        self._nexp = np.array([n.n_exp for n in nets], dtype=float)

    @property
    def time(self) -> float:
        return self.k * self.spec.dt

    def load(self, net: NetworkSpec) -> float:
        series = self._series.get(net.id)
        if series is not None:
            return float(series[min(self.k, len(series) - 1)])
        return sample_load(net, self.time)

    def rss_all(self) -> np.ndarray:
        return _kernels.rss_vector(
            self.position[0], self.position[1],
            self._cx, self._cy, self._radius, self._p0, self._d0, self._nexp,
        )

    def reachable_networks(self):
        rss = self.rss_all()
        out = [(net, float(r)) for net, r in zip(self.spec.networks, rss) if not math.isnan(r)]
        out.sort(key=lambda nr: nr[0].id)
        return out

    def _turn(self):
        mob = self.spec.mobility
        dt = self.spec.dt
        if mob.kind == "waypoints":
            pts = mob.points
            for _ in range(len(pts) + 1):
                if self.waypoint >= len(pts):
                    if not mob.loop:
                        self.velocity = (0.0, 0.0)
                        return
                    self.waypoint = 0
                tx, ty = pts[self.waypoint]
                dx, dy = tx - self.position[0], ty - self.position[1]
                dist = math.hypot(dx, dy)
                if dist > 1e-9:
                    break
                self.waypoint += 1
            else:
                self.velocity = (0.0, 0.0)
                return
            if dist <= mob.speed * dt:
                # land exactly on the waypoint
                self.velocity = (dx / dt, dy / dt)
            else:
                self.velocity = (mob.speed * dx / dist, mob.speed * dy / dist)
        elif mob.kind == "random_walk":
            vx, vy = self.velocity
            heading = math.atan2(vy, vx) if (vx or vy) else 0.0
            heading += mob.turn_std * math.sqrt(dt) * float(self.rng.standard_normal())
            self.velocity = (mob.speed * math.cos(heading), mob.speed * math.sin(heading))

    def step(self) -> ContextSnapshot:
        dt = self.spec.dt
        self._turn()
        self.position = (self.position[0] + self.velocity[0] * dt, self.position[1] + self.velocity[1] * dt)
        self.battery = max(0.0, self.battery - self.spec.terminal.energy_rate * dt)
        self.k += 1
        return self.snapshot()

    def snapshot(self) -> ContextSnapshot:
        spec = self.spec
        values = {
            "BL": self.battery,
            "ECR": spec.terminal.energy_rate,
            "Vel": math.hypot(*self.velocity),
            "AppT": 1.0 if spec.app_class is AppClass.REAL_TIME else 0.0,
        }
        values.update(self.performance)
        networks = {}
        for net, rss in self.reachable_networks():
            load = self.load(net)
            prov = spec.providers.get(net.provider_id)
            networks[net.id] = {
                "RSS": rss,
                "SNR": rss - net.noise_floor,
                "NBW": net.bandwidth * (1.0 - load),
                "NL": load,
                "ND": net.base_delay / max(1.0 - load, 0.05),
                "Dist": math.hypot(self.position[0] - net.center[0], self.position[1] - net.center[1]),
                "price": net.price,
                "PPref": prov.preference if prov is not None else 0.0,
                "AL": net.auth_latency,
                "SSO": net.security_signaling,
                "DAR": net.attack_rate,
                "OUIR": net.interventions,
            }
        return ContextSnapshot(self.time, values, networks)


def step(world: World, dt: float):
    """Advance ``world`` one tick; returns ``(world, snapshot)``."""
    if abs(dt - world.spec.dt) > 1e-12:
        raise InputError(f"step dt {dt} does not match scenario dt {world.spec.dt}")
    snap = world.step()
    return world, snap


def reachable_networks(world: World):
    return world.reachable_networks()


def check_constraints(constraints, s, app_class):
    """Names of the constraint variables violated in ``s``."""
    return [c.variable for c in constraints if check_constraint(c, s, app_class) is Verdict.VIOLATED]


__all__ = [
    "ApplicationSpec",
    "HandoffConstraint",
    "LoadProcess",
    "Mobility",
    "NetworkSpec",
    "ProviderSpec",
    "ScenarioSpec",
    "TerminalState",
    "World",
    "link_quality",
    "reachable_networks",
    "sample_load",
    "step",
]
