"""Event-driven sticky evolution with optional stick/pass control."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from ..core import (
    RATIONAL, TIME_DEDUP, DimensionError, Particle, Scalar, Scenario, SystemState, VecN, coincide,
    jsonable, norm2, scalar_to_json, to_scalar, vaxpy, vec_to_json,
    weighted_mean,
)


class EventCapExceeded(RuntimeError):
    """More collision events than the scenario's ``event_cap``."""


class PolicyError(ValueError):
    """A policy did not match the realized event sequence."""


class Decision(str, enum.Enum):
    STICK = "STICK"
    PASS = "PASS"


STICK = Decision.STICK
PASS = Decision.PASS


class UnionFind:
    """Disjoint sets over ``range(n)`` with path halving."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller root wins so groups are labelled deterministically
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra

    def groups(self) -> List[List[int]]:
        out: Dict[int, List[int]] = {}
        for i in range(len(self.parent)):
            out.setdefault(self.find(i), []).append(i)
        return [g for _, g in sorted(out.items())]


# ----------------------------------------------------------------------------
# data types

@dataclass(frozen=True)
class ClusterRecord:
    """One group of particles found coincident at an event time."""

    members: Tuple[int, ...]
    parts: Tuple[Tuple[int, ...], ...]
    masses: Tuple[Scalar, ...]
    pre_velocities: Tuple[VecN, ...]
    post_velocity: VecN
    position: VecN
    energy_drop: Scalar
    decision: Decision = STICK

    def to_json(self) -> dict:
        return {
            "members": list(self.members),
            "parts": [list(p) for p in self.parts],
            "masses": [scalar_to_json(m) for m in self.masses],
            "pre_velocities": [vec_to_json(v) for v in self.pre_velocities],
            "post_velocity": vec_to_json(self.post_velocity),
            "position": vec_to_json(self.position),
            "energy_drop": scalar_to_json(self.energy_drop),
            "decision": self.decision.value,
        }

    @classmethod
    def from_json(cls, data: dict, backend: str = RATIONAL) -> "ClusterRecord":
        conv = lambda x: to_scalar(x, backend)  # noqa: E731
        vec = lambda v: tuple(conv(c) for c in v)  # noqa: E731
        return cls(tuple(data["members"]), tuple(tuple(p) for p in data["parts"]),
                   tuple(conv(m) for m in data["masses"]),
                   tuple(vec(v) for v in data["pre_velocities"]),
                   vec(data["post_velocity"]), vec(data["position"]),
                   conv(data["energy_drop"]), Decision(data["decision"]))


@dataclass(frozen=True)
class CollisionEvent:
    time: Scalar
    clusters: Tuple[ClusterRecord, ...]

    def to_json(self) -> dict:
        return {"time": scalar_to_json(self.time),
                "clusters": [c.to_json() for c in self.clusters]}

    @classmethod
    def from_json(cls, data: dict, backend: str = RATIONAL) -> "CollisionEvent":
        return cls(to_scalar(data["time"], backend),
                   tuple(ClusterRecord.from_json(c, backend) for c in data["clusters"]))


EventLog = Tuple[CollisionEvent, ...]


def eventlog_to_json(log: Sequence[CollisionEvent]) -> list:
    return [e.to_json() for e in log]


def eventlog_from_json(data: Sequence[dict], backend: str = RATIONAL) -> EventLog:
    return tuple(CollisionEvent.from_json(e, backend) for e in data)


@dataclass(frozen=True)
class Segment:
    """Free flight ``x(t) = position_start + (t - t_start) * velocity``."""

    t_start: Scalar
    t_end: Scalar
    position_start: VecN
    velocity: VecN

    def __post_init__(self):
        if len(self.position_start) != len(self.velocity):
            raise DimensionError(f"dimension mismatch: {len(self.position_start)} vs "
                                 f"{len(self.velocity)}")

    def position_at(self, t: Scalar) -> VecN:
        dt = t - self.t_start
        if not dt:
            return self.position_start
        return tuple(p + dt * v for p, v in zip(self.position_start, self.velocity))

    @property
    def position_end(self) -> VecN:
        return self.position_at(self.t_end)

    def to_json(self) -> dict:
        return {"t_start": scalar_to_json(self.t_start), "t_end": scalar_to_json(self.t_end),
                "position_start": vec_to_json(self.position_start),
                "velocity": vec_to_json(self.velocity)}


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-linear paths, one segment list per original index."""

    masses: Tuple[Scalar, ...]
    segments: Tuple[Tuple[Segment, ...], ...]
    horizon: Scalar
    backend: str = RATIONAL

    def __post_init__(self):
        for i, segs in enumerate(self.segments):
            if not segs:
                raise ValueError(f"index {i} has no segments")
            for a, b in zip(segs, segs[1:]):
                if a.t_end != b.t_start:
                    raise ValueError(f"index {i}: segments are not contiguous")

    def __len__(self) -> int:
        return len(self.segments)

    @property
    def dimension(self) -> int:
        return len(self.segments[0][0].position_start)

    def segment(self, i: int, t: Scalar) -> Segment:
        """The segment of index ``i`` active on ``[t_start, t_end)`` (right-continuous)."""
        segs = self.segments[i]
        for s in segs:
            if s.t_start <= t < s.t_end:
                return s
        return segs[-1]

    def position(self, i: int, t: Scalar) -> VecN:
        return self.segment(i, t).position_at(t)

    def velocity(self, i: int, t: Scalar) -> VecN:
        return self.segment(i, t).velocity

    def initial_position(self, i: int) -> VecN:
        return self.segments[i][0].position_start

    def initial_velocity(self, i: int) -> VecN:
        return self.segments[i][0].velocity

    def breakpoints(self, indices: Optional[Sequence[int]] = None) -> List[Scalar]:
        idx = range(len(self.segments)) if indices is None else indices
        pts = {self.segments[i][0].t_start for i in idx}
        for i in idx:
            pts.update(s.t_end for s in self.segments[i])
        return sorted(pts)

    def to_json(self) -> dict:
        return {
            "backend": self.backend,
            "horizon": scalar_to_json(self.horizon),
            "masses": [scalar_to_json(m) for m in self.masses],
            "segments": [[s.to_json() for s in segs] for segs in self.segments],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Trajectory":
        b = data.get("backend", RATIONAL)
        conv = lambda x: to_scalar(x, b)  # noqa: E731
        segs = tuple(
            tuple(Segment(conv(s["t_start"]), conv(s["t_end"]),
                          tuple(conv(c) for c in s["position_start"]),
                          tuple(conv(c) for c in s["velocity"]))
                  for s in per)
            for per in data["segments"])
        return cls(tuple(conv(m) for m in data["masses"]), segs, conv(data["horizon"]), b)


@dataclass(frozen=True)
class EnergyProfile:
    """Piecewise-constant energy: ``values[k]`` on ``[times[k], times[k+1])``.

    The last value holds from ``times[-1]`` onwards.
    """

    times: Tuple[Scalar, ...]
    values: Tuple[Scalar, ...]

    def __call__(self, t: Scalar) -> Scalar:
        k = 0
        while k + 1 < len(self.times) and self.times[k + 1] <= t:
            k += 1
        return self.values[k]

    def to_json(self) -> dict:
        return {"times": [scalar_to_json(t) for t in self.times],
                "values": [scalar_to_json(v) for v in self.values]}


# ----------------------------------------------------------------------------
# collision detection

def pair_collision_time(a: Particle, b: Particle, tol: Scalar = 0) -> Optional[Scalar]:
    """Least ``t > 0`` at which ``a`` and ``b`` coincide, or None.

    Both particles are taken at a common reference time.  Pairs already
    coincident at the reference time are not reported (a contact that has
    just been resolved is never offered again).
    """
    if len(a.position) != len(b.position):
        raise DimensionError(f"dimension mismatch: {len(a.position)} vs {len(b.position)}")
    # inlined vector arithmetic: this is the innermost loop of every simulation
    dx = tuple(q - p for p, q in zip(a.position, b.position))
    if _is_zero(dx, tol):
        return None
    dv = tuple(q - p for p, q in zip(a.velocity, b.velocity))
    if not tol and isinstance(dx[0], Fraction) and isinstance(dv[0], Fraction):
        return _exact_contact(dx, dv)
    dv2 = sum(c * c for c in dv)
    if not dv2:
        return None
    t = -sum(x * v for x, v in zip(dx, dv)) / dv2
    if t <= 0:
        return None
    if not _is_zero(tuple(x + t * v for x, v in zip(dx, dv)), tol):
        return None
    return t


def _integer_direction(v) -> List[int]:
    """``v`` times the lcm of its denominators."""
    den = 1
    for c in v:
        den = math.lcm(den, c.denominator)
    return [c.numerator * (den // c.denominator) for c in v]


def _exact_contact(dx, dv) -> Optional[Fraction]:
    # dx + t dv = 0 for some t > 0 iff dx and dv are antiparallel; scaling
    # both by positive integers keeps that test exact and Fraction-free
    X, V = _integer_direction(dx), _integer_direction(dv)
    if sum(x * v for x, v in zip(X, V)) >= 0:
        return None
    n = len(X)
    for i in range(n):
        for j in range(i + 1, n):
            if X[i] * V[j] != X[j] * V[i]:
                return None
    k = next(i for i in range(n) if V[i])
    return -dx[k] / dv[k]


def _is_zero(v: VecN, tol: Scalar) -> bool:
    if not tol:
        return not any(v)
    return sum(c * c for c in v) <= tol * tol


def _horizon_cut(t_abs: Scalar, horizon: Scalar, tol: Scalar) -> Optional[Scalar]:
    """``t_abs`` if it is within the horizon, else None.

    Float times a rounding error past the horizon count as on it, so that a
    contact exactly at the horizon does not depend on how it was computed.
    """
    if t_abs <= horizon:
        return t_abs
    if tol and t_abs - horizon <= TIME_DEDUP * max(1.0, abs(horizon)):
        return horizon
    return None


def _clusters_at(parts: Sequence[Particle], dt: Scalar, tol: Scalar,
                 pairs: Optional[Sequence[Tuple[int, int]]] = None) -> List[List[int]]:
    """Groups of ``parts`` coincident after ``dt``, sorted by least member.

    ``pairs`` restricts the exact test to candidate pairs; float runs always
    scan every pair because rounded pair times need not agree.
    """
    moved = [p.position if dt == 0 else vaxpy(p.position, dt, p.velocity) for p in parts]
    if pairs is None or tol:
        pairs = [(i, j) for i in range(len(parts)) for j in range(i + 1, len(parts))]
    uf = UnionFind(len(parts))
    for i, j in pairs:
        if coincide(moved[i], moved[j], tol):
            uf.union(i, j)
    clusters = [g for g in uf.groups() if len(g) > 1]
    clusters.sort(key=lambda g: min(min(parts[k].members) for k in g))
    return clusters


def next_event(state: SystemState, horizon: Scalar, tol: Scalar = 0
               ) -> Optional[Tuple[Scalar, List[List[int]]]]:
    """Earliest collision no later than ``horizon``.

    Returns ``(time, clusters)`` where each cluster lists indices into
    ``state.particles`` that coincide at ``time`` (transitive closure); or
    None when nothing collides before the horizon.
    """
    parts = state.particles
    best = None
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            dt = pair_collision_time(parts[i], parts[j], tol)
            if dt is not None and (best is None or dt < best):
                best = dt
    if best is None:
        return None
    t_abs = _horizon_cut(state.time + best, horizon, tol)
    if t_abs is None:
        return None
    clusters = _clusters_at(parts, t_abs - state.time, tol)
    return (t_abs, clusters) if clusters else None


def merge_cluster(ps: Sequence[Particle], tol: Scalar = 0) -> Particle:
    """Lump coincident particles, conserving mass and momentum."""
    if not ps:
        raise ValueError("cannot merge an empty cluster")
    for p in ps[1:]:
        if not coincide(p.position, ps[0].position, tol):
            raise ValueError("merge_cluster needs coincident particles")
    masses = [p.mass for p in ps]
    mass = sum(masses[1:], masses[0])
    position = ps[0].position if tol == 0 else weighted_mean(masses, [p.position for p in ps])
    velocity = weighted_mean(masses, [p.velocity for p in ps])
    members = frozenset().union(*(p.members for p in ps))
    return Particle(mass, position, velocity, members)


def cluster_energy_drop(ps: Sequence[Particle]) -> Scalar:
    """``sum(m|v|^2)/2 - |sum(m v)|^2 / (2 sum m)``; never negative."""
    mass = sum((p.mass for p in ps[1:]), ps[0].mass)
    mom = ps[0].momentum
    for p in ps[1:]:
        mom = tuple(a + b for a, b in zip(mom, p.momentum))
    before = sum((p.kinetic_energy for p in ps[1:]), ps[0].kinetic_energy)
    drop = before - norm2(mom) / (2 * mass)
    return drop if drop > 0 else 0 * drop


# ----------------------------------------------------------------------------
# evolution

DecideFn = Callable[[int, Scalar, Tuple[Particle, ...]], Decision]


def _simulate(scenario: Scenario, decide: DecideFn) -> Tuple[Trajectory, EventLog]:
    tol = scenario.tolerance
    horizon = scenario.horizon
    state = scenario.initial_state()
    zero = state.time
    n = len(scenario)
    # live particle -> (segment start time, position at start)
    origin = [(zero, p.position) for p in state.particles]
    live = list(state.particles)
    segments: List[List[Segment]] = [[] for _ in range(n)]
    log: List[CollisionEvent] = []
    decisions = 0
    t = zero

    def close(k: int, t_end: Scalar) -> None:
        t0, x0 = origin[k]
        p = live[k]
        if t_end > t0:
            seg = Segment(t0, t_end, x0, p.velocity)
            for m in p.members:
                segments[m].append(seg)

    # absolute pair contact times keyed by member sets; free flight keeps them valid
    pending: Dict[Tuple[frozenset, frozenset], Optional[Scalar]] = {}

    def next_contact():
        best, at_best = None, []
        for i in range(len(live)):
            for j in range(i + 1, len(live)):
                key = (live[i].members, live[j].members)
                if key not in pending:
                    dt = pair_collision_time(live[i], live[j], tol)
                    pending[key] = None if dt is None else t + dt
                when = pending[key]
                if when is None:
                    continue
                if best is None or when < best:
                    best, at_best = when, [(i, j)]
                elif when == best:
                    at_best.append((i, j))
        if best is None:
            return None
        t_abs = _horizon_cut(best, horizon, tol)
        if t_abs is None:
            return None
        clusters = _clusters_at(live, t_abs - t, tol, at_best)
        return (t_abs, clusters) if clusters else None

    while True:
        ev = next_contact()
        if ev is None:
            break
        if len(log) >= scenario.event_cap:
            raise EventCapExceeded(
                f"more than {scenario.event_cap} events before t={horizon}")
        t, clusters = ev
        live_before = live
        live = [Particle(p.mass, vaxpy(x0, t - t0, p.velocity), p.velocity, p.members)
                for p, (t0, x0) in zip(live, origin)]
        records = []
        merged: Dict[int, Particle] = {}
        consumed = set()
        for group in clusters:
            ps = tuple(live[k] for k in group)
            choice = Decision(decide(decisions, t, ps))
            decisions += 1
            if choice is STICK:
                new = merge_cluster(ps, tol)
                drop = cluster_energy_drop(ps)
                for k in group:
                    close(k, t)
                    consumed.add(k)
                merged[group[0]] = new
            else:
                new = None
                drop = 0 * ps[0].mass
            records.append(ClusterRecord(
                members=tuple(sorted(set().union(*(p.members for p in ps)))),
                parts=tuple(tuple(sorted(p.members)) for p in ps),
                masses=tuple(p.mass for p in ps),
                pre_velocities=tuple(p.velocity for p in ps),
                post_velocity=new.velocity if new is not None else ps[0].velocity,
                position=new.position if new is not None else ps[0].position,
                energy_drop=drop,
                decision=choice,
            ))
        log.append(CollisionEvent(t, tuple(records)))
        new_live, new_origin = [], []
        for k, p in enumerate(live):
            if k in merged:
                new_live.append(merged[k])
                new_origin.append((t, merged[k].position))
            elif k not in consumed:
                new_live.append(p)
                new_origin.append(origin[k])
        live, origin = new_live, new_origin
        alive = {p.members for p in live}
        touched = {p.members for g in clusters for p in (live_before[k] for k in g)}
        pending = {k: w for k, w in pending.items()
                   if k[0] in alive and k[1] in alive and (w is None or w > t)
                   and not (k[0] in touched and k[1] in touched)}

    for k in range(len(live)):
        close(k, horizon)
    for i in range(n):
        if not segments[i]:
            # only possible when horizon == 0
            p = scenario.initial_state().particles[i]
            segments[i].append(Segment(zero, horizon, p.position, p.velocity))
    traj = Trajectory(scenario.masses, tuple(tuple(s) for s in segments), horizon,
                      scenario.backend)
    return traj, tuple(log)


def evolve(scenario: Scenario) -> Tuple[Trajectory, EventLog]:
    """The sticky solution on ``[0, horizon]``: fly, merge every cluster, repeat."""
    return _simulate(scenario, lambda k, t, ps: STICK)


def evolve_with_policy(scenario: Scenario, policy: Sequence[Decision],
                       default: Optional[Decision] = None
                       ) -> Tuple[Trajectory, EventLog, EnergyProfile]:
    """Like :func:`evolve` but each cluster follows the next policy decision.

    ``PASS`` leaves every member's velocity untouched.  Without ``default``
    the policy must hold exactly one decision per realized cluster; with it,
    clusters beyond the policy use ``default``.
    """
    policy = [Decision(d) for d in policy]

    def decide(k, t, ps):
        if k < len(policy):
            return policy[k]
        if default is not None:
            return Decision(default)
        raise PolicyError(f"policy has {len(policy)} decisions but event cluster "
                          f"#{k} occurred at t={t}")

    traj, log = _simulate(scenario, decide)
    used = sum(len(e.clusters) for e in log)
    if default is None and used != len(policy):
        raise PolicyError(f"policy has {len(policy)} decisions, only {used} were used")
    from .checks import energy_profile
    return traj, log, energy_profile(traj)


def free_flight(scenario: Scenario) -> Trajectory:
    """Straight lines ``x_i(t) = x_i + t v_i`` for every particle."""
    zero = to_scalar(0, scenario.backend)
    segs = tuple((Segment(zero, scenario.horizon, x, v),)
                 for x, v in zip(scenario.positions, scenario.velocities))
    return Trajectory(scenario.masses, segs, scenario.horizon, scenario.backend)


def eventlog_summary(log: Sequence[CollisionEvent]) -> list:
    """Compact JSON view: times and member groups."""
    return jsonable([{"time": e.time, "clusters": [list(c.members) for c in e.clusters]}
                     for e in log])
