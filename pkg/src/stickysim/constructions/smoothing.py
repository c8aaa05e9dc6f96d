"""Replace point masses by small clouds that collapse onto them.

A cloud around ``center`` with parameter ``s`` has radius ``r = s**2`` and
velocity field ``v(x) = base_v + (center - x) / s``, so every sample sits at
``center + s * base_v`` at time ``s``.  Sample masses follow the bump
``a * exp(-1 / (r**2 - |x - center|**2))``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..core import (
    RATIONAL, Particle, Scalar, Scenario, VecN, dot, norm2, to_scalar, vadd, vaxpy, vscale,
    vsub,
)

# exp(-LOG_FLOOR) is the smallest relative weight kept for a sample
LOG_FLOOR = 690.0


@dataclass(frozen=True)
class BallCloud:
    center: VecN
    s: Scalar
    base_velocity: VecN
    mass: Scalar
    amplitude: float = 1.0

    @property
    def radius(self) -> Scalar:
        return self.s * self.s

    def contains(self, x: VecN) -> bool:
        """Strictly inside the ball."""
        return norm2(vsub(x, self.center)) < self.radius ** 2


def smooth_bump(cloud: BallCloud, x: VecN) -> float:
    """Bump density at ``x``; zero on and outside the sphere of radius ``r``."""
    r2 = float(cloud.radius) ** 2
    d2 = float(norm2(vsub(x, cloud.center)))
    if d2 >= r2:
        return 0.0
    return cloud.amplitude * math.exp(-1.0 / (r2 - d2))


def _relative_log_weight(r2: float, d2: float) -> float:
    """``log(psi(x) / psi(center))`` computed without underflow."""
    return -d2 / (r2 * (r2 - d2))


def collapse_velocity(center: VecN, s: Scalar, base_v: VecN, x: VecN) -> VecN:
    """``base_v + (center - x) / s``."""
    return vaxpy(base_v, 1 / s, vsub(center, x))


def _effective_radius(r: float) -> float:
    """Radius beyond which the bump is below ``exp(-LOG_FLOOR)`` of its peak."""
    r2 = r * r
    d2 = LOG_FLOOR * r2 * r2 / (1.0 + LOG_FLOOR * r2)
    return min(r, math.sqrt(d2))


def discretize_ball(cloud: BallCloud, samples: int, seed: int = 0,
                    backend: Optional[str] = None, symmetric: bool = True,
                    denominator: int = 2 ** 16) -> List[Particle]:
    """Seeded point samples of ``cloud`` with masses proportional to the bump.

    Positions are drawn uniformly from the part of the ball where the bump is
    representable, rejecting points on or outside the sphere.  With
    ``symmetric`` samples come in pairs mirrored through the center (plus the
    center itself for odd counts), which puts their barycenter exactly at the
    center.  Masses are normalized to ``cloud.mass`` exactly.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if backend is None:
        backend = RATIONAL if isinstance(cloud.s, Fraction) else "float"
    conv = (lambda x: to_scalar(x, backend))
    center = tuple(conv(c) for c in cloud.center)
    s = conv(cloud.s)
    r = s * s
    n = len(center)
    rng = random.Random(seed)
    reach = _effective_radius(float(r))
    # rational reach as a fraction of r so tiny balls keep small denominators
    reach_q = (r * Fraction(reach / float(r)).limit_denominator(denominator)
               if backend == RATIONAL else reach)
    r2f = float(r) ** 2

    def draw() -> VecN:
        if backend == RATIONAL:
            return tuple(reach_q * Fraction(rng.randint(-denominator, denominator), denominator)
                         for _ in range(n))
        return tuple(rng.uniform(-reach, reach) for _ in range(n))

    offsets: List[VecN] = []
    seen = set()
    if symmetric and samples % 2 == 1:
        offsets.append(tuple(0 * c for c in center))
        seen.add(offsets[0])
    tries = 0
    while len(offsets) < samples:
        tries += 1
        if tries > 10_000 * samples:
            raise RuntimeError("could not place samples inside the ball")
        off = draw()
        d2 = norm2(off)
        if d2 >= r * r or off in seen or (symmetric and d2 == 0):
            continue
        if _relative_log_weight(r2f, float(d2)) < -LOG_FLOOR:
            continue
        mirror = tuple(-c for c in off)
        if symmetric and mirror in seen:
            continue
        offsets.append(off)
        seen.add(off)
        if symmetric:
            offsets.append(mirror)
            seen.add(mirror)

    logw = [_relative_log_weight(r2f, float(norm2(o))) for o in offsets]
    top = max(logw)
    weights = [math.exp(w - top) for w in logw]
    if backend == RATIONAL:
        weights = [Fraction(w) for w in weights]
    total = sum(weights)
    mass = conv(cloud.mass)
    base_v = tuple(conv(c) for c in cloud.base_velocity)
    out = []
    for k, (off, w) in enumerate(zip(offsets, weights)):
        x = vadd(center, off)
        out.append(Particle(mass * w / total, x, collapse_velocity(center, s, base_v, x),
                            frozenset([k])))
    return out


def cloud_momentum(cloud: BallCloud, particles: Sequence[Particle]) -> VecN:
    """``M base_v + sum(m_j (center - x_j)) / s`` evaluated on the samples."""
    total = sum((p.mass for p in particles[1:]), particles[0].mass)
    out = vscale(total, cloud.base_velocity)
    for p in particles:
        out = vaxpy(out, p.mass / cloud.s, vsub(cloud.center, p.position))
    return out


# ----------------------------------------------------------------------------
# whole scenarios

@dataclass(frozen=True)
class SmoothedScenario:
    scenario: Scenario
    clouds: Tuple[BallCloud, ...]
    groups: Dict[int, int] = field(hash=False)   # scenario index -> base particle index
    halvings: int = 0

    @property
    def collapse_times(self) -> Tuple[Scalar, ...]:
        return tuple(c.s for c in self.clouds)


def _min_gap2(a: BallCloud, b: BallCloud, t_end: Scalar) -> Scalar:
    """Least squared center distance over ``[0, t_end]``."""
    dx = vsub(b.center, a.center)
    dv = vsub(b.base_velocity, a.base_velocity)
    dv2 = norm2(dv)
    t = 0 * t_end if dv2 == 0 else -dot(dx, dv) / dv2
    t = min(max(t, 0 * t_end), t_end)
    return norm2(vaxpy(dx, t, dv))


def isolation_conflicts(clouds: Sequence[BallCloud]) -> List[Tuple[int, int]]:
    """Pairs whose balls overlap at t = 0 or whose moving tubes may meet.

    While cloud ``i`` collapses its samples stay within ``r_i`` of the moving
    center ``center + t base_v``; afterwards the compound follows that center
    exactly (symmetric sampling).  Two clouds are isolated when their centers
    stay more than ``r_i + r_j`` apart until both have collapsed.
    """
    bad = []
    for i in range(len(clouds)):
        for j in range(i + 1, len(clouds)):
            a, b = clouds[i], clouds[j]
            reach = a.radius + b.radius
            if not _min_gap2(a, b, max(a.s, b.s)) > reach * reach:
                bad.append((i, j))
    return bad


def smooth_scenario(base: Scenario, s_schedule: Union[Scalar, Sequence[Scalar]],
                    samples: int = 5, seed: int = 0, s_floor=Fraction(1, 2 ** 12),
                    horizon=None) -> SmoothedScenario:
    """Replace every point mass of ``base`` by a collapsing cloud.

    ``s_schedule`` gives the starting ``s`` per particle (or one value for
    all).  Offending pairs have both ``s`` halved until all balls are disjoint
    and isolated during their collapse; dropping below ``s_floor`` is an error.
    """
    b = base.backend
    n = len(base)
    if isinstance(s_schedule, (list, tuple)):
        if len(s_schedule) != n:
            raise ValueError("s_schedule length must match the particle count")
        s_vals = [to_scalar(s, b) for s in s_schedule]
    else:
        s_vals = [to_scalar(s_schedule, b)] * n
    floor = to_scalar(s_floor, b)

    def build():
        return [BallCloud(base.positions[i], s_vals[i], base.velocities[i], base.masses[i])
                for i in range(n)]

    halvings = 0
    clouds = build()
    while True:
        bad = isolation_conflicts(clouds)
        if not bad:
            break
        for i in sorted({k for pair in bad for k in pair}):
            s_vals[i] = s_vals[i] / 2
            halvings += 1
            if s_vals[i] < floor:
                raise ValueError(f"cloud {i} needs s below the floor {s_floor}")
        clouds = build()

    masses, positions, velocities, groups = [], [], [], {}
    for i, cloud in enumerate(clouds):
        for p in discretize_ball(cloud, samples, seed=seed * 1_000_003 + i, backend=b):
            groups[len(masses)] = i
            masses.append(p.mass)
            positions.append(p.position)
            velocities.append(p.velocity)
    prov = dict(base.provenance)
    prov.update({"smoothed": True, "samples": samples, "seed": seed,
                 "s": list(s_vals)})
    scen = Scenario(tuple(masses), tuple(positions), tuple(velocities),
                    base.horizon if horizon is None else horizon, backend=b,
                    tolerance=base.tolerance, event_cap=base.event_cap, provenance=prov)
    return SmoothedScenario(scen, tuple(clouds), groups, halvings)
