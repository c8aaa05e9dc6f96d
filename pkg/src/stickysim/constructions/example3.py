"""Backward binary-collision cascade with two sticky solutions.

Velocities are actual velocities: before ``t_i`` particle ``i`` sits at
``x*_i + (t - t_i) v_i``.  Level ``i`` (``t_i = 2**-i``) splits the compound ``m*_{i-1}`` into two
particles of mass ``2**-i`` that meet at ``x*_i`` at time ``t_i``.  The
innermost infinite tail is truncated to one particle of mass ``2**-N``
travelling with ``v*_N``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Tuple

from ..core import (
    RATIONAL, TIME_DEDUP, Scenario, VecN, coincide, dot, norm2, vaxpy, vscale, vsub,
)


@dataclass(frozen=True)
class Example3Spec:
    """Audit record of a generated cascade.

    Tuples are indexed by level ``0..N``; ``v[0]`` is unused (None) because
    level 0 has only the final compound.
    """

    levels: int
    times: Tuple[Fraction, ...]
    x_star: Tuple[VecN, ...]
    v: Tuple[Optional[VecN], ...]
    v_star: Tuple[VecN, ...]
    seed: Optional[int]
    denominator: int = 16
    rejections: int = 0
    sampling: str = field(default="uniform rational components k/D in [-1, 1]^2, "
                                  "rejected until the line family passes nip_check")

    def mass(self, i: int) -> Fraction:
        return Fraction(1, 2 ** i)

    def lines(self) -> List[Tuple[str, int, VecN, VecN]]:
        """``(kind, level, point at t=0, velocity)``; kind ``"x"`` or ``"s"``."""
        out = []
        for i in range(1, self.levels + 1):
            t = self.times[i]
            out.append(("x", i, vaxpy(self.x_star[i], -t, self.v[i]), self.v[i]))
            out.append(("s", i, vaxpy(self.x_star[i], -t, self.v_star[i]), self.v_star[i]))
        return out

    def to_json(self) -> dict:
        from ..core import jsonable
        return jsonable({
            "kind": "example3", "levels": self.levels, "times": self.times,
            "x_star": self.x_star, "v": [None] + list(self.v[1:]), "v_star": self.v_star,
            "seed": self.seed, "denominator": self.denominator,
            "rejections": self.rejections, "sampling": self.sampling,
        })

    @classmethod
    def from_json(cls, data: dict) -> "Example3Spec":
        vec = lambda xs: tuple(Fraction(str(c)) for c in xs)  # noqa: E731
        return cls(
            levels=int(data["levels"]),
            times=tuple(Fraction(str(t)) for t in data["times"]),
            x_star=tuple(vec(x) for x in data["x_star"]),
            v=(None,) + tuple(vec(x) for x in data["v"][1:]),
            v_star=tuple(vec(x) for x in data["v_star"]),
            seed=data.get("seed"), denominator=int(data.get("denominator", 16)),
            rejections=int(data.get("rejections", 0)),
        )


def _designed(a, b) -> Optional[int]:
    """Level at which two lines are meant to meet, if any."""
    (ka, ia), (kb, ib) = sorted([(a[0], a[1]), (b[0], b[1])], key=lambda z: (z[1], z[0]))
    if ia == ib and {ka, kb} == {"x", "s"}:
        return ia
    # both children of level ib start on the parent line s_{ib-1}
    if ka == "s" and ib == ia + 1:
        return ib
    return None


def _line_hits(p0, v0, p1, v1, horizon, tol):
    """Coincidence of two lines over ``[0, horizon]``: None, 'all' or a time."""
    dx = vsub(p1, p0)
    dv = vsub(v1, v0)
    zero = vscale(0, dx)
    dv2 = norm2(dv)
    if dv2 == 0:
        return "all" if coincide(dx, zero, tol) else None
    t = -dot(dx, dv) / dv2
    if t < 0 or t > horizon:
        return None
    return t if coincide(vaxpy(dx, t, dv), zero, tol) else None


def nip_check(spec: Example3Spec, horizon=None, tol=0) -> bool:
    """Non-intersection of the cascade's line family on ``[0, horizon]``.

    Every pair of lines must stay apart, except the three lines through each
    designed meeting point ``x*_i`` (the two children and the parent
    compound), which may touch only there, at ``t_i``.
    """
    if horizon is None:
        horizon = Fraction(1)
    lines = spec.lines()
    for a, b in combinations(lines, 2):
        hit = _line_hits(a[2], a[3], b[2], b[3], horizon, tol)
        if hit is None:
            continue
        if hit == "all":
            return False
        level = _designed(a, b)
        if level is None:
            return False
        t_i = spec.times[level]
        if not (hit == t_i if tol == 0 else abs(hit - t_i) <= TIME_DEDUP):
            return False
    return True


def _sample_velocity(rng: random.Random, denominator: int) -> VecN:
    return tuple(Fraction(rng.randint(-denominator, denominator), denominator)
                 for _ in range(2))


def example3_scenario(levels: int, seed: int = 0, horizon=1, denominator: int = 16,
                      max_tries: int = 1000, backend: str = RATIONAL
                      ) -> Tuple[Scenario, Example3Spec]:
    """Truncated cascade with ``levels`` splits (``levels + 1`` particles)."""
    if levels < 2:
        raise ValueError("need at least 2 levels")
    rng = random.Random(seed)
    origin = (Fraction(0), Fraction(0))
    times = tuple(Fraction(1, 2 ** i) for i in range(levels + 1))
    x_star: List[VecN] = [origin]
    v: List[Optional[VecN]] = [None]
    v_star: List[VecN] = [origin]
    rejections = 0
    for i in range(1, levels + 1):
        # compound m*_{i-1} sits at x*_{i-1} at t_{i-1}; for i = 1 it is at rest
        xi = vaxpy(x_star[i - 1], -(times[i - 1] - times[i]), v_star[i - 1])
        for _ in range(max_tries):
            vi = _sample_velocity(rng, denominator)
            vsi = tuple(2 * a - b for a, b in zip(v_star[i - 1], vi))
            trial = Example3Spec(i, times[:i + 1], tuple(x_star) + (xi,),
                                 tuple(v) + (vi,), tuple(v_star) + (vsi,), seed,
                                 denominator)
            if nip_check(trial, horizon):
                break
            rejections += 1
        else:
            raise RuntimeError(f"no NIP-compatible velocity at level {i} after "
                               f"{max_tries} tries; choose another seed")
        x_star.append(xi)
        v.append(vi)
        v_star.append(vsi)

    spec = Example3Spec(levels, times, tuple(x_star), tuple(v), tuple(v_star), seed,
                        denominator, rejections)
    masses, positions, velocities = [], [], []
    for i in range(1, levels + 1):
        masses.append(spec.mass(i))
        positions.append(vaxpy(x_star[i], -times[i], v[i]))
        velocities.append(v[i])
    masses.append(spec.mass(levels))
    positions.append(vaxpy(x_star[levels], -times[levels], v_star[levels]))
    velocities.append(v_star[levels])
    scen = Scenario(tuple(masses), tuple(positions), tuple(velocities), horizon,
                    provenance={"generator": "example3", "levels": levels, "seed": seed,
                                "denominator": denominator})
    if backend != RATIONAL:
        scen = scen.with_backend(backend)
    return scen, spec
