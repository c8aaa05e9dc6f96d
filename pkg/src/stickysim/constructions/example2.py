"""Two unit masses crossing at right angles, and the re-splitting candidate."""

from __future__ import annotations

from fractions import Fraction

from ..core import RATIONAL, Scenario, to_scalar
from ..engine import Segment, Trajectory


def example2_scenario(eps=0, horizon=3, backend: str = RATIONAL) -> Scenario:
    """Masses 1, 1 at (1, eps) and (0, 1) with velocities (0, 1) and (1, 0).

    With ``eps == 0`` they meet at (1, 1) at t = 1; otherwise they never meet.
    """
    eps = Fraction(eps)
    scen = Scenario(masses=(1, 1),
                    positions=((1, eps), (0, 1)),
                    velocities=((0, 1), (1, 0)),
                    horizon=horizon,
                    provenance={"generator": "example2", "eps": eps})
    return scen if backend == RATIONAL else scen.with_backend(backend)


def resplit_trajectory(split_time, horizon=3, backend: str = RATIONAL) -> Trajectory:
    """Stick at t = 1, travel together until ``split_time``, then separate again.

    After the split each particle resumes its own initial velocity.  For
    ``split_time == 1`` this is plain free flight.
    """
    c = lambda x: to_scalar(x, backend)  # noqa: E731
    T = c(split_time)
    H = c(horizon)
    one, zero, half = c(1), c(0), c(Fraction(1, 2))
    if T < 1 or H < T:
        raise ValueError("need 1 <= split_time <= horizon")
    meet = (one, one)
    split_at = ((T + 1) / 2, (T + 1) / 2)
    v1, v2, vm = (zero, one), (one, zero), (half, half)
    segs1 = [Segment(zero, one, (one, zero), v1)]
    segs2 = [Segment(zero, one, (zero, one), v2)]
    if T > 1:
        joint = Segment(one, T, meet, vm)
        segs1.append(joint)
        segs2.append(joint)
    if H > T:
        segs1.append(Segment(T, H, split_at, v1))
        segs2.append(Segment(T, H, split_at, v2))
    return Trajectory((one, one), (tuple(segs1), tuple(segs2)), H, backend)
