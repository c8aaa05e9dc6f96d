"""Discounted-energy functional and exhaustive stick/pass policy search."""

from __future__ import annotations

import math
from typing import List, Optional, Sequence, Tuple

from ..core import Scenario, to_scalar
from .evolve import (
    PASS, STICK, Decision, EnergyProfile, EventCapExceeded, _simulate,
)
from .checks import energy_profile


def j_epsilon(profile: EnergyProfile, eps: float) -> float:
    """``int_0^inf exp(-t/eps) E(t) dt`` for a piecewise-constant profile.

    Closed form ``sum_k E_k * eps * (exp(-t_k/eps) - exp(-t_{k+1}/eps))`` with
    the last interval running to infinity.
    """
    eps = float(eps)
    if not eps > 0:
        raise ValueError("eps must be positive")
    times = [float(t) for t in profile.times]
    total = 0.0
    for k, value in enumerate(profile.values):
        lo = math.exp(-times[k] / eps)
        hi = math.exp(-times[k + 1] / eps) if k + 1 < len(times) else 0.0
        total += float(value) * eps * (lo - hi)
    return total


class _NeedDecision(Exception):
    pass


def _replay(scenario: Scenario, prefix: Sequence[Decision]):
    def decide(k, t, ps):
        if k >= len(prefix):
            raise _NeedDecision
        return prefix[k]
    return _simulate(scenario, decide)


def policy_search(scenario: Scenario, eps: float, horizon=None,
                  event_cap: Optional[int] = None) -> Tuple[List[Decision], float]:
    """Minimize ``j_epsilon`` over every stick/pass decision sequence.

    The tree is walked depth first with STICK explored before PASS, and the
    incumbent is only replaced by a strictly smaller value, so ties resolve to
    the lexicographically first STICK-preferring policy.  The event sequence
    is re-derived from scratch after every decision.
    """
    changes = {}
    if horizon is not None:
        changes["horizon"] = to_scalar(horizon, scenario.backend)
    if event_cap is not None:
        changes["event_cap"] = event_cap
    scen = scenario.replace(**changes) if changes else scenario

    best: List = [None, math.inf]

    def explore(prefix: List[Decision]) -> None:
        try:
            traj, _ = _replay(scen, prefix)
        except _NeedDecision:
            explore(prefix + [STICK])
            explore(prefix + [PASS])
            return
        value = j_epsilon(energy_profile(traj), eps)
        if best[0] is None or value < best[1] - 1e-12 * abs(best[1]):
            best[0], best[1] = list(prefix), value

    try:
        explore([])
    except RecursionError as exc:  # pragma: no cover - needs thousands of events
        raise EventCapExceeded("policy tree too deep") from exc
    return best[0], best[1]
