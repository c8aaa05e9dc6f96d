"""Black tail on the x_1 axis hit by white bullets.

Scenario indices: ``0 .. N-1`` are black particles ``k = 1..N``;
``N .. 2N-1`` are white particles ``k = 1..N``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from ..core import RATIONAL, Scalar, Scenario, VecN, jsonable
from ..engine import STICK, CollisionEvent
from .tail import TailParams, barycenter_tail, interaction_time, select_tau, truncated_barycenter


class Targeting(str, enum.Enum):
    INFINITE_TAIL = "INFINITE_TAIL"
    TRUNCATED_TAIL = "TRUNCATED_TAIL"


class Variant(str, enum.Enum):
    VERTICAL = "VERTICAL"
    SLANTED = "SLANTED"


@dataclass(frozen=True)
class Example4Spec:
    params: TailParams
    levels: int
    tau: Tuple[Scalar, ...]          # tau[k-1] = tau_k
    targets: Tuple[Scalar, ...]      # aimed x_1 coordinate of white k
    black_mass: Tuple[Scalar, ...]
    black_position: Tuple[VecN, ...]
    black_velocity: Tuple[VecN, ...]
    white_mass: Tuple[Scalar, ...]
    white_position: Tuple[VecN, ...]
    white_velocity: Tuple[VecN, ...]
    targeting: Targeting
    variant: Variant

    def black_index(self, k: int) -> int:
        return k - 1

    def white_index(self, k: int) -> int:
        return self.levels + k - 1

    def is_white(self, idx: int) -> bool:
        return idx >= self.levels

    def level_of(self, idx: int) -> int:
        return idx - self.levels + 1 if self.is_white(idx) else idx + 1

    def to_json(self) -> dict:
        p = self.params
        return jsonable({
            "kind": "example4",
            "alpha": p.alpha, "beta": p.beta, "gamma": p.gamma,
            "levels": self.levels,
            "tau": self.tau,
            "t": [interaction_time(p, k) for k in range(self.levels + 1)],
            "targets": self.targets,
            "targeting": self.targeting.value,
            "variant": self.variant.value,
        })


def example4_scenario(p: TailParams, levels: int,
                      targeting: Targeting = Targeting.TRUNCATED_TAIL,
                      variant: Variant = Variant.VERTICAL, horizon=3,
                      backend: str = RATIONAL) -> Tuple[Scenario, Example4Spec]:
    """``levels`` black particles plus ``levels`` white bullets.

    Data is built exactly from Fraction parameters and converted to
    ``backend`` at the end.
    """
    if levels < 2:
        raise ValueError("need at least 2 levels")
    p = TailParams(Fraction(p.alpha), Fraction(p.beta), Fraction(p.gamma)).require_valid()
    targeting, variant = Targeting(targeting), Variant(variant)
    zero, one = Fraction(0), Fraction(1)
    N = levels
    bm, bx, bv = [], [], []
    for k in range(1, N + 1):
        bm.append(p.mass(k))
        bx.append((p.x0(k), zero))
        bv.append((p.v0(k), zero))
    taus, targets, wm, wx, wv = [], [], [], [], []
    for k in range(1, N + 1):
        tau = select_tau(p, k)
        if targeting is Targeting.TRUNCATED_TAIL:
            target = truncated_barycenter(p, range(k, N + 1), tau)
        else:
            target = barycenter_tail(p, k, tau)
        if variant is Variant.VERTICAL:
            vel = (zero, -one)
        else:
            vel = (one, -one / k)
        pos = (target - tau * vel[0], -tau * vel[1])
        taus.append(tau)
        targets.append(target)
        wm.append(p.mass(k))
        wx.append(pos)
        wv.append(vel)
    spec = Example4Spec(p, N, tuple(taus), tuple(targets), tuple(bm), tuple(bx), tuple(bv),
                        tuple(wm), tuple(wx), tuple(wv), targeting, variant)
    scen = Scenario(tuple(bm + wm), tuple(bx + wx), tuple(bv + wv), horizon,
                    provenance={"generator": "example4", "alpha": p.alpha, "beta": p.beta,
                                "gamma": p.gamma, "levels": N,
                                "targeting": targeting.value, "variant": variant.value})
    if backend != RATIONAL:
        scen = scen.with_backend(backend)
    return scen, spec


# ----------------------------------------------------------------------------
# reading event logs

def classify_cluster(spec: Example4Spec, members: Iterable[int],
                     groups: Optional[Dict[int, int]] = None) -> str:
    """``"black-black"``, ``"white-black"`` or ``"white-white"``.

    ``groups`` maps scenario indices to point-mass indices when the scenario
    was smoothed into clouds.
    """
    idx = {groups[m] if groups else m for m in members}
    whites = [i for i in idx if spec.is_white(i)]
    blacks = [i for i in idx if not spec.is_white(i)]
    if not whites:
        return "black-black"
    if not blacks:
        return "white-white"
    return "white-black"


def contacts(spec: Example4Spec, log: Sequence[CollisionEvent],
             groups: Optional[Dict[int, int]] = None) -> List[dict]:
    """One record per white-black contact: white levels, time, decision."""
    out = []
    for ev in log:
        for c in ev.clusters:
            if classify_cluster(spec, c.members, groups) != "white-black":
                continue
            parts = []
            for part in c.parts:
                idx = {groups[m] if groups else m for m in part}
                if all(spec.is_white(i) for i in idx):
                    parts.extend(spec.level_of(i) for i in idx)
            out.append({"time": ev.time, "whites": sorted(set(parts)),
                        "decision": c.decision.value})
    return out


def hit_set(spec: Example4Spec, log: Sequence[CollisionEvent],
            groups: Optional[Dict[int, int]] = None, stuck_only: bool = False) -> Set[int]:
    """Levels ``k`` whose white bullet touched a black (compound) particle."""
    hits: Set[int] = set()
    for rec in contacts(spec, log, groups):
        if stuck_only and rec["decision"] != STICK.value:
            continue
        hits.update(rec["whites"])
    return hits
