"""Checkers for candidate trajectories: weak, sticky, energy, non-stickiness."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ..core import (
    TIME_DEDUP, Scalar, VecN, coincide, norm2, vaxpy, vscale, vsub, weighted_mean,
)
from .evolve import EnergyProfile, Trajectory


def _exact(x) -> bool:
    return isinstance(x, Fraction)


def _same_time(a: Scalar, b: Scalar) -> bool:
    if _exact(a) and _exact(b):
        return a == b
    return abs(a - b) <= TIME_DEDUP


# ----------------------------------------------------------------------------
# coincidence structure

def _is_zero(v: VecN, tol: Scalar) -> bool:
    if not tol:
        return not any(v)
    return sum(c * c for c in v) <= tol * tol


def pair_coincidence(traj: Trajectory, i: int, j: int, tol: Scalar = 0
                     ) -> List[Tuple[Scalar, Scalar]]:
    """Coincidence set of indices ``i`` and ``j`` as sorted closed pieces.

    Each piece is ``(a, b)``; ``a == b`` marks an isolated instant.  Adjacent
    pieces are joined, so consecutive entries are separated by a gap.
    """
    grid = traj.breakpoints((i, j))
    segs_i, segs_j = traj.segments[i], traj.segments[j]
    ki = kj = 0
    pieces: List[Tuple[Scalar, Scalar]] = []
    for a, b in zip(grid, grid[1:]):
        if not b > a:
            continue
        while segs_i[ki].t_end <= a and ki + 1 < len(segs_i):
            ki += 1
        while segs_j[kj].t_end <= a and kj + 1 < len(segs_j):
            kj += 1
        si, sj = segs_i[ki], segs_j[kj]
        if si is sj or si == sj:
            # shared compound segment
            pieces.append((a, b))
            continue
        pa = tuple(x - y for x, y in zip(si.position_at(a), sj.position_at(a)))
        dv = tuple(x - y for x, y in zip(si.velocity, sj.velocity))
        pb = tuple(x + (b - a) * d for x, d in zip(pa, dv))
        ca, cb = _is_zero(pa, tol), _is_zero(pb, tol)
        if ca and cb:
            pieces.append((a, b))
        elif ca:
            pieces.append((a, a))
        elif cb:
            pieces.append((b, b))
        else:
            dv2 = sum(d * d for d in dv)
            if not dv2:
                continue
            step = -sum(x * d for x, d in zip(pa, dv)) / dv2
            if 0 < step < b - a and _is_zero(tuple(x + step * d for x, d in zip(pa, dv)), tol):
                pieces.append((a + step, a + step))
    if len(grid) == 1:
        # zero-length horizon: only the initial instant exists
        t = grid[0]
        if coincide(traj.position(i, t), traj.position(j, t), tol):
            pieces.append((t, t))
    merged: List[Tuple[Scalar, Scalar]] = []
    for a, b in sorted(pieces, key=lambda p: (p[0], p[1])):
        if merged and (merged[-1][1] >= a or _same_time(merged[-1][1], a)):
            if b > merged[-1][1]:
                merged[-1] = (merged[-1][0], b)
        else:
            merged.append((a, b))
    return merged


@dataclass(frozen=True)
class StickyViolation:
    """Indices ``i < j`` touch at ``contact_time`` and part after ``separation_time``."""

    i: int
    j: int
    contact_time: Scalar
    separation_time: Scalar

    @property
    def pair(self) -> Tuple[int, int]:
        return (self.i, self.j)


def check_sticky(traj: Trajectory, tol: Scalar = 0) -> List[StickyViolation]:
    """Pairs that coincide at some instant but are apart at a later time."""
    out = []
    horizon = traj.horizon
    for i in range(len(traj)):
        for j in range(i + 1, len(traj)):
            pieces = pair_coincidence(traj, i, j, tol)
            if not pieces:
                continue
            t0, t1 = pieces[0]
            if t1 >= horizon or _same_time(t1, horizon):
                continue
            out.append(StickyViolation(i, j, t0, t1))
    return out


def nonstickiness_phi(traj: Trajectory, masses: Optional[Sequence[Scalar]] = None,
                      tol: Scalar = 0) -> Scalar:
    """Sum of ``m_i m_j`` over unordered pairs that touch and later separate."""
    m = traj.masses if masses is None else masses
    total = 0 * m[0]
    for v in check_sticky(traj, tol):
        total += m[v.i] * m[v.j]
    return total


# ----------------------------------------------------------------------------
# weak solutions

@dataclass(frozen=True)
class WeakReport:
    residual: float
    residual_sq: Scalar
    worst_index: Optional[int]
    worst_time: Optional[Scalar]
    passed: bool


def _clusters_on(traj: Trajectory, a: Scalar, b: Scalar, tol: Scalar) -> List[List[int]]:
    """Indices coinciding on the whole interval ``[a, b]``."""
    n = len(traj)
    pos_a = [traj.segment(i, a).position_at(a) for i in range(n)]
    pos_b = [traj.segment(i, a).position_at(b) for i in range(n)]
    if tol == 0:
        groups: Dict[tuple, List[int]] = {}
        for i in range(n):
            groups.setdefault((pos_a[i], pos_b[i]), []).append(i)
        return list(groups.values())
    label = list(range(n))
    for i in range(n):
        for j in range(i):
            if label[j] == j and coincide(pos_a[i], pos_a[j], tol) \
                    and coincide(pos_b[i], pos_b[j], tol):
                label[i] = j
                break
    groups = {}
    for i in range(n):
        groups.setdefault(label[i], []).append(i)
    return list(groups.values())


def check_weak(traj: Trajectory, tol: Scalar = 0) -> WeakReport:
    """Residual of ``x_i(t) = x_i(0) + int_0^t V_i`` over all indices and times.

    ``V_i`` is the mass-weighted mean initial velocity over the indices that
    share ``i``'s position on a set of positive length; isolated contact
    instants are ignored.  Both sides are piecewise linear, so the maximum is
    attained on the breakpoint grid.
    """
    n = len(traj)
    grid = traj.breakpoints()
    m = traj.masses
    v0 = [traj.initial_velocity(i) for i in range(n)]
    integral = [traj.initial_position(i) for i in range(n)]
    worst = 0 * m[0] * 0
    worst_i = worst_t = None

    def measure(t):
        nonlocal worst, worst_i, worst_t
        for i in range(n):
            r = norm2(vsub(traj.position(i, t), integral[i]))
            if r > worst:
                worst, worst_i, worst_t = r, i, t

    measure(grid[0])
    for a, b in zip(grid, grid[1:]):
        for group in _clusters_on(traj, a, b, tol):
            vel = weighted_mean([m[k] for k in group], [v0[k] for k in group])
            for k in group:
                integral[k] = vaxpy(integral[k], b - a, vel)
        measure(b)
    residual = math.sqrt(float(worst))
    passed = worst <= tol * tol
    return WeakReport(residual, worst, worst_i, worst_t, passed)


# ----------------------------------------------------------------------------
# energy

def energy_profile(traj: Trajectory) -> EnergyProfile:
    """Right-continuous kinetic energy ``E(t)``, merged over equal values."""
    grid = traj.breakpoints()
    starts = grid[:-1] if len(grid) > 1 else grid
    times, values = [], []
    for t in starts:
        e = 0 * traj.masses[0]
        for i in range(len(traj)):
            e += traj.masses[i] * norm2(traj.velocity(i, t)) / 2
        if values and e == values[-1]:
            continue
        times.append(t)
        values.append(e)
    return EnergyProfile(tuple(times), tuple(values))


def is_energy_admissible(profile: EnergyProfile, rtol: Optional[float] = None) -> bool:
    """Energy never increases; floats get a relative slack (default 1e-12)."""
    vals = profile.values
    exact = all(_exact(v) for v in vals)
    if rtol is None:
        rtol = 0.0 if exact else 1e-12
    for a, b in zip(vals, vals[1:]):
        if exact and rtol == 0:
            if b > a:
                return False
        elif float(b) > float(a) + rtol * max(1.0, abs(float(a))):
            return False
    return True


def eulerian_moments(traj: Trajectory, t: Scalar) -> Tuple[Scalar, VecN, Scalar]:
    """Mass, momentum and energy of the empirical measure at time ``t``."""
    if t < 0 or t > traj.horizon:
        raise ValueError(f"t={t} outside [0, {traj.horizon}]")
    m = traj.masses
    mass = sum(m[1:], m[0])
    mom = vscale(0 * mass, traj.initial_velocity(0))
    en = 0 * mass
    for i in range(len(traj)):
        v = traj.velocity(i, t)
        mom = vaxpy(mom, m[i], v)
        en += m[i] * norm2(v) / 2
    return mass, mom, en
