"""Closed forms for the geometric black-particle tail on the x_1 axis.

Particle ``j >= 1`` has mass ``alpha**j``, starts at ``beta**j`` and moves with
speed ``1 - gamma**j``.  ``b_k(t)`` is the barycenter of all particles
``j >= k`` in free flight.  Everything here works for Fractions (exact) and
floats alike.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from ..core import Scalar


@dataclass(frozen=True)
class TailParams:
    alpha: Scalar
    beta: Scalar
    gamma: Scalar

    @classmethod
    def parse(cls, alpha, beta, gamma) -> "TailParams":
        return cls(Fraction(str(alpha)), Fraction(str(beta)), Fraction(str(gamma)))

    @property
    def alpha_bound(self) -> Scalar:
        """Upper bound ``1 / (1 + beta + gamma)`` on ``alpha``."""
        return 1 / (1 + self.beta + self.gamma)

    def is_valid(self) -> bool:
        a, b, g = self.alpha, self.beta, self.gamma
        return 0 < b < g < 1 and 0 < a < self.alpha_bound

    def require_valid(self) -> "TailParams":
        a, b, g = self.alpha, self.beta, self.gamma
        if not 0 < b < g < 1:
            raise ValueError(f"need 0 < beta < gamma < 1, got beta={b}, gamma={g}")
        if not 0 < a < self.alpha_bound:
            raise ValueError(
                f"alpha={a} violates 0 < alpha < 1/(1+beta+gamma) = {self.alpha_bound}; "
                "the tail ordering inequality fails")
        return self

    def require_unit_interval(self) -> "TailParams":
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name}={v} must lie in (0, 1)")
        return self

    def as_float(self) -> "TailParams":
        return TailParams(float(self.alpha), float(self.beta), float(self.gamma))

    # per-particle data
    def mass(self, j: int) -> Scalar:
        return self.alpha ** j

    def x0(self, j: int) -> Scalar:
        return self.beta ** j

    def v0(self, j: int) -> Scalar:
        return 1 - self.gamma ** j

    def x(self, j: int, t: Scalar) -> Scalar:
        """Free-flight position ``beta**j + t (1 - gamma**j)``."""
        return self.beta ** j + t * (1 - self.gamma ** j)


def barycenter_tail(p: TailParams, k: int, t: Scalar) -> Scalar:
    """``b_k(t) = (1-a)[b^k/(1-ab) + t/(1-a) - t g^k/(1-ag)]``."""
    p.require_unit_interval()
    if k < 1:
        raise ValueError("k must be >= 1")
    if t < 0:
        raise ValueError("t must be >= 0")
    a, b, g = p.alpha, p.beta, p.gamma
    return (1 - a) * (b ** k / (1 - a * b) + t / (1 - a) - t * g ** k / (1 - a * g))


def barycenter_series(p: TailParams, k: int, t: Scalar, terms: int) -> Scalar:
    """Partial sum of the defining series over ``j = k .. k+terms-1``."""
    return truncated_barycenter(p, range(k, k + terms), t)


def truncated_barycenter(p: TailParams, indices: Iterable[int], t: Scalar) -> Scalar:
    idx = list(indices)
    if not idx:
        raise ValueError("empty index set")
    num = sum(p.mass(j) * p.x(j, t) for j in idx)
    den = sum(p.mass(j) for j in idx)
    return num / den


def collision_time_tk(p: TailParams, k: int) -> Scalar:
    """Time ``t_{k-1}`` at which ``b_k`` reaches particle ``k-1``.

    ``[(1-b)/(1-ab)] [(1-ag)/(1-g)] (b/g)^(k-1)``.
    """
    p.require_unit_interval()
    if k < 1:
        raise ValueError("k must be >= 1")
    a, b, g = p.alpha, p.beta, p.gamma
    return (1 - b) / (1 - a * b) * (1 - a * g) / (1 - g) * (b / g) ** (k - 1)


def interaction_time(p: TailParams, k: int) -> Scalar:
    """``t_k``, the time the tail ``j > k`` catches particle ``k`` (k >= 0)."""
    return collision_time_tk(p, k + 1)


def lemma1_check(p: TailParams, k: int) -> bool:
    """``x_{k+1}(t_{k-1}) > x_{k-1}(t_{k-1})``, after confirming ``x_{k-1} = b_k`` there."""
    p.require_unit_interval()
    if k <= 1:
        raise ValueError("lemma1_check needs k > 1")
    t = collision_time_tk(p, k)
    lhs = p.x(k + 1, t)
    rhs = p.x(k - 1, t)
    bk = barycenter_tail(p, k, t)
    if isinstance(rhs, Fraction) and isinstance(bk, Fraction):
        ok = rhs == bk
    else:
        ok = abs(float(rhs) - float(bk)) <= 1e-12 * max(1.0, abs(float(rhs)))
    if not ok:
        raise ArithmeticError(f"x_(k-1)(t) = {rhs} differs from b_k(t) = {bk}")
    return lhs > rhs


def select_tau(p: TailParams, k: int, max_iter: int = 200) -> Scalar:
    """A time in ``(t_k, t_{k-1})`` where ``x_{k+1}`` is ahead of ``b_k``.

    Walks down from the upper end: tries ``t_{k-1} - d`` with ``d`` halving
    from half the interval length, and returns the first candidate whose
    inequality holds.  With Fraction parameters the returned certificate is
    verified exactly.
    """
    p.require_unit_interval()
    if k < 1:
        raise ValueError("k must be >= 1")
    lo = collision_time_tk(p, k + 1)
    hi = collision_time_tk(p, k)
    exact = isinstance(p.alpha, Fraction)

    def gap(t):
        return p.x(k + 1, t) - barycenter_tail(p, k, t)

    if not gap(hi) > 0:
        raise ValueError(f"x_{k+1} does not lead b_{k} at t_{k-1}; no tau exists")
    d = (hi - lo) / 2
    for _ in range(max_iter):
        tau = hi - d
        if gap(tau) > 0 and lo < tau < hi:
            if not exact:
                fp = TailParams(Fraction(p.alpha), Fraction(p.beta), Fraction(p.gamma))
                ft = Fraction(tau)
                if not (fp.x(k + 1, ft) > barycenter_tail(fp, k, ft)):
                    d /= 2
                    continue
            return tau
        d /= 2
    raise ValueError(f"no certified tau_{k} within {max_iter} halvings")


Mask = Union[int, Iterable[int]]


def _subset(k: int, subset: Mask, cutoff: int) -> List[int]:
    if isinstance(subset, int):
        idx = [k + b for b in range(cutoff + 1) if subset >> b & 1]
    else:
        idx = sorted(set(subset))
    full = set(range(k, k + cutoff + 1))
    if not idx or k not in idx:
        raise ValueError("subset must contain k")
    if not set(idx) <= full:
        raise ValueError(f"subset must lie inside {{{k}, ..., {k + cutoff}}}")
    if set(idx) == full:
        raise ValueError("subset must be a proper subset of the tail")
    return idx


def lemma2_check(p: TailParams, k: int, tau: Scalar, subset: Mask, cutoff: int) -> bool:
    """Barycenter of ``subset`` at ``tau`` is strictly left of the truncated tail's."""
    idx = _subset(k, subset, cutoff)
    full = range(k, k + cutoff + 1)
    return truncated_barycenter(p, idx, tau) < truncated_barycenter(p, full, tau)


def lemma2_exhaustive(p: TailParams, k: int, tau: Scalar, cutoff: int
                      ) -> Tuple[int, int, Optional[Tuple[int, ...]]]:
    """Check every proper subset containing ``k``.

    Returns ``(passed, total, first_failure)``.
    """
    idx = list(range(k, k + cutoff + 1))
    w = [p.mass(j) for j in idx]
    wx = [p.mass(j) * p.x(j, tau) for j in idx]
    target = sum(wx) / sum(w)
    passed = total = 0
    first_bad = None
    # bit b of mask <-> index k + 1 + b; index k always included
    for mask in range((1 << cutoff) - 1):
        num, den = wx[0], w[0]
        for b in range(cutoff):
            if mask >> b & 1:
                num += wx[b + 1]
                den += w[b + 1]
        total += 1
        if num / den < target:
            passed += 1
        elif first_bad is None:
            first_bad = tuple([k] + [k + 1 + b for b in range(cutoff) if mask >> b & 1])
    return passed, total, first_bad


def tail_series_bound(p: TailParams, k: int, t: Scalar, terms: int) -> Scalar:
    """Bound on ``|b_k(t) - partial barycenter over terms|``.

    The dropped terms hold a fraction ``alpha^terms`` of the total mass and all
    positions lie in ``[0, 1 + t]``, so the error is at most
    ``alpha^terms * (1 + t)``.
    """
    return p.alpha ** terms * (1 + t)


def times_table(p: TailParams, kmax: int) -> Sequence[Scalar]:
    """``[t_0, t_1, ..., t_kmax]``."""
    return [interaction_time(p, k) for k in range(kmax + 1)]
