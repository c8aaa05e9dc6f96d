"""Numeric backends, vector helpers and the particle data model.

Two scalar backends share one code path: ``"rational"`` uses
:class:`fractions.Fraction` (exact, tolerance must be zero) and ``"float"``
uses Python floats with an absolute coincidence tolerance.  Vectors are plain
tuples of scalars so they hash, compare and stay immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Any, Iterable, Mapping, Sequence, Tuple, Union

Scalar = Union[Fraction, float]
VecN = Tuple[Scalar, ...]

RATIONAL = "rational"
FLOAT = "float"
BACKENDS = (RATIONAL, FLOAT)

#: Default absolute position tolerance for the float backend.
DEFAULT_FLOAT_TOLERANCE = 1e-9
#: Two float event times closer than this are treated as one instant.
TIME_DEDUP = 1e-12
DEFAULT_EVENT_CAP = 10_000


class DimensionError(ValueError):
    """Vectors of different dimension were combined."""


# ----------------------------------------------------------------------------
# scalars

def to_scalar(value: Any, backend: str) -> Scalar:
    """Coerce ``value`` into the scalar type of ``backend``.

    Strings of the form ``"p/q"`` and decimal literals are accepted for both
    backends.  Floats handed to the rational backend are converted exactly.
    """
    if backend == RATIONAL:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, str):
            return Fraction(value.strip())
        if isinstance(value, (int, Rational)):
            return Fraction(value)
        if isinstance(value, float):
            return Fraction(value)
        raise TypeError(f"cannot convert {value!r} to a rational scalar")
    if backend == FLOAT:
        if isinstance(value, str):
            return float(Fraction(value.strip()))
        return float(value)
    raise ValueError(f"unknown backend {backend!r}")


def to_vec(values: Iterable[Any], backend: str) -> VecN:
    return tuple(to_scalar(v, backend) for v in values)


def backend_of(x: Scalar) -> str:
    return RATIONAL if isinstance(x, Fraction) else FLOAT


def scalar_to_json(x: Any) -> Union[str, float, int]:
    """Rationals serialize as ``"p/q"`` (always with a denominator)."""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, bool):
        return x
    if isinstance(x, int):
        return f"{x}/1"
    return float(x)


def vec_to_json(v: Sequence[Any]) -> list:
    return [scalar_to_json(c) for c in v]


# ----------------------------------------------------------------------------
# vectors

def _check_dims(p: Sequence, q: Sequence) -> None:
    if len(p) != len(q):
        raise DimensionError(f"dimension mismatch: {len(p)} vs {len(q)}")


def vadd(p: VecN, q: VecN) -> VecN:
    _check_dims(p, q)
    return tuple(a + b for a, b in zip(p, q))


def vsub(p: VecN, q: VecN) -> VecN:
    _check_dims(p, q)
    return tuple(a - b for a, b in zip(p, q))


def vscale(c: Scalar, p: VecN) -> VecN:
    return tuple(c * a for a in p)


def vaxpy(p: VecN, t: Scalar, v: VecN) -> VecN:
    """``p + t*v``."""
    _check_dims(p, v)
    return tuple(a + t * b for a, b in zip(p, v))


def dot(p: VecN, q: VecN) -> Scalar:
    _check_dims(p, q)
    return sum((a * b for a, b in zip(p, q)), 0 * p[0])


def norm2(p: VecN) -> Scalar:
    return dot(p, p)


def zeros(n: int, backend: str) -> VecN:
    return tuple(to_scalar(0, backend) for _ in range(n))


def coincide(p: VecN, q: VecN, tol: Scalar = 0) -> bool:
    """True iff ``|p - q|^2 <= tol^2``; exact equality when ``tol == 0``."""
    _check_dims(p, q)
    if tol < 0:
        raise ValueError("tolerance must be non-negative")
    if tol == 0:
        return tuple(p) == tuple(q)
    return norm2(vsub(p, q)) <= tol * tol


def weighted_mean(weights: Sequence[Scalar], vectors: Sequence[VecN]) -> VecN:
    if not vectors:
        raise ValueError("weighted mean of an empty list")
    total = sum(weights[1:], weights[0])
    if total <= 0:
        raise ValueError("total weight must be positive")
    n = len(vectors[0])
    acc = [0 * total] * n
    for w, v in zip(weights, vectors):
        _check_dims(vectors[0], v)
        for d in range(n):
            acc[d] += w * v[d]
    return tuple(a / total for a in acc)


# ----------------------------------------------------------------------------
# particles

@dataclass(frozen=True)
class Particle:
    """A (possibly compound) particle.

    ``members`` holds the original indices lumped into this particle; its mass
    is the sum of their original masses.
    """

    mass: Scalar
    position: VecN
    velocity: VecN
    members: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"particle mass must be positive, got {self.mass}")
        _check_dims(self.position, self.velocity)
        if not self.members:
            raise ValueError("particle must carry at least one member index")

    @property
    def dimension(self) -> int:
        return len(self.position)

    def at(self, dt: Scalar) -> "Particle":
        """The same particle after free flight for ``dt``."""
        return Particle(self.mass, vaxpy(self.position, dt, self.velocity),
                        self.velocity, self.members)

    @property
    def momentum(self) -> VecN:
        return vscale(self.mass, self.velocity)

    @property
    def kinetic_energy(self) -> Scalar:
        return self.mass * norm2(self.velocity) / 2


def barycenter(particles: Sequence[Particle]) -> VecN:
    """Mass-weighted mean position ``sum(m_i x_i) / sum(m_i)``."""
    if not particles:
        raise ValueError("barycenter of an empty particle list")
    return weighted_mean([p.mass for p in particles], [p.position for p in particles])


@dataclass(frozen=True)
class SystemState:
    time: Scalar
    particles: Tuple[Particle, ...]

    @property
    def dimension(self) -> int:
        return self.particles[0].dimension

    @property
    def total_mass(self) -> Scalar:
        return sum((p.mass for p in self.particles[1:]), self.particles[0].mass)


def momentum(state: SystemState) -> VecN:
    """Total momentum ``sum(m_i v_i)``."""
    out = vscale(0 * state.total_mass, state.particles[0].velocity)
    for p in state.particles:
        out = vadd(out, p.momentum)
    return out


def energy(state: SystemState) -> Scalar:
    """Kinetic energy ``sum(m_i |v_i|^2) / 2`` (no square roots)."""
    return sum((p.kinetic_energy for p in state.particles[1:]),
               state.particles[0].kinetic_energy)


# ----------------------------------------------------------------------------
# scenarios

@dataclass(frozen=True)
class Scenario:
    """Initial data plus run parameters.

    ``horizon`` is mandatory: simulations and checkers only look at
    ``[0, horizon]``.
    """

    masses: Tuple[Scalar, ...]
    positions: Tuple[VecN, ...]
    velocities: Tuple[VecN, ...]
    horizon: Scalar
    backend: str = RATIONAL
    tolerance: Scalar = 0
    event_cap: int = DEFAULT_EVENT_CAP
    provenance: Mapping[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        b = self.backend
        if b not in BACKENDS:
            raise ValueError(f"unknown backend {b!r}")
        set_ = object.__setattr__
        set_(self, "masses", tuple(to_scalar(m, b) for m in self.masses))
        set_(self, "positions", tuple(to_vec(x, b) for x in self.positions))
        set_(self, "velocities", tuple(to_vec(v, b) for v in self.velocities))
        set_(self, "horizon", to_scalar(self.horizon, b))
        set_(self, "tolerance", to_scalar(self.tolerance, b))
        if not (len(self.masses) == len(self.positions) == len(self.velocities)):
            raise ValueError("masses, positions and velocities differ in length")
        if not self.masses:
            raise ValueError("scenario has no particles")
        n = len(self.positions[0])
        if n < 1:
            raise ValueError("dimension must be at least 1")
        for x, v in zip(self.positions, self.velocities):
            if len(x) != n or len(v) != n:
                raise DimensionError("inconsistent particle dimensions")
        if any(not m > 0 for m in self.masses):
            raise ValueError("masses must be positive")
        if self.horizon < 0:
            raise ValueError("horizon must be non-negative")
        if b == RATIONAL and self.tolerance != 0:
            raise ValueError("rational backend requires tolerance 0")
        if self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")
        if self.event_cap < 1:
            raise ValueError("event_cap must be positive")
        for i in range(len(self.positions)):
            for j in range(i):
                if coincide(self.positions[i], self.positions[j], self.tolerance):
                    raise ValueError(f"particles {j} and {i} start at the same position")

    @property
    def dimension(self) -> int:
        return len(self.positions[0])

    def __len__(self) -> int:
        return len(self.masses)

    def initial_state(self) -> SystemState:
        parts = tuple(Particle(m, x, v, frozenset([i]))
                      for i, (m, x, v) in enumerate(zip(self.masses, self.positions,
                                                         self.velocities)))
        return SystemState(to_scalar(0, self.backend), parts)

    def replace(self, **changes) -> "Scenario":
        kw = dict(masses=self.masses, positions=self.positions, velocities=self.velocities,
                  horizon=self.horizon, backend=self.backend, tolerance=self.tolerance,
                  event_cap=self.event_cap, provenance=dict(self.provenance))
        kw.update(changes)
        return Scenario(**kw)

    def with_backend(self, backend: str, tolerance: Any = None) -> "Scenario":
        """Convert all data to ``backend``; floats default to 1e-9 tolerance."""
        if tolerance is None:
            tolerance = 0 if backend == RATIONAL else DEFAULT_FLOAT_TOLERANCE
        conv = (lambda x: Fraction(x)) if backend == RATIONAL else float
        return Scenario(
            masses=tuple(conv(m) for m in self.masses),
            positions=tuple(tuple(conv(c) for c in x) for x in self.positions),
            velocities=tuple(tuple(conv(c) for c in v) for v in self.velocities),
            horizon=conv(self.horizon), backend=backend, tolerance=tolerance,
            event_cap=self.event_cap, provenance=dict(self.provenance))

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "backend": self.backend,
            "tolerance": scalar_to_json(self.tolerance),
            "horizon": scalar_to_json(self.horizon),
            "event_cap": self.event_cap,
            "particles": [
                {"mass": scalar_to_json(m), "position": vec_to_json(x),
                 "velocity": vec_to_json(v)}
                for m, x, v in zip(self.masses, self.positions, self.velocities)
            ],
            "provenance": _jsonable(self.provenance),
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "Scenario":
        backend = data.get("backend", RATIONAL)
        parts = data["particles"]
        scen = cls(
            masses=tuple(p["mass"] for p in parts),
            positions=tuple(tuple(p["position"]) for p in parts),
            velocities=tuple(tuple(p["velocity"]) for p in parts),
            horizon=data["horizon"],
            backend=backend,
            tolerance=data.get("tolerance", 0 if backend == RATIONAL
                               else DEFAULT_FLOAT_TOLERANCE),
            event_cap=int(data.get("event_cap", DEFAULT_EVENT_CAP)),
            provenance=dict(data.get("provenance", {})),
        )
        if "dimension" in data and int(data["dimension"]) != scen.dimension:
            raise DimensionError("declared dimension does not match particle data")
        return scen


def _jsonable(obj: Any) -> Any:
    """Recursively turn scalars/tuples into JSON-friendly values."""
    if isinstance(obj, Fraction):
        return scalar_to_json(obj)
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (frozenset, set)):
        return sorted(_jsonable(v) for v in obj)
    return obj


jsonable = _jsonable
