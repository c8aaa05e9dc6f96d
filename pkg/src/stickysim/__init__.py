"""Sticky particle systems in n dimensions, with exact rational arithmetic.

Typical use::

    from stickysim import Scenario, evolve, check_sticky
    scen = Scenario(masses=(1, 1), positions=((1, 0), (0, 1)),
                    velocities=((0, 1), (1, 0)), horizon=3)
    traj, events = evolve(scen)
"""

from .core import (
    DEFAULT_EVENT_CAP, DEFAULT_FLOAT_TOLERANCE, FLOAT, RATIONAL, DimensionError, Particle,
    Scenario, SystemState, barycenter, energy, momentum,
)
from .engine import (
    PASS, STICK, CollisionEvent, Decision, EnergyProfile, EventCapExceeded, PolicyError,
    Segment, Trajectory, check_sticky, check_weak, energy_profile, eulerian_moments, evolve,
    evolve_with_policy, free_flight, is_energy_admissible, j_epsilon, nonstickiness_phi,
    policy_search,
)
from .experiments import (
    Report, run_example3_nonuniqueness, run_example4_nonexistence, run_jeps_sweep,
    run_property_suite,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_EVENT_CAP", "DEFAULT_FLOAT_TOLERANCE", "FLOAT", "RATIONAL", "DimensionError",
    "Particle", "Scenario", "SystemState", "barycenter", "energy", "momentum",
    "PASS", "STICK", "CollisionEvent", "Decision", "EnergyProfile", "EventCapExceeded",
    "PolicyError", "Segment", "Trajectory", "check_sticky", "check_weak", "energy_profile",
    "eulerian_moments", "evolve", "evolve_with_policy", "free_flight",
    "is_energy_admissible", "j_epsilon", "nonstickiness_phi", "policy_search",
    "Report", "run_example3_nonuniqueness", "run_example4_nonexistence", "run_jeps_sweep",
    "run_property_suite",
]
