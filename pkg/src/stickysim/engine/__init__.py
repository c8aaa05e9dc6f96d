"""Sticky-particle evolution and solution checkers."""

from .evolve import (
    PASS, STICK, ClusterRecord, CollisionEvent, Decision, EnergyProfile, EventCapExceeded,
    EventLog, PolicyError, Segment, Trajectory, UnionFind, cluster_energy_drop,
    eventlog_from_json, eventlog_summary, eventlog_to_json, evolve, evolve_with_policy, free_flight,
    merge_cluster, next_event, pair_collision_time,
)
from .checks import (
    StickyViolation, WeakReport, check_sticky, check_weak, energy_profile, eulerian_moments,
    is_energy_admissible, nonstickiness_phi, pair_coincidence,
)
from .policy import j_epsilon, policy_search

__all__ = [
    "PASS", "STICK", "ClusterRecord", "CollisionEvent", "Decision", "EnergyProfile",
    "EventCapExceeded", "EventLog", "PolicyError", "Segment", "Trajectory", "UnionFind",
    "cluster_energy_drop", "eventlog_from_json", "eventlog_summary", "eventlog_to_json", "evolve",
    "evolve_with_policy", "free_flight", "merge_cluster", "next_event",
    "pair_collision_time", "StickyViolation", "WeakReport", "check_sticky", "check_weak",
    "energy_profile", "eulerian_moments", "is_energy_admissible", "nonstickiness_phi",
    "pair_coincidence", "j_epsilon", "policy_search",
]
