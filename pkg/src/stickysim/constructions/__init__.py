"""Generators for the counterexample initial data and the tail formulas."""

from .example2 import example2_scenario, resplit_trajectory
from .example3 import Example3Spec, example3_scenario, nip_check
from .example4 import (
    Example4Spec, Targeting, Variant, classify_cluster, contacts, example4_scenario, hit_set,
)
from .tail import (
    TailParams, barycenter_series, barycenter_tail, collision_time_tk, interaction_time,
    lemma1_check, lemma2_check, lemma2_exhaustive, select_tau, tail_series_bound,
    truncated_barycenter,
)
from .smoothing import (
    BallCloud, SmoothedScenario, cloud_momentum, collapse_velocity, discretize_ball,
    isolation_conflicts, smooth_bump, smooth_scenario,
)
