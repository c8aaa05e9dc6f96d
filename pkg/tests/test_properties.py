import random
from fractions import Fraction as F

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from stickysim.core import FLOAT, Scenario
from stickysim.engine import (
    check_sticky, check_weak, energy_profile, eulerian_moments, evolve, is_energy_admissible,
)
from stickysim.experiments import check_scenario

quarter = st.integers(-16, 16).map(lambda k: F(k, 4))
mass = st.integers(1, 8).map(F)


@st.composite
def scenarios(draw, max_n=7):
    dim = draw(st.integers(1, 3))
    n = draw(st.integers(1, max_n))
    points = draw(st.lists(st.tuples(*[quarter] * dim), min_size=n, max_size=n, unique=True))
    # aim some particles at a shared point so that merges actually happen
    meet = draw(st.tuples(*[quarter] * dim))
    t_meet = draw(st.integers(1, 6).map(lambda k: F(k, 4)))
    vel, pos = [], []
    for x in points:
        if draw(st.booleans()):
            v = tuple((m - c) / t_meet for m, c in zip(meet, x))
        else:
            v = draw(st.tuples(*[quarter] * dim))
        pos.append(x)
        vel.append(v)
    masses = draw(st.lists(mass, min_size=n, max_size=n))
    return Scenario(tuple(masses), tuple(pos), tuple(vel), horizon=F(2))


slow = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@slow
@given(scenarios())
def test_conservation_exact(scen):
    traj, log = evolve(scen)
    m0, p0, e0 = eulerian_moments(traj, F(0))
    for t in [e.time for e in log] + [scen.horizon]:
        m, p, e = eulerian_moments(traj, t)
        assert (m, p) == (m0, p0)
        assert e <= e0


@slow
@given(scenarios())
def test_engine_output_is_a_sticky_weak_solution(scen):
    traj, _ = evolve(scen)
    assert check_sticky(traj) == []
    assert check_weak(traj).residual_sq == 0
    assert is_energy_admissible(energy_profile(traj))


@slow
@given(scenarios(), st.integers(0, 2 ** 32))
def test_invariances(scen, seed):
    assert check_scenario(scen, random.Random(seed)) == []


@slow
@given(scenarios(max_n=5))
def test_float_backend_invariants(scen):
    f = scen.with_backend(FLOAT)
    assert check_scenario(f, random.Random(0)) == []


@slow
@given(scenarios(max_n=5))
def test_event_times_agree_across_backends(scen):
    _, exact = evolve(scen)
    _, approx = evolve(scen.with_backend(FLOAT))
    assert len(exact) == len(approx)
    for a, b in zip(exact, approx):
        assert abs(float(a.time) - b.time) < 1e-9
        assert [c.members for c in a.clusters] == [c.members for c in b.clusters]
