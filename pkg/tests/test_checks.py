import math
from fractions import Fraction as F

import pytest
from scipy.integrate import quad

from stickysim.constructions import example2_scenario, example3_scenario, resplit_trajectory
from stickysim.core import FLOAT, Scenario
from stickysim.engine import (
    PASS, STICK, EnergyProfile, Segment, Trajectory, check_sticky, check_weak, energy_profile, eulerian_moments,
    evolve, free_flight, is_energy_admissible, j_epsilon, nonstickiness_phi, pair_coincidence,
    policy_search,
)


class TestSticky:
    def test_engine_output_is_sticky(self):
        traj, _ = evolve(example2_scenario())
        assert check_sticky(traj) == []
        assert nonstickiness_phi(traj) == 0

    def test_resplit_at_contact(self):
        (v,) = check_sticky(resplit_trajectory(1))
        assert v.pair == (0, 1)
        assert v.contact_time == 1 and v.separation_time == 1
        assert nonstickiness_phi(resplit_trajectory(1)) == 1

    def test_resplit_later(self):
        (v,) = check_sticky(resplit_trajectory(2))
        assert (v.contact_time, v.separation_time) == (1, 2)

    def test_phi_uses_given_masses(self):
        assert nonstickiness_phi(resplit_trajectory(2), masses=(F(2), F(3))) == 6

    def test_free_flight_cascade_single_violation(self):
        scen, _ = example3_scenario(4, seed=3)
        viol = check_sticky(free_flight(scen))
        assert [(v.pair, v.contact_time) for v in viol] == [((3, 4), F(1, 16))]

    def test_coincidence_pieces(self):
        traj = resplit_trajectory(2)
        assert pair_coincidence(traj, 0, 1) == [(1, 2)]
        assert pair_coincidence(resplit_trajectory(1), 0, 1) == [(1, 1)]


class TestWeak:
    def test_engine_output(self):
        traj, _ = evolve(example2_scenario())
        rep = check_weak(traj)
        assert rep.passed and rep.residual == 0

    def test_free_flight_is_weak(self):
        assert check_weak(free_flight(example2_scenario())).passed

    def test_resplit_is_weak_but_not_sticky(self):
        traj = resplit_trajectory(2)
        assert check_weak(traj).residual_sq == 0
        assert check_sticky(traj)

    def test_wrong_joint_velocity_detected(self):
        # after meeting at t=1 the pair moves with velocity 1 instead of the mean 0
        scen = Scenario((1, 1), ((0,), (2,)), ((1,), (-1,)), horizon=2)
        traj = free_flight(scen)
        assert check_weak(traj).passed  # crossing at an instant is harmless
        bad = Trajectory(traj.masses, (
            (Segment(F(0), F(1), (F(0),), (F(1),)), Segment(F(1), F(2), (F(1),), (F(1),))),
            (Segment(F(0), F(1), (F(2),), (F(-1),)), Segment(F(1), F(2), (F(1),), (F(1),))),
        ), F(2))
        rep = check_weak(bad)
        assert not rep.passed
        assert (rep.worst_index, rep.worst_time) == (0, 2)
        assert rep.residual_sq == 1

    def test_float_tolerance(self):
        traj, _ = evolve(example2_scenario(backend=FLOAT))
        assert check_weak(traj, 1e-9).passed


class TestEnergy:
    def test_example2_profile(self):
        traj, _ = evolve(example2_scenario())
        prof = energy_profile(traj)
        assert prof.times == (0, 1) and prof.values == (1, F(1, 2))
        assert is_energy_admissible(prof)
        assert prof(F(1, 2)) == 1 and prof(F(2)) == F(1, 2)

    def test_free_flight_constant(self):
        prof = energy_profile(free_flight(example2_scenario()))
        assert prof.values == (1,) and is_energy_admissible(prof)

    def test_resplit_not_admissible(self):
        prof = energy_profile(resplit_trajectory(2))
        assert prof.values == (1, F(1, 2), 1)
        assert not is_energy_admissible(prof)

    def test_resplit_at_contact_keeps_energy(self):
        # T = 1 is plain free flight
        assert is_energy_admissible(energy_profile(resplit_trajectory(1)))

    def test_float_slack(self):
        assert is_energy_admissible(EnergyProfile((0.0, 1.0), (1.0, 1.0 + 1e-15)))
        assert not is_energy_admissible(EnergyProfile((0.0, 1.0), (1.0, 1.001)))


class TestMoments:
    def test_conserved_through_merge(self):
        traj, _ = evolve(example2_scenario())
        for t in (F(0), F(1), F(2)):
            m, p, _ = eulerian_moments(traj, t)
            assert m == 2 and p == (1, 1)
        assert eulerian_moments(traj, F(0))[2] == 1
        assert eulerian_moments(traj, F(2))[2] == F(1, 2)

    def test_out_of_range(self):
        traj, _ = evolve(example2_scenario())
        with pytest.raises(ValueError):
            eulerian_moments(traj, F(4))


class TestJEpsilon:
    def test_constant(self):
        assert j_epsilon(EnergyProfile((0,), (1,)), 1) == pytest.approx(1.0, rel=1e-15)

    def test_example2_against_quadrature(self):
        traj, _ = evolve(example2_scenario())
        prof = energy_profile(traj)
        value = j_epsilon(prof, 1)
        a, _ = quad(lambda t: math.exp(-t), 0, 1)
        b, _ = quad(lambda t: 0.5 * math.exp(-t), 1, math.inf)
        assert value == pytest.approx(a + b, rel=1e-12)
        assert value == pytest.approx(1 - 1 / (2 * math.e), rel=1e-14)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            j_epsilon(EnergyProfile((0,), (1,)), 0)


class TestPolicySearch:
    @pytest.mark.parametrize("eps", [0.1, 1.0, 10.0])
    def test_example2_sticks(self, eps):
        policy, value = policy_search(example2_scenario(), eps)
        assert policy == [STICK]
        assert value < j_epsilon(EnergyProfile((0,), (1,)), eps)

    def test_single_particle(self):
        policy, value = policy_search(Scenario((1,), ((0,),), ((2,),), horizon=1), 1.0)
        assert policy == [] and value == pytest.approx(2.0)

    def test_pass_never_better_on_a_single_contact(self):
        s = Scenario((1, 1), ((0,), (2,)), ((1,), (-1,)), horizon=3)
        policy, _ = policy_search(s, 1.0)
        assert policy == [STICK]
        assert PASS not in policy
