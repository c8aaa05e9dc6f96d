import dataclasses
from fractions import Fraction as F

import pytest

from stickysim.constructions import (
    BallCloud, Targeting, TailParams, Variant, classify_cluster, cloud_momentum,
    collapse_velocity, contacts, discretize_ball, example2_scenario, example3_scenario,
    example4_scenario, hit_set, isolation_conflicts, nip_check, resplit_trajectory,
    select_tau, smooth_bump, smooth_scenario,
)
from stickysim.constructions.example3 import Example3Spec
from stickysim.core import FLOAT, Scenario, vaxpy
from stickysim.engine import check_sticky, check_weak, eulerian_moments, evolve


class TestExample2:
    def test_data(self):
        s = example2_scenario()
        assert s.masses == (1, 1)
        _, log = evolve(s)
        assert log[0].time == 1 and log[0].clusters[0].position == (1, 1)

    def test_perturbed(self):
        _, log = evolve(example2_scenario(eps=F(1, 1000)))
        assert log == ()

    def test_resplit_shape(self):
        traj = resplit_trajectory(3, horizon=4)
        assert traj.position(0, F(3)) == (2, 2)
        assert traj.position(0, F(4)) == (2, 3)
        assert traj.position(1, F(4)) == (3, 2)

    def test_resplit_bounds(self):
        with pytest.raises(ValueError):
            resplit_trajectory(F(1, 2))


class TestExample3:
    @pytest.mark.parametrize("levels", [2, 3, 5])
    def test_cascade(self, levels):
        scen, spec = example3_scenario(levels, seed=11)
        assert len(scen) == levels + 1
        _, log = evolve(scen)
        assert [e.time for e in log] == [F(1, 2 ** i) for i in range(levels, 0, -1)]
        assert nip_check(spec)

    def test_momentum_zero(self):
        scen, _ = example3_scenario(4, seed=2)
        traj, _ = evolve(scen)
        assert eulerian_moments(traj, F(0))[1] == (0, 0)
        assert traj.position(0, F(1)) == (0, 0)

    def test_compound_count(self):
        scen, spec = example3_scenario(4, seed=2)
        traj, _ = evolve(scen)
        for i in range(1, 5):
            mid = (spec.times[i] + spec.times[i - 1]) / 2
            assert len({traj.position(j, mid) for j in range(len(scen))}) == i

    def test_seeded(self):
        assert example3_scenario(4, seed=9) == example3_scenario(4, seed=9)
        assert example3_scenario(4, seed=9)[0] != example3_scenario(4, seed=10)[0]

    def test_nip_detects_shared_line(self):
        _, spec = example3_scenario(3, seed=1)
        v = list(spec.v)
        xs = list(spec.x_star)
        v[2] = v[1]
        xs[2] = vaxpy(xs[1], spec.times[2] - spec.times[1], v[1])
        bad = dataclasses.replace(spec, v=tuple(v), x_star=tuple(xs))
        assert not nip_check(bad)

    def test_spec_round_trip(self):
        _, spec = example3_scenario(3, seed=4)
        back = Example3Spec.from_json(spec.to_json())
        assert back.lines() == spec.lines()

    def test_needs_two_levels(self):
        with pytest.raises(ValueError):
            example3_scenario(1)


class TestExample4:
    def test_particle_count(self, paper_params):
        scen, spec = example4_scenario(paper_params, 3)
        assert len(scen) == 6
        assert spec.white_index(1) == 3 and spec.level_of(5) == 3

    def test_rejects_invalid(self):
        with pytest.raises(ValueError, match="4/9"):
            example4_scenario(TailParams(F(3, 5), F(1, 2), F(3, 4)), 3)

    def test_truncated_n4(self, paper_params):
        scen, spec = example4_scenario(paper_params, 4)
        traj, log = evolve(scen)
        recs = contacts(spec, log)
        assert [r["whites"] for r in recs] == [[4]]
        assert recs[0]["time"] == spec.tau[3]
        assert hit_set(spec, log, stuck_only=True) == {4}
        for k in (1, 2, 3):
            w = spec.white_index(k)
            assert all(traj.position(w, t) != traj.position(b, t)
                       for b in range(4) for t in (spec.tau[k - 1],))

    def test_infinite_targeting_misses(self, paper_params):
        scen, spec = example4_scenario(paper_params, 4, Targeting.INFINITE_TAIL)
        _, log = evolve(scen)
        assert hit_set(spec, log) == set()

    def test_white_aims_at_target(self, paper_params):
        scen, spec = example4_scenario(paper_params, 3)
        k = 2
        w = spec.white_index(k)
        pos = vaxpy(scen.positions[w], spec.tau[k - 1], scen.velocities[w])
        assert pos == (spec.targets[k - 1], 0)
        assert spec.tau[k - 1] == select_tau(paper_params, k)

    def test_slanted_limits(self, paper_params):
        scen, spec = example4_scenario(paper_params, 8, variant=Variant.SLANTED)
        starts = [scen.positions[spec.white_index(k)] for k in range(1, 9)]
        vels = [scen.velocities[spec.white_index(k)] for k in range(1, 9)]
        assert abs(vels[-1][1]) < abs(vels[0][1])
        assert all(v[0] == 1 for v in vels)
        dist = [abs(x[0]) + abs(x[1]) for x in starts]
        assert dist[-1] < dist[0]

    def test_slanted_hit_structure(self, paper_params):
        scen, spec = example4_scenario(paper_params, 3, variant=Variant.SLANTED)
        _, log = evolve(scen)
        assert hit_set(spec, log) == {3}

    def test_classify(self, paper_params):
        _, spec = example4_scenario(paper_params, 3)
        assert classify_cluster(spec, [0, 1]) == "black-black"
        assert classify_cluster(spec, [0, 4]) == "white-black"
        assert classify_cluster(spec, [3, 4]) == "white-white"


class TestSmoothing:
    def cloud(self, **kw):
        args = dict(center=(F(1), F(2)), s=F(1, 4), base_velocity=(F(1), F(-1)), mass=F(3))
        args.update(kw)
        return BallCloud(**args)

    def test_bump_support(self):
        c = self.cloud()
        assert smooth_bump(c, (F(1) + c.radius, F(2))) == 0
        assert smooth_bump(c, c.center) > 0
        assert not c.contains((F(1) + c.radius, F(2)))

    def test_velocity_at_center(self):
        c = self.cloud()
        assert collapse_velocity(c.center, c.s, c.base_velocity, c.center) == c.base_velocity

    def test_mass_normalized_and_symmetric(self):
        c = self.cloud()
        ps = discretize_ball(c, 7, seed=3)
        assert sum(p.mass for p in ps) == 3
        assert all(c.contains(p.position) for p in ps)
        assert len({p.position for p in ps}) == 7

    @pytest.mark.parametrize("seed", range(5))
    def test_single_collapse_event(self, seed):
        c = self.cloud()
        ps = discretize_ball(c, 6, seed=seed)
        scen = Scenario(tuple(p.mass for p in ps), tuple(p.position for p in ps),
                        tuple(p.velocity for p in ps), horizon=1)
        traj, log = evolve(scen)
        assert len(log) == 1
        (ev,) = log
        assert ev.time == c.s
        assert ev.clusters[0].members == tuple(range(6))
        assert ev.clusters[0].position == vaxpy(c.center, c.s, c.base_velocity)
        assert ev.clusters[0].post_velocity == c.base_velocity
        assert cloud_momentum(c, ps) == tuple(3 * v for v in c.base_velocity)

    def test_isolation(self):
        a = self.cloud()
        near = self.cloud(center=(F(1) + F(1, 32), F(2)))
        far = self.cloud(center=(F(5), F(2)))
        assert isolation_conflicts([a, near]) == [(0, 1)]
        assert isolation_conflicts([a, far]) == []

    def test_halving(self):
        base = Scenario((1, 1), ((0, 0), (F(1, 10), 0)), ((0, 0), (0, 0)), horizon=1)
        sm = smooth_scenario(base, F(1, 2), samples=3)
        assert sm.halvings > 0
        assert not isolation_conflicts(sm.clouds)

    def test_floor(self):
        base = Scenario((1, 1), ((0, 0), (F(1, 10 ** 6), 0)), ((0, 0), (0, 0)), horizon=1)
        with pytest.raises(ValueError):
            smooth_scenario(base, F(1, 2), samples=3, s_floor=F(1, 64))

    def test_smoothed_example2_float(self):
        sm = smooth_scenario(example2_scenario(backend=FLOAT), 0.125, samples=5, seed=1)
        traj, log = evolve(sm.scenario)
        last = log[-1]
        assert last.time == pytest.approx(1.0, abs=1e-6)
        assert last.clusters[0].position == pytest.approx((1.0, 1.0), abs=1e-6)
        assert len(last.clusters[0].members) == 10

    def test_smoothed_example4_hit_structure(self, paper_params):
        scen, spec = example4_scenario(paper_params, 3)
        _, point_log = evolve(scen)
        sm = smooth_scenario(scen, F(1, 64), samples=3, seed=2)
        traj, log = evolve(sm.scenario)
        after = [e for e in log if e.time > max(sm.collapse_times)]
        assert hit_set(spec, after, sm.groups) == hit_set(spec, point_log) == {3}
        assert not check_sticky(traj)
        assert check_weak(traj).passed
