"""
Point masses to clouds
======================

Each point mass is replaced by a small ball of sampled particles whose
velocities pull them together onto the original path.  Once the cloud has
collapsed the evolution continues as before.
"""
from fractions import Fraction as F

from stickysim.constructions import cloud_momentum, example2_scenario, smooth_scenario
from stickysim.engine import check_sticky, evolve

base = example2_scenario()
sm = smooth_scenario(base, F(1, 8), samples=4, seed=3)
print(f"{len(base.masses)} point masses -> {len(sm.scenario.masses)} cloud particles,"
      f" {sm.halvings} halvings of s")
# per-cloud momentum of the samples, next to the point mass it replaces
scen = sm.scenario
parts = scen.initial_state().particles
for i, cloud in enumerate(sm.clouds):
    mine = [parts[j] for j, g in sm.groups.items() if g == i]
    mom = [float(c) for c in cloud_momentum(cloud, mine)]
    point = [float(base.masses[i] * v) for v in base.velocities[i]]
    print(f"cloud {i}: s={cloud.s}, samples {mom}, point mass {point}")

traj, log = evolve(scen)
print(len(log), "events, last at t =", log[-1].time)
print("sticky violations:", len(check_sticky(traj)))
