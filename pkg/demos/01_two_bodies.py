"""
Two bodies, one collision
=========================

Evolve a crossing pair in exact arithmetic, then compare the sticky
trajectory with free flight and with a late re-split of the compound.
"""
from fractions import Fraction as F

from stickysim import Scenario
from stickysim.constructions import example2_scenario, resplit_trajectory
from stickysim.engine import (
    check_sticky, check_weak, energy_profile, evolve, free_flight,
    is_energy_admissible,
)

# unit masses on perpendicular paths, both reaching (1, 1) at t=1
scen = example2_scenario()
traj, log = evolve(scen)
for event in log:
    print("t =", event.time, "merged", [sorted(c.members) for c in event.clusters])

print("sticky violations:", check_sticky(traj))
print("weak residual:", check_weak(traj).residual)

# free flight is a weak solution too, it just isn't sticky
ff = free_flight(scen)
print("free flight weak residual:", check_weak(ff).residual)
print("free flight sticky violations:", len(check_sticky(ff)))

# splitting the compound at T=2 injects energy, so it is not admissible
for T in (1, 2):
    prof = energy_profile(resplit_trajectory(F(T)))
    print(f"re-split at T={T}: admissible={is_energy_admissible(prof)}")

# three bodies in the plane that all reach (2, 0) at t=2 with zero total momentum
scen = Scenario(
    masses=(F(1), F(2), F(1)),
    positions=((F(0), F(0)), (F(2), F(-1)), (F(4), F(2))),
    velocities=((F(1), F(0)), (F(0), F(1, 2)), (F(-1), F(-1))),
    horizon=F(5),
)
traj, log = evolve(scen)
print(len(log), "events; final velocities:", [traj.velocity(i, F(5)) for i in range(3)])
