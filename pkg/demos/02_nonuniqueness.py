"""
Two weak solutions from the same data
=====================================

A dyadic cascade of pairs.  Pair i meets at time 2^-i, every compound
comes to rest, and the sticky evolution is a weak solution.  Free flight
from the same initial data is also weak and also energy admissible, and
its only failure is a single late separation.
"""
from fractions import Fraction as F

from stickysim.constructions import example3_scenario, nip_check
from stickysim.engine import (
    check_sticky, check_weak, energy_profile, evolve, free_flight,
    is_energy_admissible, nonstickiness_phi,
)

N = 5
scen, spec = example3_scenario(N, seed=7)
print(f"{len(scen.masses)} particles, cascade times", [str(t) for t in spec.times])

sticky, log = evolve(scen)
print("events:", len(log))
print("sticky evolution  violations:", len(check_sticky(sticky)),
      " weak:", check_weak(sticky).passed)

ff = free_flight(scen)
bad = check_sticky(ff)
print("free flight       violations:", len(bad), " weak:", check_weak(ff).passed,
      " admissible:", is_energy_admissible(energy_profile(ff)))
for v in bad:
    print(f"  particles {v.i},{v.j} touch at {v.contact_time} and part at {v.separation_time}")

# phi measures how much mass un-sticks; it shrinks like 4^-N
print("phi(free flight) =", nonstickiness_phi(ff), "  4^-N =", F(1, 4 ** N))
print("cascade lines only meet where designed:", nip_check(spec))
