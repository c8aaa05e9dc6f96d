"""
No sticky evolution hits the right target
=========================================

One black compound moves along a tail of white particles.  Each white
particle k is aimed at the point the black compound would reach at time
tau_k if it had swallowed exactly the whites before k.  Whichever white
the compound meets first spoils the plan for every later one, so the
designed collision pattern can't be realized.
"""
from fractions import Fraction as F

from stickysim.constructions import (
    TailParams, example4_scenario, hit_set, lemma1_check, lemma2_exhaustive,
    select_tau,
)
from stickysim.engine import check_sticky, check_weak, evolve

p = TailParams(F(1, 4), F(1, 2), F(3, 4))

# the two tail inequalities the construction relies on
for k in range(2, 7):
    tau = select_tau(p, k)
    ok, total, _ = lemma2_exhaustive(p, k, tau, cutoff=8)
    print(f"k={k}: tau={float(tau):.3e}  lemma1={lemma1_check(p, k)}"
          f"  proper subsets left of the tail: {ok}/{total}")

for N in range(3, 7):
    scen, spec = example4_scenario(p, N)
    traj, log = evolve(scen)
    first = log[0]
    print(f"N={N}: {len(log)} events, first at t={float(first.time):.3e},"
          f" hit set {sorted(hit_set(spec, log))},"
          f" sticky ok={not check_sticky(traj)}, weak ok={check_weak(traj).passed}")
