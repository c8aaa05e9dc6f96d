"""
Choosing which collisions stick
===============================

Relax the sticky rule.  Every contact may STICK or PASS, and a policy is
scored by J_eps, the integral of exp(-t/eps) times the kinetic energy.
Small eps cares only about early times, so early energy loss pays off.
Search all policies on a short tail and watch which white particle the
black compound ends up holding.
"""
from fractions import Fraction as F

from stickysim.constructions import TailParams
from stickysim.experiments import run_jeps_sweep

p = TailParams(F(1, 4), F(1, 2), F(3, 4))
report = run_jeps_sweep(p, levels=3, eps_grid=(10, 1, 0.1, 0.01))

table = next(c for c in report.cases if "table" in c)["table"]
print(f"{'eps':>6} {'N_eps':>6} {'J':>10}  policy")
for row in table:
    print(f"{row['eps']:>6} {row['N_eps']:>6} {row['J']:>10.4f}  {' '.join(row['policy'])}")
print("all checks passed:", report.passed)
for note in report.notes:
    print("note:", note)
