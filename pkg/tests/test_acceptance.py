"""Acceptance gate: one test per criterion, each with its own time limit.

Every test records a verdict line; ``conftest.py`` prints them after the run
and ``python3 tests/test_acceptance.py`` prints them directly.
"""

import json
import random
import subprocess
import sys
import time
from fractions import Fraction as F
from pathlib import Path

import pytest
from scipy.optimize import bisect

from stickysim.constructions import (
    BallCloud, Targeting, TailParams, collision_time_tk, discretize_ball, example2_scenario,
    example3_scenario, example4_scenario, hit_set, lemma1_check, lemma2_exhaustive,
    select_tau, smooth_scenario,
)
from stickysim.core import Scenario, vaxpy
from stickysim.engine import (
    check_sticky, check_weak, energy_profile, eventlog_to_json, evolve, free_flight,
    nonstickiness_phi,
)
from stickysim.experiments import run_example3_nonuniqueness, run_jeps_sweep, run_property_suite

PARAMS = TailParams(F(1, 4), F(1, 2), F(3, 4))
VERDICTS = {}


def record(number, title, ok, elapsed, limit, detail=""):
    within = limit is None or elapsed < limit
    status = "PASS" if ok and within else "FAIL"
    budget = f" / {limit:g}s" if limit else ""
    line = f"criterion {number:>2} {status}  {title} [{elapsed:.2f}s{budget}]"
    if detail:
        line += f"  {detail}"
    VERDICTS[number] = line
    print(line)
    assert ok, detail or title
    assert within, f"took {elapsed:.2f}s, limit {limit}s"


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


# ----------------------------------------------------------------------------

def test_criterion_01_example2():
    with Timer() as tm:
        traj, log = evolve(example2_scenario())
        prof = energy_profile(traj)
    c = log[0].clusters[0] if log else None
    ok = (len(log) == 1 and log[0].time == 1 and c.position == (1, 1)
          and c.post_velocity == (F(1, 2), F(1, 2)) and prof.values == (1, F(1, 2))
          and prof.times == (0, 1))
    record(1, "two-particle merge at t=1, (1,1), v=(1/2,1/2), E 1 -> 1/2", ok, tm.elapsed, 1)


def _exact_b(p, k, t):
    a, b, g = p.alpha, p.beta, p.gamma
    geo = lambda r: r ** k / (1 - r)  # noqa: E731
    return (geo(a * b) + t * (geo(a) - geo(a * g))) / geo(a)


def _series_gap(p, k, t, terms=400):
    a, b, g = float(p.alpha), float(p.beta), float(p.gamma)
    num = den = 0.0
    for j in range(k, k + terms):
        num += a ** j * (b ** j + t * (1 - g ** j))
        den += a ** j
    return num / den - (b ** (k - 1) + t * (1 - g ** (k - 1)))


def test_criterion_02_collision_times():
    with Timer() as tm:
        frozen = [collision_time_tk(PARAMS, k) for k in (1, 2, 3)] == \
            [F(13, 7), F(26, 21), F(52, 63)]
        exact = all(_exact_b(PARAMS, k, collision_time_tk(PARAMS, k))
                    == PARAMS.x(k - 1, collision_time_tk(PARAMS, k)) for k in range(1, 11))
        worst = 0.0
        fp = PARAMS.as_float()
        for k in range(1, 11):
            oracle = bisect(lambda t: _series_gap(PARAMS, k, t), 0.0, 100.0,
                            xtol=1e-18, rtol=1e-15, maxiter=500)
            rational = collision_time_tk(PARAMS, k)
            floating = collision_time_tk(fp, k)
            worst = max(worst, abs(floating - oracle) / oracle,
                        abs(float(rational) - oracle) / oracle)
    record(2, "t_(k-1) closed form vs bisection oracle, k=1..10",
           frozen and exact and worst <= 1e-12, tm.elapsed, None,
           f"frozen={frozen} exact={exact} max_rel_err={worst:.1e}")


def _random_valid(rng):
    while True:
        b = F(rng.randint(1, 998), 1000)
        g = F(rng.randint(1, 999), 1000)
        if not b < g:
            continue
        bound = 1 / (1 + b + g)
        a = bound * F(rng.randint(1, 999), 1000)
        p = TailParams(a, b, g)
        if p.is_valid():
            return p


def test_criterion_03_lemma1():
    rng = random.Random(20240)
    with Timer() as tm:
        bad = []
        for _ in range(500):
            p = _random_valid(rng)
            for k in range(2, 13):
                if not lemma1_check(p, k):
                    bad.append((p, k))
        invalid = TailParams(F(3, 5), F(1, 2), F(3, 4))
        rejects = not invalid.is_valid() and not lemma1_check(invalid, 2)
    record(3, "ordering lemma on 500 valid triples, k=2..12; fails for (3/5,1/2,3/4)",
           not bad and rejects, tm.elapsed, 5, f"violations={len(bad)} invalid_fails={rejects}")


def test_criterion_04_lemma2():
    with Timer() as tm:
        rows = []
        for k in range(2, 7):
            tau = select_tau(PARAMS, k)
            rows.append(lemma2_exhaustive(PARAMS, k, tau, 10))
    ok = all(r == (1023, 1023, None) for r in rows)
    record(4, "subset barycenter lemma, k=2..6, all 1023 proper subsets",
           ok, tm.elapsed, 30, " ".join(f"{p}/{t}" for p, t, _ in rows))


def test_criterion_05_nonuniqueness():
    with Timer() as tm:
        details, ok = [], True
        for n in range(3, 7):
            scen, _ = example3_scenario(n, seed=7)
            _, log = evolve(scen)
            times_ok = [e.time for e in log] == [F(1, 2 ** i) for i in range(n, 0, -1)]
            free = free_flight(scen)
            weak = check_weak(free)
            viol = check_sticky(free)
            phi = nonstickiness_phi(free)
            good = times_ok and weak.residual_sq == 0 and viol and phi == F(1, 4 ** n)
            ok &= bool(good)
            details.append(f"N={n}:phi={phi}")
    record(5, "cascade at 2^-i; free flight weak (residual 0), not sticky, phi=4^-N",
           ok, tm.elapsed, 10, " ".join(details))


def test_criterion_06_nonexistence():
    with Timer() as tm:
        truncated, infinite = {}, {}
        for n in range(3, 9):
            scen, spec = example4_scenario(PARAMS, n, Targeting.TRUNCATED_TAIL)
            truncated[n] = hit_set(spec, evolve(scen)[1])
            scen, spec = example4_scenario(PARAMS, n, Targeting.INFINITE_TAIL)
            infinite[n] = hit_set(spec, evolve(scen)[1])
    ok = all(truncated[n] == {n} for n in truncated) and not any(infinite.values())
    record(6, "truncated targeting hit set {N}, infinite targeting empty, N=3..8",
           ok, tm.elapsed, 30,
           "hits=" + ",".join(str(sorted(truncated[n])) for n in truncated))


def test_criterion_07_policy_structure():
    with Timer() as tm:
        rep = run_jeps_sweep(PARAMS, 3, (10.0, 1.0, 0.1, 0.01))
    table = rep.cases[-1]["table"]
    record(7, "discounted-energy minimizers: black-black stick, one white sticks, monotone",
           rep.passed, tm.elapsed, 60,
           "N(eps)=" + ",".join(f"{r['eps']:g}:{r['N_eps']}" for r in table))


def test_criterion_08_smoothing():
    rng = random.Random(8)
    with Timer() as tm:
        failures = 0
        for i in range(50):
            dim = rng.choice((1, 2, 3))
            s = F(1, rng.choice((2, 4, 8, 16))) * F(rng.randint(1, 3), 3)
            cloud = BallCloud(tuple(F(rng.randint(-8, 8), 4) for _ in range(dim)), s,
                              tuple(F(rng.randint(-8, 8), 4) for _ in range(dim)),
                              F(rng.randint(1, 9), rng.randint(1, 4)))
            ps = discretize_ball(cloud, rng.randint(2, 9), seed=i)
            scen = Scenario(tuple(p.mass for p in ps), tuple(p.position for p in ps),
                            tuple(p.velocity for p in ps), horizon=1)
            _, log = evolve(scen)
            good = (len(log) == 1 and log[0].time == s
                    and len(log[0].clusters) == 1
                    and log[0].clusters[0].members == tuple(range(len(ps)))
                    and log[0].clusters[0].position == vaxpy(cloud.center, s,
                                                            cloud.base_velocity))
            failures += not good
        scen, spec = example4_scenario(PARAMS, 3)
        point_hits = hit_set(spec, evolve(scen)[1])
        sm = smooth_scenario(scen, F(1, 64), samples=3, seed=1)
        _, log = evolve(sm.scenario)
        late = [e for e in log if e.time > max(sm.collapse_times)]
        smooth_hits = hit_set(spec, late, sm.groups)
    ok = failures == 0 and smooth_hits == point_hits == {3}
    record(8, "50 clouds collapse in one event at t=s; smoothed example hit set matches",
           ok, tm.elapsed, 60, f"cloud_failures={failures} hits={sorted(smooth_hits)}")


def test_criterion_09_property_suite():
    with Timer() as tm:
        rep = run_property_suite(seed=1, count=1000)
    record(9, "1000 random scenarios: conservation, sticky+weak, invariances",
           rep.passed, tm.elapsed, 120,
           f"failures={[c['name'] for c in rep.failures]}" if not rep.passed else "")


def test_criterion_10_determinism(tmp_path):
    def logs():
        out = []
        scen, _ = example3_scenario(5, seed=7)
        out.append(eventlog_to_json(evolve(scen)[1]))
        sm = smooth_scenario(example4_scenario(PARAMS, 3)[0], F(1, 64), samples=3, seed=1)
        out.append(eventlog_to_json(evolve(sm.scenario)[1]))
        return json.dumps(out, sort_keys=True)

    def cli(dest):
        cmd = [sys.executable, "-m", "stickysim", "experiment", "properties", "--count",
               "40", "--seed", "3", "--out", str(dest)]
        subprocess.run(cmd, check=True, capture_output=True)
        (path,) = Path(dest).glob("*.json")
        return path.read_bytes()

    with Timer() as tm:
        same_logs = logs() == logs()
        a = run_example3_nonuniqueness([3, 4], seed=7).dumps()
        b = run_example3_nonuniqueness([3, 4], seed=7).dumps()
        same_cli = cli(tmp_path / "one") == cli(tmp_path / "two")
    record(10, "fixed seeds give byte-identical event logs and reports",
           same_logs and a == b and same_cli, tm.elapsed, None,
           f"logs={same_logs} reports={a == b} cli={same_cli}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
