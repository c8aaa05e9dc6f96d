"""Orchestrated reproductions with persisted JSON reports.

Each ``run_*`` function returns a :class:`Report`.  Reports are pure
functions of their parameters: the JSON form leaves out wall time so repeated
runs are byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

from .constructions import (
    Targeting, TailParams, example3_scenario, example4_scenario, hit_set, lemma2_exhaustive,
    nip_check, truncated_barycenter,
)
from .constructions.example4 import classify_cluster, contacts
from .core import (
    DEFAULT_FLOAT_TOLERANCE, FLOAT, RATIONAL, Scenario, jsonable, vsub,
)
from .engine import (
    PASS, STICK, check_sticky, check_weak, energy_profile, eulerian_moments, evolve,
    evolve_with_policy, free_flight, is_energy_admissible, nonstickiness_phi, policy_search,
)

RESULTS_ENV = "STICKYSIM_RESULTS_DIR"


def default_results_dir() -> Path:
    return Path(os.environ.get(RESULTS_ENV, "results"))


@dataclass
class Report:
    experiment: str
    parameters: Dict[str, Any]
    cases: List[Dict[str, Any]]
    backend: str = RATIONAL
    seeds: List[int] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.cases)

    @property
    def failures(self) -> List[Dict[str, Any]]:
        return [c for c in self.cases if not c["passed"]]

    def to_json(self) -> dict:
        return jsonable({
            "experiment": self.experiment,
            "parameters": self.parameters,
            "backend": self.backend,
            "seeds": self.seeds,
            "passed": self.passed,
            "cases": self.cases,
            "notes": self.notes,
        })

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def parameter_hash(self) -> str:
        key = json.dumps(jsonable({"experiment": self.experiment, "parameters": self.parameters,
                                   "backend": self.backend, "seeds": self.seeds}),
                         sort_keys=True)
        return hashlib.sha256(key.encode()).hexdigest()[:16]

    def save(self, results_dir: Optional[os.PathLike] = None) -> Path:
        out = Path(results_dir) if results_dir is not None else default_results_dir()
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{self.experiment}-{self.parameter_hash()}.json"
        path.write_text(self.dumps() + "\n")
        return path


def _case(name: str, passed: bool, witness: Optional[dict] = None, **observed) -> dict:
    out = {"name": name, "passed": bool(passed)}
    out.update(observed)
    if witness is not None and not passed:
        out["witness"] = witness
    return out


def _parallel_map(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ----------------------------------------------------------------------------
# non-uniqueness

def _example3_case(levels: int, seed: int) -> List[dict]:
    scen, spec = example3_scenario(levels, seed=seed)
    witness = {"scenario": scen.to_json(), "spec": spec.to_json()}
    cases = []
    traj, log = evolve(scen)
    times = [e.time for e in log]
    expected = [Fraction(1, 2 ** i) for i in range(levels, 0, -1)]
    cases.append(_case(f"N={levels}: sticky cascade event times", times == expected, witness,
                       observed=times, expected=expected))
    pairwise = all(len(e.clusters) == 1 and len(e.clusters[0].parts) == 2 for e in log)
    cases.append(_case(f"N={levels}: every event merges exactly two particles", pairwise,
                       witness))
    counts_ok = True
    for i in range(1, levels + 1):
        t_mid = (spec.times[i] + spec.times[i - 1]) / 2
        live = {traj.position(j, t_mid) for j in range(len(scen))}
        counts_ok &= len(live) == i
    cases.append(_case(f"N={levels}: i compounds on [t_i, t_(i-1))", counts_ok, witness))
    _, mom, _ = eulerian_moments(traj, 0)
    cases.append(_case(f"N={levels}: zero total momentum", all(c == 0 for c in mom), witness,
                       observed=mom))
    cases.append(_case(f"N={levels}: line family passes nip_check", nip_check(spec, scen.horizon),
                       witness))
    sticky_ok = not check_sticky(traj) and check_weak(traj).passed
    cases.append(_case(f"N={levels}: evolve output is sticky and weak", sticky_ok, witness))

    free = free_flight(scen)
    weak = check_weak(free)
    cases.append(_case(f"N={levels}: free flight weak residual", weak.residual_sq == 0, witness,
                       residual=weak.residual))
    cases.append(_case(f"N={levels}: free flight energy admissible",
                       is_energy_admissible(energy_profile(free)), witness))
    viol = check_sticky(free)
    deepest = (levels - 1, levels)
    single = len(viol) == 1 and viol[0].pair == deepest \
        and viol[0].contact_time == Fraction(1, 2 ** levels)
    cases.append(_case(f"N={levels}: free flight has one sticky violation (deepest pair)",
                       single, witness,
                       violations=[(v.i, v.j, v.contact_time, v.separation_time) for v in viol]))
    phi = nonstickiness_phi(free)
    cases.append(_case(f"N={levels}: non-stickiness of free flight", phi == Fraction(1, 4 ** levels),
                       witness, phi=phi, expected=Fraction(1, 4 ** levels)))
    return cases


def run_example3_nonuniqueness(levels: Iterable[int] = (3, 4, 5, 6), seed: int = 7,
                               workers: int = 1) -> Report:
    t0 = time.perf_counter()
    levels = list(levels)
    if any(n < 2 for n in levels):
        raise ValueError("levels must be >= 2")
    per = _parallel_map(_Example3Job(seed), levels, workers)
    cases = [c for block in per for c in block]
    return Report(
        "example3_nonuniqueness", {"levels": levels}, cases, RATIONAL, [seed],
        notes=["The truncated cascade is the unique sticky solution of the finite data; "
               "its free-flight twin is weak and energy admissible and violates stickiness "
               "only for the deepest pair, with non-stickiness 4^-N -> 0 as N grows while "
               "the violation persists.  The two-solution statement concerns the infinite "
               "configuration and is not a computation."],
        wall_time=time.perf_counter() - t0)


@dataclass(frozen=True)
class _Example3Job:
    seed: int

    def __call__(self, n: int) -> List[dict]:
        return _example3_case(n, self.seed)


# ----------------------------------------------------------------------------
# non-existence

def _example4_case(p: TailParams, levels: int) -> List[dict]:
    cases = []
    scen, spec = example4_scenario(p, levels, Targeting.TRUNCATED_TAIL)
    witness = {"scenario": scen.to_json(), "spec": spec.to_json()}
    traj, log = evolve(scen)
    hits = hit_set(spec, log)
    cases.append(_case(f"N={levels}: truncated targeting hit set", hits == {levels}, witness,
                       hits=sorted(hits), expected=[levels]))
    first = contacts(spec, log)
    ok_first = bool(first) and first[0]["whites"] == [levels] \
        and first[0]["time"] == spec.tau[levels - 1]
    cases.append(_case(f"N={levels}: with no prior hits bullet N hits at tau_N", ok_first,
                       witness, first_contact=first[0] if first else None))
    # once bullet N has knocked black N away, every earlier target set loses members
    lemma = []
    all_lower = True
    for k in range(1, levels):
        tau = spec.tau[k - 1]
        target = spec.targets[k - 1]
        remaining = truncated_barycenter(p, range(k, levels), tau)
        passed, total, bad = lemma2_exhaustive(p, k, tau, levels - k)
        all_lower &= remaining < target and passed == total
        lemma.append({"k": k, "tau": tau, "target": target,
                      "barycenter_without_N": remaining,
                      "proper_subsets_lower": f"{passed}/{total}"})
    cases.append(_case(f"N={levels}: removing tail members lowers every later target",
                       all_lower, witness, lemma2=lemma))
    cases.append(_case(f"N={levels}: evolve output is sticky and weak",
                       not check_sticky(traj) and check_weak(traj).passed, witness))

    scen_i, spec_i = example4_scenario(p, levels, Targeting.INFINITE_TAIL)
    _, log_i = evolve(scen_i)
    hits_i = hit_set(spec_i, log_i)
    cases.append(_case(f"N={levels}: infinite-tail targeting hit set", not hits_i,
                       {"scenario": scen_i.to_json(), "spec": spec_i.to_json()},
                       hits=sorted(hits_i), expected=[]))
    return cases


@dataclass(frozen=True)
class _Example4Job:
    params: TailParams

    def __call__(self, n: int) -> List[dict]:
        return _example4_case(self.params, n)


def run_example4_nonexistence(p: TailParams, levels: Iterable[int] = range(3, 9),
                              workers: int = 1) -> Report:
    t0 = time.perf_counter()
    p = TailParams(Fraction(p.alpha), Fraction(p.beta), Fraction(p.gamma)).require_valid()
    levels = list(levels)
    if any(n < 3 for n in levels):
        raise ValueError("levels must be >= 3")
    per = _parallel_map(_Example4Job(p), levels, workers)
    cases = [c for block in per for c in block]
    return Report(
        "example4_nonexistence",
        {"alpha": p.alpha, "beta": p.beta, "gamma": p.gamma, "levels": levels},
        cases, RATIONAL, [],
        notes=["At every finite truncation the hitting bullet is the deepest one, N, so "
               "the hit index escapes to infinity with the truncation.  Absence of a sticky "
               "solution for the infinite configuration is the theorem; the runs only "
               "certify its finite shadow."],
        wall_time=time.perf_counter() - t0)


# ----------------------------------------------------------------------------
# discounted-energy policies

@dataclass(frozen=True)
class _PolicyJob:
    scenario: Scenario
    horizon: Any

    def __call__(self, eps: float):
        return policy_search(self.scenario, eps, horizon=self.horizon)


def run_jeps_sweep(p: TailParams, levels: int = 3,
                   eps_grid: Sequence[float] = (10.0, 1.0, 0.1, 0.01),
                   horizon=3, workers: int = 1) -> Report:
    t0 = time.perf_counter()
    p = TailParams(Fraction(p.alpha), Fraction(p.beta), Fraction(p.gamma)).require_valid()
    scen, spec = example4_scenario(p, levels, horizon=horizon)
    witness = {"scenario": scen.to_json(), "spec": spec.to_json()}
    eps_grid = [float(e) for e in eps_grid]
    results = _parallel_map(_PolicyJob(scen, horizon), eps_grid, workers)
    cases, table = [], []
    for eps, (policy, value) in zip(eps_grid, results):
        _, log, _ = evolve_with_policy(scen, policy)
        kinds = [(classify_cluster(spec, c.members), c.decision, c.parts)
                 for e in log for c in e.clusters]
        black_stick = all(d is STICK for kind, d, _ in kinds if kind == "black-black")
        stuck = [rec["whites"] for rec in contacts(spec, log) if rec["decision"] == "STICK"]
        one_white = len(stuck) == 1 and len(stuck[0]) == 1
        n_eps = stuck[0][0] if one_white else None
        table.append({"eps": eps, "N_eps": n_eps, "J": value,
                      "policy": [d.value for d in policy]})
        w = dict(witness, policy=[d.value for d in policy], eps=eps)
        cases.append(_case(f"eps={eps}: black-black events all STICK", black_stick, w))
        cases.append(_case(f"eps={eps}: exactly one white-black STICK", one_white, w,
                           stuck_whites=stuck))
    ordered = sorted(table, key=lambda r: -r["eps"])
    idx = [r["N_eps"] for r in ordered]
    monotone = None not in idx and all(a <= b for a, b in zip(idx, idx[1:]))
    cases.append(_case("N(eps) non-decreasing as eps decreases", monotone,
                       dict(witness, table=ordered), table=ordered))
    return Report(
        "jeps_sweep",
        {"alpha": p.alpha, "beta": p.beta, "gamma": p.gamma, "levels": levels,
         "eps_grid": eps_grid, "horizon": horizon},
        cases, FLOAT, [],
        notes=["Minimizer structure is observed by exhaustive search at small N; it is "
               "not a proof of the general claim."],
        wall_time=time.perf_counter() - t0)


# ----------------------------------------------------------------------------
# randomized invariants

def random_scenario(rng: random.Random, dim: int, count: int, horizon=Fraction(2),
                    integer: bool = False) -> Scenario:
    """Random rational scenario with planted simultaneous meetings.

    In one dimension collisions are generic; above one, groups of two or
    three particles are aimed at common points so that merges happen.
    """
    def q(lo=-4, hi=4, den=4):
        if integer:
            # same number of grid points, spread over integers
            return Fraction(rng.randint(lo * den, hi * den))
        return Fraction(rng.randint(lo * den, hi * den), den)

    masses, pos, vel = [], [], []
    taken = set()
    while len(masses) < count:
        left = count - len(masses)
        if dim > 1 and left >= 2 and rng.random() < 0.7:
            size = min(left, rng.choice((2, 2, 3)))
            meet_t = Fraction(rng.randint(1, 7), 4)
            point = tuple(q() for _ in range(dim))
            vs = [tuple(q(-2, 2) for _ in range(dim)) for _ in range(size)]
            xs = [tuple(c - meet_t * d for c, d in zip(point, v)) for v in vs]
        else:
            vs = [tuple(q(-2, 2) for _ in range(dim))]
            xs = [tuple(q() for _ in range(dim))]
        if len(set(xs)) < len(xs) or taken.intersection(xs):
            continue
        for x, v in zip(xs, vs):
            masses.append(Fraction(rng.randint(1, 8), rng.choice((1, 2, 4))))
            pos.append(x)
            vel.append(v)
            taken.add(x)
    return Scenario(tuple(masses), tuple(pos), tuple(vel), horizon)


def _canonical(traj, log, relabel=None, shift=None):
    """Event log and end positions keyed by original labels."""
    rl = relabel or (lambda i: i)
    ev = [(e.time, sorted(tuple(sorted(rl(m) for m in c.members)) for c in e.clusters))
          for e in log]
    ends = {}
    for i in range(len(traj)):
        x = traj.segments[i][-1].position_end
        if shift is not None:
            x = vsub(x, shift)
        ends[rl(i)] = x
    return ev, ends


def _same(a, b, tol) -> bool:
    (ev_a, end_a), (ev_b, end_b) = a, b
    if len(ev_a) != len(ev_b):
        return False
    for (ta, ca), (tb, cb) in zip(ev_a, ev_b):
        if ca != cb:
            return False
        if (ta != tb) if tol == 0 else abs(ta - tb) > tol:
            return False
    for k, x in end_a.items():
        y = end_b[k]
        if tol == 0:
            if x != y:
                return False
        elif max(abs(p - q) for p, q in zip(x, y)) > tol:
            return False
    return True


def check_scenario(scen: Scenario, rng: random.Random) -> List[str]:
    """Names of the engine invariants that fail on ``scen``."""
    failed = []
    exact = scen.backend == RATIONAL
    tol = scen.tolerance
    drift_tol = 0 if exact else 1e-10
    traj, log = evolve(scen)
    m0, p0, _ = eulerian_moments(traj, 0 * scen.horizon)
    for t in [e.time for e in log] + [scen.horizon]:
        m, p, _ = eulerian_moments(traj, t)
        if abs(m - m0) > drift_tol:
            failed.append("mass conservation")
            break
        if max(abs(a - b) for a, b in zip(p, p0)) > drift_tol:
            failed.append("momentum conservation")
            break
    prof = energy_profile(traj)
    if not is_energy_admissible(prof):
        failed.append("energy non-increasing")
    drops = {}
    for e in log:
        drops[e.time] = drops.get(e.time, 0) + sum(c.energy_drop for c in e.clusters)
    for k in range(1, len(prof.times)):
        d = prof.values[k - 1] - prof.values[k]
        expect = drops.get(prof.times[k], 0)
        if (d != expect) if exact else abs(d - expect) > 1e-10 * max(1.0, abs(prof.values[0])):
            failed.append("energy drop matches event log")
            break
    if check_sticky(traj, tol):
        failed.append("sticky property")
    if not check_weak(traj, tol).passed:
        failed.append("weak solution")

    base = _canonical(traj, log)
    cmp_tol = 0 if exact else 1e-9
    n = len(scen)
    perm = list(range(n))
    rng.shuffle(perm)  # new index k holds old particle perm[k]
    shuffled = scen.replace(masses=tuple(scen.masses[i] for i in perm),
                            positions=tuple(scen.positions[i] for i in perm),
                            velocities=tuple(scen.velocities[i] for i in perm))
    t2, l2 = evolve(shuffled)
    if not _same(base, _canonical(t2, l2, relabel=lambda k: perm[k]), cmp_tol):
        failed.append("reordering invariance")
    shift = tuple(type(scen.horizon)(rng.randint(-8, 8)) / 2 for _ in range(scen.dimension))
    moved = scen.replace(positions=tuple(tuple(a + b for a, b in zip(x, shift))
                                         for x in scen.positions))
    t3, l3 = evolve(moved)
    if not _same(base, _canonical(t3, l3, shift=shift), cmp_tol):
        failed.append("translation invariance")
    c = type(scen.horizon)(rng.randint(1, 9)) / 3
    scaled = scen.replace(masses=tuple(c * m for m in scen.masses))
    t4, l4 = evolve(scaled)
    if not _same(base, _canonical(t4, l4), cmp_tol):
        failed.append("mass-scaling invariance")
    return failed


@dataclass(frozen=True)
class _PropertyJob:
    seed: int

    def __call__(self, index: int) -> dict:
        rng = random.Random(f"{self.seed}:{index}")
        dim = rng.choice((1, 2, 3))
        count = rng.randint(1, 20)
        backend = RATIONAL if index % 2 == 0 else FLOAT
        scen = random_scenario(rng, dim, count)
        if backend == FLOAT:
            scen = scen.with_backend(FLOAT, DEFAULT_FLOAT_TOLERANCE)
        failed = check_scenario(scen, rng)
        out = {"index": index, "backend": backend, "dimension": dim, "particles": count,
               "passed": not failed}
        if failed:
            out["failed"] = failed
            out["witness"] = {"scenario": scen.to_json(), "rng": f"{self.seed}:{index}"}
        return out


def negative_control(seed: int) -> dict:
    """A PASS injected at the first contact must be caught by the sticky check."""
    rng = random.Random(f"{seed}:negative")
    while True:
        scen = random_scenario(rng, 2, 6)
        _, log = evolve(scen)
        if log and log[0].time < scen.horizon:
            break
    traj, plog, _ = evolve_with_policy(scen, [PASS], default=STICK)
    viol = check_sticky(traj)
    return _case("injected PASS is reported by check_sticky", bool(viol),
                 {"scenario": scen.to_json()}, violations=len(viol))


def cross_backend(seed: int, count: int = 10) -> dict:
    """Integer 1-d data: float and rational runs give the same event structure."""
    rng = random.Random(f"{seed}:cross")
    mismatches = []
    for k in range(count):
        scen = random_scenario(rng, 1, rng.randint(2, 12), integer=True)
        ra = _canonical(*evolve(scen))
        fl = _canonical(*evolve(scen.with_backend(FLOAT)))
        if not _same(ra, fl, 1e-9):
            mismatches.append(scen.to_json())
    return _case("float and rational event logs agree on integer data", not mismatches,
                 {"scenarios": mismatches}, compared=count)


def run_property_suite(seed: int = 1, count: int = 1000, workers: int = 1) -> Report:
    t0 = time.perf_counter()
    results = _parallel_map(_PropertyJob(seed), list(range(count)), workers)
    bad = [r for r in results if not r["passed"]]
    cases = [_case(f"{count} random scenarios satisfy the engine invariants", not bad,
                   {"failures": bad}, checked=count, failures=len(bad))]
    cases.append(negative_control(seed))
    cases.append(cross_backend(seed))
    return Report("property_suite", {"count": count}, cases, "rational+float", [seed],
                  notes=["Even case indices run the rational backend, odd ones float "
                         "(tolerance 1e-9, drift bound 1e-10)."],
                  wall_time=time.perf_counter() - t0)
