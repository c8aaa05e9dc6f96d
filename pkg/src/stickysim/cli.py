"""``stickysim`` command line: gen, run, verify, experiment.

Exit codes: 0 pass, 1 a check failed, 2 bad input, 3 event cap reached.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from . import io
from .constructions import (
    Example3Spec, Targeting, TailParams, Variant, example2_scenario, example3_scenario,
    example4_scenario, lemma1_check, lemma2_exhaustive, nip_check, resplit_trajectory,
    select_tau, smooth_scenario,
)
from .core import DEFAULT_FLOAT_TOLERANCE, FLOAT, RATIONAL, Scenario, jsonable, to_scalar
from .engine import (
    EventCapExceeded, check_sticky, check_weak, energy_profile, eventlog_summary, evolve,
    free_flight, is_energy_admissible, nonstickiness_phi,
)
from .experiments import (
    default_results_dir, run_example3_nonuniqueness, run_example4_nonexistence,
    run_jeps_sweep, run_property_suite,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_range(text: str) -> List[int]:
    """``"3..8"`` -> 3..8 inclusive; ``"3,5"`` and ``"4"`` also accepted."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad integer range {text!r}") from None


def parse_floats(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad number list {text!r}") from None


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad rational {text!r}") from None


def _params(args) -> TailParams:
    return TailParams(parse_fraction(args.alpha), parse_fraction(args.beta),
                      parse_fraction(args.gamma))


def _apply_overrides(scen: Scenario, args) -> Scenario:
    backend = args.backend or scen.backend
    if args.tolerance is not None:
        tol = args.tolerance
    elif backend == scen.backend:
        tol = scen.tolerance
    else:
        tol = None
    if backend == RATIONAL and tol not in (None, 0):
        raise UsageError("the rational backend requires --tolerance 0")
    if backend != scen.backend or tol != scen.tolerance:
        scen = scen.with_backend(backend, tol)
    changes = {}
    if args.horizon is not None:
        changes["horizon"] = to_scalar(args.horizon, scen.backend)
    if args.event_cap is not None:
        changes["event_cap"] = args.event_cap
    return scen.replace(**changes) if changes else scen


def _check_flags(args) -> None:
    if args.backend == RATIONAL and args.tolerance not in (None, 0):
        raise UsageError("the rational backend requires --tolerance 0")
    if args.tolerance is not None and args.tolerance < 0:
        raise UsageError("--tolerance must be non-negative")


def _emit(verdict: str, witness) -> None:
    print(verdict)
    print(json.dumps(jsonable(witness), indent=2, sort_keys=True))


def _out_path(args, default_name: str) -> Path:
    if args.out:
        return Path(args.out)
    return default_results_dir() / default_name


# ----------------------------------------------------------------------------
# gen

def cmd_gen(args) -> int:
    kind = args.kind
    spec = None
    if kind == "resplit":
        traj = resplit_trajectory(parse_fraction(args.split_time),
                                  horizon=parse_fraction(args.horizon or "3"),
                                  backend=args.backend or RATIONAL)
        path = io.save_trajectory(traj, _out_path(args, "resplit.json"))
        print(f"wrote {path}")
        return EXIT_OK
    if kind == "example2":
        scen = example2_scenario(parse_fraction(args.eps))
        spec = {"kind": "example2", "eps": parse_fraction(args.eps)}
    elif kind == "example3":
        if args.levels is None:
            raise UsageError("example3 needs --levels")
        scen, s3 = example3_scenario(int(args.levels), seed=args.seed)
        spec = s3.to_json()
    elif kind == "example4":
        if args.levels is None:
            raise UsageError("example4 needs --levels")
        p = _params(args)
        if not p.is_valid():
            p.require_valid()
        scen, s4 = example4_scenario(p, int(args.levels), Targeting(args.targeting),
                                     Variant(args.variant))
        spec = s4.to_json()
    elif kind == "smooth":
        if not args.input:
            raise UsageError("smooth needs --input scenario.json")
        base = io.load_scenario(args.input)
        sm = smooth_scenario(base, parse_fraction(args.s), samples=args.samples, seed=args.seed)
        scen = sm.scenario
        spec = {"kind": "smooth", "source": str(args.input), "samples": args.samples,
                "seed": args.seed, "s": list(sm.collapse_times), "halvings": sm.halvings,
                "groups": [sm.groups[k] for k in range(len(scen))]}
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown generator {kind}")
    scen = _apply_overrides(scen, args)
    path = io.save_scenario(scen, _out_path(args, f"{kind}.json"))
    if spec is not None:
        io.write_json(io.spec_path_for(path), spec)
    print(f"wrote {path} ({len(scen)} particles)")
    return EXIT_OK


# ----------------------------------------------------------------------------
# run

def cmd_run(args) -> int:
    scen = _apply_overrides(io.load_scenario(args.scenario), args)
    traj, log = evolve(scen)
    out = Path(args.out) if args.out else default_results_dir() / Path(args.scenario).stem
    out.mkdir(parents=True, exist_ok=True)
    io.write_json(out / "events.json", io.run_to_json(scen, traj, log))
    step = to_scalar(args.sample_step, scen.backend) if args.sample_step else None
    io.write_csv(traj, out / "trajectory.csv", step)
    if args.svg:
        io.write_svg(traj, out / "trajectory.svg", log, title=Path(args.scenario).stem)
    print(f"{len(log)} events; wrote {out}")
    for e in eventlog_summary(log):
        print(f"  t={e['time']}: {e['clusters']}")
    return EXIT_OK


# ----------------------------------------------------------------------------
# verify

def _load_solution(args):
    """Trajectory from a run, trajectory or scenario file."""
    data = io.read_json(args.input)
    if isinstance(data, dict) and "segments" in data:
        return io.load_trajectory(args.input), None
    if isinstance(data, dict) and "trajectory" in data:
        _, log, traj = io.load_run(args.input)
        return traj, log
    scen = _apply_overrides(io.load_scenario(args.input), args)
    if args.free_flight:
        return free_flight(scen), None
    return evolve(scen)


def cmd_verify(args) -> int:
    kind = args.kind
    if kind in ("sticky", "weak", "energy"):
        if not args.input:
            raise UsageError(f"verify {kind} needs an input file")
        traj, _ = _load_solution(args)
        if args.tolerance is not None:
            tol = args.tolerance
        else:
            tol = 0 if traj.backend == RATIONAL else DEFAULT_FLOAT_TOLERANCE
        if kind == "sticky":
            viol = check_sticky(traj, tol)
            witness = {"violations": [{"pair": [v.i, v.j], "contact_time": v.contact_time,
                                       "separation_time": v.separation_time} for v in viol],
                       "phi": nonstickiness_phi(traj, tol=tol)}
            ok = not viol
        elif kind == "weak":
            rep = check_weak(traj, tol)
            witness = {"residual": rep.residual, "worst_index": rep.worst_index,
                       "worst_time": rep.worst_time}
            ok = rep.passed
        else:
            prof = energy_profile(traj)
            ok = is_energy_admissible(prof)
            witness = prof.to_json()
        _emit(f"{kind}: {'PASS' if ok else 'FAIL'}", witness)
        return EXIT_OK if ok else EXIT_FAIL
    if kind == "nip":
        if not args.input:
            raise UsageError("verify nip needs an example3 spec file")
        spec = Example3Spec.from_json(io.read_json(args.input))
        ok = nip_check(spec, args.horizon and to_scalar(args.horizon, RATIONAL))
        _emit(f"nip: {'PASS' if ok else 'FAIL'}", {"levels": spec.levels, "seed": spec.seed})
        return EXIT_OK if ok else EXIT_FAIL
    p = _params(args)
    if kind == "lemma1":
        ks = parse_range(args.k or "2..12")
        results = {k: lemma1_check(p, k) for k in ks}
        ok = all(results.values())
        _emit(f"lemma1: {'PASS' if ok else 'FAIL'} ({sum(results.values())}/{len(ks)})",
              {"params": [p.alpha, p.beta, p.gamma], "alpha_bound": p.alpha_bound,
               "failing_k": [k for k, v in results.items() if not v]})
        return EXIT_OK if ok else EXIT_FAIL
    if kind == "lemma2":
        p.require_valid()
        ks = parse_range(args.k or "2")
        ok, witness = True, []
        for k in ks:
            tau = select_tau(p, k)
            passed, total, bad = lemma2_exhaustive(p, k, tau, args.tail)
            ok &= passed == total
            witness.append({"k": k, "tau": tau, "passed": passed, "total": total,
                            "first_failing_subset": bad})
            print(f"k={k}: {passed}/{total} subsets pass")
        _emit(f"lemma2: {'PASS' if ok else 'FAIL'}", witness)
        return EXIT_OK if ok else EXIT_FAIL
    raise UsageError(f"unknown check {kind}")  # pragma: no cover


# ----------------------------------------------------------------------------
# experiment

# experiments fix their arithmetic; an explicit --backend must agree with it
_EXPERIMENT_BACKENDS = {"nonuniqueness": (RATIONAL,), "nonexistence": (RATIONAL,),
                        "jeps": (FLOAT,), "properties": (RATIONAL, FLOAT)}


def cmd_experiment(args) -> int:
    name = args.name
    if args.backend and args.backend not in _EXPERIMENT_BACKENDS[name]:
        raise UsageError(f"experiment {name} runs in {'/'.join(_EXPERIMENT_BACKENDS[name])} "
                         f"arithmetic, not {args.backend}")
    if name == "nonuniqueness":
        rep = run_example3_nonuniqueness(parse_range(args.levels or "3..6"), seed=args.seed,
                                         workers=args.workers)
    elif name == "nonexistence":
        rep = run_example4_nonexistence(_params(args).require_valid(),
                                        parse_range(args.levels or "3..8"),
                                        workers=args.workers)
        for c in rep.cases:
            if "hits" in c:
                print(f"  {c['name']}: {c['hits']}")
    elif name == "jeps":
        levels = parse_range(args.levels or "3")
        if len(levels) != 1:
            raise UsageError("jeps takes a single --levels value")
        rep = run_jeps_sweep(_params(args).require_valid(), levels[0],
                             parse_floats(args.eps or "10,1,0.1,0.01"),
                             horizon=parse_fraction(args.horizon or "3"),
                             workers=args.workers)
        print("  eps        N(eps)  J")
        for row in rep.cases[-1]["table"]:
            print(f"  {row['eps']:<10g} {row['N_eps']!s:<7} {row['J']:.6g}")
    elif name == "properties":
        rep = run_property_suite(seed=args.seed, count=args.count, workers=args.workers)
    else:  # pragma: no cover
        raise UsageError(f"unknown experiment {name}")
    path = rep.save(args.out)
    for c in rep.cases:
        if not c["passed"]:
            print(f"  FAIL {c['name']}")
    print(f"{rep.experiment}: {'PASS' if rep.passed else 'FAIL'} "
          f"({len(rep.cases) - len(rep.failures)}/{len(rep.cases)} cases); wrote {path}")
    return EXIT_OK if rep.passed else EXIT_FAIL


# ----------------------------------------------------------------------------
# parser

def _common() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--backend", choices=(RATIONAL, FLOAT))
    c.add_argument("--tolerance", type=float)
    c.add_argument("--horizon")
    c.add_argument("--event-cap", type=int, dest="event_cap")
    c.add_argument("--out")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--sample-step", dest="sample_step")
    c.add_argument("--svg", action="store_true")
    return c


def _tail_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", default="1/4")
    p.add_argument("--beta", default="1/2")
    p.add_argument("--gamma", default="3/4")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="stickysim",
                                     description="Sticky particle simulator and checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="write a scenario file")
    g.add_argument("kind", choices=("example2", "example3", "example4", "smooth", "resplit"))
    g.add_argument("--levels")
    g.add_argument("--eps", default="0")
    g.add_argument("--targeting", default=Targeting.TRUNCATED_TAIL.value,
                   choices=[t.value for t in Targeting])
    g.add_argument("--variant", default=Variant.VERTICAL.value,
                   choices=[v.value for v in Variant])
    g.add_argument("--input")
    g.add_argument("--s", default="1/8")
    g.add_argument("--samples", type=int, default=5)
    g.add_argument("--split-time", dest="split_time", default="2")
    _tail_args(g)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", parents=[common], help="evolve a scenario file")
    r.add_argument("scenario")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", parents=[common], help="run a checker")
    v.add_argument("kind", choices=("sticky", "weak", "energy", "nip", "lemma1", "lemma2"))
    v.add_argument("input", nargs="?")
    v.add_argument("--free-flight", action="store_true", dest="free_flight")
    v.add_argument("--k")
    v.add_argument("--tail", type=int, default=10)
    _tail_args(v)
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("experiment", parents=[common], help="run a reproduction")
    e.add_argument("name", choices=("nonuniqueness", "nonexistence", "jeps", "properties"))
    e.add_argument("--levels")
    e.add_argument("--eps")
    e.add_argument("--count", type=int, default=1000)
    e.add_argument("--workers", type=int, default=1)
    _tail_args(e)
    e.set_defaults(func=cmd_experiment)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _check_flags(args)
        return args.func(args)
    except EventCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, io.InputError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
