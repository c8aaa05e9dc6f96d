"""File formats: scenario and run JSON, sampled CSV, and small SVG plots."""

from __future__ import annotations

import csv
import json
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, Tuple, Union
from xml.sax.saxutils import escape

from .core import Scenario, jsonable, to_scalar
from .engine import (
    CollisionEvent, Trajectory, eventlog_from_json, eventlog_to_json,
)

PathLike = Union[str, os.PathLike]


class InputError(ValueError):
    """A file could not be parsed into the expected object."""


def write_json(path: PathLike, data: Any) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(jsonable(data), indent=2, sort_keys=True) + "\n")
    return path


def read_json(path: PathLike) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def load_scenario(path: PathLike) -> Scenario:
    data = read_json(path)
    if isinstance(data, dict) and "scenario" in data and "particles" not in data:
        data = data["scenario"]
    try:
        return Scenario.from_json(data)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{path}: not a valid scenario ({exc})") from exc


def save_scenario(scenario: Scenario, path: PathLike) -> Path:
    return write_json(path, scenario.to_json())


def spec_path_for(path: PathLike) -> Path:
    """``foo.json`` -> ``foo.spec.json``."""
    path = Path(path)
    stem = path.name[:-5] if path.name.endswith(".json") else path.name
    return path.with_name(stem + ".spec.json")


def load_trajectory(path: PathLike) -> Trajectory:
    data = read_json(path)
    if isinstance(data, dict) and "trajectory" in data:
        data = data["trajectory"]
    try:
        return Trajectory.from_json(data)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{path}: not a valid trajectory ({exc})") from exc


def save_trajectory(traj: Trajectory, path: PathLike) -> Path:
    return write_json(path, traj.to_json())


# ----------------------------------------------------------------------------
# run bundles

def run_to_json(scenario: Scenario, traj: Trajectory,
                log: Sequence[CollisionEvent]) -> dict:
    return {"scenario": scenario.to_json(), "events": eventlog_to_json(log),
            "trajectory": traj.to_json()}


def load_run(path: PathLike) -> Tuple[Scenario, Tuple[CollisionEvent, ...], Trajectory]:
    data = read_json(path)
    try:
        scen = Scenario.from_json(data["scenario"])
        log = eventlog_from_json(data["events"], scen.backend)
        traj = Trajectory.from_json(data["trajectory"])
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{path}: not a valid run file ({exc})") from exc
    return scen, log, traj


def sample_times(horizon, step) -> list:
    if step <= 0:
        raise ValueError("sample step must be positive")
    times, t = [], 0 * horizon
    while t < horizon:
        times.append(t)
        t = t + step
    times.append(horizon)
    return times


def write_csv(traj: Trajectory, path: PathLike, step=None) -> Path:
    """Rows ``t, index, x_1..x_n`` at multiples of ``step`` (default horizon/100)."""
    if step is None:
        step = traj.horizon / 100 if traj.horizon else 1
    step = to_scalar(step, traj.backend)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "index"] + [f"x_{d + 1}" for d in range(traj.dimension)])
        for t in sample_times(traj.horizon, step):
            for i in range(len(traj)):
                w.writerow([_num(t), i] + [_num(c) for c in traj.position(i, t)])
    return path


def _num(x) -> str:
    return repr(float(x)) if isinstance(x, (Fraction, int)) else repr(x)


# ----------------------------------------------------------------------------
# SVG

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
            "#e377c2", "#17becf", "#7f7f7f", "#bcbd22")


def _polylines(traj: Trajectory, one_d: bool) -> List[List[Tuple[float, float]]]:
    out = []
    for segs in traj.segments:
        pts = []
        for s in segs:
            a, b = s.position_start, s.position_end
            if one_d:
                pts += [(float(s.t_start), float(a[0])), (float(s.t_end), float(b[0]))]
            else:
                pts += [(float(a[0]), float(a[1])), (float(b[0]), float(b[1]))]
        out.append(pts)
    return out


def trajectory_svg(traj: Trajectory, log: Sequence[CollisionEvent] = (),
                   title: str = "", size: int = 480, colors: Optional[Sequence[str]] = None
                   ) -> str:
    """Paths in the ``x_1``-``x_2`` plane, or ``t``-``x`` for one dimension.

    Higher dimensions are projected on the first two coordinates.  Collision
    points are drawn as open circles.
    """
    one_d = traj.dimension == 1
    lines = _polylines(traj, one_d)
    marks = []
    for e in log:
        for c in e.clusters:
            p = c.position
            marks.append((float(e.time), float(p[0])) if one_d else (float(p[0]), float(p[1])))
    xs = [p[0] for pts in lines for p in pts] + [m[0] for m in marks]
    ys = [p[1] for pts in lines for p in pts] + [m[1] for m in marks]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, 1e-12)
    pad = 40
    scale = (size - 2 * pad) / span

    def px(p):
        return (pad + (p[0] - x0) * scale, size - pad - (p[1] - y0) * scale)

    colors = list(colors or _PALETTE)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f'<rect width="{size}" height="{size}" fill="white"/>']
    if title:
        out.append(f'<text x="{pad}" y="20" font-family="sans-serif" font-size="13">'
                   f'{escape(title)}</text>')
    ax0, ay0 = px((x0, y0))
    out.append(f'<line x1="{ax0:.2f}" y1="{ay0:.2f}" x2="{size - pad}" y2="{ay0:.2f}" '
               'stroke="#999" stroke-width="0.8"/>')
    out.append(f'<line x1="{ax0:.2f}" y1="{ay0:.2f}" x2="{ax0:.2f}" y2="{pad}" '
               'stroke="#999" stroke-width="0.8"/>')
    xl, yl = ("t", "x") if one_d else ("x1", "x2")
    out.append(f'<text x="{size - pad + 4}" y="{ay0 + 4:.2f}" font-family="sans-serif" '
               f'font-size="11">{xl}</text>')
    out.append(f'<text x="{ax0 - 4:.2f}" y="{pad - 6}" font-family="sans-serif" '
               f'font-size="11">{yl}</text>')
    for i, pts in enumerate(lines):
        coords = " ".join(f"{a:.2f},{b:.2f}" for a, b in map(px, pts))
        out.append(f'<polyline points="{coords}" fill="none" '
                   f'stroke="{colors[i % len(colors)]}" stroke-width="1.4"/>')
        sx, sy = px(pts[0])
        out.append(f'<circle cx="{sx:.2f}" cy="{sy:.2f}" r="2.5" '
                   f'fill="{colors[i % len(colors)]}"/>')
    for m in marks:
        mx, my = px(m)
        out.append(f'<circle cx="{mx:.2f}" cy="{my:.2f}" r="4" fill="none" stroke="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(traj: Trajectory, path: PathLike, log: Sequence[CollisionEvent] = (),
              title: str = "", colors: Optional[Iterable[str]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(trajectory_svg(traj, log, title, colors=list(colors) if colors else None))
    return path
