"""Parameter sweeps over one or two axes with deterministic CSV output."""
from __future__ import annotations

import io
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .correlations import VACUUM_FLOOR, equal_time_observables, photon_distribution
from .errors import NumericalFailure
from .hilbert import SpaceConfig
from .lindblad import DEFAULT_CUTOFFS, convergence_scan, model_liouvillian, steady_state
from .model import SystemParams, wrap_phase

AXIS_NAMES = ("delta_a", "chi", "phi", "omega", "gamma_e")
BASE_COLUMNS = ("delta_a", "chi", "phi", "delta", "omega", "n_s", "g2_0", "g3_0", "g4_0", "status")
_EXTRA = re.compile(r"^(residual|gamma_e|p\d+|pt\d+)$")


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"invalid axis {self.name!r}; choose from {AXIS_NAMES}")
        if self.points < 2:
            raise ValueError("an axis needs at least 2 points")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("axis range must be finite")

    def value(self, i: int) -> float:
        if i == self.points - 1:
            return float(self.stop)
        return self.start + i * (self.stop - self.start) / (self.points - 1)

    def values(self) -> list[float]:
        return [self.value(i) for i in range(self.points)]


@dataclass
class SweepSpec:
    axis1: Axis
    params: SystemParams = field(default_factory=SystemParams)
    axis2: Axis | None = None
    observables: tuple[str, ...] = ()
    output: str | Path | None = None
    workers: int = 1
    cutoff: int | None = None
    cutoffs: tuple[int, ...] = DEFAULT_CUTOFFS

    def __post_init__(self):
        for name in self.observables:
            if not _EXTRA.match(name):
                raise ValueError(f"unknown extra observable {name!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def grid(self) -> list[dict]:
        """Parameter overrides for every point, row-major (axis1 slowest)."""
        points = []
        for v1 in self.axis1.values():
            if self.axis2 is None:
                points.append({self.axis1.name: v1})
            else:
                for v2 in self.axis2.values():
                    points.append({self.axis1.name: v1, self.axis2.name: v2})
        return points

    def columns(self) -> tuple[str, ...]:
        return BASE_COLUMNS + tuple(self.observables)


def _point_params(base: SystemParams, overrides: dict) -> SystemParams:
    changes = dict(overrides)
    if "phi" in changes:
        changes["phi"] = wrap_phase(changes["phi"])
    return base.with_(**changes)


def demanding_corner(spec: SweepSpec) -> SystemParams:
    """Largest drive and smallest |delta_a| reachable on the grid."""
    changes = {}
    for ax in (spec.axis1, spec.axis2):
        if ax is None:
            continue
        vals = ax.values()
        if ax.name == "omega":
            changes["omega"] = max(vals, key=abs)
        elif ax.name == "delta_a":
            changes["delta_a"] = min(vals, key=abs)
    return _point_params(spec.params, changes)


def evaluate_point(params: SystemParams, cutoff: int, observables=()) -> dict:
    """One CSV row; failures are confined to the row's status column."""
    space = SpaceConfig(cutoff)
    row = {
        "delta_a": params.delta_a,
        "chi": params.chi,
        "phi": params.phi,
        "delta": params.effective_delta,
        "omega": params.omega,
        "gamma_e": params.gamma_e,
    }
    nan = float("nan")
    try:
        ss = steady_state(model_liouvillian(params, space))
    except NumericalFailure:
        row.update({k: nan for k in ("n_s", "g2_0", "g3_0", "g4_0", "residual")}, status="numerical_failure")
        for name in observables:
            row.setdefault(name, nan)
        return row
    obs = equal_time_observables(ss.rho, space, strict=False)
    row.update(obs, residual=ss.residual)
    row["status"] = "ok" if obs["n_s"] > VACUUM_FLOOR else "undefined_correlation"
    if any(name.startswith("p") for name in observables):
        p, p_tilde = photon_distribution(ss.rho, space)
        for name in observables:
            if name.startswith("pt"):
                q = int(name[2:])
                row[name] = p_tilde[q - 1] if p_tilde is not None and 1 <= q <= len(p_tilde) else nan
            elif name.startswith("p"):
                q = int(name[1:])
                row[name] = p[q] if q < len(p) else 0.0
    return row


def _evaluate(args):
    params, cutoff, observables = args
    return evaluate_point(params, cutoff, observables)


def resolve_cutoff(spec: SweepSpec) -> int:
    if spec.cutoff is not None:
        return spec.cutoff
    return convergence_scan(demanding_corner(spec), spec.cutoffs).chosen


def run_sweep(spec: SweepSpec) -> list[dict]:
    """Evaluate every grid point; rows come back in grid order."""
    cutoff = resolve_cutoff(spec)
    tasks = [(_point_params(spec.params, pt), cutoff, tuple(spec.observables)) for pt in spec.grid()]
    if spec.workers == 1:
        rows = [_evaluate(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            rows = list(pool.map(_evaluate, tasks, chunksize=max(1, len(tasks) // (4 * spec.workers))))
    if spec.output is not None:
        write_csv(rows, spec.columns(), spec.output)
    return rows


def format_value(value) -> str:
    if isinstance(value, str):
        return value
    value = float(value)
    if math.isnan(value):
        return "nan"
    return f"{value:.17g}"


def to_csv(rows, columns) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(format_value(row[c]) for c in columns) + "\n")
    return buf.getvalue()


def write_csv(rows, columns, path) -> None:
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(to_csv(rows, columns))
    except OSError as exc:
        raise OSError(f"cannot write sweep output {path}: {exc}") from exc


def read_csv(path) -> list[dict]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        fields = line.split(",")
        rows.append({k: (v if k == "status" else float(v)) for k, v in zip(header, fields)})
    return rows


def minima(values) -> list[int]:
    """Indices of strict interior local minima."""
    v = np.asarray(values, dtype=float)
    return [i for i in range(1, len(v) - 1) if v[i] < v[i - 1] and v[i] < v[i + 1]]
