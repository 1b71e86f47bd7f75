"""Parameter sweeps and CSV output.

Sweep points are independent, so they can be farmed out to worker processes;
results always come back in grid order.
"""

from __future__ import annotations

import csv
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .atoms import PRESET_FOR_QUBITS, PhysicsParams, preset_geometry
from .dynamics import DEFAULT_CONFIG, IntegratorConfig, run_protocol_state
from .gates import gate_fidelity
from .hamiltonian import make_spec
from .pulses import DEFAULT_DELTA_FRAC, DEFAULT_SIGMA_FRAC, build_schedule


@dataclass(frozen=True)
class PulseKnobs:
    """Pulse-shape settings shared by every point of a sweep."""

    t_total: float = 0.6
    sigma_frac: float = DEFAULT_SIGMA_FRAC
    delta_frac: float = DEFAULT_DELTA_FRAC

    def schedule(self, p: PhysicsParams, t_total: float | None = None):
        t = self.t_total if t_total is None else t_total
        return build_schedule(p.omega0, p.omega_r, p.gamma_phase, t, self.sigma_frac, self.delta_frac)


@dataclass(frozen=True)
class SweepGrid:
    axes: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.axes or len(self.axes) != len(self.values):
            raise ValueError("need one value list per axis")
        vals = tuple(tuple(float(v) for v in vs) for vs in self.values)
        for name, vs in zip(self.axes, vals):
            if not vs:
                raise ValueError(f"axis {name!r} is empty")
            if not all(math.isfinite(v) for v in vs):
                raise ValueError(f"axis {name!r} has non-finite values")
        object.__setattr__(self, "values", vals)

    def points(self) -> list[tuple[float, ...]]:
        return list(itertools.product(*self.values))

    def __len__(self):
        return math.prod(len(v) for v in self.values)


@dataclass(frozen=True)
class SweepResult:
    axes: tuple[str, ...]
    observable: str
    rows: tuple[tuple[float, ...], ...]

    @property
    def header(self) -> tuple[str, ...]:
        return self.axes + (self.observable,)

    def column(self, name: str) -> np.ndarray:
        k = self.header.index(name)
        return np.array([r[k] for r in self.rows])

    def values(self) -> np.ndarray:
        return self.column(self.observable)

    def argmax(self) -> tuple[float, ...]:
        """Axis values of the best row."""
        k = int(np.argmax(self.values()))
        return self.rows[k][:-1]


def ordered_map(func, items, workers: int = 1) -> list:
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def _result(grid: SweepGrid, observable: str, values) -> SweepResult:
    rows = tuple(tuple(pt) + (float(v),) for pt, v in zip(grid.points(), values))
    return SweepResult(grid.axes, observable, rows)


# --------------------------------------------------------------------------
# point evaluators (module level so worker processes can import them)


def _amplitude_point(args) -> float:
    p, knobs, cfg, control = args
    spec = make_spec(p, knobs.schedule(p))
    i = spec.space.index(*([control] * p.n_controls), 0)
    psi = np.zeros(spec.space.dim, dtype=complex)
    psi[i] = 1.0
    return float(run_protocol_state(spec, psi, cfg)[i].real)


def _fidelity_point(args) -> float:
    p, knobs, t_total, cfg = args
    return gate_fidelity(
        p, t_total, sigma_frac=knobs.sigma_frac, delta_frac=knobs.delta_frac, cfg=cfg
    )


# --------------------------------------------------------------------------
# sweeps


def amplitude_vs_omega_c(
    ratios,
    base: PhysicsParams,
    knobs: PulseKnobs = PulseKnobs(),
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    workers: int = 1,
) -> SweepResult:
    """Re<0A|psi_final> against Omega_c/Omega_0 with the control in |0> (no decay)."""
    grid = SweepGrid(("omega_c_over_omega0",), (tuple(ratios),))
    p0 = base.without_decay()
    jobs = [(p0.replace(omega_c=r * p0.omega0), knobs, cfg, 0) for (r,) in grid.points()]
    return _result(grid, "re_amplitude", ordered_map(_amplitude_point, jobs, workers))


def amplitude_vs_V(
    v_over_omega0,
    base: PhysicsParams,
    knobs: PulseKnobs = PulseKnobs(),
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    workers: int = 1,
) -> SweepResult:
    """Re<1A|psi_final> against V/Omega_0 with the control in |1> (no decay)."""
    grid = SweepGrid(("v_over_omega0",), (tuple(v_over_omega0),))
    p0 = base.without_decay()
    jobs = [(p0.with_blockade(v * p0.omega0), knobs, cfg, 1) for (v,) in grid.points()]
    return _result(grid, "re_amplitude", ordered_map(_amplitude_point, jobs, workers))


def fidelity_vs_gate_time(
    times,
    base: PhysicsParams,
    knobs: PulseKnobs = PulseKnobs(),
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    workers: int = 1,
) -> SweepResult:
    grid = SweepGrid(("t_total_us",), (tuple(times),))
    jobs = [(base, knobs, t, cfg) for (t,) in grid.points()]
    return _result(grid, "fidelity", ordered_map(_fidelity_point, jobs, workers))


def rabi_error_sweep(
    xis,
    zetas,
    base: PhysicsParams,
    knobs: PulseKnobs = PulseKnobs(),
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    workers: int = 1,
) -> SweepResult:
    """Fidelity surface over control (xi) and target (zeta) Rabi errors."""
    grid = SweepGrid(("xi", "zeta"), (tuple(xis), tuple(zetas)))
    jobs = [(base.replace(xi=x, zeta=z), knobs, knobs.t_total, cfg) for x, z in grid.points()]
    return _result(grid, "fidelity", ordered_map(_fidelity_point, jobs, workers))


def blockade_sweep(
    v_over_omega0,
    omega_c_ratios,
    base: PhysicsParams,
    knobs: PulseKnobs = PulseKnobs(),
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    workers: int = 1,
) -> SweepResult:
    """Fidelity against V for each Omega_c; rows are grouped by Omega_c."""
    grid = SweepGrid(("omega_c_over_omega0", "v_over_omega0"), (tuple(omega_c_ratios), tuple(v_over_omega0)))
    jobs = [
        (base.replace(omega_c=r * base.omega0).with_blockade(v * base.omega0), knobs, knobs.t_total, cfg)
        for r, v in grid.points()
    ]
    return _result(grid, "fidelity", ordered_map(_fidelity_point, jobs, workers))


def blockade_argmax(result: SweepResult) -> dict[float, float]:
    """Best V/Omega_0 for each Omega_c/Omega_0 in a blockade sweep."""
    rc = result.column("omega_c_over_omega0")
    v = result.column("v_over_omega0")
    f = result.values()
    return {float(r): float(v[rc == r][np.argmax(f[rc == r])]) for r in dict.fromkeys(rc)}


def position_sweep(
    spacings,
    base: PhysicsParams,
    knobs: PulseKnobs = PulseKnobs(),
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    principal_n: int = 126,
    include_cc: bool = False,
    workers: int = 1,
) -> SweepResult:
    """Fidelity against the control-target spacing l (um) of the preset layout."""
    grid = SweepGrid(("l_um",), (tuple(spacings),))
    kind = PRESET_FOR_QUBITS[base.n_qubits]
    jobs = []
    for (l,) in grid.points():
        g = preset_geometry(kind, l, principal_n, include_cc)
        jobs.append((base.replace(v_ct=g.v_ct(), v_cc=g.v_cc()), knobs, knobs.t_total, cfg))
    return _result(grid, "fidelity", ordered_map(_fidelity_point, jobs, workers))


# --------------------------------------------------------------------------
# CSV


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(result: SweepResult, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(result.header)
        for row in result.rows:
            w.writerow([_fmt(x) for x in row])
    return path


def read_csv(path) -> SweepResult:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header = tuple(rows[0])
    data = tuple(tuple(float(x) for x in r) for r in rows[1:])
    return SweepResult(header[:-1], header[-1], data)
