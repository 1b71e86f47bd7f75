"""Density-matrix Grover search built from the multi-qubit phase gate.

The native gate G = diag(1, e^{i gamma}, ..., e^{i gamma}) equals
2|0..0><0..0| - 1 at gamma = pi. Conjugating by X on every qubit gives
2|1..1><1..1| - 1 = -C^nZ, so the oracle for |1..1> is X G X, and the
diffusion H X (C^nZ) X H collapses to H G H. Both use the same (possibly
noisy) channel; H and X are ideal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .analysis import PulseKnobs, SweepGrid, SweepResult, ordered_map
from .atoms import PhysicsParams
from .dynamics import DEFAULT_CONFIG, IntegratorConfig
from .gates import GateChannel, extract_channel, ideal_gate
from .hamiltonian import make_spec

_H1 = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X1 = np.array([[0, 1], [1, 0]], dtype=complex)
_Z1 = np.diag([1, -1]).astype(complex)


def _all(op, n):
    return reduce(np.kron, [op] * n)


def optimal_iterations(n: int) -> int:
    """round(pi / (4 theta) - 1/2) with theta = asin(2^(-n/2))."""
    if n < 2:
        raise ValueError("need at least two qubits")
    theta = math.asin(2 ** (-n / 2))
    return int(round(math.pi / (4 * theta) - 0.5))


@dataclass(frozen=True)
class GroverConfig:
    """``channel=None`` selects the ideal gate with phase ``gamma``."""

    n_qubits: int
    iterations: int
    channel: GateChannel | None = None
    gamma: float = math.pi

    def __post_init__(self):
        if self.n_qubits < 2:
            raise ValueError("need at least two qubits")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")
        if self.channel is not None and self.channel.d != 2**self.n_qubits:
            raise ValueError(f"channel acts on d={self.channel.d}, expected {2**self.n_qubits}")

    def gate(self) -> GateChannel:
        if self.channel is not None:
            return self.channel
        return GateChannel.from_unitary(ideal_gate(self.n_qubits, self.gamma).unitary)


def _conj(u, rho):
    return u @ rho @ u.conj().T


def grover_state(cfg: GroverConfig, compensation: str = "x") -> np.ndarray:
    """Final density matrix.

    ``compensation='z'`` (two qubits only) builds CZ as (Z kron Z) G instead
    and uses the textbook oracle/diffusion; both routes agree for the ideal
    gate.
    """
    n = cfg.n_qubits
    d = 2**n
    g = cfg.gate()
    hn, xn = _all(_H1, n), _all(_X1, n)
    rho = np.zeros((d, d), dtype=complex)
    rho[0, 0] = 1.0
    rho = _conj(hn, rho)
    if compensation == "x":
        for _ in range(cfg.iterations):
            rho = _conj(xn, g.apply(_conj(xn, rho)))
            rho = _conj(hn, g.apply(_conj(hn, rho)))
    elif compensation == "z":
        if n != 2:
            raise ValueError("the Z compensation only holds for two qubits")
        zz = _all(_Z1, 2)

        def cz(r):
            return _conj(zz, g.apply(r))

        for _ in range(cfg.iterations):
            rho = cz(rho)
            rho = _conj(hn @ xn, cz(_conj(xn @ hn, rho)))
    else:
        raise ValueError(f"unknown compensation {compensation!r}")
    return rho


def run_grover(cfg: GroverConfig, compensation: str = "x") -> float:
    """Probability of finding |1...1>."""
    rho = grover_state(cfg, compensation)
    return float(rho[-1, -1].real)


def _grover_point(args) -> float:
    p, knobs, t, cfg, iterations = args
    spec = make_spec(p, knobs.schedule(p, t))
    ch = extract_channel(spec, cfg)
    return run_grover(GroverConfig(p.n_qubits, iterations, ch))


def grover_vs_gate_time(
    times,
    base: PhysicsParams,
    knobs: PulseKnobs = PulseKnobs(),
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    iterations: int | None = None,
    workers: int = 1,
) -> SweepResult:
    it = optimal_iterations(base.n_qubits) if iterations is None else iterations
    grid = SweepGrid(("t_total_us",), (tuple(times),))
    jobs = [(base, knobs, t, cfg, it) for (t,) in grid.points()]
    vals = ordered_map(_grover_point, jobs, workers)
    rows = tuple(pt + (float(v),) for pt, v in zip(grid.points(), vals))
    return SweepResult(grid.axes, "success_probability", rows)
