"""Ideal gates, channel extraction on the computational subspace and average fidelity.

Superoperators use column stacking: ``vec(X) = X.flatten(order="F")``.
The realised channel is the full evolution projected onto the computational
subspace. Population that leaks out is simply lost, so the projected map is
trace-decreasing and leakage shows up as infidelity.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .atoms import PhysicsParams
from .dynamics import DEFAULT_CONFIG, IntegratorConfig, no_decay, run_protocol_density
from .hamiltonian import HamiltonianSpec, make_spec
from .pulses import DEFAULT_DELTA_FRAC, DEFAULT_SIGMA_FRAC, build_schedule

PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def vec(x: np.ndarray) -> np.ndarray:
    return np.asarray(x).flatten(order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape((d, d), order="F")


@dataclass(frozen=True)
class IdealGate:
    d: int
    unitary: np.ndarray

    def __post_init__(self):
        u = self.unitary
        if u.shape != (self.d, self.d):
            raise ValueError("unitary shape does not match d")
        if not np.allclose(u @ u.conj().T, np.eye(self.d), atol=1e-12):
            raise ValueError("gate matrix is not unitary")


@dataclass(frozen=True)
class GateChannel:
    d: int
    superop: np.ndarray

    def __post_init__(self):
        if self.superop.shape != (self.d**2, self.d**2):
            raise ValueError("superoperator shape does not match d")

    def apply(self, x: np.ndarray) -> np.ndarray:
        return unvec(self.superop @ vec(x), self.d)

    @classmethod
    def from_unitary(cls, u: np.ndarray) -> "GateChannel":
        # vec(U X U^dag) = (conj(U) kron U) vec(X) for column stacking
        u = np.asarray(u, dtype=complex)
        return cls(u.shape[0], np.kron(u.conj(), u))

    @classmethod
    def identity(cls, d: int) -> "GateChannel":
        return cls(d, np.eye(d * d, dtype=complex))


def ideal_gate(n_qubits: int, gamma: float = np.pi) -> IdealGate:
    """diag(1, e^{i gamma}, ..., e^{i gamma}) with |0...0, A> first."""
    if n_qubits < 2:
        raise ValueError("need at least two qubits")
    d = 2**n_qubits
    diag = np.full(d, np.exp(1j * gamma))
    diag[0] = 1.0
    return IdealGate(d, np.diag(diag))


def pauli_basis(n_qubits: int) -> list[np.ndarray]:
    return [reduce(np.kron, ps) for ps in itertools.product(PAULIS, repeat=n_qubits)]


def average_fidelity(channel: GateChannel, ideal: IdealGate) -> float:
    """Average gate fidelity from the Pauli-operator sum.

    F = [sum_j Tr(U P_j^dag U^dag E(P_j)) + d^2] / [d^2 (d + 1)].
    """
    d = channel.d
    if ideal.d != d:
        raise ValueError(f"channel acts on d={d}, gate on d={ideal.d}")
    n = int(round(np.log2(d)))
    if 2**n != d:
        raise ValueError("dimension is not a power of two")
    u = ideal.unitary
    total = 0.0
    for p in pauli_basis(n):
        total += np.trace(u @ p.conj().T @ u.conj().T @ channel.apply(p))
    return float(np.real(total + d * d) / (d * d * (d + 1)))


def unitary_fidelity(u_ideal: np.ndarray, u_actual: np.ndarray) -> float:
    """(d + |Tr(O^dag U)|^2) / (d^2 + d) for a unitary channel U."""
    d = u_ideal.shape[0]
    return float((d + abs(np.trace(u_ideal.conj().T @ u_actual)) ** 2) / (d * d + d))


def _propagate_chunk(args):
    spec, cfg, inputs, decay = args
    return run_protocol_density(spec, inputs, cfg, channels=None if decay else no_decay())


def extract_channel(
    spec: HamiltonianSpec,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    *,
    decay: bool = True,
    workers: int = 1,
) -> GateChannel:
    """Realised channel on the computational subspace, one matrix unit per column."""
    space = spec.space
    d = space.d
    comp = space.computational_indices
    units = np.zeros((d * d, space.dim, space.dim), dtype=complex)
    for n in range(d):
        for m in range(d):
            units[n * d + m, comp[m], comp[n]] = 1.0
    if workers > 1:
        chunks = np.array_split(np.arange(d * d), workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_propagate_chunk, [(spec, cfg, units[c], decay) for c in chunks]))
        outs = np.concatenate(parts)
    else:
        outs = _propagate_chunk((spec, cfg, units, decay))
    proj = outs[:, comp][:, :, comp]
    superop = np.stack([vec(p) for p in proj], axis=1)
    return GateChannel(d, superop)


def gate_fidelity(
    params: PhysicsParams,
    t_total: float,
    *,
    sigma_frac: float = DEFAULT_SIGMA_FRAC,
    delta_frac: float = DEFAULT_DELTA_FRAC,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    decay: bool = True,
    manifold_isolation: bool = True,
    workers: int = 1,
) -> float:
    """Average fidelity of the realised gate against diag(1, e^{i gamma}, ...)."""
    sched = build_schedule(params.omega0, params.omega_r, params.gamma_phase, t_total, sigma_frac, delta_frac)
    spec = make_spec(params, sched, manifold_isolation)
    ch = extract_channel(spec, cfg, decay=decay, workers=workers)
    return average_fidelity(ch, ideal_gate(params.n_qubits, params.gamma_phase))
