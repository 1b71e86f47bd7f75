"""Hamiltonian assembly for the control atoms and the six-level target."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .atoms import (
    N_CONTROL_LEVELS,
    N_TARGET_LEVELS,
    CompositeSpace,
    ControlLevel as CL,
    PhysicsParams,
    TargetLevel as TL,
    embed_single_atom_op,
)
from .pulses import PulseSchedule, dstirap_pump, dstirap_stokes, soft_pi_amplitude

MANIFOLDS = ("A", "B")


@dataclass(frozen=True)
class HamiltonianSpec:
    space: CompositeSpace
    physics: PhysicsParams
    schedule: PulseSchedule
    manifold_isolation: bool = True

    def __post_init__(self):
        if self.physics.n_controls != self.space.n_controls:
            raise ValueError(
                f"physics has {self.physics.n_controls} controls, space has {self.space.n_controls}"
            )

    @property
    def total_time(self) -> float:
        return self.schedule.total_time


def make_spec(physics: PhysicsParams, schedule: PulseSchedule, manifold_isolation: bool = True) -> HamiltonianSpec:
    return HamiltonianSpec(CompositeSpace(physics.n_controls), physics, schedule, manifold_isolation)


def _check_manifold(manifold):
    if manifold not in (None, "A", "B"):
        raise ValueError(f"manifold must be 'A', 'B' or None, got {manifold!r}")


# --------------------------------------------------------------------------
# single-atom blocks


def control_drive_op(rabi: float) -> np.ndarray:
    """(rabi/2)(|1><r| + |r><1|) on one control atom."""
    h = np.zeros((N_CONTROL_LEVELS, N_CONTROL_LEVELS), dtype=complex)
    h[CL.q1, CL.ryd] = h[CL.ryd, CL.q1] = 0.5 * rabi
    return h


def control_rabi(t: float, spec: HamiltonianSpec, pulse_sign: int) -> float:
    """Error-scaled pi-pulse Rabi frequency at local pulse time ``t``."""
    p = spec.physics
    return (1 + p.xi) * soft_pi_amplitude(t, p.omega_r, spec.schedule.t_pi, pulse_sign)


def target_drive_op(t: float, spec: HamiltonianSpec, manifold: str | None = None) -> np.ndarray:
    """Laser couplings of the target at d-STIRAP time ``t``, scaled by (1 + zeta).

    ``manifold`` selects which Stokes beam acts: 'A' keeps C-e1, 'B' keeps
    C-e2, ``None`` keeps both. Pumps and the e1-R coupling are always on.
    """
    _check_manifold(manifold)
    p = spec.physics
    s = spec.schedule
    if not 0.0 <= t <= s.t_d:
        return np.zeros((N_TARGET_LEVELS, N_TARGET_LEVELS), dtype=complex)
    pump = dstirap_pump(t, s, p.omega0)
    stokes = dstirap_stokes(t, s, p.omega0)
    h = np.zeros((N_TARGET_LEVELS, N_TARGET_LEVELS), dtype=complex)
    h[TL.A, TL.e1] = 0.5 * pump
    h[TL.B, TL.e2] = 0.5 * pump
    if manifold in (None, "A"):
        h[TL.C, TL.e1] = 0.5 * stokes
    if manifold in (None, "B"):
        h[TL.C, TL.e2] = 0.5 * stokes
    h[TL.e1, TL.R] = 0.5 * p.omega_c
    h = h + h.conj().T
    return (1 + p.zeta) * h


def target_detuning_op(spec: HamiltonianSpec) -> np.ndarray:
    d = np.zeros(N_TARGET_LEVELS, dtype=complex)
    d[TL.e1] = d[TL.e2] = -spec.physics.delta
    return np.diag(d)


def target_block(t: float, spec: HamiltonianSpec, manifold: str | None = None, shift: float = 0.0) -> np.ndarray:
    """6x6 target Hamiltonian during step 2 with blockade shift ``shift`` on |R>."""
    h = target_drive_op(t, spec, manifold) + target_detuning_op(spec)
    h[TL.R, TL.R] += shift
    return h


# --------------------------------------------------------------------------
# full-space operators


def control_hamiltonian(t: float, spec: HamiltonianSpec, pulse_sign: int = 1) -> np.ndarray:
    """Simultaneous soft pi pulses on every control; ``t`` is local pulse time."""
    op = control_drive_op(control_rabi(t, spec, pulse_sign))
    space = spec.space
    return sum(embed_single_atom_op(space, i, op) for i in range(space.n_controls))


def target_hamiltonian(t: float, spec: HamiltonianSpec, manifold: str | None = None) -> np.ndarray:
    """Embedded target Hamiltonian at d-STIRAP time ``t``."""
    if spec.manifold_isolation and manifold is None:
        raise ValueError("manifold isolation is on: pass manifold='A' or 'B'")
    h = target_drive_op(t, spec, manifold) + target_detuning_op(spec)
    return embed_single_atom_op(spec.space, spec.space.target_index, h)


def interaction_diagonal(spec: HamiltonianSpec) -> np.ndarray:
    """Diagonal of the Rydberg interaction operator over the full space."""
    space = spec.space
    p = spec.physics
    levels = np.indices(space.dims).reshape(space.n_atoms, -1)
    in_r = levels[: space.n_controls] == CL.ryd
    in_R = levels[space.target_index] == TL.R
    diag = np.zeros(space.dim)
    for i, v in enumerate(p.v_ct):
        diag += v * (in_r[i] & in_R)
    for i, j in itertools.combinations(range(space.n_controls), 2):
        diag += p.v_cc[i][j] * (in_r[i] & in_r[j])
    return diag


def interaction_hamiltonian(spec: HamiltonianSpec) -> np.ndarray:
    return np.diag(interaction_diagonal(spec)).astype(complex)


def protocol_step(t: float, spec: HamiltonianSpec) -> int:
    """1, 2 or 3 for the pi pulse, d-STIRAP and closing pi pulse."""
    s = spec.schedule
    if t < 0 or t > s.total_time * (1 + 1e-12):
        raise ValueError(f"t={t} outside [0, {s.total_time}]")
    if t < s.t_pi:
        return 1
    if t <= s.t_pi + s.t_d:
        return 2
    return 3


def full_hamiltonian(t: float, spec: HamiltonianSpec, manifold: str | None = None) -> np.ndarray:
    """Hamiltonian at absolute protocol time ``t``."""
    step = protocol_step(t, spec)
    s = spec.schedule
    h = interaction_hamiltonian(spec)
    if step == 1:
        return h + control_hamiltonian(t, spec, +1)
    if step == 2:
        return h + target_hamiltonian(t - s.t_pi, spec, manifold)
    return h + control_hamiltonian(t - s.t_pi - s.t_d, spec, -1)
