"""Time evolution of kets and density operators.

Two routes are available:

* ``propagate_state`` / ``propagate_lindblad`` integrate arbitrary
  time-dependent problems on the full space with an adaptive Dormand-Prince
  5(4) Runge-Kutta pair. They are general and serve as the reference.
* The gate protocol itself is propagated by default with the block-structured
  exponential integrator in :mod:`dstirap._structured`, which handles the
  large blockade shift exactly and is orders of magnitude faster for three
  and four qubits. ``IntegratorConfig(method="rk45")`` switches the protocol
  runners to the reference route.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp

from .atoms import (
    N_CONTROL_LEVELS,
    N_TARGET_LEVELS,
    ControlLevel as CL,
    PhysicsParams,
    TargetLevel as TL,
    embed_single_atom_op,
    outer,
)
from .hamiltonian import HamiltonianSpec, full_hamiltonian


class IntegrationError(RuntimeError):
    """The integrator failed to reach the requested end time."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Integrator settings.

    ``rel_tol``/``abs_tol``/``max_step`` drive the adaptive Runge-Kutta route;
    ``magnus_step`` (us) bounds the step of the exponential route.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    max_step: float = np.inf
    method: str = "magnus"
    magnus_step: float = 5e-4

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.max_step <= 0 or self.magnus_step <= 0:
            raise ValueError("tolerances and step bounds must be positive")
        if self.method not in ("magnus", "rk45"):
            raise ValueError(f"unknown integrator method {self.method!r}")

    def halved(self) -> "IntegratorConfig":
        """Same method with every tolerance and step bound halved."""
        return replace(
            self,
            rel_tol=self.rel_tol / 2,
            abs_tol=self.abs_tol / 2,
            max_step=self.max_step / 2,
            magnus_step=self.magnus_step / 2,
        )


DEFAULT_CONFIG = IntegratorConfig()


# --------------------------------------------------------------------------
# decay channels


def control_jump_ops(p: PhysicsParams) -> list[tuple[np.ndarray, str]]:
    """Rydberg decay |r> -> |0>, |1> of one control, each at gamma_r/2."""
    a = np.sqrt(p.gamma_r / 2)
    return [
        (a * outer(N_CONTROL_LEVELS, CL.q0, CL.ryd), "r->0"),
        (a * outer(N_CONTROL_LEVELS, CL.q1, CL.ryd), "r->1"),
    ]


def target_jump_ops(p: PhysicsParams) -> list[tuple[np.ndarray, str]]:
    n = N_TARGET_LEVELS
    ops = [(np.sqrt(p.gamma_R) * outer(n, TL.e1, TL.R), "R->e1")]
    b = np.sqrt(p.gamma_e1 / 2)
    ops += [(b * outer(n, j, TL.e1), f"e1->{TL(j).name}") for j in (TL.A, TL.B, TL.C)]
    b2 = np.sqrt(p.gamma_e2 / 2)
    ops += [(b2 * outer(n, k, TL.e2), f"e2->{TL(k).name}") for k in (TL.B, TL.C)]
    return ops


@dataclass(frozen=True)
class DecayChannelSet:
    """Rate-scaled jump operators on the full space."""

    operators: tuple[np.ndarray, ...]
    labels: tuple[str, ...]

    def __len__(self):
        return len(self.operators)


def decay_channels(spec: HamiltonianSpec) -> DecayChannelSet:
    space = spec.space
    ops, labels = [], []
    for i in range(space.n_controls):
        for op, lab in control_jump_ops(spec.physics):
            ops.append(embed_single_atom_op(space, i, op))
            labels.append(f"control{i}:{lab}")
    for op, lab in target_jump_ops(spec.physics):
        ops.append(embed_single_atom_op(space, space.target_index, op))
        labels.append(f"target:{lab}")
    keep = [k for k, op in enumerate(ops) if np.any(op != 0)]
    return DecayChannelSet(tuple(ops[k] for k in keep), tuple(labels[k] for k in keep))


def no_decay() -> DecayChannelSet:
    return DecayChannelSet((), ())


# --------------------------------------------------------------------------
# generic adaptive Runge-Kutta propagation


def _as_hamiltonian_callable(hamiltonian, manifold):
    if isinstance(hamiltonian, HamiltonianSpec):
        spec = hamiltonian
        return lambda t: full_hamiltonian(t, spec, manifold)
    if callable(hamiltonian):
        return hamiltonian
    h = np.asarray(hamiltonian, dtype=complex)
    return lambda t: h


def _solve(rhs, y0: np.ndarray, t0: float, t1: float, cfg: IntegratorConfig) -> np.ndarray:
    if t1 == t0:
        return y0.copy()

    def checked(t, y):
        dy = rhs(t, y)
        if not np.all(np.isfinite(dy)):
            raise IntegrationError(f"non-finite derivative at t={t}")
        return dy

    sol = solve_ivp(
        checked,
        (t0, t1),
        y0,
        method="RK45",
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
    )
    if sol.status != 0:
        raise IntegrationError(sol.message)
    return sol.y[:, -1]


def propagate_state(hamiltonian, psi0, t0: float, t1: float, cfg: IntegratorConfig = DEFAULT_CONFIG, manifold=None):
    """Solve i dpsi/dt = H(t) psi from t0 to t1 (hbar = 1).

    ``hamiltonian`` is a :class:`HamiltonianSpec` (protocol time axis), a
    callable ``t -> H`` or a constant matrix.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1) > 1e-8:
        raise ValueError("initial state must be normalised")
    hf = _as_hamiltonian_callable(hamiltonian, manifold)
    return _solve(lambda t, y: -1j * (hf(t) @ y), psi0, t0, t1, cfg)


def propagate_lindblad(
    hamiltonian,
    channels,
    x0,
    t0: float,
    t1: float,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    manifold=None,
    bra_hamiltonian=None,
    bra_manifold=None,
):
    """Solve dX/dt = -i(H X - X H') + sum_k D[a_k] X for any square X.

    ``X`` need not be a density operator; a stack (n, D, D) is propagated as
    independent inputs. ``H'`` defaults to ``H``; a different bra-side
    Hamiltonian is used for coherences between isolated manifolds.
    """
    x0 = np.asarray(x0, dtype=complex)
    single = x0.ndim == 2
    xs = x0[None] if single else x0
    if xs.shape[-1] != xs.shape[-2]:
        raise ValueError("X0 must be square")
    hk = _as_hamiltonian_callable(hamiltonian, manifold)
    if bra_hamiltonian is None and bra_manifold is None:
        hb = hk
    else:
        hb = _as_hamiltonian_callable(hamiltonian if bra_hamiltonian is None else bra_hamiltonian, bra_manifold)
    ops = channels.operators if isinstance(channels, DecayChannelSet) else tuple(channels)
    dim = xs.shape[-1]
    ll = sum((L.conj().T @ L for L in ops), np.zeros((dim, dim), dtype=complex))
    shape = xs.shape

    def rhs(t, y):
        x = y.reshape(shape)
        h1 = hk(t) - 0.5j * ll
        h2 = h1 if hb is hk else hb(t) - 0.5j * ll
        dx = -1j * (h1 @ x - x @ h2.conj().T)
        for L in ops:
            dx += L @ x @ L.conj().T
        return dx.ravel()

    out = _solve(rhs, xs.ravel(), t0, t1, cfg).reshape(shape)
    return out[0] if single else out


# --------------------------------------------------------------------------
# full protocol


def manifold_projectors(spec: HamiltonianSpec) -> dict[str, np.ndarray]:
    """Diagonal masks splitting the full space by target manifold.

    Target levels A, C, e1, R belong to manifold 'A'; B and e2 to 'B'.
    """
    space = spec.space
    tl = np.indices(space.dims).reshape(space.n_atoms, -1)[space.target_index]
    in_b = (tl == TL.B) | (tl == TL.e2)
    return {"A": ~in_b, "B": in_b}


def _segments(spec: HamiltonianSpec) -> list[tuple[float, float]]:
    s = spec.schedule
    a = s.t_pi
    return [(0.0, a), (a, a + s.t_mid), (a + s.t_mid, a + s.t_d), (a + s.t_d, s.total_time)]


def _rk_protocol_state(spec, psi, manifold, cfg):
    for t0, t1 in _segments(spec):
        hf = lambda t, t0=t0: full_hamiltonian(min(max(t, 0.0), spec.total_time), spec, manifold)
        psi = _solve(lambda t, y: -1j * (hf(t) @ y), psi, t0, t1, cfg)
    return psi


def run_protocol_state(spec: HamiltonianSpec, psi0, cfg: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Evolve a ket through pi pulse, d-STIRAP and closing pi pulse (no decay)."""
    from . import _structured

    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (spec.space.dim,):
        raise ValueError(f"state must have dimension {spec.space.dim}")
    parts = _split_ket(spec, psi0)
    out = np.zeros_like(psi0)
    for manifold, psi in parts:
        if cfg.method == "rk45":
            out += _rk_protocol_state(spec, psi, manifold, cfg)
        else:
            out += _structured.protocol_kets(spec, psi[None], manifold, cfg)[0]
    return out


def _split_ket(spec, psi0):
    if not spec.manifold_isolation:
        return [(None, psi0)]
    masks = manifold_projectors(spec)
    return [(m, np.where(masks[m], psi0, 0)) for m in ("A", "B") if np.any(psi0[masks[m]] != 0)]


def split_by_manifold(spec: HamiltonianSpec, x0: np.ndarray):
    """Split X into (ket manifold, bra manifold, block) pieces that sum to X."""
    if not spec.manifold_isolation:
        return [(None, None, x0)]
    masks = manifold_projectors(spec)
    out = []
    for a in ("A", "B"):
        for b in ("A", "B"):
            blk = np.where(masks[a][:, None] & masks[b][None, :], x0, 0)
            if np.any(blk != 0):
                out.append((a, b, blk))
    return out


def _rk_protocol_density(spec, xs, ket_m, bra_m, channels, cfg):
    for t0, t1 in _segments(spec):
        clamp = lambda t: min(max(t, 0.0), spec.total_time)
        hk = lambda t: full_hamiltonian(clamp(t), spec, ket_m)
        hb = lambda t: full_hamiltonian(clamp(t), spec, bra_m)
        xs = propagate_lindblad(hk, channels, xs, t0, t1, cfg, bra_hamiltonian=hb)
    return xs


def run_protocol_density(
    spec: HamiltonianSpec,
    x0,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    channels: DecayChannelSet | None = None,
) -> np.ndarray:
    """Evolve an operator (or a stack of them) through the full protocol.

    Decay follows the physics parameters; pass ``channels=no_decay()`` for
    unitary evolution. With manifold isolation each (ket, bra) manifold block
    evolves with its own Hamiltonian on each side and the blocks are summed.
    """
    from . import _structured

    x0 = np.asarray(x0, dtype=complex)
    single = x0.ndim == 2
    xs = x0[None] if single else x0
    if xs.shape[-2:] != (spec.space.dim, spec.space.dim):
        raise ValueError(f"operators must be {spec.space.dim}x{spec.space.dim}")
    if channels is None:
        channels = decay_channels(spec)
    use_decay = len(channels) > 0
    out = np.zeros_like(xs)
    if cfg.method == "magnus" and use_decay and not _is_standard_channel_set(spec, channels):
        raise ValueError("the exponential route only supports the standard decay channels")
    for ket_m, bra_m, blk in split_by_manifold(spec, xs):
        active = np.any(blk != 0, axis=(1, 2))
        if cfg.method == "rk45":
            out[active] += _rk_protocol_density(spec, blk[active], ket_m, bra_m, channels, cfg)
        else:
            out[active] += _structured.protocol_density(spec, blk[active], ket_m, bra_m, cfg, decay=use_decay)
    return out[0] if single else out


def _is_standard_channel_set(spec, channels) -> bool:
    ref = decay_channels(spec)
    return len(ref) == len(channels) and all(
        np.array_equal(a, b) for a, b in zip(ref.operators, channels.operators)
    )
