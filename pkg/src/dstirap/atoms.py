"""Atomic level structure, composite Hilbert space and interaction strengths.

Units used everywhere in the package: time in microseconds, length in
micrometres, frequencies as angular frequencies in rad/us. Configuration
files carry ordinary frequencies in MHz; :data:`MHZ` converts.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

MHZ = 2 * math.pi  # 1 MHz (ordinary) in rad/us

# Hartree energy over h in GHz, Bohr radius in um (CODATA 2018).
HARTREE_GHZ = 6.579683920502e6
BOHR_UM = 5.29177210903e-5
C6_AU_TO_GHZ_UM6 = HARTREE_GHZ * BOHR_UM**6


class ControlLevel(enum.IntEnum):
    q0 = 0
    q1 = 1
    ryd = 2


class TargetLevel(enum.IntEnum):
    A = 0
    B = 1
    C = 2
    e1 = 3
    e2 = 4
    R = 5


N_CONTROL_LEVELS = len(ControlLevel)
N_TARGET_LEVELS = len(TargetLevel)


def ket(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def outer(dim: int, i: int, j: int) -> np.ndarray:
    """Matrix unit |i><j| in a ``dim``-level space."""
    m = np.zeros((dim, dim), dtype=complex)
    m[i, j] = 1.0
    return m


# --------------------------------------------------------------------------
# van der Waals interaction


def c6_atomic_units(n: int) -> float:
    """Cs nS C6 coefficient in atomic units from the polynomial fit.

    The sign is kept as the fit gives it (negative around n = 126).
    """
    if n < 1:
        raise ValueError(f"principal quantum number must be >= 1, got {n}")
    n = float(n)
    return n**11 * (10.64 - 0.6294 * n + 2.33e-3 * n**2)


def c6_to_freq_units(c6_au: float) -> float:
    """Convert C6 from atomic units to GHz um^6 (ordinary frequency)."""
    return c6_au * C6_AU_TO_GHZ_UM6


def interaction_strength(l: float, n: int) -> float:
    """Blockade shift |C6|/l^6 at distance ``l`` (um), returned in rad/us."""
    if l <= 0:
        raise ValueError(f"interatomic distance must be positive, got {l}")
    c6_ghz = abs(c6_to_freq_units(c6_atomic_units(n)))
    return 2 * math.pi * 1e3 * c6_ghz / l**6


# --------------------------------------------------------------------------
# geometry


@dataclass(frozen=True)
class Geometry:
    """Atom positions in um, controls first and the target last."""

    positions: tuple[tuple[float, float, float], ...]
    principal_n: int = 126
    include_cc: bool = False

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3 or len(pos) < 2:
            raise ValueError("need at least two 3-D positions")
        d = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)
        if np.any(d[~np.eye(len(pos), dtype=bool)] <= 0):
            raise ValueError("atoms must sit at distinct positions")

    @property
    def n_controls(self) -> int:
        return len(self.positions) - 1

    def distance(self, i: int, j: int) -> float:
        return float(np.linalg.norm(np.subtract(self.positions[i], self.positions[j])))

    def control_target_distances(self) -> list[float]:
        t = self.n_controls
        return [self.distance(i, t) for i in range(self.n_controls)]

    def v_ct(self) -> tuple[float, ...]:
        return tuple(interaction_strength(l, self.principal_n) for l in self.control_target_distances())

    def v_cc(self) -> tuple[tuple[float, ...], ...]:
        n = self.n_controls
        out = [[0.0] * n for _ in range(n)]
        if self.include_cc:
            for i, j in itertools.combinations(range(n), 2):
                out[i][j] = out[j][i] = interaction_strength(self.distance(i, j), self.principal_n)
        return tuple(tuple(row) for row in out)


PRESET_FOR_QUBITS = {2: "pair", 3: "chain3", 4: "star4"}


def preset_geometry(kind: str, l: float = 6.0, n: int = 126, include_cc: bool = False) -> Geometry:
    """Standard layouts with the target at the origin.

    ``pair``: one control at distance l. ``chain3``: control-target-control on
    a line with spacing l. ``star4``: three controls on a circle of radius l,
    120 degrees apart.
    """
    if l <= 0:
        raise ValueError(f"spacing must be positive, got {l}")
    target = (0.0, 0.0, 0.0)
    if kind == "pair":
        controls = [(-l, 0.0, 0.0)]
    elif kind == "chain3":
        controls = [(-l, 0.0, 0.0), (l, 0.0, 0.0)]
    elif kind == "star4":
        angles = [math.pi / 2 + k * 2 * math.pi / 3 for k in range(3)]
        controls = [(l * math.cos(a), l * math.sin(a), 0.0) for a in angles]
    else:
        raise ValueError(f"unknown geometry preset {kind!r}")
    return Geometry(tuple(controls) + (target,), principal_n=n, include_cc=include_cc)


# --------------------------------------------------------------------------
# physical parameters

CS_RYDBERG_LIFETIME_US = 540.0
CS_7P32_LIFETIME_US = 0.13754
CS_7P12_LIFETIME_US = 0.16521


@dataclass(frozen=True)
class PhysicsParams:
    """Couplings, detuning, decay rates and error knobs (rad/us, 1/us)."""

    omega0: float
    omega_r: float
    omega_c: float
    delta: float
    gamma_phase: float = math.pi
    gamma_r: float = 1 / CS_RYDBERG_LIFETIME_US
    gamma_R: float = 1 / CS_RYDBERG_LIFETIME_US
    gamma_e1: float = 1 / CS_7P32_LIFETIME_US
    gamma_e2: float = 1 / CS_7P12_LIFETIME_US
    v_ct: tuple[float, ...] = (0.0,)
    v_cc: tuple[tuple[float, ...], ...] | None = None
    xi: float = 0.0
    zeta: float = 0.0

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError("omega0 must be positive")
        for name in ("omega_r", "omega_c", "gamma_r", "gamma_R", "gamma_e1", "gamma_e2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if len(self.v_ct) < 1:
            raise ValueError("need at least one control atom")
        object.__setattr__(self, "v_ct", tuple(float(v) for v in self.v_ct))
        n = len(self.v_ct)
        if self.v_cc is None:
            object.__setattr__(self, "v_cc", tuple((0.0,) * n for _ in range(n)))
        else:
            vcc = np.asarray(self.v_cc, dtype=float)
            if vcc.shape != (n, n) or not np.allclose(vcc, vcc.T):
                raise ValueError("v_cc must be a symmetric n_controls x n_controls matrix")
            object.__setattr__(self, "v_cc", tuple(tuple(float(x) for x in row) for row in vcc))

    @property
    def n_controls(self) -> int:
        return len(self.v_ct)

    @property
    def n_qubits(self) -> int:
        return self.n_controls + 1

    def without_decay(self) -> "PhysicsParams":
        return replace(self, gamma_r=0.0, gamma_R=0.0, gamma_e1=0.0, gamma_e2=0.0)

    def with_blockade(self, v: float) -> "PhysicsParams":
        """Same parameters with every control-target shift set to ``v``."""
        return replace(self, v_ct=(float(v),) * self.n_controls)

    def replace(self, **changes) -> "PhysicsParams":
        return replace(self, **changes)


# Detuning and pulse-shape defaults come from a scan of the 2-qubit gate at
# T = 0.6 us (see README). A one-photon detuning leaves a dynamic phase from
# the non-adiabatic remainder, so the intermediate levels are driven on resonance.
DEFAULT_DELTA_OVER_OMEGA0 = 0.0


def cesium_params(
    n_qubits: int = 2,
    *,
    l: float = 6.0,
    principal_n: int = 126,
    include_cc: bool = False,
    omega0: float = 44.0 * MHZ,
    omega_c_ratio: float = 3.0,
    delta_ratio: float = DEFAULT_DELTA_OVER_OMEGA0,
    **overrides,
) -> PhysicsParams:
    """Cs parameters: 126S Rydberg states, 7P3/2 and 7P1/2 intermediates."""
    if n_qubits not in PRESET_FOR_QUBITS:
        raise ValueError(f"n_qubits must be 2, 3 or 4, got {n_qubits}")
    geom = preset_geometry(PRESET_FOR_QUBITS[n_qubits], l, principal_n, include_cc)
    kw = dict(
        omega0=omega0,
        omega_r=omega0,
        omega_c=omega_c_ratio * omega0,
        delta=delta_ratio * omega0,
        v_ct=geom.v_ct(),
        v_cc=geom.v_cc(),
    )
    kw.update(overrides)
    return PhysicsParams(**kw)


# --------------------------------------------------------------------------
# composite Hilbert space


@dataclass(frozen=True)
class CompositeSpace:
    """``n_controls`` three-level controls followed by one six-level target."""

    n_controls: int
    dims: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        if self.n_controls < 1:
            raise ValueError("need at least one control atom")
        object.__setattr__(self, "dims", (N_CONTROL_LEVELS,) * self.n_controls + (N_TARGET_LEVELS,))

    @property
    def dim(self) -> int:
        return N_CONTROL_LEVELS**self.n_controls * N_TARGET_LEVELS

    @property
    def n_qubits(self) -> int:
        return self.n_controls + 1

    @property
    def d(self) -> int:
        """Dimension of the computational subspace."""
        return 2**self.n_qubits

    @property
    def n_atoms(self) -> int:
        return self.n_controls + 1

    @property
    def target_index(self) -> int:
        return self.n_controls

    def index(self, *levels: int) -> int:
        return int(np.ravel_multi_index(tuple(int(x) for x in levels), self.dims))

    def levels(self, index: int) -> tuple[int, ...]:
        return tuple(int(x) for x in np.unravel_index(index, self.dims))

    @cached_property
    def computational_indices(self) -> np.ndarray:
        out = []
        for bits in itertools.product((0, 1), repeat=self.n_qubits):
            # control 0/1 -> q0/q1, target 0/1 -> A/B; both coincide with the digit
            out.append(self.index(*bits))
        return np.asarray(out, dtype=int)


def build_composite_space(n_controls: int) -> CompositeSpace:
    return CompositeSpace(n_controls)


def embed_single_atom_op(space: CompositeSpace, atom_index: int, op) -> np.ndarray:
    """I x ... x op x ... x I with ``op`` on atom ``atom_index``."""
    if not 0 <= atom_index < space.n_atoms:
        raise ValueError(f"atom index {atom_index} out of range")
    op = np.asarray(op, dtype=complex)
    d = space.dims[atom_index]
    if op.shape != (d, d):
        raise ValueError(f"atom {atom_index} needs a {d}x{d} operator, got {op.shape}")
    left = int(np.prod(space.dims[:atom_index], dtype=int))
    right = int(np.prod(space.dims[atom_index + 1:], dtype=int))
    return np.kron(np.kron(np.eye(left), op), np.eye(right))


def computational_embedding(space: CompositeSpace) -> list[int]:
    """Full-space indices of computational basis states in binary order."""
    return [int(i) for i in space.computational_indices]
