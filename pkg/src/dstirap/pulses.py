"""Drive envelopes for the three-step gate: soft pi pulse, d-STIRAP pair, soft pi pulse.

All d-STIRAP times are measured from the start of the d-STIRAP window; the
window itself starts after the first pi pulse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Shape defaults chosen by maximising the 2-qubit fidelity at T = 0.6 us.
DEFAULT_SIGMA_FRAC = 0.12
DEFAULT_DELTA_FRAC = 0.75


@dataclass(frozen=True)
class PulseSchedule:
    t_pi: float
    t_d: float
    sigma: float
    delta: float
    t_s: float
    t_p: float
    t_p2: float
    t_s2: float
    t_mid: float
    gamma_phase: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        order = (0.0, self.t_s, self.t_p, self.t_mid, self.t_p2, self.t_s2, self.t_d)
        if not all(a < b for a, b in zip(order, order[1:])):
            raise ValueError(f"pulse centres out of order: {order}")

    @property
    def total_time(self) -> float:
        return 2 * self.t_pi + self.t_d

    @property
    def step_bounds(self) -> tuple[tuple[float, float], tuple[float, float], tuple[float, float]]:
        """Absolute (start, end) of the three protocol steps."""
        a = self.t_pi
        b = self.t_pi + self.t_d
        return (0.0, a), (a, b), (b, b + self.t_pi)


def soft_pi_amplitude(t, omega_r: float, period: float, sign: int = 1):
    """Raised-cosine Rabi frequency sign * (omega_r/2)(1 - cos(2 pi t / period)).

    Zero outside ``[0, period]``.
    """
    t = np.asarray(t, dtype=float)
    val = sign * 0.5 * omega_r * (1.0 - np.cos(2 * np.pi * t / period))
    out = np.where((t >= 0) & (t <= period), val, 0.0)
    return float(out) if out.ndim == 0 else out


def gaussian(t, t0: float, sigma: float):
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    out = np.exp(-((np.asarray(t, dtype=float) - t0) ** 2) / (2 * sigma**2))
    return float(out) if out.ndim == 0 else out


def _in_window(t, sched: PulseSchedule):
    t = np.asarray(t, dtype=float)
    return (t >= 0) & (t <= sched.t_d)


def phase_profile(t, sched: PulseSchedule):
    """Stokes phase: gamma_phase before the mid-point jump, zero after."""
    t = np.asarray(t, dtype=float)
    out = np.where(t < sched.t_mid, sched.gamma_phase, 0.0)
    return float(out) if out.ndim == 0 else out


def dstirap_pump(t, sched: PulseSchedule, omega0: float):
    g = gaussian(t, sched.t_p, sched.sigma) + gaussian(t, sched.t_p2, sched.sigma)
    out = np.where(_in_window(t, sched), 0.5 * omega0 * g, 0.0)
    return float(out) if out.ndim == 0 else out


def stokes_envelope(t, sched: PulseSchedule, omega0: float):
    """Real Stokes envelope, without the phase factor."""
    g = gaussian(t, sched.t_s, sched.sigma) + gaussian(t, sched.t_s2, sched.sigma)
    out = np.where(_in_window(t, sched), 0.5 * omega0 * g, 0.0)
    return float(out) if out.ndim == 0 else out


def dstirap_stokes(t, sched: PulseSchedule, omega0: float):
    """Complex Stokes Rabi frequency Omega_s(t) exp(-i phi(t))."""
    out = stokes_envelope(t, sched, omega0) * np.exp(-1j * np.asarray(phase_profile(t, sched)))
    return complex(out) if np.ndim(out) == 0 else out


def build_schedule(
    omega0: float,
    omega_r: float,
    gamma_phase: float,
    t_total: float,
    sigma_frac: float = DEFAULT_SIGMA_FRAC,
    delta_frac: float = DEFAULT_DELTA_FRAC,
) -> PulseSchedule:
    """Lay out pi pulse, d-STIRAP window and pi pulse inside ``t_total`` (us).

    Gaussian width is ``sigma_frac * T_d`` and the pump/Stokes centres sit
    ``delta_frac * sigma`` either side of the quarter points, Stokes first in
    the first half and last in the second (counterintuitive ordering).
    """
    if omega0 <= 0 or omega_r <= 0:
        raise ValueError("Rabi frequencies must be positive")
    t_pi = 2 * math.pi / omega_r
    if t_total <= 2 * t_pi:
        raise ValueError(f"t_total={t_total} us leaves no room for two pi pulses of {t_pi:.4g} us")
    if sigma_frac <= 0 or delta_frac <= 0 or sigma_frac * delta_frac >= 0.25:
        raise ValueError("need sigma_frac > 0, delta_frac > 0 and sigma_frac*delta_frac < 1/4")
    t_d = t_total - 2 * t_pi
    sigma = sigma_frac * t_d
    delta = delta_frac * sigma
    q1, q3 = t_d / 4, 3 * t_d / 4
    return PulseSchedule(
        t_pi=t_pi,
        t_d=t_d,
        sigma=sigma,
        delta=delta,
        t_s=q1 - delta,
        t_p=q1 + delta,
        t_p2=q3 - delta,
        t_s2=q3 + delta,
        t_mid=t_d / 2,
        gamma_phase=gamma_phase,
    )
