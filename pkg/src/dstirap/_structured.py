"""Block-structured exponential propagation of the three-step protocol.

The full index is ``c * 6 + a`` with ``c`` the flattened control state and
``a`` the target level. During the pi pulses the target is idle, so the
dynamics act on control indices only and depend on the target solely through
whether it sits in |R>. During d-STIRAP the controls are frozen and every
control configuration sees the target with a fixed blockade shift. Each case
reduces to many small blocks that are exponentiated exactly, large shift
included, with fourth-order commutator-free Magnus steps.

Terms that couple the blocks are split symmetrically: the target decay during
the pi pulses (only R -> e1 fails to commute) and the control jumps during
d-STIRAP.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.linalg import expm

from .atoms import N_CONTROL_LEVELS as NCL, N_TARGET_LEVELS as NTL, ControlLevel as CL, TargetLevel as TL
from .hamiltonian import control_drive_op, control_rabi, target_detuning_op, target_drive_op
from .magnus import cf4_nodes, cf4_step, dissipator_generator, lindblad_generator, n_steps, time_ordered_exponential

_P_R = np.zeros((NTL, NTL))
_P_R[TL.R, TL.R] = 1.0
_P_r = np.zeros((NCL, NCL))
_P_r[CL.ryd, CL.ryd] = 1.0


class _Layout:
    """Control-register bookkeeping shared by the ket and density engines."""

    def __init__(self, spec):
        p = spec.physics
        self.nc = p.n_controls
        self.n = NCL**self.nc
        lv = np.indices((NCL,) * self.nc).reshape(self.nc, -1)
        in_r = lv == CL.ryd
        self.n_r = in_r.sum(axis=0)
        self.v = np.asarray(p.v_ct, dtype=float) @ in_r if self.nc else np.zeros(1)
        ecc = np.zeros(self.n)
        for i, j in itertools.combinations(range(self.nc), 2):
            ecc += p.v_cc[i][j] * (in_r[i] & in_r[j])
        self.e_cc = ecc
        self.has_cc = bool(np.any(ecc))


def _control_jumps(p):
    a = np.sqrt(p.gamma_r / 2)
    ops = []
    for j in (CL.q0, CL.q1):
        L = np.zeros((NCL, NCL))
        L[j, CL.ryd] = a
        ops.append(L)
    return ops


def _target_jumps(p):
    ops = []

    def add(rate, to, frm):
        L = np.zeros((NTL, NTL))
        L[to, frm] = np.sqrt(rate)
        ops.append(L)

    add(p.gamma_R, TL.e1, TL.R)
    for j in (TL.A, TL.B, TL.C):
        add(p.gamma_e1 / 2, j, TL.e1)
    for k in (TL.B, TL.C):
        add(p.gamma_e2 / 2, k, TL.e2)
    return ops


def _embed_control(op, i, nc):
    return np.kron(np.kron(np.eye(NCL**i), op), np.eye(NCL ** (nc - i - 1)))


def _dense_control_h(t, spec, sign, lay, shifted):
    h = np.zeros((lay.n, lay.n), dtype=complex)
    drive = control_drive_op(control_rabi(t, spec, sign))
    for i in range(lay.nc):
        h += _embed_control(drive, i, lay.nc)
    diag = lay.e_cc + (lay.v if shifted else 0.0)
    return h + np.diag(diag)


# --------------------------------------------------------------------------
# kets


def _ket_pi_pulse(spec, psi, lay, sign, h_max):
    t_pi = spec.schedule.t_pi
    out = psi.copy()
    for shifted, sel in ((False, _not_R), (True, _only_R)):
        u = time_ordered_exponential(
            lambda t: -1j * _dense_control_h(t, spec, sign, lay, shifted), 0.0, t_pi, h_max
        )
        idx = sel()
        out[:, :, idx] = np.einsum("cd,ndk->nck", u, psi[:, :, idx])
    return out


def _not_R():
    return [a for a in range(NTL) if a != TL.R]


def _only_R():
    return [TL.R]


def _target_ket_propagators(spec, manifold, shifts, h_max):
    s = spec.schedule
    det = target_detuning_op(spec)
    pr = shifts[:, None, None] * _P_R

    def gen(t):
        return -1j * (target_drive_op(t, spec, manifold) + det + pr)

    u1 = time_ordered_exponential(gen, 0.0, s.t_mid, h_max)
    u2 = time_ordered_exponential(gen, s.t_mid, s.t_d, h_max)
    return u2 @ u1


def protocol_kets(spec, psis, manifold, cfg):
    """Propagate kets (n, D) through the protocol without decay."""
    lay = _Layout(spec)
    h = cfg.magnus_step
    psi = np.asarray(psis, dtype=complex).reshape(-1, lay.n, NTL)
    psi = _ket_pi_pulse(spec, psi, lay, +1, h)
    keys, inv = np.unique(lay.v, return_inverse=True)
    us = _target_ket_propagators(spec, manifold, keys, h)
    psi = np.einsum("cab,ncb->nca", us[inv], psi)
    psi = psi * np.exp(-1j * lay.e_cc * spec.schedule.t_d)[None, :, None]
    psi = _ket_pi_pulse(spec, psi, lay, -1, h)
    return psi.reshape(psi.shape[0], -1)


# --------------------------------------------------------------------------
# density operators


def _pi_pulse_maps(spec, lay, sign, h_max, decay):
    """Control superoperators for each (ket target in R, bra target in R) key.

    Without control-control shifts the map factorises into one 9x9 map per
    control; the return value is then a list of per-control maps per key.
    """
    p = spec.physics
    t_pi = spec.schedule.t_pi
    maps = {}
    for kr, br in itertools.product((False, True), repeat=2):
        if lay.has_cc:
            jumps = []
            if decay:
                for i in range(lay.nc):
                    jumps += [_embed_control(L, i, lay.nc) for L in _control_jumps(p)]

            def gen(t, kr=kr, br=br):
                return lindblad_generator(
                    _dense_control_h(t, spec, sign, lay, kr), _dense_control_h(t, spec, sign, lay, br), jumps
                )

            maps[kr, br] = time_ordered_exponential(gen, 0.0, t_pi, h_max)
        else:
            jumps = _control_jumps(p) if decay else []
            per = []
            for i in range(lay.nc):
                vi = p.v_ct[i]

                def gen(t, vi=vi, kr=kr, br=br):
                    d = control_drive_op(control_rabi(t, spec, sign))
                    return lindblad_generator(d + kr * vi * _P_r, d + br * vi * _P_r, jumps)

                per.append(time_ordered_exponential(gen, 0.0, t_pi, h_max).reshape(NCL, NCL, NCL, NCL))
            maps[kr, br] = per
    return maps


def _apply_control_maps(y, maps, nc):
    """Apply per-control maps to y with axes (..., c_1..c_nc, c'_1..c'_nc)."""
    lead = y.ndim - 2 * nc
    for i, m in enumerate(maps):
        ax = (lead + i, lead + nc + i)
        y = np.tensordot(m, y, axes=([2, 3], ax))
        y = np.moveaxis(y, (0, 1), ax)
    return y


def _density_pi_pulse(spec, x, lay, maps, target_half):
    """x has layout (n, a, b, c, c') with c, c' flattened."""
    n = x.shape[0]
    if target_half is not None:
        x = np.einsum("ij,njc->nic", target_half, x.reshape(n, NTL * NTL, -1)).reshape(x.shape)
    out = np.empty_like(x)
    groups = {False: _not_R(), True: _only_R()}
    for (kr, br), m in maps.items():
        ia, ib = groups[kr], groups[br]
        blk = x[:, ia][:, :, ib]
        if lay.has_cc:
            shp = blk.shape
            blk = (blk.reshape(-1, lay.n * lay.n) @ m.T).reshape(shp)
        else:
            shp = blk.shape
            y = blk.reshape(shp[:3] + (NCL,) * (2 * lay.nc))
            blk = _apply_control_maps(y, m, lay.nc).reshape(shp)
        out[np.ix_(range(n), ia, ib)] = blk
    if target_half is not None:
        out = np.einsum("ij,njc->nic", target_half, out.reshape(n, NTL * NTL, -1)).reshape(x.shape)
    return out


def _control_jump_half(y, lay, tau, gamma_r):
    """exp(tau J) for the control jumps; J is nilpotent per control so
    exp(tau J_i) = 1 + tau J_i. y has axes (c_1..c_nc, c'_1..c'_nc, ...)."""
    w = tau * gamma_r / 2
    nc = lay.nc
    for i in range(nc):
        src = [slice(None)] * y.ndim
        src[i] = CL.ryd
        src[nc + i] = CL.ryd
        moved = y[tuple(src)].copy()
        for j in (CL.q0, CL.q1):
            dst = [slice(None)] * y.ndim
            dst[i] = j
            dst[nc + i] = j
            y[tuple(dst)] += w * moved
    return y


def _dstirap_density(spec, x, lay, ket_m, bra_m, h_max, decay):
    """x has layout (c, c', n, 36); returns the same layout."""
    p = spec.physics
    s = spec.schedule
    nct = lay.n
    pairs_k = np.stack(np.broadcast_arrays(lay.v[:, None], lay.v[None, :]), axis=-1).reshape(-1, 2)
    keys, inv = np.unique(pairs_k, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    groups = [np.nonzero(inv == k)[0] for k in range(len(keys))]
    scal = -1j * (lay.e_cc[:, None] - lay.e_cc[None, :])
    if decay:
        scal = scal - 0.5 * p.gamma_r * (lay.n_r[:, None] + lay.n_r[None, :])
    scal = scal.reshape(-1)
    d_t = dissipator_generator(_target_jumps(p), NTL) if decay else 0.0
    det = target_detuning_op(spec)
    pr_k = keys[:, 0, None, None] * _P_R
    pr_b = keys[:, 1, None, None] * _P_R

    def gen(t):
        base_k = target_drive_op(t, spec, ket_m) + det
        base_b = base_k if bra_m == ket_m else target_drive_op(t, spec, bra_m) + det
        return lindblad_generator(base_k + pr_k, base_b + pr_b) + d_t

    shape = x.shape
    y = x.reshape(nct * nct, shape[2], NTL * NTL)
    jump = decay and p.gamma_r > 0 and lay.nc > 0
    for t0, t1 in ((0.0, s.t_mid), (s.t_mid, s.t_d)):
        m = n_steps(t1 - t0, h_max)
        h = (t1 - t0) / m
        phase = np.exp(scal * h)[:, None, None]
        for k in range(m):
            ta, tb = cf4_nodes(t0 + k * h, h)
            us = cf4_step(gen(ta), gen(tb), h)
            if jump:
                y = _control_jump_half(y.reshape((NCL,) * (2 * lay.nc) + y.shape[1:]), lay, h / 2, p.gamma_r)
                y = y.reshape(nct * nct, shape[2], NTL * NTL)
            for g, idx in enumerate(groups):
                y[idx] = y[idx] @ us[g].T
            y *= phase
            if jump:
                y = _control_jump_half(y.reshape((NCL,) * (2 * lay.nc) + y.shape[1:]), lay, h / 2, p.gamma_r)
                y = y.reshape(nct * nct, shape[2], NTL * NTL)
    return y.reshape(shape)


def protocol_density(spec, xs, ket_m, bra_m, cfg, decay=True):
    """Propagate operators (n, D, D) whose ket/bra sides lie in the given manifolds."""
    lay = _Layout(spec)
    h = cfg.magnus_step
    n = xs.shape[0]
    nct = lay.n
    x = np.asarray(xs, dtype=complex).reshape(n, nct, NTL, nct, NTL)
    half = None
    if decay:
        half = expm(dissipator_generator(_target_jumps(spec.physics), NTL) * spec.schedule.t_pi / 2)
    # (n, a, b, c, c')
    y = x.transpose(0, 2, 4, 1, 3).copy()
    y = _density_pi_pulse(spec, y, lay, _pi_pulse_maps(spec, lay, +1, h, decay), half)
    # (c, c', n, 36)
    y = y.transpose(3, 4, 0, 1, 2).reshape(nct, nct, n, NTL * NTL).copy()
    y = _dstirap_density(spec, y, lay, ket_m, bra_m, h, decay)
    y = y.reshape(nct, nct, n, NTL, NTL).transpose(2, 3, 4, 0, 1).copy()
    y = _density_pi_pulse(spec, y, lay, _pi_pulse_maps(spec, lay, -1, h, decay), half)
    return y.transpose(0, 3, 1, 4, 2).reshape(n, nct * NTL, nct * NTL)
