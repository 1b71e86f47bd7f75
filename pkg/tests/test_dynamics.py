import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import basis_ket, spec_for
from dstirap.atoms import ControlLevel as CL, TargetLevel as TL, cesium_params
from dstirap.dynamics import (
    IntegrationError,
    IntegratorConfig,
    decay_channels,
    manifold_projectors,
    no_decay,
    propagate_lindblad,
    propagate_state,
    run_protocol_density,
    run_protocol_state,
)
from dstirap.gates import gate_fidelity
from dstirap.hamiltonian import control_drive_op, control_rabi

P2 = cesium_params(2)
SPEC2 = spec_for(P2)
RK = IntegratorConfig(method="rk45", rel_tol=1e-10, abs_tol=1e-12)


def random_density(rng, dim, rank=3, support=None):
    m = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    if support is not None:
        m[~support] = 0
    rho = m @ m.conj().T
    return rho / np.trace(rho)


def test_config_validation_and_halving():
    with pytest.raises(ValueError):
        IntegratorConfig(method="euler")
    with pytest.raises(ValueError):
        IntegratorConfig(rel_tol=0)
    h = IntegratorConfig().halved()
    assert (h.rel_tol, h.abs_tol, h.magnus_step) == (5e-10, 5e-12, 2.5e-4)


def test_constant_rabi_flip():
    omega = 3.0
    h = 0.5 * omega * np.array([[0, 1], [1, 0]], dtype=complex)
    psi = propagate_state(h, np.array([1, 0], dtype=complex), 0.0, math.pi / omega, RK)
    assert np.allclose(psi, [0, -1j], atol=1e-8)


def test_soft_pi_pulse_and_round_trip():
    s = SPEC2
    t_pi = s.schedule.t_pi
    up = lambda t: control_drive_op(control_rabi(t, s, +1))
    down = lambda t: control_drive_op(control_rabi(t, s, -1))
    one = np.array([0, 1, 0], dtype=complex)
    psi = propagate_state(up, one, 0.0, t_pi, RK)
    assert np.allclose(psi, [0, 0, -1j], atol=1e-8)
    back = propagate_state(down, psi, 0.0, t_pi, RK)
    assert np.allclose(back, one, atol=1e-8)


def test_normalisation_required():
    with pytest.raises(ValueError):
        propagate_state(np.eye(2), np.array([1.0, 1.0]), 0.0, 1.0)


def test_analytic_decay():
    gamma = 2.5
    L = np.sqrt(gamma) * np.array([[0, 1], [0, 0]], dtype=complex)
    rho = propagate_lindblad(np.zeros((2, 2)), [L], np.diag([0, 1]).astype(complex), 0.0, 0.7, RK)
    assert abs(rho[1, 1] - math.exp(-gamma * 0.7)) < 1e-8
    assert abs(np.trace(rho) - 1) < 1e-8


def test_integration_failure_is_reported():
    h = lambda t: np.array([[np.nan if t > 0.5 else 0.0, 0], [0, 0]], dtype=complex)
    with pytest.raises(IntegrationError):
        propagate_state(h, np.array([1, 0], dtype=complex), 0.0, 1.0, IntegratorConfig(method="rk45"))


def test_decay_channel_inventory():
    ch = decay_channels(SPEC2)
    assert len(ch) == 2 + 6
    assert len(decay_channels(spec_for(cesium_params(3)))) == 4 + 6
    rates = {lab: np.linalg.norm(op) ** 2 for op, lab in zip(ch.operators, ch.labels)}
    assert math.isclose(rates["target:R->e1"], P2.gamma_R * 3)  # one entry per control level
    assert math.isclose(rates["target:e1->A"], P2.gamma_e1 / 2 * 3)
    assert math.isclose(rates["control0:r->1"], P2.gamma_r / 2 * 6)
    assert len(decay_channels(spec_for(P2.without_decay()))) == 0


def test_manifold_masks_partition_space():
    m = manifold_projectors(SPEC2)
    assert np.all(m["A"] ^ m["B"])
    assert m["B"][SPEC2.space.index(CL.q0, TL.B)] and m["B"][SPEC2.space.index(CL.ryd, TL.e2)]
    assert m["A"][SPEC2.space.index(CL.q1, TL.C)]


# ---- full protocol -------------------------------------------------------


def test_blocked_branch_returns():
    for v in (0.0, P2.v_ct[0]):
        s = spec_for(P2.without_decay().with_blockade(v))
        psi = run_protocol_state(s, basis_ket(s, CL.q0, TL.A))
        amp = psi[s.space.index(CL.q0, TL.A)]
        assert abs(abs(amp) - 1) < 1e-2


def test_conditional_phase_and_b_manifold():
    s = spec_for(P2.without_decay())
    a = run_protocol_state(s, basis_ket(s, CL.q1, TL.A))[s.space.index(CL.q1, TL.A)]
    assert abs(a + 1) < 2e-2
    for c in (CL.q0, CL.q1):
        b = run_protocol_state(s, basis_ket(s, c, TL.B))[s.space.index(c, TL.B)]
        assert abs(b + 1) < 2e-2


def test_huge_blockade_transfer_picks_up_phase():
    s = spec_for(P2.without_decay().with_blockade(1e3 * P2.omega0))
    a = run_protocol_state(s, basis_ket(s, CL.q1, TL.A))[s.space.index(CL.q1, TL.A)]
    assert abs(a - math.cos(P2.gamma_phase)) < 2e-2


@pytest.mark.parametrize("manifold", ["A", "B"])
def test_unitary_protocol_conserves_norm(rng, manifold):
    s = spec_for(cesium_params(3).without_decay())
    psi = rng.normal(size=s.space.dim) + 1j * rng.normal(size=s.space.dim)
    psi[~manifold_projectors(s)[manifold]] = 0
    psi /= np.linalg.norm(psi)
    assert abs(np.linalg.norm(run_protocol_state(s, psi)) - 1) < 1e-8


def test_unitary_full_space_conserves_norm(rng):
    s = spec_for(cesium_params(3).without_decay(), isolation=False)
    psi = rng.normal(size=s.space.dim) + 1j * rng.normal(size=s.space.dim)
    psi /= np.linalg.norm(psi)
    assert abs(np.linalg.norm(run_protocol_state(s, psi)) - 1) < 1e-8


def test_exponential_route_matches_runge_kutta(rng):
    # moderate blockade keeps the reference integrator affordable
    p = P2.with_blockade(4.5 * P2.omega_c)
    s = spec_for(p)
    comp = s.space.computational_indices
    psi = np.zeros(s.space.dim, dtype=complex)
    psi[comp] = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    a = run_protocol_state(s, psi)
    b = run_protocol_state(s, psi, RK)
    assert np.abs(a - b).max() < 1e-6
    rho = np.outer(psi, psi.conj())
    ra = run_protocol_density(s, rho)
    rb = run_protocol_density(s, rho, IntegratorConfig(method="rk45", rel_tol=1e-9, abs_tol=1e-11))
    assert np.abs(ra - rb).max() < 1e-6


def test_density_matches_ket_without_decay(rng):
    s = spec_for(cesium_params(3).without_decay())
    psi = np.zeros(s.space.dim, dtype=complex)
    comp = s.space.computational_indices
    psi[comp] = rng.normal(size=len(comp)) + 1j * rng.normal(size=len(comp))
    psi /= np.linalg.norm(psi)
    out = run_protocol_state(s, psi)
    rho = run_protocol_density(s, np.outer(psi, psi.conj()))
    assert np.abs(rho - np.outer(out, out.conj())).max() < 1e-7


def test_control_control_shift_route(rng):
    # the dense control route (used when control-control shifts are on) agrees with the reference
    p = cesium_params(3, include_cc=True).with_blockade(4 * P2.omega_c)
    p = p.replace(v_cc=((0.0, 2.0 * P2.omega0), (2.0 * P2.omega0, 0.0)))
    s = spec_for(p)
    comp = s.space.computational_indices
    rho = np.zeros((s.space.dim,) * 2, dtype=complex)
    sub = random_density(rng, len(comp))
    rho[np.ix_(comp, comp)] = sub
    a = run_protocol_density(s, rho)
    b = run_protocol_density(s, rho, IntegratorConfig(method="rk45", rel_tol=1e-9, abs_tol=1e-11))
    assert np.abs(a - b).max() < 1e-6


@pytest.mark.parametrize("n_qubits", [2, 3])
def test_lindblad_protocol_keeps_trace_hermiticity_positivity(rng, n_qubits):
    s = spec_for(cesium_params(n_qubits))
    support = manifold_projectors(s)["A"]
    rho0 = random_density(rng, s.space.dim, support=support)
    rho = run_protocol_density(s, rho0)
    assert abs(np.trace(rho) - 1) < 1e-8
    assert np.abs(rho - rho.conj().T).max() < 1e-8
    assert np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() >= -1e-7


def test_physical_full_space_evolution_keeps_trace(rng):
    # without manifold isolation the dynamics is an ordinary Lindblad equation on the full space
    s = spec_for(P2, isolation=False)
    rho0 = random_density(rng, s.space.dim, rank=4)
    rho = run_protocol_density(s, rho0)
    assert abs(np.trace(rho) - 1) < 1e-8
    assert np.abs(rho - rho.conj().T).max() < 1e-8
    assert np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() >= -1e-7


@settings(max_examples=5)
@given(st.integers(0, 2**32 - 1), st.complex_numbers(max_magnitude=2), st.complex_numbers(max_magnitude=2))
def test_lindblad_linearity(seed, alpha, beta):
    rng = np.random.default_rng(seed)
    s = SPEC2
    d = s.space.dim
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    y = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    out = run_protocol_density(s, np.stack([x, y, alpha * x + beta * y]))
    assert np.abs(out[2] - alpha * out[0] - beta * out[1]).max() < 1e-8 * max(1, abs(alpha), abs(beta))


def test_cross_manifold_inputs_recombine(rng):
    s = SPEC2
    a = basis_ket(s, CL.q1, TL.A)
    b = basis_ket(s, CL.q0, TL.B)
    psi = (a + 1j * b) / np.sqrt(2)
    assert np.allclose(run_protocol_state(s, psi), (run_protocol_state(s, a) + 1j * run_protocol_state(s, b)) / np.sqrt(2))


def test_nonstandard_channels_need_reference_route():
    s = SPEC2
    with pytest.raises(ValueError):
        run_protocol_density(s, np.eye(s.space.dim) / s.space.dim, channels=no_decay().__class__((np.eye(18),), ("x",)))


def test_tolerance_halving_moves_fidelity_less_than_1e_6():
    cfg = IntegratorConfig()
    f1 = gate_fidelity(P2, 0.6, cfg=cfg)
    f2 = gate_fidelity(P2, 0.6, cfg=cfg.halved())
    assert abs(f1 - f2) < 1e-6
