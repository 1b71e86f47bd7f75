import numpy as np
import pytest

from dstirap.analysis import (
    PulseKnobs,
    SweepGrid,
    SweepResult,
    amplitude_vs_omega_c,
    amplitude_vs_V,
    blockade_argmax,
    fidelity_vs_gate_time,
    ordered_map,
    position_sweep,
    rabi_error_sweep,
    read_csv,
    write_csv,
)
from dstirap.atoms import cesium_params, interaction_strength
from dstirap.gates import average_fidelity, ideal_gate

P2 = cesium_params(2)


def test_grid_iterates_row_major():
    g = SweepGrid(("a", "b"), ((1.0, 2.0), (3.0, 4.0, 5.0)))
    assert len(g) == 6
    assert g.points()[:3] == [(1.0, 3.0), (1.0, 4.0), (1.0, 5.0)]


def test_grid_rejects_mismatched_axes():
    with pytest.raises(ValueError):
        SweepGrid(("a",), ((1.0,), (2.0,)))


def test_csv_three_points_four_lines_and_exact_round_trip(tmp_path):
    vals = (np.pi / 3, -1 / 7, 1e-300 * np.e)
    res = SweepResult(("x",), "fidelity", tuple((float(i) + 0.1, v) for i, v in enumerate(vals)))
    path = write_csv(res, tmp_path / "r.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 4
    assert lines[0] == "x,fidelity"
    back = read_csv(path)
    assert back.header == res.header
    assert back.rows == res.rows


def test_argmax_and_blockade_argmax():
    rows = ((3.0, 1.0, 0.5), (3.0, 2.0, 0.9), (3.0, 3.0, 0.7), (4.0, 1.0, 0.95), (4.0, 2.0, 0.1))
    res = SweepResult(("omega_c_over_omega0", "v_over_omega0"), "fidelity", rows)
    assert res.argmax() == (4.0, 1.0)
    assert blockade_argmax(res) == {3.0: 2.0, 4.0: 1.0}


def _square(x):
    return x * x


def test_ordered_map_preserves_order_in_parallel():
    items = list(range(7))
    assert ordered_map(_square, items, workers=3) == [i * i for i in items]


def test_sweep_bytes_reproducible_and_worker_independent(tmp_path):
    ratios = (2.0, 3.0)
    a = write_csv(amplitude_vs_omega_c(ratios, P2), tmp_path / "a.csv").read_bytes()
    b = write_csv(amplitude_vs_omega_c(ratios, P2), tmp_path / "b.csv").read_bytes()
    c = write_csv(amplitude_vs_omega_c(ratios, P2, workers=2), tmp_path / "c.csv").read_bytes()
    assert a == b == c


def test_blocked_transfer_amplitude():
    res = amplitude_vs_omega_c((0.0, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0), P2)
    amp = dict(zip(res.column("omega_c_over_omega0"), res.values()))
    assert amp[3.0] >= 0.99
    # no coupling: the full double passage runs and picks up cos(pi)
    assert abs(amp[0.0] + 1) < 2e-2
    tail = [amp[r] for r in (2.0, 2.5, 3.0, 3.5, 4.0, 5.0)]
    assert all(np.diff(tail) > 0)


def test_conditional_amplitude_against_V():
    v94 = 94 * 3.0
    res = amplitude_vs_V((0.0, 10.0, 30.0, 100.0, v94), P2)
    amp = dict(zip(res.column("v_over_omega0"), res.values()))
    assert amp[0.0] >= 0.99
    assert abs(amp[v94] + 1) < 2e-2
    assert np.all(np.isfinite(res.values()))


def test_amplitude_against_V_is_smooth():
    # continuity: halving the grid step roughly halves the largest jump
    coarse = amplitude_vs_V(np.linspace(0, 3, 13), P2).values()
    fine = amplitude_vs_V(np.linspace(0, 3, 25), P2).values()
    assert np.all(np.isfinite(fine))
    assert np.max(np.abs(np.diff(fine))) < 0.65 * np.max(np.abs(np.diff(coarse)))


def test_fidelity_against_time_rises_then_saturates():
    res = fidelity_vs_gate_time((0.3, 0.6, 0.7, 1.0), P2)
    f = dict(zip(res.column("t_total_us"), res.values()))
    assert f[0.6] >= 0.97
    assert f[0.3] < f[0.6]
    assert abs(f[1.0] - f[0.7]) < 0.01


def test_more_qubits_lower_fidelity():
    from conftest import default_channel

    f = [
        average_fidelity(default_channel(n), ideal_gate(n, np.pi)) for n in (2, 3, 4)
    ]
    assert f[2] <= f[1] <= f[0]


def test_rabi_sweep_baseline_and_zeta_symmetry():
    res = rabi_error_sweep((0.0,), (-0.1, 0.0, 0.1), P2)
    base = fidelity_vs_gate_time((0.6,), P2).values()[0]
    f = dict(zip(res.column("zeta"), res.values()))
    assert f[0.0] == base
    assert abs(f[0.1] - f[-0.1]) < 0.01
    assert len(res.rows) == 3


def test_position_sweep_plateau_and_degradation():
    res = position_sweep((5.7, 6.0, 6.3, 12.0), P2)
    f = dict(zip(res.column("l_um"), res.values()))
    assert abs(f[5.7] - f[6.0]) < 0.005
    assert abs(f[6.3] - f[6.0]) < 0.005
    ratio = interaction_strength(12.0, 126) / (3 * P2.omega0)
    assert ratio == pytest.approx(1.47, abs=0.01)
    assert f[12.0] < f[6.0] - 0.05


def test_knobs_feed_the_schedule():
    sch = PulseKnobs(t_total=0.8, sigma_frac=0.1, delta_frac=0.7).schedule(P2)
    assert sch.total_time == pytest.approx(0.8)
