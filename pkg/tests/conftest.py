import functools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dstirap.atoms import cesium_params
from dstirap.hamiltonian import make_spec
from dstirap.pulses import build_schedule

settings.register_profile(
    "default", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def schedule_for(p, t_total=0.6, **kw):
    return build_schedule(p.omega0, p.omega_r, p.gamma_phase, t_total, **kw)


def spec_for(p, t_total=0.6, isolation=True, **kw):
    return make_spec(p, schedule_for(p, t_total, **kw), isolation)


@functools.lru_cache(maxsize=None)
def default_channel(n_qubits: int, t_total: float = 0.6):
    """Realised channel at the default Cs parameters, computed once per session."""
    from dstirap.gates import extract_channel

    return extract_channel(spec_for(cesium_params(n_qubits), t_total))


def basis_ket(spec, *levels):
    psi = np.zeros(spec.space.dim, dtype=complex)
    psi[spec.space.index(*levels)] = 1.0
    return psi


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
