"""Run configuration: TOML tables in laboratory units, converted on load.

Every key must be known; a typo is an error rather than a silently ignored
setting. A run manifest carries the full resolved configuration plus a
``[manifest]`` table of metadata, and loads back as a configuration.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .atoms import MHZ, PRESET_FOR_QUBITS, PhysicsParams, preset_geometry
from .analysis import PulseKnobs
from .dynamics import IntegratorConfig


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


@dataclass(frozen=True)
class RunSection:
    qubits: int = 2
    threads: int = 1
    output_dir: str = "results"


@dataclass(frozen=True)
class PhysicsSection:
    omega0_mhz: float = 44.0
    omega_r_mhz: float = 44.0
    omega_c_ratio: float = 3.0
    delta_mhz: float = 0.0
    gamma_phase_rad: float = math.pi
    rydberg_lifetime_us: float = 540.0
    e1_lifetime_us: float = 0.13754
    e2_lifetime_us: float = 0.16521
    xi: float = 0.0
    zeta: float = 0.0
    decay: bool = True


@dataclass(frozen=True)
class GeometrySection:
    preset: str = "auto"
    l_um: float = 6.0
    principal_n: int = 126
    include_cc: bool = False


@dataclass(frozen=True)
class PulseSection:
    t_total_us: float = 0.6
    sigma_frac: float = 0.12
    delta_frac: float = 0.75


@dataclass(frozen=True)
class IntegratorSection:
    method: str = "magnus"
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    magnus_step_us: float = 5e-4


@dataclass(frozen=True)
class SweepSection:
    t_min_us: float = 0.2
    t_max_us: float = 1.0
    t_points: int = 17
    omega_c_ratios: list = field(default_factory=lambda: [0.0, 1.0, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0])
    v_over_omega0: list = field(default_factory=lambda: [0.0, 1.0, 3.0, 6.0, 10.0, 30.0])
    blockade_omega_c_ratios: list = field(default_factory=lambda: [3.0, 4.0, 5.0])
    blockade_v_min: float = 1.0
    blockade_v_max: float = 30.0
    blockade_v_points: int = 30
    xi_values: list = field(default_factory=lambda: [-0.1, 0.0, 0.1])
    zeta_values: list = field(default_factory=lambda: [-0.1, 0.0, 0.1])
    l_min_um: float = 5.4
    l_max_um: float = 12.0
    l_points: int = 12


SECTIONS = {
    "run": RunSection,
    "physics": PhysicsSection,
    "geometry": GeometrySection,
    "pulse": PulseSection,
    "integrator": IntegratorSection,
    "sweep": SweepSection,
}


@dataclass(frozen=True)
class RunConfig:
    run: RunSection = RunSection()
    physics: PhysicsSection = PhysicsSection()
    geometry: GeometrySection = GeometrySection()
    pulse: PulseSection = PulseSection()
    integrator: IntegratorSection = IntegratorSection()
    sweep: SweepSection = field(default_factory=SweepSection)

    def __post_init__(self):
        _validate(self)

    # ---- conversions -----------------------------------------------------

    def geometry_preset(self) -> str:
        g = self.geometry.preset
        return PRESET_FOR_QUBITS[self.run.qubits] if g == "auto" else g

    def physics_params(self) -> PhysicsParams:
        ph = self.physics
        geo = preset_geometry(self.geometry_preset(), self.geometry.l_um, self.geometry.principal_n, self.geometry.include_cc)
        omega0 = ph.omega0_mhz * MHZ
        p = PhysicsParams(
            omega0=omega0,
            omega_r=ph.omega_r_mhz * MHZ,
            omega_c=ph.omega_c_ratio * omega0,
            delta=ph.delta_mhz * MHZ,
            gamma_phase=ph.gamma_phase_rad,
            gamma_r=_rate(ph.rydberg_lifetime_us),
            gamma_R=_rate(ph.rydberg_lifetime_us),
            gamma_e1=_rate(ph.e1_lifetime_us),
            gamma_e2=_rate(ph.e2_lifetime_us),
            v_ct=geo.v_ct(),
            v_cc=geo.v_cc(),
            xi=ph.xi,
            zeta=ph.zeta,
        )
        return p if ph.decay else p.without_decay()

    def knobs(self) -> PulseKnobs:
        return PulseKnobs(self.pulse.t_total_us, self.pulse.sigma_frac, self.pulse.delta_frac)

    def integrator_config(self) -> IntegratorConfig:
        i = self.integrator
        return IntegratorConfig(rel_tol=i.rel_tol, abs_tol=i.abs_tol, method=i.method, magnus_step=i.magnus_step_us)

    def to_dict(self) -> dict:
        return {name: asdict(getattr(self, name)) for name in SECTIONS}

    def with_overrides(self, overrides: dict) -> "RunConfig":
        return from_dict(_merge(self.to_dict(), overrides))


def _rate(lifetime_us: float) -> float:
    return 0.0 if math.isinf(lifetime_us) else 1.0 / lifetime_us


def _validate(cfg: RunConfig):
    def need(ok, key, msg):
        if not ok:
            raise ConfigError(f"{key}: {msg}")

    need(cfg.run.qubits in PRESET_FOR_QUBITS, "run.qubits", "must be 2, 3 or 4")
    need(cfg.run.threads >= 1, "run.threads", "must be at least 1")
    ph = cfg.physics
    for k in ("omega0_mhz", "omega_r_mhz"):
        need(getattr(ph, k) > 0, f"physics.{k}", "must be positive")
    need(ph.omega_c_ratio >= 0, "physics.omega_c_ratio", "must be non-negative")
    for k in ("rydberg_lifetime_us", "e1_lifetime_us", "e2_lifetime_us"):
        need(getattr(ph, k) > 0, f"physics.{k}", "must be positive (inf disables the channel)")
    for k in ("xi", "zeta"):
        need(-1 < getattr(ph, k) < 1, f"physics.{k}", "must lie in (-1, 1)")
    g = cfg.geometry
    need(g.preset in ("auto", "pair", "chain3", "star4"), "geometry.preset", "unknown preset")
    if g.preset != "auto":
        need(PRESET_FOR_QUBITS[cfg.run.qubits] == g.preset, "geometry.preset", f"does not hold {cfg.run.qubits} atoms")
    need(g.l_um > 0, "geometry.l_um", "must be positive")
    need(g.principal_n >= 1, "geometry.principal_n", "must be at least 1")
    pu = cfg.pulse
    t_pi = 1.0 / ph.omega_r_mhz
    need(pu.t_total_us > 2 * t_pi, "pulse.t_total_us", f"must exceed two pi-pulse durations ({2 * t_pi:.4g} us)")
    need(pu.sigma_frac > 0, "pulse.sigma_frac", "must be positive")
    need(pu.delta_frac > 0, "pulse.delta_frac", "must be positive")
    need(pu.sigma_frac * pu.delta_frac < 0.25, "pulse.delta_frac", "pulse centres leave the window")
    it = cfg.integrator
    need(it.method in ("magnus", "rk45"), "integrator.method", "must be 'magnus' or 'rk45'")
    for k in ("rel_tol", "abs_tol", "magnus_step_us"):
        need(getattr(it, k) > 0, f"integrator.{k}", "must be positive")
    sw = cfg.sweep
    for k in ("t_points", "blockade_v_points", "l_points"):
        need(getattr(sw, k) >= 1, f"sweep.{k}", "must be at least 1")
    need(sw.t_max_us >= sw.t_min_us > 2 * t_pi, "sweep.t_min_us", "need 2 t_pi < t_min <= t_max")
    need(sw.blockade_v_max >= sw.blockade_v_min >= 0, "sweep.blockade_v_min", "need 0 <= v_min <= v_max")
    need(sw.l_max_um >= sw.l_min_um > 0, "sweep.l_min_um", "need 0 < l_min <= l_max")


def _coerce(section: str, key: str, value, template):
    name = f"{section}.{key}"
    if isinstance(template, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{name}: expected true/false, got {value!r}")
        return value
    if isinstance(template, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{name}: expected an integer, got {value!r}")
        return value
    if isinstance(template, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name}: expected a number, got {value!r}")
        return float(value)
    if isinstance(template, str):
        if not isinstance(value, str):
            raise ConfigError(f"{name}: expected a string, got {value!r}")
        return value
    if isinstance(template, list):
        if not isinstance(value, list) or not value or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        ):
            raise ConfigError(f"{name}: expected a non-empty list of numbers")
        return [float(v) for v in value]
    raise ConfigError(f"{name}: unsupported value")


def from_dict(data: dict) -> RunConfig:
    parts = {}
    for section, body in data.items():
        if section == "manifest":
            continue
        if section not in SECTIONS:
            raise ConfigError(f"{section}: unknown section")
        if not isinstance(body, dict):
            raise ConfigError(f"{section}: expected a table")
        cls = SECTIONS[section]
        defaults = cls()
        known = {f.name for f in fields(cls)}
        kw = {}
        for key, value in body.items():
            if key not in known:
                raise ConfigError(f"{section}.{key}: unknown key")
            kw[key] = _coerce(section, key, value, getattr(defaults, key))
        parts[section] = replace(defaults, **kw)
    return RunConfig(**parts)


def _merge(base: dict, overrides: dict) -> dict:
    out = {k: dict(v) for k, v in base.items()}
    for dotted, value in overrides.items():
        section, _, key = dotted.partition(".")
        if not key:
            raise ConfigError(f"{dotted}: expected section.key")
        out.setdefault(section, {})[key] = value
    return out


def default_config() -> RunConfig:
    text = resources.files("dstirap").joinpath("defaults.toml").read_text(encoding="utf-8")
    return from_dict(tomllib.loads(text))


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Shipped defaults, then the file at ``path``, then ``overrides``."""
    base = default_config().to_dict()
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        data.pop("manifest", None)
        for section, body in data.items():
            if section not in SECTIONS:
                raise ConfigError(f"{section}: unknown section")
            if not isinstance(body, dict):
                raise ConfigError(f"{section}: expected a table")
            for key in body:
                if key not in {f.name for f in fields(SECTIONS[section])}:
                    raise ConfigError(f"{section}.{key}: unknown key")
            base[section].update(body)
    return from_dict(_merge(base, overrides or {}))
