"""Command-line entry point: one subcommand per reproduced figure.

Exit codes: 0 success, 1 configuration or I/O error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy
import tomli_w

from . import __version__
from .analysis import (
    SweepResult,
    amplitude_vs_omega_c,
    amplitude_vs_V,
    blockade_argmax,
    blockade_sweep,
    fidelity_vs_gate_time,
    position_sweep,
    rabi_error_sweep,
    write_csv,
)
from .atoms import C6_AU_TO_GHZ_UM6, MHZ, c6_atomic_units, interaction_strength
from .config import ConfigError, RunConfig, load_config
from .dynamics import IntegrationError
from .grover import GroverConfig, grover_vs_gate_time, optimal_iterations, run_grover

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2


def _parse_value(text: str):
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    if "," in text:
        return [float(x) for x in text.split(",") if x]
    return text


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML file layered over the shipped defaults")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE", help="override one config key")
    common.add_argument("--out", type=Path, help="CSV path (default: <output_dir>/<command>.csv)")
    common.add_argument("--threads", type=int, help="worker processes for sweep points")
    common.add_argument("--qubits", type=int, choices=(2, 3, 4))

    ap = argparse.ArgumentParser(prog="dstirap", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    c6 = sub.add_parser("c6", parents=[common], help="C6 coefficient and blockade shift")
    c6.add_argument("--n", type=int, help="principal quantum number")
    c6.add_argument("--l", type=float, help="interatomic distance in um")

    am = sub.add_parser("amplitudes", parents=[common], help="Re amplitude against Omega_c or V")
    am.add_argument("--axis", choices=("omega-c", "v"), default="omega-c")
    am.add_argument("--values", type=_floats, help="grid in units of Omega_0")

    fv = sub.add_parser("fidelity-vs-time", parents=[common], help="gate fidelity against gate time")
    fv.add_argument("--t-min", type=float)
    fv.add_argument("--t-max", type=float)
    fv.add_argument("--points", type=int)

    rs = sub.add_parser("rabi-sweep", parents=[common], help="fidelity over control/target Rabi errors")
    rs.add_argument("--xi", type=_floats)
    rs.add_argument("--zeta", type=_floats)

    bs = sub.add_parser("blockade-sweep", parents=[common], help="fidelity against V for several Omega_c")
    bs.add_argument("--v-min", type=float)
    bs.add_argument("--v-max", type=float)
    bs.add_argument("--points", type=int)
    bs.add_argument("--omega-c-ratios", type=_floats)

    ps = sub.add_parser("position-sweep", parents=[common], help="fidelity against interatomic distance")
    ps.add_argument("--l-min", type=float)
    ps.add_argument("--l-max", type=float)
    ps.add_argument("--points", type=int)

    gr = sub.add_parser("grover", parents=[common], help="Grover search success probability")
    gr.add_argument("--ideal", action="store_true", help="use the ideal gate instead of the simulated channel")
    gr.add_argument("--iterations", type=int)
    gr.add_argument("--t-min", type=float)
    gr.add_argument("--t-max", type=float)
    gr.add_argument("--points", type=int)
    return ap


def _overrides(args) -> dict:
    out = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set {item!r}: expected SECTION.KEY=VALUE")
        out[key.strip()] = _parse_value(value.strip())
    if args.qubits is not None:
        out["run.qubits"] = args.qubits
    if args.threads is not None:
        out["run.threads"] = args.threads
    flag_map = {
        "fidelity-vs-time": {"t_min": "sweep.t_min_us", "t_max": "sweep.t_max_us", "points": "sweep.t_points"},
        "grover": {"t_min": "sweep.t_min_us", "t_max": "sweep.t_max_us", "points": "sweep.t_points"},
        "blockade-sweep": {
            "v_min": "sweep.blockade_v_min",
            "v_max": "sweep.blockade_v_max",
            "points": "sweep.blockade_v_points",
            "omega_c_ratios": "sweep.blockade_omega_c_ratios",
        },
        "position-sweep": {"l_min": "sweep.l_min_um", "l_max": "sweep.l_max_um", "points": "sweep.l_points"},
        "rabi-sweep": {"xi": "sweep.xi_values", "zeta": "sweep.zeta_values"},
        "c6": {"n": "geometry.principal_n", "l": "geometry.l_um"},
    }
    if args.command == "amplitudes" and args.values is not None:
        out["sweep.omega_c_ratios" if args.axis == "omega-c" else "sweep.v_over_omega0"] = args.values
    for attr, key in flag_map.get(args.command, {}).items():
        value = getattr(args, attr, None)
        if value is not None:
            out[key] = value
    return out


def _grid(lo, hi, n):
    return list(np.linspace(lo, hi, n)) if n > 1 else [lo]


def _run_c6(cfg: RunConfig, out: Path) -> dict:
    n, l = cfg.geometry.principal_n, cfg.geometry.l_um
    c6_au = c6_atomic_units(n)
    v = interaction_strength(l, n)
    omega_c = cfg.physics.omega_c_ratio * cfg.physics.omega0_mhz * MHZ
    info = {
        "principal_n": n,
        "l_um": l,
        "c6_au": c6_au,
        "c6_ghz_um6": c6_au * C6_AU_TO_GHZ_UM6,
        "v_mhz": v / MHZ,
        "v_over_omega_c": v / omega_c if omega_c else float("inf"),
    }
    print(f"C6 = {info['c6_au']:.6e} a.u. = {info['c6_ghz_um6']:.6e} GHz um^6")
    print(f"V/2pi = {info['v_mhz']:.6g} MHz at l = {l} um, N = {n}")
    print(f"V/Omega_c = {info['v_over_omega_c']:.4f}")
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(info))
        w.writerow([format(float(x), ".17g") for x in info.values()])
    return info


def _execute(args, cfg: RunConfig, out: Path) -> dict:
    p = cfg.physics_params()
    knobs = cfg.knobs()
    icfg = cfg.integrator_config()
    sw = cfg.sweep
    workers = cfg.run.threads
    cmd = args.command
    if cmd == "c6":
        return _run_c6(cfg, out)
    if cmd == "amplitudes":
        if args.axis == "omega-c":
            res = amplitude_vs_omega_c(sw.omega_c_ratios, p, knobs, icfg, workers)
        else:
            res = amplitude_vs_V(sw.v_over_omega0, p, knobs, icfg, workers)
        return _finish(res, out)
    if cmd == "fidelity-vs-time":
        res = fidelity_vs_gate_time(_grid(sw.t_min_us, sw.t_max_us, sw.t_points), p, knobs, icfg, workers)
        return _finish(res, out)
    if cmd == "rabi-sweep":
        return _finish(rabi_error_sweep(sw.xi_values, sw.zeta_values, p, knobs, icfg, workers), out)
    if cmd == "blockade-sweep":
        vs = _grid(sw.blockade_v_min, sw.blockade_v_max, sw.blockade_v_points)
        res = blockade_sweep(vs, sw.blockade_omega_c_ratios, p, knobs, icfg, workers)
        info = _finish(res, out)
        best = blockade_argmax(res)
        for r, v in best.items():
            print(f"Omega_c = {r:g} Omega_0: best V = {v:g} Omega_0")
        info["argmax_v_over_omega0"] = {f"{r:g}": v for r, v in best.items()}
        return info
    if cmd == "position-sweep":
        ls = _grid(sw.l_min_um, sw.l_max_um, sw.l_points)
        res = position_sweep(ls, p, knobs, icfg, cfg.geometry.principal_n, cfg.geometry.include_cc, workers)
        return _finish(res, out)
    if cmd == "grover":
        n = cfg.run.qubits
        iters = optimal_iterations(n) if args.iterations is None else args.iterations
        if args.ideal:
            rows = tuple((float(k), run_grover(GroverConfig(n, k))) for k in range(iters + 1))
            res = SweepResult(("iterations",), "success_probability", rows)
            print(f"{rows[-1][1]:.4f}")
            write_csv(res, out)
            return {"rows": len(rows), "success_probability": rows[-1][1]}
        res = grover_vs_gate_time(_grid(sw.t_min_us, sw.t_max_us, sw.t_points), p, knobs, icfg, iters, workers)
        return _finish(res, out)
    raise ConfigError(f"unknown command {cmd!r}")


def _finish(res: SweepResult, out: Path) -> dict:
    write_csv(res, out)
    for row in res.rows:
        print(",".join(f"{x:.6g}" for x in row))
    return {"rows": len(res.rows)}


def _write_manifest(path: Path, cfg: RunConfig, args, info: dict, wall: float, argv):
    meta = {
        "tool": "dstirap",
        "version": __version__,
        "command": args.command,
        "argv": list(argv),
        "csv": str(path.with_suffix(".csv").name),
        "wall_time_s": wall,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "omega_c_over_omega0": cfg.physics.omega_c_ratio,
        "result": _tomlable(info),
    }
    doc = cfg.to_dict()
    doc["manifest"] = meta
    path.write_text(tomli_w.dumps(doc), encoding="utf-8")


def _tomlable(obj):
    if isinstance(obj, dict):
        return {str(k): _tomlable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_tomlable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, _overrides(args))
        out = args.out or Path(cfg.run.output_dir) / f"{args.command}.csv"
        start = time.perf_counter()
        info = _execute(args, cfg, out)
        _write_manifest(out.with_suffix(".manifest.toml"), cfg, args, info, time.perf_counter() - start, argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
