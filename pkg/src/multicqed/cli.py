"""Command-line driver: config file or preset in, CSV time series out.

Exit status is 0 on success, 2 for configuration errors and 3 for numerical
failures (non-Hermitian H, Jacobi non-convergence, eigen-residual or drift
above tolerance).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from . import entanglement as ent
from . import observables as obs
from .config import RunSpec, load_config, load_preset, preset_names
from .hamiltonian import HermiticityError, build_full
from .hilbert import ConfigError
from .jacobi import JacobiConvergenceError
from .propagator import EigenResidualError, diagonalize, evolve_series
from .units import UnitError, parse_quantity

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

NORM_TOL = 1e-9
ENERGY_RTOL = 1e-8


class NumericalError(ArithmeticError):
    pass


@dataclass
class RunResult:
    spec: RunSpec
    times: np.ndarray
    tau: np.ndarray
    columns: dict[str, np.ndarray]
    diagnostics: dict[str, object] = field(default_factory=dict)


def _column_values(spec: RunSpec, col, phi: np.ndarray):
    config = spec.config
    if col.kind == "level":
        return obs.level_probability(config, phi, *col.args)
    if col.kind == "level_group":
        n, levels = col.args
        probs = obs.level_probabilities(config, phi, n)
        return float(sum(probs[lv - 1] for lv in levels))
    if col.kind == "state":
        return obs.state_probability(config, phi, col.args[0])
    if col.kind == "photons":
        return obs.expected_photon_number(config, phi, *col.args)
    if col.kind == "annihilation":
        return obs.expect_annihilation(config, phi, *col.args)
    if col.kind == "ladder":
        return obs.expect_ladder(config, phi, *col.args)
    if col.kind == "commutator":
        return obs.expect_ladder_commutator(config, phi, *col.args)
    if col.kind == "concurrence":
        return ent.concurrence(config, phi, col.args[0])
    raise ValueError(f"unknown column kind {col.kind!r}")


def simulate(spec: RunSpec, *, check: bool = True) -> RunResult:
    """Diagonalize, propagate over the grid and evaluate every column.

    With ``check`` set, norm drift above ``1e-9`` or relative energy drift
    above ``1e-8`` raises :class:`NumericalError`.
    """
    h = build_full(spec.config)
    prop = diagonalize(h)
    times = spec.grid.times()
    states = evolve_series(prop, spec.initial, times)

    columns: dict[str, np.ndarray] = {}
    complex_cols = {"annihilation", "ladder"}
    for col in spec.columns:
        values = np.array([_column_values(spec, col, phi) for phi in states])
        if col.kind in complex_cols:
            columns[f"Re_{col.name}"] = values.real
            columns[f"Im_{col.name}"] = values.imag
            columns[f"abs_{col.name}"] = np.abs(values)
            columns[f"phase_{col.name}"] = obs.unwrap_phase(values)
        else:
            columns[col.name] = values.real.astype(float)
    norms = np.array([np.vdot(phi, phi).real for phi in states])
    columns["norm"] = norms
    energies = np.array([np.vdot(phi, h @ phi).real for phi in states])

    e0 = energies[0]
    scale = max(abs(e0), float(np.max(np.abs(h))) if h.size else 0.0, np.finfo(float).tiny)
    diagnostics = {
        "dimension": prop.dimension,
        "rwa": spec.config.rwa,
        "jacobi_sweeps": prop.sweeps,
        "eigen_residual": prop.residual(h),
        "unitarity_error": prop.unitarity_error(),
        "norm_drift": float(np.max(np.abs(norms - 1.0))),
        "energy_drift": float(np.max(np.abs(energies - e0)) / scale),
        "energy": float(e0),
    }
    if check:
        if diagnostics["norm_drift"] > NORM_TOL:
            raise NumericalError(f"norm drift {diagnostics['norm_drift']:.3e} exceeds {NORM_TOL:g}")
        if diagnostics["energy_drift"] > ENERGY_RTOL:
            raise NumericalError(
                f"energy drift {diagnostics['energy_drift']:.3e} exceeds {ENERGY_RTOL:g}"
            )
    return RunResult(spec, times, spec.grid.normalized(), columns, diagnostics)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(result: RunResult, fh: IO[str]) -> None:
    """Commented metadata header, one header row, then one row per time."""
    spec = result.spec
    omega = spec.grid.omega_ref
    lines = [
        f"# run: {spec.name}",
        f"# description: {' '.join(spec.description.split())}" if spec.description else None,
        f"# initial: {spec.initial_description}",
        f"# t_max_s: {_fmt(float(spec.grid.t_end))}",
        f"# steps: {spec.grid.steps}",
        f"# omega_ref_rad_s: {_fmt(float(omega)) if omega is not None else 'none'}",
        "# tau: omega_ref * time",
    ]
    lines += [f"# {k}: {_fmt(v)}" for k, v in result.diagnostics.items()]
    lines += [f"# meta.{k}: {' '.join(str(v).split())}" for k, v in sorted(spec.metadata.items())]
    for line in lines:
        if line is not None:
            fh.write(line + "\n")
    names = ["time", "tau", *result.columns]
    fh.write(",".join(names) + "\n")
    data = [result.times, result.tau, *result.columns.values()]
    for row in zip(*data):
        fh.write(",".join(format(float(x), ".16e") for x in row) + "\n")


def read_csv(path) -> tuple[dict[str, str], dict[str, np.ndarray]]:
    """Parse a CSV written by :func:`write_csv` into (metadata, columns)."""
    meta: dict[str, str] = {}
    with open(path) as fh:
        line = fh.readline()
        while line.startswith("#"):
            key, _, value = line[1:].strip().partition(": ")
            meta[key] = value
            line = fh.readline()
        names = line.strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return meta, {name: data[:, a] for a, name in enumerate(names)}


def list_presets() -> str:
    """One block per preset: name, description and coupling-to-mode ratios."""
    out = []
    for name in preset_names():
        spec = load_preset(name)
        config = spec.config
        omega = spec.grid.omega_ref
        out.append(f"{name}: {' '.join(spec.description.split())}")
        out.append(f"    dimension {config.indexer.size}, rwa {_fmt(config.rwa)}")
        if omega and config.field_couplings:
            e_names = config.emitter_names()
            ratios = []
            for (n, i, j, nu), kappa in config.field_couplings.items():
                em = config.emitters[n]
                ratios.append((abs(kappa) / omega, f"{e_names[n]}:{em.level_label(i)}-{em.level_label(j)}"))
            shown = {}
            for r, label in ratios:
                shown.setdefault(label, r)
            parts = ", ".join(f"{label} {r:.2g}" for label, r in shown.items())
            out.append(f"    G/omega_ref = {max(r for r, _ in ratios):.2g} (max); {parts}")
    return "\n".join(out) + "\n"


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multicqed", description="Exact time evolution of multipartite cavity-QED systems."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="propagate a configuration and write CSV")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="YAML run file")
    src.add_argument("--preset", help="name of a shipped preset")
    run.add_argument("--t-max", help='end time with unit, e.g. "2 ps"')
    run.add_argument("--steps", type=int, help="number of time steps (grid has steps + 1 points)")
    run.add_argument(
        "--rwa", nargs="?", const=True, type=_bool, default=None,
        help="rotating-wave approximation (bare flag means true)",
    )
    run.add_argument(
        "--bipartition", help="comma-separated partitions forming subsystem A for the concurrence"
    )
    run.add_argument("--output", "-o", help="CSV path (default: stdout)")
    run.add_argument("--quiet", "-q", action="store_true", help="no summary on stderr")
    run.add_argument("--lenient", action="store_true", help="ignore unknown config keys")

    check = sub.add_parser("check", help="validate a configuration without running it")
    check.add_argument("config")

    sub.add_parser("list-presets", help="list shipped presets")
    return parser


def _load(args) -> RunSpec:
    if args.preset:
        spec = load_preset(args.preset)
    else:
        spec = load_config(args.config, strict=not args.lenient)
    t_max = None
    if args.t_max is not None:
        try:
            t_max = float(parse_quantity(args.t_max, "time"))
        except UnitError as exc:
            raise ConfigError(f"--t-max: {exc}") from None
        if not t_max > 0:
            raise ConfigError("--t-max: must be positive")
    if args.steps is not None and args.steps < 1:
        raise ConfigError("--steps: must be at least 1")
    bip = None
    if args.bipartition:
        bip = [p.strip() for p in args.bipartition.split(",") if p.strip()]
        names = spec.config.partition_names()
        if not bip or len(set(bip)) >= len(names):
            raise ConfigError("--bipartition: subsystem A must be a nonempty proper subset")
    return spec.with_overrides(t_max=t_max, steps=args.steps, rwa=args.rwa, bipartition=bip)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-presets":
        sys.stdout.write(list_presets())
        return EXIT_OK
    try:
        if args.command == "check":
            spec = load_config(args.config)
            print(f"{args.config}: ok, dimension {spec.config.indexer.size}")
            return EXIT_OK
        spec = _load(args)
        output = args.output or spec.output
        result = simulate(spec)
    except (ConfigError, UnitError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (HermiticityError, JacobiConvergenceError, EigenResidualError, NumericalError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if output:
        with open(output, "w", newline="") as fh:
            write_csv(result, fh)
    else:
        write_csv(result, sys.stdout)
    if not args.quiet:
        d = result.diagnostics
        print(
            f"{spec.name}: dimension {d['dimension']}, {len(result.times)} points, "
            f"residual {d['eigen_residual']:.2e}, norm drift {d['norm_drift']:.2e}",
            file=sys.stderr,
        )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
