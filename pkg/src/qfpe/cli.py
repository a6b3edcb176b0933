"""Command-line entry point: ``qfpe run | gatecount | eigencheck | dump-circuit``.

Exit codes: 0 success, 1 eigencheck deviation above tolerance, 2 usage or
config error, 3 simulator cap exceeded, 4 numerical-consistency failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
import typing
from pathlib import Path

from . import spectral
from .circuit import diffusion_circuit, drift_circuit, dumps_circuit, gate_count_report, prediction_circuit, qft_circuit
from .grid import build_grid
from .errors import InvalidArgumentError, NumericalConsistencyError, QfpeError, SimulatorCapError
from .scenario import PRESETS, ScenarioConfig, run_scenario, write_artifacts

log = logging.getLogger("qfpe")

OUTPUT_ENV = "QFPE_OUTPUT_DIR"
EIGEN_TOL = 1e-10

EXIT_OK, EXIT_DEVIATION, EXIT_USAGE, EXIT_CAP, EXIT_NUMERIC = 0, 1, 2, 3, 4


class ConfigError(QfpeError):
    pass


_FIELD_TYPES = typing.get_type_hints(ScenarioConfig)


def _convert(key: str, raw: str):
    if key not in _FIELD_TYPES:
        raise ConfigError(f"unknown config key {key!r}")
    kind = _FIELD_TYPES[key]
    if typing.get_origin(kind) is typing.Union:
        kind = next(a for a in typing.get_args(kind) if a is not type(None))
        if raw.strip().lower() in ("", "none"):
            return None
    raw = raw.strip()
    try:
        if kind is bool:
            lowered = raw.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"cannot parse {key}={raw!r} as {kind.__name__}") from exc


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, raw = line.split("=", 1)
        key = key.strip()
        values[key] = _convert(key, raw)
    if not values:
        raise ConfigError("config file has no entries")
    return values


def parse_overrides(tokens: list[str]) -> dict:
    """``--key value`` / ``--key=value`` pairs; dashes in keys map to underscores."""
    values = {}
    it = iter(tokens)
    for tok in it:
        if not tok.startswith("--"):
            raise ConfigError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, raw = key.split("=", 1)
        else:
            raw = next(it, None)
            if raw is None:
                raise ConfigError(f"missing value for --{key}")
        key = key.replace("-", "_")
        values[key] = _convert(key, raw)
    return values


def build_config(args, extra: list[str]) -> ScenarioConfig:
    if args.config is None and args.preset is None and not extra:
        raise ConfigError("no configuration given; use --config FILE, --preset NAME or --key value overrides")
    values = dict(PRESETS[args.preset]) if args.preset else {}
    if args.config is not None:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        values.update(parse_config_text(text))
    values.update(parse_overrides(extra))
    if os.environ.get(OUTPUT_ENV):
        values["output"] = os.environ[OUTPUT_ENV]
    return ScenarioConfig(**values)


def _cmd_run(args, extra) -> int:
    cfg = build_config(args, extra)
    result = run_scenario(cfg)
    write_artifacts(result, cfg.output)
    for key, value in result.metrics.as_dict().items():
        print(f"{key}={value}")
    return EXIT_OK


def _sweep_lines(lo: int, hi: int, dt: float, q: float, delta_x: float, v_min: float, v_max: float) -> list[str]:
    lines = ["n_x,n_v,H,CP,SWAP,DIAG,CDIAG,total_gates,model_cost,diagonal_entries"]
    for n_x in range(lo, hi + 1):
        for n_v in range(lo, hi + 1):
            rep = gate_count_report(prediction_circuit(build_grid(n_x, n_v, delta_x, 0.0, v_min, v_max), dt, q))
            c = rep.counts
            lines.append(f"{n_x},{n_v},{c['H']},{c['CP']},{c['SWAP']},{c['DIAG']},{c['CDIAG']},"
                         f"{rep.total_gates},{rep.model_cost},{rep.diagonal_entries}")
    return lines


def _cmd_gatecount(args, extra) -> int:
    cfg = build_config(args, extra).resolved()
    rep = gate_count_report(prediction_circuit(cfg.grid, cfg.dt, cfg.q))
    print(f"# prediction circuit n_x={cfg.n_x} n_v={cfg.n_v}")
    for line in rep.as_lines():
        print(line)
    print(f"# sweep n_x, n_v in [{args.sweep_min}, {args.sweep_max}]")
    for line in _sweep_lines(args.sweep_min, args.sweep_max, cfg.dt, cfg.q, cfg.delta_x, cfg.v_min, cfg.v_max):
        print(line)
    return EXIT_OK


def eigencheck_report(sizes: list[int], delta_x: float = 1.0, delta_v: float = 1.0) -> list[tuple[int, float, float, float]]:
    """Rows ``(N, err_dx, err_dvv, err_shift)`` of diagonalization residuals."""
    rows = []
    for N in sizes:
        err_dx = spectral.diagonalization_error(spectral.dx_matrix(N, delta_x), spectral.dx_eigenvalues(N, delta_x))
        err_dvv = spectral.diagonalization_error(spectral.dvv_matrix(N, delta_v), spectral.dvv_eigenvalues(N, delta_v))
        err_s = spectral.diagonalization_error(spectral.shift_matrix(N, "minus"), spectral.shift_eigenvalues(N, "minus"))
        rows.append((N, err_dx, err_dvv, err_s))
    return rows


def _cmd_eigencheck(args, extra) -> int:
    if extra:
        raise ConfigError(f"unexpected arguments {extra}")
    for N in args.sizes:
        if N < 2:
            raise ConfigError(f"size must be >= 2, got {N}")
        if N & (N - 1):
            log.warning("N=%d is not a power of two; fine for circulant algebra, not mappable to a register", N)
    worst = 0.0
    print("N,max_dev_dx,max_dev_dvv,max_dev_shift")
    for N, a, b, c in eigencheck_report(args.sizes, args.delta_x, args.delta_v):
        print(f"{N},{a:.3e},{b:.3e},{c:.3e}")
        worst = max(worst, a, b, c)
    return EXIT_OK if worst <= EIGEN_TOL else EXIT_DEVIATION


def _cmd_dump(args, extra) -> int:
    cfg = build_config(args, extra).resolved()
    grid = cfg.grid
    if args.which == "prediction":
        circ = prediction_circuit(grid, cfg.dt, cfg.q)
    elif args.which == "drift":
        circ = drift_circuit(grid, cfg.dt)
    elif args.which == "diffusion":
        circ = diffusion_circuit(grid, cfg.q, cfg.dt)
    else:
        circ = qft_circuit(range(grid.n_x), n_qubits=grid.n_qubits)
    text = dumps_circuit(circ)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--preset", choices=sorted(PRESETS), help="scenario preset")


def make_parser() -> argparse.ArgumentParser:
    keys = ", ".join(f.name for f in dataclasses.fields(ScenarioConfig))
    parser = argparse.ArgumentParser(
        prog="qfpe",
        description="Quantum vs. classical Fokker-Planck prediction on a position-velocity grid.",
        epilog=f"Config keys (usable as --key value overrides): {keys}. "
               f"Env {OUTPUT_ENV} overrides the output directory.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario and write marginals, metrics, spectra and gate counts")
    _add_config_args(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("gatecount", help="gate counts for the prediction circuit plus an (n_x, n_v) sweep")
    _add_config_args(p)
    p.add_argument("--sweep-min", type=int, default=1)
    p.add_argument("--sweep-max", type=int, default=8)
    p.set_defaults(func=_cmd_gatecount)

    p = sub.add_parser("eigencheck", help="verify Fourier diagonalization of the circulant operators")
    p.add_argument("sizes", nargs="*", type=int, default=[4, 8, 16, 32, 64])
    p.add_argument("--delta-x", type=float, default=1.0)
    p.add_argument("--delta-v", type=float, default=1.0)
    p.set_defaults(func=_cmd_eigencheck)

    p = sub.add_parser("dump-circuit", help="write the plain-text circuit dump")
    _add_config_args(p)
    p.add_argument("--which", choices=["prediction", "drift", "diffusion", "qft"], default="prediction")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=_cmd_dump)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args, extra = parser.parse_known_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args, extra)
    except (ConfigError, InvalidArgumentError) as exc:
        print(f"qfpe: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SimulatorCapError as exc:
        print(f"qfpe: error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except NumericalConsistencyError as exc:
        print(f"qfpe: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
