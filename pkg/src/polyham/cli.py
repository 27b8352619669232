"""Command-line entry point: map systems, simulate, analyze, sweep, demo, cost.

Every run writes a JSON manifest capturing the inputs, parameters, and seeds;
each emitted table starts with the manifest hash so outputs are traceable and
reruns of an identical manifest reproduce files byte for byte.

Exit codes: 0 success, 1 usage problems, 2 pipeline (parse/mapping) errors,
3 simulation or analysis failures.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from ._version import __version__
from .analysis import branch_scaling_sweep, diagnostics
from .artifact import artifact_sha256, build_artifact, load_artifact, save_artifact
from .errors import (
    GridMismatchError,
    MappingError,
    ParseError,
    ReconstructionError,
    SimulationError,
)
from .poly_ir import parse_system
from .quantum import MeasurementModel
from .systems import logistic, lorenz
from .tables import (
    read_trajectory_table,
    write_diagnostics_table,
    write_sweep_table,
    write_trajectory_table,
)
from .trajectory import (
    DEFAULT_DECODE_FLOOR,
    SimulationConfig,
    estimate_cost,
    run_ensemble,
)

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PIPELINE = 2
EXIT_SIMULATION = 3

OUT_ENV = "POLYHAM_OUT"

# Desk-scale demo parameters.  The published ensembles (s = 10^15, K = 300,
# dt = 1e-5) are far beyond a workstation; these settings reproduce the same
# qualitative behavior in seconds to minutes, and --paper-scale prints what
# the full-size run would cost instead of attempting it.
DEMOS: dict[str, dict] = {
    "logistic": {
        "build": lambda: logistic(),
        "c": 1.0,
        "x0": (0.01,),
        "dt": 1e-3,
        "t_final": 25.0,
        "mode": "gaussian",
        "s": 5e5,
        "K": 10,
        "stride": 200,
        "full_scale": {"pairs": 2, "t_total": 25.0, "dt": 1e-3, "m": 500.0},
    },
    "lorenz-chaotic": {
        "build": lambda: lorenz(sigma=10.0, rho=28.0, beta=8.0 / 3.0),
        "c": 20.0,
        "x0": (4.856, 7.291, 18.987),
        "dt": 0.02,
        "t_final": 2400.0,
        "mode": "gaussian",
        "s": 100.0,
        "K": 30,
        "stride": 100,
        "full_scale": {"pairs": 26, "t_total": 1.0, "dt": 1e-5, "m": 1e10},
    },
    "lorenz-stable": {
        "build": lambda: lorenz(sigma=10.0, rho=28.0, beta=10.0),
        "c": 20.0,
        "x0": (4.856, 7.291, 18.987),
        "dt": 0.02,
        "t_final": 2400.0,
        "mode": "gaussian",
        "s": 1e4,
        "K": 30,
        "stride": 100,
        "full_scale": {"pairs": 26, "t_total": 1.0, "dt": 1e-5, "m": 1e10},
    },
}


class _Usage(Exception):
    """Bad arguments discovered after argparse; exits with the usage code."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D102 - argparse hook
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _out_dir(args) -> Path:
    out = args.out or os.environ.get(OUT_ENV) or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _parse_x0(text: str) -> np.ndarray:
    try:
        return np.array([float(part) for part in text.split(",")])
    except ValueError:
        raise _Usage(f"--x0 expects comma-separated numbers, got {text!r}")


def _model(args, dt: float) -> MeasurementModel:
    """Build the measurement model from --mode with --s or --m."""
    if args.mode == "exact":
        return MeasurementModel(mode="exact", rng_seed=args.seed)
    if args.m is not None:
        m = args.m
    elif args.s is not None:
        m = args.s * dt
    else:
        raise _Usage(f"--mode {args.mode} needs --s or --m")
    if args.mode == "shot":
        m = max(1, round(m))
    return MeasurementModel(mode=args.mode, m=m, rng_seed=args.seed)


def _config(args, model: MeasurementModel, k: int | None = None) -> SimulationConfig:
    return SimulationConfig(
        dt=args.dt,
        t_final=args.t_final,
        model=model,
        K=args.K if k is None else k,
        record_stride=args.stride,
        decode_floor=args.decode_floor,
    )


def _manifest(out: Path, command: str, parameters: dict) -> str:
    """Write the run manifest and return its hash for table headers."""
    document = {
        "tool": "polyham",
        "version": __version__,
        "command": command,
        "parameters": parameters,
    }
    text = json.dumps(document, indent=2, sort_keys=True) + "\n"
    digest = hashlib.sha256(text.encode()).hexdigest()
    (out / f"manifest_{command}.json").write_text(text)
    return digest


def _sim_flags(parser: argparse.ArgumentParser, require_grid: bool = True) -> None:
    parser.add_argument("--dt", type=float, required=require_grid, help="step in rescaled time")
    parser.add_argument(
        "--t-final", type=float, required=require_grid, help="rescaled-time horizon"
    )
    parser.add_argument("--mode", choices=("exact", "shot", "gaussian"), default="exact")
    noise = parser.add_mutually_exclusive_group()
    noise.add_argument(
        "--s", type=float, help="measurements per unit rescaled time; m = s*dt"
    )
    noise.add_argument("--m", type=float, help="shots averaged per measurement")
    parser.add_argument("--K", type=int, default=1, help="ensemble size")
    parser.add_argument("--seed", type=int, default=0, help="base seed")
    parser.add_argument("--stride", type=int, default=None, help="steps between snapshots")
    parser.add_argument(
        "--decode-floor",
        type=float,
        default=DEFAULT_DECODE_FLOOR,
        help="minimum all-constant amplitude before a trajectory counts as lost",
    )


def _build_parser() -> _Parser:
    parser = _Parser(prog="polyham", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"polyham {__version__}")
    commands = parser.add_subparsers(dest="command", metavar="command")

    p_map = commands.add_parser("map", help="map a polynomial system file to pairs")
    p_map.add_argument("system", help="system file (line format or JSON)")
    p_map.add_argument("--c", type=float, default=1.0, help="constant coordinate value")
    p_map.add_argument("--degree", type=int, default=None, help="odd homogenization degree")
    p_map.add_argument("--merge-pairs", action="store_true", help="combine proportional pairs")
    p_map.add_argument("--out", default=None, help=f"output directory (or ${OUT_ENV})")
    p_map.set_defaults(func=cmd_map)

    p_sim = commands.add_parser("simulate", help="run trajectories from an artifact")
    p_sim.add_argument("artifact", help="pipeline artifact from `map`")
    p_sim.add_argument("--x0", required=True, help="initial condition, comma-separated")
    _sim_flags(p_sim)
    p_sim.add_argument("--no-amplitudes", action="store_true", help="omit raw amplitudes")
    p_sim.add_argument("--out", default=None, help=f"output directory (or ${OUT_ENV})")
    p_sim.set_defaults(func=cmd_simulate)

    p_ana = commands.add_parser("analyze", help="entropy and error diagnostics")
    p_ana.add_argument("ensemble_dir", help="directory of traj_*.csv tables")
    p_ana.add_argument("deterministic", help="exact-mode trajectory table")
    p_ana.add_argument("--threshold", type=float, default=0.1, help="branch fraction of N log 2")
    p_ana.add_argument("--out", default=None, help=f"output directory (or ${OUT_ENV})")
    p_ana.set_defaults(func=cmd_analyze)

    p_sweep = commands.add_parser("sweep", help="branch time vs stochasticity s")
    p_sweep.add_argument("artifact", help="pipeline artifact from `map`")
    p_sweep.add_argument("--x0", required=True, help="initial condition, comma-separated")
    p_sweep.add_argument("--s-list", required=True, help="comma-separated s values")
    _sim_flags(p_sweep)
    p_sweep.add_argument("--threshold", type=float, default=0.1)
    p_sweep.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p_sweep.add_argument("--out", default=None, help=f"output directory (or ${OUT_ENV})")
    p_sweep.set_defaults(func=cmd_sweep)

    p_demo = commands.add_parser("demo", help="built-in end-to-end demonstrations")
    p_demo.add_argument("name", choices=sorted(DEMOS))
    p_demo.add_argument("--paper-scale", action="store_true", help="print full-scale cost only")
    p_demo.add_argument("--seed", type=int, default=0)
    p_demo.add_argument("--out", default=None, help=f"output directory (or ${OUT_ENV})")
    p_demo.set_defaults(func=cmd_demo)

    p_cost = commands.add_parser("cost", help="resource estimate for the measured protocol")
    p_cost.add_argument("--pairs", type=int, required=True, help="pair count M")
    p_cost.add_argument("--t-total", type=float, required=True, help="total evolution time T")
    p_cost.add_argument("--dt", type=float, required=True)
    noise = p_cost.add_mutually_exclusive_group(required=True)
    noise.add_argument("--m", type=float, help="shots per measurement")
    noise.add_argument("--epsilon", type=float, help="per-measurement accuracy, m = 1/epsilon")
    p_cost.set_defaults(func=cmd_cost)

    return parser


def cmd_map(args) -> int:
    text = Path(args.system).read_text()
    system = parse_system(text)
    artifact = build_artifact(
        system, c=args.c, degree=args.degree, merge_pairs=args.merge_pairs
    )
    out = _out_dir(args)
    path = out / (Path(args.system).stem + ".oh.json")
    save_artifact(artifact, path)
    kind = "merged" if artifact.merged else "raw"
    print(f"wrote {path}")
    print(
        f"variables: {artifact.base_dim} (degree {artifact.source_degree}, "
        f"groups of {artifact.group_size})  state dim {artifact.state_dim}  "
        f"qubits {artifact.n_qubits}"
    )
    print(
        f"pairs: {len(artifact.pairs)} ({kind})  "
        f"nonzero Hamiltonian entries: {100 * artifact.nonzero_fraction:.1f}%"
    )
    return EXIT_OK


def cmd_simulate(args) -> int:
    artifact_path = Path(args.artifact)
    artifact = load_artifact(artifact_path)
    x0 = _parse_x0(args.x0)
    if len(x0) != artifact.base_dim - 1:
        raise _Usage(
            f"--x0 has {len(x0)} components; the artifact expects "
            f"{artifact.base_dim - 1}"
        )
    model = _model(args, args.dt)
    config = _config(args, model)
    out = _out_dir(args)
    digest = _manifest(
        out,
        "simulate",
        {
            "artifact": str(artifact_path),
            "artifact_sha256": artifact_sha256(artifact_path),
            "x0": [float(v) for v in x0],
            "dt": args.dt,
            "t_final": args.t_final,
            "mode": args.mode,
            "s": args.s,
            "m": model.m if model.mode != "exact" else None,
            "K": args.K,
            "seed": args.seed,
            "stride": args.stride,
            "decode_floor": args.decode_floor,
        },
    )
    results = run_ensemble(artifact, x0, config, base_seed=args.seed)
    width = max(3, len(str(len(results) - 1)))
    failed = 0
    for k, result in enumerate(results):
        name = out / f"traj_{k:0{width}d}.csv"
        write_trajectory_table(name, result, digest, amplitudes=not args.no_amplitudes)
        if result.failure is not None:
            failed += 1
    print(f"wrote {len(results)} trajectory table(s) to {out}")
    if failed:
        print(f"reconstruction failures: {failed} of {len(results)}")
    if failed == len(results):
        print("every trajectory failed", file=sys.stderr)
        return EXIT_SIMULATION
    return EXIT_OK


def cmd_analyze(args) -> int:
    ensemble_dir = Path(args.ensemble_dir)
    paths = sorted(ensemble_dir.glob("traj_*.csv"))
    if not paths:
        raise _Usage(f"no traj_*.csv tables in {ensemble_dir}")
    members = [read_trajectory_table(path) for path in paths]
    survivors = [member for member in members if member.failure is None]
    dropped = len(members) - len(survivors)
    if not survivors:
        print("every ensemble member had failed; nothing to analyze", file=sys.stderr)
        return EXIT_SIMULATION
    reference = read_trajectory_table(args.deterministic)
    series = diagnostics(survivors, reference, threshold_fraction=args.threshold)
    out = _out_dir(args)
    digest = _manifest(
        out,
        "analyze",
        {
            "ensemble_dir": str(ensemble_dir),
            "deterministic": str(args.deterministic),
            "members": len(survivors),
            "dropped_failures": dropped,
            "threshold": args.threshold,
        },
    )
    path = out / "diagnostics.csv"
    write_diagnostics_table(path, series, digest)
    print(f"wrote {path}")
    if dropped:
        print(f"dropped {dropped} failed member(s)")
    branch = "none" if series.branch_time is None else format(series.branch_time, "g")
    print(f"branch_time: {branch}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    artifact_path = Path(args.artifact)
    artifact = load_artifact(artifact_path)
    x0 = _parse_x0(args.x0)
    try:
        s_values = [float(part) for part in args.s_list.split(",")]
    except ValueError:
        raise _Usage(f"--s-list expects comma-separated numbers, got {args.s_list!r}")
    if args.mode == "exact":
        raise _Usage("--mode exact has no stochasticity; pick shot or gaussian")
    if args.s is not None or args.m is not None:
        model = _model(args, args.dt)
    else:
        # The sweep overrides m per s value; the template only fixes the mode.
        model = MeasurementModel(mode=args.mode, m=1.0, rng_seed=args.seed)
    config = _config(args, model)
    out = _out_dir(args)
    digest = _manifest(
        out,
        "sweep",
        {
            "artifact": str(artifact_path),
            "artifact_sha256": artifact_sha256(artifact_path),
            "x0": [float(v) for v in x0],
            "s_values": s_values,
            "dt": args.dt,
            "t_final": args.t_final,
            "mode": args.mode,
            "K": args.K,
            "seed": args.seed,
            "stride": args.stride,
            "threshold": args.threshold,
            "decode_floor": args.decode_floor,
        },
    )
    rows = branch_scaling_sweep(
        artifact,
        x0,
        s_values,
        config,
        threshold_fraction=args.threshold,
        base_seed=args.seed,
        jobs=args.jobs,
    )
    path = out / "sweep.csv"
    write_sweep_table(path, rows, digest)
    print(f"wrote {path}")
    for s, branch in rows:
        print(f"s = {s:g}: branch_time = {'none' if branch is None else format(branch, 'g')}")
    return EXIT_OK


def cmd_demo(args) -> int:
    preset = DEMOS[args.name]
    if args.paper_scale:
        full = preset["full_scale"]
        report = estimate_cost(
            full["pairs"], full["t_total"], full["dt"], m=full["m"]
        )
        print(f"full-scale cost for {args.name}:")
        print(f"  measurements (states consumed): {report.measurements:.3e}")
        print(f"  mean evolution time: {report.mean_evolution_time:g}")
        print(f"  hamiltonian steps: {report.hamiltonian_steps:.3e}")
        print(f"  epsilon per measurement: {report.epsilon:.3e}")
        return EXIT_OK

    out = _out_dir(args) / args.name
    out.mkdir(parents=True, exist_ok=True)
    system = preset["build"]()
    artifact = build_artifact(system, c=preset["c"])
    artifact_path = out / f"{args.name}.oh.json"
    save_artifact(artifact, artifact_path)
    print(f"mapped {args.name}: {len(artifact.pairs)} pairs on {artifact.n_qubits} qubits")

    x0 = np.array(preset["x0"])
    m = preset["s"] * preset["dt"]
    model = MeasurementModel(mode=preset["mode"], m=m, rng_seed=args.seed)
    config = SimulationConfig(
        dt=preset["dt"],
        t_final=preset["t_final"],
        model=model,
        K=preset["K"],
        record_stride=preset["stride"],
    )
    digest = _manifest(
        out,
        "demo",
        {
            "name": args.name,
            "artifact_sha256": artifact_sha256(artifact_path),
            "x0": [float(v) for v in x0],
            "dt": preset["dt"],
            "t_final": preset["t_final"],
            "mode": preset["mode"],
            "s": preset["s"],
            "K": preset["K"],
            "stride": preset["stride"],
            "seed": args.seed,
        },
    )

    exact_config = SimulationConfig(
        dt=preset["dt"],
        t_final=preset["t_final"],
        model=MeasurementModel(mode="exact"),
        K=1,
        record_stride=preset["stride"],
    )
    reference = run_ensemble(artifact, x0, exact_config, base_seed=args.seed)[0]
    write_trajectory_table(out / "deterministic.csv", reference, digest)

    results = run_ensemble(artifact, x0, config, base_seed=args.seed)
    width = max(3, len(str(len(results) - 1)))
    for k, result in enumerate(results):
        write_trajectory_table(out / f"traj_{k:0{width}d}.csv", result, digest)
    survivors = [r for r in results if r.failure is None]
    print(f"simulated ensemble: {len(survivors)} of {len(results)} trajectories survived")
    if not survivors:
        return EXIT_SIMULATION

    series = diagnostics(survivors, reference, threshold_fraction=0.1)
    write_diagnostics_table(out / "diagnostics.csv", series, digest)
    branch = "none" if series.branch_time is None else format(series.branch_time, "g")
    print(f"branch_time: {branch}")

    if args.name == "logistic":
        # Closed form x(t) = x0 e^t / (1 + x0 (e^t - 1)) on the physical clock.
        x0_val = float(x0[0])
        times = reference.physical_times
        exact = x0_val * np.exp(times) / (1.0 + x0_val * (np.exp(times) - 1.0))
        sup = float(np.max(np.abs(reference.positions[:, 0] - exact)))
        print(f"exact-mode sup error vs closed form: {sup:.2e}")
        print(f"final state: x1 = {reference.positions[-1, 0]:.6f} (fixed point 1)")
    print(f"outputs in {out}")
    return EXIT_OK


def cmd_cost(args) -> int:
    report = estimate_cost(
        args.pairs, args.t_total, args.dt, m=args.m, epsilon=args.epsilon
    )
    print(f"measurements (states consumed): {report.measurements:g}")
    print(f"mean evolution time: {report.mean_evolution_time:g}")
    print(f"hamiltonian steps: {report.hamiltonian_steps:g}")
    print(f"epsilon per measurement: {report.epsilon:g}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return EXIT_USAGE
    try:
        return args.func(args)
    except _Usage as exc:
        print(f"polyham {args.command}: {exc}", file=sys.stderr)
        print(f"run `polyham {args.command} --help` for usage", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"polyham {args.command}: file not found: {exc.filename}", file=sys.stderr)
        print(f"run `polyham {args.command} --help` for usage", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, MappingError) as exc:
        print(f"polyham {args.command}: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except (SimulationError, ReconstructionError, GridMismatchError, ValueError) as exc:
        print(f"polyham {args.command}: {exc}", file=sys.stderr)
        return EXIT_SIMULATION


if __name__ == "__main__":
    sys.exit(main())
