"""Plain-text delimited tables for trajectories, diagnostics, and sweeps.

Every file starts with a comment line carrying the run-manifest hash, then a
comma-separated header row naming the columns.  Floats are written with 17
significant digits so a rerun of the same manifest reproduces files byte for
byte.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .analysis import DiagnosticsSeries
from .errors import ParseError
from .trajectory import ClassicalSample, TrajectoryResult

__all__ = [
    "write_trajectory_table",
    "read_trajectory_table",
    "write_diagnostics_table",
    "read_diagnostics_table",
    "write_sweep_table",
]


def _fmt(value: float) -> str:
    return format(value, ".17g")


def write_trajectory_table(
    path: str | Path,
    result: TrajectoryResult,
    manifest_hash: str,
    amplitudes: bool = True,
) -> None:
    """One row per recorded snapshot; amplitudes allow later re-analysis."""
    n_vars = len(result.classical[0].x) if result.classical else 0
    dim = result.states.shape[1]
    columns = ["step", "t_prime", "t_physical"]
    columns += [f"x{i}" for i in range(1, n_vars + 1)]
    columns += ["norm"]
    if amplitudes:
        for i in range(dim):
            columns += [f"re{i}", f"im{i}"]
    lines = [f"# manifest={manifest_hash}", ",".join(columns)]
    if result.failure is not None:
        lines.insert(1, f"# failure={result.failure}")
    for row, sample in enumerate(result.classical):
        cells = [str(row), _fmt(sample.t_prime), _fmt(sample.t_physical)]
        cells += [_fmt(value) for value in sample.x]
        cells += [_fmt(sample.norm)]
        if amplitudes:
            state = result.states[row]
            for i in range(dim):
                cells += [_fmt(float(state[i].real)), _fmt(float(state[i].imag))]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


def read_trajectory_table(path: str | Path) -> TrajectoryResult:
    """Rebuild a TrajectoryResult from a table written with amplitudes."""
    text = Path(path).read_text().splitlines()
    failure = None
    header = None
    rows = []
    for line in text:
        if line.startswith("# failure="):
            failure = line[len("# failure=") :]
        elif line.startswith("#") or not line.strip():
            continue
        elif header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    if header is None:
        raise ParseError(f"{path}: no header row")
    try:
        norm_at = header.index("norm")
    except ValueError:
        raise ParseError(f"{path}: no norm column")
    n_vars = norm_at - 3
    amp_columns = header[norm_at + 1 :]
    if len(amp_columns) % 2 != 0:
        raise ParseError(f"{path}: odd amplitude column count")
    dim = len(amp_columns) // 2
    if dim == 0:
        raise ParseError(f"{path}: table has no amplitude columns; rerun with amplitudes")

    samples = []
    states = np.zeros((len(rows), dim), dtype=complex)
    for r, cells in enumerate(rows):
        if len(cells) != len(header):
            raise ParseError(f"{path}: row {r} has {len(cells)} cells, expected {len(header)}")
        values = [float(cell) for cell in cells[1:]]
        samples.append(
            ClassicalSample(
                t_prime=values[0],
                t_physical=values[1],
                x=tuple(values[2 : 2 + n_vars]),
                norm=values[2 + n_vars],
            )
        )
        amp = values[3 + n_vars :]
        states[r] = np.array(amp[0::2]) + 1j * np.array(amp[1::2])
    return TrajectoryResult(states=states, classical=tuple(samples), seed=0, failure=failure)


def write_diagnostics_table(
    path: str | Path, series: DiagnosticsSeries, manifest_hash: str
) -> None:
    branch = "none" if series.branch_time is None else _fmt(series.branch_time)
    lines = [
        f"# manifest={manifest_hash}",
        f"# branch_time={branch}",
        "t_prime,entropy,trace_distance",
    ]
    for t, s, d in zip(series.times, series.entropy, series.trace_distance):
        lines.append(f"{_fmt(t)},{_fmt(s)},{_fmt(d)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_diagnostics_table(path: str | Path) -> DiagnosticsSeries:
    text = Path(path).read_text().splitlines()
    branch_time: float | None = None
    rows = []
    header_seen = False
    for line in text:
        if line.startswith("# branch_time="):
            raw = line[len("# branch_time=") :]
            branch_time = None if raw == "none" else float(raw)
        elif line.startswith("#") or not line.strip():
            continue
        elif not header_seen:
            header_seen = True
        else:
            rows.append([float(cell) for cell in line.split(",")])
    if not header_seen:
        raise ParseError(f"{path}: no header row")
    data = np.array(rows) if rows else np.zeros((0, 3))
    return DiagnosticsSeries(
        times=data[:, 0],
        entropy=data[:, 1],
        trace_distance=data[:, 2],
        branch_time=branch_time,
    )


def write_sweep_table(
    path: str | Path, rows: list[tuple[float, float | None]], manifest_hash: str
) -> None:
    lines = [f"# manifest={manifest_hash}", "s,branch_time"]
    for s, branch in rows:
        lines.append(f"{_fmt(s)},{'none' if branch is None else _fmt(branch)}")
    Path(path).write_text("\n".join(lines) + "\n")
