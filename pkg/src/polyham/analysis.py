"""Ensemble diagnostics: density matrices, entropy, trace distance, branching.

An ensemble of trajectories defines a time series of density matrices; their
von Neumann entropy measures how far the trajectories have spread, and the
trace distance to the rank-one projector of an exact run measures how far the
ensemble has drifted from the noiseless solution.  Branching is the first
recorded time entropy reaches a fraction of its N log 2 ceiling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError
from .quantum import MeasurementModel
from .trajectory import SimulationConfig, TrajectoryResult, run_ensemble, run_trajectory

__all__ = [
    "DensityMatrix",
    "DiagnosticsSeries",
    "density_matrix",
    "von_neumann_entropy",
    "trace_distance",
    "diagnostics",
    "branch_scaling_sweep",
]

TRACE_TOL = 1e-12
EIGENVALUE_FLOOR = -1e-12
HERMITIAN_TOL = 1e-13

# Eigenvalues this far below zero are corrupt input, not roundoff dust.
EIGENVALUE_ERROR = -1e-9


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace mixture of pure states."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("density matrix must be square")
        if np.max(np.abs(matrix - matrix.conj().T)) > HERMITIAN_TOL:
            raise ValueError("density matrix must be Hermitian")
        trace = float(np.real(np.trace(matrix)))
        if abs(trace - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {trace} is not 1")
        eigenvalues = np.linalg.eigvalsh(matrix)
        if float(eigenvalues.min()) < EIGENVALUE_FLOOR:
            raise ValueError(
                f"density matrix has eigenvalue {eigenvalues.min():.3e} below "
                f"the {EIGENVALUE_FLOOR:.0e} dust floor"
            )
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "eigenvalues", eigenvalues)
        matrix.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class DiagnosticsSeries:
    """Entropy and trace-distance series over the recording grid.

    ``branch_time`` is the first recorded time entropy reaches the branching
    threshold, or None when it never does within the run.
    """

    times: np.ndarray
    entropy: np.ndarray
    trace_distance: np.ndarray
    branch_time: float | None

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        entropy = np.asarray(self.entropy, dtype=float)
        distance = np.asarray(self.trace_distance, dtype=float)
        if not (len(times) == len(entropy) == len(distance)):
            raise ValueError("diagnostics series lengths differ")
        if entropy.size and (entropy.min() < 0 or distance.min() < -1e-12):
            raise ValueError("entropy and trace distance must be non-negative")
        if distance.size and distance.max() > 1 + 1e-9:
            raise ValueError("trace distance cannot exceed 1")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "entropy", entropy)
        object.__setattr__(self, "trace_distance", distance)


def density_matrix(states: list[np.ndarray] | np.ndarray) -> DensityMatrix:
    """Equal-weight mixture (1/K) sum of |psi><psi| over the given states.

    States are renormalized before the outer product: long runs of exact
    unitary steps accumulate norm drift of order 1e-12, which would otherwise
    push the mixture's trace outside the validator's tolerance.
    """
    stack = np.asarray(states, dtype=complex)
    if stack.ndim == 1:
        stack = stack[None, :]
    if stack.ndim != 2 or stack.shape[0] < 1:
        raise ValueError("need at least one state of equal dimension")
    norms = np.linalg.norm(stack, axis=1)
    if np.any(norms == 0.0) or not np.all(np.isfinite(norms)):
        raise ValueError("states must be finite and nonzero")
    stack = stack / norms[:, None]
    rho = np.einsum("kd,ke->de", stack, np.conjugate(stack)) / stack.shape[0]
    return DensityMatrix(matrix=rho)


def von_neumann_entropy(rho: DensityMatrix | np.ndarray) -> float:
    """S = -sum(lambda log lambda), natural log, with 0 log 0 = 0.

    Eigenvalue dust in [-1e-9, 0] is clamped to zero; anything lower is
    rejected as corrupt input.  The result is clamped at zero so roundoff
    above lambda = 1 cannot produce a negative entropy.
    """
    if isinstance(rho, DensityMatrix):
        eigenvalues = rho.eigenvalues  # type: ignore[attr-defined]
    else:
        eigenvalues = np.linalg.eigvalsh(np.asarray(rho, dtype=complex))
    low = float(eigenvalues.min()) if eigenvalues.size else 0.0
    if low < EIGENVALUE_ERROR:
        raise ValueError(f"eigenvalue {low:.3e} is too negative for a density matrix")
    clamped = np.maximum(eigenvalues, 0.0)
    positive = clamped[clamped > 0.0]
    return max(0.0, float(-np.sum(positive * np.log(positive))))


def trace_distance(rho1: DensityMatrix | np.ndarray, rho2: DensityMatrix | np.ndarray) -> float:
    """Half the sum of |eigenvalues| of rho1 - rho2."""
    m1 = rho1.matrix if isinstance(rho1, DensityMatrix) else np.asarray(rho1, complex)
    m2 = rho2.matrix if isinstance(rho2, DensityMatrix) else np.asarray(rho2, complex)
    if m1.shape != m2.shape:
        raise ValueError(f"dimension mismatch: {m1.shape} vs {m2.shape}")
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(m1 - m2))))


def _aligned_grid(results: list[TrajectoryResult]) -> np.ndarray:
    grid = results[0].times
    for result in results[1:]:
        other = result.times
        if other.shape != grid.shape or not np.array_equal(other, grid):
            raise GridMismatchError(
                "trajectories were recorded on different time grids; rerun "
                "with matching dt, t_final, and stride (failed members must "
                "be filtered out first)"
            )
    return grid


def diagnostics(
    ensemble: list[TrajectoryResult],
    deterministic: TrajectoryResult,
    threshold_fraction: float = 0.1,
) -> DiagnosticsSeries:
    """Entropy and trace distance of an ensemble against an exact run.

    All trajectories must share one recording grid.  The deterministic run
    enters as a rank-one projector at each time.  The branching time is the
    first recorded time with S >= threshold_fraction * N log 2, where N is
    the qubit count of the recorded states; no interpolation between
    samples.
    """
    if not ensemble:
        raise GridMismatchError("ensemble is empty")
    grid = _aligned_grid(list(ensemble) + [deterministic])
    dim = ensemble[0].states.shape[1]
    n_qubits = int(np.log2(dim))
    if 2**n_qubits != dim:
        raise ValueError(f"state dimension {dim} is not a power of two")
    threshold = threshold_fraction * n_qubits * np.log(2.0)

    entropies = np.empty(len(grid))
    distances = np.empty(len(grid))
    for i in range(len(grid)):
        rho_ens = density_matrix([member.states[i] for member in ensemble])
        rho_det = density_matrix(deterministic.states[i])
        entropies[i] = von_neumann_entropy(rho_ens)
        distances[i] = min(1.0, trace_distance(rho_ens, rho_det))

    branch_time = None
    crossed = np.nonzero(entropies >= threshold)[0]
    if crossed.size:
        branch_time = float(grid[crossed[0]])
    return DiagnosticsSeries(
        times=grid,
        entropy=entropies,
        trace_distance=distances,
        branch_time=branch_time,
    )


def branch_scaling_sweep(
    pipeline,
    x0: np.ndarray,
    s_values: list[float],
    config: SimulationConfig,
    threshold_fraction: float = 0.1,
    base_seed: int | None = None,
    jobs: int = 1,
) -> list[tuple[float, float | None]]:
    """Branching time as a function of the stochasticity parameter s.

    For each s the measurement strength is m = s * dt (rounded up to 1 shot
    in shot mode), the ensemble is rerun with the template config, and the
    branching time recorded; None marks runs whose entropy never crossed the
    threshold.  The deterministic reference is computed once.  ``jobs``
    bounds concurrent runs; any schedule gives identical output.
    """
    for s in s_values:
        if not s > 0:
            raise ValueError(f"s values must be positive, got {s}")
    if config.model.mode == "exact":
        raise ValueError("a sweep over s needs a stochastic measurement mode")
    seed = config.model.rng_seed if base_seed is None else base_seed
    exact_config = SimulationConfig(
        dt=config.dt,
        t_final=config.t_final,
        model=MeasurementModel(mode="exact"),
        K=1,
        record_stride=config.record_stride,
        decode_floor=config.decode_floor,
    )
    reference = run_trajectory(pipeline, x0, exact_config, seed=seed)

    def one(s: float) -> float | None:
        m = s * config.dt
        if config.model.mode == "shot":
            m = max(1, round(m))
        model = MeasurementModel(mode=config.model.mode, m=m, rng_seed=seed)
        run_config = SimulationConfig(
            dt=config.dt,
            t_final=config.t_final,
            model=model,
            K=config.K,
            record_stride=config.record_stride,
            decode_floor=config.decode_floor,
        )
        ensemble = run_ensemble(pipeline, x0, run_config, base_seed=seed)
        survivors = [member for member in ensemble if member.failure is None]
        if not survivors:
            raise GridMismatchError(f"every trajectory failed at s = {s}")
        series = diagnostics(survivors, reference, threshold_fraction)
        return series.branch_time

    if jobs <= 1 or len(s_values) <= 1:
        branch_times = [one(s) for s in s_values]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            branch_times = list(pool.map(one, s_values))
    return list(zip([float(s) for s in s_values], branch_times))
