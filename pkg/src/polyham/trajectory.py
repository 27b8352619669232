"""Full simulations: encode, measure-assemble-advance, decode, and cost.

A trajectory keeps one persistent state vector per ensemble member and
injects measurement noise into the Hamiltonian weights each step.  Ensembles
run in lockstep as one batched computation; trajectories stay independent
because each consumes its own random stream, so results are identical under
any execution schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ReconstructionError, SimulationError
from .quantum import (
    MeasurementModel,
    ObservableCache,
    pad_pairs,
    sample_expectation,
    unitary_step,
)

__all__ = [
    "SimulationConfig",
    "ClassicalSample",
    "TrajectoryResult",
    "CostReport",
    "encode_initial",
    "decode_state",
    "run_trajectory",
    "run_ensemble",
    "estimate_cost",
]

# Snapshots per trajectory are capped; the default stride enforces this.
MAX_SNAPSHOTS = 10_000

# Smallest allowed all-constant amplitude before decoding counts as failed.
DEFAULT_DECODE_FLOOR = 1e-9


@dataclass(frozen=True)
class SimulationConfig:
    """Step size, horizon, and readout model for one simulation.

    ``dt`` and ``t_final`` are in rescaled time.  ``record_stride`` of None
    picks the smallest stride keeping at most MAX_SNAPSHOTS snapshots.
    ``decode_floor`` is the smallest all-constant amplitude still decoded;
    below it the state has left the product manifold and the trajectory is
    reported as a reconstruction failure.
    """

    dt: float
    t_final: float
    model: MeasurementModel
    K: int = 1
    record_stride: int | None = None
    decode_floor: float = DEFAULT_DECODE_FLOOR

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise SimulationError(f"dt must be positive, got {self.dt}")
        if self.t_final < self.dt:
            raise SimulationError(
                f"t_final {self.t_final} is shorter than one step {self.dt}"
            )
        if self.K < 1:
            raise SimulationError(f"ensemble size must be at least 1, got {self.K}")
        if self.record_stride is not None and self.record_stride < 1:
            raise SimulationError("record_stride must be at least 1")

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.t_final / self.dt - 1e-9))

    @property
    def stride(self) -> int:
        if self.record_stride is not None:
            return self.record_stride
        return max(1, math.ceil(self.n_steps / MAX_SNAPSHOTS))


@dataclass(frozen=True)
class ClassicalSample:
    """One decoded point: rescaled and physical time, variables, and |x|."""

    t_prime: float
    t_physical: float
    x: tuple[float, ...]
    norm: float


@dataclass(frozen=True)
class TrajectoryResult:
    """Strided snapshots of one trajectory.

    ``states`` is (snapshots, dim) complex; ``classical`` has one decoded
    sample per snapshot.  ``seed`` is the base seed; member k of an ensemble
    drew from the stream derived from (seed, k) and run_trajectory is member
    0.  ``failure`` carries the abort reason when the trajectory could not
    be decoded or went non-finite; snapshots stop at the last good step.
    """

    states: np.ndarray
    classical: tuple[ClassicalSample, ...]
    seed: int
    failure: str | None = None

    def __post_init__(self) -> None:
        if len(self.states) != len(self.classical):
            raise SimulationError("state and classical records differ in length")
        times = [sample.t_prime for sample in self.classical]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise SimulationError("recorded t_prime values must strictly increase")

    @property
    def times(self) -> np.ndarray:
        return np.array([sample.t_prime for sample in self.classical])

    @property
    def physical_times(self) -> np.ndarray:
        return np.array([sample.t_physical for sample in self.classical])

    @property
    def positions(self) -> np.ndarray:
        return np.array([sample.x for sample in self.classical])


def encode_initial(x0: np.ndarray, c: float, group_size: int) -> np.ndarray:
    """Initial state: unit-normalized (c, x0), tensored and zero-padded.

    The result has power-of-two length and unit norm; components beyond the
    base block are zero and stay zero under the generated dynamics.
    """
    x0 = np.asarray(x0, dtype=float)
    if not np.all(np.isfinite(x0)):
        raise SimulationError("initial condition must be finite")
    if not c > 0:
        raise SimulationError(f"constant coordinate must be positive, got {c}")
    if group_size < 1:
        raise SimulationError("group size must be at least 1")
    xhat = np.concatenate(([c], x0))
    xhat = xhat / np.linalg.norm(xhat)
    state = xhat
    for _ in range(group_size - 1):
        state = np.kron(state, xhat)
    dim = state.size
    target = 1 << max(0, (dim - 1).bit_length())
    padded = np.zeros(target, dtype=complex)
    padded[:dim] = state
    return padded


def decode_state(
    state: np.ndarray,
    c: float,
    group_size: int = 2,
    base_dim: int | None = None,
    floor: float = DEFAULT_DECODE_FLOOR,
) -> ClassicalSample:
    """Recover the original variables from a (possibly padded) state.

    Reads the all-constant amplitude and the constant-row amplitudes only:
    with a = Re y[0], the constant coordinate is a^(1/group_size), each
    variable i is y[i] / a^((group_size-1)/group_size) scaled by |x| = c / xhat0.
    Time fields are zero; the simulation loop fills them in.
    """
    state = np.asarray(state)
    if base_dim is None:
        base_dim = round(len(state) ** (1.0 / group_size))
    amp0 = float(np.real(state[0]))
    if amp0 <= floor:
        raise ReconstructionError(
            f"all-constant amplitude {amp0:.3e} is at or below the decode "
            f"floor {floor:.0e}"
        )
    xhat0 = amp0 ** (1.0 / group_size)
    scale = amp0 / xhat0  # xhat0 ** (group_size - 1)
    norm = c / xhat0
    x = tuple(norm * float(np.real(state[i])) / scale for i in range(1, base_dim))
    return ClassicalSample(t_prime=0.0, t_physical=0.0, x=x, norm=norm)


@dataclass(frozen=True)
class CostReport:
    """Resource counts for a hypothetical run of the measured protocol.

    ``measurements`` doubles as the number of states consumed, since each
    measurement uses one fresh copy.  ``epsilon`` is the per-measurement
    accuracy equivalent to m averaged shots.
    """

    measurements: float
    states_consumed: float
    mean_evolution_time: float
    hamiltonian_steps: float
    epsilon: float


def estimate_cost(
    pair_count: int,
    t_total: float,
    dt: float,
    m: float | None = None,
    epsilon: float | None = None,
) -> CostReport:
    """Measurement and simulation-step counts for M pairs over time T.

    Measurements total m*M*T/dt; each consumed state has been evolved for
    T/2 on average, so Hamiltonian-simulation steps total M*T^2*m/(2*dt^2).
    T/dt counts measurement rounds, so it is snapped to the nearest integer
    when within a relative 1e-9; that keeps the formulas exact when T is a
    whole multiple of dt.  Exactly one of ``m`` (shots per measurement) and
    ``epsilon`` (accuracy, with m = 1/epsilon) must be given.
    """
    if (m is None) == (epsilon is None):
        raise SimulationError("give exactly one of m and epsilon")
    if m is None:
        if not epsilon > 0:  # type: ignore[operator]
            raise SimulationError(f"epsilon must be positive, got {epsilon}")
        m = 1.0 / epsilon
    if not m > 0:
        raise SimulationError(f"shot count must be positive, got {m}")
    if pair_count < 1 or not t_total > 0 or not dt > 0:
        raise SimulationError("pair count, total time, and dt must be positive")
    rounds = t_total / dt
    nearest = round(rounds)
    if nearest >= 1 and abs(rounds - nearest) <= 1e-9 * nearest:
        rounds = float(nearest)
    measurements = m * pair_count * rounds
    steps = measurements * rounds / 2.0
    return CostReport(
        measurements=measurements,
        states_consumed=measurements,
        mean_evolution_time=t_total / 2.0,
        hamiltonian_steps=steps,
        epsilon=1.0 / m,
    )


def _simulate_batch(
    pipeline, x0: np.ndarray, config: SimulationConfig, base_seed: int
) -> list[TrajectoryResult]:
    """Lockstep core shared by run_trajectory and run_ensemble."""
    # An empty pair list is a zero Hamiltonian: the propagator is the
    # identity and the trajectory sits still.
    pairs = pad_pairs(pipeline.pairs)
    cache = ObservableCache(pairs) if pairs else None
    ham_stack = np.stack([p.hamiltonian for p in pairs]) if pairs else None
    c = pipeline.c
    g = pipeline.group_size
    d = pipeline.base_dim
    q = pipeline.source_degree

    k_total = config.K
    psi0 = encode_initial(x0, c, g)
    states = np.tile(psi0, (k_total, 1))
    rngs = [
        np.random.Generator(np.random.Philox(np.random.SeedSequence((base_seed, k))))
        for k in range(k_total)
    ]
    exact = config.model.mode == "exact"

    n_steps = config.n_steps
    stride = config.stride
    dt = config.dt

    t_phys = np.zeros(k_total)
    active = np.ones(k_total, dtype=bool)
    failures: dict[int, str] = {}

    def rate(batch: np.ndarray) -> np.ndarray:
        # dt/dt' = |x|^(1-q) with |x| = c / amp0^(1/g), guarded for masking.
        amp0 = np.real(batch[:, 0])
        safe = np.where(amp0 > 0, amp0, 1.0)
        return np.where(amp0 > 0, (safe ** (1.0 / g) / c) ** (q - 1), 0.0)

    records: list[list] = [[] for _ in range(k_total)]
    state_records: list[list[np.ndarray]] = [[] for _ in range(k_total)]

    def record(step: int) -> None:
        t_prime = step * dt
        for k in range(k_total):
            if not active[k]:
                continue
            sample = decode_state(states[k], c, g, d, config.decode_floor)
            records[k].append(
                ClassicalSample(
                    t_prime=t_prime,
                    t_physical=float(t_phys[k]),
                    x=sample.x,
                    norm=sample.norm,
                )
            )
            state_records[k].append(states[k].copy())

    def check(step: int) -> None:
        # Decode failures and non-finite blowups retire a trajectory without
        # touching the others.
        amp0 = np.real(states[:, 0])
        finite = np.all(np.isfinite(states), axis=1)
        for k in range(k_total):
            if not active[k]:
                continue
            if not finite[k]:
                failures[k] = f"non-finite amplitude at step {step}"
                active[k] = False
            elif amp0[k] <= config.decode_floor:
                failures[k] = (
                    f"all-constant amplitude {amp0[k]:.3e} fell below the "
                    f"decode floor at step {step}"
                )
                active[k] = False

    check(0)
    record(0)
    f_prev = rate(states)
    for step in range(n_steps):
        if not np.any(active):
            break
        if ham_stack is not None:
            if exact:
                weights = cache.expectations(states)
            else:
                weights = sample_expectation(states, cache, config.model, rngs)
            snapshots = np.einsum("kp,pij->kij", weights, ham_stack)
            propagators = unitary_step(snapshots, dt)
            advanced = np.einsum("kij,kj->ki", propagators, states)
            states = np.where(active[:, None], advanced, states)

        check(step + 1)
        f_curr = rate(states)
        t_phys = np.where(active, t_phys + dt * (f_prev + f_curr) / 2.0, t_phys)
        f_prev = f_curr
        if (step + 1) % stride == 0 or step + 1 == n_steps:
            record(step + 1)

    results = []
    for k in range(k_total):
        stack = (
            np.array(state_records[k])
            if state_records[k]
            else np.zeros((0, states.shape[1]), dtype=complex)
        )
        results.append(
            TrajectoryResult(
                states=stack,
                classical=tuple(records[k]),
                seed=base_seed,
                failure=failures.get(k),
            )
        )
    return results


def run_trajectory(
    pipeline, x0: np.ndarray, config: SimulationConfig, seed: int | None = None
) -> TrajectoryResult:
    """Simulate one trajectory of the mapped system.

    ``pipeline`` is a pipeline artifact (pairs plus encoding constants).
    The trajectory draws from the stream derived from (seed, 0), matching
    member 0 of an ensemble with the same base seed.  Raises on decode
    failure or non-finite amplitudes.
    """
    base = config.model.rng_seed if seed is None else seed
    single = SimulationConfig(
        dt=config.dt,
        t_final=config.t_final,
        model=config.model,
        K=1,
        record_stride=config.record_stride,
        decode_floor=config.decode_floor,
    )
    result = _simulate_batch(pipeline, x0, single, base)[0]
    if result.failure is not None:
        raise ReconstructionError(result.failure)
    return result


def run_ensemble(
    pipeline, x0: np.ndarray, config: SimulationConfig, base_seed: int | None = None
) -> list[TrajectoryResult]:
    """Simulate cfg.K independent trajectories from one initial condition.

    Trajectory k draws from the stream derived from (base_seed, k).  A
    trajectory that fails decoding is returned truncated with its failure
    recorded instead of aborting the ensemble.
    """
    base = config.model.rng_seed if base_seed is None else base_seed
    return _simulate_batch(pipeline, x0, config, base)
