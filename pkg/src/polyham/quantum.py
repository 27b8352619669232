"""State-vector evolution under measured observable-Hamiltonian pairs.

The evolution alternates measurement and propagation: every observable is
measured (exactly, by shot noise, or by a gaussian surrogate), the sampled
means weight their Hamiltonians into a snapshot generator, and the state
advances one step under the exact matrix exponential of that snapshot.  All
Hamiltonians here are purely imaginary and Hermitian, so every snapshot
generates a real orthogonal map and real states stay real up to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SimulationError
from .mapping import OHPair

__all__ = [
    "MeasurementModel",
    "ObservableCache",
    "SnapshotHamiltonian",
    "assemble_hamiltonian",
    "expectation",
    "pad_pairs",
    "sample_expectation",
    "unitary_step",
]

MODES = ("exact", "shot", "gaussian")

# How far from Hermitian a snapshot generator may drift, relative to its
# largest entry, before stepping it would silently break unitarity.
HERMITIAN_TOL = 1e-13


@dataclass(frozen=True)
class MeasurementModel:
    """How expectation values are read out.

    ``mode`` selects exact values, finite-shot multinomial sampling, or a
    gaussian surrogate with the matching mean and variance.  ``m`` is the
    number of shots averaged per measurement; shot mode needs an integer of
    at least 1, gaussian mode any positive value, exact mode ignores it.
    ``rng_seed`` is the base seed; trajectory k draws from an independent
    stream derived from (rng_seed, k).
    """

    mode: str
    m: float = 1.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise SimulationError(
                f"unknown measurement mode {self.mode!r}; expected one of {MODES}"
            )
        if self.mode == "shot":
            if self.m < 1 or self.m != int(self.m):
                raise SimulationError(
                    f"shot mode needs an integer shot count of at least 1, got {self.m}"
                )
        elif self.mode == "gaussian":
            if not self.m > 0:
                raise SimulationError(f"gaussian mode needs m > 0, got {self.m}")

    def stream(self, trajectory: int) -> np.random.Generator:
        """Independent generator for one trajectory."""
        return np.random.Generator(
            np.random.Philox(np.random.SeedSequence((self.rng_seed, trajectory)))
        )


@dataclass(frozen=True)
class SnapshotHamiltonian:
    """Weighted Hamiltonian sum frozen at one measurement time."""

    matrix: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=complex)
        scale = max(1.0, float(np.max(np.abs(matrix))) if matrix.size else 0.0)
        drift = float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0
        if drift > HERMITIAN_TOL * scale:
            raise SimulationError(
                f"snapshot generator is not Hermitian (drift {drift:.3e})"
            )
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))


class ObservableCache:
    """Precomputed spectra for a fixed observable list.

    Stacks the observables once and eigendecomposes each, so that per-step
    work is dense linear algebra over all states and observables at once:
    expectations, second moments, and the eigenbasis probabilities shot
    sampling draws from.
    """

    def __init__(self, pairs: list[OHPair] | list[np.ndarray]):
        if not pairs:
            raise SimulationError("observable cache needs at least one observable")
        mats = [p.observable if isinstance(p, OHPair) else np.asarray(p, float) for p in pairs]
        dim = mats[0].shape[0]
        for mat in mats:
            if mat.shape != (dim, dim):
                raise SimulationError("observables must share one square shape")
        self.observables = np.stack(mats)
        self.dim = dim
        self.count = len(mats)
        self.eigenvalues, self.eigenvectors = np.linalg.eigh(self.observables)

    def expectations(self, states: np.ndarray) -> np.ndarray:
        """<state|O_p|state> for every observable; shape (..., count)."""
        states = np.asarray(states)
        applied = np.einsum("pde,...e->...pd", self.observables, states)
        return np.real(np.einsum("...d,...pd->...p", np.conjugate(states), applied))

    def second_moments(self, states: np.ndarray) -> np.ndarray:
        """<state|O_p^2|state>, used for gaussian surrogate variances."""
        states = np.asarray(states)
        applied = np.einsum("pde,...e->...pd", self.observables, states)
        return np.real(np.einsum("...pd,...pd->...p", np.conjugate(applied), applied))

    def eigen_probabilities(self, states: np.ndarray) -> np.ndarray:
        """Measurement probabilities in each observable's eigenbasis."""
        states = np.asarray(states)
        amplitudes = np.einsum("pdv,...d->...pv", np.conjugate(self.eigenvectors), states)
        probs = np.abs(amplitudes) ** 2
        return probs / np.sum(probs, axis=-1, keepdims=True)


def expectation(state: np.ndarray, observable: np.ndarray) -> float:
    """<state|observable|state> as a real number."""
    state = np.asarray(state)
    return float(np.real(np.vdot(state, np.asarray(observable) @ state)))


def sample_expectation(
    states: np.ndarray,
    cache: ObservableCache,
    model: MeasurementModel,
    rngs: np.random.Generator | list[np.random.Generator] | None = None,
) -> np.ndarray:
    """Measured means for every observable, one row per state.

    ``states`` is (dim,) or (k, dim); the result matches with a trailing
    observable axis.  Shot mode draws multinomial counts in each observable
    eigenbasis; gaussian mode perturbs the exact mean by the standard error
    of m averaged shots.  ``rngs`` supplies one generator per state row and
    is consumed in (state, observable) order; exact mode needs none.
    """
    states = np.asarray(states)
    single = states.ndim == 1
    batch = states[None, :] if single else states
    means = cache.expectations(batch)

    if model.mode == "exact":
        sampled = means
    else:
        if rngs is None:
            raise SimulationError(f"{model.mode} mode needs random generators")
        if isinstance(rngs, np.random.Generator):
            rngs = [rngs]
        if len(rngs) != batch.shape[0]:
            raise SimulationError(
                f"got {len(rngs)} generators for {batch.shape[0]} states"
            )
        if model.mode == "gaussian":
            seconds = cache.second_moments(batch)
            variances = np.maximum(seconds - means**2, 0.0) / model.m
            sigma = np.sqrt(variances)
            sampled = np.empty_like(means)
            for k, rng in enumerate(rngs):
                sampled[k] = means[k] + sigma[k] * rng.standard_normal(cache.count)
        else:
            shots = int(model.m)
            probs = cache.eigen_probabilities(batch)
            sampled = np.empty_like(means)
            for k, rng in enumerate(rngs):
                for p in range(cache.count):
                    counts = rng.multinomial(shots, probs[k, p])
                    sampled[k, p] = float(counts @ cache.eigenvalues[p]) / shots
    return sampled[0] if single else sampled


def assemble_hamiltonian(
    pairs: list[OHPair] | np.ndarray, weights: np.ndarray
) -> SnapshotHamiltonian:
    """Weight each Hamiltonian by its measured mean and sum."""
    if isinstance(pairs, np.ndarray):
        stack = pairs
    else:
        stack = np.stack([p.hamiltonian for p in pairs])
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (stack.shape[0],):
        raise SimulationError(
            f"got {weights.shape} weights for {stack.shape[0]} Hamiltonians"
        )
    matrix = np.einsum("p,pij->ij", weights, stack)
    return SnapshotHamiltonian(matrix=matrix, weights=weights)


def unitary_step(hamiltonian: SnapshotHamiltonian | np.ndarray, dt: float) -> np.ndarray:
    """exp(-i H dt) through the eigendecomposition, exactly unitary.

    Accepts a single matrix or a stack (..., d, d); the result matches.
    """
    matrix = (
        hamiltonian.matrix
        if isinstance(hamiltonian, SnapshotHamiltonian)
        else np.asarray(hamiltonian)
    )
    evals, evecs = np.linalg.eigh(matrix)
    phases = np.exp(-1j * dt * evals)
    return np.matmul(evecs * phases[..., None, :], np.conjugate(np.swapaxes(evecs, -1, -2)))


def pad_pairs(pairs: list[OHPair]) -> list[OHPair]:
    """Zero-pad every pair to the next power-of-two dimension.

    The padded components start at zero and stay there: padding adds no
    couplings, so dynamics on the original block are untouched.  Pairs whose
    dimension is already a power of two pass through unchanged.
    """
    if not pairs:
        return []
    dim = pairs[0].dim
    target = 1 << max(0, (dim - 1).bit_length())
    if target == dim:
        return list(pairs)
    padded = []
    for pair in pairs:
        obs = np.zeros((target, target))
        obs[:dim, :dim] = pair.observable
        ham = np.zeros((target, target), dtype=complex)
        ham[:dim, :dim] = pair.hamiltonian
        padded.append(OHPair(observable=obs, hamiltonian=ham, label=pair.label))
    return padded
