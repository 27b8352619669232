"""End-to-end acceptance checks, one test per shipped guarantee.

Each test pins one externally visible behavior of the package: the two
hand-checkable tensor fixtures, the logistic worked example through the
whole mapping, exact and stochastic simulation accuracy, unitarity of the
evolution, the equivalence of the three rate evaluations, the Lorenz
mapping census, the chaotic/well-behaved branching dichotomy at desk
scale, the cost model, and the entropy/trace-distance diagnostics.  Run
with ``pytest -v tests/test_acceptance.py`` to get one pass/fail line per
guarantee.  The slow entry is the branching dichotomy (two 30-member
Lorenz ensembles, bounded at 30 minutes, around 11 in practice); the rest
finish in under three minutes combined.
"""

import time

import numpy as np
import pytest

from polyham import (
    AntisymmetricTensor,
    MeasurementModel,
    NormPreservingTensor,
    SimulationConfig,
    SparseTensor,
    antisymmetrize,
    assemble_hamiltonian,
    build_artifact,
    contract_tensor,
    density_matrix,
    diagnostics,
    encode_initial,
    estimate_cost,
    extract_oh_pairs,
    homogenize,
    merge_proportional_pairs,
    norm_preserve,
    reduce_degree,
    run_ensemble,
    run_trajectory,
    to_tensor,
    trace_distance,
    unitary_step,
    von_neumann_entropy,
)
from polyham.systems import logistic, lorenz

LOG2 = np.log(2.0)

LORENZ_X0 = np.array([4.856, 7.291, 18.987])


def closed_form_logistic(x0, t):
    growth = np.exp(t)
    return x0 * growth / (1.0 + x0 * (growth - 1.0))


def logistic_anti():
    homogenized, _ = homogenize(logistic(), c=1.0, target_degree=3)
    return antisymmetrize(norm_preserve(to_tensor(homogenized)))


def test_01_three_index_antisymmetrization_fixture():
    start = time.perf_counter()
    field = NormPreservingTensor(
        tensor=SparseTensor(
            rank=3,
            dim=3,
            entries={(0, 1, 2): 1.0, (1, 0, 2): -0.5, (1, 2, 0): -0.5},
        ),
        source_degree=0,
    )
    result = antisymmetrize(field).tensor.entries
    expected = {
        (0, 1, 2): 2.0 / 3.0,
        (0, 2, 1): 1.0 / 3.0,
        (1, 0, 2): -2.0 / 3.0,
        (1, 2, 0): -1.0 / 3.0,
        (2, 0, 1): -1.0 / 3.0,
        (2, 1, 0): 1.0 / 3.0,
    }
    assert set(result) == set(expected)
    for key, value in expected.items():
        assert result[key] == pytest.approx(value, abs=1e-15)
    assert time.perf_counter() - start < 1.0


def test_02_six_index_degree_reduction_fixture():
    start = time.perf_counter()
    field = AntisymmetricTensor(
        tensor=SparseTensor(
            rank=6,
            dim=2,
            entries={(0, 1, 0, 0, 0, 0): -1.0, (1, 0, 0, 0, 0, 0): 1.0},
        )
    )
    result = reduce_degree(field)
    assert result.group_size == 2
    assert result.base_dim == 2
    # Exactly these eight entries and no others.
    assert result.tensor.entries == {
        (0, 1, 0, 0): -1.0,
        (0, 2, 0, 0): -1.0,
        (2, 3, 0, 0): -1.0,
        (1, 3, 0, 0): -1.0,
        (1, 0, 0, 0): 1.0,
        (2, 0, 0, 0): 1.0,
        (3, 2, 0, 0): 1.0,
        (3, 1, 0, 0): 1.0,
    }
    assert time.perf_counter() - start < 1.0


def test_03_logistic_mapping_reproduces_published_matrices():
    start = time.perf_counter()
    anti = logistic_anti()
    # The hand-derived antisymmetric tensor of dx1/dt = x1 - x1^2, with
    # latter indices in canonical sorted order.
    assert anti.tensor.entries == {
        (0, 1, 0, 0, 0, 1): -1.0,
        (0, 1, 0, 0, 1, 1): 1.0,
        (1, 0, 0, 0, 0, 1): 1.0,
        (1, 0, 0, 0, 1, 1): -1.0,
    }
    pairs = merge_proportional_pairs(extract_oh_pairs(reduce_degree(anti)))
    assert len(pairs) == 1
    expected_obs = np.zeros((4, 4))
    expected_obs[0, 1] = expected_obs[1, 0] = 0.5
    expected_obs[0, 3] = expected_obs[3, 0] = -0.5
    expected_ham = 1j * np.array(
        [
            [0.0, -1.0, -1.0, 0.0],
            [1.0, 0.0, 0.0, -1.0],
            [1.0, 0.0, 0.0, -1.0],
            [0.0, 1.0, 1.0, 0.0],
        ]
    )
    # A merged pair is determined up to one simultaneous rescaling of O
    # down and H up.  The merge keeps the first slice's Hamiltonian as the
    # representative, and for the logistic system that convention lands
    # exactly on the published matrices: the rescaling factor is 1.
    assert np.max(np.abs(pairs[0].observable - expected_obs)) <= 1e-12
    assert np.max(np.abs(pairs[0].hamiltonian - expected_ham)) <= 1e-12
    assert time.perf_counter() - start < 1.0


def test_04_logistic_exact_run_converges_first_order():
    start = time.perf_counter()
    artifact = build_artifact(logistic(), c=1.0, degree=3)

    def sup_error(dt):
        config = SimulationConfig(
            dt=dt, t_final=25.0, model=MeasurementModel(mode="exact")
        )
        result = run_trajectory(artifact, np.array([0.01]), config, seed=0)
        t = result.physical_times
        window = t <= 10.0
        assert t[-1] >= 10.0
        x = result.positions[:, 0]
        return np.max(np.abs(x[window] - closed_form_logistic(0.01, t[window])))

    coarse = sup_error(1e-3)
    fine = sup_error(5e-4)
    assert coarse <= 5e-3
    # Halving the step should at least halve the error (first order).
    assert fine <= 0.6 * coarse
    assert time.perf_counter() - start < 30.0


def test_05_logistic_ensemble_mean_tracks_exact_run():
    start = time.perf_counter()
    artifact = build_artifact(logistic(), c=1.0, degree=3)
    dt, t_final, K, s = 1e-3, 25.0, 10, 5e5
    exact = run_trajectory(
        artifact,
        np.array([0.01]),
        SimulationConfig(
            dt=dt, t_final=t_final, model=MeasurementModel(mode="exact"),
            record_stride=500,
        ),
        seed=0,
    )
    ensemble = run_ensemble(
        artifact,
        np.array([0.01]),
        SimulationConfig(
            dt=dt,
            t_final=t_final,
            model=MeasurementModel(mode="gaussian", m=s * dt, rng_seed=0),
            K=K,
            record_stride=500,
        ),
        base_seed=0,
    )
    assert all(member.failure is None for member in ensemble)
    members = np.stack([member.positions[:, 0] for member in ensemble])
    mean = members.mean(axis=0)
    # Ensemble standard error; the small floor covers the start, where all
    # members coincide and the spread is float dust.
    se = members.std(axis=0, ddof=1) / np.sqrt(K)
    deviation = np.abs(mean - exact.positions[:, 0])
    assert np.all(deviation <= 2.0 * se + 1e-9)
    assert time.perf_counter() - start < 120.0


def test_06_unitarity_and_reality_over_many_steps():
    artifact = build_artifact(lorenz(), c=20.0, degree=3)
    state = encode_initial(LORENZ_X0, c=20.0, group_size=artifact.group_size)
    state = state.astype(complex)
    rng = np.random.default_rng(7)
    stack = np.stack([p.hamiltonian for p in artifact.pairs])
    max_drift = 0.0
    max_imag = 0.0
    norm = np.linalg.norm(state)
    for _ in range(10_000):
        weights = rng.normal(size=len(artifact.pairs))
        step = unitary_step(assemble_hamiltonian(stack, weights), dt=0.01)
        state = step @ state
        new_norm = np.linalg.norm(state)
        max_drift = max(max_drift, abs(new_norm - norm))
        max_imag = max(max_imag, np.max(np.abs(state.imag)))
        norm = new_norm
    assert max_drift <= 1e-12
    assert max_imag <= 1e-8


def test_07_three_equivalent_rate_evaluations_agree():
    rng = np.random.default_rng(12)
    for system in (logistic, lorenz):
        homogenized, _ = homogenize(system(), c=1.0, target_degree=3)
        anti = antisymmetrize(norm_preserve(to_tensor(homogenized)))
        reduced = reduce_degree(anti)
        pairs = extract_oh_pairs(reduced)
        dim = homogenized.total_vars
        for _ in range(100):
            xhat = rng.normal(size=dim)
            xhat /= np.linalg.norm(xhat)
            y = np.kron(xhat, xhat)
            tensor_rate = contract_tensor(reduced.tensor, y)
            weights = [float(y @ p.observable @ y) for p in pairs]
            pair_rate = np.real(
                sum(w * (-1j * p.hamiltonian) @ y for w, p in zip(weights, pairs))
            )
            xdot = contract_tensor(anti.tensor, xhat)
            lift_rate = (np.outer(xdot, xhat) + np.outer(xhat, xdot)).ravel()
            scale = max(np.max(np.abs(tensor_rate)), 1e-30)
            assert np.max(np.abs(tensor_rate - pair_rate)) <= 1e-11 * scale
            assert np.max(np.abs(tensor_rate - lift_rate)) <= 1e-11 * scale


def test_08_lorenz_mapping_size_and_pair_count():
    start = time.perf_counter()
    artifact = build_artifact(lorenz(), c=1.0, degree=3)
    assert artifact.state_dim == 16
    assert artifact.n_qubits == 4
    assert len(artifact.pairs) <= 26
    assert time.perf_counter() - start < 10.0


def test_09_chaotic_ensemble_branches_well_behaved_does_not():
    start = time.perf_counter()
    c, dt, t_final, K, stride = 20.0, 0.02, 2400.0, 30, 100

    def run_case(beta, s):
        artifact = build_artifact(lorenz(beta=beta), c=c, degree=3)
        exact = run_trajectory(
            artifact,
            LORENZ_X0,
            SimulationConfig(
                dt=dt, t_final=t_final, model=MeasurementModel(mode="exact"),
                record_stride=stride,
            ),
            seed=0,
        )
        ensemble = run_ensemble(
            artifact,
            LORENZ_X0,
            SimulationConfig(
                dt=dt,
                t_final=t_final,
                model=MeasurementModel(mode="gaussian", m=s * dt, rng_seed=0),
                K=K,
                record_stride=stride,
            ),
            base_seed=0,
        )
        assert all(member.failure is None for member in ensemble)
        return diagnostics(ensemble, exact)

    # Chaotic regime: the ensemble decoheres, entropy grows from zero to a
    # finite branching time, and entropy tracks the trace-distance error.
    chaotic = run_case(beta=8.0 / 3.0, s=100.0)
    assert chaotic.entropy[0] <= 1e-12
    assert chaotic.branch_time is not None
    correlation = np.corrcoef(chaotic.entropy, chaotic.trace_distance)[0, 1]
    assert correlation > 0.5

    # Well-behaved regime at a sampling rate two decades higher: no branch
    # anywhere in the same window.
    stable = run_case(beta=10.0, s=1e4)
    assert stable.entropy[0] <= 1e-12
    assert stable.branch_time is None

    assert time.perf_counter() - start < 1800.0


def test_10_cost_model_is_exact_on_integer_rounds():
    unit = estimate_cost(1, 1.0, 0.1, m=10)
    assert unit.measurements == 100.0
    assert unit.hamiltonian_steps == 500.0
    benchmark = estimate_cost(26, 1.0, 1e-5, m=1e10)
    assert benchmark.measurements == 2.6e16


def test_11_entropy_and_trace_distance_diagnostics():
    rng = np.random.default_rng(4)
    state = rng.normal(size=16) + 1j * rng.normal(size=16)
    # Zero up to eigensolver dust: positive eigenvalue dust of order 1e-16
    # contributes -lambda*ln(lambda) ~ 4e-15 per mode.
    assert von_neumann_entropy(density_matrix(state)) <= 1e-12
    assert von_neumann_entropy(np.eye(16) / 16.0) == pytest.approx(
        4.0 * LOG2, abs=1e-12
    )

    def random_density(dim):
        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        rho = a @ np.conjugate(a.T)
        return rho / np.trace(rho).real

    for _ in range(100):
        a, b, c = (random_density(4) for _ in range(3))
        tab = trace_distance(a, b)
        assert abs(tab - trace_distance(b, a)) <= 1e-10
        assert trace_distance(a, a) <= 1e-10
        assert tab <= trace_distance(a, c) + trace_distance(c, b) + 1e-10
        assert -1e-10 <= tab <= 1.0 + 1e-10
