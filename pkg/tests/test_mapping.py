"""Pipeline stages: norm preservation, antisymmetry, reduction, pair extraction."""

import numpy as np
import pytest

from polyham import (
    AntisymmetricTensor,
    MappingError,
    NormPreservingTensor,
    SparseTensor,
    antisymmetrize,
    contract_tensor,
    extract_oh_pairs,
    homogenize,
    merge_proportional_pairs,
    norm_preserve,
    permutation_class_sums,
    reduce_degree,
    to_tensor,
)
from polyham.systems import linear_growth, logistic, lorenz, rigid_rotation


def logistic_field():
    homogenized, _ = homogenize(logistic(), c=1.0, target_degree=3)
    return norm_preserve(to_tensor(homogenized))


def lorenz_field():
    homogenized, _ = homogenize(lorenz(), c=1.0, target_degree=3)
    return norm_preserve(to_tensor(homogenized))


def random_unit(rng, dim):
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v)


class TestNormPreserve:
    def test_logistic_matches_published_nonzeros(self):
        field = logistic_field()
        # F = |x|^2 G - (x . G) x for G o homogenized logistic, collected on
        # canonical (first index, sorted rest) slots.
        expected = {
            (0, 0, 0, 0, 1, 1): -1.0,
            (0, 0, 0, 1, 1, 1): 1.0,
            (1, 0, 0, 0, 0, 1): 1.0,
            (1, 0, 0, 0, 1, 1): -1.0,
        }
        collected = {}
        for index, coeff in field.tensor.entries.items():
            key = (index[0],) + tuple(sorted(index[1:]))
            collected[key] = collected.get(key, 0.0) + coeff
        assert set(collected) == set(expected)
        for key, value in expected.items():
            assert collected[key] == pytest.approx(value, abs=1e-15)

    def test_orthogonality_on_random_unit_vectors(self):
        rng = np.random.default_rng(5)
        for field, dim in ((logistic_field(), 2), (lorenz_field(), 4)):
            for _ in range(100):
                x = random_unit(rng, dim)
                f = contract_tensor(field.tensor, x)
                assert abs(float(np.dot(x, f))) <= 1e-12

    def test_already_tangent_field_keeps_its_dynamics(self):
        # Rotation at rate x3^2 has G . x = 0 identically, so F reduces to
        # |x|^2 G and matches G on unit vectors.
        tensor = to_tensor(rigid_rotation())
        field = norm_preserve(tensor)
        rng = np.random.default_rng(6)
        for _ in range(100):
            x = random_unit(rng, 3)
            original = contract_tensor(tensor, x)
            projected = contract_tensor(field.tensor, x)
            assert np.max(np.abs(projected - original)) <= 1e-13

    def test_linear_growth_projects_to_circle_field(self):
        lam = 0.7
        homogenized, _ = homogenize(linear_growth(lam), c=1.0, target_degree=1)
        field = norm_preserve(to_tensor(homogenized))
        rng = np.random.default_rng(7)
        for _ in range(50):
            x = random_unit(rng, 2)
            f = contract_tensor(field.tensor, x)
            expected = np.array([-lam * x[0] * x[1] ** 2, lam * x[0] ** 2 * x[1]])
            assert np.max(np.abs(f - expected)) <= 1e-13

    def test_class_sums_vanish(self):
        for field in (logistic_field(), lorenz_field()):
            for total in permutation_class_sums(field.tensor).values():
                assert abs(total) <= 1e-12

    def test_violating_tensor_rejected(self):
        bad = SparseTensor(rank=3, dim=2, entries={(0, 0, 1): 1.0})
        with pytest.raises(MappingError, match="class"):
            NormPreservingTensor(tensor=bad, source_degree=0)


class TestAntisymmetrize:
    def test_three_index_fixture_is_exact(self):
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

    def test_zero_tensor_maps_to_zero(self):
        field = NormPreservingTensor(
            tensor=SparseTensor(rank=4, dim=2, entries={}), source_degree=1
        )
        assert antisymmetrize(field).tensor.entries == {}

    def test_exact_antisymmetry_and_no_diagonal(self):
        result = antisymmetrize(lorenz_field()).tensor.entries
        for index, coeff in result.items():
            assert index[0] != index[1]
            mirror = (index[1], index[0]) + index[2:]
            assert result[mirror] == -coeff

    def test_dynamics_preserved_on_random_vectors(self):
        rng = np.random.default_rng(8)
        for field, dim in ((logistic_field(), 2), (lorenz_field(), 4)):
            anti = antisymmetrize(field)
            for _ in range(50):
                x = rng.normal(size=dim)
                before = contract_tensor(field.tensor, x)
                after = contract_tensor(anti.tensor, x)
                scale = max(1.0, float(np.max(np.abs(before))))
                assert np.max(np.abs(before - after)) <= 1e-12 * scale

    def test_idempotent_on_dynamics(self):
        rng = np.random.default_rng(9)
        once = antisymmetrize(lorenz_field())
        again = antisymmetrize(
            NormPreservingTensor(tensor=once.tensor, source_degree=3)
        )
        for _ in range(50):
            x = rng.normal(size=4)
            first = contract_tensor(once.tensor, x)
            second = contract_tensor(again.tensor, x)
            scale = max(1.0, float(np.max(np.abs(first))))
            assert np.max(np.abs(first - second)) <= 1e-13 * scale

    def test_class_sum_violation_reported_with_worst_class(self):
        bad = SparseTensor(rank=3, dim=2, entries={(0, 1, 1): 1.0})
        field = NormPreservingTensor.__new__(NormPreservingTensor)
        object.__setattr__(field, "tensor", bad)
        object.__setattr__(field, "source_degree", 0)
        with pytest.raises(MappingError, match=r"\(0, 1, 1\)"):
            antisymmetrize(field)


class TestReduceDegree:
    def test_six_index_fixture_is_exact(self):
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
        expected = {
            (0, 1, 0, 0): -1.0,
            (0, 2, 0, 0): -1.0,
            (2, 3, 0, 0): -1.0,
            (1, 3, 0, 0): -1.0,
            (1, 0, 0, 0): 1.0,
            (2, 0, 0, 0): 1.0,
            (3, 2, 0, 0): 1.0,
            (3, 1, 0, 0): 1.0,
        }
        assert result.tensor.entries == expected

    def test_logistic_slice_entry_from_worked_example(self):
        reduced = reduce_degree(antisymmetrize(logistic_field()))
        # Flattened (1,0) row, (0,0) column of the nu=(0,0), eta=(0,1) slice.
        assert reduced.tensor.entries[(2, 0, 0, 1)] == pytest.approx(1.0, abs=1e-14)

    def test_zero_tensor(self):
        field = AntisymmetricTensor(tensor=SparseTensor(rank=6, dim=2, entries={}))
        assert reduce_degree(field).tensor.entries == {}

    def test_even_source_degree_rejected(self):
        field = AntisymmetricTensor(tensor=SparseTensor(rank=5, dim=2, entries={}))
        with pytest.raises(MappingError, match="odd"):
            reduce_degree(field)

    def test_trailing_pair_is_folded(self):
        reduced = reduce_degree(antisymmetrize(lorenz_field()))
        for index in reduced.tensor.entries:
            assert index[2] <= index[3]


class TestExtractPairs:
    def test_logistic_yields_two_proportional_raw_pairs(self):
        pairs = extract_oh_pairs(reduce_degree(antisymmetrize(logistic_field())))
        assert len(pairs) == 2
        h0, h1 = pairs[0].hamiltonian, pairs[1].hamiltonian
        scale = np.vdot(h0, h1).real / np.vdot(h0, h0).real
        assert np.linalg.norm(h1 - scale * h0) <= 1e-12 * np.linalg.norm(h1)

    def test_lorenz_pair_count_within_bound(self):
        pairs = extract_oh_pairs(reduce_degree(antisymmetrize(lorenz_field())))
        assert len(pairs) <= 26

    def test_zero_tensor_gives_no_pairs(self):
        from polyham import ReducedTensor

        reduced = ReducedTensor(
            tensor=SparseTensor(rank=4, dim=4, entries={}), group_size=2, base_dim=2
        )
        assert extract_oh_pairs(reduced) == []

    def test_pair_matrices_have_required_structure(self):
        pairs = extract_oh_pairs(reduce_degree(antisymmetrize(lorenz_field())))
        for pair in pairs:
            assert np.array_equal(pair.observable, pair.observable.T)
            assert np.all(pair.hamiltonian.real == 0.0)
            generator = -1j * pair.hamiltonian
            assert np.all(generator.imag == 0.0)
            assert np.array_equal(generator.real, -generator.real.T)

    def test_reconstruction_identity_on_random_states(self):
        reduced = reduce_degree(antisymmetrize(lorenz_field()))
        pairs = extract_oh_pairs(reduced)
        rng = np.random.default_rng(10)
        for _ in range(20):
            y = random_unit(rng, 16)
            direct = contract_tensor(reduced.tensor, y)
            weights = [float(y @ p.observable @ y) for p in pairs]
            summed = sum(
                w * (-1j * p.hamiltonian) @ y for w, p in zip(weights, pairs)
            )
            assert np.max(np.abs(summed.imag)) == 0.0
            assert np.max(np.abs(summed.real - direct)) <= 1e-11


class TestMergePairs:
    def test_logistic_merges_to_single_published_pair(self):
        pairs = merge_proportional_pairs(
            extract_oh_pairs(reduce_degree(antisymmetrize(logistic_field())))
        )
        assert len(pairs) == 1
        observable = pairs[0].observable
        hamiltonian = pairs[0].hamiltonian
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
        # The merge chooses the first slice as the representative; for the
        # logistic system that convention lands exactly on the published
        # matrices, so the allowed simultaneous rescaling factor is 1.
        assert np.max(np.abs(observable - expected_obs)) <= 1e-12
        assert np.max(np.abs(hamiltonian - expected_ham)) <= 1e-12

    def test_independent_hamiltonians_untouched(self):
        from polyham import OHPair

        def generator(i, j):
            k = np.zeros((4, 4))
            k[i, j] = -1.0
            k[j, i] = 1.0
            return 1j * k

        obs = np.eye(4)
        pairs = [
            OHPair(observable=obs, hamiltonian=generator(0, 1), label=(0, 1)),
            OHPair(observable=obs, hamiltonian=generator(2, 3), label=(2, 3)),
        ]
        merged = merge_proportional_pairs(pairs)
        assert len(merged) == 2
        for before, after in zip(pairs, merged):
            assert np.array_equal(before.observable, after.observable)
            assert np.array_equal(before.hamiltonian, after.hamiltonian)

    def test_duplicated_list_halves_with_doubled_observables(self):
        pairs = extract_oh_pairs(reduce_degree(antisymmetrize(lorenz_field())))
        base = [p for p in pairs[:3]]
        merged = merge_proportional_pairs(base + base)
        assert len(merged) == len(merge_proportional_pairs(base))
        rng = np.random.default_rng(11)
        for _ in range(20):
            y = random_unit(rng, 16)

            def total(pair_list):
                return sum(
                    float(y @ p.observable @ y) * p.hamiltonian for p in pair_list
                )

            before = total(base + base)
            after = total(merged)
            assert np.max(np.abs(before - after)) <= 1e-12


class TestThreeWayEquivalence:
    @pytest.mark.parametrize("system", [logistic, lorenz])
    def test_contraction_pairs_and_product_rule_agree(self, system):
        homogenized, _ = homogenize(system(), c=1.0, target_degree=3)
        anti = antisymmetrize(norm_preserve(to_tensor(homogenized)))
        reduced = reduce_degree(anti)
        pairs = extract_oh_pairs(reduced)
        dim = homogenized.total_vars
        rng = np.random.default_rng(12)
        for _ in range(100):
            xhat = random_unit(rng, dim)
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
