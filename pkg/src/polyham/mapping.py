"""Transformations from a polynomial tensor field to observable-Hamiltonian pairs.

The chain is

    to_tensor -> norm_preserve -> antisymmetrize -> reduce_degree -> extract_oh_pairs

Each stage consumes the previous stage's output type, and each stage preserves
the dynamics it is allowed to change only in the documented way: norm
preservation rescales time on the unit sphere, antisymmetrization leaves the
contraction on symmetric arguments untouched, degree reduction embeds the state
in its tensor power, and pair extraction is a re-indexing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import MappingError
from .poly_ir import SparseTensor

__all__ = [
    "NormPreservingTensor",
    "AntisymmetricTensor",
    "ReducedTensor",
    "OHPair",
    "norm_preserve",
    "antisymmetrize",
    "reduce_degree",
    "extract_oh_pairs",
    "merge_proportional_pairs",
    "permutation_class_sums",
]

# An exactly-representable bound on how far the per-class coefficient sums may
# stray from zero before antisymmetrization is meaningless.
CLASS_SUM_TOL = 1e-12


def permutation_class_sums(tensor: SparseTensor) -> dict[tuple[int, ...], float]:
    """Sum of stored coefficients over each index multiset.

    Entries whose indices are permutations of one another belong to the same
    class; the returned dict maps the sorted index tuple of each class to the
    sum of its stored coefficients.
    """
    sums: dict[tuple[int, ...], float] = {}
    for index, coeff in tensor.entries.items():
        key = tuple(sorted(index))
        sums[key] = sums.get(key, 0.0) + coeff
    return sums


def _class_scales(tensor: SparseTensor) -> dict[tuple[int, ...], float]:
    scales: dict[tuple[int, ...], float] = {}
    for index, coeff in tensor.entries.items():
        key = tuple(sorted(index))
        scales[key] = max(scales.get(key, 0.0), abs(coeff))
    return scales


def _check_class_sums(tensor: SparseTensor, stage: str) -> None:
    sums = permutation_class_sums(tensor)
    scales = _class_scales(tensor)
    worst_key = None
    worst = 0.0
    for key, total in sums.items():
        rel = abs(total) / max(1.0, scales[key])
        if rel > worst:
            worst = rel
            worst_key = key
    if worst > CLASS_SUM_TOL:
        raise MappingError(
            f"coefficients over index class {worst_key} sum to {worst:.3e} "
            f"(tolerance {CLASS_SUM_TOL:.0e}); the tensor field is not "
            "tangent to spheres",
            stage=stage,
        )


@dataclass(frozen=True)
class NormPreservingTensor:
    """Homogeneous tensor field tangent to every sphere about the origin.

    ``tensor`` has rank ``source_degree + 3``; contracting it with x on the
    latter indices gives a vector orthogonal to x.  The coefficients of every
    permutation class of indices sum to zero, which is what orthogonality on
    all of space requires, and which antisymmetrization later relies on.
    """

    tensor: SparseTensor
    source_degree: int

    def __post_init__(self) -> None:
        if self.source_degree < 0:
            raise MappingError("source degree must be non-negative", stage="norm_preserve")
        if self.tensor.rank != self.source_degree + 3:
            raise MappingError(
                f"rank {self.tensor.rank} does not match source degree "
                f"{self.source_degree} (expected rank {self.source_degree + 3})",
                stage="norm_preserve",
            )
        _check_class_sums(self.tensor, "norm_preserve")


@dataclass(frozen=True)
class AntisymmetricTensor:
    """Tensor antisymmetric in its first two indices, sorted in the rest.

    Stored entries use a canonical representative: the first two indices are
    literal and the remaining indices are non-decreasing.  Contraction against
    a symmetric argument (the same vector in every latter slot) is unchanged
    from the tensor it was built from.
    """

    tensor: SparseTensor

    def __post_init__(self) -> None:
        for index in self.tensor.entries:
            rest = index[2:]
            if tuple(sorted(rest)) != rest:
                raise MappingError(
                    f"latter indices of {index} are not sorted", stage="antisymmetrize"
                )
            if index[0] == index[1]:
                raise MappingError(
                    f"entry {index} repeats its first index pair; antisymmetry "
                    "forces it to vanish",
                    stage="antisymmetrize",
                )
            mirror = (index[1], index[0]) + rest
            stored = self.tensor.entries[index]
            other = self.tensor.entries.get(mirror, 0.0)
            if other != -stored:
                raise MappingError(
                    f"entries {index} and {mirror} are not exact negatives",
                    stage="antisymmetrize",
                )


@dataclass(frozen=True)
class ReducedTensor:
    """Rank-4 tensor over the flattened tensor-power space.

    Indices run over 0..base_dim**group_size - 1; an index decodes to a tuple
    of ``group_size`` base indices in row-major order.  Antisymmetric in the
    first index pair, symmetric in the last (the fold keeps only slots with
    third index <= fourth index).
    """

    tensor: SparseTensor
    group_size: int
    base_dim: int

    def __post_init__(self) -> None:
        if self.group_size < 1:
            raise MappingError("group size must be at least 1", stage="reduce_degree")
        if self.tensor.dim != self.base_dim**self.group_size:
            raise MappingError(
                f"dimension {self.tensor.dim} is not base_dim**group_size "
                f"= {self.base_dim**self.group_size}",
                stage="reduce_degree",
            )
        for index in self.tensor.entries:
            if index[2] > index[3]:
                raise MappingError(
                    f"entry {index} has unsorted trailing pair", stage="reduce_degree"
                )


@dataclass(frozen=True)
class OHPair:
    """One observable-Hamiltonian pair.

    ``observable`` is real symmetric with a single unit diagonal entry or a
    single symmetric half-half pair; ``hamiltonian`` is purely imaginary and
    Hermitian, so the generated evolution is real orthogonal.  ``label`` is
    the flattened (row, column) the observable projects onto.
    """

    observable: np.ndarray
    hamiltonian: np.ndarray
    label: tuple[int, int]

    def __post_init__(self) -> None:
        obs = np.asarray(self.observable, dtype=float)
        ham = np.asarray(self.hamiltonian, dtype=complex)
        if obs.shape != ham.shape or obs.ndim != 2 or obs.shape[0] != obs.shape[1]:
            raise MappingError("observable and hamiltonian must be square and congruent")
        if not np.array_equal(obs, obs.T):
            raise MappingError("observable must equal its transpose exactly")
        if np.any(ham.real != 0.0):
            raise MappingError("hamiltonian must be purely imaginary")
        if not np.array_equal(ham.imag, -ham.imag.T):
            raise MappingError("hamiltonian must be Hermitian (imaginary antisymmetric)")
        object.__setattr__(self, "observable", obs)
        object.__setattr__(self, "hamiltonian", ham)
        obs.setflags(write=False)
        ham.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.observable.shape[0]


def norm_preserve(tensor: SparseTensor) -> NormPreservingTensor:
    """Project a homogeneous tensor field onto the tangent spaces of spheres.

    For the degree-q field G the result represents |x|^2 G(x) - (x . G(x)) x,
    a degree-(q+2) field whose contraction is orthogonal to x everywhere.  On
    the unit sphere it traces the same paths as G up to the time rescaling
    handled at reconstruction.
    """
    q = tensor.rank - 1
    dim = tensor.dim
    out: dict[tuple[int, ...], float] = {}
    for index, coeff in tensor.entries.items():
        target, rest = index[0], index[1:]
        for i in range(dim):
            scaled = (target,) + tuple(sorted(rest + (i, i)))
            out[scaled] = out.get(scaled, 0.0) + coeff
            radial = (i,) + tuple(sorted((target,) + rest + (i,)))
            out[radial] = out.get(radial, 0.0) - coeff
    result = SparseTensor.from_entries(rank=tensor.rank + 2, dim=dim, entries=out)
    return NormPreservingTensor(tensor=result, source_degree=q)


def _distinct_permutations(index: tuple[int, ...]) -> set[tuple[int, ...]]:
    return set(itertools.permutations(index))


def antisymmetrize(field: NormPreservingTensor) -> AntisymmetricTensor:
    """Average index swaps so the result is antisymmetric in its first pair.

    For each multi-index a the new coefficient is

        A_a = (1/r) * sum_{i=2..r} (F_{s2i(a)} - F_{s1i(s2i(a))})

    where r is the rank, s_ki swaps positions k and i (s_22 is the identity,
    so the i = 2 term compares a against its first-pair swap), and lookups
    read the stored entries literally (absent entries count as zero).  Contracting A
    with the same vector in every latter slot reproduces the F contraction
    because the per-class coefficient sums vanish.  The output is collected
    onto canonical representatives: first two indices literal, the rest
    sorted, like terms summed.
    """
    tensor = field.tensor
    rank = tensor.rank
    _check_class_sums(tensor, "antisymmetrize")

    entries = tensor.entries
    classes: set[tuple[int, ...]] = {tuple(sorted(index)) for index in entries}

    def raw(alpha: tuple[int, ...]) -> float:
        total = 0.0
        for i in range(1, rank):
            swapped = list(alpha)
            swapped[1], swapped[i] = swapped[i], swapped[1]
            first = entries.get(tuple(swapped), 0.0)
            swapped[0], swapped[i] = swapped[i], swapped[0]
            second = entries.get(tuple(swapped), 0.0)
            total += first - second
        return total

    # Each canonical slot (a, b, sorted rest) collects the slot values of
    # every ordering of its rest.  Summing the orderings in one fixed order
    # makes the mirror slot's sum an exact term-by-term negation, so the
    # antisymmetry of the output holds to the last bit.
    out: dict[tuple[int, ...], float] = {}
    for cls in classes:
        distinct = sorted(set(cls))
        for a in distinct:
            for b in distinct:
                if a == b:
                    continue
                rest = list(cls)
                rest.remove(a)
                rest.remove(b)
                total = 0.0
                for tail in sorted(_distinct_permutations(tuple(rest))):
                    total += raw((a, b) + tail)
                if total != 0.0:
                    out[(a, b) + tuple(rest)] = total / rank
    result = SparseTensor.from_entries(rank=rank, dim=tensor.dim, entries=out)
    return AntisymmetricTensor(tensor=result)


def reduce_degree(field: AntisymmetricTensor) -> ReducedTensor:
    """Rewrite the high-rank tensor as a rank-4 tensor on a tensor power.

    With rank q+3 and g = (q+1)/2, each entry spreads over g placements of
    its first index pair inside a g-tuple, with the remaining slots filled by
    every padding tuple and matched between the first two grouped indices:

        M_{AB,nu,eta} = sum_i [prod_{j != i} delta_{A_j B_j}] A_{A_i B_i nu eta}

    Grouped indices flatten row-major.  The trailing pair is folded so the
    third flattened index never exceeds the fourth, which leaves dynamics on
    symmetric states unchanged.
    """
    tensor = field.tensor
    q = tensor.rank - 3
    if q < 1 or q % 2 == 0:
        raise MappingError(
            f"rank {tensor.rank} implies source degree {q}; degree reduction "
            "needs an odd degree of at least 1",
            stage="reduce_degree",
        )
    g = (q + 1) // 2
    d = tensor.dim

    def flatten(group: tuple[int, ...]) -> int:
        value = 0
        for part in group:
            value = value * d + part
        return value

    out: dict[tuple[int, ...], float] = {}
    for index, coeff in tensor.entries.items():
        a, b = index[0], index[1]
        nu = flatten(index[2 : 2 + g])
        eta = flatten(index[2 + g :])
        if eta < nu:
            nu, eta = eta, nu
        for i in range(g):
            for pad in itertools.product(range(d), repeat=g - 1):
                alpha = flatten(pad[:i] + (a,) + pad[i:])
                beta = flatten(pad[:i] + (b,) + pad[i:])
                key = (alpha, beta, nu, eta)
                out[key] = out.get(key, 0.0) + coeff
    result = SparseTensor.from_entries(rank=4, dim=d**g, entries=out)
    return ReducedTensor(tensor=result, group_size=g, base_dim=d)


def extract_oh_pairs(field: ReducedTensor) -> list[OHPair]:
    """Split the rank-4 tensor into one observable-Hamiltonian pair per slice.

    Slice (nu, eta) yields the symmetric projector onto matrix slot (nu, eta)
    as the observable and i times the slice as the Hamiltonian.  Slices are
    emitted in lexicographic (nu, eta) order.
    """
    dim = field.tensor.dim
    slices: dict[tuple[int, int], dict[tuple[int, int], float]] = {}
    for index, coeff in field.tensor.entries.items():
        label = (index[2], index[3])
        slices.setdefault(label, {})[(index[0], index[1])] = coeff

    pairs: list[OHPair] = []
    for label in sorted(slices):
        nu, eta = label
        obs = np.zeros((dim, dim))
        if nu == eta:
            obs[nu, nu] = 1.0
        else:
            obs[nu, eta] = 0.5
            obs[eta, nu] = 0.5
        ham = np.zeros((dim, dim), dtype=complex)
        for (alpha, beta), coeff in slices[label].items():
            ham[alpha, beta] = 1j * coeff
        pairs.append(OHPair(observable=obs, hamiltonian=ham, label=label))
    return pairs


def merge_proportional_pairs(pairs: list[OHPair], tol: float = 1e-12) -> list[OHPair]:
    """Combine pairs whose Hamiltonians are real multiples of one another.

    When H_k = s * H_ref with |H_k - s H_ref| <= tol * |H_k| in Frobenius
    norm, the observables combine as O_ref + s * O_k and H_ref is kept, so
    the summed expectation dynamics are unchanged.  Pairs with no
    proportional partner pass through untouched; the first pair of each
    proportional family supplies the representative Hamiltonian and label.
    """
    reps: list[tuple[np.ndarray, np.ndarray, tuple[int, int]]] = []
    for pair in pairs:
        ham = pair.hamiltonian
        merged = False
        for rep in reps:
            ref = rep[1]
            denom = float(np.vdot(ref, ref).real)
            scale = float(np.vdot(ref, ham).real) / denom
            if np.linalg.norm(ham - scale * ref) <= tol * np.linalg.norm(ham):
                rep[0] += scale * pair.observable
                merged = True
                break
        if not merged:
            reps.append([pair.observable.copy(), ham.copy(), pair.label])  # type: ignore[arg-type]
    return [OHPair(observable=obs, hamiltonian=ham, label=label) for obs, ham, label in reps]
