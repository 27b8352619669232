"""Walk the logistic equation through every mapping stage, printing each one.

The logistic equation dx/dt = x - x^2 is small enough to inspect every
intermediate object: the homogenized cubic system, the norm-preserving
tangent field, its antisymmetric collection, the reduced four-index tensor,
and finally the observable-Hamiltonian pairs that drive the simulation.

Run:  python3 demos/logistic_pipeline.py
"""

import numpy as np

from polyham import (
    antisymmetrize,
    extract_oh_pairs,
    homogenize,
    merge_proportional_pairs,
    norm_preserve,
    reduce_degree,
    to_tensor,
)
from polyham.systems import logistic


def show_system(title, system):
    names = system.names()
    print(f"{title}:")
    for name, equation in zip(names, system.equations):
        terms = []
        for mono in equation:
            factors = [
                names[i] if e == 1 else f"{names[i]}^{e}"
                for i, e in enumerate(mono.exponents)
                if e > 0
            ]
            body = " ".join(factors) or "1"
            if mono.coefficient == 1.0:
                terms.append(f"+ {body}")
            elif mono.coefficient == -1.0:
                terms.append(f"- {body}")
            else:
                terms.append(f"{mono.coefficient:+g} {body}")
        rhs = " ".join(terms) or "0"
        print(f"  d{name}/dt = {rhs.lstrip('+ ')}")


def show_tensor(title, tensor):
    print(f"\n{title} (rank {tensor.rank}, dim {tensor.dim}):")
    for index in sorted(tensor.entries):
        print(f"  A{index} = {tensor.entries[index]:+g}")


def show_matrix(title, matrix):
    print(f"{title}:")
    with np.printoptions(precision=3, suppress=True):
        print(matrix)


system = logistic()
show_system("original system", system)

homogenized, record = homogenize(system, c=1.0, target_degree=3)
print()
show_system("homogenized to uniform degree 3 with constant coordinate x0 = 1", homogenized)

tensor = to_tensor(homogenized)
show_tensor("coefficient tensor G", tensor)

field = norm_preserve(tensor)
show_tensor("norm-preserving field F = |x|^2 G - (x.G) x", field.tensor)

anti = antisymmetrize(field)
show_tensor("antisymmetric collection (first two indices skew)", anti.tensor)

reduced = reduce_degree(anti)
show_tensor(
    f"degree-reduced cubic tensor on dim {reduced.tensor.dim} = "
    f"{reduced.base_dim}^{reduced.group_size}",
    reduced.tensor,
)

pairs = extract_oh_pairs(reduced)
print(f"\nraw observable-Hamiltonian pairs: {len(pairs)}")
for pair in pairs:
    print(f"\npair {pair.label}:")
    show_matrix("  observable O", pair.observable)
    show_matrix("  Hamiltonian H (imaginary part shown)", pair.hamiltonian.imag)

merged = merge_proportional_pairs(pairs)
print(f"\nafter merging proportional Hamiltonians: {len(merged)} pair")
show_matrix("merged observable", merged[0].observable)
show_matrix("merged Hamiltonian (imaginary part)", merged[0].hamiltonian.imag)

print(
    "\nThe merged pair drives dy/dt' = -i <y|O|y> H y, which reproduces the"
    "\nlogistic flow on the encoded product states."
)
