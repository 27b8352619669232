"""Polynomial dynamics as measured quantum evolution, at classical desk scale.

The package maps real polynomial ODE systems into cubic, norm-preserving,
observable-Hamiltonian form and simulates the resulting measurement-driven
piecewise-linear evolution, with diagnostics for ensemble entropy and
trajectory branching.
"""

from .analysis import (
    DensityMatrix,
    DiagnosticsSeries,
    branch_scaling_sweep,
    density_matrix,
    diagnostics,
    trace_distance,
    von_neumann_entropy,
)
from ._version import __version__
from .artifact import (
    PipelineArtifact,
    artifact_sha256,
    build_artifact,
    load_artifact,
    save_artifact,
)
from .errors import (
    GridMismatchError,
    MappingError,
    ParseError,
    PolyhamError,
    ReconstructionError,
    SimulationError,
)
from .mapping import (
    AntisymmetricTensor,
    NormPreservingTensor,
    OHPair,
    ReducedTensor,
    antisymmetrize,
    extract_oh_pairs,
    merge_proportional_pairs,
    norm_preserve,
    permutation_class_sums,
    reduce_degree,
)
from .poly_ir import (
    HomogenizationRecord,
    Monomial,
    PolynomialSystem,
    SparseTensor,
    contract_tensor,
    evaluate_system,
    homogenize,
    parse_system,
    serialize_system,
    to_tensor,
)
from .quantum import (
    MeasurementModel,
    ObservableCache,
    SnapshotHamiltonian,
    assemble_hamiltonian,
    expectation,
    pad_pairs,
    sample_expectation,
    unitary_step,
)
from .systems import linear_growth, logistic, lorenz, rigid_rotation
from .trajectory import (
    ClassicalSample,
    CostReport,
    SimulationConfig,
    TrajectoryResult,
    decode_state,
    encode_initial,
    estimate_cost,
    run_ensemble,
    run_trajectory,
)

__all__ = [
    "AntisymmetricTensor",
    "ClassicalSample",
    "CostReport",
    "DensityMatrix",
    "DiagnosticsSeries",
    "GridMismatchError",
    "HomogenizationRecord",
    "MappingError",
    "MeasurementModel",
    "Monomial",
    "NormPreservingTensor",
    "OHPair",
    "ObservableCache",
    "ParseError",
    "PipelineArtifact",
    "PolyhamError",
    "PolynomialSystem",
    "ReconstructionError",
    "ReducedTensor",
    "SimulationConfig",
    "SimulationError",
    "SnapshotHamiltonian",
    "SparseTensor",
    "TrajectoryResult",
    "antisymmetrize",
    "artifact_sha256",
    "assemble_hamiltonian",
    "branch_scaling_sweep",
    "build_artifact",
    "contract_tensor",
    "decode_state",
    "density_matrix",
    "diagnostics",
    "encode_initial",
    "estimate_cost",
    "evaluate_system",
    "expectation",
    "extract_oh_pairs",
    "homogenize",
    "linear_growth",
    "load_artifact",
    "logistic",
    "lorenz",
    "merge_proportional_pairs",
    "norm_preserve",
    "pad_pairs",
    "parse_system",
    "permutation_class_sums",
    "reduce_degree",
    "rigid_rotation",
    "run_ensemble",
    "run_trajectory",
    "sample_expectation",
    "save_artifact",
    "serialize_system",
    "to_tensor",
    "unitary_step",
    "von_neumann_entropy",
]
