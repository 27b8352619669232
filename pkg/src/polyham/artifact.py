"""Pipeline artifacts: the mapped system as a portable document.

An artifact bundles everything a simulation needs: the observable-Hamiltonian
pairs as dense matrices, the encoding constants (c, base dimension, group
size, source degree), and provenance tying the document back to the input
system.  The on-disk form is JSON with format tag "oh-pipeline/1".
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._version import __version__
from .errors import MappingError, ParseError
from .mapping import (
    OHPair,
    antisymmetrize,
    extract_oh_pairs,
    merge_proportional_pairs,
    norm_preserve,
    reduce_degree,
)
from .poly_ir import PolynomialSystem, homogenize, serialize_system, to_tensor

__all__ = [
    "PipelineArtifact",
    "build_artifact",
    "save_artifact",
    "load_artifact",
    "artifact_sha256",
]

FORMAT = "oh-pipeline/1"


@dataclass(frozen=True)
class PipelineArtifact:
    """Mapped system plus the constants needed to encode and decode states.

    ``base_dim`` counts homogenized variables (constant included), so states
    live in dimension base_dim**group_size before padding.  ``source_degree``
    is the homogeneous degree before norm preservation; reconstruction uses
    it for the time rescaling.
    """

    pairs: tuple[OHPair, ...]
    c: float
    base_dim: int
    group_size: int
    source_degree: int
    merged: bool = False
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.c > 0:
            raise MappingError(f"constant coordinate must be positive, got {self.c}")
        if self.source_degree < 1 or self.source_degree % 2 == 0:
            raise MappingError(
                f"source degree must be odd and positive, got {self.source_degree}"
            )
        if self.group_size != (self.source_degree + 1) // 2:
            raise MappingError(
                f"group size {self.group_size} does not match source degree "
                f"{self.source_degree}"
            )
        dim = self.base_dim**self.group_size
        for pair in self.pairs:
            if pair.dim != dim:
                raise MappingError(
                    f"pair dimension {pair.dim} does not match base_dim**group_size = {dim}"
                )
        object.__setattr__(self, "pairs", tuple(self.pairs))

    @property
    def state_dim(self) -> int:
        return self.base_dim**self.group_size

    @property
    def n_qubits(self) -> int:
        return max(0, (self.state_dim - 1).bit_length())

    @property
    def nonzero_fraction(self) -> float:
        """Fraction of Hamiltonian entries that are nonzero, over all pairs."""
        if not self.pairs:
            return 0.0
        nonzero = sum(int(np.count_nonzero(p.hamiltonian)) for p in self.pairs)
        return nonzero / (len(self.pairs) * self.state_dim**2)


def build_artifact(
    system: PolynomialSystem,
    c: float = 1.0,
    degree: int | None = None,
    merge_pairs: bool = False,
) -> PipelineArtifact:
    """Run the whole mapping pipeline on a raw polynomial system.

    The system is homogenized at constant c to ``degree`` (default: the
    smallest odd degree at or above the system's maximum), made norm
    preserving, antisymmetrized, reduced to cubic form, and split into
    pairs.  ``merge_pairs`` combines pairs with proportional Hamiltonians.
    """
    if system.includes_constant:
        raise MappingError(
            "system already carries a constant coordinate; pass the raw system"
        )
    if degree is None:
        degree = max(1, system.max_degree)
        if degree % 2 == 0:
            degree += 1
    digest = hashlib.sha256(serialize_system(system).encode()).hexdigest()
    homogenized, record = homogenize(system, c=c, target_degree=degree)
    tensor = to_tensor(homogenized, degree=degree)
    pairs = extract_oh_pairs(reduce_degree(antisymmetrize(norm_preserve(tensor))))
    if merge_pairs:
        pairs = merge_proportional_pairs(pairs)
    provenance = {
        "system_sha256": digest,
        "c": c,
        "degree": degree,
        "merge_pairs": merge_pairs,
        "version": __version__,
    }
    return PipelineArtifact(
        pairs=tuple(pairs),
        c=record.c,
        base_dim=homogenized.total_vars,
        group_size=(degree + 1) // 2,
        source_degree=degree,
        merged=merge_pairs,
        provenance=provenance,
    )


def save_artifact(artifact: PipelineArtifact, path: str | Path) -> None:
    """Write the artifact as JSON with dense row-major matrices."""
    document = {
        "format": FORMAT,
        "version": __version__,
        "c": artifact.c,
        "base_dim": artifact.base_dim,
        "group_size": artifact.group_size,
        "source_degree": artifact.source_degree,
        "merged": artifact.merged,
        "provenance": artifact.provenance,
        "pairs": [
            {
                "label": list(pair.label),
                "observable": pair.observable.tolist(),
                "hamiltonian_real": pair.hamiltonian.real.tolist(),
                "hamiltonian_imag": pair.hamiltonian.imag.tolist(),
            }
            for pair in artifact.pairs
        ],
    }
    Path(path).write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")


def load_artifact(path: str | Path) -> PipelineArtifact:
    """Read an artifact written by save_artifact."""
    try:
        document = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc.msg}", line=exc.lineno, column=exc.colno)
    if not isinstance(document, dict) or document.get("format") != FORMAT:
        raise ParseError(
            f"not a pipeline artifact: expected format {FORMAT!r}, "
            f"got {document.get('format')!r}"
        )
    try:
        pairs = tuple(
            OHPair(
                observable=np.array(entry["observable"], dtype=float),
                hamiltonian=np.array(entry["hamiltonian_real"], dtype=float)
                + 1j * np.array(entry["hamiltonian_imag"], dtype=float),
                label=tuple(entry["label"]),
            )
            for entry in document["pairs"]
        )
        return PipelineArtifact(
            pairs=pairs,
            c=float(document["c"]),
            base_dim=int(document["base_dim"]),
            group_size=int(document["group_size"]),
            source_degree=int(document["source_degree"]),
            merged=bool(document.get("merged", False)),
            provenance=dict(document.get("provenance", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed pipeline artifact: {exc}")


def artifact_sha256(path: str | Path) -> str:
    """Hash of the artifact file bytes, for run manifests."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
