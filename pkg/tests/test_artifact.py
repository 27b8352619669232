"""Pipeline artifact construction, serialization, and provenance."""

import numpy as np
import pytest

from polyham import (
    MappingError,
    ParseError,
    PipelineArtifact,
    artifact_sha256,
    build_artifact,
    homogenize,
    load_artifact,
    save_artifact,
)
from polyham.systems import logistic, lorenz


class TestBuild:
    def test_logistic_raw(self):
        artifact = build_artifact(logistic(), c=1.0)
        assert artifact.source_degree == 3
        assert artifact.base_dim == 2
        assert artifact.group_size == 2
        assert artifact.state_dim == 4
        assert artifact.n_qubits == 2
        assert len(artifact.pairs) == 2
        assert not artifact.merged

    def test_logistic_merged(self):
        artifact = build_artifact(logistic(), c=1.0, merge_pairs=True)
        assert len(artifact.pairs) == 1
        assert artifact.merged
        # Eight of sixteen Hamiltonian entries are nonzero in the merged pair.
        assert artifact.nonzero_fraction == pytest.approx(0.5)

    def test_lorenz(self):
        artifact = build_artifact(lorenz(), c=20.0)
        assert artifact.base_dim == 4
        assert artifact.state_dim == 16
        assert artifact.n_qubits == 4
        assert len(artifact.pairs) <= 26

    def test_default_degree_rounds_up_to_odd(self):
        assert build_artifact(logistic(), c=1.0).source_degree == 3
        assert build_artifact(logistic(), c=1.0, degree=5).source_degree == 5

    def test_already_homogenized_input_rejected(self):
        system, _ = homogenize(logistic(), c=1.0, target_degree=3)
        with pytest.raises(MappingError, match="constant"):
            build_artifact(system, c=1.0)

    def test_provenance_records_options(self):
        artifact = build_artifact(logistic(), c=2.0, degree=3, merge_pairs=True)
        assert artifact.provenance["c"] == 2.0
        assert artifact.provenance["merge_pairs"] is True
        assert "system_sha256" in artifact.provenance
        assert "version" in artifact.provenance

    def test_invalid_parameters_rejected(self):
        good = build_artifact(logistic(), c=1.0)
        with pytest.raises(MappingError):
            PipelineArtifact(
                pairs=good.pairs,
                c=-1.0,
                base_dim=good.base_dim,
                group_size=good.group_size,
                source_degree=good.source_degree,
            )
        with pytest.raises(MappingError):
            PipelineArtifact(
                pairs=good.pairs,
                c=1.0,
                base_dim=good.base_dim,
                group_size=good.group_size,
                source_degree=4,
            )


class TestSerialization:
    def test_round_trip(self, tmp_path):
        artifact = build_artifact(lorenz(), c=20.0)
        path = tmp_path / "lorenz.oh.json"
        save_artifact(artifact, path)
        loaded = load_artifact(path)
        assert loaded.c == artifact.c
        assert loaded.base_dim == artifact.base_dim
        assert loaded.group_size == artifact.group_size
        assert loaded.source_degree == artifact.source_degree
        assert loaded.merged == artifact.merged
        assert len(loaded.pairs) == len(artifact.pairs)
        for a, b in zip(artifact.pairs, loaded.pairs):
            assert a.label == b.label
            assert np.array_equal(a.observable, b.observable)
            assert np.array_equal(a.hamiltonian, b.hamiltonian)
        assert loaded.provenance == artifact.provenance

    def test_save_is_deterministic(self, tmp_path):
        artifact = build_artifact(logistic(), c=1.0)
        p1 = tmp_path / "a.json"
        p2 = tmp_path / "b.json"
        save_artifact(artifact, p1)
        save_artifact(artifact, p2)
        assert p1.read_bytes() == p2.read_bytes()
        assert artifact_sha256(p1) == artifact_sha256(p2)

    def test_foreign_format_rejected(self, tmp_path):
        path = tmp_path / "other.json"
        path.write_text('{"format": "something-else/9", "pairs": []}')
        with pytest.raises(ParseError, match="format"):
            load_artifact(path)

    def test_malformed_json_rejected(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            load_artifact(path)
