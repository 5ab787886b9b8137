"""
Tests for synthetic federations, file-backed datasets and partitioning.
"""
import itertools

import numpy as np
import pytest

from veilvote.domain.exceptions import ConfigError, ConsistencyError, ParameterError
from veilvote.domain.models.federation import DataSourceKind, FederationSpec, PartitionKind
from veilvote.domain.models.learner import AgentDataset
from veilvote.domain.services.data_generator import (
    build_federation,
    class_means,
    generate_synthetic,
    load_file_backed,
)
from veilvote.domain.services.partitioner import agent_classes, partition


class TestSyntheticFederation:
    """Test cases for Gaussian-blob federations."""

    def test_sizes(self, small_spec):
        data = generate_synthetic(small_spec)
        assert len(data.agents) == 5
        assert all(agent.size == 20 for agent in data.agents)
        assert data.public_pool_size == 30
        assert data.test.size == 60
        assert data.input_dim == 5
        assert data.num_classes == 3

    def test_deterministic(self, small_spec):
        first, second = generate_synthetic(small_spec), generate_synthetic(small_spec)
        assert np.array_equal(first.public_features, second.public_features)
        for a, b in zip(first.agents, second.agents):
            assert np.array_equal(a.features, b.features)
            assert np.array_equal(a.labels, b.labels)

    def test_class_means_are_separated(self, small_spec):
        means = class_means(small_spec, np.random.default_rng(0))
        for i, j in itertools.combinations(range(3), 2):
            assert np.linalg.norm(means[i] - means[j]) == pytest.approx(6.0)

    def test_more_classes_than_dimensions(self):
        spec = FederationSpec(num_classes=6, input_dim=2)
        means = class_means(spec, np.random.default_rng(0))
        assert means.shape == (6, 2)

    def test_label_sorted(self):
        spec = FederationSpec(num_agents=6, num_classes=3, partition=PartitionKind.LABEL_SORTED,
                              classes_per_agent=1, samples_per_agent=20, public_pool_size=10, test_size=10)
        data = generate_synthetic(spec)
        for agent_id, agent in enumerate(data.agents):
            assert agent.class_set() == set(agent_classes(agent_id, 1, 3))

    def test_agent_classes_wrap_around(self):
        assert agent_classes(4, 3, 5) == [4, 0, 1]

    def test_label_sorted_needs_classes_per_agent(self):
        with pytest.raises(ConsistencyError):
            FederationSpec(partition=PartitionKind.LABEL_SORTED)

    def test_domain_shift_offsets(self):
        offsets = [[float(i)] * 5 for i in range(4)]
        common = dict(num_agents=4, num_classes=3, input_dim=5, samples_per_agent=10,
                      public_pool_size=10, test_size=10, seed=2)
        plain = generate_synthetic(FederationSpec(partition=PartitionKind.IID, **common))
        shifted = generate_synthetic(FederationSpec(partition=PartitionKind.DOMAIN_SHIFT,
                                                    domain_offsets=offsets, **common))
        assert np.array_equal(plain.public_features, shifted.public_features)
        for i, (a, b) in enumerate(zip(plain.agents, shifted.agents)):
            assert np.allclose(b.features, a.features + offsets[i])
            assert b.domain_tag == f"shifted-{i}"

    def test_domain_offsets_shape(self):
        with pytest.raises(ConsistencyError):
            FederationSpec(num_agents=2, input_dim=3, domain_offsets=[[0.0, 0.0]])

    def test_too_many_agents(self):
        data = AgentDataset.create(np.zeros((3, 2)), [0, 1, 0], 2)
        with pytest.raises(ParameterError):
            partition(data, FederationSpec(num_agents=5, input_dim=2, num_classes=2), np.random.default_rng(0))

    def test_iid_sizes_differ_by_at_most_one(self):
        data = AgentDataset.create(np.zeros((23, 2)), np.arange(23) % 2, 2)
        shards = partition(data, FederationSpec(num_agents=5, input_dim=2, num_classes=2), np.random.default_rng(0))
        sizes = [shard.size for shard in shards]
        assert sum(sizes) == 23
        assert max(sizes) - min(sizes) <= 1


class TestFileBackedFederation:
    """Test cases for VVFT plus labels CSV datasets."""

    def test_split(self, file_backed_files):
        data_path, labels_path, _, _ = file_backed_files
        spec = FederationSpec(num_agents=4, num_classes=2, input_dim=3, public_pool_size=10, test_size=10,
                              source=DataSourceKind.FILE_BACKED, data_path=data_path, labels_path=labels_path)
        data = load_file_backed(data_path, labels_path, spec)
        assert data.test.size == 10
        assert data.public_pool_size == 10
        assert sum(agent.size for agent in data.agents) == 40
        assert data.input_dim == 3

    def test_build_federation_dispatches(self, file_backed_files):
        data_path, labels_path, _, _ = file_backed_files
        spec = FederationSpec(num_agents=2, num_classes=2, input_dim=3, public_pool_size=5, test_size=5,
                              source=DataSourceKind.FILE_BACKED, data_path=data_path, labels_path=labels_path)
        assert build_federation(spec).metadata["data_path"] == str(data_path)

    def test_row_count_mismatch(self, file_backed_files, tmp_path):
        data_path, _, _, _ = file_backed_files
        short_labels = tmp_path / "short.csv"
        short_labels.write_text("index,label\n0,0\n1,1\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_file_backed(data_path, short_labels)

    def test_label_exceeds_classes(self, file_backed_files):
        data_path, labels_path, _, _ = file_backed_files
        spec = FederationSpec(num_agents=2, num_classes=2, source=DataSourceKind.FILE_BACKED,
                              data_path=data_path, labels_path=labels_path, public_pool_size=5, test_size=5)
        labels_path.write_text("index,label\n" + "\n".join(f"{i},{i % 3}" for i in range(60)) + "\n",
                               encoding="utf-8")
        with pytest.raises(ConfigError):
            load_file_backed(data_path, labels_path, spec)

    def test_not_enough_training_rows(self, file_backed_files):
        data_path, labels_path, _, _ = file_backed_files
        spec = FederationSpec(num_agents=2, num_classes=2, source=DataSourceKind.FILE_BACKED,
                              data_path=data_path, labels_path=labels_path, public_pool_size=30, test_size=30)
        with pytest.raises(ParameterError):
            load_file_backed(data_path, labels_path, spec)

    def test_file_backed_needs_paths(self):
        with pytest.raises(ConsistencyError):
            FederationSpec(source=DataSourceKind.FILE_BACKED)
