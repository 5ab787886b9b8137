"""
Domain models for veilvote.
"""
from veilvote.domain.models.privacy import (
    Granularity,
    Scheme,
    RdpCurve,
    MechanismParams,
    MarginRecord,
    PrivacyReport,
)
from veilvote.domain.models.vote import VoteKind, VoteVector, SecureAggregate
from veilvote.domain.models.learner import (
    AgentDataset,
    Classifier,
    FeatureMap,
    FeatureMapKind,
    LearnerConfig,
    LearnerKind,
)
from veilvote.domain.models.fedavg import FedAvgConfig, ModelUpdate, PiecewiseLinearObjective
from veilvote.domain.models.federation import (
    DataSourceKind,
    FederatedData,
    FederationSpec,
    PartitionKind,
)

__all__ = [
    'Granularity', 'Scheme', 'RdpCurve', 'MechanismParams', 'MarginRecord', 'PrivacyReport',
    'VoteKind', 'VoteVector', 'SecureAggregate',
    'AgentDataset', 'Classifier', 'FeatureMap', 'FeatureMapKind', 'LearnerConfig', 'LearnerKind',
    'FedAvgConfig', 'ModelUpdate', 'PiecewiseLinearObjective',
    'DataSourceKind', 'FederatedData', 'FederationSpec', 'PartitionKind',
]
