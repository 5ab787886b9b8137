"""
Commands for veilvote.
"""
from veilvote.application.commands.run_commands import (
    FederationSettings,
    LearnerSettings,
    FeatureMapSettings,
    RunAeDpflCommand,
    RunKnnDpflCommand,
    RunDpFedAvgCommand,
    RunFedAvgCommand
)

__all__ = [
    'FederationSettings',
    'LearnerSettings',
    'FeatureMapSettings',
    'RunAeDpflCommand',
    'RunKnnDpflCommand',
    'RunDpFedAvgCommand',
    'RunFedAvgCommand'
]
