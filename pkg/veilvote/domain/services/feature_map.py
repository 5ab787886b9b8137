"""
Feature maps for the kNN scheme.
"""
from pathlib import Path
from typing import Union

import numpy as np

from veilvote.domain.exceptions import ConsistencyError
from veilvote.domain.models.learner import FeatureMap, FeatureMapKind
from veilvote.infrastructure.parsers.vvft_parser import read_vvft


def projection_matrix(phi: FeatureMap, input_dim: int) -> np.ndarray:
    """Seeded Gaussian projection scaled by 1/sqrt(d_phi)."""
    rng = np.random.default_rng(phi.seed)
    return rng.normal(size=(input_dim, phi.output_dim)) / np.sqrt(phi.output_dim)


def apply_feature_map(phi: FeatureMap, features: np.ndarray) -> np.ndarray:
    """
    Map rows of ``features`` into the phi space.

    Args:
        phi: Feature map
        features: n x d_in matrix (a single vector is treated as one row)

    Returns:
        n x d_phi matrix
    """
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if phi.kind is FeatureMapKind.IDENTITY:
        return features
    if phi.kind is FeatureMapKind.RANDOM_PROJECTION:
        return features @ projection_matrix(phi, features.shape[1])
    if phi.matrix.shape[0] != features.shape[1]:
        raise ConsistencyError(
            f"precomputed map expects {phi.matrix.shape[0]} input dimensions, got {features.shape[1]}"
        )
    return features @ phi.matrix


def load_feature_map(path: Union[str, Path]) -> FeatureMap:
    """
    Load a precomputed d_in x d_phi projection from a VVFT file.

    Features extracted per row by an external model are not a map: they are
    the rows of a file-backed federation, used with the identity map.

    Args:
        path: VVFT file path

    Returns:
        FeatureMap of kind PRECOMPUTED
    """
    matrix = read_vvft(path)
    return FeatureMap(
        kind=FeatureMapKind.PRECOMPUTED,
        output_dim=int(matrix.shape[1]),
        path=Path(path),
        matrix=matrix,
    )
