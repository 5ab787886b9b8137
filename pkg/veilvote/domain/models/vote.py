"""
Domain models for votes and the released aggregate.
"""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from veilvote.domain.exceptions import ParameterError

_SIMPLEX_TOLERANCE = 1e-9


class VoteKind(str, Enum):
    """What a vote vector represents."""
    ONE_HOT = "one_hot"
    FREQUENCY = "frequency"
    SOFT = "soft"
    NOISY = "noisy"


@dataclass(frozen=True, eq=False)
class VoteVector:
    """A C-dimensional vote of one agent on one query."""
    values: np.ndarray
    kind: VoteKind

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size < 2:
            raise ParameterError(f"vote must be a vector of at least 2 classes, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "kind", VoteKind(self.kind))

        if self.kind is VoteKind.ONE_HOT:
            if np.count_nonzero(values == 1.0) != 1 or np.count_nonzero(values) != 1:
                raise ParameterError("one-hot vote must have exactly one coordinate equal to 1")
        elif self.kind in (VoteKind.FREQUENCY, VoteKind.SOFT):
            if np.any(values < 0) or abs(values.sum() - 1.0) > _SIMPLEX_TOLERANCE:
                raise ParameterError(f"{self.kind.value} vote must lie in the probability simplex")

    @property
    def num_classes(self) -> int:
        return int(self.values.size)

    def argmax(self) -> int:
        """Index of the largest coordinate, lowest index on ties."""
        return int(np.argmax(self.values))

    def __eq__(self, other) -> bool:
        if not isinstance(other, VoteVector):
            return NotImplemented
        return self.kind == other.kind and np.array_equal(self.values, other.values)

    __hash__ = None


@dataclass(frozen=True)
class SecureAggregate:
    """
    Output of the secure vote.

    Only ``released_label`` and ``query_id`` are public. The noiseless margin
    rides along for the accountant and is read by the trust boundary's margin
    ledger, never by the harness.
    """
    released_label: int
    query_id: int
    _noiseless_margin: float = field(default=0.0, repr=False, compare=False)
