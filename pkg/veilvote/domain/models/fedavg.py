"""
Domain models for the gradient baseline.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from veilvote.domain.exceptions import ConsistencyError, ParameterError

CLIP_SLACK = 1e-12


@dataclass
class ModelUpdate:
    """A flat parameter delta sent by one agent in one round."""
    delta: np.ndarray
    clipped: bool = False
    pre_clip_norm: float = 0.0

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.delta))


@dataclass
class FedAvgConfig:
    """
    Settings of FedAvg and DP-FedAvg.

    ``sigma`` is the noise multiplier on the clip threshold ``clip``; sigma 0
    and an infinite clip reproduce plain FedAvg.
    """
    q: float = 1.0
    sigma: float = 0.0
    clip: float = math.inf
    local_steps: int = 1
    eta: float = 0.1
    rounds: int = 1
    seed: int = 0
    lr_decay: bool = False
    local_batch_size: Optional[int] = None

    def __post_init__(self):
        if not (0.0 < self.q <= 1.0):
            raise ParameterError(f"sampling probability q must lie in (0, 1], got {self.q}")
        if self.sigma < 0:
            raise ParameterError(f"sigma must be non-negative, got {self.sigma}")
        if not self.clip > 0:
            raise ParameterError(f"clip threshold must be positive, got {self.clip}")
        if self.local_steps < 1:
            raise ParameterError(f"local_steps must be at least 1, got {self.local_steps}")
        if not self.eta > 0:
            raise ParameterError(f"eta must be positive, got {self.eta}")
        if self.rounds < 1:
            raise ParameterError(f"rounds must be at least 1, got {self.rounds}")
        if self.local_batch_size is not None and self.local_batch_size < 1:
            raise ParameterError(f"local_batch_size must be at least 1, got {self.local_batch_size}")

    def learning_rate(self, round_index: int) -> float:
        """Inner learning rate for a round, linearly decayed when enabled."""
        if not self.lr_decay:
            return self.eta
        return self.eta * (1.0 - round_index / self.rounds)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q": self.q,
            "sigma": self.sigma,
            "clip": None if math.isinf(self.clip) else self.clip,
            "local_steps": self.local_steps,
            "eta": self.eta,
            "rounds": self.rounds,
            "seed": self.seed,
            "lr_decay": self.lr_decay,
            "local_batch_size": self.local_batch_size,
        }


@dataclass
class PiecewiseLinearObjective:
    """
    Per-agent objectives F_i(theta) = max_j <a_ij, theta> + b_ij.

    ``agent_pieces`` holds one (A_i, b_i) pair per agent, A_i of shape
    (pieces, d). With ``temperature`` set, the max is replaced by the
    log-sum-exp smoothing t * log sum exp((A theta + b) / t), which keeps
    every gradient inside the convex hull of the rows of A_i.
    """
    agent_pieces: List[Tuple[np.ndarray, np.ndarray]]
    domain_bound: float = math.inf
    interior_radius: float = 0.0
    temperature: Optional[float] = None
    lipschitz: float = field(init=False)

    def __post_init__(self):
        if not self.agent_pieces:
            raise ParameterError("objective needs at least one agent")
        normalized = []
        dims = set()
        for coefficients, offsets in self.agent_pieces:
            coefficients = np.atleast_2d(np.asarray(coefficients, dtype=np.float64))
            offsets = np.asarray(offsets, dtype=np.float64).reshape(-1)
            if coefficients.shape[0] != offsets.shape[0]:
                raise ConsistencyError("each piece needs one coefficient row and one offset")
            dims.add(coefficients.shape[1])
            normalized.append((coefficients, offsets))
        if len(dims) != 1:
            raise ConsistencyError(f"agents disagree on the parameter dimension: {sorted(dims)}")
        if self.temperature is not None and not self.temperature > 0:
            raise ParameterError(f"temperature must be positive, got {self.temperature}")
        self.agent_pieces = normalized
        self.lipschitz = max(float(np.linalg.norm(a, axis=1).max()) for a, _ in normalized)

    @property
    def dim(self) -> int:
        return int(self.agent_pieces[0][0].shape[1])

    @property
    def num_agents(self) -> int:
        return len(self.agent_pieces)
