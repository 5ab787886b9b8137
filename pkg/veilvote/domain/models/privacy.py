"""
Domain models for privacy accounting.
"""
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple

from veilvote.domain.exceptions import ParameterError


class Granularity(str, Enum):
    """Adjacency notion the guarantee is stated for."""
    AGENT = "agent"
    INSTANCE = "instance"


class Scheme(str, Enum):
    """Learning schemes the harness can run."""
    AE = "AE"
    KNN = "KNN"
    FEDAVG = "FedAvg"
    DPFEDAVG = "DPFedAvg"

    @classmethod
    def parse(cls, value: str) -> 'Scheme':
        """Case-insensitive lookup accepting the value or the member name."""
        normalized = value.strip().lower().replace("-", "").replace("_", "")
        for member in cls:
            if normalized in (member.value.lower(), member.name.lower()):
                return member
        raise ParameterError(f"unknown scheme: {value!r}")


@dataclass(frozen=True)
class RdpCurve:
    """Map from Renyi order alpha > 1 to the privacy loss epsilon(alpha)."""
    evaluation: Callable[[float], float]
    description: str

    def __call__(self, alpha: float) -> float:
        if not alpha > 1:
            raise ParameterError(f"Renyi order must exceed 1, got {alpha}")
        return float(self.evaluation(alpha))

    def at_orders(self, alphas) -> List[Tuple[float, float]]:
        """Evaluate the curve on a list of orders as (alpha, epsilon) pairs."""
        return [(float(a), self(a)) for a in alphas]


@dataclass(frozen=True)
class MechanismParams:
    """Parameters of a noisy voting mechanism."""
    sigma: float
    sensitivity: float = 1.0
    queries: int = 0
    num_agents: int = 1
    k: Optional[int] = None
    num_classes: int = 2
    granularity: Granularity = Granularity.AGENT

    def __post_init__(self):
        if not self.sigma > 0:
            raise ParameterError(f"sigma must be positive, got {self.sigma}")
        if not self.sensitivity > 0:
            raise ParameterError(f"sensitivity must be positive, got {self.sensitivity}")
        if self.queries < 0:
            raise ParameterError(f"queries must be non-negative, got {self.queries}")
        if self.num_agents < 1:
            raise ParameterError(f"num_agents must be at least 1, got {self.num_agents}")
        if self.k is not None and self.k < 1:
            raise ParameterError(f"k must be at least 1, got {self.k}")
        if self.num_classes < 2:
            raise ParameterError(f"num_classes must be at least 2, got {self.num_classes}")
        object.__setattr__(self, "granularity", Granularity(self.granularity))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sigma": self.sigma,
            "sensitivity": self.sensitivity,
            "queries": self.queries,
            "num_agents": self.num_agents,
            "k": self.k,
            "num_classes": self.num_classes,
            "granularity": self.granularity.value,
        }


@dataclass(frozen=True)
class MarginRecord:
    """Noiseless top-two gap of the mean vote on one query."""
    query_id: int
    gamma: float

    def __post_init__(self):
        if not (0.0 <= self.gamma <= 1.0):
            raise ParameterError(f"margin must lie in [0, 1], got {self.gamma}")


@dataclass
class PrivacyReport:
    """Final (epsilon, delta) figures of a run."""
    epsilon: float
    delta: float
    alpha_star: float
    epsilon_data_dependent: Optional[float] = None
    rdp_at_orders: List[Tuple[float, float]] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.epsilon_data_dependent is not None and self.epsilon_data_dependent > self.epsilon:
            self.epsilon_data_dependent = self.epsilon

    def to_dict(self) -> Dict[str, Any]:
        """
        Convert report to a JSON-ready dictionary.

        Returns:
            Dictionary with keys epsilon, delta, alpha_star, epsilon_data_dependent,
            rdp_at_orders and warnings
        """
        return {
            "epsilon": self.epsilon,
            "delta": self.delta,
            "alpha_star": self.alpha_star,
            "epsilon_data_dependent": self.epsilon_data_dependent,
            "rdp_at_orders": [[alpha, eps] for alpha, eps in self.rdp_at_orders],
            "warnings": list(self.warnings),
        }

    def to_json(self, indent: Optional[int] = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PrivacyReport':
        return cls(
            epsilon=float(data["epsilon"]),
            delta=float(data["delta"]),
            alpha_star=float(data["alpha_star"]),
            epsilon_data_dependent=data.get("epsilon_data_dependent"),
            rdp_at_orders=[(float(a), float(e)) for a, e in data.get("rdp_at_orders", [])],
            warnings=list(data.get("warnings", [])),
        )

