"""
Upstream communication metering.
"""
from veilvote.domain.exceptions import ParameterError
from veilvote.domain.models.privacy import Scheme


def comm_cost(scheme: Scheme, model_dim: int = 0, rounds: int = 0,
              num_classes: int = 0, queries: int = 0) -> int:
    """
    Floats each agent sends upstream over a whole run.

    Voting schemes send one C-vector per answered query; gradient schemes send
    one d-vector per round.

    Args:
        scheme: Scheme of the run
        model_dim: d
        rounds: T
        num_classes: C
        queries: Q

    Returns:
        C * Q for AE and KNN, d * T for FedAvg and DP-FedAvg
    """
    if min(model_dim, rounds, num_classes, queries) < 0:
        raise ParameterError("communication inputs must be non-negative")
    scheme = Scheme(scheme)
    if scheme in (Scheme.AE, Scheme.KNN):
        return num_classes * queries
    return model_dim * rounds


def expected_comm_cost(scheme: Scheme, model_dim: int = 0, rounds: int = 0,
                       num_classes: int = 0, queries: int = 0, q: float = 1.0) -> float:
    """Per-agent cost scaled by the participation probability q for gradient schemes."""
    raw = comm_cost(scheme, model_dim, rounds, num_classes, queries)
    if Scheme(scheme) in (Scheme.AE, Scheme.KNN):
        return float(raw)
    return q * raw
