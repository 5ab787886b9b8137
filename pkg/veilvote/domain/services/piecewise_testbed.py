"""
Piecewise-linear testbed comparing one FedAvg round with a subgradient step.

Inside a region where every agent's active piece is fixed, E local steps of
size eta move each agent by exactly -E * eta * a_active, so the averaged
FedAvg update equals -E * eta * grad F(theta).
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, softmax

from veilvote.domain.exceptions import ConsistencyError, ParameterError, UsageError
from veilvote.domain.models.fedavg import PiecewiseLinearObjective


@dataclass
class EquivalenceResult:
    """Outcome of one equivalence check."""
    fedavg_update: np.ndarray
    subgradient_step: np.ndarray
    max_deviation: float


def agent_value(objective: PiecewiseLinearObjective, agent_id: int, theta: np.ndarray) -> float:
    coefficients, offsets = objective.agent_pieces[agent_id]
    values = coefficients @ theta + offsets
    if objective.temperature is None:
        return float(values.max())
    t = objective.temperature
    return float(t * logsumexp(values / t))


def agent_gradient(objective: PiecewiseLinearObjective, agent_id: int, theta: np.ndarray) -> np.ndarray:
    """Gradient of one agent's objective; the lowest-index active piece for the hard max."""
    coefficients, offsets = objective.agent_pieces[agent_id]
    values = coefficients @ theta + offsets
    if objective.temperature is None:
        return coefficients[int(np.argmax(values))].copy()
    return softmax(values / objective.temperature) @ coefficients


def global_value(objective: PiecewiseLinearObjective, theta: np.ndarray) -> float:
    return float(np.mean([agent_value(objective, i, theta) for i in range(objective.num_agents)]))


def global_gradient(objective: PiecewiseLinearObjective, theta: np.ndarray) -> np.ndarray:
    gradients = np.stack([agent_gradient(objective, i, theta) for i in range(objective.num_agents)])
    return gradients.mean(axis=0)


def boundary_distance(objective: PiecewiseLinearObjective, theta: np.ndarray) -> float:
    """
    Distance from theta to the nearest region boundary of any agent.

    For the active piece j and another piece l the boundary is the hyperplane
    where both pieces agree, at distance (v_j - v_l) / ||a_j - a_l||. Smoothed
    objectives have no boundaries.
    """
    if objective.temperature is not None:
        return math.inf
    nearest = math.inf
    for coefficients, offsets in objective.agent_pieces:
        values = coefficients @ theta + offsets
        active = int(np.argmax(values))
        for other in range(len(values)):
            if other == active:
                continue
            gap = values[active] - values[other]
            spread = float(np.linalg.norm(coefficients[active] - coefficients[other]))
            if spread == 0.0:
                if gap == 0.0:
                    return 0.0
                continue
            nearest = min(nearest, gap / spread)
    return nearest


def local_steps_update(objective: PiecewiseLinearObjective, agent_id: int, theta: np.ndarray,
                       steps: int, eta: float) -> np.ndarray:
    """Delta after ``steps`` gradient steps of one agent."""
    current = theta.copy()
    for _ in range(steps):
        current = current - eta * agent_gradient(objective, agent_id, current)
    return current - theta


def piecewise_equivalence_check(objective: PiecewiseLinearObjective, theta: np.ndarray,
                                steps: int, eta: float) -> EquivalenceResult:
    """
    Compare one FedAvg round against -E * eta * grad F(theta).

    For a hard-max objective theta must lie at distance at least the interior
    radius from every boundary and E must be below radius / (eta * G).

    Args:
        objective: Per-agent piecewise-linear objectives
        theta: Global parameters
        steps: Inner iterations E
        eta: Inner learning rate

    Returns:
        EquivalenceResult with both updates and their L2 gap
    """
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (objective.dim,):
        raise ConsistencyError(f"theta must have shape ({objective.dim},), got {theta.shape}")
    if steps < 1 or not eta > 0:
        raise ParameterError("steps must be at least 1 and eta positive")

    distance = boundary_distance(objective, theta)
    if math.isfinite(distance):
        radius = objective.interior_radius
        if distance < radius:
            raise UsageError(f"theta is {distance:.3g} from a region boundary, inside the radius {radius:.3g}")
        if not steps < radius / (eta * objective.lipschitz):
            raise UsageError(
                f"E={steps} local steps can leave the region: need E < {radius / (eta * objective.lipschitz):.3g}"
            )

    deltas = np.stack([
        local_steps_update(objective, agent_id, theta, steps, eta)
        for agent_id in range(objective.num_agents)
    ])
    fedavg_update = deltas.mean(axis=0)
    subgradient_step = -steps * eta * global_gradient(objective, theta)
    return EquivalenceResult(
        fedavg_update=fedavg_update,
        subgradient_step=subgradient_step,
        max_deviation=float(np.linalg.norm(fedavg_update - subgradient_step)),
    )


def lipschitz_deviation_bound(objective: PiecewiseLinearObjective, steps: int, eta: float) -> float:
    """E * eta * G."""
    return steps * eta * objective.lipschitz
