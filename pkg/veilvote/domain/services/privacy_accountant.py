"""
Renyi-DP accounting for noisy label voting and DP-FedAvg.

Curves are closures over closed forms. Conversion to (epsilon, delta)-DP scans
a fixed geometric grid of orders and refines the best bracket with a
golden-section search.
"""
import math
from collections import Counter
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from veilvote.config.config_loader import get_config
from veilvote.domain.exceptions import ConsistencyError, ParameterError, UsageError
from veilvote.domain.models.privacy import (
    Granularity,
    MarginRecord,
    MechanismParams,
    PrivacyReport,
    RdpCurve,
    Scheme,
)
from veilvote.infrastructure.logging import get_logger

logger = get_logger(__name__)

ALPHA_MAX_WARNING = "alpha_star at alpha_max: the order search did not converge"
BOUND_CLOSED_FORM = "closed_form"
CLOSED_FORM_WARNING = (
    "closed_form margin bound is not dominated by the amplification lemma bound; "
    "use bound=lemma for a certified epsilon_data_dependent"
)
BOUND_LEMMA = "lemma"


def _accounting_settings() -> dict:
    return get_config().get("accounting", {})


def alpha_grid(max_exponent: Optional[int] = None) -> np.ndarray:
    """
    Orders 1 + 2^j / 16 for j = 0..max_exponent.

    Args:
        max_exponent: Largest exponent j (defaults to accounting.alpha_max_exponent, 14)

    Returns:
        Increasing array of orders
    """
    settings = _accounting_settings()
    base = float(settings.get("alpha_base", 1.0))
    step = float(settings.get("alpha_step", 1.0 / 16.0))
    top = int(settings.get("alpha_max_exponent", 14)) if max_exponent is None else max_exponent
    return base + step * np.power(2.0, np.arange(top + 1))


def zero_curve() -> RdpCurve:
    return RdpCurve(lambda alpha: 0.0, "zero")


def gaussian_rdp(sensitivity: float, sigma: float) -> RdpCurve:
    """
    RDP curve of the Gaussian mechanism: alpha * s^2 / (2 sigma^2).

    Args:
        sensitivity: L2 sensitivity s of the released statistic
        sigma: Standard deviation of the added noise (may be infinite)

    Returns:
        RdpCurve
    """
    if not sensitivity > 0:
        raise ParameterError(f"sensitivity must be positive, got {sensitivity}")
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    if math.isinf(sigma):
        return RdpCurve(lambda alpha: 0.0, f"gaussian(s={sensitivity}, sigma=inf)")
    coefficient = sensitivity ** 2 / (2.0 * sigma ** 2)
    return RdpCurve(lambda alpha: alpha * coefficient, f"gaussian(s={sensitivity:g}, sigma={sigma:g})")


def compose(curves: Sequence[RdpCurve]) -> RdpCurve:
    """
    Adaptive composition: pointwise sum of the curves, in list order.

    Args:
        curves: Non-empty list of curves

    Returns:
        Composed curve
    """
    curves = list(curves)
    if not curves:
        raise UsageError("cannot compose an empty list of curves")
    if len(curves) == 1:
        return curves[0]

    def evaluation(alpha: float) -> float:
        total = 0.0
        for curve in curves:
            total += curve.evaluation(alpha)
        return total

    description = " + ".join(curve.description for curve in curves[:3])
    if len(curves) > 3:
        description += f" + ... ({len(curves)} terms)"
    return RdpCurve(evaluation, description)


def compose_repeated(curve: RdpCurve, times: int) -> RdpCurve:
    """Self-composition of one curve; zero repetitions give the zero curve."""
    if times < 0:
        raise ParameterError(f"repetition count must be non-negative, got {times}")
    if times == 0:
        return zero_curve()
    return RdpCurve(lambda alpha: times * curve.evaluation(alpha), f"{times} x {curve.description}")


def _conversion_objective(curve: RdpCurve, log_inv_delta: float):
    return lambda alpha: curve.evaluation(alpha) + log_inv_delta / (alpha - 1.0)


def rdp_to_dp(curve: RdpCurve, delta: float, grid: Optional[np.ndarray] = None,
              warnings: Optional[List[str]] = None) -> Tuple[float, float]:
    """
    Convert an RDP curve to (epsilon, delta)-DP.

    Minimizes epsilon(alpha) + log(1/delta) / (alpha - 1) over the order grid,
    then refines inside the bracket around the best grid order.

    Args:
        curve: RDP curve
        delta: Target delta in (0, 1)
        grid: Orders to scan (defaults to alpha_grid())
        warnings: Optional list that receives a message when the minimum sits at the largest order

    Returns:
        Tuple of (epsilon, alpha_star)
    """
    if not (0.0 < delta < 1.0):
        raise ParameterError(f"delta out of range (0, 1): {delta}")
    grid = alpha_grid() if grid is None else np.asarray(grid, dtype=np.float64)
    objective = _conversion_objective(curve, math.log(1.0 / delta))

    values = np.array([objective(alpha) for alpha in grid])
    best = int(np.argmin(values))
    epsilon, alpha_star = float(values[best]), float(grid[best])

    if 0 < best < len(grid) - 1:
        tolerance = float(_accounting_settings().get("golden_tolerance", 1e-8))
        try:
            result = minimize_scalar(
                objective,
                bracket=(grid[best - 1], grid[best], grid[best + 1]),
                method="golden",
                tol=tolerance,
            )
            if result.fun < epsilon:
                epsilon, alpha_star = float(result.fun), float(result.x)
        except ValueError:
            # Flat objective around the grid minimum; keep the grid value.
            pass
    elif best == len(grid) - 1:
        logger.warning(ALPHA_MAX_WARNING, context={"curve": curve.description, "alpha_max": alpha_star})
        if warnings is not None:
            warnings.append(ALPHA_MAX_WARNING)

    return max(epsilon, 0.0), alpha_star


def squared_sensitivity(params: MechanismParams, scheme: Scheme) -> float:
    """
    Squared L2 sensitivity of one answered query.

    Agent level is 1 for both voting schemes, AE instance level is 2 and
    kNN instance level is 2/k.
    """
    if scheme not in (Scheme.AE, Scheme.KNN):
        raise ParameterError(f"no voting curve for scheme {scheme.value}")
    if params.granularity is Granularity.AGENT:
        return 1.0
    if scheme is Scheme.AE:
        return 2.0
    if params.k is None:
        raise ParameterError("kNN instance-level accounting needs k")
    return 2.0 / params.k


def scheme_curve(params: MechanismParams, scheme: Scheme) -> RdpCurve:
    """
    Data-independent RDP curve of Q answered queries.

    Agent level gives Q alpha / (2 sigma^2), AE instance level Q alpha / sigma^2
    and kNN instance level Q alpha / (k sigma^2).

    Args:
        params: Mechanism parameters
        scheme: Scheme.AE or Scheme.KNN

    Returns:
        RdpCurve
    """
    per_query = gaussian_rdp(math.sqrt(squared_sensitivity(params, scheme)), params.sigma)
    return compose_repeated(per_query, params.queries)


def match_probability_bound(num_agents: int, sigma: float, gamma: float, num_classes: int) -> float:
    """
    Lower bound on the probability that the noisy argmax equals the noiseless one.

    Args:
        num_agents: N
        sigma: Total noise scale on the vote sum
        gamma: Noiseless margin in [0, 1]
        num_classes: C

    Returns:
        max(0, 1 - C exp(-N^2 gamma^2 / (8 sigma^2)))
    """
    _check_margin_inputs(num_agents, sigma, gamma, num_classes)
    exponent = (num_agents * gamma) ** 2 / (8.0 * sigma ** 2)
    return max(0.0, 1.0 - num_classes * math.exp(-exponent))


def amplified_rdp(q: float, eps_at_2alpha: float, alpha: float) -> float:
    """
    RDP of a mechanism that returns a fixed output with probability at least 1 - q.

    Args:
        q: Probability of any other output, in [0, 1)
        eps_at_2alpha: RDP of the underlying mechanism at order 2 alpha
        alpha: Order, greater than 1

    Returns:
        -log(1 - q) + log(1 + q^(1/2) (1 - q)^(alpha - 1) e^((alpha - 1) eps)) / (alpha - 1)
    """
    if not (0.0 <= q < 1.0):
        raise ParameterError(f"q must lie in [0, 1), got {q}")
    if not alpha > 1:
        raise ParameterError(f"order must exceed 1, got {alpha}")
    if q == 0.0:
        return 0.0
    log_term = 0.5 * math.log(q) + (alpha - 1.0) * math.log1p(-q) + (alpha - 1.0) * eps_at_2alpha
    return -math.log1p(-q) + float(np.logaddexp(0.0, log_term)) / (alpha - 1.0)


def data_dependent_rdp(num_agents: int, sigma: float, gamma: float, num_classes: int,
                       alpha: float, sensitivity: float = 1.0) -> float:
    """
    Margin-based RDP bound of one answered query.

    ``sensitivity`` is 1 for agent-level voting and 2/k for kNN instance level,
    i.e. the squared sensitivity of the Gaussian curve.

    Returns:
        2C e^(-x) + log(1 + e^((2 alpha - 1) alpha s / (2 sigma^2) - x + log(C) / 2)) / (alpha - 1)
        with x = N^2 gamma^2 / (8 sigma^2)
    """
    _check_margin_inputs(num_agents, sigma, gamma, num_classes)
    if not alpha > 1:
        raise ParameterError(f"order must exceed 1, got {alpha}")
    if not sensitivity > 0:
        raise ParameterError(f"sensitivity must be positive, got {sensitivity}")
    x = (num_agents * gamma) ** 2 / (8.0 * sigma ** 2)
    first = 2.0 * num_classes * math.exp(-x)
    exponent = (2.0 * alpha - 1.0) * alpha * sensitivity / (2.0 * sigma ** 2) - x + 0.5 * math.log(num_classes)
    return first + float(np.logaddexp(0.0, exponent)) / (alpha - 1.0)


def lemma_data_dependent_rdp(num_agents: int, sigma: float, gamma: float, num_classes: int,
                             alpha: float, sensitivity: float = 1.0) -> float:
    """
    Margin-based bound through amplified_rdp with q = C exp(-N^2 gamma^2 / (8 sigma^2)).

    Returns +inf when the match bound is vacuous (q >= 1).
    """
    _check_margin_inputs(num_agents, sigma, gamma, num_classes)
    q = num_classes * math.exp(-(num_agents * gamma) ** 2 / (8.0 * sigma ** 2))
    if q >= 1.0:
        return math.inf
    eps_at_2alpha = 2.0 * alpha * sensitivity / (2.0 * sigma ** 2)
    return amplified_rdp(q, eps_at_2alpha, alpha)


def _check_margin_inputs(num_agents: int, sigma: float, gamma: float, num_classes: int) -> None:
    if num_agents < 1:
        raise ParameterError(f"num_agents must be at least 1, got {num_agents}")
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    if not (0.0 <= gamma <= 1.0):
        raise ParameterError(f"margin must lie in [0, 1], got {gamma}")
    if num_classes < 2:
        raise ParameterError(f"num_classes must be at least 2, got {num_classes}")


def _data_dependent_curve(margins: Sequence[MarginRecord], params: MechanismParams,
                          s_squared: float, bound: str, grid: np.ndarray) -> RdpCurve:
    per_query_bound = lemma_data_dependent_rdp if bound == BOUND_LEMMA else data_dependent_rdp
    counts = Counter(record.gamma for record in margins)
    gammas = list(counts)
    multiplicity = np.array([counts[g] for g in gammas], dtype=np.float64)
    independent_coefficient = s_squared / (2.0 * params.sigma ** 2)

    def raw(alpha: float) -> float:
        independent = alpha * independent_coefficient
        dependent = np.array([
            per_query_bound(params.num_agents, params.sigma, g, params.num_classes, alpha, s_squared)
            for g in gammas
        ])
        return float(np.dot(multiplicity, np.minimum(dependent, independent)))

    # RDP is non-decreasing in the order, so a bound at a larger grid order also
    # bounds every smaller order.
    grid_values = np.array([raw(alpha) for alpha in grid])
    suffix_min = np.minimum.accumulate(grid_values[::-1])[::-1]

    def evaluation(alpha: float) -> float:
        position = int(np.searchsorted(grid, alpha, side="left"))
        if position < len(grid) and grid[position] == alpha:
            return float(suffix_min[position])
        value = raw(alpha)
        if position < len(grid):
            value = min(value, float(suffix_min[position]))
        return value

    return RdpCurve(evaluation, f"data-dependent({bound}, Q={len(margins)})")


def infer_scheme(params: MechanismParams) -> Scheme:
    """kNN when an instance-level k is present, AE otherwise."""
    if params.granularity is Granularity.INSTANCE and params.k is not None:
        return Scheme.KNN
    return Scheme.AE


def accumulate_data_dependent(margins: Sequence[MarginRecord], params: MechanismParams, delta: float,
                              scheme: Optional[Scheme] = None, bound: Optional[str] = None,
                              grid: Optional[np.ndarray] = None) -> PrivacyReport:
    """
    Privacy report combining the data-independent and the margin-based accounting.

    At each order the per-query loss is the smaller of the margin bound and the
    data-independent Gaussian loss; losses are summed over queries and
    converted once.

    Args:
        margins: One margin record per answered query
        params: Mechanism parameters (queries must equal len(margins))
        delta: Target delta
        scheme: Voting scheme (inferred from params when omitted)
        bound: "closed_form" (default) or "lemma"
        grid: Orders to scan

    Returns:
        PrivacyReport with both epsilon and epsilon_data_dependent
    """
    margins = list(margins)
    if len(margins) != params.queries:
        raise ConsistencyError(f"{len(margins)} margin records for {params.queries} answered queries")
    scheme = scheme or infer_scheme(params)
    bound = bound or _accounting_settings().get("data_dependent_bound", BOUND_CLOSED_FORM)
    if bound not in (BOUND_CLOSED_FORM, BOUND_LEMMA):
        raise ParameterError(f"unknown data-dependent bound: {bound!r}")
    grid = alpha_grid() if grid is None else np.asarray(grid, dtype=np.float64)

    report = privacy_report(params, scheme, delta, grid=grid)
    s_squared = squared_sensitivity(params, scheme)
    dependent_curve = _data_dependent_curve(margins, params, s_squared, bound, grid)
    epsilon_star, _ = rdp_to_dp(dependent_curve, delta, grid=grid)
    report.epsilon_data_dependent = min(epsilon_star, report.epsilon)
    if bound == BOUND_CLOSED_FORM:
        report.warnings.append(CLOSED_FORM_WARNING)

    logger.debug(
        "Data-dependent accounting finished",
        context={
            "queries": params.queries,
            "unique_margins": len(set(record.gamma for record in margins)),
            "epsilon": report.epsilon,
            "epsilon_data_dependent": report.epsilon_data_dependent,
            "bound": bound,
        },
    )
    return report


def privacy_report(params: MechanismParams, scheme: Scheme, delta: float,
                   grid: Optional[np.ndarray] = None) -> PrivacyReport:
    """Data-independent report for a voting scheme."""
    grid = alpha_grid() if grid is None else np.asarray(grid, dtype=np.float64)
    curve = scheme_curve(params, scheme)
    warnings: List[str] = []
    epsilon, alpha_star = rdp_to_dp(curve, delta, grid=grid, warnings=warnings)
    return PrivacyReport(
        epsilon=epsilon,
        delta=delta,
        alpha_star=alpha_star,
        rdp_at_orders=curve.at_orders(grid),
        warnings=warnings,
    )


def curve_report(curve: RdpCurve, delta: float, grid: Optional[np.ndarray] = None) -> PrivacyReport:
    """Data-independent report for an arbitrary curve."""
    grid = alpha_grid() if grid is None else np.asarray(grid, dtype=np.float64)
    warnings: List[str] = []
    epsilon, alpha_star = rdp_to_dp(curve, delta, grid=grid, warnings=warnings)
    return PrivacyReport(
        epsilon=epsilon,
        delta=delta,
        alpha_star=alpha_star,
        rdp_at_orders=curve.at_orders(grid),
        warnings=warnings,
    )


def dp_fedavg_sigma(eta: float, local_steps: int, lipschitz: float, rounds: int,
                    delta: float, num_agents: int, epsilon: float) -> float:
    """
    Noise scale of DP-FedAvg for a target (epsilon, delta).

    Args:
        eta: Inner learning rate
        local_steps: Inner iterations E
        lipschitz: Lipschitz constant G
        rounds: Outer rounds T
        delta: Target delta
        num_agents: N
        epsilon: Target epsilon

    Returns:
        eta E G sqrt(2 T log(1.25 / delta)) / (N epsilon)
    """
    for name, value in (("eta", eta), ("local_steps", local_steps), ("lipschitz", lipschitz),
                        ("rounds", rounds), ("num_agents", num_agents), ("epsilon", epsilon)):
        if not value > 0:
            raise ParameterError(f"{name} must be positive, got {value}")
    if not (0.0 < delta < 1.0):
        raise ParameterError(f"delta out of range (0, 1): {delta}")
    return eta * local_steps * lipschitz * math.sqrt(2.0 * rounds * math.log(1.25 / delta)) / (num_agents * epsilon)


def dp_fedavg_curve(rounds: int, sigma: float) -> RdpCurve:
    """Conservative DP-FedAvg curve: T full-participation releases, T alpha / (2 sigma^2)."""
    return compose_repeated(gaussian_rdp(1.0, sigma), rounds)


def consensus_margin_threshold(num_agents: int, sigma: float, num_classes: int, delta: float) -> float:
    """
    Smallest margin whose released label matches the noiseless vote with probability at least 1 - delta.

    Returns:
        2 sigma sqrt(2 log(C / delta)) / N
    """
    _check_margin_inputs(num_agents, sigma, 0.0, num_classes)
    if not (0.0 < delta < 1.0):
        raise ParameterError(f"delta out of range (0, 1): {delta}")
    return 2.0 * sigma * math.sqrt(2.0 * math.log(num_classes / delta)) / num_agents


def sigma_for_target_epsilon(queries: int, epsilon: float, delta: float,
                             scheme: Scheme = Scheme.AE,
                             granularity: Granularity = Granularity.AGENT,
                             k: Optional[int] = None) -> float:
    """
    Noise scale at which Q answered queries cost exactly ``epsilon``.

    DP-FedAvg is calibrated on its T-release curve with ``queries`` read as T.

    Args:
        queries: Q (or T for DP-FedAvg)
        epsilon: Target epsilon
        delta: Target delta
        scheme: Scheme.AE, Scheme.KNN or Scheme.DPFEDAVG
        granularity: Adjacency notion
        k: Neighbors per agent for kNN instance level

    Returns:
        sigma
    """
    if queries < 1:
        raise ParameterError("calibration needs at least one query")
    if not (0.0 < delta < 1.0):
        raise ParameterError(f"delta out of range (0, 1): {delta}")
    grid = alpha_grid()
    floor = math.log(1.0 / delta) / (grid[-1] - 1.0)
    if not epsilon > floor:
        raise ParameterError(f"target epsilon {epsilon} is below the conversion floor {floor:.6g}")

    def epsilon_at(sigma: float) -> float:
        if scheme is Scheme.DPFEDAVG:
            curve = dp_fedavg_curve(queries, sigma)
        else:
            params = MechanismParams(sigma=sigma, queries=queries, k=k, granularity=granularity)
            curve = scheme_curve(params, scheme)
        return rdp_to_dp(curve, delta, grid=grid)[0] - epsilon

    low, high = 1e-3, 1.0
    while epsilon_at(high) > 0:
        high *= 2.0
    while epsilon_at(low) < 0:
        low /= 2.0
    return float(brentq(epsilon_at, low, high, xtol=1e-10, rtol=1e-12))



def report_for_scheme(params: MechanismParams, scheme: Scheme, delta: float,
                      margins: Optional[Sequence[MarginRecord]] = None,
                      bound: Optional[str] = None) -> PrivacyReport:
    """Data-dependent report when margins are given, data-independent otherwise."""
    if margins is None:
        return privacy_report(params, scheme, delta)
    return accumulate_data_dependent(margins, params, delta, scheme=scheme, bound=bound)
