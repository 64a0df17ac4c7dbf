"""Premium setting, acceptance and effort choice within one period."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import AgentParams, Contract
from .responses import best_response, implementing_premium, point_utility
from .search import ActionSpace


_IC_TOL = 1e-8
# participation is a weak inequality; contracts built to bind it land within
# rounding of the reservation utility
_ACCEPT_TOL = 1e-10


class UnimplementableEffort(ValueError):
    """No premium in [0, 1] makes the desired effort incentive compatible."""


@dataclass(frozen=True)
class Offer:
    contract: Contract
    desired_effort: float
    principal_expected_theta: float


def premium_for(desired_effort, expected_theta, agent: AgentParams):
    """Vectorized minimal implementing premium, NaN where none exists.

    The premium must (i) make the desired effort a best response and (ii) give
    the agent his reservation utility at that effort, both under the
    principal's point expectation. The principal's utility ``(1 - p) * x``
    falls in ``p``, so the smallest such premium is her optimum.
    """
    a = np.asarray(desired_effort, dtype=float)
    e = np.asarray(expected_theta, dtype=float)
    p_ic = np.asarray(implementing_premium(a, e, agent))
    x = a * agent.rho + e
    need = agent.reservation_utility + agent.disutility * a * a
    with np.errstate(divide="ignore", invalid="ignore"):
        # (1 - exp(-eta * p * x)) / eta >= need  <=>  p >= -log1p(-eta * need) / (eta * x)
        p_pc = np.where(need <= 0, 0.0, -np.log1p(-agent.eta * need) / (agent.eta * x))
        p_pc = np.where((need > 0) & ((x <= 0) | (agent.eta * need >= 1)), np.nan, p_pc)
    p = np.fmax(p_ic, p_pc)
    bad = np.isnan(p_ic) | np.isnan(p_pc) | (p > 1.0)
    # a large participation premium can overshoot the peak of the best
    # response and land where the desired effort is no longer reached
    with np.errstate(invalid="ignore"):
        reached = best_response(np.where(bad, 0.0, p), e, agent) >= a - _IC_TOL * np.maximum(1.0, a)
    p = np.where(bad | ~reached, np.nan, p)
    return p if p.ndim else float(p)


def optimal_premium(desired_effort, expected_theta, agent: AgentParams):
    """Scalar premium; raises UnimplementableEffort if none exists."""
    if desired_effort < 0:
        raise ValueError(f"desired effort must be >= 0, got {desired_effort}")
    p = premium_for(desired_effort, expected_theta, agent)
    if np.isnan(p):
        raise UnimplementableEffort(
            f"effort {desired_effort} cannot be implemented at expected shock {expected_theta}")
    return p


def effort_choice(premium, expected_theta, lower, upper, agent: AgentParams):
    """Vectorized agent effort: best response clipped to [lower, upper].

    Point-expectation utility is strictly concave in effort, so clipping the
    unconstrained optimum gives the constrained one.
    """
    return np.clip(best_response(premium, expected_theta, agent), lower, upper)


def agent_effort(contract: Contract, agent_expected_theta, space: ActionSpace, agent: AgentParams):
    return float(effort_choice(contract.premium, agent_expected_theta,
                               space.lower, space.upper, agent))


def acceptance(premium, expected_theta, lower, upper, agent: AgentParams,
               desired_effort=None, on_offer_only=False):
    """Vectorized acceptance under the agent's own expectation."""
    if on_offer_only:
        a = desired_effort
    else:
        a = effort_choice(premium, expected_theta, lower, upper, agent)
    u = point_utility(premium, a, expected_theta, agent)
    return u >= agent.reservation_utility - _ACCEPT_TOL


def accept_contract(offer: Offer, agent_expected_theta, agent: AgentParams, space: ActionSpace,
                    on_offer_only=False):
    return bool(acceptance(offer.contract.premium, agent_expected_theta, space.lower,
                           space.upper, agent, offer.desired_effort, on_offer_only))
