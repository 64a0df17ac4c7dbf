"""Economic primitives of the hidden-action setting.

Outcome is linear in effort plus an additive environmental shock, the agent
is paid a linear share of outcome, the principal is risk neutral and the agent
has CARA utility over pay with quadratic effort disutility.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Coefficient of the quadratic effort disutility G(a) = c * a**2.
DISUTILITY = 0.1


@dataclass(frozen=True)
class AgentParams:
    eta: float = 0.5
    rho: float = 50.0
    reservation_utility: float = 0.0
    disutility: float = DISUTILITY

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta must be > 0, got {self.eta}")
        if not self.rho > 0:
            raise ValueError(f"rho must be > 0, got {self.rho}")
        if not self.disutility > 0:
            raise ValueError(f"disutility must be > 0, got {self.disutility}")


@dataclass(frozen=True)
class PrincipalParams:
    delta: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must lie in [0, 1], got {self.delta}")


@dataclass(frozen=True)
class EnvironmentParams:
    mean: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")


@dataclass(frozen=True)
class Contract:
    premium: float

    def __post_init__(self):
        _check_premium(self.premium)


def _check_premium(premium):
    p = np.asarray(premium)
    if np.any((p < 0.0) | (p > 1.0)) or np.any(np.isnan(p)):
        raise ValueError(f"premium must lie in [0, 1], got {premium}")


def outcome(effort, rho, theta):
    """Realized outcome ``effort * rho + theta``."""
    return np.multiply(effort, rho) + theta


def compensation(x, premium):
    """Agent's linear share of outcome. Negative outcomes are shared too."""
    _check_premium(premium)
    return np.multiply(x, premium)


def principal_utility(x, s):
    return np.subtract(x, s)


def agent_utility(s, effort, eta, disutility=DISUTILITY):
    """CARA utility of pay minus quadratic effort disutility."""
    return -np.expm1(-eta * np.asarray(s, dtype=float)) / eta - disutility * np.square(effort)
