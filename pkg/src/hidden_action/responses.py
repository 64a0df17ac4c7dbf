"""Closed-form agent responses under a point expectation of the environment.

When the agent plugs an expected shock ``E`` into the outcome, his utility
``(1 - exp(-eta * p * (a * rho + E))) / eta - c * a**2`` is strictly concave in
effort and the first-order condition ``p * rho * exp(-eta * p * (a * rho + E))
= 2 * c * a`` has the Lambert-W solution used below. The same condition read
as an equation in ``p`` gives the premium that implements a given effort.

Best response is hump-shaped in the premium: it rises while the expected pay
``p * (a * rho + E)`` is below ``1 / eta`` and falls afterwards (income effect
of the bounded CARA utility). Only the rising branch is ever used to implement
effort, since it is the cheaper side for the principal.

Everything here is elementwise over numpy arrays.
"""

from __future__ import annotations

import numpy as np
from scipy.special import lambertw

from .model import AgentParams, agent_utility

_LOG_CUTOFF = 700.0
_BRANCH_TOL = 1e-10


def _lambertw_exp(log_z):
    """Principal branch W(exp(log_z)) for real ``log_z``, overflow-safe."""
    log_z = np.asarray(log_z, dtype=float)
    small = log_z <= _LOG_CUTOFF
    out = np.empty_like(log_z)
    out[small] = lambertw(np.exp(log_z[small])).real
    if np.any(~small):
        big = log_z[~small]
        w = big - np.log(big)
        for _ in range(8):
            # Newton on w + log(w) = log_z
            w = w - (w + np.log(w) - big) / (1.0 + 1.0 / w)
        out[~small] = w
    return out


def best_response(premium, expected_theta, agent: AgentParams):
    """Unconstrained effort maximizing the agent's point-expectation utility."""
    p, e = np.broadcast_arrays(np.asarray(premium, float), np.asarray(expected_theta, float))
    out = np.zeros(p.shape)
    pos = p > 0
    if np.any(pos):
        pp, ee = p[pos], e[pos]
        k = agent.eta * pp * agent.rho
        # a * exp(k * a) = C  ->  a = W(k * C) / k
        # summed logs so that tiny premiums do not underflow to log(0)
        log_kc = (np.log(agent.eta) + 2.0 * np.log(pp * agent.rho)
                  - np.log(2.0 * agent.disutility) - agent.eta * pp * ee)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            w = _lambertw_exp(log_kc) / k
            # k itself underflows for subnormal premiums; W(z) ~ z (1 - z) there
            z = np.exp(log_kc)
            series = np.exp(log_kc - np.log(agent.eta * agent.rho) - np.log(pp)) * (1.0 - z)
        out[pos] = np.where(z < 1e-12, series, w)
    return out if out.ndim else float(out)


def peak_premium_effort(expected_theta, agent: AgentParams):
    """Premium in [0, 1] at which the best response peaks, and that peak effort.

    The peak is where expected pay equals ``1 / eta``. If it would need a
    premium above one, best response is still rising at ``p = 1`` and the
    bound is taken there.
    """
    e = np.asarray(expected_theta, float)
    rho, c, eta = agent.rho, agent.disutility, agent.eta
    a = (-e + np.sqrt(e * e + 4.0 * rho * rho / (2.0 * c * np.e * eta))) / (2.0 * rho)
    p = 2.0 * c * np.e * a / rho
    over = p > 1.0
    if np.any(over):
        p = np.where(over, 1.0, p)
        a = np.where(over, best_response(1.0, e, agent), a)
    if p.ndim == 0:
        return float(p), float(a)
    return p, a


def max_implementable_effort(expected_theta, agent: AgentParams):
    """Largest effort that some premium in [0, 1] makes a best response."""
    return peak_premium_effort(expected_theta, agent)[1]


def implementing_premium(effort, expected_theta, agent: AgentParams):
    """Smallest premium whose best response reaches ``effort``.

    NaN where no premium in [0, 1] does.
    """
    a, e = np.broadcast_arrays(np.asarray(effort, float), np.asarray(expected_theta, float))
    out = np.full(a.shape, np.nan)
    out[a <= 0] = 0.0
    pos = a > 0
    target = 2.0 * agent.disutility * a / agent.rho  # p * exp(-B p) = target
    slope = agent.eta * (a * agent.rho + e)  # B
    with np.errstate(invalid="ignore", divide="ignore"):
        rising = pos & (slope > 0)
        arg = -slope * target
        # the peak effort sits on the branch point -1/e, where W = -1 exactly
        # (scipy returns NaN there); absorb rounding around it
        branch = rising & (np.abs(arg * np.e + 1.0) <= _BRANCH_TOL)
        ok = rising & ~branch & (arg > -1.0 / np.e)
        out[ok] = -lambertw(arg[ok]).real / slope[ok]
        out[branch] = 1.0 / slope[branch]
        flat = pos & (slope == 0)
        out[flat] = target[flat]
        falling = pos & (slope < 0)
        out[falling] = lambertw(-slope[falling] * target[falling]).real / -slope[falling]
    out[out > 1.0] = np.nan
    return out if out.ndim else float(out)


def point_utility(premium, effort, expected_theta, agent: AgentParams):
    """Agent utility with the shock replaced by its expectation."""
    x = np.multiply(effort, agent.rho) + expected_theta
    return agent_utility(np.multiply(premium, x), effort, agent.eta, agent.disutility)
