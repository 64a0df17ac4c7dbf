"""The principal's search for a desired effort level.

Each period she decides between a local search inside a window around the
status-quo effort (exploitation) and a global search in the rest of the
currently feasible action space (exploration), draws two uniform candidates
from the chosen space and keeps the highest effort found.

The feasible space is bounded above by the largest effort any admissible
premium can make a best response (incentive compatibility) and below by the
smallest effort from which on the implementing contract still meets the
agent's reservation utility (participation). Both bounds move with the
principal's expectation of the environment.

Array-valued functions here operate elementwise on one entry per run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .model import AgentParams
from .responses import implementing_premium, max_implementable_effort, point_utility

EXPLOIT = "exploit"
EXPLORE = "explore"
THRESHOLD_MODES = ("calibrated", "literal")
DEGENERATE_RULES = ("exploit", "coin")

_BISECT_ITERS = 80


class EmptyActionSpace(ValueError):
    """No effort level satisfies participation under the current expectation."""


@dataclass(frozen=True)
class ActionSpace:
    lower: float
    upper: float

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper:
            raise ValueError(f"need 0 <= lower <= upper, got [{self.lower}, {self.upper}]")

    def contains(self, effort, tol=1e-12):
        return self.lower - tol <= effort <= self.upper + tol


@dataclass(frozen=True)
class SearchSpace:
    kind: str
    intervals: tuple

    @property
    def length(self):
        return sum(hi - lo for lo, hi in self.intervals)

    def sample(self, rng, size=2):
        """Uniform draws over the union of intervals."""
        return np.array([_place(self.intervals, u) for u in rng.random(size)])


def sample_candidates(space: SearchSpace, rng, size=2):
    return space.sample(rng, size)


def _place(intervals, u):
    total = sum(hi - lo for lo, hi in intervals)
    pos = u * total
    for lo, hi in intervals:
        if pos <= hi - lo:
            return lo + pos
        pos -= hi - lo
    return intervals[-1][1]


def exploration_threshold(estimates, delta):
    """``delta``-quantile of a normal fitted to the estimates.

    Returns None when the estimates have no spread (see ``explore_decision``
    for how that case is decided).
    """
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie strictly inside (0, 1) for a finite quantile, got {delta}")
    est = np.asarray(estimates, dtype=float)
    if est.size < 1:
        raise ValueError("need at least one estimate")
    sd = est.std(ddof=1) if est.size > 1 else 0.0
    if sd == 0:
        return None
    return float(est.mean() + sd * ndtri(delta))


def explore_decision(last_estimate, mean, sd, delta, feasible, u, mode="calibrated",
                     degenerate="exploit"):
    """Vectorized strategy choice; True means explore.

    Infeasible status quo forces exploration. Otherwise the principal explores
    when her latest estimate exceeds the threshold quantile; in ``calibrated``
    mode that is the (1 - delta)-quantile so that exploration happens with
    long-run frequency delta, in ``literal`` mode the delta-quantile.

    Without spread in the estimates the fitted normal collapses onto its mean.
    With ``degenerate="exploit"`` the threshold is then that mean, so the
    comparison is strict and a single remembered estimate never triggers
    exploration; with ``degenerate="coin"`` the uniform draw ``u`` decides
    with probability delta instead.
    """
    if mode not in THRESHOLD_MODES:
        raise ValueError(f"unknown threshold mode {mode!r}; use one of {THRESHOLD_MODES}")
    if degenerate not in DEGENERATE_RULES:
        raise ValueError(f"unknown degenerate rule {degenerate!r}; use one of {DEGENERATE_RULES}")
    level = 1.0 - delta if mode == "calibrated" else delta
    with np.errstate(invalid="ignore"):
        threshold = mean + sd * ndtri(level)
        by_threshold = np.asarray(last_estimate) > threshold
    if degenerate == "coin":
        fallback = np.asarray(u) < delta
    else:
        fallback = np.asarray(last_estimate) > mean
    chosen = np.where(np.asarray(sd) > 0, by_threshold, fallback)
    return np.asarray(~np.asarray(feasible, dtype=bool) | chosen)


def choose_strategy(last_estimate, estimates, delta, status_quo_feasible, rng, mode="calibrated",
                    degenerate="exploit"):
    """Scalar strategy choice drawing one uniform from ``rng``."""
    est = np.asarray(estimates, dtype=float)
    u = rng.random()
    if not status_quo_feasible:
        return EXPLORE
    sd = est.std(ddof=1) if est.size > 1 else 0.0
    explore = explore_decision(last_estimate, est.mean() if est.size else 0.0, sd,
                               delta, True, u, mode, degenerate)
    return EXPLORE if bool(explore) else EXPLOIT


def action_bounds(expected_theta, agent: AgentParams):
    """Vectorized (lower, upper) bounds; lower is NaN where the space is empty."""
    e = np.atleast_1d(np.asarray(expected_theta, dtype=float))
    upper = np.atleast_1d(max_implementable_effort(e, agent))
    u_bar = agent.reservation_utility

    def slack(a, e):
        p = implementing_premium(a, e, agent)
        return point_utility(p, a, e, agent) - u_bar

    # participation utility along the implementing contract falls until the
    # expected outcome turns positive and rises afterwards
    lo = np.clip(-e / agent.rho, 0.0, upper)
    lower = lo.copy()
    hi_slack = slack(upper, e)
    lower[hi_slack < 0] = np.nan
    need = (slack(lo, e) < 0) & (hi_slack >= 0)
    if np.any(need):
        a, b, e_need = lo[need], upper[need], e[need]
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (a + b)
            ok = slack(mid, e_need) >= 0
            b = np.where(ok, mid, b)
            a = np.where(ok, a, mid)
        lower[need] = b
    if np.ndim(expected_theta) == 0:
        return float(lower[0]), float(upper[0])
    return lower, upper


def action_space(expected_theta, agent: AgentParams) -> ActionSpace:
    lower, upper = action_bounds(expected_theta, agent)
    if np.isnan(lower):
        raise EmptyActionSpace(
            f"no effort meets reservation utility {agent.reservation_utility} "
            f"at expected shock {expected_theta}")
    return ActionSpace(lower, upper)


def exploitation_bounds(lower, upper, q, status_quo):
    """Window of width (upper - lower) / q centred on the status quo.

    The window is shifted, not shrunk, to stay inside [lower, upper].
    """
    lower, upper, status_quo = np.broadcast_arrays(
        np.asarray(lower, float), np.asarray(upper, float), np.asarray(status_quo, float))
    width = (upper - lower) / q
    left = np.clip(status_quo - width / 2, lower, np.maximum(upper - width, lower))
    right = np.minimum(left + width, upper)
    if left.ndim == 0:
        return float(left), float(right)
    return left, right


def exploitation_window(space: ActionSpace, q, status_quo):
    if not space.contains(status_quo):
        raise ValueError(f"status quo {status_quo} lies outside [{space.lower}, {space.upper}]")
    return exploitation_bounds(space.lower, space.upper, q, status_quo)


def search_space(space: ActionSpace, q, status_quo, kind) -> SearchSpace:
    """Exploitation window or its complement in the action space.

    Exploring from an infeasible status quo searches the whole space.
    """
    if kind == EXPLOIT:
        return SearchSpace(EXPLOIT, (exploitation_window(space, q, status_quo),))
    if kind != EXPLORE:
        raise ValueError(f"unknown search kind {kind!r}")
    if status_quo is None or not space.contains(status_quo):
        return SearchSpace(EXPLORE, ((space.lower, space.upper),))
    left, right = exploitation_window(space, q, status_quo)
    parts = tuple((lo, hi) for lo, hi in ((space.lower, left), (right, space.upper)) if hi > lo)
    if not parts:
        # window already covers the whole space
        parts = ((space.lower, space.upper),)
    return SearchSpace(EXPLORE, parts)


def draw_candidates(lower, upper, win_left, win_right, explore, forced, u):
    """Vectorized candidate placement for one uniform ``u`` per run.

    Exploit draws land in the window, explore draws in the space minus the
    window (the whole space when forced or when that complement is empty).
    """
    below = win_left - lower
    above = upper - win_right
    outside = below + above
    whole = forced | (outside <= 0)
    pos = u * outside
    explore_draw = np.where(pos < below, lower + pos, win_right + (pos - below))
    explore_draw = np.where(whole, lower + u * (upper - lower), explore_draw)
    exploit_draw = win_left + u * (win_right - win_left)
    return np.where(explore, explore_draw, exploit_draw)


def select_effort(candidates, status_quo=None, competes=True):
    """Highest effort among the candidates and, if feasible, the status quo."""
    best = float(np.max(candidates))
    if competes and status_quo is not None:
        best = max(best, float(status_quo))
    return best
