"""Second-best benchmark of the static hidden-action problem.

With CARA utility, linear sharing and normal noise the agent's expected
utility has the closed form

    (1 - exp(-eta*p*(a*rho + mu) + eta**2 * p**2 * sigma**2 / 2)) / eta - c*a**2

which is all the solver needs. The agent's best response is found by
golden-section search, the principal's premium by a coarse scan followed by a
golden-section refinement around the best grid point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .golden import golden_max
from .model import AgentParams, EnvironmentParams, PrincipalParams

N_SCAN = 1000
EFFORT_TOL = 1e-8
PREMIUM_TOL = 1e-10


class InfeasibleError(ValueError):
    """No admissible premium satisfies the agent's participation constraint."""


@dataclass(frozen=True)
class Benchmark:
    premium_star: float
    effort_star: float
    outcome_star: float
    principal_eu: float
    agent_eu: float


def _variance_term(premium, agent, env):
    return 0.5 * (agent.eta * np.asarray(premium) * env.sigma) ** 2


def expected_agent_utility(premium, effort, agent: AgentParams, env: EnvironmentParams):
    """Exact expectation of the agent's CARA utility over the normal shock."""
    premium = np.asarray(premium, dtype=float)
    expo = -agent.eta * premium * (np.multiply(effort, agent.rho) + env.mean)
    expo = expo + _variance_term(premium, agent, env)
    return -np.expm1(expo) / agent.eta - agent.disutility * np.square(effort)


def _effort_cap(premium, agent, env):
    # marginal utility of effort is at most p*rho*exp(-eta*p*mu + var); beyond
    # the cap the marginal disutility 2*c*a exceeds it
    premium = np.asarray(premium, dtype=float)
    expo = np.minimum(-agent.eta * premium * env.mean + _variance_term(premium, agent, env), 700.0)
    return premium * agent.rho * np.exp(expo) / (2.0 * agent.disutility) + 1e-9


def agent_best_response(premium, agent: AgentParams, env: EnvironmentParams, tol=EFFORT_TOL):
    """Effort maximizing expected utility for the given premium (a >= 0)."""
    premium = np.asarray(premium, dtype=float)
    cap = _effort_cap(premium, agent, env)
    a, _ = golden_max(lambda a: expected_agent_utility(premium, a, agent, env),
                      np.zeros_like(premium), cap, tol=tol)
    # golden search stalls near sqrt(machine eps) on a flat top; the objective
    # is concave in effort, so Newton on the derivative finishes the job
    pr = premium * agent.rho
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(3):
            g = pr * np.exp(-agent.eta * premium * (a * agent.rho + env.mean)
                            + _variance_term(premium, agent, env))
            step = (g - 2.0 * agent.disutility * a) / (agent.eta * pr * g + 2.0 * agent.disutility)
            a = np.where(np.isfinite(step) & (a > 0), np.clip(a + step, 0.0, cap), a)
    return a


def _principal_objective(premium, agent, env):
    premium = np.asarray(premium, dtype=float)
    a = agent_best_response(premium, agent, env)
    eu = expected_agent_utility(premium, a, agent, env)
    value = (1.0 - premium) * (a * agent.rho + env.mean)
    feasible = eu >= agent.reservation_utility
    return np.where(feasible, value, -np.inf), a, eu


def _benchmark(p, agent, env):
    value, a, eu = _principal_objective(p, agent, env)
    a = float(a)
    return Benchmark(
        premium_star=float(p),
        effort_star=a,
        outcome_star=a * agent.rho + env.mean,
        principal_eu=float((1.0 - p) * (a * agent.rho + env.mean)),
        agent_eu=float(eu),
    )


def solve_second_best(agent: AgentParams, principal: PrincipalParams | None = None,
                      env: EnvironmentParams | None = None) -> Benchmark:
    """Second-best premium, induced effort and expected utilities.

    ``principal`` is accepted for interface symmetry; a risk-neutral principal
    has no parameter that enters the static problem.

    Raises InfeasibleError if participation fails for every premium.
    """
    env = env or EnvironmentParams()
    grid = np.linspace(0.0, 1.0, N_SCAN)
    with np.errstate(over="ignore", invalid="ignore"):
        values, _, _ = _principal_objective(grid, agent, env)
    if not np.isfinite(values).any():
        raise InfeasibleError(
            f"reservation utility {agent.reservation_utility} is unattainable for every premium")
    i = int(np.argmax(values))

    def objective(p):
        return _principal_objective(p, agent, env)[0]

    def boundary(good, bad):
        # participation boundary between a feasible and an infeasible premium,
        # narrowed 32-fold per vectorized round
        for _ in range(8):
            pts = np.linspace(good, bad, 33)
            with np.errstate(over="ignore", invalid="ignore"):
                ok = np.isfinite(objective(pts))
            j = int(np.argmin(ok))  # first infeasible point; ok[0] holds
            good, bad = pts[j - 1], pts[j]
            if abs(bad - good) <= 1e-15:
                break
        return good

    # clip the bracket to the feasible side first; a binding participation
    # constraint puts the optimum right on that edge
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, N_SCAN - 1)]
    if not np.isfinite(values[min(i + 1, N_SCAN - 1)]):
        hi = boundary(grid[i], hi)
    if not np.isfinite(values[max(i - 1, 0)]):
        lo = boundary(grid[i], lo)
    # vectorized zoom: each round keeps the two cells around the best point
    for _ in range(12):
        pts = np.linspace(lo, hi, 33)
        with np.errstate(over="ignore", invalid="ignore"):
            j = int(np.argmax(objective(pts)))
        lo, hi = pts[max(j - 1, 0)], pts[min(j + 1, 32)]
        if hi - lo <= PREMIUM_TOL:
            break
    p = pts[j]
    if objective(grid[i]) > objective(p):
        p = grid[i]
    return _benchmark(float(p), agent, env)


def _grid_response(ps, agent, env, a_step, a_max, levels):
    """Grid best response per premium, zooming ``levels`` times by 10x."""
    As = np.arange(0.0, a_max + a_step / 2, a_step)
    a = np.empty(len(ps))
    for start in range(0, len(ps), 50):
        chunk = ps[start:start + 50, None]
        eu = expected_agent_utility(chunk, As[None, :], agent, env)
        a[start:start + 50] = As[np.argmax(eu, axis=1)]
    step = a_step
    offsets = np.arange(-20, 21)
    for _ in range(levels):
        step /= 10
        cand = np.clip(a[:, None] + step * offsets[None, :], 0.0, None)
        eu = expected_agent_utility(ps[:, None], cand, agent, env)
        a = cand[np.arange(len(ps)), np.argmax(eu, axis=1)]
    return a, expected_agent_utility(ps, a, agent, env)


def _grid_pick(ps, agent, env, a_step, a_max, levels):
    a, eu = _grid_response(ps, agent, env, a_step, a_max, levels)
    value = np.where(eu >= agent.reservation_utility,
                     (1.0 - ps) * (a * agent.rho + env.mean), -np.inf)
    k = int(np.argmax(value))
    return value[k], ps[k], a[k], eu[k]


def brute_force_oracle(agent: AgentParams, env: EnvironmentParams | None = None,
                       p_step=1e-3, a_step=1e-3, a_max=5.0, refine=0) -> Benchmark:
    """Exhaustive grid solution of the same program (test oracle).

    For each grid premium the agent picks the best grid effort; the principal
    then picks the best premium among those meeting participation. The effort
    grid is doubled until it no longer binds. Each of the
    ``refine`` extra rounds re-grids +-50 cells around the incumbent premium
    at a tenth of the step and resolves the agent's grid choice one decade
    finer as well.
    """
    if p_step <= 0 or a_step <= 0:
        raise ValueError("grid steps must be positive")
    env = env or EnvironmentParams()
    ps = np.arange(0.0, 1.0 + p_step / 2, p_step)
    with np.errstate(over="ignore", invalid="ignore"):
        while True:
            value, p, a, eu = _grid_pick(ps, agent, env, a_step, a_max, 0)
            if not np.isfinite(value):
                raise InfeasibleError("no grid premium satisfies participation")
            if a < 0.9 * a_max:
                break
            a_max *= 2  # effort grid was binding
        for level in range(1, refine + 1):
            p_step /= 10
            ps = np.unique(np.clip(p + p_step * np.arange(-50, 51), 0.0, 1.0))
            value, p, a, eu = _grid_pick(ps, agent, env, a_step, a_max, level)
    return Benchmark(premium_star=float(p), effort_star=float(a),
                     outcome_star=float(a * agent.rho + env.mean),
                     principal_eu=float(value), agent_eu=float(eu))


@dataclass(frozen=True)
class ScenarioBenchmark:
    """Benchmarks tied to one turbulence level.

    ``reference`` is the noise-free solution whose outcome sets the noise
    scale, ``at_sigma`` the solution re-solved at that noise level.
    """

    sigma: float
    reference: Benchmark
    at_sigma: Benchmark

    def effort_star(self, normalization="point"):
        if normalization == "point":
            return self.reference.effort_star
        if normalization == "exact":
            return self.at_sigma.effort_star
        raise ValueError(f"unknown normalization {normalization!r}; use 'point' or 'exact'")


def scenario_benchmark(agent: AgentParams, sigma_multiplier: float, mean=0.0) -> ScenarioBenchmark:
    """Noise level ``sigma = c * x*`` with ``x*`` taken from the noise-free problem."""
    if sigma_multiplier < 0:
        raise ValueError("sigma_multiplier must be >= 0")
    reference = solve_second_best(agent, None, EnvironmentParams(mean=mean, sigma=0.0))
    sigma = sigma_multiplier * reference.outcome_star
    at_sigma = solve_second_best(agent, None, EnvironmentParams(mean=mean, sigma=sigma))
    return ScenarioBenchmark(sigma=sigma, reference=reference, at_sigma=at_sigma)
