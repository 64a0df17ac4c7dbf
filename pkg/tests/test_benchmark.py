import itertools

import numpy as np
import pytest

from hidden_action.benchmark import (InfeasibleError, agent_best_response, brute_force_oracle,
                                     expected_agent_utility, scenario_benchmark, solve_second_best)
from hidden_action.model import AgentParams, EnvironmentParams, agent_utility, compensation

AGENT = AgentParams()
CALM = EnvironmentParams()


def test_expected_utility_examples():
    assert expected_agent_utility(0, 0, AGENT, EnvironmentParams(sigma=7)) == 0
    assert expected_agent_utility(0.1, 1, AGENT, CALM) == pytest.approx(1.73583, abs=1e-5)


@pytest.mark.parametrize("p, a, mu", [(0.1, 1, 0), (0.02, 1.9, 3.0), (0.7, 0.2, -4.0)])
def test_noise_free_expectation_equals_deterministic_utility(p, a, mu):
    env = EnvironmentParams(mean=mu)
    direct = agent_utility(compensation(a * AGENT.rho + mu, p), a, AGENT.eta)
    assert expected_agent_utility(p, a, AGENT, env) == pytest.approx(direct, abs=1e-14)


def test_expected_utility_against_monte_carlo():
    rng = np.random.default_rng(7)
    env = EnvironmentParams(sigma=10.0)
    theta = rng.normal(0.0, 10.0, 10**7)
    u = agent_utility(compensation(1 * 50 + theta, 0.1), 1, 0.5)
    se = u.std(ddof=1) / np.sqrt(u.size)
    assert abs(u.mean() - expected_agent_utility(0.1, 1, AGENT, env)) < 3 * se


def test_best_response_zero_premium():
    assert agent_best_response(0.0, AGENT, EnvironmentParams(sigma=5)) == pytest.approx(0.0, abs=1e-8)


@pytest.mark.parametrize("p", [0.01, 0.05, 0.3])
def test_best_response_foc_noise_free(p):
    a = agent_best_response(p, AGENT, CALM)
    assert abs(p * 50 * np.exp(-0.5 * p * a * 50) - 0.2 * a) < 1e-8


def test_best_response_grid_oracle():
    env = EnvironmentParams(sigma=5.0)
    grid = np.arange(0, 10 + 5e-5, 1e-4)
    oracle = grid[np.argmax(expected_agent_utility(0.2, grid, AGENT, env))]
    assert agent_best_response(0.2, AGENT, env) == pytest.approx(oracle, abs=1e-3)


def test_best_response_rises_then_falls_in_premium():
    # the income effect of bounded CARA utility bends the response back down
    ps = np.linspace(0.0, 1.0, 50)
    a = agent_best_response(ps, AGENT, CALM)
    k = int(np.argmax(a))
    assert 0 < k < len(ps) - 1
    assert np.all(np.diff(a[: k + 1]) >= -1e-6)
    assert np.all(np.diff(a[k:]) <= 1e-6)


def test_noise_free_benchmark_values():
    b = solve_second_best(AGENT)
    assert b.premium_star == pytest.approx(0.020027, abs=1e-6)
    assert b.effort_star == pytest.approx(1.91723, abs=1e-5)
    assert b.outcome_star == pytest.approx(b.effort_star * 50)
    assert b.agent_eu >= -1e-9


@pytest.mark.parametrize("sigma_mult", [0.0, 0.25])
def test_solver_matches_default_grid_oracle(sigma_mult):
    env = EnvironmentParams(sigma=sigma_mult * solve_second_best(AGENT).outcome_star)
    b, o = solve_second_best(AGENT, None, env), brute_force_oracle(AGENT, env)
    assert b.premium_star == pytest.approx(o.premium_star, abs=2e-3)
    assert b.effort_star == pytest.approx(o.effort_star, abs=2e-3)


def test_principal_value_grows_with_noise():
    # with CARA pay a noisier outcome pushes the agent to work harder, so the
    # principal's expected utility rises with sigma rather than falling
    values = [scenario_benchmark(AGENT, c).at_sigma.principal_eu for c in (0.05, 0.25, 0.45, 0.65)]
    assert np.all(np.diff(values) > 0)


def test_infeasible_reservation_utility():
    with pytest.raises(InfeasibleError):
        solve_second_best(AgentParams(reservation_utility=10 / 0.5))
    with pytest.raises(InfeasibleError):
        brute_force_oracle(AgentParams(reservation_utility=10 / 0.5))


def test_tiny_grid_oracle_by_hand():
    o = brute_force_oracle(AGENT, CALM, p_step=0.5, a_step=0.5)
    best = None
    for p in (0.0, 0.5, 1.0):
        efforts = np.arange(0, 5.25, 0.5)
        a = efforts[np.argmax([agent_utility(p * e * 50, e, 0.5) for e in efforts])]
        if agent_utility(p * a * 50, a, 0.5) >= 0:
            v = (1 - p) * a * 50
            if best is None or v > best[0]:
                best = (v, p, a)
    assert (o.principal_eu, o.premium_star, o.effort_star) == pytest.approx(best)


def test_solver_is_deterministic():
    env = EnvironmentParams(sigma=30.0)
    assert solve_second_best(AGENT, None, env) == solve_second_best(AGENT, None, env)


def test_scenario_benchmark_uses_noise_free_scale():
    sb = scenario_benchmark(AGENT, 0.25)
    assert sb.sigma == pytest.approx(0.25 * sb.reference.outcome_star)
    assert sb.effort_star("point") == sb.reference.effort_star
    assert sb.effort_star("exact") == sb.at_sigma.effort_star
    with pytest.raises(ValueError):
        sb.effort_star("other")


@pytest.mark.parametrize("eta, c, u_bar", list(itertools.product([0.25, 1.0], [0.0, 0.65], [0.5])))
def test_reservation_utility_holds(eta, c, u_bar):
    agent = AgentParams(eta=eta, reservation_utility=u_bar)
    sigma = c * solve_second_best(agent).outcome_star
    b = solve_second_best(agent, None, EnvironmentParams(sigma=sigma))
    assert b.agent_eu >= u_bar - 1e-9
