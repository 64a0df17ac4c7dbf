import dataclasses

import numpy as np
import pytest
from scipy import stats

from hidden_action.engine import (RunTrace, ScenarioConfig, benchmark_for, init_run,
                                  run_scenario_raw, run_scenarios_raw, scenario_grid, simulate, step)
from hidden_action.model import AgentParams
from hidden_action.search import action_bounds

SMALL = ScenarioConfig(m=3, q=5, delta=0.5, sigma_multiplier=0.25, T=8, R=40)


def traces_equal(a: RunTrace, b: RunTrace):
    return all(np.array_equal(getattr(a, f.name), getattr(b, f.name), equal_nan=True)
               for f in dataclasses.fields(RunTrace))


def test_same_seed_same_trace():
    assert traces_equal(run_scenario_raw(SMALL).trace, run_scenario_raw(SMALL).trace)


def test_other_seed_other_trace():
    other = dataclasses.replace(SMALL, master_seed=1)
    assert not traces_equal(run_scenario_raw(SMALL).trace, run_scenario_raw(other).trace)


def test_runs_do_not_depend_on_batch():
    sigma = benchmark_for(SMALL).sigma
    full = simulate(SMALL, sigma)
    part = simulate(SMALL, sigma, runs=[7, 3])
    assert traces_equal(part.run(0), full.run(7))
    assert traces_equal(part.run(1), full.run(3))
    single = simulate(SMALL, sigma, runs=[0])
    assert traces_equal(single, full.run(0))


def test_no_noise_no_shock():
    trace = run_scenario_raw(dataclasses.replace(SMALL, sigma_multiplier=0.0)).trace
    assert np.all(trace.theta == 0.0)


def test_equal_information_estimates_shock_exactly():
    # one step at t=1 with no noise: both expectations are 0, effort = desired
    scenario = dataclasses.replace(SMALL, sigma_multiplier=0.0, T=1)
    trace = simulate(scenario, 0.0)
    assert np.all(trace.accepted)
    np.testing.assert_allclose(trace.effort, trace.desired, atol=1e-9)
    np.testing.assert_allclose(trace.estimate, 0.0, atol=1e-7)


def test_initial_draws_uniform_on_space():
    scenario = ScenarioConfig(m=None, sigma_multiplier=0.0, T=1, R=10**5)
    trace = simulate(scenario, 0.0)
    lower, upper = action_bounds(0.0, scenario.agent)
    ks = stats.kstest(trace.desired[0], stats.uniform(lower, upper - lower).cdf)
    assert ks.statistic < 0.01


def _inject_rejection(learning):
    scenario = dataclasses.replace(SMALL, rejection_learning=learning)
    state = init_run(scenario, benchmark_for(scenario).sigma)
    trace = RunTrace.empty(scenario.T, scenario.R)
    for _ in range(3):
        step(state, scenario, trace)
    before_p = state.principal_memory.count.copy()
    before_a = state.agent_memory.count.copy()
    hostile = dataclasses.replace(scenario, agent=AgentParams(reservation_utility=50.0))
    step(state, hostile, trace)
    return state, trace, before_p, before_a


def test_rejection_without_learning_freezes_memory():
    state, trace, before_p, before_a = _inject_rejection("none")
    assert not trace.accepted[3].any()
    assert np.all(trace.effort[3] == 0.0)
    assert np.array_equal(state.principal_memory.count, before_p)
    assert np.array_equal(state.agent_memory.count, before_a)
    assert state.force_explore.all()


def test_rejection_with_shock_learning_records_bare_shock():
    state, trace, before_p, before_a = _inject_rejection("shock")
    assert np.all(trace.effort[3] == 0.0)
    np.testing.assert_allclose(state.principal_memory.last(), trace.theta[3])
    np.testing.assert_allclose(state.agent_memory.last(), trace.theta[3])
    assert np.array_equal(state.agent_memory.count, before_a + 1)


@pytest.mark.parametrize("m", [1, 3, None])
def test_memory_discipline(m):
    scenario = dataclasses.replace(SMALL, m=m, rejection_learning="none")
    state = init_run(scenario, benchmark_for(scenario).sigma)
    trace = RunTrace.empty(scenario.T, scenario.R)
    for t in range(scenario.T):
        step(state, scenario, trace)
        stored = trace.accepted[: t + 1].sum(axis=0)
        expected = stored if m is None else np.minimum(stored, m)
        assert np.array_equal(state.agent_memory.window_size(), expected)


def test_scenario_grid():
    grid = scenario_grid()
    assert len(grid) == 108
    assert len({s.scenario_id for s in grid}) == 108
    assert grid[0].scenario_id == "m1_c0.05_d0.25_q3"
    assert grid[-1].scenario_id == "minf_c0.65_d0.75_q10"
    assert len(scenario_grid(m_values=(1,), sigma_multipliers=(0.05,), deltas=(0.5,),
                             q_values=(10,))) == 1


def test_parallel_matches_serial():
    scenarios = scenario_grid(dataclasses.replace(SMALL, R=10, T=4), m_values=(1, None),
                              sigma_multipliers=(0.65,), deltas=(0.5,), q_values=(3, 10))
    serial = run_scenarios_raw(scenarios, workers=1)
    parallel = run_scenarios_raw(scenarios, workers=2)
    for a, b in zip(serial, parallel):
        assert a.scenario == b.scenario
        assert traces_equal(a.trace, b.trace)


@pytest.mark.parametrize("bad", [dict(T=0), dict(R=0), dict(sigma_multiplier=-1), dict(m=0),
                                 dict(q=0.5), dict(delta=2), dict(threshold_mode="x"),
                                 dict(rejection_learning="x"), dict(normalization="x")])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        ScenarioConfig(**bad)


def test_effort_never_negative_and_within_space():
    trace = run_scenario_raw(dataclasses.replace(SMALL, sigma_multiplier=0.65, m=1)).trace
    assert np.all(trace.effort >= 0)
    ok = trace.accepted
    assert np.all(trace.effort[ok] <= trace.upper[ok] + 1e-9)
    assert np.all(trace.effort[ok] >= trace.lower[ok] - 1e-9)
