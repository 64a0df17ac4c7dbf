import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hidden_action.benchmark import solve_second_best
from hidden_action.contracting import (Offer, UnimplementableEffort, accept_contract, acceptance,
                                       agent_effort, effort_choice, optimal_premium, premium_for)
from hidden_action.model import AgentParams, Contract
from hidden_action.responses import best_response
from hidden_action.search import ActionSpace, action_bounds, action_space

AGENT = AgentParams()


def test_zero_effort_needs_zero_premium():
    assert optimal_premium(0.0, 0.0, AGENT) == 0.0


def test_benchmark_premium_reproduced():
    b = solve_second_best(AGENT)
    assert optimal_premium(b.effort_star, 0.0, AGENT) == pytest.approx(b.premium_star, abs=1e-3)


def test_unimplementable_effort():
    with pytest.raises(UnimplementableEffort):
        optimal_premium(5.0, 0.0, AGENT)
    with pytest.raises(ValueError):
        optimal_premium(-1.0, 0.0, AGENT)


@settings(max_examples=100, deadline=None)
@given(e=st.floats(-80, 80), frac=st.floats(0, 1))
def test_premium_implements_effort(e, frac):
    lower, upper = action_bounds(e, AGENT)
    a = lower + frac * (upper - lower)
    p = optimal_premium(a, e, AGENT)
    assert best_response(p, e, AGENT) >= a - 1e-6


@settings(max_examples=50, deadline=None)
@given(e=st.floats(-80, 80))
def test_premium_monotone_in_effort(e):
    lower, upper = action_bounds(e, AGENT)
    a = np.linspace(lower, upper, 60)
    p = premium_for(a, e, AGENT)
    assert np.all(np.diff(p) >= -1e-12)


def test_participation_premium_binds_below_participation_bound():
    # at a strongly negative expectation small efforts cost extra to be accepted
    e = -60.0
    lower, _ = action_bounds(e, AGENT)
    a = 0.9 * lower
    p = premium_for(a, e, AGENT)
    assert np.isnan(p) or best_response(p, e, AGENT) > a


def test_acceptance_examples():
    space = ActionSpace(0.0, 2.0)
    assert accept_contract(Offer(Contract(0.0), 0.0, 0.0), 0.0, AGENT, space)
    assert not accept_contract(Offer(Contract(0.0), 0.0, 0.0), 0.0,
                               AgentParams(reservation_utility=0.1), space)


@settings(max_examples=100, deadline=None)
@given(e=st.floats(-80, 80), frac=st.floats(0, 1), u_bar=st.sampled_from([0.0, 0.3]),
       offer_only=st.booleans())
def test_shared_expectation_always_accepts(e, frac, u_bar, offer_only):
    agent = AgentParams(reservation_utility=u_bar)
    lower, upper = action_bounds(e, agent)
    if np.isnan(lower):
        return
    a = lower + frac * (upper - lower)
    p = optimal_premium(a, e, agent)
    assert acceptance(p, e, lower, upper, agent, a, offer_only)


@settings(max_examples=100, deadline=None)
@given(e=st.floats(-80, 80), frac=st.floats(0, 1))
def test_shared_expectation_realizes_desired_effort(e, frac):
    lower, upper = action_bounds(e, AGENT)
    if np.isnan(lower):
        return
    a = lower + frac * (upper - lower)
    p = optimal_premium(a, e, AGENT)
    assert effort_choice(p, e, lower, upper, AGENT) == pytest.approx(a, abs=1e-4)


@settings(max_examples=100, deadline=None)
@given(e=st.floats(0, 80), p=st.floats(0, 1), dp=st.floats(0, 1))
def test_acceptance_monotone_in_premium(e, p, dp):
    space = action_space(0.0, AGENT)
    hi = min(1.0, p + dp)
    if acceptance(p, e, space.lower, space.upper, AGENT):
        assert acceptance(hi, e, space.lower, space.upper, AGENT)


def test_agent_effort_examples():
    space = ActionSpace(0.3, 2.0)
    assert agent_effort(Contract(0.0), 0.0, space, AGENT) == 0.3
    p = 0.05
    a = agent_effort(Contract(p), 0.0, ActionSpace(0.0, 5.0), AGENT)
    assert abs(p * 50 * np.exp(-0.5 * p * a * 50) - 0.2 * a) < 1e-6


def test_acceptance_not_monotone_under_pessimism():
    # expecting a bad shock, any share of the outcome is worse than no contract
    space = action_space(0.0, AGENT)
    assert acceptance(0.0, -46.0, space.lower, space.upper, AGENT)
    assert not acceptance(0.0078125, -46.0, space.lower, space.upper, AGENT)
