"""Agent-based simulation of a hidden-action principal-agent relationship.

A principal repeatedly contracts with an agent whose effort she cannot
observe. Neither knows the distribution of the environmental shock; both
learn it from memory, and the principal searches the action space by
exploration and exploitation. Performance is measured against the
second-best benchmark contract of the static problem.
"""

from .benchmark import (Benchmark, InfeasibleError, ScenarioBenchmark, brute_force_oracle,
                        expected_agent_utility, scenario_benchmark, solve_second_best)
from .contracting import (Offer, UnimplementableEffort, accept_contract, agent_effort,
                          optimal_premium)
from .engine import ScenarioConfig, run_scenario_raw, run_scenarios_raw, scenario_grid, simulate
from .information import MemoryBank, RollingMemory, Sophistication, estimate_theta
from .metrics import (ScenarioResult, confidence_interval, emit_contour_csv, emit_timeseries_csv,
                      manhattan_distance, normalized_effort_series, run_scenario)
from .model import (AgentParams, Contract, EnvironmentParams, PrincipalParams, agent_utility,
                    compensation, outcome, principal_utility)
from .search import (ActionSpace, EmptyActionSpace, SearchSpace, action_space, choose_strategy,
                     exploitation_window, exploration_threshold, search_space, select_effort)

__all__ = [
    "AgentParams", "PrincipalParams", "EnvironmentParams", "Contract",
    "outcome", "compensation", "principal_utility", "agent_utility",
    "Benchmark", "ScenarioBenchmark", "InfeasibleError", "solve_second_best",
    "brute_force_oracle", "expected_agent_utility", "scenario_benchmark",
    "Sophistication", "RollingMemory", "MemoryBank", "estimate_theta",
    "ActionSpace", "SearchSpace", "EmptyActionSpace", "action_space", "exploration_threshold",
    "choose_strategy", "exploitation_window", "search_space", "select_effort",
    "Offer", "UnimplementableEffort", "optimal_premium", "accept_contract", "agent_effort",
    "ScenarioConfig", "scenario_grid", "simulate", "run_scenario_raw", "run_scenarios_raw",
    "ScenarioResult", "normalized_effort_series", "manhattan_distance", "confidence_interval",
    "emit_timeseries_csv", "emit_contour_csv", "run_scenario",
]
