"""Period-by-period simulation of the principal-agent relation.

All replications of a scenario advance together: every per-run quantity is
an array with one entry per run. Each run still owns an independent random
stream, seeded from ``(master_seed, scenario id, run index)``, and all of its
draws are taken up front, so a run's trajectory does not depend on how many
other runs share the batch or on the order in which scenarios execute.

Sequence inside one period:

0. choose exploration or exploitation and draw two candidate efforts
1. keep the highest effort found (status quo included when feasible)
2. set the minimal premium implementing it
3. agent accepts or rejects
4. agent picks effort against his own expectation
5. shock realizes
6. outcome
7. principal estimates the shock, agent records it

A period without a contract (empty action space, no implementing premium, or
a rejected offer) has zero effort. With ``rejection_learning="shock"`` the
outcome is then the bare shock and both sides learn it; with ``"none"``
nothing is recorded, which can freeze a pessimistic principal for good.
"""

from __future__ import annotations

import itertools
import logging
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .benchmark import ScenarioBenchmark, scenario_benchmark
from .contracting import acceptance, effort_choice, premium_for
from .information import MemoryBank, estimate_theta
from .model import AgentParams
from .search import DEGENERATE_RULES, THRESHOLD_MODES, action_bounds, draw_candidates, explore_decision, exploitation_bounds

log = logging.getLogger(__name__)

M_VALUES = (1, 3, None)
SIGMA_MULTIPLIERS = (0.05, 0.25, 0.45, 0.65)
DELTAS = (0.25, 0.5, 0.75)
Q_VALUES = (3, 5, 10)

_FEAS_TOL = 1e-9
# what is learned in a period without a contract: the bare shock, or nothing
REJECTION_LEARNING = ("shock", "none")
# uniform columns: strategy coin, candidate 1, candidate 2, bootstrap draw
_N_UNIFORM = 4


@dataclass(frozen=True)
class ScenarioConfig:
    m: int | None = None
    q: float = 10
    delta: float = 0.5
    sigma_multiplier: float = 0.05
    T: int = 20
    R: int = 700
    agent: AgentParams = field(default_factory=AgentParams)
    env_mean: float = 0.0
    threshold_mode: str = "calibrated"
    degenerate_threshold: str = "exploit"
    status_quo_competes: bool = True
    accept_on_offer_only: bool = False
    rejection_learning: str = "shock"
    normalization: str = "point"
    master_seed: int = 0

    def __post_init__(self):
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")
        if self.R < 1:
            raise ValueError(f"R must be >= 1, got {self.R}")
        if self.sigma_multiplier < 0:
            raise ValueError(f"sigma_multiplier must be >= 0, got {self.sigma_multiplier}")
        if self.m is not None and self.m < 1:
            raise ValueError(f"m must be >= 1 or None (unbounded), got {self.m}")
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if not 0 <= self.delta <= 1:
            raise ValueError(f"delta must lie in [0, 1], got {self.delta}")
        if self.threshold_mode not in THRESHOLD_MODES:
            raise ValueError(f"threshold_mode must be one of {THRESHOLD_MODES}")
        if self.degenerate_threshold not in DEGENERATE_RULES:
            raise ValueError(f"degenerate_threshold must be one of {DEGENERATE_RULES}")
        if self.rejection_learning not in REJECTION_LEARNING:
            raise ValueError(f"rejection_learning must be one of {REJECTION_LEARNING}")
        if self.normalization not in ("point", "exact"):
            raise ValueError("normalization must be 'point' or 'exact'")

    @property
    def scenario_id(self):
        m = "inf" if self.m is None else str(self.m)
        return f"m{m}_c{self.sigma_multiplier:g}_d{self.delta:g}_q{self.q:g}"


def scenario_grid(base: ScenarioConfig | None = None, m_values=M_VALUES,
                  sigma_multipliers=SIGMA_MULTIPLIERS, deltas=DELTAS, q_values=Q_VALUES):
    """Cartesian product of the four swept axes, in lexicographic axis order."""
    base = base or ScenarioConfig()
    return [replace(base, m=m, sigma_multiplier=c, delta=d, q=q)
            for m, c, d, q in itertools.product(m_values, sigma_multipliers, deltas, q_values)]


def run_seed(master_seed, scenario_id, run):
    key = zlib.crc32(scenario_id.encode("utf-8"))
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(key, run))


@dataclass
class Draws:
    uniforms: np.ndarray  # (T, R, 4)
    normals: np.ndarray   # (T, R)

    @classmethod
    def for_runs(cls, scenario: ScenarioConfig, runs):
        u = np.empty((scenario.T, len(runs), _N_UNIFORM))
        z = np.empty((scenario.T, len(runs)))
        for j, r in enumerate(runs):
            rng = np.random.Generator(np.random.PCG64(run_seed(scenario.master_seed,
                                                              scenario.scenario_id, r)))
            u[:, j, :] = rng.random((scenario.T, _N_UNIFORM))
            z[:, j] = rng.standard_normal(scenario.T)
        return cls(u, z)


@dataclass
class RunTrace:
    """Per-period records, shape (T, R). One run is ``trace.run(r)``."""

    explore: np.ndarray
    forced: np.ndarray
    desired: np.ndarray
    premium: np.ndarray
    accepted: np.ndarray
    effort: np.ndarray
    theta: np.ndarray
    outcome: np.ndarray
    estimate: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    @classmethod
    def empty(cls, T, R):
        kw = {}
        for f in fields(cls):
            dtype = bool if f.name in ("explore", "forced", "accepted") else float
            kw[f.name] = np.zeros((T, R), dtype=dtype)
        return cls(**kw)

    def run(self, r):
        return RunTrace(**{f.name: getattr(self, f.name)[:, r:r + 1] for f in fields(self)})

    def record(self, t, **values):
        for name, v in values.items():
            getattr(self, name)[t] = v


@dataclass
class WorldState:
    t: int
    status_quo: np.ndarray
    premium: np.ndarray
    force_explore: np.ndarray
    principal_memory: MemoryBank
    agent_memory: MemoryBank
    sigma: float
    draws: Draws


def init_run(scenario: ScenarioConfig, sigma: float, runs=None) -> WorldState:
    """Fresh state for the given run indices (default: all R runs)."""
    runs = list(range(scenario.R)) if runs is None else list(runs)
    n = len(runs)
    return WorldState(
        t=0,
        status_quo=np.zeros(n),
        premium=np.zeros(n),
        force_explore=np.zeros(n, dtype=bool),
        principal_memory=MemoryBank(n, scenario.T, scenario.m),
        agent_memory=MemoryBank(n, scenario.T, scenario.m),
        sigma=sigma,
        draws=Draws.for_runs(scenario, runs),
    )


def step(state: WorldState, scenario: ScenarioConfig, trace: RunTrace):
    """Advance every run by one period and write the period into ``trace``."""
    agent = scenario.agent
    t = state.t
    u = state.draws.uniforms[t]
    pm, am = state.principal_memory, state.agent_memory
    e_p = pm.expectation()
    e_a = am.expectation()
    lower, upper = action_bounds(e_p, agent)
    empty = np.isnan(lower)
    with np.errstate(invalid="ignore"):
        if t == 0:
            # no status quo yet: one uniform candidate in the initial space
            explore = np.zeros_like(empty)
            forced = np.zeros_like(empty)
            desired = lower + u[:, 3] * (upper - lower)
        else:
            sq = state.status_quo
            feasible = (~state.force_explore & ~empty
                        & (sq >= lower - _FEAS_TOL) & (sq <= upper + _FEAS_TOL))
            forced = ~feasible
            explore = explore_decision(pm.last(), pm.expectation(), pm.std(), scenario.delta,
                                       feasible, u[:, 0], scenario.threshold_mode,
                                       scenario.degenerate_threshold)
            win_l, win_r = exploitation_bounds(lower, upper, scenario.q, np.clip(sq, lower, upper))
            c1 = draw_candidates(lower, upper, win_l, win_r, explore, forced, u[:, 1])
            c2 = draw_candidates(lower, upper, win_l, win_r, explore, forced, u[:, 2])
            desired = np.maximum(c1, c2)
            if scenario.status_quo_competes:
                desired = np.where(feasible, np.maximum(desired, sq), desired)

        premium = premium_for(desired, e_p, agent)
        unimplementable = np.isnan(premium) & ~empty
        if np.any(unimplementable):
            log.debug("period %d: %d desired efforts unimplementable, falling back to upper bound",
                      t + 1, int(unimplementable.sum()))
            desired = np.where(unimplementable, upper, desired)
            premium = np.where(unimplementable, premium_for(upper, e_p, agent), premium)
        offered = ~empty & ~np.isnan(premium)
        accepted = offered & acceptance(premium, e_a, lower, upper, agent, desired,
                                        scenario.accept_on_offer_only)
    if np.any(~accepted):
        log.debug("period %d: %d contracts not concluded", t + 1, int((~accepted).sum()))

    effort = np.where(accepted, effort_choice(np.nan_to_num(premium), e_a, lower, upper, agent), 0.0)
    theta = scenario.env_mean + state.sigma * state.draws.normals[t]
    if scenario.rejection_learning == "shock":
        # without a contract nobody works, so the outcome is the bare shock
        x = effort * agent.rho + theta
        estimate = np.where(accepted, estimate_theta(x, desired, agent.rho), x)
        pm.record(estimate)
        am.record(theta)
    else:
        x = np.where(accepted, effort * agent.rho + theta, np.nan)
        estimate = estimate_theta(x, desired, agent.rho)
        pm.record(estimate, accepted)
        am.record(theta, accepted)

    trace.record(t, explore=explore, forced=forced, desired=desired, premium=premium,
                 accepted=accepted, effort=effort, theta=theta, outcome=x, estimate=estimate,
                 lower=lower, upper=upper)

    if t == 0:
        state.status_quo = np.where(np.isnan(desired), 0.0, desired)
    else:
        state.status_quo = np.where(accepted, desired, state.status_quo)
    state.premium = np.where(accepted, premium, state.premium)
    state.force_explore = ~accepted
    state.t += 1
    return state


def simulate(scenario: ScenarioConfig, sigma: float, runs=None) -> RunTrace:
    """Run all T periods for the given runs and return their trace."""
    state = init_run(scenario, sigma, runs)
    trace = RunTrace.empty(scenario.T, len(state.status_quo))
    for _ in range(scenario.T):
        step(state, scenario, trace)
    return trace


@dataclass
class ScenarioOutput:
    scenario: ScenarioConfig
    benchmark: ScenarioBenchmark
    trace: RunTrace

    @property
    def effort_star(self):
        return self.benchmark.effort_star(self.scenario.normalization)


_BENCH_CACHE: dict = {}


def benchmark_for(scenario: ScenarioConfig) -> ScenarioBenchmark:
    key = (scenario.agent, scenario.sigma_multiplier, scenario.env_mean)
    if key not in _BENCH_CACHE:
        _BENCH_CACHE[key] = scenario_benchmark(scenario.agent, scenario.sigma_multiplier,
                                               scenario.env_mean)
    return _BENCH_CACHE[key]


def run_scenario_raw(scenario: ScenarioConfig) -> ScenarioOutput:
    bench = benchmark_for(scenario)
    return ScenarioOutput(scenario, bench, simulate(scenario, bench.sigma))


def run_scenarios_raw(scenarios, workers=1):
    """Run scenarios, in parallel across processes when ``workers > 1``.

    Output order always follows input order.
    """
    scenarios = list(scenarios)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if workers == 1 or len(scenarios) <= 1:
        return [run_scenario_raw(s) for s in scenarios]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_scenario_raw, scenarios, chunksize=max(1, len(scenarios) // (4 * workers))))
