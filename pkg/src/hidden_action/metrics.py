"""Performance measures and their CSV export.

Performance in period t is the mean effort across runs relative to the
benchmark effort. A whole curve condenses into its summed shortfall from 1
(a Manhattan distance to the benchmark line): 0 is perfect, more negative is
worse.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import ndtri

from .engine import ScenarioConfig, ScenarioOutput, run_scenario_raw

TIMESERIES_COLUMNS = ("scenario_id", "m", "q", "delta", "sigma_mult", "t", "p_tilde", "ci_low", "ci_high")
CONTOUR_COLUMNS = ("m", "q", "delta", "sigma_mult", "d")
DEFAULT_ALPHA = 0.01
N_BOOTSTRAP = 2000


def normalized_effort_series(efforts, effort_star):
    """Mean over runs of effort / a* for each period.

    ``efforts`` has shape (T, R): one row per period, one column per run.
    """
    if not effort_star > 0:
        raise ValueError(f"effort_star must be positive, got {effort_star}")
    efforts = np.atleast_2d(np.asarray(efforts, dtype=float))
    return efforts.mean(axis=1) / effort_star


def manhattan_distance(series, literal=False):
    """Sum of ``p_t - 1`` over the series.

    ``literal=True`` repeats the first entry ``T`` times instead, which makes
    the measure blind to everything after period 1. It exists only to audit
    that reading.
    """
    series = np.asarray(series, dtype=float)
    if literal:
        return float(len(series) * (series[0] - 1.0)) if series.size else 0.0
    return float(np.sum(series - 1.0))


def confidence_interval(samples, alpha=DEFAULT_ALPHA, method="normal", rng=None):
    """Two-sided (1 - alpha) interval for the mean of ``samples``.

    ``normal`` uses mean +- z * s / sqrt(n). ``bootstrap`` gives percentile
    bounds from resampled means and needs ``rng`` for reproducibility.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise ValueError(f"need at least 2 samples for an interval, got {x.size}")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    mean = float(x.mean())
    if method == "normal":
        half = float(ndtri(1.0 - alpha / 2) * x.std(ddof=1) / np.sqrt(x.size))
        return mean - half, mean + half
    if method == "bootstrap":
        rng = rng if rng is not None else np.random.default_rng(0)
        means = x[rng.integers(0, x.size, (N_BOOTSTRAP, x.size))].mean(axis=1)
        lo, hi = np.quantile(means, [alpha / 2, 1 - alpha / 2])
        return float(min(lo, mean)), float(max(hi, mean))
    raise ValueError(f"unknown interval method {method!r}; use 'normal' or 'bootstrap'")


@dataclass
class ScenarioResult:
    scenario: ScenarioConfig
    effort_star: float
    p_tilde: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    d: float
    final_efforts: np.ndarray

    def __post_init__(self):
        T = self.scenario.T
        if not len(self.p_tilde) == len(self.ci_low) == len(self.ci_high) == T:
            raise ValueError(f"series length must equal T={T}")

    @property
    def scenario_id(self):
        return self.scenario.scenario_id


def summarize(output: ScenarioOutput, alpha=DEFAULT_ALPHA, ci_method="normal",
              manhattan_literal=False) -> ScenarioResult:
    a_star = output.effort_star
    norm = output.trace.effort / a_star
    p = normalized_effort_series(output.trace.effort, a_star)
    bounds = np.array([confidence_interval(row, alpha, ci_method, np.random.default_rng(t))
                       for t, row in enumerate(norm)])
    # guard the invariant against rounding when all runs agree
    low = np.minimum(bounds[:, 0], p)
    high = np.maximum(bounds[:, 1], p)
    return ScenarioResult(
        scenario=output.scenario,
        effort_star=a_star,
        p_tilde=p,
        ci_low=low,
        ci_high=high,
        d=manhattan_distance(p, literal=manhattan_literal),
        final_efforts=output.trace.effort[-1].copy(),
    )


def run_scenario(scenario: ScenarioConfig, alpha=DEFAULT_ALPHA, **kw) -> ScenarioResult:
    return summarize(run_scenario_raw(scenario), alpha, **kw)


def _m_label(m):
    return "inf" if m is None else str(m)


def _fmt(x):
    return repr(float(x))


def _write(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def emit_timeseries_csv(results, path):
    """One row per scenario and period."""
    rows = []
    for r in results:
        s = r.scenario
        for t in range(len(r.p_tilde)):
            rows.append((r.scenario_id, _m_label(s.m), f"{s.q:g}", f"{s.delta:g}",
                         f"{s.sigma_multiplier:g}", t + 1, _fmt(r.p_tilde[t]),
                         _fmt(r.ci_low[t]), _fmt(r.ci_high[t])))
    return _write(path, TIMESERIES_COLUMNS, rows)


def emit_contour_csv(results, path):
    """One row per grid cell holding its Manhattan distance."""
    rows = [(_m_label(r.scenario.m), f"{r.scenario.q:g}", f"{r.scenario.delta:g}",
             f"{r.scenario.sigma_multiplier:g}", _fmt(r.d)) for r in results]
    return _write(path, CONTOUR_COLUMNS, rows)


def read_timeseries_csv(path):
    """Parse a time-series file back into ``{scenario_id: p_tilde array}``."""
    out: dict[str, list] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(row["scenario_id"], []).append(float(row["p_tilde"]))
    return {k: np.array(v) for k, v in out.items()}
