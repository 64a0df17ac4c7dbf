"""Information systems about the environment.

``RollingMemory`` is the single-run memory used by either party: a bounded
(depth ``m``) or unbounded record of shock estimates or observations, whose
mean is the party's expectation of the next shock. ``MemoryBank`` holds the
same thing for many independent runs at once so the engine can advance all
replications of a scenario together.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Sophistication:
    """Memory depth ``m`` (None = unbounded) and exploitation divisor ``q``."""

    m: int | None = None
    q: float = 10

    def __post_init__(self):
        if self.m is not None and self.m < 1:
            raise ValueError(f"m must be >= 1 or None (unbounded), got {self.m}")
        if not self.q >= 1:
            raise ValueError(f"q must be >= 1, got {self.q}")


class RollingMemory:
    """Ordered record of values, newest last, keeping at most ``capacity``.

    With ``capacity=None`` nothing is evicted.
    """

    def __init__(self, capacity=None, entries=()):
        if capacity is not None and capacity < 1:
            raise ValueError(f"capacity must be >= 1 or None, got {capacity}")
        self.capacity = capacity
        self._entries = deque(entries, maxlen=capacity)
        self._sum = float(sum(self._entries))

    def record(self, value):
        value = float(value)
        if self.capacity is not None and len(self._entries) == self.capacity:
            self._sum -= self._entries[0]
        self._entries.append(value)
        self._sum += value
        return self

    @property
    def entries(self):
        return list(self._entries)

    def __len__(self):
        return len(self._entries)

    def window(self, m=None):
        """The last ``m`` entries (all retained entries if ``m`` is None)."""
        if m is None or m >= len(self._entries):
            return self.entries
        return self.entries[-m:]

    def expectation(self):
        """Mean of retained entries, 0.0 for an empty memory."""
        if not self._entries:
            return 0.0
        if self.capacity is None:
            return self._sum / len(self._entries)
        # recompute for bounded windows: running sums drift under eviction
        return float(np.mean(self._entries))


def estimate_theta(x, desired_effort, rho):
    """Principal's shock estimate: outcome minus what the desired effort explains."""
    return np.subtract(x, np.multiply(desired_effort, rho))


class MemoryBank:
    """``n_runs`` rolling memories of depth ``m`` stored as one array.

    Each run holds at most ``horizon`` records. Runs can be updated
    selectively through a boolean mask, so one run skipping a record (a
    rejected contract) does not disturb the others.
    """

    def __init__(self, n_runs, horizon, m=None):
        if m is not None and m < 1:
            raise ValueError(f"m must be >= 1 or None, got {m}")
        self.m = m
        self.values = np.zeros((n_runs, horizon))
        self.count = np.zeros(n_runs, dtype=int)
        self._cols = np.arange(horizon)

    def record(self, values, mask=None):
        rows = np.arange(len(self.count))
        if mask is not None:
            rows = rows[mask]
            values = np.asarray(values)[mask]
        self.values[rows, self.count[rows]] = values
        self.count[rows] += 1

    def _window_mask(self):
        n = self.count[:, None]
        k = n if self.m is None else np.minimum(n, self.m)
        return (self._cols[None, :] < n) & (self._cols[None, :] >= n - k)

    def window_size(self):
        return self.count if self.m is None else np.minimum(self.count, self.m)

    def expectation(self):
        """Per-run window mean; 0.0 where nothing has been recorded."""
        mask = self._window_mask()
        k = mask.sum(axis=1)
        total = np.where(mask, self.values, 0.0).sum(axis=1)
        return np.divide(total, k, out=np.zeros(len(k)), where=k > 0)

    def std(self):
        """Per-run sample standard deviation of the window (0.0 below two entries)."""
        mask = self._window_mask()
        k = mask.sum(axis=1)
        mean = self.expectation()
        dev = np.where(mask, self.values - mean[:, None], 0.0)
        var = np.divide((dev * dev).sum(axis=1), k - 1, out=np.zeros(len(k)), where=k > 1)
        return np.sqrt(var)

    def last(self):
        """Most recent record per run (0.0 where empty)."""
        idx = np.maximum(self.count - 1, 0)
        return np.where(self.count > 0, self.values[np.arange(len(idx)), idx], 0.0)

    def memory(self, run):
        """The ``run``-th memory as a standalone RollingMemory."""
        rec = self.values[run, : self.count[run]]
        return RollingMemory(self.m, rec if self.m is None else rec[-self.m:])
