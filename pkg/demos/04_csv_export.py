"""Small sweep written to CSV, then read back.

Runs a 2 x 2 slice of the grid and writes the time-series and contour files
to a temporary directory.
"""

import tempfile
from pathlib import Path

from hidden_action import emit_contour_csv, emit_timeseries_csv, run_scenario, scenario_grid, ScenarioConfig
from hidden_action.metrics import read_timeseries_csv

scenarios = scenario_grid(ScenarioConfig(R=200), m_values=(1, None), sigma_multipliers=(0.05, 0.65),
                          deltas=(0.5,), q_values=(10,))
results = [run_scenario(s) for s in scenarios]
out = Path(tempfile.mkdtemp(prefix="hidden_action_"))
ts = emit_timeseries_csv(results, out / "timeseries.csv")
ct = emit_contour_csv(results, out / "contour.csv")
print(f"wrote {ts} and {ct}\n")
print(ct.read_text())
for sid, series in read_timeseries_csv(ts).items():
    print(f"{sid:24s} first {series[0]:.3f}  last {series[-1]:.3f}")
