"""One scenario, period by period.

A principal with a one-period memory in a turbulent environment: the mean
normalized effort, its 99% interval, and how often she explores.
"""

from hidden_action import ScenarioConfig, run_scenario_raw
from hidden_action.metrics import summarize

scenario = ScenarioConfig(m=1, q=10, delta=0.5, sigma_multiplier=0.65, R=300)
out = run_scenario_raw(scenario)
res = summarize(out)
tr = out.trace

print(f"scenario {scenario.scenario_id}, a* = {res.effort_star:.4f}, R = {scenario.R}")
print(f"{'t':>3} {'p_t':>7} {'99% CI':>17} {'explore':>8} {'accepted':>9}")
for t in range(scenario.T):
    print(f"{t + 1:3d} {res.p_tilde[t]:7.3f} [{res.ci_low[t]:6.3f}, {res.ci_high[t]:6.3f}] "
          f"{tr.explore[t].mean():8.2f} {tr.accepted[t].mean():9.2f}")
print(f"\nManhattan distance d = {res.d:.3f}")
