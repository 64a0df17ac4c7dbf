"""Does a longer memory help?

Compares memory lengths 1, 3 and unbounded in a stable and a turbulent
environment and prints a coarse text plot of the three curves.
"""

from hidden_action import ScenarioConfig, run_scenario

R = 300
for c in (0.05, 0.65):
    print(f"\nsigma multiplier {c}")
    curves = {}
    for m in (1, 3, None):
        r = run_scenario(ScenarioConfig(m=m, q=10, delta=0.5, sigma_multiplier=c, R=R))
        curves["inf" if m is None else str(m)] = r
    for label, r in curves.items():
        bar = "".join("#" if p > 0.9 else "+" if p > 0.8 else "-" if p > 0.7 else "." for p in r.p_tilde)
        print(f"  m={label:>3}  p_20={r.p_tilde[-1]:.3f}  d={r.d:7.2f}  {bar}")
print("\nlegend: # > 0.9, + > 0.8, - > 0.7, . otherwise (one character per period)")
