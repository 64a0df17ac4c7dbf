"""The static second-best contract and how it moves with uncertainty.

Prints the premium, induced effort and the principal's expected utility for
the default agent at a few noise levels, next to the brute-force grid oracle.

Watch the jump between c = 0.25 and c = 0.45: once the shock is noisy enough,
the agent's exponential penalty makes effort so valuable to the agent that a large
premium with binding participation beats the low-premium contract.
"""

from hidden_action import AgentParams, EnvironmentParams, brute_force_oracle, solve_second_best

agent = AgentParams()
x0 = solve_second_best(agent).outcome_star
print(f"noise-free benchmark outcome x* = {x0:.3f}\n")
print(f"{'c':>5} {'sigma':>8} {'p*':>9} {'a*':>8} {'EU_P':>9} {'oracle a*':>10}")
for c in (0.0, 0.05, 0.25, 0.45, 0.65):
    env = EnvironmentParams(sigma=c * x0)
    b = solve_second_best(agent, None, env)
    o = brute_force_oracle(agent, env, refine=2)
    print(f"{c:5.2f} {env.sigma:8.3f} {b.premium_star:9.6f} {b.effort_star:8.4f} "
          f"{b.principal_eu:9.4f} {o.effort_star:10.4f}")
