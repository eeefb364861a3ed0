"""Global consensus needs erratic vertical moves; more of them help.

Runs column c of the sweep on a small ring with few trials.
"""
from ringmarch import engine, experiments as ex

for p in (0.05, 0.2, 0.8):
    spec = ex.fig4_spec(30, 5, ex.DENSE, "eager", p, engine.GLOBAL, trials=50, seed=5)
    res = ex.monte_carlo(spec)
    print(f"p={p:<4}  mean T_stable {res.mean_t_stable:8.1f} +- {res.stderr:.1f}  timeouts {res.timeouts}")
