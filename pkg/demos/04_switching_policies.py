"""Track switching speeds up consensus: eager versus never on a sparse 30x30 ring."""
from ringmarch import experiments as ex

for policy in ("never", "eager"):
    spec = ex.fig4_spec(30, 30, ex.SPARSE, policy, trials=200, seed=11)
    res = ex.monte_carlo(spec)
    lo, hi = res.ci95()
    print(f"{policy:>6}: mean T_stable {res.mean_t_stable:6.2f}  95% CI [{lo:.2f}, {hi:.2f}]  "
          f"locusts/run {res.mean_m:.1f}  timeouts {res.timeouts}")
