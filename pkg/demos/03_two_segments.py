"""Two opposing segments: conflicts follow a fair gambler's ruin.

With m locusts split evenly the expected number of conflicts is (m/2)^2.
"""
import numpy as np

from ringmarch import analysis, engine, experiments, io, oracle
from ringmarch.model import ModelParams

n, m = 20, 10
start = experiments.gen_two_segment(n, m)
print(io.render(start))
segs = analysis.extract_segments(start, 0)
tails = {int(s.heading): s.tail for s in segs}
pot = analysis.compute_potentials(start, 0, tails[1], tails[-1])
print(f"potentials: L1={pot.L1} L2={pot.L2} L3={pot.L3} L={pot.L} F={pot.F}")

sims = engine.sample_t_stable(start, np.random.default_rng(3), ModelParams(), 5000)
print(f"mean conflicts {sims[:, 1].mean():.2f}, expected {oracle.gamblers_ruin_expected(m // 2, m // 2)}")
print(f"mean T_stable {sims[:, 0].mean():.2f}, bound {experiments.theorem1_bound(n, m)}")
