"""A two-segment track whose gap sum L need not drop in one step.

When the inner heads already touch (L3 = 1) the only event is their conflict.
If the counterclockwise head wins, it joins the other segment and nothing
moves, so L stays put. Otherwise the track becomes uniform.
"""
import numpy as np

from ringmarch import analysis, engine, io
from ringmarch.model import ModelParams
from ringmarch.properties import RunMonitor

start = io.parse(">...>.><..")
segs = analysis.extract_segments(start, 0)
tails = {int(s.heading): s.tail for s in segs}
before = analysis.compute_potentials(start, 0, tails[1], tails[-1])
print(io.render(start).rstrip())
print(f"L={before.L} (L3={before.L3})")

stalls = 0
for seed in range(200):
    monitor = RunMonitor(ModelParams())
    monitor.start(start)
    after, report = engine.step(start, np.random.default_rng(seed), ModelParams())
    monitor.observe(start, report, after)
    stalls += monitor.failures.get("L_strict", 0)
print(f"L failed to decrease in {stalls} of 200 seeded steps")
