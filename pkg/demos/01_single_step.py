"""Walk through one time step on a three-track ring and print what happened."""
import numpy as np

from ringmarch import engine, io
from ringmarch.model import ModelParams

start = io.parse("t=0\n..>..><.\n>.>..<..\n>.....>.\n")
print("start:")
print(io.render(start))

new, report = engine.step(start, np.random.default_rng(4), ModelParams())
print("conflicts (left, right, winner):")
for c in report.conflicts:
    print(" ", c)
print("horizontal moves:")
for mv in report.horizontal_moves:
    print(f"  locust {mv.locust}: {tuple(mv.src)} -> {tuple(mv.dst)}")
print("vertical moves:")
for mv in report.vertical_moves:
    print(f"  locust {mv.locust}: track {mv.src.y} -> track {mv.dst.y}{' (erratic)' if mv.erratic else ''}")
print()
print("after one step:")
print(io.render(new))
