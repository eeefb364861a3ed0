"""Exact expected stabilization time of tiny single tracks against simulation."""
import numpy as np

from ringmarch import engine, io, oracle
from ringmarch.model import ModelParams

rng = np.random.default_rng(2)
for text in (">><<..", ">>..<<", "><<>", ">.<.>.<"):
    n, m = len(text), sum(ch != "." for ch in text)
    exact = oracle.exact_expected_stabilization(n, m, text)
    sims = engine.sample_t_stable(io.parse(text), rng, ModelParams(), 20000)
    mean = sims[:, 0].mean()
    se = sims[:, 0].std(ddof=1) / np.sqrt(len(sims))
    print(f"{text:>8}  states={exact.state_count:4d}  exact={exact.expected_t_stable:7.4f}  "
          f"simulated={mean:7.4f} +- {se:.4f}")
