"""Breakpoint walk versus the naive MCP solver and the passive baseline.

The naive solver tries every support split and solves a root problem for
each; the walk sorts once and needs at most one root solve.
"""

import numpy as np

from onebitcs import solve_mcp, solve_passive
from onebitcs.oracles import mcp_naive
from onebitcs.timing import median_time

rng = np.random.default_rng(0)
lam, b = 0.1, 3.0
for n in (100, 1000, 5000):
    v = rng.standard_normal(n) / np.sqrt(n) * 3
    t_walk = median_time(lambda: solve_mcp(v, lam, b))
    t_pass = median_time(lambda: solve_passive(v, lam))
    t_naive = median_time(lambda: mcp_naive(v, lam, b), repeats=3, warmup=0)
    a, c = solve_mcp(v, lam, b), mcp_naive(v, lam, b)
    print(f"n={n:5d}  walk {t_walk*1e3:8.3f} ms  passive {t_pass*1e3:8.3f} ms  "
          f"naive {t_naive*1e3:9.2f} ms  |dx| = {np.abs(a.x - c.x).max():.1e}")
