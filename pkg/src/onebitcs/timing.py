"""Wall-clock comparison of the breakpoint-walk MCP solver, its naive variant and Passive.

Absolute numbers are hardware-bound; only orderings and ratios are meaningful.
"""

from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from .dual import solve_mcp, solve_passive
from .oracles import mcp_naive
from .sensing import NoiseModel, SignalSpec, correlation, generate_signal, make_rng, sense, trial_seed

TIMING_COLUMNS = ("m", "n", "method", "mean_ms", "sd_ms", "median_ms", "trials")
TABLE_PAIRS = ((500, 1000), (1000, 1000), (2000, 5000), (5000, 5000))
MIN_REPEATS = 20


def median_time(fn: Callable[[], object], repeats: int = MIN_REPEATS, warmup: int = 2) -> float:
    """Median wall-clock seconds of ``fn()`` over ``repeats`` warm calls."""
    if repeats < 1:
        raise ValueError("repeats must be positive")
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def solvers(lam: float, b: float) -> Dict[str, Callable[[np.ndarray], object]]:
    return {
        "passive": lambda v: solve_passive(v, lam),
        "mcp": lambda v: solve_mcp(v, lam, b),
        "mcp_naive": lambda v: mcp_naive(v, lam, b),
    }


@dataclass(frozen=True)
class TimingRow:
    m: int
    n: int
    method: str
    mean_ms: float
    sd_ms: float
    median_ms: float
    trials: int


def timing_table(
    pairs: Sequence[Tuple[int, int]] = TABLE_PAIRS,
    methods: Sequence[str] = ("mcp", "mcp_naive", "passive"),
    trials: int = 100,
    lam: float = 0.1,
    b: float = 3.0,
    repeats: int = MIN_REPEATS,
    base_seed: int = 0,
    k: int = 15,
    s_n: float = 10.0,
    flip_ratio: float = 0.1,
) -> List[TimingRow]:
    """Per-trial median time of ``v = correlation(ens)`` plus one solve.

    Each trial draws a fresh Fig.-1-style ensemble; the row reports the
    mean and standard deviation of those per-trial medians.  Runs
    serially by design.
    """
    fns = solvers(lam, b)
    rows = []
    for p, (m, n) in enumerate(pairs):
        per = {meth: [] for meth in methods}
        for t in range(trials):
            rng = make_rng(trial_seed(base_seed, p, t))
            x = generate_signal(SignalSpec(n, min(k, n)), rng)
            ens = sense(x, m, NoiseModel(s_n, flip_ratio), rng)
            for meth in methods:
                f = fns[meth]
                per[meth].append(median_time(lambda: f(correlation(ens)), repeats))
        for meth in methods:
            ms = 1e3 * np.asarray(per[meth])
            rows.append(TimingRow(m, n, meth, float(ms.mean()), float(ms.std()),
                                  float(np.median(ms)), trials))
    return rows


def timing_csv(rows: Sequence[TimingRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TIMING_COLUMNS)
    for r in rows:
        w.writerow([r.m, r.n, r.method, repr(r.mean_ms), repr(r.sd_ms), repr(r.median_ms), r.trials])
    return buf.getvalue()
