"""Acceptance criteria 1-9, one PASS/FAIL line each (shown in the pytest summary)."""

import functools
import math
import time

import numpy as np
import pytest

from onebitcs.dual import Status, dual_value, objective, solve, solve_l0, solve_mcp, solve_passive
from onebitcs.experiment import ExperimentConfig, fig1_config, run_sweep
from onebitcs.oracles import dual_bisection, l0_support_enumeration, mcp_naive, sphere_grid_search
from onebitcs.penalties import Penalty, evaluate, proximal_point
from onebitcs.sensing import NoiseModel, SignalSpec, correlation, generate_signal, make_rng, sense, trial_seed
from onebitcs.timing import MIN_REPEATS, median_time

METHODS = ("passive", "mcp", "l0", "sorted_l1")


def _instance(rng, n=None):
    n = int(rng.integers(1, 9)) if n is None else n
    v = rng.standard_normal(n) * 10 ** rng.uniform(-1.5, 0.5)
    lam = float(10 ** rng.uniform(-3, 0))
    b = float(rng.choice([1.5, 3.0, 6.0]))
    w = np.sort(rng.uniform(0, 1, n))[::-1]
    return v, lam, b, w


@functools.lru_cache(maxsize=None)
def _equivalence_run():
    """The 1000 seeded instances shared by criteria 2 and 5."""
    rng = make_rng(20240)
    worst_bis = worst_enum = 0.0
    worst_grid = -math.inf
    n2 = 0
    most_roots = 0
    for _ in range(1000):
        v, lam, b, w = _instance(rng)
        mcp, l0 = Penalty.mcp(lam, b), Penalty.l0(lam)
        fast_mcp = solve_mcp(v, lam, b)
        most_roots = max(most_roots, fast_mcp.root_solves)
        for pen, fast in ((mcp, fast_mcp), (l0, solve_l0(v, lam))):
            ref = dual_bisection(pen, v)
            worst_bis = max(worst_bis, abs(objective(pen, v, fast.x) - objective(pen, v, ref.x)))
        _, F = l0_support_enumeration(v, lam)
        worst_enum = max(worst_enum, abs(objective(l0, v, solve_l0(v, lam).x) - F))
        if v.size == 2:
            n2 += 1
            for pen in (Penalty.l1(lam), mcp, l0, Penalty.sorted_l1(lam, w)):
                f_grid = objective(pen, v, sphere_grid_search(pen, v))
                worst_grid = max(worst_grid, objective(pen, v, solve(pen, v).x) - f_grid)
    return worst_bis, worst_enum, worst_grid, n2, most_roots


def test_criterion_1_remark_fixture(report):
    t0 = time.perf_counter()
    s = solve_l0(np.array([0.5]), 1.0)
    r = dual_bisection(Penalty.l0(1.0), np.array([0.5]))
    elapsed = time.perf_counter() - t0
    ok = (abs(s.mu - 0.125) <= 1e-12 and not np.any(s.x) and s.status is Status.GAP_NONZERO
          and abs(s.gap - 1 / 16) <= 1e-10 and abs(r.mu - 0.125) <= 1e-9 and elapsed < 1)
    assert report(1, ok, f"mu={s.mu:.15g} x={s.x.tolist()} status={s.status.value} gap={s.gap:.15g} "
                         f"bisection mu={r.mu:.12g} ({elapsed:.3f}s)")


def test_criterion_2_oracle_equivalence(report):
    t0 = time.perf_counter()
    worst_bis, worst_enum, worst_grid, n2, _ = _equivalence_run()
    elapsed = time.perf_counter() - t0
    ok = worst_bis <= 1e-8 and worst_enum <= 1e-10 and worst_grid <= 1e-3 and elapsed < 120
    assert report(2, ok, f"max|dF| vs bisection {worst_bis:.2e} (<=1e-8), l0 vs enumeration "
                         f"{worst_enum:.2e} (<=1e-10), n=2 excess over grid {worst_grid:.2e} (<=1e-3, "
                         f"{n2} instances), {elapsed:.0f}s")


def test_criterion_3_certification(report):
    rng = make_rng(20241)
    uncert = 0
    worst_gap = worst_cs = worst_id = 0.0
    for _ in range(1000):
        v, lam, _, w = _instance(rng)
        for pen in (Penalty.l1(lam), Penalty.sorted_l1(lam, w)):
            s = solve(pen, v)
            uncert += not s.certified
            worst_gap = max(worst_gap, abs(s.gap))
            worst_cs = max(worst_cs, abs(s.mu * (s.x @ s.x - 1)))
            t = proximal_point(pen, v, 1.0)
            worst_id = max(worst_id, abs(evaluate(pen, t) - t @ v + t @ t))
    ok = uncert == 0 and worst_gap <= 1e-8 and worst_cs <= 1e-8 and worst_id <= 1e-10
    assert report(3, ok, f"uncertified {uncert}/2000, max|gap| {worst_gap:.2e}, max|mu(|x|^2-1)| "
                         f"{worst_cs:.2e}, max identity error {worst_id:.2e}")


def test_criterion_4_dual_structure(report):
    rng = make_rng(20242)
    worst = 0.0
    for _ in range(200):
        v, lam, b, w = _instance(rng)
        top = float(np.linalg.norm(v)) + lam + 1.0
        mus = np.linspace(top / 100, top, 100)
        for pen in (Penalty.l1(lam), Penalty.mcp(lam, b), Penalty.l0(lam), Penalty.sorted_l1(lam, w)):
            s = np.array([dual_value(pen, v, mu)[2] for mu in mus])
            worst = max(worst, float(np.max(s[:-1] - s[1:])))
    assert report(4, worst <= 1e-10, f"largest decrease of (1-|x(mu)|^2)/2 over 200x4 instances: {worst:.2e}")


def test_criterion_5_walk_budget(report):
    most = _equivalence_run()[4]
    assert report(5, most <= 1, f"max root solves per solve_mcp call over criterion-2 instances: {most}")


def test_criterion_6_timing_ordering(report):
    t0 = time.perf_counter()
    mcp_t, pas_t = [], []
    for t in range(5):
        rng = make_rng(trial_seed(6, 0, t))
        x = generate_signal(SignalSpec(1000, 15), rng)
        v = correlation(sense(x, 1000, NoiseModel(10.0, 0.1), rng))
        mcp_t.append(median_time(lambda: solve_mcp(v, 0.1, 3.0), 4 * MIN_REPEATS))
        pas_t.append(median_time(lambda: solve_passive(v, 0.1), 4 * MIN_REPEATS))
    ratio_a = float(np.median(mcp_t) / np.median(pas_t))

    v = make_rng(66).standard_normal(5000)
    fast = median_time(lambda: solve_mcp(v, 0.1, 3.0), MIN_REPEATS)
    naive = median_time(lambda: mcp_naive(v, 0.1, 3.0), MIN_REPEATS, warmup=1)
    ratio_b = naive / fast
    elapsed = time.perf_counter() - t0
    ok = ratio_a <= 5 and ratio_b >= 10 and elapsed < 300
    assert report(6, ok, f"n=m=1000: solve_mcp/solve_passive = {ratio_a:.2f} (<=5); n=5000: "
                         f"mcp_naive/solve_mcp = {ratio_b:.0f} (>=10); {elapsed:.0f}s")


def _nondecreasing(values, slack=0.3):
    drops = [a - b for a, b in zip(values, values[1:]) if b < a]
    return len(drops) == 0 or (len(drops) == 1 and drops[0] <= slack)


def test_criterion_7_recovery_ordering(report):
    t0 = time.perf_counter()
    cfg = ExperimentConfig(n=1000, m=[500, 1000, 2000], k=15, s_n=10.0, flip_ratio=0.1,
                           trials=100, param_mode="ideal")
    res = run_sweep(cfg)
    snr = {meth: res.mean(meth) for meth in METHODS}
    base = snr["passive"][1000]
    gains = {meth: snr[meth][1000] - base for meth in ("mcp", "l0", "sorted_l1")}
    mono = {meth: _nondecreasing([snr[meth][m] for m in (500, 1000, 2000)]) for meth in METHODS}
    elapsed = time.perf_counter() - t0
    ok = all(g >= 1.0 for g in gains.values()) and all(mono.values()) and elapsed < 900
    curves = "; ".join(f"{m} " + "/".join(f"{snr[m][k]:.2f}" for k in (500, 1000, 2000)) for m in METHODS)
    assert report(7, ok, "gain over passive at m=1000 (>=1 dB): "
                         + ", ".join(f"{k} {g:+.3f}" for k, g in gains.items())
                         + f"; SNR at m=500/1000/2000: {curves}; monotone: {all(mono.values())}; {elapsed:.0f}s")


def test_criterion_8_noiseless_sanity(report):
    cfg = ExperimentConfig(n=200, m=2000, k=5, s_n=math.inf, flip_ratio=0.0, trials=20, param_mode="ideal")
    res = run_sweep(cfg)
    inr = {meth: res.mean(meth, metric="inr")[2000] for meth in METHODS}
    ae = {meth: res.mean(meth, metric="ae")[2000] for meth in METHODS}
    ok = all(inr[m] <= 0.02 and ae[m] <= 0.1 for m in METHODS)
    assert report(8, ok, "mean INR (<=0.02) / AE (<=0.1): "
                         + ", ".join(f"{m} {inr[m]:.4f}/{ae[m]:.4f}" for m in METHODS))


def _without_time(text):
    rows = [line.split(",") for line in text.splitlines()]
    i = rows[0].index("time_ms")
    return [r[:i] + r[i + 1:] for r in rows]


@pytest.mark.slow
def test_criterion_9_determinism(report):
    cfg = fig1_config(base_seed=2024)
    t0 = time.perf_counter()
    a = run_sweep(cfg).trial_csv()
    b = run_sweep(cfg).trial_csv()
    elapsed = time.perf_counter() - t0
    same = _without_time(a) == _without_time(b)
    assert report(9, same, f"Fig.-1 config ({len(a.splitlines()) - 1} rows) run twice: "
                           f"{'byte-identical' if same else 'DIFFERENT'} outside time_ms; {elapsed:.0f}s")
