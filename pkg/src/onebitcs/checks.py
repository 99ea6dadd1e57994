"""Randomized property suites comparing the fast solvers with the reference oracles.

Each suite returns a :class:`CheckResult`; ``run_all`` runs them in order.
Instances: ``v`` has i.i.d. standard normal entries times a random scale
``10**U(-1.5, 0.5)``, ``lam`` is log-uniform in ``[1e-3, 1]`` and ``b`` is
drawn from ``{1.5, 3, 6}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .dual import Status, dual_value, objective, solve, solve_l0, solve_mcp
from .oracles import dual_bisection, l0_support_enumeration, mcp_naive, sphere_grid_search
from .penalties import Penalty, evaluate, proximal_point
from .sensing import make_rng

B_CHOICES = (1.5, 3.0, 6.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    certification: bool = False  # failure means a guaranteed certificate was missed

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


@dataclass(frozen=True)
class Instance:
    v: np.ndarray
    lam: float
    b: float
    weights: np.ndarray

    def penalties(self):
        return {
            "l1": Penalty.l1(self.lam),
            "mcp": Penalty.mcp(self.lam, self.b),
            "l0": Penalty.l0(self.lam),
            "sorted_l1": Penalty.sorted_l1(self.lam, self.weights),
        }


def random_instance(rng, n: int = None, n_max: int = 8) -> Instance:
    n = int(rng.integers(1, n_max + 1)) if n is None else n
    v = rng.standard_normal(n) * 10 ** rng.uniform(-1.5, 0.5)
    lam = float(10 ** rng.uniform(-3, 0))
    b = float(rng.choice(B_CHOICES))
    weights = np.sort(rng.uniform(0, 1, n))[::-1]
    return Instance(v, lam, b, weights)


def oracle_equivalence(instances: int = 1000, seed: int = 0) -> CheckResult:
    """Fast MCP/l0 solvers against bisection on the dual and support enumeration."""
    rng = make_rng(seed)
    worst_bis = worst_enum = 0.0
    for _ in range(instances):
        ins = random_instance(rng)
        for pen in (Penalty.mcp(ins.lam, ins.b), Penalty.l0(ins.lam)):
            fast = solve(pen, ins.v)
            ref = dual_bisection(pen, ins.v)
            worst_bis = max(worst_bis, abs(objective(pen, ins.v, fast.x) - objective(pen, ins.v, ref.x)))
        _, f_enum = l0_support_enumeration(ins.v, ins.lam)
        f_fast = objective(Penalty.l0(ins.lam), ins.v, solve_l0(ins.v, ins.lam).x)
        worst_enum = max(worst_enum, abs(f_fast - f_enum))
    ok = worst_bis <= 1e-8 and worst_enum <= 1e-10
    return CheckResult("oracle-equivalence", ok,
                       f"max |dF| vs bisection {worst_bis:.2e}, l0 vs enumeration {worst_enum:.2e}")


def grid_dominance(instances: int = 100, seed: int = 1) -> CheckResult:
    """At n = 2 no solver may lose to a dense polar grid by more than 1e-3."""
    rng = make_rng(seed)
    worst = -np.inf
    for _ in range(instances):
        ins = random_instance(rng, n=2)
        for pen in ins.penalties().values():
            f_grid = objective(pen, ins.v, sphere_grid_search(pen, ins.v))
            worst = max(worst, objective(pen, ins.v, solve(pen, ins.v).x) - f_grid)
    return CheckResult("grid-dominance", worst <= 1e-3, f"max F(solver) - F(grid) {worst:.2e}")


def certification(instances: int = 1000, seed: int = 2) -> CheckResult:
    """Homogeneous penalties: certified, zero gap, complementary slackness, homogeneity identity."""
    rng = make_rng(seed)
    bad = 0
    worst_gap = worst_cs = worst_id = 0.0
    for _ in range(instances):
        ins = random_instance(rng)
        for name in ("l1", "sorted_l1"):
            pen = ins.penalties()[name]
            sol = solve(pen, ins.v)
            cs = abs(sol.mu * (float(sol.x @ sol.x) - 1))
            if not sol.certified:
                bad += 1
            worst_gap, worst_cs = max(worst_gap, abs(sol.gap)), max(worst_cs, cs)
            t = proximal_point(pen, ins.v, 1.0)
            worst_id = max(worst_id, abs(evaluate(pen, t) - t @ ins.v + t @ t))
    ok = bad == 0 and worst_gap <= 1e-8 and worst_cs <= 1e-8 and worst_id <= 1e-10
    return CheckResult("certification", ok,
                       f"uncertified {bad}, max |gap| {worst_gap:.2e}, max |mu(|x|^2-1)| {worst_cs:.2e}, "
                       f"max identity error {worst_id:.2e}", certification=True)


def dual_monotonicity(instances: int = 200, seed: int = 3, points: int = 100) -> CheckResult:
    """``(1 - |x*(mu)|^2)/2`` is nondecreasing on an increasing mu grid."""
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(instances):
        ins = random_instance(rng)
        top = float(np.linalg.norm(ins.v)) + ins.lam + 1.0
        mus = np.linspace(top / points, top, points)
        for pen in ins.penalties().values():
            s = np.array([dual_value(pen, ins.v, mu)[2] for mu in mus])
            worst = max(worst, float(np.max(s[:-1] - s[1:], initial=0.0)))
    return CheckResult("dual-monotonicity", worst <= 1e-10, f"max decrease {worst:.2e}")


def walk_budget(instances: int = 1000, seed: int = 0) -> CheckResult:
    """The MCP walk solves the norm equation at most once; the naive variant agrees on mu."""
    rng = make_rng(seed)
    most = 0
    worst_mu = 0.0
    for _ in range(instances):
        ins = random_instance(rng)
        fast = solve_mcp(ins.v, ins.lam, ins.b)
        most = max(most, fast.root_solves)
        worst_mu = max(worst_mu, abs(fast.mu - mcp_naive(ins.v, ins.lam, ins.b).mu))
    return CheckResult("walk-budget", most <= 1 and worst_mu <= 1e-8,
                       f"max root solves {most}, max |mu - mu_naive| {worst_mu:.2e}")


def remark_fixture() -> CheckResult:
    """Scalar l0 instance whose dual optimum leaves a gap of 1/16."""
    sol = solve_l0(np.array([0.5]), 1.0)
    ref = dual_bisection(Penalty.l0(1.0), np.array([0.5]))
    ok = (abs(sol.mu - 0.125) <= 1e-12 and not np.any(sol.x)
          and sol.status is Status.GAP_NONZERO and abs(sol.gap - 1 / 16) <= 1e-10
          and abs(ref.mu - 0.125) <= 1e-9)
    return CheckResult("remark-fixture", ok,
                       f"mu {sol.mu:.12g}, gap {sol.gap:.12g}, status {sol.status.value}, "
                       f"bisection mu {ref.mu:.12g}")


SUITES: List[Callable[..., CheckResult]] = [
    remark_fixture,
    oracle_equivalence,
    grid_dominance,
    certification,
    dual_monotonicity,
    walk_budget,
]


def run_all(instances: int = None, seed: int = 0) -> List[CheckResult]:
    """Run every suite; ``instances`` scales the randomized ones down for quick runs."""
    out = []
    for i, suite in enumerate(SUITES):
        if suite is remark_fixture:
            out.append(suite())
        elif instances is None:
            out.append(suite(seed=seed + i))
        else:
            out.append(suite(instances=instances, seed=seed + i))
    return out
