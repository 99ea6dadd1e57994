"""Parameter grids and the two selection rules: oracle ("ideal") and cross-validation."""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .dual import DEFAULT_CONFIG, DualSolution, SolverConfig, solve
from .penalties import Penalty, PenaltyKind, sorted_l1_weights
from .sensing import MeasurementEnsemble, correlation, make_rng, sign_pm

METHODS = ("passive", "mcp", "l0", "sorted_l1")

DEFAULT_LAMBDAS = tuple(np.logspace(-3, 0, 15))
DEFAULT_BS = (1.5, 3.0, 6.0)
DEFAULT_N1 = 10
N1_SWEEP = tuple(range(2, 17, 2))
# the bottom-anchored rule leaves the estimator essentially unregularized
SORTED_L1_ANCHOR = "top"

_TIE_TOL = 1e-12


def method_grid(
    method: str,
    n: int,
    lambdas: Optional[Sequence[float]] = None,
    bs: Optional[Sequence[float]] = None,
    n1s: Optional[Sequence[int]] = None,
) -> List[Penalty]:
    """Penalty grid for one method (``passive``, ``mcp``, ``l0`` or ``sorted_l1``)."""
    lambdas = DEFAULT_LAMBDAS if lambdas is None else lambdas
    if method == "passive":
        return [Penalty.l1(lam) for lam in lambdas]
    if method == "l0":
        return [Penalty.l0(lam) for lam in lambdas]
    if method == "mcp":
        bs = DEFAULT_BS if bs is None else bs
        return [Penalty.mcp(lam, b) for b in bs for lam in lambdas]
    if method == "sorted_l1":
        n1s = (DEFAULT_N1,) if n1s is None else n1s
        return [
            Penalty.sorted_l1(lam, sorted_l1_weights(n, n1, anchor=SORTED_L1_ANCHOR))
            for n1 in n1s
            for lam in lambdas
        ]
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def method_of(penalty: Penalty) -> str:
    return {
        PenaltyKind.L1: "passive",
        PenaltyKind.MCP: "mcp",
        PenaltyKind.L0: "l0",
        PenaltyKind.SORTED_L1: "sorted_l1",
    }[penalty.kind]


def _pick(scores: Sequence[float], grid: Sequence[Penalty], maximize: bool) -> int:
    s = np.asarray(scores, dtype=float)
    if maximize:
        s = -s
    best = s.min()
    tied = np.flatnonzero(s <= best + _TIE_TOL)
    # sparser model (larger lambda) wins ties; grid order breaks the rest
    return int(max(tied, key=lambda i: (grid[i].lam, -i)))


def ideal_select(
    ens: MeasurementEnsemble,
    x_true,
    grid: Sequence[Penalty],
    cfg: SolverConfig = DEFAULT_CONFIG,
) -> Tuple[Penalty, DualSolution]:
    """Grid point whose solution is closest to ``x_true`` in l2 distance."""
    if not grid:
        raise ValueError("empty parameter grid")
    v = correlation(ens)
    sols = [solve(p, v, cfg) for p in grid]
    dist = [float(np.linalg.norm(s.x - x_true)) for s in sols]
    i = _pick(dist, grid, maximize=False)
    return grid[i], sols[i]


def fold_indices(m: int, folds: int, seed=None) -> List[np.ndarray]:
    """Random partition of ``range(m)`` into ``folds`` parts whose sizes differ by at most one."""
    if not 2 <= folds <= m:
        raise ValueError(f"need 2 <= folds <= m, got folds={folds}, m={m}")
    perm = make_rng(seed).permutation(m)
    return [np.sort(f) for f in np.array_split(perm, folds)]


def consistency(U, y, x) -> float:
    """Fraction of measurements whose sign ``x`` reproduces."""
    return float(np.mean(sign_pm(U @ x) == y))


def cross_validate(
    ens: MeasurementEnsemble,
    grid: Sequence[Penalty],
    folds: int = 10,
    seed=None,
    cfg: SolverConfig = DEFAULT_CONFIG,
    return_scores: bool = False,
):
    """Select the grid point with the best held-out sign consistency, then refit.

    Each fold is fitted from the correlation vector of the remaining
    measurements only.  Returns ``(penalty, solution)`` with the solution
    refitted on all measurements, plus the mean fold scores when
    ``return_scores`` is set.
    """
    if not grid:
        raise ValueError("empty parameter grid")
    parts = fold_indices(ens.m, folds, seed)
    scores = np.zeros(len(grid))
    total = ens.U.T @ ens.y
    for test in parts:
        U_te, y_te = ens.U[test], ens.y[test]
        # training correlation = full sum minus the held-out part
        v_tr = (total - U_te.T @ y_te) / (ens.m - test.size)
        X = np.stack([solve(p, v_tr, cfg).x for p in grid], axis=1)
        scores += np.mean(sign_pm(U_te @ X) == y_te[:, None], axis=0)
    scores /= folds
    i = _pick(scores, grid, maximize=True)
    sol = solve(grid[i], correlation(ens), cfg)
    if return_scores:
        return grid[i], sol, scores
    return grid[i], sol


def default_grids(n: int, n1s: Optional[Sequence[int]] = None) -> Dict[str, List[Penalty]]:
    return {m: method_grid(m, n, n1s=n1s if m == "sorted_l1" else None) for m in METHODS}
