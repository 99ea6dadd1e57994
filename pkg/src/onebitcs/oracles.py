"""Slow reference solvers used to check the analytic ones."""

from __future__ import annotations

import math

import numpy as np

from .dual import (
    DEFAULT_CONFIG,
    DualSolution,
    SolverConfig,
    Status,
    _descending_solution,
    _require_tau_zero,
    build_solution,
    dual_value,
    mcp_norm_root,
)
from .penalties import Penalty, PenaltyKind, _as_vector, evaluate, mcp_scalar


def dual_bisection(
    penalty: Penalty,
    v,
    cfg: SolverConfig = DEFAULT_CONFIG,
    xtol: float = 1e-10,
    gtol: float = 1e-12,
) -> DualSolution:
    """Maximize the concave dual by bisection on the sign of its subgradient.

    Works for any penalty with a proximal map and any ``tau``.  The final
    point is certified like the analytic solvers' output; at a dual kink
    both one-sided Lagrangian minimizers are offered for primal recovery.
    """
    v = _as_vector(v)
    _, x0, s0 = dual_value(penalty, v, 0.0, cfg)
    if s0 >= 0:
        return build_solution(penalty, v, x0, 0.0, cfg)

    hi = float(np.linalg.norm(v)) + 1.0
    while dual_value(penalty, v, hi, cfg)[2] < 0:
        hi *= 2.0
    lo = 0.0
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        _, xm, s = dual_value(penalty, v, mid, cfg)
        if abs(s) <= gtol:
            return build_solution(penalty, v, xm, mid, cfg)
        if s < 0:
            lo = mid
        else:
            hi = mid
    _, x_hi, _ = dual_value(penalty, v, hi, cfg)
    _, x_lo, _ = dual_value(penalty, v, lo, cfg)
    alternatives = [x_lo] if np.all(np.isfinite(x_lo)) else []
    return build_solution(penalty, v, x_hi, hi, cfg, alternatives=alternatives)


def l0_support_enumeration(v, lam: float):
    """Exact minimizer of ``lam ||x||_0 - <v, x>`` over the unit ball.

    For a fixed support size ``k`` the best point is the normalized
    restriction of ``v`` to its ``k`` largest magnitudes, so scanning
    ``k = 0..n`` is exhaustive.  Returns ``(x, F)``; the smallest optimal
    support wins ties.
    """
    v = _as_vector(v)
    order = np.argsort(-np.abs(v), kind="stable")
    r = np.sqrt(np.cumsum(v[order] ** 2))
    F_k = np.concatenate([[0.0], lam * np.arange(1, v.size + 1) - r])
    k = int(np.argmin(F_k))
    x = np.zeros_like(v)
    if k > 0:
        top = order[:k]
        x[top] = v[top] / r[k - 1]
    F = evaluate(Penalty.l0(lam), x) - float(np.dot(v, x))
    return x, F


def _penalty_rows(penalty: Penalty, X: np.ndarray) -> np.ndarray:
    kind = penalty.kind
    if kind is PenaltyKind.L1:
        return penalty.lam * np.abs(X).sum(axis=1)
    if kind is PenaltyKind.L0:
        return penalty.lam * np.count_nonzero(X, axis=1)
    if kind is PenaltyKind.MCP:
        return mcp_scalar(X, penalty.lam, penalty.b).sum(axis=1)
    return penalty.lam * np.sort(np.abs(X), axis=1) @ penalty.weights


def _ball_grid(n, resolution, radial_steps):
    radii = np.arange(radial_steps + 1) / radial_steps
    if n == 1:
        return np.linspace(-1.0, 1.0, 2 * resolution + 1)[:, None]
    if n == 2:
        theta = 2 * np.pi * np.arange(resolution) / resolution
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    else:
        theta = np.pi * np.arange(resolution // 2 + 1) / (resolution // 2)
        phi = 2 * np.pi * np.arange(resolution) / resolution
        T, P = np.meshgrid(theta, phi, indexing="ij")
        dirs = np.stack(
            [np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1
        ).reshape(-1, 3)
    pts = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, n)
    # exact zero so that l0 and friends see a true zero vector
    return np.vstack([np.zeros((1, n)), pts[np.any(pts != 0, axis=1)]])


def sphere_grid_search(penalty: Penalty, v, resolution: int = None, radial_steps: int = 100):
    """Brute-force minimizer of ``f(x) - <v, x>`` over a grid of the unit ball.

    For ``n = 1`` the grid is ``[-1, 1]`` with spacing ``1/resolution``;
    for ``n = 2`` and ``3`` it is ``resolution`` azimuthal angles (and
    ``resolution/2`` polar angles) times radii ``k/radial_steps``.
    Defaults: 10^4 angular steps for ``n <= 2``, 200 for ``n = 3``.
    """
    v = _as_vector(v)
    n = v.size
    if n > 3:
        raise ValueError(f"grid search only supports n <= 3, got n={n}")
    if resolution is None:
        resolution = 10_000 if n <= 2 else 200
    X = _ball_grid(n, int(resolution), int(radial_steps))
    if penalty.kind is PenaltyKind.SORTED_L1 and penalty.weights.size != n:
        raise ValueError("weight length does not match v")
    F = _penalty_rows(penalty, X) - X @ v
    return X[int(np.argmin(F))].copy()


def mcp_naive(v, lam: float, b: float, cfg: SolverConfig = DEFAULT_CONFIG) -> DualSolution:
    """MCP solver that re-derives everything at every breakpoint interval.

    For each interval of the upward walk the running sums are recomputed
    by full passes over ``v``, the norm equation is solved on its whole
    domain ``(1/b, inf)``, and the root is kept only if it falls inside
    the interval and passes the optimality certificate.  Output matches
    :func:`onebitcs.dual.solve_mcp`; the cost is one equation solve per
    interval instead of at most one in total.
    """
    _require_tau_zero(cfg)
    if not (lam > 0 and b > 0):
        raise ValueError("need lam > 0 and b > 0")
    v = _as_vector(v)
    penalty = Penalty.mcp(lam, b)
    if not np.any(v):
        return DualSolution(np.zeros_like(v), 0.0, Status.ZERO, 0.0)
    a_all = np.abs(v)
    order = np.argsort(a_all, kind="stable")
    rank = np.empty(v.size, dtype=int)
    rank[order] = np.arange(v.size)
    L = int(np.count_nonzero(a_all <= lam))
    inv_b = 1.0 / b
    n_up = v.size - L

    if b * b * float(np.sum(np.where(a_all > lam, a_all**2, 0.0))) > 1:
        best = None
        solves = 0
        for j in range(n_up + 1):
            middle = (rank >= L) & (rank < L + j)
            outer = rank >= L + j
            d1 = float(np.sum(np.where(middle, (a_all - lam) ** 2, 0.0)))
            d2 = float(np.sum(np.where(outer, a_all**2, 0.0)))
            lo = float(np.max(np.where(middle, a_all, -np.inf))) / (b * lam) if j else inv_b
            hi = float(np.min(np.where(outer, a_all, np.inf))) / (b * lam)
            if d1 == 0 and b * b * d2 <= 1:
                continue
            mu = mcp_norm_root(d1, d2, b, (inv_b, inv_b + 2 * math.sqrt(d1 + d2)),
                               tol=cfg.root_tol)
            solves += 1
            if best is not None or not lo <= mu <= hi:
                continue
            x = np.zeros_like(v)
            x[middle] = np.sign(v[middle]) * (a_all[middle] - lam) / (mu - inv_b)
            x[outer] = v[outer] / mu
            sol = build_solution(penalty, v, x, mu, cfg)
            if sol.status is Status.CERTIFIED:
                best = sol
        if best is None:
            raise RuntimeError("no breakpoint interval produced a certified MCP solution")
        best.root_solves = solves
        return best

    d2 = float(np.sum(np.where(a_all > lam, a_all**2, 0.0)))
    if b * b * d2 == 1:
        x = np.where(a_all > lam, v * b, 0.0)
        return build_solution(penalty, v, x, inv_b, cfg)
    # downward walk, recounting the active set from scratch at each breakpoint
    scale = b * lam**2
    lower_desc = order[:L][::-1]
    k, kind = L, "root"
    for step, i in enumerate(lower_desc):
        active = (a_all > lam) | (rank > rank[i])
        d_excl = float(np.sum(np.where(active, a_all**2, 0.0)))
        bp = a_all[i] ** 2 / scale
        if d_excl > bp**2:
            k, kind = step, "root"
            break
        d_incl = d_excl + a_all[i] ** 2
        if d_incl >= bp**2:
            k, kind = step, "exact" if d_incl == bp**2 else "tie"
            break
    return _descending_solution(penalty, v, lower_desc, order[L:], k, kind, scale, cfg)
