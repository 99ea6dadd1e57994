"""Unit-ball constrained linear-loss recovery through the one-variable dual.

All solvers minimize::

    F(x) = f(x) - <v, x> + (tau/2) ||x||^2   subject to ||x||^2 <= 1

and report the multiplier ``mu`` of the ball constraint together with a
global-optimality certificate: if ``x`` minimizes the Lagrangian
``L(., mu)``, is feasible, and ``mu (||x||^2 - 1) = 0``, the pair is a
saddle point and there is no duality gap.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .penalties import (
    Penalty,
    PenaltyKind,
    _as_vector,
    evaluate,
    proximal_point,
)


class Status(str, enum.Enum):
    CERTIFIED = "certified"
    GAP_NONZERO = "dual_optimal_gap_nonzero"
    ZERO = "zero_solution"
    INTERNAL_ERROR = "internal_error"


class BracketError(ValueError):
    """The norm equation was handed an interval that does not bracket its root."""


@dataclass(frozen=True)
class SolverConfig:
    tau: float = 0.0
    root_tol: float = 1e-12
    cert_tol: float = 1e-8

    def __post_init__(self):
        if not self.tau >= 0:
            raise ValueError(f"tau must be nonnegative, got {self.tau}")
        if not (self.root_tol > 0 and self.cert_tol > 0):
            raise ValueError("tolerances must be positive")


DEFAULT_CONFIG = SolverConfig()


@dataclass
class DualSolution:
    """Recovered direction ``x``, multiplier ``mu`` and certificate status.

    ``gap`` is the primal value ``F(x)`` minus the dual value ``G(mu)``.
    ``root_solves`` counts scalar norm-equation solves; ``tie`` records
    that the dual optimum sits on a proximal discontinuity.
    """

    x: np.ndarray
    mu: float
    status: Status
    gap: float
    root_solves: int = 0
    tie: bool = False

    @property
    def certified(self) -> bool:
        return self.status in (Status.CERTIFIED, Status.ZERO)


def objective(penalty: Penalty, v, x, tau: float = 0.0) -> float:
    """Primal objective ``f(x) - <v, x> + (tau/2) ||x||^2``."""
    x = _as_vector(x)
    return evaluate(penalty, x) - float(np.dot(v, x)) + 0.5 * tau * float(np.dot(x, x))


def lagrangian(penalty: Penalty, v, x, mu: float, tau: float = 0.0) -> float:
    x = _as_vector(x)
    return objective(penalty, v, x, tau) + 0.5 * mu * (float(np.dot(x, x)) - 1.0)


def dual_value(penalty: Penalty, v, mu: float, cfg: SolverConfig = DEFAULT_CONFIG):
    """Dual function ``G(mu) = min_x L(x, mu)``.

    Returns ``(G, x_mu, subgrad)`` where ``x_mu`` is a Lagrangian minimizer
    and ``subgrad = (1 - ||x_mu||^2) / 2`` is a subgradient of ``-G`` at
    ``mu``.  When ``tau + mu == 0`` and the Lagrangian is unbounded below,
    ``G = -inf``, ``x_mu`` is all-NaN and ``subgrad = -inf``.
    """
    v = _as_vector(v)
    if mu < 0:
        raise ValueError(f"mu must be nonnegative, got {mu}")
    rho = cfg.tau + mu
    if rho == 0:
        # bounded below only when the best linear decrease is nonpositive
        if not np.any(v):
            bounded = True
        elif penalty.homogeneous:
            bounded = not np.any(proximal_point(penalty, v, 1.0))
        else:
            bounded = False
        if bounded:
            return 0.0, np.zeros_like(v), 0.5
        return -math.inf, np.full_like(v, np.nan), -math.inf
    x = proximal_point(penalty, v, rho)
    G = lagrangian(penalty, v, x, mu, cfg.tau)
    return G, x, 0.5 * (1.0 - float(np.dot(x, x)))


def _certificate(penalty, v, x, mu, cfg):
    """Optimality-certificate check of ``(x, mu)``; returns ``(status, gap)``."""
    tol = cfg.cert_tol
    nx2 = float(np.dot(x, x))
    G, _, _ = dual_value(penalty, v, mu, cfg)
    F = objective(penalty, v, x, cfg.tau)
    gap = F - G
    if not nx2 <= 1.0 + tol:
        return Status.INTERNAL_ERROR, gap
    if not F + 0.5 * mu * (nx2 - 1.0) <= G + tol:
        return Status.INTERNAL_ERROR, gap
    if abs(mu * (nx2 - 1.0)) <= tol:
        return Status.CERTIFIED, gap
    return Status.GAP_NONZERO, gap


def certify(penalty: Penalty, v, sol: DualSolution, cfg: SolverConfig = DEFAULT_CONFIG) -> Status:
    """Check feasibility, Lagrangian optimality and complementary slackness.

    ``CERTIFIED`` means ``sol.x`` is globally optimal.  ``GAP_NONZERO``
    means ``sol.x`` minimizes ``L(., mu)`` but complementary slackness
    fails.  ``INTERNAL_ERROR`` means ``sol.x`` is infeasible or not a
    Lagrangian minimizer.
    """
    x = _as_vector(sol.x)
    if not np.all(np.isfinite(x)) or not sol.mu >= 0:
        raise ValueError("solution must be finite with mu >= 0")
    return _certificate(penalty, _as_vector(v), x, sol.mu, cfg)[0]


def _unit(x):
    nrm = float(np.linalg.norm(x))
    return x / nrm if nrm > 0 else None


def build_solution(
    penalty: Penalty,
    v,
    x,
    mu: float,
    cfg: SolverConfig = DEFAULT_CONFIG,
    alternatives=(),
    root_solves: int = 0,
    tie: bool = False,
) -> DualSolution:
    """Certify a dual candidate and package it.

    ``x`` must be a feasible Lagrangian minimizer at ``mu``.  If the
    certificate fails on complementary slackness, the returned point is
    the best feasible one among ``x`` and the normalized versions of ``x``
    and ``alternatives`` (the other tied Lagrangian minimizers); the
    status stays ``GAP_NONZERO`` and ``gap`` is recomputed for it.
    """
    v = _as_vector(v)
    x = np.asarray(x, dtype=float)
    status, gap = _certificate(penalty, v, x, mu, cfg)
    if status is Status.GAP_NONZERO:
        candidates = [x] + [u for u in map(_unit, [x, *alternatives]) if u is not None]
        scores = [objective(penalty, v, c, cfg.tau) for c in candidates]
        best = int(np.argmin(scores))
        if scores[best] < scores[0]:
            x = candidates[best]
            gap = gap + scores[best] - scores[0]
    elif status is Status.CERTIFIED and not np.any(x):
        status = Status.ZERO
    return DualSolution(x=x, mu=float(mu), status=status, gap=float(gap),
                        root_solves=root_solves, tie=tie)


def _zero_solution(v):
    return DualSolution(x=np.zeros_like(v), mu=0.0, status=Status.ZERO, gap=0.0)


def solve_homogeneous(penalty: Penalty, v, cfg: SolverConfig = DEFAULT_CONFIG) -> DualSolution:
    """Proximal step followed by normalization (l1 and sorted l1 only)."""
    if not penalty.homogeneous:
        raise ValueError(f"{penalty!r} is not positively homogeneous")
    v = _as_vector(v)
    t = proximal_point(penalty, v, 1.0)
    nt = float(np.linalg.norm(t))
    if nt > cfg.tau:
        x, mu = t / nt, nt - cfg.tau
    else:
        x = t / cfg.tau if cfg.tau > 0 else np.zeros_like(t)
        mu = 0.0
    return build_solution(penalty, v, x, mu, cfg)


def solve_passive(v, lam: float, cfg: SolverConfig = DEFAULT_CONFIG) -> DualSolution:
    """The l1 baseline: soft threshold at ``lam`` then normalize."""
    return solve_homogeneous(Penalty.l1(lam), v, cfg)


def solve_sorted_l1(v, lam: float, weights, cfg: SolverConfig = DEFAULT_CONFIG) -> DualSolution:
    """Rank-wise shrinkage with nonincreasing weights, then normalize."""
    v = _as_vector(v)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != v.shape:
        raise ValueError(f"weights have shape {weights.shape}, v has shape {v.shape}")
    return solve_homogeneous(Penalty.sorted_l1(lam, weights), v, cfg)


def mcp_norm_root(d1: float, d2: float, b: float, bracket, tol: float = 1e-12,
                  maxiter: int = 200) -> float:
    """Root of ``d1/(mu - 1/b)^2 + d2/mu^2 = 1`` inside ``bracket = (lo, hi]``.

    The left side is strictly decreasing and convex on ``(1/b, inf)``, so
    Newton steps from the left never overshoot; a bisection step is taken
    whenever a Newton iterate leaves the current bracket.
    """
    lo, hi = map(float, bracket)
    inv_b = 1.0 / b
    if d1 < 0 or d2 < 0 or d1 + d2 <= 0:
        raise ValueError("need d1, d2 >= 0 and d1 + d2 > 0")
    if d1 > 0 and lo < inv_b:
        raise BracketError(f"lower end {lo} is below the pole at 1/b = {inv_b}")
    if not hi > lo:
        raise BracketError(f"empty bracket ({lo}, {hi}]")

    def resid(mu):
        s1 = d1 / (mu - inv_b) ** 2 if d1 > 0 else 0.0
        s2 = d2 / mu**2 if d2 > 0 else 0.0
        return s1 + s2 - 1.0

    def slope(mu):
        s1 = -2 * d1 / (mu - inv_b) ** 3 if d1 > 0 else 0.0
        s2 = -2 * d2 / mu**3 if d2 > 0 else 0.0
        return s1 + s2

    f_hi = resid(hi)
    f_lo = math.inf if (d1 > 0 and lo == inv_b) or lo == 0 else resid(lo)
    if not (f_lo > 0 and f_hi <= 0):
        raise BracketError(
            f"({lo}, {hi}] does not bracket the root: f(lo)={f_lo}, f(hi)={f_hi}"
        )
    if f_hi == 0:
        return hi

    mu = hi
    for _ in range(maxiter):
        f = resid(mu)
        if abs(f) <= tol:
            return mu
        if f > 0:
            lo = mu
        else:
            hi = mu
        step = mu - f / slope(mu)
        if not lo < step < hi:
            step = 0.5 * (lo + hi)
        if abs(step - mu) <= 1e-15 * max(1.0, abs(mu)):
            return step
        mu = step
    return mu


def _descending_walk(a_desc, scale, d_start):
    """Walk the hard-threshold breakpoints ``a_k^2/scale`` from the top down.

    ``a_desc`` are candidate magnitudes in descending order, each switched
    on (as ``v/mu``) once ``mu`` drops below its breakpoint; ``d_start`` is
    the squared norm already active.  Returns ``(k, kind)``: ``kind`` is
    ``"root"`` when ``mu = sqrt(d)`` with the first ``k`` candidates
    active, ``"tie"`` when the optimum is the breakpoint of candidate ``k``
    with both including and excluding it optimal, and ``"exact"`` when
    including candidate ``k`` lands on the unit sphere exactly.
    """
    bp = a_desc**2 / scale
    d_incl = d_start + np.cumsum(a_desc**2)
    d_excl = d_incl - a_desc**2
    hits = np.flatnonzero(d_incl >= bp**2)
    if hits.size == 0:
        return a_desc.size, "root"
    k = int(hits[0])
    if d_excl[k] > bp[k] ** 2:
        return k, "root"
    if d_incl[k] == bp[k] ** 2:
        return k, "exact"
    return k, "tie"


def _descending_solution(penalty, v, order_desc, active_base, k, kind, scale, cfg):
    """Assemble the result of ``_descending_walk``; ``active_base`` are always on."""
    a = np.abs(v)
    x = np.zeros_like(v)
    on = np.concatenate([active_base, order_desc[:k]]).astype(int)
    if kind == "root":
        d = float(np.sum(a[on] ** 2))
        mu = math.sqrt(d)
        x[on] = v[on] / mu
        return build_solution(penalty, v, x, mu, cfg)
    j = order_desc[k]
    mu = a[j] ** 2 / scale
    if mu == 0:
        # breakpoint underflowed; every active magnitude is negligible as well
        return _zero_solution(v)
    x[on] = v[on] / mu
    x_incl = x.copy()
    x_incl[j] = v[j] / mu
    if kind == "exact":
        return build_solution(penalty, v, x_incl, mu, cfg, tie=True)
    return build_solution(penalty, v, x, mu, cfg, alternatives=[x_incl], tie=True)


# magnitudes whose squares underflow; they move F by less than 1e-153
_TINY = math.sqrt(np.finfo(float).tiny)


def _flush_tiny(v):
    return np.where(np.abs(v) < _TINY, 0.0, v)


def _require_tau_zero(cfg):
    if cfg.tau != 0:
        raise ValueError("the breakpoint walks assume tau = 0; use dual_bisection instead")


def solve_mcp(v, lam: float, b: float, cfg: SolverConfig = DEFAULT_CONFIG) -> DualSolution:
    """Minimax concave penalty by a single pass over the sorted magnitudes.

    For ``mu > 1/b`` the proximal map is continuous: components move from
    the ``v/mu`` regime to the shrunk regime as ``mu`` passes
    ``|v|/(b lam)``.  The walk finds the interval where the norm of the
    Lagrangian minimizer crosses one and solves the norm equation there
    once.  Otherwise the optimum has ``mu <= 1/b`` and only hard
    thresholding at ``|v|^2 = b lam^2 mu`` is involved.
    """
    _require_tau_zero(cfg)
    if not (lam > 0 and b > 0):
        raise ValueError("need lam > 0 and b > 0")
    v = _flush_tiny(_as_vector(v))
    penalty = Penalty.mcp(lam, b)
    if not np.any(v):
        return _zero_solution(v)
    a_all = np.abs(v)
    # only the components above lam enter the upward walk; sort those alone
    big = np.flatnonzero(a_all > lam)
    idx = big[np.argsort(a_all[big], kind="stable")]
    inv_b = 1.0 / b
    upper = a_all[idx]
    d2 = float(upper @ upper)

    if b * b * d2 > 1:
        bp = upper / (b * lam)
        sq = upper**2
        d1_before = np.concatenate([[0.0], np.cumsum((upper - lam) ** 2)[:-1]])
        d2_from = np.cumsum(sq[::-1])[::-1]
        norm2 = d1_before / (bp - inv_b) ** 2 + d2_from / bp**2
        hits = np.flatnonzero(norm2 <= 1)
        if hits.size:
            j = int(hits[0])
            lo = bp[j - 1] if j > 0 else inv_b
            hi = bp[j]
            d1, d2 = float(d1_before[j]), float(d2_from[j])
        else:
            # every active component ends up in the shrunk regime
            j = upper.size
            lo = bp[-1]
            d1 = float(d1_before[-1] + (upper[-1] - lam) ** 2)
            d2 = 0.0
            hi = inv_b + 2 * math.sqrt(d1)
        mu = mcp_norm_root(d1, d2, b, (lo, hi), tol=cfg.root_tol)
        x = np.zeros_like(v)
        mid, outer = idx[:j], idx[j:]
        x[mid] = np.sign(v[mid]) * (a_all[mid] - lam) / (mu - inv_b)
        x[outer] = v[outer] / mu
        sol = build_solution(penalty, v, x, mu, cfg)
        sol.root_solves = 1
        return sol

    if b * b * d2 == 1:
        x = np.zeros_like(v)
        x[idx] = v[idx] * b
        return build_solution(penalty, v, x, inv_b, cfg)

    small = np.flatnonzero(a_all <= lam)
    lower_desc = small[np.argsort(a_all[small], kind="stable")][::-1]
    k, kind = _descending_walk(a_all[lower_desc], b * lam**2, d2)
    return _descending_solution(penalty, v, lower_desc, idx, k, kind, b * lam**2, cfg)


def solve_l0(v, lam: float, cfg: SolverConfig = DEFAULT_CONFIG) -> DualSolution:
    """l0 penalty: walk the hard-threshold breakpoints ``v^2/(2 lam)`` downward."""
    _require_tau_zero(cfg)
    if not lam > 0:
        raise ValueError("need lam > 0")
    v = _flush_tiny(_as_vector(v))
    penalty = Penalty.l0(lam)
    if not np.any(v):
        return _zero_solution(v)
    order_desc = np.argsort(-np.abs(v), kind="stable")
    k, kind = _descending_walk(np.abs(v)[order_desc], 2 * lam, 0.0)
    return _descending_solution(penalty, v, order_desc, np.empty(0, int), k, kind, 2 * lam, cfg)


def solve(penalty: Penalty, v, cfg: SolverConfig = DEFAULT_CONFIG) -> DualSolution:
    """Dispatch to the analytic solver for ``penalty.kind``."""
    kind = penalty.kind
    if kind is PenaltyKind.L1:
        return solve_passive(v, penalty.lam, cfg)
    if kind is PenaltyKind.SORTED_L1:
        return solve_sorted_l1(v, penalty.lam, penalty.weights, cfg)
    if kind is PenaltyKind.MCP:
        return solve_mcp(v, penalty.lam, penalty.b, cfg)
    return solve_l0(v, penalty.lam, cfg)
