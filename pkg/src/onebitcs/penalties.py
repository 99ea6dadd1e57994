"""Sparsity penalties, their values and proximal points.

Every proximal point here is taken in the scaled form used by the dual
solvers::

    prox(v, rho) = argmin_x  f(x) + (rho / 2) * ||x - v / rho||^2

so ``rho`` plays the role of ``tau + mu``.  Rank-indexed quantities
(sorted-l1 weights) follow ascending-magnitude order: weight 1 multiplies
the smallest magnitude.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

# relative tolerance used to detect ties at prox discontinuities
TIE_RTOL = 1e-12


class PenaltyKind(str, enum.Enum):
    L1 = "l1"
    MCP = "mcp"
    L0 = "l0"
    SORTED_L1 = "sorted_l1"


@dataclass(frozen=True)
class Penalty:
    """A sparsity penalty and its parameters.

    Use the ``l1``, ``mcp``, ``l0`` and ``sorted_l1`` constructors rather
    than building instances by hand; they validate the parameters.
    """

    kind: PenaltyKind
    lam: float
    b: Optional[float] = None
    weights: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ValueError(f"lambda must be finite and nonnegative, got {self.lam}")
        if self.kind is PenaltyKind.MCP:
            if self.b is None or not self.b > 0:
                raise ValueError(f"MCP needs b > 0, got {self.b}")
        elif self.b is not None:
            raise ValueError("b is only meaningful for MCP")
        if self.kind is PenaltyKind.SORTED_L1:
            if self.weights is None:
                raise ValueError("sorted l1 needs a weight vector")
            w = np.asarray(self.weights, dtype=float)
            if w.ndim != 1 or w.size == 0:
                raise ValueError("weights must be a nonempty 1-D vector")
            if np.any(w < 0) or not np.all(np.isfinite(w)):
                raise ValueError("weights must be finite and nonnegative")
            if np.any(np.diff(w) > 0):
                raise ValueError(
                    "weights must be nonincreasing in ascending-magnitude rank"
                )
            w = w.copy()
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)
        elif self.weights is not None:
            raise ValueError("weights are only meaningful for sorted l1")

    @classmethod
    def l1(cls, lam: float) -> "Penalty":
        return cls(PenaltyKind.L1, float(lam))

    @classmethod
    def mcp(cls, lam: float, b: float) -> "Penalty":
        return cls(PenaltyKind.MCP, float(lam), b=float(b))

    @classmethod
    def l0(cls, lam: float) -> "Penalty":
        return cls(PenaltyKind.L0, float(lam))

    @classmethod
    def sorted_l1(cls, lam: float, weights) -> "Penalty":
        return cls(PenaltyKind.SORTED_L1, float(lam), weights=np.asarray(weights, float))

    @property
    def homogeneous(self) -> bool:
        """True for positively homogeneous penalties (l1 and sorted l1)."""
        return self.kind in (PenaltyKind.L1, PenaltyKind.SORTED_L1)

    def __call__(self, x) -> float:
        return evaluate(self, x)

    def __eq__(self, other):
        if not isinstance(other, Penalty):
            return NotImplemented
        same = (self.kind, self.lam, self.b) == (other.kind, other.lam, other.b)
        if not same or self.weights is None or other.weights is None:
            return same and self.weights is None and other.weights is None
        return np.array_equal(self.weights, other.weights)

    def __hash__(self):
        w = None if self.weights is None else self.weights.tobytes()
        return hash((self.kind, self.lam, self.b, w))

    def __repr__(self):
        if self.kind is PenaltyKind.MCP:
            return f"Penalty.mcp(lam={self.lam:g}, b={self.b:g})"
        if self.kind is PenaltyKind.SORTED_L1:
            return f"Penalty.sorted_l1(lam={self.lam:g}, n={self.weights.size})"
        return f"Penalty.{self.kind.value}(lam={self.lam:g})"


def _as_vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {x.shape}")
    return x


def _check_weights(penalty: Penalty, n: int) -> np.ndarray:
    if penalty.weights.size != n:
        raise ValueError(
            f"weight vector has length {penalty.weights.size}, input has length {n}"
        )
    return penalty.weights


def mcp_scalar(x, lam: float, b: float):
    """Elementwise minimax concave penalty."""
    # clipping at b*lam gives the constant branch b*lam^2/2 without overflow
    c = np.minimum(np.abs(x), b * lam)
    return lam * c - c**2 / (2 * b)


def evaluate(penalty: Penalty, x) -> float:
    """Value f(x) of the penalty at ``x``."""
    x = _as_vector(x)
    kind = penalty.kind
    if kind is PenaltyKind.L1:
        return penalty.lam * float(np.sum(np.abs(x)))
    if kind is PenaltyKind.L0:
        return penalty.lam * float(np.count_nonzero(x))
    if kind is PenaltyKind.MCP:
        return float(np.sum(mcp_scalar(x, penalty.lam, penalty.b)))
    w = _check_weights(penalty, x.size)
    return penalty.lam * float(np.dot(w, np.sort(np.abs(x))))


def sorted_shrink(v, lam: float, weights) -> np.ndarray:
    """Rank-wise soft threshold: ``max(|v|_[i] - w_i lam, 0)`` scattered back.

    ``weights[i]`` applies to the i-th smallest magnitude of ``v``.
    """
    v = _as_vector(v)
    order = np.argsort(np.abs(v), kind="stable")
    t = np.empty_like(v)
    t[order] = np.maximum(np.abs(v[order]) - lam * np.asarray(weights), 0.0)
    return t * np.sign(v)


def proximal_point(penalty: Penalty, v, rho: float, return_ties: bool = False):
    """Minimizer of ``f(x) + (rho/2) ||x - v/rho||^2``.

    At the discontinuities of the MCP (``rho <= 1/b``) and l0 proximal
    maps both ``0`` and ``v/rho`` are minimizers; the nonzero branch is
    returned.  With ``return_ties=True`` a boolean mask of the components
    where that happened is returned as well.
    """
    v = _as_vector(v)
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    lam = penalty.lam
    kind = penalty.kind
    a = np.abs(v)
    ties = np.zeros(v.shape, dtype=bool)

    if kind is PenaltyKind.L1:
        x = np.sign(v) * np.maximum(a - lam, 0.0) / rho
    elif kind is PenaltyKind.SORTED_L1:
        x = sorted_shrink(v, lam, _check_weights(penalty, v.size)) / rho
    elif kind is PenaltyKind.L0:
        thresh = 2 * lam * rho
        sq = a**2
        keep = sq >= thresh
        ties = keep & (sq > 0) & np.isclose(sq, thresh, rtol=TIE_RTOL, atol=0.0)
        x = np.where(keep, v / rho, 0.0)
    else:
        b = penalty.b
        if rho * b <= 1:
            thresh = b * lam**2 * rho
            sq = a**2
            keep = sq >= thresh
            ties = keep & (sq > 0) & np.isclose(sq, thresh, rtol=TIE_RTOL, atol=0.0)
            x = np.where(keep, v / rho, 0.0)
        else:
            x = np.where(
                a >= b * lam * rho,
                v / rho,
                np.sign(v) * np.maximum(a - lam, 0.0) / (rho - 1 / b),
            )
    if return_ties:
        return x, ties
    return x


def sorted_l1_weights(n: int, n1: int, anchor: str = "bottom") -> np.ndarray:
    """Nonincreasing sorted-l1 weights, indexed by ascending-magnitude rank.

    ``anchor="bottom"``: weight 1 for ranks ``i < n1`` and ``exp(-5 i/n1)``
    from rank ``n1`` on.  Only the ``n1 - 1`` smallest magnitudes are
    penalized in earnest, so for ``n >> n1`` the penalty is nearly inert.

    ``anchor="top"``: the same exponential profile placed on the ``n1``
    largest magnitudes; the remaining ``n - n1`` get weight 1 and the
    ``r``-th rank above them gets ``exp(-5 r/n1)``.  This is the
    sparsity-enhancing form used by the experiment harness.

    >>> sorted_l1_weights(2, 2).round(6)
    array([1.      , 0.006738])
    >>> sorted_l1_weights(4, 2, anchor="top").round(6)
    array([1.      , 1.      , 0.082085, 0.006738])
    """
    n, n1 = int(n), int(n1)
    if not 1 <= n1 <= n:
        raise ValueError(f"need 1 <= n1 <= n, got n1={n1}, n={n}")
    i = np.arange(1, n + 1)
    if anchor == "bottom":
        return np.where(i < n1, 1.0, np.exp(-5.0 * i / n1))
    if anchor == "top":
        r = i - (n - n1)
        return np.where(r <= 0, 1.0, np.exp(-5.0 * np.maximum(r, 0) / n1))
    raise ValueError(f"anchor must be 'bottom' or 'top', got {anchor!r}")
