"""Synthetic sparse signals and the noisy one-bit measurement channel."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def make_rng(seed=None) -> np.random.Generator:
    """Counter-based (Philox) generator from an int, SeedSequence or Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def trial_seed(base_seed: int, *path: int) -> np.random.SeedSequence:
    """Independent stream for one trial, keyed by e.g. ``(sweep_index, trial_index)``.

    Streams depend only on the key, never on the order trials run in.
    """
    return np.random.SeedSequence(int(base_seed), spawn_key=tuple(int(p) for p in path))


def sign_pm(z):
    """Sign with ``sgn(0) = -1``."""
    return np.where(np.asarray(z) > 0, 1.0, -1.0)


@dataclass(frozen=True)
class SignalSpec:
    n: int
    K: int
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.K <= self.n:
            raise ValueError(f"need 1 <= K <= n, got K={self.K}, n={self.n}")


@dataclass(frozen=True)
class NoiseModel:
    """Gaussian pre-quantization noise plus post-quantization sign flips.

    ``s_n`` is the ratio of the measurement variance to the noise
    variance; ``s_n = inf`` switches the Gaussian noise off.
    """

    s_n: float = 10.0
    flip_ratio: float = 0.1

    def __post_init__(self):
        if not self.s_n > 0:
            raise ValueError(f"s_n must be positive, got {self.s_n}")
        if not 0 <= self.flip_ratio <= 1:
            raise ValueError(f"flip_ratio must lie in [0, 1], got {self.flip_ratio}")

    @property
    def noise_std(self) -> float:
        return 0.0 if math.isinf(self.s_n) else 1.0 / math.sqrt(self.s_n)


@dataclass
class MeasurementEnsemble:
    """Sensing rows ``U[i] = u_i`` (shape ``(m, n)``), signs ``y`` and bookkeeping.

    ``noise`` holds the Gaussian draws added before quantization and
    ``flipped`` the indices whose sign was negated afterwards.
    """

    U: np.ndarray
    y: np.ndarray
    x_true: np.ndarray
    flipped: np.ndarray
    noise: np.ndarray

    @property
    def m(self) -> int:
        return self.U.shape[0]

    @property
    def n(self) -> int:
        return self.U.shape[1]

    def clean_signs(self) -> np.ndarray:
        """Signs before any flip, recomputed from the stored draws."""
        return sign_pm(self.U @ self.x_true + self.noise)


def generate_signal(spec: SignalSpec, rng=None) -> np.ndarray:
    """K-sparse unit vector: random support, standard normal values."""
    rng = make_rng(spec.seed if rng is None else rng)
    x = np.zeros(spec.n)
    support = rng.choice(spec.n, size=spec.K, replace=False)
    x[support] = rng.standard_normal(spec.K)
    return x / np.linalg.norm(x)


def n_flips(flip_ratio: float, m: int) -> int:
    # round half up; Python's round() would send 0.5 to the even neighbour
    return int(math.floor(flip_ratio * m + 0.5))


def sense(x_true, m: int, noise: NoiseModel, seed=None) -> MeasurementEnsemble:
    """Draw ``y_i = sgn(<u_i, x> + eps_i)`` and flip a fixed fraction of signs.

    ``u_i`` has i.i.d. standard normal entries, so ``<u_i, x>`` has unit
    variance for unit ``x`` and ``eps_i`` gets variance ``1/s_n``.
    """
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    rng = make_rng(seed)
    x_true = np.asarray(x_true, dtype=float)
    U = rng.standard_normal((m, x_true.size))
    eps = rng.standard_normal(m) * noise.noise_std
    y = sign_pm(U @ x_true + eps)
    flipped = np.sort(rng.choice(m, size=n_flips(noise.flip_ratio, m), replace=False))
    y[flipped] *= -1
    return MeasurementEnsemble(U=U, y=y, x_true=x_true, flipped=flipped, noise=eps)


def correlation(ens: MeasurementEnsemble) -> np.ndarray:
    """The sufficient statistic ``v = (1/m) sum_i y_i u_i``."""
    return ens.U.T @ ens.y / ens.m
