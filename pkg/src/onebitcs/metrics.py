"""Recovery quality measures for one trial."""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass

import numpy as np

from .sensing import MeasurementEnsemble, sign_pm

SNR_CAP_DB = 300.0
SUPPORT_TOL = 1e-3


@dataclass(frozen=True)
class RecoveryMetrics:
    snr_db: float
    ae: float
    inr: float
    fnr: float
    fpr: float

    def as_tuple(self):
        return astuple(self)


def support(x, tol: float = SUPPORT_TOL) -> np.ndarray:
    return np.abs(np.asarray(x)) > tol


def snr_db(x_true, x_hat) -> float:
    err = float(np.sum((np.asarray(x_true) - np.asarray(x_hat)) ** 2))
    if err == 0:
        return SNR_CAP_DB
    return min(SNR_CAP_DB, 10.0 * math.log10(float(np.sum(np.asarray(x_true) ** 2)) / err))


def angular_error(x_true, x_hat) -> float:
    """``arccos(<x_true, x_hat> / ||x_hat||) / pi``; 0.5 for a zero estimate."""
    nrm = float(np.linalg.norm(x_hat))
    if nrm == 0:
        return 0.5
    c = float(np.dot(x_true, x_hat)) / nrm
    return math.acos(min(1.0, max(-1.0, c))) / math.pi


def compute_metrics(x_true, x_hat, ens: MeasurementEnsemble) -> RecoveryMetrics:
    """SNR (dB), angular error, inconsistency ratio, FNR and FPR.

    The inconsistency ratio compares the signs the estimate and the true
    signal induce on the sensing vectors (``sgn(0) = -1``).  Supports use
    the ``|x_i| > 1e-3`` threshold.
    """
    x_true = np.asarray(x_true, dtype=float)
    x_hat = np.asarray(x_hat, dtype=float)
    inr = float(np.mean(sign_pm(ens.U @ x_true) != sign_pm(ens.U @ x_hat)))
    s_true, s_hat = support(x_true), support(x_hat)
    n_true = int(s_true.sum())
    n_off = x_true.size - n_true
    fnr = float(np.sum(s_true & ~s_hat)) / n_true if n_true else 0.0
    fpr = float(np.sum(s_hat & ~s_true)) / n_off if n_off else 0.0
    return RecoveryMetrics(
        snr_db=snr_db(x_true, x_hat),
        ae=angular_error(x_true, x_hat),
        inr=inr,
        fnr=fnr,
        fpr=fpr,
    )
