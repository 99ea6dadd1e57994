import math

import numpy as np
import pytest

from onebitcs.metrics import SNR_CAP_DB, angular_error, compute_metrics, snr_db
from onebitcs.sensing import MeasurementEnsemble, NoiseModel, SignalSpec, generate_signal, sense


def _ens(U, x):
    U = np.asarray(U, float)
    return MeasurementEnsemble(U=U, y=np.where(U @ x > 0, 1.0, -1.0), x_true=x,
                               flipped=np.array([], int), noise=np.zeros(U.shape[0]))


def test_perfect_recovery():
    x = generate_signal(SignalSpec(20, 3, seed=1))
    ens = sense(x, 300, NoiseModel(10.0, 0.1), seed=4)
    m = compute_metrics(x, x, ens)
    assert m.snr_db == SNR_CAP_DB and m.ae == 0 and m.inr == 0 and m.fnr == 0 and m.fpr == 0


def test_snr_example():
    assert snr_db([1, 0], [0.8, 0]) == pytest.approx(10 * math.log10(1 / 0.04), abs=1e-12)
    assert snr_db([1, 0], [0.8, 0]) == pytest.approx(13.979, abs=1e-3)


def test_orthogonal_estimate():
    x = np.array([1.0, 0.0])
    m = compute_metrics(x, np.array([0.0, 1.0]), _ens(np.eye(2), x))
    assert m.ae == pytest.approx(0.5) and m.fnr == 1 and m.fpr == 1


def test_zero_estimate():
    x = np.array([0.6, 0.8])
    assert angular_error(x, np.zeros(2)) == 0.5
    m = compute_metrics(x, np.zeros(2), _ens(np.eye(2), x))
    assert m.snr_db == pytest.approx(0.0) and m.fnr == 1 and m.fpr == 0


def test_metric_bounds():
    rng = np.random.default_rng(0)
    x = generate_signal(SignalSpec(30, 4, seed=2))
    ens = sense(x, 100, NoiseModel(10.0, 0.1), seed=3)
    for _ in range(100):
        m = compute_metrics(x, rng.standard_normal(30) * rng.uniform(0, 3), ens)
        assert 0 <= m.ae <= 1 and 0 <= m.inr <= 1 and 0 <= m.fnr <= 1 and 0 <= m.fpr <= 1
        assert math.isfinite(m.snr_db) and m.snr_db <= SNR_CAP_DB


def test_noiseless_truth_has_zero_inconsistency():
    x = generate_signal(SignalSpec(30, 4, seed=5))
    ens = sense(x, 400, NoiseModel(math.inf, 0.0), seed=6)
    assert compute_metrics(x, x, ens).inr == 0
