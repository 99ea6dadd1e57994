"""Seeded recovery sweeps over m, K or s_n, with per-trial and aggregate CSV output."""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .dual import DEFAULT_CONFIG, SolverConfig, Status, solve
from .metrics import compute_metrics
from .penalties import PenaltyKind, sorted_l1_weights
from .selection import (
    DEFAULT_N1,
    METHODS,
    N1_SWEEP,
    SORTED_L1_ANCHOR,
    cross_validate,
    ideal_select,
    method_grid,
)
from .sensing import NoiseModel, SignalSpec, correlation, generate_signal, make_rng, sense, trial_seed

TRIAL_COLUMNS = (
    "sweep_var", "sweep_value", "method", "param_mode", "trial",
    "snr_db", "ae", "inr", "fnr", "fpr", "mu", "status", "time_ms",
    "lambda", "b", "n1",
)
AGGREGATE_COLUMNS = (
    "sweep_var", "sweep_value", "method", "param_mode",
    "mean_snr_db", "sd_snr_db", "mean_ae", "mean_inr", "mean_fnr", "mean_fpr",
    "mean_time_ms", "sd_time_ms",
)
SWEEPABLE = ("m", "k", "s_n")
PARAM_MODES = ("ideal", "cv")
_GRID_KEYS = ("lambda", "b", "n1")


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the offending key."""


class CertificationError(RuntimeError):
    """A solver returned an uncertified point where a certificate is guaranteed."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep.  At most one of ``m``, ``k``, ``s_n`` may be a list.

    ``grids`` overrides the default parameter grids per method, e.g.
    ``{"mcp": {"lambda": [0.1], "b": [3]}}``.
    """

    n: int = 1000
    m: object = 1000
    k: object = 15
    s_n: object = 10.0
    flip_ratio: float = 0.1
    trials: int = 100
    base_seed: int = 0
    folds: int = 10
    methods: Tuple[str, ...] = METHODS
    param_mode: str = "both"
    grids: Dict[str, Dict[str, list]] = field(default_factory=dict)
    output_dir: Optional[str] = None

    def __post_init__(self):
        _validate(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config: expected a mapping of keys to values")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"{unknown[0]}: unknown config key (known: {', '.join(sorted(known))})")
        d = dict(d)
        if "methods" in d:
            if isinstance(d["methods"], str):
                d["methods"] = [d["methods"]]
            if not isinstance(d["methods"], (list, tuple)):
                raise ConfigError("methods: expected a list of method names")
            d["methods"] = tuple(d["methods"])
        if "s_n" in d:
            d["s_n"] = _parse_sn(d["s_n"])
        return cls(**d)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        import yaml

        try:
            with open(path) as fh:
                d = yaml.safe_load(fh)
        except OSError as e:
            raise ConfigError(f"config: cannot read {path}: {e.strerror}") from e
        except yaml.YAMLError as e:
            raise ConfigError(f"config: not valid YAML: {e}") from e
        return cls.from_dict(d or {})

    @property
    def sweep_var(self) -> str:
        for key in SWEEPABLE:
            if isinstance(getattr(self, key), (list, tuple)):
                return key
        return "m"

    @property
    def sweep_values(self) -> list:
        val = getattr(self, self.sweep_var)
        return list(val) if isinstance(val, (list, tuple)) else [val]

    @property
    def modes(self) -> Tuple[str, ...]:
        return PARAM_MODES if self.param_mode == "both" else (self.param_mode,)

    def point(self, value) -> Dict[str, object]:
        """Scalar (m, k, s_n) for one sweep value."""
        p = {key: getattr(self, key) for key in SWEEPABLE}
        p[self.sweep_var] = value
        return p

    def n1_values(self, method: str) -> Sequence[int]:
        if method != "sorted_l1":
            return ()
        n1s = self.grids.get(method, {}).get("n1")
        if n1s is None:
            n1s = N1_SWEEP if self.sweep_var == "k" else (DEFAULT_N1,)
        return tuple(n1s)

    def grid(self, method: str):
        o = self.grids.get(method, {})
        return method_grid(method, self.n, lambdas=o.get("lambda"), bs=o.get("b"),
                           n1s=self.n1_values(method) or None)


def _parse_sn(val):
    def one(x):
        if isinstance(x, str) and x.strip().lower() in ("inf", "infinity", ".inf"):
            return math.inf
        return x
    return [one(x) for x in val] if isinstance(val, (list, tuple)) else one(val)


def _is_int(x) -> bool:
    return isinstance(x, (int, np.integer)) and not isinstance(x, bool)


def _is_real(x) -> bool:
    return isinstance(x, (int, float, np.integer, np.floating)) and not isinstance(x, bool)


def _validate(c: ExperimentConfig):
    if not (_is_int(c.n) and c.n >= 1):
        raise ConfigError(f"n: expected a positive integer, got {c.n!r}")
    lists = [key for key in SWEEPABLE if isinstance(getattr(c, key), (list, tuple))]
    if len(lists) > 1:
        raise ConfigError(f"{lists[1]}: only one of m, k, s_n may be a list (also got {lists[0]})")
    for key in SWEEPABLE:
        val = getattr(c, key)
        vals = list(val) if isinstance(val, (list, tuple)) else [val]
        if not vals:
            raise ConfigError(f"{key}: empty list")
        for x in vals:
            if key == "s_n":
                ok = _is_real(x) and x > 0
            else:
                ok = _is_int(x) and x >= 1
            if not ok:
                raise ConfigError(f"{key}: invalid value {x!r}")
            if key == "k" and x > c.n:
                raise ConfigError(f"k: sparsity {x} exceeds n = {c.n}")
    if not (_is_real(c.flip_ratio) and 0 <= c.flip_ratio <= 1):
        raise ConfigError(f"flip_ratio: expected a number in [0, 1], got {c.flip_ratio!r}")
    if not (_is_int(c.trials) and c.trials >= 1):
        raise ConfigError(f"trials: expected a positive integer, got {c.trials!r}")
    if not (_is_int(c.base_seed) and c.base_seed >= 0):
        raise ConfigError(f"base_seed: expected a nonnegative integer, got {c.base_seed!r}")
    if not (_is_int(c.folds) and c.folds >= 2):
        raise ConfigError(f"folds: expected an integer >= 2, got {c.folds!r}")
    if "cv" in c.modes:
        ms = c.m if isinstance(c.m, (list, tuple)) else [c.m]
        if any(c.folds > m for m in ms):
            raise ConfigError(f"folds: {c.folds} folds need m >= {c.folds}")
    if not c.methods:
        raise ConfigError("methods: empty method list")
    for meth in c.methods:
        if meth not in METHODS:
            raise ConfigError(f"methods: unknown method {meth!r}; expected a subset of {METHODS}")
    if len(set(c.methods)) != len(c.methods):
        raise ConfigError("methods: duplicate entries")
    if c.param_mode not in ("ideal", "cv", "both"):
        raise ConfigError(f"param_mode: expected ideal, cv or both, got {c.param_mode!r}")
    if not isinstance(c.grids, dict):
        raise ConfigError("grids: expected a mapping from method to overrides")
    for meth, o in c.grids.items():
        if meth not in METHODS:
            raise ConfigError(f"grids.{meth}: unknown method")
        if not isinstance(o, dict):
            raise ConfigError(f"grids.{meth}: expected a mapping of grid overrides")
        for key, vals in o.items():
            if key not in _GRID_KEYS:
                raise ConfigError(f"grids.{meth}.{key}: unknown grid key (known: {', '.join(_GRID_KEYS)})")
            if not isinstance(vals, (list, tuple)) or not vals:
                raise ConfigError(f"grids.{meth}.{key}: expected a nonempty list")
            ok = all(_is_int(x) and 1 <= x <= c.n for x in vals) if key == "n1" else \
                all(_is_real(x) and x >= 0 for x in vals)
            if key == "b":
                ok = ok and all(x > 0 for x in vals)
            if not ok:
                raise ConfigError(f"grids.{meth}.{key}: invalid values {list(vals)!r}")
    if c.output_dir is not None and not isinstance(c.output_dir, str):
        raise ConfigError(f"output_dir: expected a path string, got {c.output_dir!r}")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def run_trial(cfg: ExperimentConfig, sweep_index: int, trial: int,
              solver_cfg: SolverConfig = DEFAULT_CONFIG) -> List[dict]:
    """All (method, mode) rows of one trial, in method-then-mode order."""
    value = cfg.sweep_values[sweep_index]
    p = cfg.point(value)
    data_ss, cv_ss = trial_seed(cfg.base_seed, sweep_index, trial).spawn(2)
    rng = make_rng(data_ss)
    x_true = generate_signal(SignalSpec(cfg.n, int(p["k"])), rng)
    ens = sense(x_true, int(p["m"]), NoiseModel(float(p["s_n"]), cfg.flip_ratio), rng)

    rows = []
    for method in cfg.methods:
        grid = cfg.grid(method)
        n1_of = {
            sorted_l1_weights(cfg.n, n1, anchor=SORTED_L1_ANCHOR).tobytes(): n1
            for n1 in cfg.n1_values(method)
        }
        for mode in cfg.modes:
            if mode == "ideal":
                pen, _ = ideal_select(ens, x_true, grid, solver_cfg)
            else:
                pen, _ = cross_validate(ens, grid, cfg.folds, cv_ss, solver_cfg)
            t0 = time.perf_counter()
            sol = solve(pen, correlation(ens), solver_cfg)
            elapsed = time.perf_counter() - t0
            if sol.status is Status.INTERNAL_ERROR or (pen.homogeneous and not sol.certified):
                raise CertificationError(
                    f"{pen!r} returned status {sol.status.value} "
                    f"(sweep {sweep_index}, trial {trial})"
                )
            met = compute_metrics(x_true, sol.x, ens)
            n1 = n1_of.get(pen.weights.tobytes()) if pen.kind is PenaltyKind.SORTED_L1 else None
            rows.append({
                "sweep_var": cfg.sweep_var,
                "sweep_value": value,
                "method": method,
                "param_mode": mode,
                "trial": trial,
                "snr_db": met.snr_db,
                "ae": met.ae,
                "inr": met.inr,
                "fnr": met.fnr,
                "fpr": met.fpr,
                "mu": sol.mu,
                "status": sol.status.value,
                "time_ms": 1e3 * elapsed,
                "lambda": pen.lam,
                "b": pen.b,
                "n1": n1,
            })
    return rows


def _run_one(args):
    cfg, s, t, solver_cfg = args
    return run_trial(cfg, s, t, solver_cfg)


@dataclass
class SweepResult:
    config: ExperimentConfig
    rows: List[dict]

    def aggregate(self) -> List[dict]:
        """Mean and (population) standard deviation over trials per group."""
        groups: Dict[tuple, List[dict]] = {}
        for r in self.rows:
            groups.setdefault((r["sweep_var"], r["sweep_value"], r["method"], r["param_mode"]), []).append(r)
        out = []
        for (var, val, meth, mode), rs in groups.items():
            col = lambda k: np.array([r[k] for r in rs], dtype=float)  # noqa: E731
            out.append({
                "sweep_var": var,
                "sweep_value": val,
                "method": meth,
                "param_mode": mode,
                "mean_snr_db": float(col("snr_db").mean()),
                "sd_snr_db": float(col("snr_db").std()),
                "mean_ae": float(col("ae").mean()),
                "mean_inr": float(col("inr").mean()),
                "mean_fnr": float(col("fnr").mean()),
                "mean_fpr": float(col("fpr").mean()),
                "mean_time_ms": float(col("time_ms").mean()),
                "sd_time_ms": float(col("time_ms").std()),
            })
        return out

    def mean(self, method: str, mode: str = "ideal", metric: str = "snr_db") -> Dict[object, float]:
        """``{sweep_value: mean metric}`` for one method and mode."""
        acc: Dict[object, list] = {}
        for r in self.rows:
            if r["method"] == method and r["param_mode"] == mode:
                acc.setdefault(r["sweep_value"], []).append(r[metric])
        return {k: float(np.mean(v)) for k, v in acc.items()}

    def trial_csv(self) -> str:
        return _to_csv(TRIAL_COLUMNS, self.rows)

    def aggregate_csv(self) -> str:
        return _to_csv(AGGREGATE_COLUMNS, self.aggregate())

    def write(self, output_dir) -> Tuple[str, str]:
        """Write ``trials.csv`` and ``aggregate.csv``; both appear only once complete."""
        os.makedirs(output_dir, exist_ok=True)
        paths = []
        for name, text in (("trials.csv", self.trial_csv()), ("aggregate.csv", self.aggregate_csv())):
            path = os.path.join(output_dir, name)
            tmp = path + ".tmp"
            with open(tmp, "w", newline="") as fh:
                fh.write(text)
            paths.append((tmp, path))
        for tmp, path in paths:
            os.replace(tmp, path)
        return paths[0][1], paths[1][1]


def _to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def run_sweep(cfg: ExperimentConfig, workers: int = 1,
              solver_cfg: SolverConfig = DEFAULT_CONFIG) -> SweepResult:
    """Run every (sweep value, trial); rows come back in (sweep, method, mode, trial) order.

    With ``workers > 1`` trials run in worker processes.  Each trial
    derives its own streams from ``(base_seed, sweep_index, trial)``, so
    the output does not depend on scheduling.
    """
    jobs = [(cfg, s, t, solver_cfg) for s in range(len(cfg.sweep_values)) for t in range(cfg.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            per_trial = list(ex.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        per_trial = [_run_one(j) for j in jobs]

    method_rank = {m: i for i, m in enumerate(cfg.methods)}
    mode_rank = {m: i for i, m in enumerate(cfg.modes)}
    rows = []
    for (_, s, _, _), trial_rows in zip(jobs, per_trial):
        for r in trial_rows:
            rows.append((s, r))
    rows.sort(key=lambda sr: (sr[0], method_rank[sr[1]["method"]],
                              mode_rank[sr[1]["param_mode"]], sr[1]["trial"]))
    return SweepResult(cfg, [r for _, r in rows])


def fig1_config(**overrides) -> ExperimentConfig:
    """m-sweep from 300 to 2000 at n = 1000, K = 15, s_n = 10, 10% flips."""
    d = dict(n=1000, m=[300, 500, 700, 1000, 1300, 1600, 2000], k=15, s_n=10.0,
             flip_ratio=0.1, trials=100)
    d.update(overrides)
    return ExperimentConfig(**d)
