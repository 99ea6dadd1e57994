"""Command-line entry point: ``onebitcs {solve,sweep,cv,timing,oracle-check}``.

Exit codes: 0 success, 2 invalid configuration or input, 3 a solver
returned an uncertified point where a certificate is guaranteed (or the
certification suite failed), 1 any other failed property check.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

import numpy as np

from .dual import SolverConfig, Status, solve
from .experiment import CertificationError, ConfigError, ExperimentConfig, run_sweep
from .penalties import Penalty, sorted_l1_weights
from .selection import METHODS, SORTED_L1_ANCHOR, cross_validate, method_grid
from .sensing import MeasurementEnsemble

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_CERT = 0, 1, 2, 3
PENALTIES = ("l1", "mcp", "l0", "sorted_l1")


def _load_array_file(path):
    try:
        if path.endswith(".npz"):
            with np.load(path) as z:
                return {k: z[k] for k in z.files}
        if path.endswith(".npy"):
            return {"v": np.load(path)}
        return {"v": np.loadtxt(path, delimiter="," if path.endswith(".csv") else None, ndmin=1)}
    except (OSError, ValueError) as e:
        raise ConfigError(f"input: cannot read {path}: {e}") from e


def _ensemble(path) -> MeasurementEnsemble:
    d = _load_array_file(path)
    if "U" not in d or "y" not in d:
        raise ConfigError(f"input: {path} must be an .npz holding arrays U (m x n) and y (m)")
    U, y = np.asarray(d["U"], float), np.asarray(d["y"], float)
    if U.ndim != 2 or y.shape != (U.shape[0],) or not np.all(np.abs(y) == 1):
        raise ConfigError("input: need U of shape (m, n) and y in {-1, +1} of length m")
    x = np.asarray(d.get("x_true", np.zeros(U.shape[1])), float)
    return MeasurementEnsemble(U=U, y=y, x_true=x, flipped=np.array([], int), noise=np.zeros(U.shape[0]))


def _v_from_file(path) -> np.ndarray:
    d = _load_array_file(path)
    if "v" in d:
        v = np.asarray(d["v"], float).ravel()
    elif "U" in d and "y" in d:
        ens = _ensemble(path)
        v = ens.U.T @ ens.y / ens.m
    else:
        raise ConfigError(f"input: {path} holds neither v nor (U, y)")
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise ConfigError("input: v must be a nonempty finite vector")
    return v


def _penalty(args, n) -> Penalty:
    try:
        if args.penalty == "l1":
            return Penalty.l1(args.lam)
        if args.penalty == "l0":
            return Penalty.l0(args.lam)
        if args.penalty == "mcp":
            if args.b is None:
                raise ConfigError("b: MCP needs --b")
            return Penalty.mcp(args.lam, args.b)
        return Penalty.sorted_l1(args.lam, sorted_l1_weights(n, args.n1, anchor=args.anchor))
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"penalty: {e}") from e


def _solution_json(pen: Penalty, sol) -> dict:
    return {
        "penalty": repr(pen),
        "x": sol.x.tolist(),
        "mu": sol.mu,
        "status": sol.status.value,
        "gap": sol.gap,
    }


def _guard(pen: Penalty, sol):
    if sol.status is Status.INTERNAL_ERROR or (pen.homogeneous and not sol.certified):
        raise CertificationError(f"{pen!r} returned status {sol.status.value}")


def cmd_solve(args) -> int:
    v = _v_from_file(args.input)
    pen = _penalty(args, v.size)
    try:
        cfg = SolverConfig(tau=args.tau)
    except ValueError as e:
        raise ConfigError(f"tau: {e}") from e
    sol = solve(pen, v, cfg)
    _guard(pen, sol)
    print(json.dumps(_solution_json(pen, sol)))
    return EXIT_OK


def cmd_cv(args) -> int:
    ens = _ensemble(args.input)
    if not 2 <= args.folds <= ens.m:
        raise ConfigError(f"folds: need 2 <= folds <= m = {ens.m}, got {args.folds}")
    try:
        grid = method_grid(args.method, ens.n, lambdas=args.lambdas, bs=args.bs, n1s=args.n1s)
    except ValueError as e:
        raise ConfigError(f"grid: {e}") from e
    pen, sol, scores = cross_validate(ens, grid, args.folds, args.seed, return_scores=True)
    _guard(pen, sol)
    out = _solution_json(pen, sol)
    out.update(method=args.method, b=pen.b, **{"lambda": pen.lam},
               consistency=float(scores.max()))
    print(json.dumps(out))
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    out_dir = args.output_dir or cfg.output_dir
    res = run_sweep(cfg, workers=args.workers)
    if out_dir:
        trials, agg = res.write(out_dir)
        print(f"wrote {trials} and {agg}")
    else:
        sys.stdout.write(res.aggregate_csv())
    return EXIT_OK


def _pairs(text: str):
    try:
        pairs = [tuple(int(s) for s in p.lower().split("x")) for p in text.split(",")]
    except ValueError as e:
        raise ConfigError(f"pairs: expected e.g. 500x1000,1000x1000, got {text!r}") from e
    if any(len(p) != 2 or min(p) < 1 for p in pairs):
        raise ConfigError(f"pairs: expected e.g. 500x1000,1000x1000, got {text!r}")
    return pairs


def cmd_timing(args) -> int:
    from .timing import TABLE_PAIRS, timing_csv, timing_table

    pairs = _pairs(args.pairs) if args.pairs else TABLE_PAIRS
    if args.repeats < 1 or args.trials < 1:
        raise ConfigError("repeats/trials: must be positive")
    rows = timing_table(pairs, trials=args.trials, lam=args.lam, b=args.b,
                        repeats=args.repeats, base_seed=args.seed)
    text = timing_csv(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    from .checks import run_all

    results = run_all(instances=args.instances, seed=args.seed)
    for r in results:
        print(r.line())
    if any(r.certification and not r.passed for r in results):
        return EXIT_CERT
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="onebitcs", description="Sparse one-bit compressive sensing solvers.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one instance from a v vector or an (U, y) ensemble")
    s.add_argument("input", help=".npy/.txt/.csv vector v, or .npz with v or U (m x n) and y")
    s.add_argument("--penalty", choices=PENALTIES, required=True)
    s.add_argument("--lam", type=float, required=True)
    s.add_argument("--b", type=float, help="MCP concavity parameter")
    s.add_argument("--n1", type=int, default=10, help="sorted-l1 weight parameter")
    s.add_argument("--anchor", choices=("top", "bottom"), default=SORTED_L1_ANCHOR,
                   help="sorted-l1 weight placement")
    s.add_argument("--tau", type=float, default=0.0)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("cv", help="cross-validated parameter selection on an (U, y) ensemble")
    s.add_argument("input", help=".npz with U (m x n) and y")
    s.add_argument("--method", choices=METHODS, required=True)
    s.add_argument("--folds", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--lambdas", type=float, nargs="+")
    s.add_argument("--bs", type=float, nargs="+")
    s.add_argument("--n1s", type=int, nargs="+")
    s.set_defaults(func=cmd_cv)

    s = sub.add_parser("sweep", help="run an experiment described by a YAML config")
    s.add_argument("config")
    s.add_argument("--output-dir", help="overrides output_dir from the config")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("timing", help="wall-clock table for mcp, mcp_naive and passive")
    s.add_argument("--pairs", help="comma-separated MxN pairs (default: 500x1000,1000x1000,2000x5000,5000x5000)")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--repeats", type=int, default=20)
    s.add_argument("--lam", type=float, default=0.1)
    s.add_argument("--b", type=float, default=3.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", help="CSV path (default: stdout)")
    s.set_defaults(func=cmd_timing)

    s = sub.add_parser("oracle-check", help="run the randomized property suites")
    s.add_argument("--instances", type=int, help="instances per suite (default: full size)")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_oracle_check)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except CertificationError as e:
        print(f"certification failure: {e}", file=sys.stderr)
        return EXIT_CERT


if __name__ == "__main__":
    sys.exit(main())
