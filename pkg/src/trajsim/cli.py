"""``trajsim`` command line: dist, cluster, gadget and bench.

Exit codes: 0 success, 2 usage error, 3 data or validation error,
4 size-guard refusal.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from .core import (
    ConfigurationError,
    ParseError,
    SizeGuardError,
    SpeedModel,
    SymbolTrajectory,
    TimedTrajectory,
    TrajsimError,
    dataset_to_json,
    load_dataset,
    load_metric,
    load_timed_trajectory,
    save_timed_trajectory,
)
from .kgather import SYMBOLIC_MEASURES, TIMED_MEASURES, MeasureConfig, kgather_approx, kgather_exact, pairwise_distances

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_GUARD = 0, 2, 3, 4
DEFAULT_SEED = 0


class UsageError(Exception):
    pass


def _num(x: float):
    # JSON has no infinity; the sentinel is written as the string "inf"
    return "inf" if math.isinf(x) else x


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _add_measure_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--measure", required=True, choices=TIMED_MEASURES + SYMBOLIC_MEASURES)
    p.add_argument("--sigma", type=float, help="time window in normalized units")
    p.add_argument("--speed", choices=[m.value for m in SpeedModel], default="constant")
    p.add_argument("--mode", choices=["auto", "exact", "bisect"], default="auto")
    p.add_argument("--tol", type=float)
    p.add_argument("--shingle-w", type=int, default=2, dest="w")
    p.add_argument("--metric", help="location metric JSON file")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out")


def _config(args) -> MeasureConfig:
    if args.sigma is not None and args.sigma < 0:
        raise UsageError("--sigma must be nonnegative")
    if args.w < 1:
        raise UsageError("--shingle-w must be at least 1")
    if args.tol is not None and args.tol <= 0:
        raise UsageError("--tol must be positive")
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    metric = load_metric(args.metric) if args.metric else None
    try:
        return MeasureConfig(args.measure, sigma=args.sigma, speed=SpeedModel(args.speed), mode=args.mode,
                             tol=args.tol, w=args.w, metric=metric)
    except ConfigurationError as exc:
        raise UsageError(str(exc)) from None


def _load_item(path: str, kind: str, literal: bool):
    if literal:
        return SymbolTrajectory(path.split() if " " in path else list(path))
    p = Path(path)
    suffix = p.suffix.lower()
    if kind == "timed":
        try:
            return load_timed_trajectory(p)
        except KeyError:
            raise ConfigurationError(f"{path}: a timed measure needs sampled trajectories") from None
    if suffix == ".csv":
        raise ConfigurationError(f"{path}: csv files hold timed samples; this measure needs symbol strings")
    if suffix == ".json":
        data = json.loads(p.read_text(encoding="utf-8"))
        if "symbols" in data:
            return SymbolTrajectory(data["symbols"])
        items = load_dataset(p)
        if len(items) != 1:
            raise ConfigurationError("expected a file with exactly one trajectory")
        return items[0][1]
    text = p.read_text(encoding="utf-8").strip()
    return SymbolTrajectory(text.split() if any(c.isspace() for c in text) else list(text))


def cmd_dist(args) -> int:
    cfg = _config(args)
    if args.all_pairs:
        if args.inputs:
            raise UsageError("--all-pairs takes a dataset instead of positional inputs")
        items = load_dataset(args.all_pairs)
        dm = pairwise_distances([t for _, t in items], cfg, jobs=args.jobs)
        ids = [i for i, _ in items]
        if args.format == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["id"] + ids)
            for i, row in zip(ids, dm.d.tolist()):
                w.writerow([i] + [repr(x) for x in row])
            if args.out:
                Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
            else:
                sys.stdout.write(buf.getvalue())
            return EXIT_OK
        _emit({"schema": 1, "measure": cfg.name, "ids": ids,
               "matrix": [[_num(x) for x in row] for row in dm.d.tolist()]}, args.out)
        return EXIT_OK
    if len(args.inputs) != 2:
        raise UsageError("dist needs two inputs or --all-pairs DATASET")
    a, b = (_load_item(x, cfg.kind, args.strings) for x in args.inputs)
    dm = pairwise_distances([a, b], cfg)
    _emit({"schema": 1, "measure": cfg.name, "value": _num(float(dm.d[0, 1]))}, args.out)
    return EXIT_OK


def cmd_cluster(args) -> int:
    cfg = _config(args)
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    items = load_dataset(args.dataset)
    if len(items) < args.k:
        raise UsageError(f"--k {args.k} exceeds the dataset size {len(items)}")
    dm = pairwise_distances([t for _, t in items], cfg, jobs=args.jobs)
    cl = kgather_exact(dm, args.k) if args.exact else kgather_approx(dm, args.k)
    out = {"schema": 1, "measure": cfg.name, "k": args.k, "exact": bool(args.exact),
           "ids": [i for i, _ in items], **cl.to_json()}
    out["radius"] = _num(out["radius"])
    _emit(out, args.out)
    return EXIT_OK


def cmd_gadget_ov(args) -> int:
    from .gadgets import build_ov_curves, random_ov_instance, verify_ov_gadget

    if args.n < 1 or args.d < 1:
        raise UsageError("--n and --d must be positive")
    rng = np.random.default_rng(args.seed)
    inst = random_ov_instance(args.n, args.d, rng)
    P, Q = build_ov_curves(inst)
    out = {"schema": 1, "N": inst.N, "D": inst.D, "U": [list(u) for u in inst.U], "V": [list(v) for v in inst.V],
           "len_P": len(P), "len_Q": len(Q)}
    if args.out_prefix:
        for name, curve in (("P", P), ("Q", Q)):
            path = f"{args.out_prefix}{name}.csv"
            save_timed_trajectory(TimedTrajectory.uniform(curve.xy), path)
            out[f"{name}_file"] = path
    if args.verify:
        out["report"] = verify_ov_gadget(inst)
    _emit(out, args.out)
    return EXIT_OK


def cmd_gadget_sat(args) -> int:
    from .gadgets import build_sat_gadget, load_formula, random_formula, verify_sat_gadget

    if args.formula:
        f = load_formula(args.formula)
    elif args.random:
        f = random_formula(args.random[0], args.random[1], np.random.default_rng(args.seed))
    else:
        raise UsageError("gadget sat needs --formula FILE or --random N M")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        g = build_sat_gadget(f, args.k)
    out = {"schema": 1, "n": f.n, "m": f.m, "k": args.k, "clauses": [list(c) for c in f.clauses],
           "trajectories": len(g.trajectories)}
    if args.dataset_out:
        data = dataset_to_json(g.dataset())
        Path(args.dataset_out).write_text(json.dumps(data), encoding="utf-8")
        out["dataset_file"] = args.dataset_out
        Path(args.dataset_out).with_suffix(".metric.json").write_text(
            json.dumps(g.metric().to_json()), encoding="utf-8")
    if args.verify:
        rep = verify_sat_gadget(f, args.k, gadget=g)
        rep["claims"] = {k: [list(x) for x in v] for k, v in rep["claims"].items()}
        out["report"] = rep
    _emit(out, args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import run_all

    _emit(run_all(seed=args.seed, quick=args.quick), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trajsim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dist", help="distance between two trajectories or all pairs of a dataset")
    _add_measure_flags(d)
    d.add_argument("inputs", nargs="*")
    d.add_argument("--all-pairs", metavar="DATASET")
    d.add_argument("--strings", action="store_true", help="treat inputs as literal symbol strings")
    d.add_argument("--format", choices=["json", "csv"], default="json")
    d.set_defaults(func=cmd_dist)

    c = sub.add_parser("cluster", help="k-gather clustering of a dataset")
    _add_measure_flags(c)
    c.add_argument("dataset")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--exact", action="store_true", help="exhaustive optimum (n <= 16)")
    c.set_defaults(func=cmd_cluster)

    g = sub.add_parser("gadget", help="hardness gadgets")
    gs = g.add_subparsers(dest="gadget", required=True)
    ov = gs.add_parser("ov", help="random orthogonal-vectors instance to curves")
    ov.add_argument("--n", type=int, required=True)
    ov.add_argument("--d", type=int, required=True)
    ov.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ov.add_argument("--verify", action="store_true")
    ov.add_argument("--out-prefix", help="write <prefix>P.csv and <prefix>Q.csv")
    ov.add_argument("--out")
    ov.set_defaults(func=cmd_gadget_ov)
    sat = gs.add_parser("sat", help="3SAT formula to a k-gather trajectory set")
    sat.add_argument("--formula", help="DIMACS CNF file")
    sat.add_argument("--random", type=int, nargs=2, metavar=("N", "M"))
    sat.add_argument("--k", type=int, default=14)
    sat.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sat.add_argument("--verify", action="store_true")
    sat.add_argument("--dataset-out", help="write the trajectories as a dataset JSON")
    sat.add_argument("--out")
    sat.set_defaults(func=cmd_gadget_sat)

    b = sub.add_parser("bench", help="timing sweeps")
    b.add_argument("--quick", action="store_true")
    b.add_argument("--seed", type=int, default=DEFAULT_SEED)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"trajsim: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizeGuardError as exc:
        print(f"trajsim: refused: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (TrajsimError, json.JSONDecodeError, OSError, ValueError) as exc:
        kind = "parse error" if isinstance(exc, ParseError) else "error"
        print(f"trajsim: {kind}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
