"""Command-line entry point: sweeps, figure reproduction, mapping validation, primes."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .core import DriftModel, ScenarioSpec
from .modclock import primes_at_least
from .sim import (
    ALGORITHMS,
    CSV_COLUMNS,
    AlgorithmConfig,
    SweepRow,
    default_drift,
    reference_curves,
    simulate_one,
    sweep,
)
from .ternary import EXHAUSTIVE_MAX_L, ValidationReport, validate_mapping

SEED_ENV = "RENDEZVOUS_SEED"
EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2

DEFAULTS = {
    "algorithm": "lc-lsh",
    "L": 8,
    "n1": 60,
    "n2": 60,
    "K": 4,
    "T0": 20,
    "p0": 0.75,
    "trials": 10_000,
    "batch": 100,
    "workers": 1,
    "format": "csv",
}

FIGURE_GRID = (10, 20, 30, 40, 50, 60)
K_VALUES = (1, 2, 4, 8, 16)


class UsageError(Exception):
    pass


# -- formatting ---------------------------------------------------------------


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_cell(v) for v in r.as_dict().values()])
    return buf.getvalue()


def rows_to_json(rows: list[SweepRow]) -> str:
    return json.dumps([r.as_dict() for r in rows], indent=2) + "\n"


# -- configuration --------------------------------------------------------------


def parse_drift(text) -> DriftModel:
    if isinstance(text, DriftModel):
        return text
    text = str(text).strip().lower()
    if text == "sync":
        return DriftModel.sync()
    if text.startswith("uniform"):
        _, _, rest = text.partition(":")
        return DriftModel.uniform(int(rest) if rest else 999)
    return DriftModel.uniform(int(text))


def parse_int_list(value) -> list[int]:
    if value is None:
        return []
    if isinstance(value, int):
        return [value]
    if isinstance(value, str):
        value = [value]
    out = []
    for item in value:
        if isinstance(item, int):
            out.append(item)
            continue
        for part in str(item).split(","):
            part = part.strip()
            if part:
                out.append(int(part))
    return out


def load_config_file(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"config: cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config: top level must be an object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def merged(args: argparse.Namespace, keys) -> dict:
    """Flag values over config-file values over defaults; also reports which were given."""
    file_cfg = load_config_file(args.config) if getattr(args, "config", None) else {}
    unknown = set(file_cfg) - set(keys)
    if unknown:
        raise UsageError(f"config: unknown key {sorted(unknown)[0]!r}")
    out, given = {}, set()
    for k in keys:
        v = getattr(args, k, None)
        if v is None and k in file_cfg:
            v = file_cfg[k]
        if v is not None:
            given.add(k)
        else:
            v = DEFAULTS.get(k)
        out[k] = v
    out["_given"] = given
    return out


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw, 0)
    except ValueError as exc:
        raise UsageError(f"{SEED_ENV}: not an integer: {raw!r}") from exc


@dataclass
class Experiment:
    config: AlgorithmConfig
    base: ScenarioSpec
    n12: list[int]
    trials: int
    batch: int
    horizon: int | str
    workers: int


SWEEP_KEYS = ("algorithm", "L", "n1", "n2", "n12", "K", "T0", "p0", "drift", "trials", "batch",
              "horizon", "seed", "workers", "format", "output")


def build_experiment(cfg: dict) -> Experiment:
    name = cfg["algorithm"]
    if name not in ALGORITHMS:
        raise UsageError(f"algorithm: unknown {name!r}; expected one of {', '.join(ALGORITHMS)}")
    given = cfg["_given"]
    probe = AlgorithmConfig(name)
    for key, ok in (("K", probe.uses_K), ("T0", probe.uses_T0), ("p0", probe.uses_p0)):
        if key in given and not ok:
            raise UsageError(f"{key}: not applicable to algorithm {name}")
    try:
        config = AlgorithmConfig(name, int(cfg["K"]), int(cfg["T0"]), float(cfg["p0"]))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"algorithm parameters: {exc}") from exc
    try:
        n12 = parse_int_list(cfg["n12"])
    except ValueError as exc:
        raise UsageError(f"n12: {exc}") from exc
    if not n12:
        raise UsageError("n12: at least one value is required")
    try:
        drift = parse_drift(cfg["drift"]) if cfg["drift"] is not None else default_drift(name)
    except ValueError as exc:
        raise UsageError(f"drift: {exc}") from exc
    trials, batch = int(cfg["trials"]), int(cfg["batch"])
    if trials < 1:
        raise UsageError("trials: must be >= 1")
    if batch < 1 or trials % batch:
        raise UsageError(f"batch: trials={trials} is not divisible by batch={batch}")
    horizon = cfg["horizon"]
    if horizon is None:
        horizon = "bound" if config.bounded else 10_000
    elif str(horizon) == "bound":
        if not config.bounded:
            raise UsageError(f"horizon: {name} has no theorem bound")
        horizon = "bound"
    else:
        try:
            horizon = int(horizon)
        except ValueError as exc:
            raise UsageError(f"horizon: {exc}") from exc
        if horizon < 1:
            raise UsageError("horizon: must be >= 1")
    seed = cfg["seed"] if cfg["seed"] is not None else default_seed()
    fixed_h = horizon if isinstance(horizon, int) else 10_000
    try:
        base = ScenarioSpec(int(cfg["L"]), int(cfg["n1"]), int(cfg["n2"]), n12[0], int(seed), drift, fixed_h)
        for v in n12:
            replace(base, n12=v)
    except ValueError as exc:
        raise UsageError(f"scenario: {exc}") from exc
    return Experiment(config, base, n12, trials, batch, horizon, max(1, int(cfg["workers"])))


def run_experiment(exp: Experiment) -> list[SweepRow]:
    return sweep(exp.config, exp.base, exp.n12, exp.trials, exp.batch, exp.workers,
                 None if isinstance(exp.horizon, int) else exp.horizon)


def _emit(text: str, output) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _violations(rows) -> int:
    return sum(r.violations for r in rows)


# -- subcommands ----------------------------------------------------------------


def cmd_sweep(args) -> int:
    cfg = merged(args, SWEEP_KEYS)
    exp = build_experiment(cfg)
    rows = run_experiment(exp)
    fmt = cfg["format"]
    if fmt not in ("csv", "json"):
        raise UsageError(f"format: expected csv or json, got {fmt!r}")
    _emit(rows_to_csv(rows) if fmt == "csv" else rows_to_json(rows), cfg["output"])
    bad = _violations(rows)
    if bad:
        print(f"error: {bad} trial(s) exceeded the theorem bound", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def figure_runs(tag: str, seed: int, trials: int, batch: int, workers: int) -> list[Experiment]:
    lc_sync = tag.startswith("lclsh-sync")
    lc_async = tag.startswith("lclsh4")

    def exp(name, K=4, horizon=10_000):
        cfg = AlgorithmConfig(name, K=K)
        base = ScenarioSpec(8, 60, 60, FIGURE_GRID[0], seed, default_drift(name), 10_000)
        return Experiment(cfg, base, list(FIGURE_GRID), trials, batch, horizon, workers)

    if lc_sync:
        return [exp("random"), exp("lsh2")] + [exp("lc-lsh", K) for K in K_VALUES]
    if lc_async:
        return [exp("random"), exp("lsh4")] + [exp("lc-lsh4", K) for K in K_VALUES]
    return [exp("random"), exp("lc-lsh4"), exp("qr", horizon="bound"),
            exp("asym-lc-lsh4", horizon="bound"), exp("qr-lc-lsh4", horizon="bound")]


FIGURES = ("lclsh-sync-ettr", "lclsh-sync-mttr", "lclsh4-ettr", "lclsh4-mttr", "qr-ettr", "qr-mttr")


def figure_summary(tag: str, rows: list[SweepRow]) -> str:
    metric = "mttr" if tag.endswith("mttr") else "ettr"
    lines = [f"{tag}: measured {metric.upper()} (N=256, n1=n2=60)"]
    head = f"{'algorithm':<14}{'K':>4}{'n12':>5}{'J':>8}{metric:>12}{'1/J':>9}{'random':>9}{'lower':>9}"
    if tag.startswith("lclsh4") or tag.startswith("qr"):
        head += f"{'approx':>9}"
    head += f"{'timeouts':>10}{'over':>6}"
    lines.append(head)
    for r in rows:
        ref = reference_curves(r.n1, r.n2, r.n12, 20, 0.75)
        val = getattr(r, metric)
        line = (f"{r.algorithm:<14}{_cell(r.K):>4}{r.n12:>5}{r.jaccard:>8.3f}"
                f"{(f'{val:.2f}' if val is not None else '-'):>12}"
                f"{ref['lshSyncEttr']:>9.2f}{ref['randomEttr']:>9.2f}{ref['lowerBound']:>9.2f}")
        if tag.startswith("lclsh4") or tag.startswith("qr"):
            line += f"{ref['lsh4Ettr']:>9.2f}"
        line += f"{r.timeouts:>10}{r.violations:>6}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def cmd_reproduce(args) -> int:
    if args.tag not in FIGURES:
        raise UsageError(f"tag: unknown {args.tag!r}; valid tags: {', '.join(FIGURES)}")
    seed = args.seed if args.seed is not None else default_seed()
    if args.trials < 1 or args.trials % args.batch:
        raise UsageError(f"batch: trials={args.trials} is not divisible by batch={args.batch}")
    rows = []
    for exp in figure_runs(args.tag, seed, args.trials, args.batch, max(1, args.workers)):
        rows.extend(run_experiment(exp))
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / f"{args.tag}.csv").write_text(rows_to_csv(rows))
    summary = figure_summary(args.tag, rows)
    (outdir / f"{args.tag}.txt").write_text(summary)
    sys.stdout.write(summary)
    bad = _violations(rows)
    if bad:
        print(f"error: {bad} trial(s) exceeded the theorem bound", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_validate_mapping(args) -> int:
    if args.sampled is None and not args.exhaustive:
        args.exhaustive = args.L <= EXHAUSTIVE_MAX_L
        if not args.exhaustive:
            args.sampled = 1_000_000
    if args.exhaustive and args.L > EXHAUSTIVE_MAX_L:
        raise UsageError(f"L: exhaustive validation is limited to L <= {EXHAUSTIVE_MAX_L}")
    if not 1 <= args.L <= 64:
        raise UsageError("L: must be in [1, 64]")
    if args.exhaustive:
        report = validate_mapping(args.L, "exhaustive", construction=args.construction)
    else:
        if args.sampled < 1:
            raise UsageError("sampled: count must be >= 1")
        report = validate_mapping(args.L, "sampled", args.sampled, args.construction, args.seed)
    _print_report(report)
    return EXIT_OK if report.ok else EXIT_FAILED


def _print_report(report: ValidationReport) -> None:
    for line in report.lines():
        print(line)
    status = "ok" if report.ok else "FAILED"
    print(f"{report.construction} L={report.L} {report.mode}: {report.checked} triples checked, "
          f"{len(report.failures)} failure(s): {status}", file=sys.stderr)


def cmd_primes(args) -> int:
    if args.at_least < 0 or args.count < 1:
        raise UsageError("at-least must be >= 0 and count >= 1")
    for p in primes_at_least(args.at_least, args.count, args.pool):
        print(p)
    return EXIT_OK


def cmd_trial(args) -> int:
    cfg = merged(args, SWEEP_KEYS)
    if len(parse_int_list(cfg["n12"])) > 1:
        raise UsageError("n12: trial takes a single value")
    exp = build_experiment(cfg)
    spec = exp.base
    rec, pair = simulate_one(spec, exp.config, args.index, None if isinstance(exp.horizon, int) else exp.horizon)
    d = rec.drift
    n = args.slots
    out = {
        "algorithm": exp.config.name,
        "trial_index": args.index,
        "ttr": rec.ttr,
        "drift": d,
        "channel": rec.channel,
        "bound": rec.bound,
        "gated": rec.gated,
        "set_a": list(pair.gen_a.channel_set),
        "set_b": list(pair.gen_b.channel_set),
        "info": pair.info,
        # both rows indexed by B's local slot
        "hops_a": pair.gen_a.sequence(n, start=d),
        "hops_b": pair.gen_b.sequence(n),
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of flag values (keys are flag names); flags win")
    p.add_argument("--algorithm", help=f"one of {', '.join(ALGORITHMS)} (default lc-lsh)")
    p.add_argument("--L", type=int, help="ID width in bits (default 8)")
    p.add_argument("--n1", type=int, help="channels available to user A (default 60)")
    p.add_argument("--n2", type=int, help="channels available to user B (default 60)")
    p.add_argument("--n12", action="append", help="common channel count(s); repeat or comma-separate")
    p.add_argument("--K", type=int, help="virtual frequencies per channel, LC family only (default 4)")
    p.add_argument("--T0", type=int, help="multiset size, multiset algorithms only (default 20)")
    p.add_argument("--p0", type=float, help="multiset probability (default 0.75)")
    p.add_argument("--drift", help="sync, uniform[:MAX] or MAX (default: sync for random/lsh2/lc-lsh, else uniform:999)")
    p.add_argument("--trials", type=int, help="trials per n12 value (default 10000)")
    p.add_argument("--batch", type=int, help="MTTR batch size (default 100)")
    p.add_argument("--horizon", help="slot limit or 'bound' (default: bound for bounded algorithms, else 10000)")
    p.add_argument("--seed", type=lambda s: int(s, 0), help=f"global seed (default ${SEED_ENV} or 0)")
    p.add_argument("--workers", type=int, help="worker processes (results do not depend on it)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rendezvous", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="ETTR/MTTR over a list of n12 values")
    _add_experiment_flags(p)
    p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    p.add_argument("--output", help="write to this file instead of stdout")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="rerun one of the evaluation figures")
    p.add_argument("tag", help=", ".join(FIGURES))
    p.add_argument("--seed", type=lambda s: int(s, 0), default=None)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--batch", type=int, default=100)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--outdir", default=".", help="directory for <tag>.csv and <tag>.txt")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("validate-mapping", help="check the pairwise property of the ID codewords")
    p.add_argument("--L", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exhaustive", action="store_true", help=f"all (u, v, d); L <= {EXHAUSTIVE_MAX_L}")
    g.add_argument("--sampled", type=int, metavar="COUNT", help="COUNT random triples")
    p.add_argument("--construction", choices=("deployed", "berger", "4b5b"), default="deployed",
                   help="deployed mapping (default), Berger-augmented 4B5B, or fixed-prefix 4B5B")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.set_defaults(func=cmd_validate_mapping)

    p = sub.add_parser("primes", help="smallest primes >= X from a pool")
    p.add_argument("--at-least", type=int, required=True)
    p.add_argument("--pool", choices=("odd", "even", "all"), default="all",
                   help="odd- or even-indexed primes counting 3 as index 1")
    p.add_argument("--count", type=int, default=1)
    p.set_defaults(func=cmd_primes)

    p = sub.add_parser("trial", help="dump one trial: sets, hop sequences and outcome as JSON")
    _add_experiment_flags(p)
    p.add_argument("--index", type=int, default=0, help="trial index")
    p.add_argument("--slots", type=int, default=32, help="hops to print per user")
    p.set_defaults(func=cmd_trial, format=None, output=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage; usage errors are status 1 here
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
