"""Two-user slotted rendezvous engine and the ETTR / batch-max MTTR estimators.

User A emits its local slot g at global slot g; user B wakes at global slot
d and emits its local slot g - d.  The TTR counts slots from B's wake-up,
inclusive, so a match in B's first slot is a TTR of 1.

Per-trial randomness is derived from ``(seed, n12, trial index)`` alone, so
trials can run in any order or process and every algorithm sees the same
channel sets and drift for a given trial (common random numbers).
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .baselines import LSH2Generator, LSH4Generator, RandomGenerator, make_enumeration
from .core import (
    ChannelSet,
    DriftModel,
    HopGenerator,
    ScenarioSpec,
    SharedRandomness,
    ceil_div_threshold,
    derive_key,
    gen_scenario,
    jaccard,
    private_stream,
)
from .lclsh import LCLSH4Generator, LCLSHGenerator, build_multiset, ettr_lclsh4_approx
from .modclock import prime_pools
from .ternary import (
    AsymLCLSH4Generator,
    pairwise_property_check,
    qr_baseline,
    qr_lclsh4,
    asym_mttr_bound,
    qr_mttr_bound,
)

ALGORITHMS = ("random", "lsh2", "lsh4", "lc-lsh", "lc-lsh4", "asym-lc-lsh4", "qr-lc-lsh4", "qr")
LC_FAMILY = frozenset({"lc-lsh", "lc-lsh4", "asym-lc-lsh4", "qr-lc-lsh4"})
MULTISET_ALGORITHMS = frozenset({"lsh4", "lc-lsh4", "asym-lc-lsh4", "qr-lc-lsh4"})
P0_ALGORITHMS = MULTISET_ALGORITHMS | {"qr"}
BOUNDED_ALGORITHMS = frozenset({"asym-lc-lsh4", "qr-lc-lsh4", "qr"})
SYNC_ALGORITHMS = frozenset({"random", "lsh2", "lc-lsh"})

ASYNC_DRIFT = DriftModel.uniform(999)


class UndefinedEttrError(ValueError):
    """Every trial timed out, so there is no TTR to average."""


def default_drift(algorithm: str) -> DriftModel:
    return DriftModel.sync() if algorithm in SYNC_ALGORITHMS else ASYNC_DRIFT


@dataclass(frozen=True)
class AlgorithmConfig:
    name: str
    K: int = 4
    T0: int = 20
    p0: float = 0.75

    def __post_init__(self):
        if self.name not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.name!r}; expected one of {', '.join(ALGORITHMS)}")
        if self.K < 1 or self.K & (self.K - 1):
            raise ValueError(f"K must be a power of two, got {self.K}")
        if self.T0 < 1:
            raise ValueError("T0 must be >= 1")
        if not 0 <= self.p0 <= 1:
            raise ValueError("p0 must be in [0, 1]")
        if self.name in BOUNDED_ALGORITHMS and self.p0 >= 1:
            raise ValueError("p0 must be < 1 for clock-based algorithms")

    @property
    def uses_K(self) -> bool:
        return self.name in LC_FAMILY

    @property
    def uses_T0(self) -> bool:
        return self.name in MULTISET_ALGORITHMS

    @property
    def uses_p0(self) -> bool:
        return self.name in P0_ALGORITHMS

    @property
    def bounded(self) -> bool:
        return self.name in BOUNDED_ALGORITHMS


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one trial; ``ttr`` is None on timeout."""

    ttr: int | None
    drift: int
    channel: int | None
    trial_index: int = 0
    seed: int = 0
    n12: int = 0
    bound: int | None = None
    gated: bool = False

    @property
    def timed_out(self) -> bool:
        return self.ttr is None

    @property
    def violation(self) -> bool:
        """A gated trial that failed to meet within its theorem bound."""
        return self.gated and self.bound is not None and (self.ttr is None or self.ttr > self.bound)


def run_trial(gen_a: HopGenerator, gen_b: HopGenerator, drift: int, horizon: int, **meta) -> TrialRecord:
    if horizon <= 0:
        raise ValueError("horizon must be >= 1")
    if drift < 0:
        raise ValueError("drift must be >= 0")
    start, size = 0, 128
    while start < horizon:
        stop = min(start + size, horizon)
        j = np.arange(start, stop, dtype=np.int64)
        a = gen_a.channels(j + drift)
        b = gen_b.channels(j)
        hit = np.flatnonzero(a == b)
        if hit.size:
            i = int(hit[0])
            return TrialRecord(start + i + 1, drift, int(a[i]), **meta)
        start = stop
        size = min(size * 2, 1 << 16)
    return TrialRecord(None, drift, None, **meta)


@dataclass
class TrialPair:
    gen_a: HopGenerator
    gen_b: HopGenerator
    bound: int | None = None
    gated: bool = False
    info: dict = field(default_factory=dict)


def build_pair(config: AlgorithmConfig, set_a: ChannelSet, set_b: ChannelSet, drift: int,
               public_seed: int, priv_key: int, trial_index: int) -> TrialPair:
    """Construct both users' generators for one trial of ``config``."""
    name, L = config.name, set_a.width
    pa = private_stream(priv_key, 1, trial_index)
    pb = private_stream(priv_key, 2, trial_index)
    if name == "random":
        return TrialPair(RandomGenerator(set_a, pa), RandomGenerator(set_b, pb))
    if name in ("lsh2", "lsh4"):
        enumr = make_enumeration(public_seed, L)
        if name == "lsh2":
            return TrialPair(LSH2Generator(enumr, set_a), LSH2Generator(enumr, set_b))
        return TrialPair(LSH4Generator(enumr, set_a, config.T0, config.p0, pa),
                         LSH4Generator(enumr, set_b, config.T0, config.p0, pb))
    shared = SharedRandomness(public_seed, L, config.K)
    if name == "lc-lsh":
        return TrialPair(LCLSHGenerator(set_a, shared), LCLSHGenerator(set_b, shared))
    if name != "qr":
        ms_a = build_multiset(set_a, config.K, shared.perm, shared, config.T0)
        ms_b = build_multiset(set_b, config.K, shared.perm, shared, config.T0)
    if name == "lc-lsh4":
        return TrialPair(LCLSH4Generator(set_a, ms_a, config.p0, pa),
                         LCLSH4Generator(set_b, ms_b, config.p0, pb))
    if name == "asym-lc-lsh4":
        pools = prime_pools(ceil_div_threshold(len(set_a), config.p0),
                            ceil_div_threshold(len(set_b), config.p0))
        ga = AsymLCLSH4Generator(1, set_a, ms_a, config.p0, pa, pools)
        gb = AsymLCLSH4Generator(2, set_b, ms_b, config.p0, pb, pools)
        bound = asym_mttr_bound(len(set_a), len(set_b), config.p0)
        return TrialPair(ga, gb, bound, ga.P != gb.P, {"P_a": ga.P, "P_b": gb.P})
    if name == "qr-lc-lsh4":
        ga = qr_lclsh4(set_a, ms_a, config.p0, pa)
        gb = qr_lclsh4(set_b, ms_b, config.p0, pb)
    else:
        ga = qr_baseline(set_a, config.p0, pa)
        gb = qr_baseline(set_b, config.p0, pb)
    # B's frame position lags A's by the drift, so B's word is read d positions back
    ok = pairwise_property_check(ga.word, gb.word, (-drift) % ga.M)
    bound = qr_mttr_bound(ga.M, ga.params.P1, gb.params.P1)
    return TrialPair(ga, gb, bound, ok, {"id_a": ga.ident, "id_b": gb.ident})


def trial_keys(seed: int, n12: int, trial_index: int) -> dict:
    point = derive_key(seed, n12)
    return {
        "scenario": derive_key(point, trial_index, 0),
        "public": derive_key(point, trial_index, 1),
        "drift": derive_key(point, trial_index, 2),
        "private": point,
    }


def resolve_horizon(spec: ScenarioSpec, config: AlgorithmConfig, horizon: int | str | None) -> int | None:
    """``None`` keeps ``spec.horizon``; ``'bound'`` uses each trial's theorem bound."""
    if horizon == "bound":
        if not config.bounded:
            raise ValueError(f"{config.name} has no theorem bound")
        return None
    return spec.horizon if horizon is None else int(horizon)


def simulate_one(spec: ScenarioSpec, config: AlgorithmConfig, trial_index: int,
                 horizon: int | str | None = None) -> tuple[TrialRecord, TrialPair]:
    keys = trial_keys(spec.seed, spec.n12, trial_index)
    set_a, set_b = gen_scenario(replace(spec, seed=keys["scenario"]))
    drift = spec.drift.sample(random.Random(keys["drift"]))
    pair = build_pair(config, set_a, set_b, drift, keys["public"], keys["private"], trial_index)
    h = resolve_horizon(spec, config, horizon)
    if h is None:
        h = pair.bound
    rec = run_trial(pair.gen_a, pair.gen_b, drift, h, trial_index=trial_index, seed=spec.seed,
                    n12=spec.n12, bound=pair.bound, gated=pair.gated)
    return rec, pair


def _run_block(args) -> list[TrialRecord]:
    spec, config, indices, horizon = args
    return [simulate_one(spec, config, i, horizon)[0] for i in indices]


def simulate(spec: ScenarioSpec, config: AlgorithmConfig, trials: int, workers: int = 1,
             horizon: int | str | None = None) -> list[TrialRecord]:
    """Run trials 0..trials-1 and return their records in trial order."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    resolve_horizon(spec, config, horizon)
    if workers <= 1:
        return _run_block((spec, config, range(trials), horizon))
    step = -(-trials // (workers * 4))
    blocks = [(spec, config, range(i, min(i + step, trials)), horizon) for i in range(0, trials, step)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return [rec for block in pool.map(_run_block, blocks) for rec in block]


# -- estimators --------------------------------------------------------------


def ettr_stats(ttrs) -> tuple[float, float]:
    """Mean and normal-approximation 95% half-width of the finished TTRs."""
    x = np.array([t for t in ttrs if t is not None], dtype=np.float64)
    if x.size == 0:
        raise UndefinedEttrError("no trial rendezvoused within the horizon")
    half = 1.96 * x.std(ddof=1) / math.sqrt(x.size) if x.size > 1 else 0.0
    return float(x.mean()), float(half)


def batch_max_mean(values, batch: int) -> float:
    """Split ``values`` into consecutive batches of ``batch`` and average the maxima."""
    x = np.asarray(values, dtype=np.float64)
    if batch < 1 or x.size == 0 or x.size % batch:
        raise ValueError(f"{x.size} trials cannot be split into batches of {batch}")
    return float(x.reshape(-1, batch).max(axis=1).mean())


def censored_ttrs(records: list[TrialRecord], horizon: int | None = None) -> list[int]:
    """TTRs with timeouts replaced by the trial's horizon (a lower bound on the truth)."""
    out = []
    for r in records:
        if r.ttr is not None:
            out.append(r.ttr)
        else:
            out.append(horizon if horizon is not None else r.bound)
    return out


def estimate_ettr(spec: ScenarioSpec, config: AlgorithmConfig, trials: int = 10_000,
                  workers: int = 1, horizon=None) -> tuple[float, float]:
    return ettr_stats(r.ttr for r in simulate(spec, config, trials, workers, horizon))


def estimate_mttr(spec: ScenarioSpec, config: AlgorithmConfig, trials: int = 10_000, batch: int = 100,
                  workers: int = 1, horizon=None) -> float:
    if batch < 1 or trials % batch:
        raise ValueError(f"trials={trials} is not divisible by batch={batch}")
    records = simulate(spec, config, trials, workers, horizon)
    h = resolve_horizon(spec, config, horizon)
    return batch_max_mean(censored_ttrs(records, h), batch)


def reference_curves(n1: int, n2: int, n12: int, T0: int, p0: float) -> dict:
    if n12 < 1:
        raise ValueError("n12 must be >= 1")
    return {
        "lowerBound": (n1 * n2 + 1) / (n12 + 1),
        "randomEttr": n1 * n2 / n12,
        "lshSyncEttr": 1 / jaccard(n1, n2, n12),
        "lsh4Ettr": ettr_lclsh4_approx(n1, n2, n12, T0, p0),
    }


CSV_COLUMNS = ("algorithm", "L", "n1", "n2", "n12", "jaccard", "K", "T0", "p0", "trials",
               "ettr", "ettr_ci95", "mttr", "timeouts", "seed")


@dataclass(frozen=True)
class SweepRow:
    algorithm: str
    L: int
    n1: int
    n2: int
    n12: int
    jaccard: float
    K: int | None
    T0: int | None
    p0: float | None
    trials: int
    ettr: float | None
    ettr_ci95: float | None
    mttr: float | None
    timeouts: int
    seed: int
    violations: int = 0
    gated: int = 0

    def as_dict(self) -> dict:
        return {c: getattr(self, c) for c in CSV_COLUMNS}


def summarize(spec: ScenarioSpec, config: AlgorithmConfig, records: list[TrialRecord],
              batch: int | None, horizon=None) -> SweepRow:
    try:
        ettr, ci = ettr_stats(r.ttr for r in records)
    except UndefinedEttrError:
        ettr, ci = None, None
    mttr = None
    if batch and len(records) % batch == 0:
        mttr = batch_max_mean(censored_ttrs(records, resolve_horizon(spec, config, horizon)), batch)
    return SweepRow(
        config.name, spec.L, spec.n1, spec.n2, spec.n12, spec.jaccard,
        config.K if config.uses_K else None,
        config.T0 if config.uses_T0 else None,
        config.p0 if config.uses_p0 else None,
        len(records), ettr, ci, mttr,
        sum(r.timed_out for r in records), spec.seed,
        sum(r.violation for r in records), sum(r.gated for r in records),
    )  # fmt: skip


def sweep(config: AlgorithmConfig, base: ScenarioSpec, n12_values, trials: int = 10_000,
          batch: int | None = 100, workers: int = 1, horizon=None) -> list[SweepRow]:
    n12_values = list(n12_values)
    if not n12_values:
        raise ValueError("n12 list is empty")
    rows = []
    for n12 in n12_values:
        spec = replace(base, n12=n12)
        rows.append(summarize(spec, config, simulate(spec, config, trials, workers, horizon), batch, horizon))
    return rows
