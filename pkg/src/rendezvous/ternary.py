"""Ternary role codewords and the bounded-MTTR hopping algorithms built on them.

A codeword assigns each position s of an M-slot frame one of three roles:
``0`` hop on the clock with the smaller prime, ``1`` hop on the clock with
the larger prime, ``2`` stay on the ID channel.  Rendezvous is guaranteed
once, for the realised drift, some frame position pairs a 0 of one user with
a 1 of the other *and* some position pairs a 1 with a 0
(:func:`pairwise_property_check`).

Three constructions are provided:

* :func:`symmetrize` -- fixed six-trit prefix followed by the 4B5B-encoded ID;
* :func:`berger_symmetrize` -- the '2', a five-bit Berger check (number of
  zeros in the payload) and the 4B5B payload.  The check makes distinct
  codewords incomparable bitwise, which settles zero drift;
* :func:`codeword` -- the deployed mapping: searched codebooks for L <= 8,
  where neither 4B5B layout can pass exhaustive validation, and
  :func:`berger_symmetrize` above that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from ._codebooks import CODEBOOKS
from .core import ChannelSet, HopGenerator, PrivateStream, ceil_div_threshold
from .lclsh import Multiset
from .modclock import clock_channels, prime_pools, primes_at_least, smallest_prime_at_least

FOUR_B_FIVE_B = (
    0b11110, 0b01001, 0b10100, 0b10101, 0b01010, 0b01011, 0b01110, 0b01111,
    0b10010, 0b10011, 0b10110, 0b10111, 0b11010, 0b11011, 0b11100, 0b11101,
)  # fmt: skip

DEFAULT_PREFIX = (2, 1, 1, 1, 0, 0)
CANDIDATE_PREFIXES = (
    (2, 1, 1, 1, 0, 0),
    (2, 1, 1, 0, 1, 0),
    (2, 1, 0, 1, 1, 0),
    (2, 0, 1, 1, 1, 0),
)
EXHAUSTIVE_MAX_L = 8


def codeword_length(L: int) -> int:
    return -(-L // 4) * 5 + 6


def encode_4b5b(nibble: int) -> int:
    if not 0 <= nibble < 16:
        raise ValueError(f"nibble {nibble} out of range")
    return FOUR_B_FIVE_B[nibble]


@dataclass(frozen=True)
class TernaryCodeword:
    trits: tuple[int, ...]

    def __post_init__(self):
        trits = tuple(int(x) for x in self.trits)
        object.__setattr__(self, "trits", trits)
        if any(x not in (0, 1, 2) for x in trits):
            raise ValueError("trits must be 0, 1 or 2")

    def __len__(self):
        return len(self.trits)

    def __getitem__(self, s):
        return self.trits[s]

    def __str__(self):
        return "".join(map(str, self.trits))

    @property
    def M(self) -> int:
        return len(self.trits)

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.trits, dtype=np.int8)


def _payload_bits(channel_id: int, L: int) -> list[int]:
    g = -(-L // 4)
    if not 0 <= channel_id < (1 << (4 * g)):
        raise ValueError(f"ID {channel_id} does not fit in {L} bits")
    bits = []
    for i in range(g - 1, -1, -1):
        code = FOUR_B_FIVE_B[(channel_id >> (4 * i)) & 0xF]
        bits.extend((code >> (4 - j)) & 1 for j in range(5))
    return bits


def symmetrize(channel_id: int, L: int, prefix: tuple[int, ...] = DEFAULT_PREFIX) -> TernaryCodeword:
    """Prefix followed by the 4B5B code of each nibble, most significant first."""
    if len(prefix) != 6:
        raise ValueError("prefix must have six trits")
    return TernaryCodeword(tuple(prefix) + tuple(_payload_bits(channel_id, L)))


def berger_symmetrize(channel_id: int, L: int) -> TernaryCodeword:
    # check value z - g lies in [0, 2g]; it fits five bits for L <= 60
    g = -(-L // 4)
    payload = _payload_bits(channel_id, L)
    z = (payload.count(0) - g) & 0x1F
    check = [(z >> (4 - j)) & 1 for j in range(5)]
    return TernaryCodeword((2, *check, *payload))


def codeword(channel_id: int, L: int) -> TernaryCodeword:
    """The deployed mapping: a frozen codebook for L <= 8, the Berger-check layout above that."""
    M = codeword_length(L)
    if not 0 <= channel_id < (1 << L):
        raise ValueError(f"ID {channel_id} does not fit in {L} bits")
    book = CODEBOOKS.get(M)
    if book is not None and L <= EXHAUSTIVE_MAX_L:
        return TernaryCodeword((2, *((book[channel_id] >> (M - 2 - j)) & 1 for j in range(M - 1))))
    return berger_symmetrize(channel_id, L)


CONSTRUCTIONS: dict[str, Callable[[int, int], TernaryCodeword]] = {
    "deployed": codeword,
    "berger": berger_symmetrize,
    "4b5b": symmetrize,
}


# -- pairwise property ------------------------------------------------------


def missing_orientations(w_u: TernaryCodeword, w_v: TernaryCodeword, d: int) -> list[str]:
    """Orientations ('01', '10') absent from the aligned pairs (w_u(s), w_v(s + d))."""
    M = len(w_u)
    if len(w_v) != M:
        raise ValueError("codewords must have equal length")
    if d == 0 and w_u == w_v:
        return []
    seen = {(w_u[s], w_v[(s + d) % M]) for s in range(M)}
    return [tag for tag, pair in (("01", (0, 1)), ("10", (1, 0))) if pair not in seen]


def pairwise_property_check(w_u: TernaryCodeword, w_v: TernaryCodeword, d: int) -> bool:
    if not 0 <= d < len(w_u):
        raise ValueError(f"drift {d} outside [0, {len(w_u) - 1}]")
    return not missing_orientations(w_u, w_v, d)


@dataclass(frozen=True)
class MappingFailure:
    u: int
    v: int
    d: int
    missing: str

    def line(self, L: int) -> str:
        width = max(1, -(-L // 4))
        return f"u={self.u:0{width}x} v={self.v:0{width}x} d={self.d} missing={self.missing}"


@dataclass
class ValidationReport:
    L: int
    mode: str
    construction: str
    checked: int = 0
    failures: list[MappingFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def lines(self) -> list[str]:
        return [f.line(self.L) for f in self.failures]


_TABLE_BITS = np.array([[(c >> (4 - j)) & 1 for j in range(5)] for c in FOUR_B_FIVE_B], dtype=np.int8)


def _payload_matrix(ids: np.ndarray, L: int) -> np.ndarray:
    g = -(-L // 4)
    ids = np.asarray(ids, dtype=np.uint64)
    cols = [_TABLE_BITS[((ids >> np.uint64(4 * i)) & np.uint64(0xF)).astype(np.int64)] for i in range(g - 1, -1, -1)]
    return np.concatenate(cols, axis=1)


def _trit_matrix(ids, L: int, mapping) -> np.ndarray:
    ids = np.asarray(ids)
    if L <= 64 and (mapping is symmetrize or mapping is berger_symmetrize
                    or (mapping is codeword and codeword_length(L) not in CODEBOOKS)):
        payload = _payload_matrix(ids, L)
        if mapping is symmetrize:
            head = np.broadcast_to(np.array(DEFAULT_PREFIX, dtype=np.int8), (len(ids), 6))
        else:
            z = ((payload == 0).sum(axis=1) - -(-L // 4)) & 0x1F
            head = np.column_stack([np.full(len(ids), 2)] + [(z >> (4 - j)) & 1 for j in range(5)])
        return np.concatenate([head.astype(np.int8), payload], axis=1)
    return np.array([mapping(int(i), L).trits for i in ids], dtype=np.int8)


def validate_mapping(
    L: int,
    mode: str = "exhaustive",
    count: int = 1_000_000,
    construction: str = "deployed",
    seed: int = 0,
    max_failures: int | None = None,
) -> ValidationReport:
    """Check the pairwise property over all (u, v, d), or ``count`` sampled triples."""
    mapping = CONSTRUCTIONS[construction]
    M = codeword_length(L)
    report = ValidationReport(L, mode, construction)
    if mode == "exhaustive":
        if L > EXHAUSTIVE_MAX_L:
            raise ValueError(f"exhaustive validation is limited to L <= {EXHAUSTIVE_MAX_L}")
        W = _trit_matrix(range(1 << L), L, mapping)
        ones = (W == 1).astype(np.float32)
        zeros = (W == 0).astype(np.float32)
        n = len(W)
        for d in range(M):
            # column s of the rolled matrices holds w_v(s + d)
            has01 = zeros @ np.roll(ones, -d, axis=1).T > 0
            has10 = ones @ np.roll(zeros, -d, axis=1).T > 0
            if d == 0:
                np.fill_diagonal(has01, True)
                np.fill_diagonal(has10, True)
            for tag, ok in (("01", has01), ("10", has10)):
                for u, v in np.argwhere(~ok):
                    report.failures.append(MappingFailure(int(u), int(v), d, tag))
            report.checked += n * n
        report.failures.sort(key=lambda f: (f.u, f.v, f.d, f.missing))
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        chunk = 50_000
        done = 0
        shift = np.arange(M)
        while done < count:
            c = min(chunk, count - done)
            u = rng.integers(0, 1 << L, size=c, dtype=np.uint64) if L < 64 else rng.integers(
                0, 2**64, size=c, dtype=np.uint64
            )
            v = rng.integers(0, 1 << L, size=c, dtype=np.uint64) if L < 64 else rng.integers(
                0, 2**64, size=c, dtype=np.uint64
            )
            d = rng.integers(0, M, size=c)
            Wu = _trit_matrix(u, L, mapping)
            Wv = _trit_matrix(v, L, mapping)
            Wv = Wv[np.arange(c)[:, None], (shift[None, :] + d[:, None]) % M]
            has01 = ((Wu == 0) & (Wv == 1)).any(axis=1)
            has10 = ((Wu == 1) & (Wv == 0)).any(axis=1)
            same = (u == v) & (d == 0)
            for tag, ok in (("01", has01 | same), ("10", has10 | same)):
                for i in np.flatnonzero(~ok):
                    report.failures.append(MappingFailure(int(u[i]), int(v[i]), int(d[i]), tag))
            done += c
            report.checked += c
            if max_failures is not None and len(report.failures) >= max_failures:
                break
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return report


# -- bounded-MTTR algorithms -------------------------------------------------


def asym_mttr_bound(n1: int, n2: int, p0: float) -> int:
    """Slot bound for two ASYM-LC-LSH4 users: 9 n1 n2 / (1 - p0)^2."""
    return math.floor(9 * n1 * n2 / (1 - p0) ** 2 + 1e-9)


def qr_mttr_bound(M: int, p_a1: int, p_b1: int) -> int:
    """Slot bound M * P_{1,1} * P_{2,1} for a validated quasi-random pair."""
    return M * p_a1 * p_b1


def asym_prime(role: int, n: int, p0: float, primes=None) -> int:
    if role not in (1, 2):
        raise ValueError("role must be 1 or 2")
    thr = ceil_div_threshold(n, p0)
    primes = primes if primes is not None else prime_pools(thr)
    return smallest_prime_at_least(thr, primes.odd if role == 1 else primes.even)


class AsymLCLSH4Generator(HopGenerator):
    """Role-split modular clock over the multiset: odd-indexed primes for role 1."""

    def __init__(self, role: int, channels: ChannelSet, ms: Multiset, p0: float,
                 priv: PrivateStream, primes=None):
        self.role = role
        self.channel_set = channels
        self.multiset = ms
        self.P = asym_prime(role, len(channels), p0, primes)
        self.r = int(priv.setup().integers(1, self.P)) if self.P > 1 else 0
        self.b = 0
        self.priv = priv

    def channels(self, t):
        t = np.asarray(t, dtype=np.int64)
        k = (self.r * t + self.b) % self.P
        return clock_channels(k, self.priv.uniform(t), self.channel_set.array, self.multiset.array)


def asym_next(role, channels, ms, p0, primes, priv, t) -> int:
    return AsymLCLSH4Generator(role, channels, ms, p0, priv, primes)(t)


@dataclass(frozen=True)
class QrParams:
    P0: int
    P1: int
    r0: tuple[int, ...]
    r1: tuple[int, ...]
    b0: tuple[int, ...]
    b1: tuple[int, ...]

    def __post_init__(self):
        if not self.P0 < self.P1:
            raise ValueError("need P0 < P1")
        for P, r, b in ((self.P0, self.r0, self.b0), (self.P1, self.r1, self.b1)):
            if len(r) != len(b):
                raise ValueError("slopes and biases must cover the same frame positions")
            if any(not 1 <= x <= P - 1 for x in r) or any(not 0 <= x < P for x in b):
                raise ValueError(f"slope/bias outside range for period {P}")


def qr_primes(n: int, p0: float) -> tuple[int, int]:
    """The two smallest primes >= ceil(n / (1 - p0))."""
    P0, P1 = primes_at_least(ceil_div_threshold(n, p0), 2)
    return P0, P1


def draw_qr_params(n: int, p0: float, M: int, rng: np.random.Generator) -> QrParams:
    P0, P1 = qr_primes(n, p0)
    return QrParams(
        P0, P1,
        tuple(int(x) for x in rng.integers(1, P0, size=M)),
        tuple(int(x) for x in rng.integers(1, P1, size=M)),
        tuple(int(x) for x in rng.integers(0, P0, size=M)),
        tuple(int(x) for x in rng.integers(0, P1, size=M)),
    )  # fmt: skip


class QuasiRandomGenerator(HopGenerator):
    """Frame-interleaved 0/1/2 sequences driven by a ternary codeword.

    Slot t sits at frame position s = t mod M in frame q = t // M.  Role 2
    stays on ``ident``; roles 0 and 1 run the modular clock with period P0 or
    P1 at time index q, replacing out-of-range clock values by a uniform draw
    from ``pool``.
    """

    def __init__(self, channels: ChannelSet, pool: np.ndarray, ident: int,
                 word: TernaryCodeword, params: QrParams, priv: PrivateStream):
        self.channel_set = channels
        self.pool = np.asarray(pool)
        self.ident = int(ident)
        self.word = word
        self.params = params
        self.priv = priv
        self._w = word.array.astype(np.int64)
        self._r0, self._r1 = np.array(params.r0), np.array(params.r1)
        self._b0, self._b1 = np.array(params.b0), np.array(params.b1)

    @property
    def M(self) -> int:
        return self.word.M

    def channels(self, t):
        t = np.asarray(t, dtype=np.int64)
        s = t % self.M
        q = t // self.M
        role = self._w[s]
        k = np.where(
            role == 1,
            (self._r1[s] * q + self._b1[s]) % self.params.P1,
            (self._r0[s] * q + self._b0[s]) % self.params.P0,
        )
        out = clock_channels(k, self.priv.uniform(t), self.channel_set.array, self.pool)
        return np.where(role == 2, self.ident, out)


def qr_lclsh4(channels: ChannelSet, ms: Multiset, p0: float, priv: PrivateStream,
              mapping=codeword) -> QuasiRandomGenerator:
    ident = ms[0]
    word = mapping(ident, channels.width)
    params = draw_qr_params(len(channels), p0, word.M, priv.setup())
    return QuasiRandomGenerator(channels, ms.array, ident, word, params, priv)


def qr_baseline(channels: ChannelSet, p0: float, priv: PrivateStream,
                mapping=codeword) -> QuasiRandomGenerator:
    rng = priv.setup()
    ident = channels[int(rng.integers(len(channels)))]
    word = mapping(ident, channels.width)
    params = draw_qr_params(len(channels), p0, word.M, rng)
    return QuasiRandomGenerator(channels, channels.array, ident, word, params, priv)


def qr_lclsh4_next(channels, ms, p0, params, word, priv, t, ident=None) -> int:
    ident = ms[0] if ident is None else ident
    return QuasiRandomGenerator(channels, ms.array, ident, word, params, priv)(t)


def qr_baseline_next(channels, p0, ident, params, word, priv, t) -> int:
    return QuasiRandomGenerator(channels, channels.array, ident, word, params, priv)(t)
