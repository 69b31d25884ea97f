"""Multiset-enhanced modular clock and the prime pools that feed it."""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import ChannelSet, PrivateStream
from .lclsh import Multiset


class SieveLimitError(ValueError):
    """The prime pool ran out before a prime >= the requested value was found."""


@dataclass(frozen=True)
class ModClockParams:
    P: int
    r: int
    b: int = 0

    def __post_init__(self):
        if self.P < 1:
            raise ValueError("period must be >= 1")
        if self.P > 1 and not 1 <= self.r <= self.P - 1:
            raise ValueError(f"slope {self.r} outside [1, {self.P - 1}]")
        if math.gcd(self.r, self.P) != 1:
            raise ValueError("slope must be coprime to the period")
        if not 0 <= self.b < self.P:
            raise ValueError(f"bias {self.b} outside [0, {self.P - 1}]")

    def check_covers(self, n: int) -> None:
        if self.P < n:
            raise ValueError(f"period {self.P} is smaller than the channel count {n}")

    def clock(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.int64)
        return (self.r * t + self.b) % self.P


def clock_channels(
    k: np.ndarray, x: np.ndarray, channels: np.ndarray, pool: np.ndarray
) -> np.ndarray:
    """Clock value k < n picks ``channels[k]``; otherwise uniform ``x`` picks from the pool."""
    n = len(channels)
    in_range = k < n
    j = np.minimum((np.asarray(x) * len(pool)).astype(np.int64), len(pool) - 1)
    return np.where(in_range, channels[np.minimum(k, n - 1)], pool[j])


def mod_clock_next(
    params: ModClockParams, channels: ChannelSet, ms: Multiset, t: int, priv: PrivateStream
) -> int:
    params.check_covers(len(channels))
    k = params.clock(np.array([t]))
    return int(clock_channels(k, priv.uniform(np.array([t])), channels.array, ms.array)[0])


# -- primes -----------------------------------------------------------------


@dataclass(frozen=True)
class IndexedPrimes:
    """Primes from 3 upward, numbered 1, 2, 3, ... and split by index parity."""

    limit: int
    odd: tuple[int, ...]
    even: tuple[int, ...]

    @property
    def all(self) -> tuple[int, ...]:
        return tuple(sorted(self.odd + self.even))

    def pool(self, name: str) -> tuple[int, ...]:
        if name == "odd":
            return self.odd
        if name == "even":
            return self.even
        if name == "all":
            return self.all
        raise ValueError(f"unknown pool {name!r}; expected odd, even or all")


def _sieve(limit: int) -> np.ndarray:
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if is_p[i]:
            is_p[i * i :: i] = False
    return np.flatnonzero(is_p)


@lru_cache(maxsize=32)
def sieve_indexed_primes(limit: int) -> IndexedPrimes:
    if limit < 3:
        raise ValueError("limit must be >= 3")
    primes = [int(p) for p in _sieve(limit) if p >= 3]
    return IndexedPrimes(limit, tuple(primes[0::2]), tuple(primes[1::2]))


def smallest_prime_at_least(x: int, pool) -> int:
    i = bisect_left(pool, x)
    if i == len(pool):
        raise SieveLimitError(f"no prime >= {x} in a pool ending at {pool[-1] if pool else None}")
    return pool[i]


def prime_pools(*thresholds: int) -> IndexedPrimes:
    """Pools large enough to answer queries at every threshold.

    Sized at four times the largest threshold, which leaves room for the
    second prime above it (Bertrand's postulate puts that below 3x); the power
    of two rounding only keeps the cache small.
    """
    need = max(4 * max(thresholds), 16)
    return sieve_indexed_primes(1 << (need - 1).bit_length())


def primes_at_least(x: int, count: int, pool: str = "all") -> list[int]:
    """The ``count`` smallest primes >= x in the named pool, growing the sieve as needed."""
    limit = max(4 * x, 16)
    while True:
        seq = sieve_indexed_primes(1 << (limit - 1).bit_length()).pool(pool)
        i = bisect_left(seq, x)
        if i + count <= len(seq):
            return list(seq[i : i + count])
        limit *= 2
