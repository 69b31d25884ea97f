"""Benchmarks that need a global channel enumeration: random, LSH2 and LSH4."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import ChannelSet, HopGenerator, PrivateStream
from .lclsh import Multiset, mixed_draw


@dataclass(frozen=True)
class GlobalEnumeration:
    """Two bijections of [0, N) shared by every user."""

    N: int
    pi1: tuple[int, ...]
    pi2: tuple[int, ...]

    def __post_init__(self):
        for name in ("pi1", "pi2"):
            perm = tuple(int(x) for x in getattr(self, name))
            object.__setattr__(self, name, perm)
            if len(perm) != self.N or sorted(perm) != list(range(self.N)):
                raise ValueError(f"{name} is not a bijection on [0, {self.N})")

    @cached_property
    def pi1_array(self) -> np.ndarray:
        return np.array(self.pi1, dtype=np.int64)

    @cached_property
    def pi2_array(self) -> np.ndarray:
        return np.array(self.pi2, dtype=np.int64)

    def check_channels(self, channels: ChannelSet) -> None:
        bad = [c for c in channels if c >= self.N]
        if bad:
            raise ValueError(f"channel {bad[0]} outside the enumeration [0, {self.N})")


def make_enumeration(seed: int, L: int) -> GlobalEnumeration:
    if not 1 <= L <= 24:
        raise ValueError("global enumeration is only built for L <= 24")
    rng = np.random.default_rng(seed)
    N = 1 << L
    return GlobalEnumeration(N, tuple(rng.permutation(N).tolist()), tuple(rng.permutation(N).tolist()))


def random_next(channels: ChannelSet, priv: PrivateStream, t: int = 0) -> int:
    return channels[int(priv.integers(np.array([t]), len(channels))[0])]


class RandomGenerator(HopGenerator):
    def __init__(self, channels: ChannelSet, priv: PrivateStream):
        self.channel_set = channels
        self.priv = priv

    def channels(self, t):
        return self.channel_set.array[self.priv.integers(t, len(self.channel_set))]


class LSH2Generator(HopGenerator):
    """Slot t picks the channel whose pi1 image follows pi2(t mod N) most closely, mod N."""

    def __init__(self, enumr: GlobalEnumeration, channels: ChannelSet):
        enumr.check_channels(channels)
        self.enumr = enumr
        self.channel_set = channels
        keys = enumr.pi1_array[channels.array]
        order = np.argsort(keys)
        self._keys = keys[order]
        self._ids = channels.array[order]

    def channels(self, t):
        v = self.enumr.pi2_array[np.asarray(t, dtype=np.int64) % self.enumr.N]
        i = np.searchsorted(self._keys, v, side="left")
        return self._ids[np.where(i == len(self._keys), 0, i)]


def lsh2_next(enumr: GlobalEnumeration, channels: ChannelSet, t: int) -> int:
    enumr.check_channels(channels)
    target = enumr.pi2[t % enumr.N]
    return min(channels, key=lambda c: (enumr.pi1[c] - target) % enumr.N)


def lsh2_multiset(enumr: GlobalEnumeration, channels: ChannelSet, T0: int) -> Multiset:
    if T0 < 1:
        raise ValueError("T0 must be >= 1")
    return Multiset(tuple(LSH2Generator(enumr, channels).sequence(T0)))


def lsh4_next(enumr: GlobalEnumeration, channels: ChannelSet, ms: Multiset, p0: float,
              priv: PrivateStream, t: int = 0) -> int:
    enumr.check_channels(channels)
    return int(mixed_draw(priv.uniform(np.array([t])), ms.array, channels.array, p0)[0])


class LSH4Generator(HopGenerator):
    def __init__(self, enumr: GlobalEnumeration, channels: ChannelSet, T0: int, p0: float,
                 priv: PrivateStream):
        if not 0 <= p0 <= 1:
            raise ValueError("p0 must be in [0, 1]")
        self.channel_set = channels
        self.multiset = lsh2_multiset(enumr, channels, T0)
        self.p0 = p0
        self.priv = priv

    def channels(self, t):
        return mixed_draw(self.priv.uniform(t), self.multiset.array, self.channel_set.array, self.p0)
