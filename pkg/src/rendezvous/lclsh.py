"""Consistent-hashing channel selection (LC-LSH) and its multiset variant (LC-LSH4).

Each channel is replicated into K virtual frequencies, the virtual frequencies
are hashed onto a ring of ``K * 2**L`` points by a bit permutation, and a
public uniform number U(t) picks the owner of the next point clockwise.  Two
users who share the permutation and the U stream therefore select the same
channel whenever the next point belongs to a channel they both have.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import (
    BitPermutation,
    ChannelSet,
    HopGenerator,
    PrivateStream,
    SharedRandomness,
    jaccard,
    log2_exact,
    permute_bits,
)


@dataclass(frozen=True)
class HashRing:
    """Sorted hashed virtual frequencies plus the sentinel at ``K * 2**L``."""

    channel_set: ChannelSet
    K: int
    hashes: tuple[int, ...]
    owners: tuple[int, ...]

    @property
    def L(self) -> int:
        return self.channel_set.width

    @property
    def span(self) -> int:
        return self.K << self.L

    @property
    def points(self) -> list[tuple[int, int]]:
        return list(zip(self.hashes, self.owners))

    @cached_property
    def _hash_array(self) -> np.ndarray:
        return np.array(self.hashes, dtype=np.int64 if self.L + log2_exact(self.K) <= 62 else object)

    @cached_property
    def _owner_ids(self) -> np.ndarray:
        return self.channel_set.array[np.array(self.owners, dtype=np.int64)]

    def owner_measure(self) -> dict[int, int]:
        """Number of U values in [0, span) that select each channel index."""
        out = {i: 0 for i in range(len(self.channel_set))}
        prev = -1
        for h, i in zip(self.hashes, self.owners):
            top = min(h, self.span - 1)
            out[i] += top - prev
            prev = top
        return out

    def lookup_array(self, u: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self._hash_array, u, side="left")
        return self._owner_ids[idx]


def build_ring(channels: ChannelSet, K: int, perm: BitPermutation) -> HashRing:
    log_k = log2_exact(K)
    if perm.width != channels.width + log_k:
        raise ValueError(
            f"permutation width {perm.width} != L + log2(K) = {channels.width + log_k}"
        )
    n = len(channels)
    if perm.width <= 62:
        ids = np.repeat(channels.array.astype(np.int64), K)
        raw = (ids << log_k) | np.tile(np.arange(K, dtype=np.int64), n)
        hashed = permute_bits(raw, perm).tolist()
    else:
        raw = [(c << log_k) | k for c in channels for k in range(K)]
        hashed = list(permute_bits(np.array(raw, dtype=object), perm))
    owner = [i for i in range(n) for _ in range(K)]
    order = sorted(range(n * K), key=hashed.__getitem__)
    hashes = [int(hashed[j]) for j in order]
    owners = [owner[j] for j in order]
    # wraparound: the stretch above the largest hash belongs to the smallest one
    hashes.append(K << channels.width)
    owners.append(owners[0])
    return HashRing(channels, K, tuple(hashes), tuple(owners))


def ring_lookup(ring: HashRing, u: int) -> int:
    if not 0 <= u < ring.span:
        raise ValueError(f"u={u} outside [0, {ring.span - 1}]")
    return ring.channel_set[ring.owners[bisect_left(ring.hashes, u)]]


def lclsh_next(ring: HashRing, shared: SharedRandomness, t: int) -> int:
    return ring_lookup(ring, shared.u(t))


class LCLSHGenerator(HopGenerator):
    """Synchronous LC-LSH hopping: slot t hops to ``ring_lookup(U(t))``."""

    def __init__(self, channels: ChannelSet, shared: SharedRandomness):
        self.channel_set = channels
        self.shared = shared
        self.ring = build_ring(channels, shared.K, shared.perm)

    def channels(self, t):
        return self.ring.lookup_array(self.shared.u_array(t))


@dataclass(frozen=True)
class Multiset:
    """The T0-slot LC-LSH preamble, kept in generation order (duplicates allowed)."""

    entries: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if not self.entries:
            raise ValueError("multiset must have T0 >= 1 entries")

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def T0(self) -> int:
        return len(self.entries)

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64 if max(self.entries) < 2**63 else object)


def build_multiset(
    channels: ChannelSet, K: int, perm: BitPermutation, shared: SharedRandomness, T0: int
) -> Multiset:
    if T0 < 1:
        raise ValueError("T0 must be >= 1")
    ring = build_ring(channels, K, perm)
    u = shared.u_array(np.arange(T0, dtype=np.int64))
    return Multiset(tuple(ring.lookup_array(u).tolist()))


def mixed_draw(x: np.ndarray, pool: np.ndarray, full: np.ndarray, p0: float) -> np.ndarray:
    """Map uniforms ``x`` to a p0 / (1 - p0) mixture of draws from ``pool`` and ``full``.

    One uniform per slot: ``x < p0`` indexes the pool, the rest of the unit
    interval indexes the full set, each uniformly.
    """
    x = np.asarray(x, dtype=np.float64)
    from_pool = x < p0
    if p0 > 0:
        i = np.minimum((x / p0 * len(pool)).astype(np.int64), len(pool) - 1)
    else:
        i = np.zeros(x.shape, dtype=np.int64)
    if p0 < 1:
        j = np.minimum(((x - p0) / (1 - p0) * len(full)).astype(np.int64), len(full) - 1)
        j = np.maximum(j, 0)
    else:
        j = np.zeros(x.shape, dtype=np.int64)
    return np.where(from_pool, pool[i], full[j])


def lclsh4_next(channels: ChannelSet, ms: Multiset, p0: float, priv: PrivateStream, t: int) -> int:
    if not 0 <= p0 <= 1:
        raise ValueError("p0 must be in [0, 1]")
    return int(mixed_draw(priv.uniform(np.array([t])), ms.array, channels.array, p0)[0])


class LCLSH4Generator(HopGenerator):
    """Asynchronous LC-LSH4: multiset with probability p0, full set otherwise."""

    def __init__(self, channels: ChannelSet, ms: Multiset, p0: float, priv: PrivateStream):
        if not 0 <= p0 <= 1:
            raise ValueError("p0 must be in [0, 1]")
        self.channel_set = channels
        self.multiset = ms
        self.p0 = p0
        self.priv = priv

    def channels(self, t):
        return mixed_draw(self.priv.uniform(t), self.multiset.array, self.channel_set.array, self.p0)


def ettr_lclsh4_approx(n1: int, n2: int, n12: int, T0: int, p0: float) -> float:
    if n12 <= 0:
        raise ValueError("n12 must be >= 1: no common channel, no rendezvous")
    if n12 > min(n1, n2) or T0 < 1 or not 0 <= p0 <= 1:
        raise ValueError("invalid arguments")
    J = jaccard(n1, n2, n12)
    return 1.0 / ((1 - p0 * p0) * n12 / (n1 * n2) + p0 * p0 * J / T0)
