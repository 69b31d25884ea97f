"""Channel identifiers, bit permutations, randomness streams and scenarios.

Channel IDs are plain ``int`` values below ``2**L``; a :class:`ChannelSet`
carries the bit width and validates its members.  Bit strings use the
left-to-right convention: position 0 is the most significant bit.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

MAX_WIDTH = 64

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO_53 = 2.0**-53


def _mix64(z: np.ndarray) -> np.ndarray:
    # splitmix64 finaliser; uint64 arithmetic wraps
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def derive_key(*words: int) -> int:
    """Collapse a tuple of non-negative integers into one 64-bit stream key."""
    ss = np.random.SeedSequence([int(w) for w in words])
    return int(ss.generate_state(1, np.uint64)[0])


class CounterStream:
    """Counter-mode generator: the value at index ``t`` depends only on (key, t)."""

    __slots__ = ("key",)

    def __init__(self, key: int):
        self.key = int(key) & 0xFFFFFFFFFFFFFFFF

    def bits(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.key) + (t + np.uint64(1)) * _GAMMA
            return _mix64(z)

    def uniform(self, t) -> np.ndarray:
        """Doubles in [0, 1)."""
        return (self.bits(t) >> np.uint64(11)).astype(np.float64) * _TWO_53

    def integers(self, t, high: int) -> np.ndarray:
        """Integers uniform on [0, high)."""
        if high < 1:
            raise ValueError("high must be >= 1")
        out = np.floor(self.uniform(t) * high).astype(np.int64)
        return np.minimum(out, high - 1)

    def __eq__(self, other):
        return isinstance(other, CounterStream) and other.key == self.key

    def __hash__(self):
        return hash(("CounterStream", self.key))

    def __repr__(self):
        return f"CounterStream(key={self.key:#018x})"


@dataclass(frozen=True)
class ChannelSet:
    """An ordered set of distinct L-bit channel IDs (f_0 ... f_{n-1})."""

    ids: tuple[int, ...]
    width: int

    def __post_init__(self):
        ids = tuple(int(c) for c in self.ids)
        object.__setattr__(self, "ids", ids)
        if not 1 <= self.width <= MAX_WIDTH:
            raise ValueError(f"width must be in [1, {MAX_WIDTH}], got {self.width}")
        if not ids:
            raise ValueError("a channel set needs at least one channel")
        if len(set(ids)) != len(ids):
            raise ValueError("channel IDs must be pairwise distinct")
        limit = 1 << self.width
        for c in ids:
            if not 0 <= c < limit:
                raise ValueError(f"channel {c} does not fit in {self.width} bits")

    def __len__(self) -> int:
        return len(self.ids)

    def __getitem__(self, i: int) -> int:
        return self.ids[i]

    def __iter__(self):
        return iter(self.ids)

    def __contains__(self, c) -> bool:
        return c in self._members

    @cached_property
    def _members(self) -> frozenset:
        return frozenset(self.ids)

    @cached_property
    def array(self) -> np.ndarray:
        dtype = np.int64 if self.width <= 63 else object
        return np.array(self.ids, dtype=dtype)

    def intersection(self, other: "ChannelSet") -> set[int]:
        return self._members & other._members


def jaccard(n1: int, n2: int, n12: int) -> float:
    return n12 / (n1 + n2 - n12)


# -- bit permutations -------------------------------------------------------


@dataclass(frozen=True)
class BitPermutation:
    """A bijection ``sigma`` on bit positions; output bit j = input bit sigma[j]."""

    sigma: tuple[int, ...]

    def __post_init__(self):
        sigma = tuple(int(s) for s in self.sigma)
        object.__setattr__(self, "sigma", sigma)
        if not sigma:
            raise ValueError("permutation width must be >= 1")
        if sorted(sigma) != list(range(len(sigma))):
            raise ValueError("sigma is not a bijection on {0..width-1}")

    @property
    def width(self) -> int:
        return len(self.sigma)

    @classmethod
    def identity(cls, width: int) -> "BitPermutation":
        return cls(tuple(range(width)))

    @classmethod
    def rotation(cls, width: int, shift: int) -> "BitPermutation":
        """sigma(j) = (j + shift) mod width."""
        return cls(tuple((j + shift) % width for j in range(width)))

    def inverse(self) -> "BitPermutation":
        inv = [0] * self.width
        for j, s in enumerate(self.sigma):
            inv[s] = j
        return BitPermutation(tuple(inv))


def make_bit_permutation(seed: int, width: int) -> BitPermutation:
    if width < 1:
        raise ValueError("width must be >= 1")
    rng = np.random.default_rng(seed)
    return BitPermutation(tuple(int(s) for s in rng.permutation(width)))


def apply_permutation(bits: int, perm: BitPermutation) -> int:
    w = perm.width
    if not 0 <= bits < (1 << w):
        raise ValueError(f"{bits} does not fit in {w} bits")
    out = 0
    for j, s in enumerate(perm.sigma):
        out |= ((bits >> (w - 1 - s)) & 1) << (w - 1 - j)
    return out


def permute_bits(values: np.ndarray, perm: BitPermutation) -> np.ndarray:
    """Vectorised :func:`apply_permutation` over an integer array."""
    w = perm.width
    if w > 62:
        return np.array([apply_permutation(int(v), perm) for v in values], dtype=object)
    values = np.asarray(values, dtype=np.int64)
    out = np.zeros_like(values)
    for j, s in enumerate(perm.sigma):
        out |= ((values >> (w - 1 - s)) & 1) << (w - 1 - j)
    return out


# -- randomness -------------------------------------------------------------


class SharedRandomness:
    """Public constants both users agree on: the permutation and the U(t) stream.

    ``U(t)`` is uniform on ``[0, K * 2**L)``.  Because the range is a power of
    two, taking the low bits of a 64-bit counter output is unbiased.
    """

    def __init__(self, seed: int, L: int, K: int = 4):
        if K < 1 or K & (K - 1):
            raise ValueError(f"K must be a power of two, got {K}")
        if not 1 <= L <= MAX_WIDTH:
            raise ValueError(f"L must be in [1, {MAX_WIDTH}]")
        self.seed = int(seed)
        self.L = L
        self.K = K
        self.width = L + K.bit_length() - 1
        self._lo = CounterStream(derive_key(self.seed, 0x55))
        self._hi = CounterStream(derive_key(self.seed, 0xAA))

    @property
    def span(self) -> int:
        return self.K << self.L

    @cached_property
    def perm(self) -> BitPermutation:
        return make_bit_permutation(derive_key(self.seed, 0x50), self.width)

    def u(self, t: int) -> int:
        return int(self.u_array(np.array([t]))[0])

    def u_array(self, t) -> np.ndarray:
        t = np.asarray(t)
        lo = self._lo.bits(t)
        if self.width <= 63:
            return (lo & np.uint64((1 << self.width) - 1)).astype(np.int64)
        if self.width == 64:
            return np.array([int(v) for v in lo], dtype=object)
        hi = self._hi.bits(t) & np.uint64((1 << (self.width - 64)) - 1)
        return np.array([(int(h) << 64) | int(v) for h, v in zip(hi, lo)], dtype=object)


@dataclass(frozen=True)
class PrivateStream:
    """Randomness owned by one user in one trial.

    ``slot`` is a counter stream indexed by local slot; ``setup()`` gives a
    fresh generator for one-off parameter draws (slopes, biases, IDs).
    """

    global_seed: int
    user_id: int
    trial_index: int
    slot: CounterStream = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        key = derive_key(self.global_seed, self.user_id, self.trial_index, 1)
        object.__setattr__(self, "slot", CounterStream(key))

    def setup(self) -> np.random.Generator:
        return np.random.default_rng([self.global_seed, self.user_id, self.trial_index, 2])

    def uniform(self, t) -> np.ndarray:
        return self.slot.uniform(t)

    def integers(self, t, high: int) -> np.ndarray:
        return self.slot.integers(t, high)


def private_stream(global_seed: int, user_id: int, trial_index: int) -> PrivateStream:
    return PrivateStream(int(global_seed), int(user_id), int(trial_index))


# -- scenarios --------------------------------------------------------------


@dataclass(frozen=True)
class DriftModel:
    """Integer slot offset between the users' clocks; ``max_offset=0`` is sync."""

    max_offset: int = 0

    def __post_init__(self):
        if self.max_offset < 0:
            raise ValueError("max_offset must be >= 0")

    @classmethod
    def sync(cls) -> "DriftModel":
        return cls(0)

    @classmethod
    def uniform(cls, max_offset: int = 999) -> "DriftModel":
        return cls(max_offset)

    @property
    def is_sync(self) -> bool:
        return self.max_offset == 0

    def sample(self, rng: random.Random) -> int:
        return rng.randint(0, self.max_offset) if self.max_offset else 0

    def __str__(self):
        return "sync" if self.is_sync else f"async({self.max_offset})"


@dataclass(frozen=True)
class ScenarioSpec:
    L: int
    n1: int
    n2: int
    n12: int
    seed: int = 0
    drift: DriftModel = DriftModel()
    horizon: int = 10_000

    def __post_init__(self):
        if not 1 <= self.L <= MAX_WIDTH:
            raise ValueError(f"L must be in [1, {MAX_WIDTH}]")
        if min(self.n1, self.n2) < 1:
            raise ValueError("channel sets must be non-empty")
        if not 1 <= self.n12 <= min(self.n1, self.n2):
            raise ValueError("need 1 <= n12 <= min(n1, n2)")
        if self.n1 + self.n2 - self.n12 > (1 << self.L):
            raise ValueError(f"{self.n1 + self.n2 - self.n12} channels do not fit in {self.L} bits")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")

    @property
    def jaccard(self) -> float:
        return jaccard(self.n1, self.n2, self.n12)


def gen_scenario(spec: ScenarioSpec) -> tuple[ChannelSet, ChannelSet]:
    """Draw two available channel sets with exactly ``n12`` shared channels.

    The union is sampled uniformly without replacement from all L-bit IDs;
    each set's internal order is then shuffled.
    """
    rng = random.Random(spec.seed)
    total = spec.n1 + spec.n2 - spec.n12
    ids = rng.sample(range(1 << spec.L), total)
    common = ids[: spec.n12]
    f1 = common + ids[spec.n12 : spec.n1]
    f2 = common + ids[spec.n1 :]
    rng.shuffle(f1)
    rng.shuffle(f2)
    return ChannelSet(tuple(f1), spec.L), ChannelSet(tuple(f2), spec.L)


def log2_exact(k: int) -> int:
    if k < 1 or k & (k - 1):
        raise ValueError(f"{k} is not a power of two")
    return k.bit_length() - 1


def ceil_div_threshold(n: int, p0: float) -> int:
    """ceil(n / (1 - p0)), computed so that exact quotients are not bumped up."""
    if not 0 <= p0 < 1:
        raise ValueError("p0 must be in [0, 1) for clock-based algorithms")
    q = n / (1 - p0)
    r = round(q)
    return r if math.isclose(q, r, rel_tol=1e-12) else math.ceil(q)


class HopGenerator:
    """Deterministic map from a user's local slot index to a channel ID.

    Subclasses implement :meth:`channels`, vectorised over an array of slot
    indices.  Every generator in this package is a pure function of the slot
    index, so slots can be evaluated in any order or chunking.
    """

    channel_set: ChannelSet

    def channels(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t: int) -> int:
        return int(self.channels(np.array([t], dtype=np.int64))[0])

    def sequence(self, length: int, start: int = 0) -> list[int]:
        return [int(c) for c in self.channels(np.arange(start, start + length, dtype=np.int64))]
