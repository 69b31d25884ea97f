import numpy as np
import pytest

from rendezvous.core import (
    BitPermutation,
    ChannelSet,
    ScenarioSpec,
    SharedRandomness,
    gen_scenario,
    jaccard,
    make_bit_permutation,
    private_stream,
)
from rendezvous.lclsh import (
    LCLSHGenerator,
    Multiset,
    build_multiset,
    build_ring,
    ettr_lclsh4_approx,
    lclsh4_next,
    lclsh_next,
    mixed_draw,
    ring_lookup,
)

# worked example: three 7-bit channels, K = 2, right-rotation hash
F = (0b0110101, 0b1010010, 0b1100101)
EXAMPLE_SET = ChannelSet(F, 7)
ROT = BitPermutation.rotation(8, 7)


class FixedU:
    """Shared randomness with a hand-specified U sequence."""

    def __init__(self, values, perm, K=2):
        self.values = values
        self.perm = perm
        self.K = K

    def u(self, t):
        return self.values[t]

    def u_array(self, t):
        return np.array([self.values[i] for i in np.asarray(t)], dtype=np.int64)


def linear_scan(channels, K, perm, u):
    """Interval-partition oracle: scan every virtual frequency for the nearest hash >= u."""
    from rendezvous.core import apply_permutation

    w = perm.width
    log_k = K.bit_length() - 1
    best = None
    smallest = None
    for i, c in enumerate(channels):
        for k in range(K):
            h = apply_permutation((c << log_k) | k, perm)
            if smallest is None or h < smallest[0]:
                smallest = (h, i)
            if h >= u and (best is None or h < best[0]):
                best = (h, i)
    return channels[(best or smallest)[1]]


class TestExampleOne:
    def test_ring_points(self):
        ring = build_ring(EXAMPLE_SET, 2, ROT)
        assert ring.points == [(53, 0), (82, 1), (101, 2), (181, 0), (210, 1), (229, 2), (256, 0)]

    @pytest.mark.parametrize("u, owner", [(66, 1), (134, 0), (245, 0)])
    def test_lookups(self, u, owner):
        ring = build_ring(EXAMPLE_SET, 2, ROT)
        assert ring_lookup(ring, u) == F[owner]

    def test_lclsh_sequence(self):
        ring = build_ring(EXAMPLE_SET, 2, ROT)
        shared = FixedU([66, 134, 245], ROT)
        assert [lclsh_next(ring, shared, t) for t in range(3)] == [F[1], F[0], F[0]]

    def test_multiset(self):
        ms = build_multiset(EXAMPLE_SET, 2, ROT, FixedU([66, 134, 245], ROT), 3)
        assert ms.entries == (F[1], F[0], F[0])

    def test_owner_measure(self):
        ring = build_ring(EXAMPLE_SET, 2, ROT)
        # f0 owns [0,53] + [102,181] + [230,255]; the measure sums to the ring size
        assert ring.owner_measure() == {0: 54 + 80 + 26, 1: 29 + 29, 2: 19 + 19}
        assert sum(ring.owner_measure().values()) == 256


class TestRing:
    def test_single_channel(self):
        ring = build_ring(ChannelSet((5,), 3), 1, BitPermutation.identity(3))
        assert ring.points == [(5, 0), (8, 0)]
        assert all(ring_lookup(ring, u) == 5 for u in range(8))

    def test_width_mismatch(self):
        with pytest.raises(ValueError):
            build_ring(EXAMPLE_SET, 4, ROT)

    def test_u_range(self):
        ring = build_ring(EXAMPLE_SET, 2, ROT)
        with pytest.raises(ValueError):
            ring_lookup(ring, 256)
        with pytest.raises(ValueError):
            ring_lookup(ring, -1)

    def test_u_zero_is_smallest_owner(self):
        ring = build_ring(EXAMPLE_SET, 2, ROT)
        assert ring_lookup(ring, 0) == F[ring.owners[0]]

    @pytest.mark.parametrize("K", [1, 2, 4])
    def test_matches_linear_scan_exhaustively(self, K):
        rng = np.random.default_rng(K)
        for trial in range(10):
            n = int(rng.integers(1, 17))
            chans = tuple(int(x) for x in rng.choice(16, size=n, replace=False))
            perm = make_bit_permutation(trial, 4 + K.bit_length() - 1)
            ring = build_ring(ChannelSet(chans, 4), K, perm)
            assert len(ring.points) == K * n + 1
            assert len(set(ring.hashes)) == K * n + 1
            for u in range(K * 16):
                assert ring_lookup(ring, u) == linear_scan(chans, K, perm, u)
            arr = ring.lookup_array(np.arange(K * 16))
            assert arr.tolist() == [ring_lookup(ring, u) for u in range(K * 16)]

    def test_each_channel_owns_k_points(self):
        chans = ChannelSet(tuple(range(0, 200, 7)), 8)
        ring = build_ring(chans, 8, make_bit_permutation(1, 11))
        counts = np.bincount(ring.owners[:-1], minlength=len(chans))
        assert (counts == 8).all()
        assert ring.owners[-1] == ring.owners[0]

    def test_owner_measure_is_selection_probability(self):
        chans = ChannelSet((1, 4, 9, 12, 15), 4)
        perm = make_bit_permutation(5, 6)
        ring = build_ring(chans, 4, perm)
        picks = np.bincount([chans.array.tolist().index(ring_lookup(ring, u)) for u in range(64)], minlength=5)
        assert picks.tolist() == [ring.owner_measure()[i] for i in range(5)]

    def test_wide_ids(self):
        chans = ChannelSet((2**64 - 1, 12345, 2**63), 64)
        sh = SharedRandomness(3, 64, 4)
        ring = build_ring(chans, 4, sh.perm)
        assert all(lclsh_next(ring, sh, t) in chans for t in range(50))


class TestCoupling:
    def test_identical_sets_identical_sequences(self):
        sh = SharedRandomness(42, 8, 4)
        a, _ = gen_scenario(ScenarioSpec(8, 60, 60, 60, seed=3))
        b = ChannelSet(tuple(reversed(a.ids)), 8)
        assert LCLSHGenerator(a, sh).sequence(500) == LCLSHGenerator(b, sh).sequence(500)

    def test_disjoint_never_match(self):
        sh = SharedRandomness(42, 8, 4)
        a = ChannelSet(tuple(range(0, 100, 2)), 8)
        b = ChannelSet(tuple(range(1, 100, 2)), 8)
        sa = np.array(LCLSHGenerator(a, sh).sequence(5000))
        sb = np.array(LCLSHGenerator(b, sh).sequence(5000))
        assert not (sa == sb).any()

    @pytest.mark.parametrize("K", [2, 4, 8, 16])
    def test_match_probability_near_jaccard(self, K):
        # 10^5 slots spread over 100 independent scenarios and public constants
        t = np.arange(1000)
        hits = 0
        for s in range(100):
            a, b = gen_scenario(ScenarioSpec(8, 60, 60, 30, seed=K * 1000 + s))
            sh = SharedRandomness(K * 1000 + s, 8, K)
            hits += int((LCLSHGenerator(a, sh).channels(t) == LCLSHGenerator(b, sh).channels(t)).sum())
        assert abs(hits / 100_000 - jaccard(60, 60, 30)) < 0.05

    def test_identical_multisets(self):
        sh = SharedRandomness(8, 8, 4)
        a, b = gen_scenario(ScenarioSpec(8, 60, 60, 60, seed=1))
        ma = build_multiset(a, 4, sh.perm, sh, 20)
        mb = build_multiset(b, 4, sh.perm, sh, 20)
        assert ma == mb and len(ma) == 20


class TestMixedStrategy:
    def test_constant_multiset(self):
        chans = ChannelSet((3, 5, 7), 4)
        ms = Multiset((5,) * 20)
        priv = private_stream(1, 1, 0)
        assert {lclsh4_next(chans, ms, 1.0, priv, t) for t in range(200)} == {5}

    def test_p0_zero_uniform(self):
        chans = ChannelSet(tuple(range(60)), 8)
        x = private_stream(2, 1, 0).uniform(np.arange(100_000))
        out = mixed_draw(x, np.array([0] * 20), chans.array, 0.0)
        counts = np.bincount(out, minlength=60)
        expected = 100_000 / 60
        sigma = np.sqrt(expected * (1 - 1 / 60))
        assert (np.abs(counts - expected) < 4 * sigma).all()

    def test_mixture_probability(self):
        chans = ChannelSet(tuple(range(60)), 8)
        ms = Multiset((0,) * 10 + tuple(range(1, 11)))
        x = private_stream(3, 1, 0).uniform(np.arange(100_000))
        p = float((mixed_draw(x, ms.array, chans.array, 0.75) == 0).mean())
        want = 0.75 * 10 / 20 + 0.25 / 60
        assert want == pytest.approx(0.3792, abs=1e-4)
        assert abs(p - want) < 3 * np.sqrt(want * (1 - want) / 100_000)

    def test_bad_p0(self):
        with pytest.raises(ValueError):
            lclsh4_next(EXAMPLE_SET, Multiset((F[0],)), 1.5, private_stream(1, 1, 1), 0)


class TestApprox:
    def test_full_overlap(self):
        assert ettr_lclsh4_approx(60, 60, 60, 20, 0.75) == pytest.approx(28.235, abs=1e-3)

    def test_one_third(self):
        assert ettr_lclsh4_approx(60, 60, 30, 20, 0.75) == pytest.approx(76.8, abs=1e-9)

    def test_p0_zero_is_random(self):
        assert ettr_lclsh4_approx(60, 50, 20, 20, 0.0) == pytest.approx(60 * 50 / 20)

    def test_no_overlap(self):
        with pytest.raises(ValueError):
            ettr_lclsh4_approx(60, 60, 0, 20, 0.75)
