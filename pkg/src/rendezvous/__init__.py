"""Channel-hopping rendezvous: consistent-hashing hop generators, bounded-MTTR
variants, enumeration-based baselines and a two-user slotted simulator."""

from .core import (
    BitPermutation,
    ChannelSet,
    DriftModel,
    PrivateStream,
    ScenarioSpec,
    SharedRandomness,
    apply_permutation,
    gen_scenario,
    jaccard,
    make_bit_permutation,
    private_stream,
)
from .lclsh import (
    HashRing,
    Multiset,
    build_multiset,
    build_ring,
    ettr_lclsh4_approx,
    lclsh4_next,
    lclsh_next,
    ring_lookup,
)
from .modclock import (
    IndexedPrimes,
    ModClockParams,
    SieveLimitError,
    mod_clock_next,
    sieve_indexed_primes,
    smallest_prime_at_least,
)
from .ternary import (
    QrParams,
    TernaryCodeword,
    asym_next,
    codeword,
    encode_4b5b,
    pairwise_property_check,
    qr_baseline_next,
    qr_lclsh4_next,
    symmetrize,
    validate_mapping,
)
from .baselines import GlobalEnumeration, lsh2_next, lsh4_next, random_next
from .sim import (
    AlgorithmConfig,
    SweepRow,
    TrialRecord,
    estimate_ettr,
    estimate_mttr,
    reference_curves,
    run_trial,
)

__version__ = "0.1.0"
