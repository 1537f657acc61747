"""Deterministic random-number plumbing.

Every stochastic component in this package draws from a stream keyed by
``(seed, stream_index, *tags)``.  The key is hashed (splitmix64) into a full
PCG64 state, so a given key always yields the same draws, independent of how
many other keys were consumed before it.  This is what makes paths
reproducible bit-for-bit and lets several coupled processes read the *same*
underlying randomness.

The planar Poisson sheet realizes a unit-rate Poisson random measure on
``(0, horizon] x [0, cover)``.  It is generated lazily in horizontal bands,
each band keyed independently, so two simulations sharing a stream see
identical points no matter how high their intensities reach.  Thinning a
process against the sheet therefore couples it pathwise with every other
process thinned against the same stream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

# Tag namespaces.  The first tag of a key says what the draws are for, so
# independent consumers of one stream can never collide.
PLANAR_TAG = 0
CLAIMS_TAG = 1
SIMPLEX_TAG = 2
INNER_CLAIMS_TAG = 3
BOUND_CLAIMS_TAG = 4
GENERIC_TAG = 5


def _pcg_state(key: tuple[int, ...]) -> dict:
    """Hash a key tuple into a full PCG64 state dict (splitmix64 chain)."""
    acc = 0
    # fold the length first so keys of different arity never collide
    for part in (len(key), *key):
        acc = ((acc ^ (part & _MASK64)) + _GAMMA) & _MASK64
        acc = ((acc ^ (acc >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        acc = ((acc ^ (acc >> 27)) * 0x94D049BB133111EB) & _MASK64
        acc ^= acc >> 31
    # four squeezes give the 256 bits of PCG64 state
    words = []
    for _ in range(4):
        acc = (acc + _GAMMA) & _MASK64
        z = ((acc ^ (acc >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        words.append(z ^ (z >> 31))
    return {
        "bit_generator": "PCG64",
        "state": {
            "state": (words[0] << 64) | words[1],
            "inc": ((words[2] << 64) | words[3]) | 1,
        },
        "has_uint32": 0,
        "uinteger": 0,
    }


@dataclass(frozen=True)
class RngStream:
    """Addressable randomness: a 64-bit seed plus a path counter.

    Identical ``(seed, stream_index)`` pairs reproduce identical draws across
    runs and across processes.  ``child`` derives sub-streams for nested
    loops (term index, sample index, ...) without risk of overlap.
    """

    seed: int
    stream_index: int = 0
    lineage: tuple[int, ...] = ()

    def key(self, *tags: int) -> tuple[int, ...]:
        return (self.seed & _MASK64, self.stream_index, *self.lineage, *tags)

    def child(self, *indices: int) -> "RngStream":
        return RngStream(self.seed, self.stream_index, self.lineage + indices)

    def generator(self, *tags: int) -> np.random.Generator:
        """A fresh caller-owned generator bound to ``(stream, tags)``."""
        bitgen = np.random.PCG64(0)
        bitgen.state = _pcg_state(self.key(*tags))
        return np.random.Generator(bitgen)


class KeyedGenerator:
    """Reusable generator for hot loops.

    ``reset`` rebinds the underlying PCG64 to a key-derived state, an order
    of magnitude cheaper than constructing a fresh ``Generator``.  A
    consumer must draw everything it needs for one key in a single
    straight-line block; the state is rederived from scratch on every
    reset, so interleaved resets by other consumers are harmless.
    """

    __slots__ = ("_bitgen", "_template", "generator")

    def __init__(self) -> None:
        self._bitgen = np.random.PCG64(0)
        self.generator = np.random.Generator(self._bitgen)
        self._template = self._bitgen.state

    def reset(self, stream: RngStream, *tags: int) -> np.random.Generator:
        template = self._template
        fresh = _pcg_state(stream.key(*tags))
        template["state"] = fresh["state"]
        template["has_uint32"] = 0
        template["uinteger"] = 0
        self._bitgen.state = template
        return self.generator


class PoissonSheet:
    """Unit-rate planar Poisson points over ``(0, horizon] x [0, cover)``.

    Bands of height ``BAND`` are materialized on demand; band ``b`` is a
    deterministic function of ``(stream, PLANAR_TAG, b)``.  ``times`` and
    ``thetas`` hold all materialized points sorted by time.
    """

    BAND = 8.0

    __slots__ = ("stream", "horizon", "cover", "times", "thetas", "_scratch", "_n_bands")

    def __init__(self, stream: RngStream, horizon: float,
                 scratch: KeyedGenerator | None = None) -> None:
        self.stream = stream
        self.horizon = horizon
        self.cover = 0.0
        self._n_bands = 0
        self.times = np.empty(0)
        self.thetas = np.empty(0)
        self._scratch = scratch if scratch is not None else KeyedGenerator()

    def ensure(self, ceiling: float) -> None:
        """Materialize bands until the sheet covers ``[0, ceiling)``."""
        if ceiling <= self.cover:
            return
        first = self._n_bands == 0
        new_t = [] if first else [self.times]
        new_th = [] if first else [self.thetas]
        while self.cover < ceiling:
            band = self._n_bands
            gen = self._scratch.reset(self.stream, PLANAR_TAG, band)
            count = int(gen.poisson(self.BAND * self.horizon))
            # 1 - U keeps times strictly inside (0, horizon].
            t = (1.0 - gen.random(count)) * self.horizon
            th = (band + gen.random(count)) * self.BAND
            new_t.append(t)
            new_th.append(th)
            self._n_bands += 1
            self.cover = self._n_bands * self.BAND
        times = new_t[0] if len(new_t) == 1 else np.concatenate(new_t)
        thetas = new_th[0] if len(new_th) == 1 else np.concatenate(new_th)
        order = np.argsort(times, kind="stable")
        self.times = times[order]
        self.thetas = thetas[order]
