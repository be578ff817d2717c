"""Deterministic uniform random sources with indexed substreams.

Built on the counter-based Philox generator keyed by (seed, substream
index): a given pair always reproduces the same sequence, and distinct
indices give statistically independent streams.  That lets replication
chunks be farmed out to any number of workers and merged reproducibly.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

__all__ = ["UnitSampleStream"]


class UnitSampleStream:
    """Seedable uniform(0,1) source, splittable into indexed substreams.

    Streams are single-owner: do not share one instance across concurrent
    contexts; give each worker its own substream instead.  Substreams are
    flat per seed, so ``stream.substream(j)`` is the same source no matter
    which stream of that seed it was derived from.
    """

    def __init__(self, seed: int, substream_index: int = 0):
        self.seed = int(seed)
        self.substream_index = int(substream_index)
        key = np.array(
            [self.seed & _MASK64, self.substream_index & _MASK64], dtype=np.uint64
        )
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def substream(self, index: int) -> "UnitSampleStream":
        """Independent stream for the given index, fresh at its origin."""
        return UnitSampleStream(self.seed, index)

    def uniforms(self, n: int) -> np.ndarray:
        """Draw n uniforms on the open interval (0, 1).

        Exact endpoint values are remapped to the nearest representable
        interior value so -log(u) is always finite.
        """
        u = self._gen.random(int(n))
        np.copyto(u, np.nextafter(0.0, 1.0), where=u == 0.0)
        np.copyto(u, np.nextafter(1.0, 0.0), where=u == 1.0)
        return u

    def __repr__(self) -> str:
        return (
            f"UnitSampleStream(seed={self.seed}, "
            f"substream_index={self.substream_index})"
        )
