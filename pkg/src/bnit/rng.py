"""Counter-based, splittable random number state.

All sampling in bnit is a pure function of (inputs, RngState).  An RngState is
a (seed, stream) pair feeding a Philox counter-based bit generator, so the
draw sequence is fully determined by (seed, stream, draw-index) and disjoint
streams can be consumed in parallel without coordination.

Stream ids for parallel work (e.g. power-sweep trials) are derived by hashing
a label path with BLAKE2b, so any (cell, trial) can be regenerated in
isolation without running the rest of the sweep.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_stream(*parts) -> int:
    """Derive a 64-bit stream id from an arbitrary label path.

    Parts are canonicalized with repr() and joined with an unambiguous
    separator before hashing, so ("a", 1) and ("a1",) differ.
    """
    label = "\x1f".join(repr(p) for p in parts)
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@dataclass(frozen=True)
class RngState:
    """Seed + stream id pair; identical pairs yield identical sample streams."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        """A fresh Generator positioned at the start of this stream."""
        key = np.array([self.seed & _MASK64, self.stream & _MASK64],
                       dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def split(self, *parts) -> "RngState":
        """Child state on an independent stream labelled by `parts`.

        The child stream id mixes the current stream with the label, so
        distinct paths from distinct parents never collide by construction
        (up to hash collisions in a 64-bit space).
        """
        return RngState(self.seed, derive_stream(self.stream, *parts))
