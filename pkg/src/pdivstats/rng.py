"""Per-trial random streams.

Trial ``i`` of a run with seed ``s`` reads the Philox4x64-10 stream keyed by
``SeedSequence(s)`` with counter ``(0, 0, i, 0)``.  Streams of distinct
trials never overlap, so results do not depend on how trials are sharded
across workers.  The compiled kernels regenerate the same words in place.
"""

from __future__ import annotations

import functools

import numpy as np

_TWO64 = 1 << 64


@functools.lru_cache(maxsize=256)
def stream_key(seed: int) -> tuple[int, int]:
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    k = np.random.SeedSequence(int(seed)).generate_state(2, dtype=np.uint64)
    return int(k[0]), int(k[1])


def rng_stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for trial ``index`` of a run seeded by ``seed``."""
    if not 0 <= index < _TWO64:
        raise ValueError("trial index out of range")
    key = np.array(stream_key(seed), dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=[0, 0, index, 0]))


def reject_threshold(q: int) -> int:
    """Words >= this value are rejected when reducing mod q (0 means accept all)."""
    r = _TWO64 % q
    return 0 if r == 0 else _TWO64 - r


def draw_codes(rng: np.random.Generator, q: int, count: int) -> np.ndarray:
    """``count`` uniform codes in [0, q), consuming raw 64-bit words in order.

    A word at or above :func:`reject_threshold` is skipped, exactly as the
    compiled kernels do, so both paths agree on any stream.
    """
    thr = reject_threshold(q)
    raw = rng.bit_generator.random_raw
    words = np.asarray(raw(count), dtype=np.uint64)
    if thr:
        bad = words >= np.uint64(thr)
        while bad.any():
            keep = words[~bad]
            more = np.asarray(raw(count - keep.size), dtype=np.uint64)
            words = np.concatenate([keep, more])
            bad = words >= np.uint64(thr)
    return (words % np.uint64(q)).astype(np.int64)
