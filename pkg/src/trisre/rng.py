"""Reproducible random streams.

Built on numpy's counter-based Philox generator: the pair (seed, stream_id)
is the full key, so a stream can be reconstructed anywhere and substreams
can be assigned to work chunks independently of how many workers run them.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

_GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    # Standard splitmix64 finalizer; decorrelates nearby stream ids.
    x = (x + _GOLDEN) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return (x ^ (x >> 31)) & _MASK


class RngStream:
    """A named, reconstructible random stream.

    Two instances with the same (seed, stream_id) yield bit-identical
    sample sequences; distinct stream_ids give statistically independent
    streams. The underlying generator is created lazily and advances as
    it is consumed.
    """

    __slots__ = ("seed", "stream_id", "_gen")

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & _MASK
        self.stream_id = int(stream_id) & _MASK
        self._gen: np.random.Generator | None = None

    @property
    def gen(self) -> np.random.Generator:
        if self._gen is None:
            key = np.array([self.seed, self.stream_id], dtype=np.uint64)
            self._gen = np.random.Generator(np.random.Philox(key=key))
        return self._gen

    def substream(self, index: int) -> "RngStream":
        """Derive an independent child stream; deterministic in index."""
        child = _splitmix64(self.stream_id ^ _splitmix64(index & _MASK))
        return RngStream(self.seed, child)

    def describe(self) -> str:
        return f"seed={self.seed},stream={self.stream_id}"

    def __repr__(self) -> str:  # pragma: no cover
        return f"RngStream({self.describe()})"


def default_workers() -> int:
    env = os.environ.get("TRISRE_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


_CHUNK_TAG = 0x43484B53  # namespaces internal chunk streams away from
                         # any small-index substream the caller derives


def map_chunks(total: int, chunk: int, fn, rng: RngStream, workers: int | None = None):
    """Run fn(chunk_size, substream) over `total` items in chunks.

    Chunk i always receives the same derived stream whatever the worker
    count, so results are reproducible and order-independent. Returns the
    per-chunk results in chunk order.
    """
    sizes = []
    left = total
    while left > 0:
        m = min(chunk, left)
        sizes.append(m)
        left -= m
    base = rng.substream(_CHUNK_TAG)
    if workers is None:
        workers = default_workers()
    if workers <= 1 or len(sizes) <= 1:
        return [fn(m, base.substream(i)) for i, m in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futs = [pool.submit(fn, m, base.substream(i))
                for i, m in enumerate(sizes)]
        return [f.result() for f in futs]
