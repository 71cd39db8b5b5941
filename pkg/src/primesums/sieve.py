"""Segmented, odd-only sieve of Eratosthenes with exact prime counting.

Segments store one bit per odd integer in ``[lo, hi)``; the prime 2 is
special-cased from ``lo``.  Aligned segments can be persisted to a cache
directory (``PSA_CACHE_DIR``) in a small binary format::

    b"PSA1" | lo: u64 LE | hi: u64 LE | packed odd-index bits, LSB first
"""

from __future__ import annotations

import math
import os
import struct
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator

import numpy as np

from .errors import InvalidRange, RangeTooLarge

MAGIC = b"PSA1"
HEADER = struct.Struct("<4sQQ")
MAX_HI = 1 << 40
DEFAULT_SEGMENT_ODDS = 1 << 20
DEFAULT_MAX_SPAN = 1 << 27


def _first_odd(lo: int) -> int:
    return lo if lo & 1 else lo + 1


def _odd_count(lo: int, hi: int) -> int:
    o0 = _first_odd(lo)
    return (hi - o0 + 1) // 2 if hi > o0 else 0


def simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit as int64, by a plain full-array sieve."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


@dataclass(frozen=True)
class SieveSegment:
    """Primality of every integer in ``[lo, hi)``.

    ``bits`` is the packed odd-index bitset (bit ``i`` <-> ``first_odd + 2*i``),
    little bit order, read-only.
    """

    lo: int
    hi: int
    bits: np.ndarray = field(repr=False)

    @property
    def first_odd(self) -> int:
        return _first_odd(self.lo)

    @property
    def odd_count(self) -> int:
        return _odd_count(self.lo, self.hi)

    @property
    def has_two(self) -> bool:
        return self.lo <= 2 < self.hi

    def odd_mask(self) -> np.ndarray:
        return np.unpackbits(self.bits, count=self.odd_count, bitorder="little").astype(bool)

    def primes(self) -> np.ndarray:
        odd = self.first_odd + 2 * np.flatnonzero(self.odd_mask()).astype(np.int64)
        if self.has_two:
            return np.concatenate([np.array([2], dtype=np.int64), odd])
        return odd

    def count(self, upto: int | None = None) -> int:
        """Number of primes in the segment, optionally restricted to ``<= upto``."""
        mask = self.odd_mask()
        if upto is None:
            return int(mask.sum()) + self.has_two
        if upto < self.lo:
            return 0
        k = min(_odd_count(self.lo, upto + 1), mask.size)
        return int(mask[:k].sum()) + (self.has_two and upto >= 2)

    def is_prime(self, k: int) -> bool:
        if not self.lo <= k < self.hi:
            raise InvalidRange(f"{k} outside segment [{self.lo}, {self.hi})")
        if k == 2:
            return True
        if k % 2 == 0:
            return False
        i = (k - self.first_odd) // 2
        return bool((self.bits[i >> 3] >> (i & 7)) & 1)

    def to_bytes(self) -> bytes:
        return HEADER.pack(MAGIC, self.lo, self.hi) + self.bits.tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "SieveSegment":
        if len(data) < HEADER.size:
            raise ValueError("truncated segment file")
        magic, lo, hi = HEADER.unpack_from(data)
        if magic != MAGIC:
            raise ValueError(f"bad magic {magic!r}")
        nbytes = (_odd_count(lo, hi) + 7) // 8
        payload = data[HEADER.size :]
        if len(payload) != nbytes:
            raise ValueError("segment payload length mismatch")
        return _make_segment(lo, hi, np.frombuffer(payload, dtype=np.uint8).copy())


def _make_segment(lo: int, hi: int, bits: np.ndarray) -> SieveSegment:
    bits.flags.writeable = False
    return SieveSegment(lo, hi, bits)


@dataclass(frozen=True)
class PiCheckpoint:
    n: int
    count: int


class PrimeEngine:
    """Segment sieving, streaming and counting with optional on-disk cache.

    Aligned segments cover ``[j*S, (j+1)*S)`` with ``S = 2*segment_odds``
    (the first one starts at 2).  After a segment is visited the count of
    primes below its upper boundary is kept as a checkpoint.
    """

    def __init__(
        self,
        segment_odds: int = DEFAULT_SEGMENT_ODDS,
        max_span: int = DEFAULT_MAX_SPAN,
        cache_dir: str | os.PathLike | None = None,
        jobs: int = 1,
    ):
        if segment_odds < 2:
            raise ValueError("segment_odds must be at least 2")
        self.segment_odds = int(segment_odds)
        self.span = 2 * self.segment_odds
        self.max_span = int(max_span)
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.jobs = max(1, int(jobs))
        self._base = simple_sieve(1 << 10)[1:]  # odd base primes
        self._base_limit = 1 << 10
        self._checkpoints: dict[int, int] = {2: 0}
        self._lock = threading.Lock()

    # -- base primes -------------------------------------------------------

    def _base_primes(self, hi: int) -> np.ndarray:
        need = math.isqrt(hi - 1) if hi > 1 else 1
        with self._lock:
            if need > self._base_limit:
                limit = max(need, 2 * self._base_limit)
                self._base = simple_sieve(limit)[1:]
                self._base_limit = limit
            base = self._base
        return base[: np.searchsorted(base, need, side="right")]

    # -- sieving -----------------------------------------------------------

    def _sieve(self, lo: int, hi: int) -> SieveSegment:
        o0 = _first_odd(lo)
        count = _odd_count(lo, hi)
        mask = np.ones(count, dtype=bool)
        if count:
            for p in self._base_primes(hi).tolist():
                start = max(p * p, -(-o0 // p) * p)
                if not start & 1:
                    start += p
                if start >= hi:
                    continue
                mask[(start - o0) // 2 :: p] = False
        return _make_segment(lo, hi, np.packbits(mask, bitorder="little"))

    def sieve_range(self, lo: int, hi: int) -> SieveSegment:
        lo, hi = int(lo), int(hi)
        if lo >= hi:
            raise InvalidRange(f"empty range [{lo}, {hi})")
        if lo < 2 or hi > MAX_HI:
            raise InvalidRange(f"range [{lo}, {hi}) outside [2, 2^40]")
        if hi - lo > self.max_span:
            raise RangeTooLarge(f"span {hi - lo} exceeds segment budget {self.max_span}")
        return self._sieve(lo, hi)

    # -- aligned segments and cache ---------------------------------------

    def _bounds(self, j: int) -> tuple[int, int]:
        return max(2, j * self.span), (j + 1) * self.span

    def _cache_path(self, lo: int, hi: int) -> Path:
        return self.cache_dir / f"seg_{lo}_{hi}.psa"

    def write_cache(self, seg: SieveSegment) -> Path:
        path = self._cache_path(seg.lo, seg.hi)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(f".tmp{os.getpid()}.{threading.get_ident()}")
        tmp.write_bytes(seg.to_bytes())
        os.replace(tmp, path)
        return path

    def read_cache(self, lo: int, hi: int) -> SieveSegment | None:
        if self.cache_dir is None:
            return None
        path = self._cache_path(lo, hi)
        try:
            seg = SieveSegment.from_bytes(path.read_bytes())
        except (OSError, ValueError):
            return None
        return seg if (seg.lo, seg.hi) == (lo, hi) else None

    def segment(self, j: int) -> SieveSegment:
        """The j-th aligned segment, from cache when possible."""
        lo, hi = self._bounds(j)
        seg = self.read_cache(lo, hi)
        if seg is None:
            seg = self._sieve(lo, hi)
            if self.cache_dir is not None:
                self.write_cache(seg)
        return seg

    def _segments(self, j0: int, j1: int) -> Iterator[SieveSegment]:
        """Aligned segments j0..j1-1 in ascending order."""
        if self.jobs == 1 or j1 - j0 < 2:
            for j in range(j0, j1):
                yield self.segment(j)
            return
        with ThreadPoolExecutor(self.jobs) as pool:
            for start in range(j0, j1, self.jobs):
                yield from pool.map(self.segment, range(start, min(start + self.jobs, j1)))

    # -- counting and streaming -------------------------------------------

    def checkpoints(self) -> list[PiCheckpoint]:
        """Known values of pi(b - 1) at segment boundaries b."""
        with self._lock:
            items = sorted(self._checkpoints.items())
        return [PiCheckpoint(b - 1, c) for b, c in items]

    def _record(self, boundary: int, count: int) -> None:
        with self._lock:
            self._checkpoints[boundary] = count

    def prime_count(self, n: int) -> int:
        """Exact pi(n)."""
        n = int(n)
        if n < 2:
            raise InvalidRange(f"n must be >= 2, got {n}")
        if n >= MAX_HI:
            raise InvalidRange(f"n must be < 2^40, got {n}")
        j_last = n // self.span
        with self._lock:
            known = [b for b in self._checkpoints if b <= j_last * self.span or b == 2]
            b = max(known)
            count = self._checkpoints[b]
        j0 = 0 if b == 2 else b // self.span
        for seg in self._segments(j0, j_last):
            count += seg.count()
            self._record(seg.hi, count)
        return count + self.segment(j_last).count(upto=n)

    def segments_upto(self, n: int) -> Iterator[SieveSegment]:
        """Aligned segments covering [2, n], ascending; the last may extend past n."""
        n = int(n)
        if n < 2:
            raise InvalidRange(f"n must be >= 2, got {n}")
        return self._segments(0, n // self.span + 1)

    def iter_prime_arrays(self, n: int) -> Iterator[np.ndarray]:
        """Yield int64 arrays of the primes <= n, one per segment, ascending."""
        n = int(n)
        if n < 2:
            raise InvalidRange(f"n must be >= 2, got {n}")
        j_last = n // self.span
        count = 0
        for seg in self._segments(0, j_last + 1):
            primes = seg.primes()
            if seg.hi > n + 1:
                primes = primes[: np.searchsorted(primes, n, side="right")]
            else:
                self._record(seg.hi, count + primes.size)
            count += primes.size
            yield primes

    def stream_primes(self, n: int, visitor: Callable[[int], object]) -> None:
        """Call ``visitor(p)`` for every prime p <= n in increasing order."""
        for arr in self.iter_prime_arrays(n):
            for p in arr.tolist():
                visitor(p)


_engine: PrimeEngine | None = None


def default_engine() -> PrimeEngine:
    """Process-wide engine; rebuilt if PSA_CACHE_DIR changes."""
    global _engine
    cache = os.environ.get("PSA_CACHE_DIR") or None
    current = str(_engine.cache_dir) if _engine and _engine.cache_dir else None
    if _engine is None or current != (str(Path(cache)) if cache else None):
        _engine = PrimeEngine(cache_dir=cache)
    return _engine


def sieve_range(lo: int, hi: int) -> SieveSegment:
    return default_engine().sieve_range(lo, hi)


def prime_count(n: int) -> int:
    return default_engine().prime_count(n)


def stream_primes(n: int, visitor: Callable[[int], object]) -> None:
    default_engine().stream_primes(n, visitor)


def iter_prime_arrays(n: int) -> Iterator[np.ndarray]:
    return default_engine().iter_prime_arrays(n)
