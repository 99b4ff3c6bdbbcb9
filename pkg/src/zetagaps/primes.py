"""Segmented sieve of Eratosthenes and an on-disk prime cache.

Cache format: an 8-byte little-endian count followed by that many
little-endian uint64 primes.
"""

from __future__ import annotations

import logging
import math
import os
from pathlib import Path

import numpy as np

from .errors import IngestError

log = logging.getLogger(__name__)

SEGMENT = 1 << 22
_HEADER = np.dtype("<u8")


def _small_primes(limit):
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.nonzero(sieve)[0]


def primes_up_to(x):
    """All primes p <= x as uint64, sieved in segments of ``SEGMENT`` numbers."""
    x = int(x)
    if x < 2:
        return np.zeros(0, dtype=np.uint64)
    base = _small_primes(math.isqrt(x))
    if x <= SEGMENT:
        return _small_primes(x).astype(np.uint64)
    out = [base.astype(np.uint64)]
    lo = math.isqrt(x) + 1
    while lo <= x:
        hi = min(lo + SEGMENT, x + 1)
        seg = np.ones(hi - lo, dtype=bool)
        for p in base:
            start = max(p * p, -(-lo // p) * p)
            if start >= hi:
                continue
            seg[start - lo::p] = False
        out.append((np.nonzero(seg)[0] + lo).astype(np.uint64))
        lo = hi
    return np.concatenate(out)


def nth_prime_bound(k):
    """An upper bound for the k-th prime (Rosser's bound for k >= 6)."""
    if k < 6:
        return 13
    lk = math.log(k)
    return int(k * (lk + math.log(lk))) + 1


def first_primes(k):
    """The first ``k`` primes."""
    if k <= 0:
        return np.zeros(0, dtype=np.uint64)
    p = primes_up_to(nth_prime_bound(k))
    return p[:k]


def save_cache(path, primes):
    arr = np.asarray(primes, dtype="<u8")
    tmp = Path(str(path) + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(np.array([arr.size], dtype=_HEADER).tobytes())
        fh.write(arr.tobytes())
    os.replace(tmp, path)


def load_cache(path):
    data = Path(path).read_bytes()
    if len(data) < 8:
        raise IngestError(f"{path}: truncated prime cache")
    count = int(np.frombuffer(data[:8], dtype=_HEADER)[0])
    if len(data) != 8 + 8 * count:
        raise IngestError(f"{path}: header says {count} primes, file holds {(len(data) - 8) // 8}")
    return np.frombuffer(data[8:], dtype="<u8").astype(np.uint64)


class PrimeTable:
    """Growable table of the first primes, optionally backed by a cache file."""

    def __init__(self, cache_path=None):
        self.cache_path = Path(cache_path) if cache_path else None
        self._primes = np.zeros(0, dtype=np.uint64)
        if self.cache_path is not None and self.cache_path.exists():
            self._primes = load_cache(self.cache_path)

    def __len__(self):
        return int(self._primes.size)

    def first(self, k):
        if k > self._primes.size:
            log.info("sieving the first %d primes", k)
            self._primes = first_primes(max(k, 2 * self._primes.size))
            if self.cache_path is not None:
                save_cache(self.cache_path, self._primes)
        return self._primes[:k]

    def up_to(self, x):
        if self._primes.size and int(self._primes[-1]) >= x:
            return self._primes[: np.searchsorted(self._primes, x, side="right")]
        p = primes_up_to(x)
        if p.size > self._primes.size:
            self._primes = p
            if self.cache_path is not None:
                save_cache(self.cache_path, p)
        return p


_DEFAULT = None


def default_table():
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = PrimeTable(os.environ.get("ZETAGAPS_PRIME_CACHE"))
    return _DEFAULT
