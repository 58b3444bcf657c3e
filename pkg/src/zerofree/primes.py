"""Prime tables: sieving, range selection and log phases."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidArgument, RangeExceedsTable

SEGMENT_THRESHOLD = 10**7
SEGMENT_SIZE = 1 << 22
CACHE_ENV = "ZEROFREE_PRIME_CACHE"


def _simple_sieve(limit: int) -> np.ndarray:
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _segmented_sieve(limit: int, segment: int = SEGMENT_SIZE) -> np.ndarray:
    base = _simple_sieve(math.isqrt(limit) + 1)
    chunks = [base[base <= limit]]
    low = int(base[-1]) + 1 if len(base) else 2
    while low <= limit:
        high = min(low + segment, limit + 1)
        mask = np.ones(high - low, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= high:
                break
            start = max(p * p, -(-low // p) * p)
            mask[start - low :: p] = False
        chunks.append(np.flatnonzero(mask).astype(np.int64) + low)
        low = high
    return np.concatenate(chunks)


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``limit`` in ascending order (read-only)."""

    limit: int
    primes: np.ndarray

    def __post_init__(self):
        self.primes.setflags(write=False)

    def __len__(self) -> int:
        return len(self.primes)

    def prefix_count(self, n) -> int:
        """pi(n): number of primes <= n."""
        if n > self.limit:
            raise RangeExceedsTable(f"{n} exceeds table limit {self.limit}")
        return int(np.searchsorted(self.primes, n, side="right"))

    def nth(self, n: int) -> int:
        """The n-th prime, 1-based."""
        if not 1 <= n <= len(self.primes):
            raise RangeExceedsTable(f"table holds {len(self.primes)} primes, asked for #{n}")
        return int(self.primes[n - 1])


def _cache_path(limit: int, directory=None) -> Path | None:
    directory = directory or os.environ.get(CACHE_ENV)
    if not directory:
        return None
    return Path(directory) / f"primes_{limit}.bin"


def save_cache(table: PrimeTable, path) -> None:
    """Write ``count`` then the primes, all little-endian int64."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        np.array([len(table.primes)], dtype="<i8").tofile(fh)
        table.primes.astype("<i8").tofile(fh)


def load_cache(path, limit: int) -> PrimeTable:
    with open(path, "rb") as fh:
        count = int(np.fromfile(fh, dtype="<i8", count=1)[0])
        primes = np.fromfile(fh, dtype="<i8", count=count).astype(np.int64)
    if len(primes) != count:
        raise ValueError(f"truncated prime cache {path}")
    return PrimeTable(limit, primes)


def sieve(limit: int, cache_dir=None) -> PrimeTable:
    """Sieve all primes <= limit.

    Segmented above 10**7 so memory stays bounded. When ``cache_dir`` (or the
    ``ZEROFREE_PRIME_CACHE`` environment variable) is set, tables are read from
    and written to ``primes_<limit>.bin`` there.
    """
    if isinstance(limit, bool) or int(limit) != limit or limit < 2:
        raise InvalidArgument(f"sieve limit must be an integer >= 2, got {limit!r}")
    limit = int(limit)
    path = _cache_path(limit, cache_dir)
    if path is not None and path.exists():
        return load_cache(path, limit)
    if limit > SEGMENT_THRESHOLD:
        primes = _segmented_sieve(limit)
    else:
        primes = _simple_sieve(limit)
    table = PrimeTable(limit, primes)
    if path is not None:
        save_cache(table, path)
    return table


def _range_indices(table: PrimeTable, lo, hi) -> tuple[int, int]:
    if hi > table.limit:
        raise RangeExceedsTable(f"upper end {hi} exceeds table limit {table.limit}")
    i = int(np.searchsorted(table.primes, lo, side="left"))
    j = int(np.searchsorted(table.primes, hi, side="right"))
    return i, max(i, j)


def primes_in(table: PrimeTable, lo, hi) -> np.ndarray:
    """Primes p with lo <= p <= hi (both ends inclusive)."""
    i, j = _range_indices(table, lo, hi)
    return table.primes[i:j]


def log_phases(table: PrimeTable, lo, hi) -> np.ndarray:
    return np.log(primes_in(table, lo, hi).astype(float))
