"""Integer frequency sets: hyperbolic crosses and difference sets.

A frequency set is a finite collection of vectors k in Z^d, kept in
lexicographic order so that coefficient vectors indexed by it are stable
across runs.  The central construction is the hyperbolic cross, the set of
all k whose componentwise product of max(1, |k_j|) stays below a budget N.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from .errors import DomainError, ResourceLimitError

DEFAULT_CARDINALITY_CAP = 100_000_000


def hc_weight(k) -> int:
    """Product weight max(1,|k_1|) * ... * max(1,|k_d|) of a frequency."""
    w = 1
    for kj in np.asarray(k, dtype=np.int64).ravel():
        w *= max(1, abs(int(kj)))
    return w


def _lexsorted_unique(rows: np.ndarray) -> np.ndarray:
    """Deduplicate integer rows and sort them lexicographically.

    np.unique(axis=0) compares raw bytes, which misorders negative values,
    so sorting is done explicitly with lexsort on numeric columns.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=np.int64))
    if rows.shape[0] == 0:
        return rows
    order = np.lexsort(rows.T[::-1])
    rows = rows[order]
    keep = np.ones(len(rows), dtype=bool)
    keep[1:] = np.any(rows[1:] != rows[:-1], axis=1)
    return rows[keep]


class FrequencySet:
    """Ordered set of distinct frequency vectors in Z^d.

    Parameters
    ----------
    dim : int
        Ambient dimension d >= 1.
    indices : array_like of shape (n, dim)
        Frequency vectors; duplicates are dropped and rows are put in
        lexicographic (numeric, leftmost-significant) order.
    cross_order : int, optional
        When the set is the hyperbolic cross of budget N this records N,
        which the text serialization exposes; 0 means "not a cross".
    """

    __slots__ = ("dim", "indices", "cross_order")

    def __init__(self, dim: int, indices, cross_order: int = 0, _presorted: bool = False):
        if dim < 1:
            raise DomainError(f"dimension must be >= 1, got {dim}")
        arr = np.asarray(indices, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, dim)
        if arr.ndim != 2 or (arr.size and arr.shape[1] != dim):
            raise DomainError(f"indices must have shape (n, {dim}), got {arr.shape}")
        if not _presorted:
            arr = _lexsorted_unique(arr)
        arr.setflags(write=False)
        self.dim = int(dim)
        self.indices = arr
        self.cross_order = int(cross_order)

    def __len__(self) -> int:
        return self.indices.shape[0]

    def __iter__(self) -> Iterator[tuple]:
        for row in self.indices:
            yield tuple(int(v) for v in row)

    def __contains__(self, k) -> bool:
        k = np.asarray(k, dtype=np.int64)
        return bool(np.any(np.all(self.indices == k, axis=1)))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FrequencySet)
            and self.dim == other.dim
            and self.indices.shape == other.indices.shape
            and bool(np.all(self.indices == other.indices))
        )

    def __hash__(self):
        return hash((self.dim, self.indices.tobytes()))

    def __repr__(self) -> str:
        tag = f", N={self.cross_order}" if self.cross_order else ""
        return f"FrequencySet(d={self.dim}, n={len(self)}{tag})"


@lru_cache(maxsize=None)
def cross_cardinality(d: int, N: int) -> int:
    """Number of elements of the hyperbolic cross of budget N in Z^d."""
    if d < 1 or N < 1:
        raise DomainError("cross_cardinality requires d >= 1 and N >= 1")
    if d == 1:
        return 2 * N + 1
    # the budget left for the remaining coordinates only takes O(sqrt(N))
    # distinct values N // j, so group k_1 by that value
    total = cross_cardinality(d - 1, N)  # k_1 = 0
    for k in range(1, N + 1):
        total += 2 * cross_cardinality(d - 1, N // k)
    return total


def _cross_rows(d: int, N: int, memo: dict) -> np.ndarray:
    key = (d, N)
    if key in memo:
        return memo[key]
    if d == 1:
        rows = np.arange(-N, N + 1, dtype=np.int64).reshape(-1, 1)
    else:
        blocks = []
        for k in range(-N, N + 1):
            sub = _cross_rows(d - 1, N // max(1, abs(k)), memo)
            first = np.full((sub.shape[0], 1), k, dtype=np.int64)
            blocks.append(np.hstack((first, sub)))
        rows = np.vstack(blocks)
    memo[key] = rows
    return rows


def hyperbolic_cross(d: int, N: int, cap: int = DEFAULT_CARDINALITY_CAP) -> FrequencySet:
    """All k in Z^d with hc_weight(k) <= N, in lexicographic order.

    The enumeration recurses on a per-coordinate budget (N divided by the
    weight consumed so far) instead of scanning the full box [-N, N]^d,
    which matters from d = 3 on.

    Raises
    ------
    ResourceLimitError
        If the cardinality (computed up front by recursion) exceeds ``cap``.
    """
    if d < 1 or N < 1:
        raise DomainError(f"hyperbolic_cross requires d >= 1 and N >= 1, got d={d}, N={N}")
    n = cross_cardinality(d, N)
    if n > cap:
        raise ResourceLimitError(
            f"hyperbolic cross d={d}, N={N} has {n} elements, exceeding the cap {cap}"
        )
    rows = _cross_rows(d, N, {})
    # the recursion emits k_1 ascending with lexicographically ordered tails,
    # so rows are already sorted and duplicate-free
    return FrequencySet(d, rows, cross_order=N, _presorted=True)


def difference_set(I: FrequencySet, cap: int = DEFAULT_CARDINALITY_CAP) -> FrequencySet:
    """Pairwise differences {k1 - k2 : k1, k2 in I}, deduplicated.

    Always contains 0 and is symmetric about it.
    """
    n = len(I)
    if n == 0:
        raise DomainError("difference_set requires a nonempty frequency set")
    if n * n > cap:
        raise ResourceLimitError(
            f"difference set would generate {n * n} pairs, exceeding the cap {cap}"
        )
    a = I.indices
    diffs = (a[:, None, :] - a[None, :, :]).reshape(n * n, I.dim)
    return FrequencySet(I.dim, diffs)


def from_indices(dim: int, indices: Iterable) -> FrequencySet:
    """Build a FrequencySet from any iterable of index vectors."""
    rows = np.asarray(list(indices), dtype=np.int64)
    return FrequencySet(dim, rows)


def write_frequency_set(I: FrequencySet, stream) -> None:
    """Serialize as text: header line ``d N`` then one index per line."""
    stream.write(f"{I.dim} {I.cross_order}\n")
    if len(I):
        np.savetxt(stream, I.indices, fmt="%d", delimiter=" ")


def read_frequency_set(stream) -> FrequencySet:
    """Parse the text format produced by :func:`write_frequency_set`."""
    header = stream.readline().split()
    if len(header) != 2:
        raise DomainError("frequency set header must be 'd N'")
    d, N = int(header[0]), int(header[1])
    body = stream.read().split()
    rows = np.asarray(body, dtype=np.int64).reshape(-1, d) if body else np.empty((0, d), np.int64)
    return FrequencySet(d, rows, cross_order=N)
