"""Integer partitions (Young diagrams) and the irrep dimensions they label.

A partition of ``k`` with at most ``d`` rows labels one block of the
Schur-Weyl decomposition of ``(C^d)^{⊗k}``: a symmetric-group irrep of
dimension :func:`dim_symmetric_irrep` paired with a unitary-group irrep of
dimension :func:`dim_unitary_irrep`.

All dimensions are exact Python integers and the Plancherel weights are
exact :class:`fractions.Fraction` values.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import CapacityError, DomainError

DEFAULT_ENUMERATION_CAP = 10**6


class Partition(tuple):
    """A weakly decreasing tuple of positive integers.

    ``Partition(2, 1)`` and ``Partition.of([2, 1])`` are the same diagram.
    Trailing zeros are stripped, so ``Partition.of([2, 1, 0])`` is also
    ``(2, 1)``. The empty partition is the unique partition of 0.
    """

    def __new__(cls, *parts: int) -> "Partition":
        parts = tuple(int(p) for p in parts)
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        for a, b in zip(parts, parts[1:]):
            if a < b:
                raise DomainError(f"parts must be weakly decreasing, got {parts}")
        if parts and parts[-1] < 0:
            raise DomainError(f"parts must be positive, got {parts}")
        return super().__new__(cls, parts)

    @classmethod
    def of(cls, parts: Iterable[int]) -> "Partition":
        return cls(*parts)

    @property
    def weight(self) -> int:
        """Number of cells, i.e. the integer being partitioned."""
        return sum(self)

    @property
    def rows(self) -> int:
        return len(self)

    def conjugate(self) -> "Partition":
        if not self:
            return self
        return Partition(*(sum(1 for p in self if p > j) for j in range(self[0])))

    def padded(self, length: int) -> tuple[int, ...]:
        if length < len(self):
            raise DomainError(f"{self} has more than {length} rows")
        return tuple(self) + (0,) * (length - len(self))

    def to_json(self) -> list[int]:
        return list(self)

    @classmethod
    def from_json(cls, data: Sequence[int]) -> "Partition":
        return cls(*data)

    def __repr__(self) -> str:
        return f"Partition{tuple(self)!r}"


def enumerate_partitions(
    k: int, max_rows: int | None = None, cap: int = DEFAULT_ENUMERATION_CAP
) -> list[Partition]:
    """All partitions of ``k`` with at most ``max_rows`` parts.

    Order is lexicographically decreasing, so ``(k)`` comes first and the
    column ``(1, ..., 1)`` (when allowed) comes last.

    Raises:
        CapacityError: more than ``cap`` partitions would be produced.
    """
    if k < 0:
        raise DomainError(f"k must be non-negative, got {k}")
    if max_rows is None:
        max_rows = max(k, 1)
    if max_rows < 1:
        raise DomainError(f"max_rows must be >= 1, got {max_rows}")
    out: list[Partition] = []
    for parts in _generate(k, min(k, max_rows) if k else 0, k):
        out.append(Partition(*parts))
        if len(out) > cap:
            raise CapacityError(
                f"enumeration of partitions of {k} with <= {max_rows} rows", cap
            )
    return out


def _generate(k: int, rows: int, largest: int) -> Iterator[tuple[int, ...]]:
    if k == 0:
        yield ()
        return
    if rows == 0:
        return
    # Largest first part that still lets the rest fit in rows-1 rows of width <= first.
    for first in range(min(k, largest), 0, -1):
        if first * rows < k:
            break
        for rest in _generate(k - first, rows - 1, first):
            yield (first,) + rest


def partition_count(k: int) -> int:
    """The partition function p(k) via Euler's pentagonal recurrence."""
    p = [1] + [0] * k
    for n in range(1, k + 1):
        total, j = 0, 1
        while True:
            g1 = j * (3 * j - 1) // 2
            if g1 > n:
                break
            sign = 1 if j % 2 else -1
            total += sign * p[n - g1]
            g2 = j * (3 * j + 1) // 2
            if g2 <= n:
                total += sign * p[n - g2]
            j += 1
        p[n] = total
    return p[k]


def hook_lengths(lam: Partition) -> list[int]:
    """Hook length of every cell, row by row."""
    conj = lam.conjugate()
    return [
        (row_len - j - 1) + (conj[j] - i - 1) + 1
        for i, row_len in enumerate(lam)
        for j in range(row_len)
    ]


@lru_cache(maxsize=None)
def dim_symmetric_irrep(lam: Partition) -> int:
    """dim V_λ via the hook length formula."""
    lam = Partition.of(lam)
    return math.factorial(lam.weight) // math.prod(hook_lengths(lam))


def dim_unitary_irrep(lam: Partition, d: int) -> int:
    """dim U_λ^(d) via the Weyl dimension formula.

    Uses prod_{i<j} (λ_i - λ_j + j - i) / (j - i) over the padded
    partition. The product of the denominators is prod_{m<d} m!.
    """
    lam = Partition.of(lam)
    if d < 1:
        raise DomainError(f"local dimension must be >= 1, got {d}")
    if lam.rows > d:
        raise DomainError(f"{lam} has {lam.rows} rows, more than d={d}")
    p = lam.padded(d)
    num, den = 1, 1
    for i in range(d):
        for j in range(i + 1, d):
            num *= p[i] - p[j] + j - i
            den *= j - i
    return num // den


def plancherel(lam: Partition) -> Fraction:
    """Plancherel weight (dim V_λ)^2 / k!."""
    lam = Partition.of(lam)
    return Fraction(dim_symmetric_irrep(lam) ** 2, math.factorial(lam.weight))
