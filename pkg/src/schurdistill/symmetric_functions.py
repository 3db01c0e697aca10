"""Symmetric-group characters, power sums and Schur polynomial evaluation.

Characters come from the Murnaghan-Nakayama rule on beta-sets (abacus
form), memoized on ``(λ, μ)`` with :func:`functools.lru_cache`. The cache
is process-wide; CPython's ``lru_cache`` is safe to hit from several
threads, and a racing miss only recomputes the same integer.

Two independent Schur evaluators are provided:

* :func:`schur_frobenius` sums ``χ^λ(μ) p_μ(x) / z_μ`` over cycle types.
* :func:`schur_jacobi_trudi` takes ``det[h_{λ_i - i + j}(x)]`` with the
  complete homogeneous polynomials built from power sums by Newton's
  identity ``m h_m = Σ_{i=1}^m p_i h_{m-i}``.

The bialternant ratio is deliberately absent: it divides by zero whenever
two spectrum entries coincide, which is the common case here.
"""

from __future__ import annotations

import math
from collections import Counter
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DomainError
from .partitions import Partition, dim_symmetric_irrep, enumerate_partitions

CycleType = Partition


def cycle_type(perm: Sequence[int]) -> CycleType:
    """Cycle lengths of a permutation given as ``perm[i] = π(i)``."""
    seen = [False] * len(perm)
    lengths = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        length, j = 0, start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        lengths.append(length)
    return Partition(*sorted(lengths, reverse=True))


def z_constant(mu: CycleType) -> int:
    """Centralizer order ``prod_i i^{m_i} m_i!``."""
    return math.prod(i**m * math.factorial(m) for i, m in Counter(mu).items())


def class_size(mu: CycleType) -> int:
    """Number of permutations of ``|μ|`` elements with cycle type ``μ``."""
    mu = Partition.of(mu)
    return math.factorial(mu.weight) // z_constant(mu)


def _beta_set(lam: tuple[int, ...]) -> tuple[int, ...]:
    n = len(lam)
    return tuple(part + n - 1 - i for i, part in enumerate(lam))


def _from_beta(beta: Sequence[int]) -> tuple[int, ...]:
    beta = sorted(beta, reverse=True)
    n = len(beta)
    return tuple(p for p in (b - (n - 1 - i) for i, b in enumerate(beta)) if p > 0)


@lru_cache(maxsize=None)
def _mn(lam: tuple[int, ...], mu: tuple[int, ...]) -> int:
    if not mu:
        return 1 if not lam else 0
    r, rest = mu[0], mu[1:]
    beta = _beta_set(lam)
    occupied = set(beta)
    total = 0
    for b in beta:
        target = b - r
        if target < 0 or target in occupied:
            continue
        # Leg length = beads jumped over.
        height = sum(1 for c in beta if target < c < b)
        new_beta = [target if c == b else c for c in beta]
        term = _mn(_from_beta(new_beta), rest)
        total += -term if height % 2 else term
    return total


def character(lam: Partition, mu: CycleType) -> int:
    """χ^λ(μ) by the Murnaghan-Nakayama rule.

    Raises:
        DomainError: ``λ`` and ``μ`` partition different integers.
    """
    lam, mu = Partition.of(lam), Partition.of(mu)
    if lam.weight != mu.weight:
        raise DomainError(f"weight mismatch: |{lam}|={lam.weight}, |{mu}|={mu.weight}")
    return _mn(tuple(lam), tuple(mu))


def character_table(k: int) -> tuple[list[Partition], np.ndarray]:
    """Rows indexed by λ, columns by cycle type μ, both in canonical order."""
    parts = enumerate_partitions(k, k)
    table = np.array([[character(l, m) for m in parts] for l in parts], dtype=object)
    return parts, table


def _as_vector(x) -> np.ndarray:
    values = getattr(x, "values", x)
    return np.asarray(values, dtype=float).ravel()


def power_sum(mu: CycleType, x) -> float:
    """``p_μ(x) = prod_i Σ_j x_j^{μ_i}``."""
    x = _as_vector(x)
    return float(math.prod(float(np.sum(x**part)) for part in mu))


def schur_frobenius(lam: Partition, x) -> float:
    """s_λ(x) as the class sum ``Σ_μ χ^λ(μ) p_μ(x) / z_μ``."""
    lam = Partition.of(lam)
    x = _as_vector(x)
    k = lam.weight
    total = 0.0
    for mu in enumerate_partitions(k, k):
        chi = character(lam, mu)
        if chi:
            total += chi * power_sum(mu, x) / z_constant(mu)
    return total


def complete_homogeneous(x, degree: int) -> np.ndarray:
    """``[h_0(x), ..., h_degree(x)]`` from power sums via Newton's identity."""
    x = _as_vector(x)
    p = [float(np.sum(x**i)) for i in range(degree + 1)]
    h = np.zeros(degree + 1)
    h[0] = 1.0
    for m in range(1, degree + 1):
        h[m] = sum(p[i] * h[m - i] for i in range(1, m + 1)) / m
    return h


def schur_jacobi_trudi(lam: Partition, x) -> float:
    """s_λ(x) as ``det[h_{λ_i - i + j}(x)]``."""
    lam = Partition.of(lam)
    x = _as_vector(x)
    n = lam.rows
    if n == 0:
        return 1.0
    h = complete_homogeneous(x, lam[0] + n - 1)
    mat = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            idx = lam[i] - i + j
            if 0 <= idx < len(h):
                mat[i, j] = h[idx]
    return float(np.linalg.det(mat))


def schur_polynomial(lam: Partition, x, method: str = "jacobi-trudi") -> float:
    """Evaluate the Schur polynomial s_λ at the point ``x``.

    Zero entries of ``x`` are dropped first; if fewer nonzero entries remain
    than ``λ`` has rows the value is exactly 0.

    Args:
        lam: the partition.
        x: spectrum or any sequence of non-negative reals.
        method: ``"jacobi-trudi"`` (default, fast for large ``|λ|``) or
            ``"frobenius"`` (character sum, practical for ``|λ|`` <= ~14).
    """
    lam = Partition.of(lam)
    x = _as_vector(x)
    x = x[x > 0]
    if lam.rows > len(x):
        return 0.0
    if method == "jacobi-trudi":
        return schur_jacobi_trudi(lam, x)
    if method == "frobenius":
        return schur_frobenius(lam, x)
    raise DomainError(f"unknown method {method!r}")


def weighted_schur(lam: Partition, x, method: str = "jacobi-trudi") -> float:
    """dim V_λ · s_λ(x): the weak Schur sampling probability of λ."""
    lam = Partition.of(lam)
    return dim_symmetric_irrep(lam) * schur_polynomial(lam, x, method)
