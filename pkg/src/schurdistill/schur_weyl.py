"""Schur-Weyl duality on ``(C^d)^{⊗k}`` at dense, exactly checkable sizes.

Permutations are tuples with ``perm[j] = π(j)`` (0-based). The operator
``R_π`` moves the tensor factor in position ``j`` to position ``π(j)``, so
``R_{π∘σ} = R_π R_σ``. Permutation operators are never materialized when an
index array suffices: ``(R_π v)[r] = v[idx[r]]``.

Dense work is capped at ``d^k <= DEFAULT_DENSE_CAP`` per side.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import CapacityError, DomainError
from .partitions import (
    Partition,
    dim_symmetric_irrep,
    dim_unitary_irrep,
    enumerate_partitions,
)
from .quantum import BipartiteState, DensityOperator, Spectrum
from .symmetric_functions import (
    CycleType,
    character,
    class_size,
    cycle_type,
    power_sum,
    weighted_schur,
)

DEFAULT_DENSE_CAP = 4096
RANK_THRESHOLD = 1e-8

Permutation = tuple[int, ...]


def check_dense_cap(size: int, cap: int | None, what: str) -> None:
    cap = DEFAULT_DENSE_CAP if cap is None else cap
    if size > cap:
        raise CapacityError(f"dense {what} of dimension {size}", cap, size)


def inverse(perm: Sequence[int]) -> Permutation:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return tuple(inv)


def compose(p: Sequence[int], q: Sequence[int]) -> Permutation:
    """``p ∘ q``: apply ``q`` first."""
    return tuple(p[q[i]] for i in range(len(q)))


@lru_cache(maxsize=256)
def permutation_index(perm: Permutation, d: int) -> np.ndarray:
    """Index array ``idx`` with ``(R_π v)[r] = v[idx[r]]``."""
    k = len(perm)
    grid = np.arange(d**k).reshape((d,) * k) if k else np.arange(1)
    idx = np.transpose(grid, inverse(perm)).ravel() if k else grid
    idx.setflags(write=False)
    return idx


def permutation_operator(perm: Sequence[int], d: int, cap: int | None = None) -> np.ndarray:
    """Dense real permutation matrix ``R_π`` on ``(C^d)^{⊗k}``."""
    perm = tuple(perm)
    dim = d ** len(perm)
    check_dense_cap(dim, cap, "permutation operator")
    r = np.zeros((dim, dim))
    r[np.arange(dim), permutation_index(perm, d)] = 1.0
    return r


def all_permutations(k: int) -> list[Permutation]:
    return list(itertools.permutations(range(k)))


def trace_power_product(mu: CycleType, spectrum) -> float:
    """``tr(R_π ρ^{⊗k})`` for π of cycle type μ: the product of ``tr ρ^{len}``."""
    return power_sum(mu, spectrum)


def cycle_norm_bound(mu: CycleType, spectrum) -> float:
    """``||ρ||^{k - #cycles}``, the upper bound on :func:`trace_power_product`."""
    mu = Partition.of(mu)
    top = max(getattr(spectrum, "values", spectrum))
    return float(top) ** (mu.weight - mu.rows)


# -- projectors ----------------------------------------------------------------


@dataclass(frozen=True)
class IrrepProjector:
    """Orthogonal projector onto the λ-isotypic block of ``(C^d)^{⊗k}``."""

    partition: Partition
    d: int
    matrix: np.ndarray = field(repr=False)

    @property
    def k(self) -> int:
        return self.partition.weight

    @property
    def expected_rank(self) -> int:
        return dim_unitary_irrep(self.partition, self.d) * dim_symmetric_irrep(self.partition)


def _class_characters(lam: Partition) -> dict[Partition, int]:
    k = lam.weight
    return {mu: character(lam, mu) for mu in enumerate_partitions(k, k)}


@lru_cache(maxsize=64)
def _projector_matrix(lam: Partition, d: int) -> np.ndarray:
    k = lam.weight
    dim = d**k
    chars = _class_characters(lam)
    coef = dim_symmetric_irrep(lam) / math.factorial(k)
    rows = np.arange(dim)
    mat = np.zeros((dim, dim))
    for perm in all_permutations(k):
        chi = chars[cycle_type(perm)]
        if chi:
            mat[rows, permutation_index(perm, d)] += coef * chi
    mat.setflags(write=False)
    return mat


def irrep_projector(lam: Partition, d: int, k: int | None = None, cap: int | None = None) -> IrrepProjector:
    """Π_λ = (dim V_λ / k!) Σ_π χ^λ(π) R_π, summed class by class.

    Raises:
        DomainError: λ does not partition ``k`` or has more than ``d`` rows.
        CapacityError: ``d^k`` exceeds the dense cap.
    """
    lam = Partition.of(lam)
    k = lam.weight if k is None else k
    if lam.weight != k:
        raise DomainError(f"{lam} is not a partition of {k}")
    if lam.rows > d:
        raise DomainError(f"{lam} has more than d={d} rows")
    check_dense_cap(d**k, cap, "irrep projector")
    return IrrepProjector(lam, d, _projector_matrix(lam, d))


def irrep_projectors(d: int, k: int, cap: int | None = None) -> dict[Partition, IrrepProjector]:
    """All nonzero Π_λ on ``(C^d)^{⊗k}``, in canonical partition order."""
    return {lam: irrep_projector(lam, d, k, cap) for lam in enumerate_partitions(k, d)}


# -- the weak Schur sampling law --------------------------------------------------


@dataclass(frozen=True)
class SchurLaw:
    """Distribution of the weak Schur sampling outcome on ``ρ^{⊗k}``."""

    d: int
    k: int
    spectrum: tuple[float, ...]
    entries: dict[Partition, float]

    def __post_init__(self):
        total = sum(self.entries.values())
        if abs(total - 1.0) > 1e-10:
            raise DomainError(f"law does not normalize: total={total!r}")

    def prob(self, lam: Sequence[int]) -> float:
        return self.entries.get(Partition.of(lam), 0.0)

    def support(self, threshold: float = 0.0) -> list[Partition]:
        return [lam for lam, p in self.entries.items() if p > threshold]

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "k": self.k,
            "spectrum": list(self.spectrum),
            "entries": [{"lambda": lam.to_json(), "prob": p} for lam, p in self.entries.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SchurLaw":
        entries = {Partition.of(e["lambda"]): float(e["prob"]) for e in data["entries"]}
        return cls(int(data["d"]), int(data["k"]), tuple(data["spectrum"]), entries)


def _spectrum_values(spectrum) -> tuple[float, ...]:
    if isinstance(spectrum, Spectrum):
        return spectrum.values
    return Spectrum(tuple(spectrum)).values


def schur_law(spectrum, k: int, cap: int | None = None) -> SchurLaw:
    """Pr(λ) = dim V_λ · s_λ(spectrum) for every λ ⊢ k with rows <= rank.

    Uses the Jacobi-Trudi evaluator, which stays cheap for k in the
    hundreds when the spectrum has few nonzero entries.
    """
    values = _spectrum_values(spectrum)
    rank = sum(1 for v in values if v > 0)
    kwargs = {} if cap is None else {"cap": cap}
    entries = {
        lam: max(0.0, weighted_schur(lam, values))
        for lam in enumerate_partitions(k, max(rank, 1), **kwargs)
    }
    return SchurLaw(len(values), k, values, entries)


def character_sum_law(spectrum, k: int) -> SchurLaw:
    """Pr(λ) = (dim V_λ / k!) Σ_μ |C_μ| χ^λ(μ) p_μ(spectrum)."""
    values = _spectrum_values(spectrum)
    rank = sum(1 for v in values if v > 0)
    classes = enumerate_partitions(k, k)
    traces = {mu: power_sum(mu, values) for mu in classes}
    sizes = {mu: class_size(mu) for mu in classes}
    kfact = math.factorial(k)
    entries = {}
    for lam in enumerate_partitions(k, max(rank, 1)):
        acc = sum(sizes[mu] * character(lam, mu) * traces[mu] for mu in classes)
        entries[lam] = max(0.0, dim_symmetric_irrep(lam) * acc / kfact)
    return SchurLaw(len(values), k, values, entries)


def tensor_power(a: np.ndarray, k: int) -> np.ndarray:
    out = np.ones((1, 1) if a.ndim == 2 else (1,), dtype=a.dtype)
    for _ in range(k):
        out = np.kron(out, a)
    return out


def schur_law_bruteforce(rho: DensityOperator, k: int, cap: int | None = None) -> SchurLaw:
    """tr(Π_λ ρ^{⊗k}) with explicit dense projectors."""
    d = rho.dim
    check_dense_cap(d**k, cap, "k-fold state")
    rho_k = tensor_power(rho.matrix, k)
    entries = {}
    for lam, proj in irrep_projectors(d, k, cap).items():
        entries[lam] = float(np.real(np.sum(proj.matrix * rho_k.T)))
    return SchurLaw(d, k, rho.spectrum().values, entries)


# -- Young's orthogonal form and the Schur block basis -----------------------------


def standard_tableaux(lam: Partition) -> list[tuple[tuple[int, int], ...]]:
    """Standard Young tableaux as ``cells[i] = (row, col)`` of entry ``i``."""
    lam = Partition.of(lam)
    if not lam:
        return [()]
    out = []
    for r, length in enumerate(lam):
        # Entry k-1 sits in a removable corner.
        if r + 1 < lam.rows and lam[r + 1] == length:
            continue
        smaller = list(lam)
        smaller[r] -= 1
        for t in standard_tableaux(Partition.of(smaller)):
            out.append(t + ((r, length - 1),))
    return sorted(out)


@lru_cache(maxsize=64)
def young_generators(lam: Partition) -> tuple[np.ndarray, ...]:
    """Orthogonal matrices of the adjacent transpositions ``(i, i+1)``.

    Young's orthogonal form on standard tableaux: the diagonal entry is
    ``1/r`` with ``r`` the content of ``i+1`` minus the content of ``i``,
    and the off-diagonal entry to the swapped tableau is ``sqrt(1 - 1/r^2)``.
    """
    lam = Partition.of(lam)
    tabs = standard_tableaux(lam)
    index = {t: n for n, t in enumerate(tabs)}
    k, dim = lam.weight, len(tabs)
    gens = []
    for i in range(k - 1):
        g = np.zeros((dim, dim))
        for t, col in index.items():
            (r0, c0), (r1, c1) = t[i], t[i + 1]
            axial = (c1 - r1) - (c0 - r0)
            g[col, col] = 1.0 / axial
            if abs(axial) > 1:
                swapped = list(t)
                swapped[i], swapped[i + 1] = t[i + 1], t[i]
                g[index[tuple(swapped)], col] = math.sqrt(1.0 - 1.0 / axial**2)
        g.setflags(write=False)
        gens.append(g)
    return tuple(gens)


@lru_cache(maxsize=64)
def irrep_matrices(lam: Partition) -> dict[Permutation, np.ndarray]:
    """ρ_λ(π) for every π ∈ S_k, grown from the identity by adjacent swaps."""
    lam = Partition.of(lam)
    k = lam.weight
    gens = young_generators(lam)
    dim = dim_symmetric_irrep(lam)
    ident = tuple(range(k))
    mats = {ident: np.eye(dim)}
    frontier = [ident]
    while frontier:
        nxt = []
        for perm in frontier:
            for a, g in enumerate(gens):
                p = list(perm)
                p[a], p[a + 1] = p[a + 1], p[a]  # perm ∘ (a a+1)
                p = tuple(p)
                if p not in mats:
                    mats[p] = mats[perm] @ g
                    nxt.append(p)
        frontier = nxt
    return mats


@dataclass(frozen=True)
class SchurBlockBasis:
    """Per-λ isometries ``W_λ`` with ``W_λ^T R_π W_λ = I_{dim U} ⊗ ρ_λ(π)``.

    Columns of ``blocks[λ]`` are ordered ``(i, a)`` with ``i`` indexing the
    unitary-group factor and ``a`` the Young-tableau basis of V_λ, so the
    column index is ``i * dim V_λ + a``. All isometries are real.
    """

    d: int
    k: int
    blocks: dict[Partition, np.ndarray] = field(repr=False)

    def conjugated(self, perm: Sequence[int]) -> dict[Partition, np.ndarray]:
        idx = permutation_index(tuple(perm), self.d)
        return {lam: w.T @ w[idx] for lam, w in self.blocks.items()}

    def unitary(self) -> np.ndarray:
        """The full Schur transform as a square orthogonal matrix."""
        return np.hstack(list(self.blocks.values()))

    def block_shape(self, lam: Partition) -> tuple[int, int]:
        lam = Partition.of(lam)
        return dim_unitary_irrep(lam, self.d), dim_symmetric_irrep(lam)


def _matrix_unit_action(lam: Partition, d: int, row: int, vectors: np.ndarray) -> np.ndarray:
    """``E_{row,0} @ vectors`` with ``E_{ab} = (dim V/k!) Σ_π ρ(π)_{ab} R_π``."""
    mats = irrep_matrices(lam)
    coef = dim_symmetric_irrep(lam) / math.factorial(lam.weight)
    out = np.zeros_like(vectors)
    for perm, rho in mats.items():
        c = rho[row, 0]
        if c:
            out += c * vectors[permutation_index(perm, d)]
    return coef * out


@lru_cache(maxsize=16)
def _block_basis(d: int, k: int) -> SchurBlockBasis:
    dim = d**k
    blocks = {}
    rows = np.arange(dim)
    for lam in enumerate_partitions(k, d):
        mats = irrep_matrices(lam)
        dim_v = dim_symmetric_irrep(lam)
        dim_u = dim_unitary_irrep(lam, d)
        coef = dim_v / math.factorial(k)
        e00 = np.zeros((dim, dim))
        for perm, rho in mats.items():
            if rho[0, 0]:
                e00[rows, permutation_index(perm, d)] += coef * rho[0, 0]
        e00 = (e00 + e00.T) / 2
        w, v = np.linalg.eigh(e00)
        u = v[:, w > 0.5]
        if u.shape[1] != dim_u:
            raise RuntimeError(f"E_00 for {lam} has rank {u.shape[1]}, expected {dim_u}")
        cols = np.empty((dim, dim_u, dim_v))
        for a in range(dim_v):
            cols[:, :, a] = _matrix_unit_action(lam, d, a, u)
        block = cols.reshape(dim, dim_u * dim_v)
        block.setflags(write=False)
        blocks[lam] = block
    return SchurBlockBasis(d, k, blocks)


def schur_block_basis(d: int, k: int, cap: int | None = None) -> SchurBlockBasis:
    """Construct the Schur basis numerically from explicit irrep matrices.

    Within each λ-block, ``E_00`` projects onto one copy of U_λ; its range
    is spread over the V_λ labels by the matrix units ``E_{a0}``.

    Raises:
        CapacityError: ``d^k`` exceeds the dense cap.
        DomainError: ``k > 5`` (the construction enumerates S_k).
    """
    check_dense_cap(d**k, cap, "Schur block basis")
    if k > 5:
        raise DomainError(f"block basis supports k <= 5, got {k}")
    return _block_basis(d, k)


# -- verification on k-fold bipartite pure states ---------------------------------


def kfold_coefficients(psi: BipartiteState, k: int) -> np.ndarray:
    """``ψ^{⊗k}`` as a ``(d_A^k, d_B^k)`` coefficient matrix (A copies first)."""
    return tensor_power(psi.coefficient_matrix(), k)


def _clusters(values: np.ndarray, tol: float) -> list[int]:
    sizes: list[int] = []
    start = None
    for v in np.sort(values):
        if start is None or v - start > tol:
            sizes.append(1)
            start = v
        else:
            sizes[-1] += 1
    return sizes


def maximally_entangled_fidelity(block: np.ndarray, dim_u_a: int, dim_u_b: int, dim_v: int) -> float:
    """Best overlap of a normalized block state with ``Φ ⊗ φ^+_{dim V}``.

    The block coefficients are indexed ``((i, a), (j, b))``; maximizing over
    the unitary-factor state Φ leaves ``Σ_{ij} |Σ_a c_{iaja}|^2 / dim V``.
    """
    c = block.reshape(dim_u_a, dim_v, dim_u_b, dim_v)
    norm = np.linalg.norm(c)
    if norm == 0:
        return 0.0
    overlap = np.einsum("iaja->ij", c) / (norm * math.sqrt(dim_v))
    return float(np.sum(np.abs(overlap) ** 2))


@dataclass(frozen=True)
class IIDBlockReport:
    partition: Partition
    probability: float
    dim_v: int
    ebits: float
    cross_mass: float
    multiplicities: tuple[int, ...]
    multiplicities_divisible: bool
    fidelity: float

    def to_json(self) -> dict:
        return {
            "lambda": self.partition.to_json(),
            "prob": self.probability,
            "dim_v": self.dim_v,
            "ebits": self.ebits,
            "cross_mass": self.cross_mass,
            "multiplicities": list(self.multiplicities),
            "multiplicities_divisible": self.multiplicities_divisible,
            "fidelity": self.fidelity,
        }


@dataclass(frozen=True)
class IIDReport:
    k: int
    blocks: list[IIDBlockReport]
    max_cross_mass: float

    def passes(self, cross_tol: float = 1e-10, fidelity_tol: float = 1e-8) -> bool:
        return self.max_cross_mass <= cross_tol and all(
            b.multiplicities_divisible and b.fidelity >= 1 - fidelity_tol for b in self.blocks
        )


def verify_iid_decomposition(
    psi: BipartiteState,
    k: int,
    cap: int | None = None,
    prob_threshold: float = 1e-12,
    cluster_tol: float = 1e-8,
) -> IIDReport:
    """Check the block structure of ``ψ^{⊗k}`` under local weak Schur sampling.

    For each λ with ``Pr(λ) > prob_threshold`` this measures (a) the mass on
    mismatched labels ``Π_λ^A ⊗ Π_{λ'}^B``, (b) whether every nonzero
    eigenvalue of the projected reduced state on ``A^k`` has multiplicity
    divisible by ``dim V_λ``, and (c) the fidelity of the V_λ ⊗ V_λ part with
    a maximally entangled state in the Schur block basis.
    """
    d_a, d_b = psi.dim_a, psi.dim_b
    check_dense_cap(d_a**k * d_b**k, cap, "k-fold bipartite state")
    m = kfold_coefficients(psi, k)
    proj_a = irrep_projectors(d_a, k)
    proj_b = irrep_projectors(d_b, k)
    basis_a, basis_b = _block_basis(d_a, k), _block_basis(d_b, k)

    max_cross = 0.0
    cross_by_lam: dict[Partition, float] = {}
    for la, pa in proj_a.items():
        left = pa.matrix @ m
        worst = 0.0
        for lb, pb in proj_b.items():
            if la != lb:
                mass = float(np.linalg.norm(left @ pb.matrix) ** 2)
                worst = max(worst, mass)
        cross_by_lam[la] = worst
        max_cross = max(max_cross, worst)

    blocks = []
    for lam, pa in proj_a.items():
        if lam not in proj_b:
            continue
        projected = pa.matrix @ m @ proj_b[lam].matrix
        prob = float(np.linalg.norm(projected) ** 2)
        if prob <= prob_threshold:
            continue
        dim_v = dim_symmetric_irrep(lam)
        reduced = projected @ projected.conj().T / prob
        ev = np.linalg.eigvalsh(reduced)
        mults = tuple(_clusters(ev[ev > cluster_tol], cluster_tol))
        coeff = basis_a.blocks[lam].T @ m @ basis_b.blocks[lam]
        fid = maximally_entangled_fidelity(
            coeff, dim_unitary_irrep(lam, d_a), dim_unitary_irrep(lam, d_b), dim_v
        )
        blocks.append(
            IIDBlockReport(
                lam, prob, dim_v, math.log2(dim_v), cross_by_lam[lam], mults,
                all(c % dim_v == 0 for c in mults), fid,
            )
        )
    return IIDReport(k, blocks, max_cross)
