"""Dense small-dimension quantum states, entropies and distances.

Entropies are in bits. Operators are plain numpy arrays wrapped in light
frozen dataclasses that carry the tensor-factor dimensions; all functions
also accept raw arrays where no factorization is needed.

Randomness is always an explicit ``numpy.random.Generator`` argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DomainError

RANK_TOLERANCE = 1e-10
NORM_TOLERANCE = 1e-12
HERMITICITY_TOLERANCE = 1e-8
PSD_TOLERANCE = 1e-10


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Spectrum:
    """Non-increasing probability vector, e.g. eigenvalues of a reduced state."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise DomainError("spectrum must be non-empty")
        if any(v < 0 or v > 1 + NORM_TOLERANCE for v in vals):
            raise DomainError(f"spectrum entries must lie in [0, 1]: {vals}")
        if abs(sum(vals) - 1.0) > NORM_TOLERANCE:
            raise DomainError(f"spectrum must sum to 1, sums to {sum(vals)!r}")
        object.__setattr__(self, "values", tuple(sorted(vals, reverse=True)))

    @classmethod
    def from_eigenvalues(cls, eigenvalues, tolerance: float = PSD_TOLERANCE) -> "Spectrum":
        """Clip round-off negatives (down to ``-tolerance``) to zero."""
        ev = np.real_if_close(np.asarray(eigenvalues)).astype(float)
        if np.any(ev < -tolerance):
            raise DomainError(f"negative eigenvalue {ev.min()!r}")
        ev = np.clip(ev, 0.0, None)
        ev = ev / ev.sum()
        return cls(tuple(ev))

    @classmethod
    def parse(cls, text: str) -> "Spectrum":
        """Parse ``"0.5,0.5"``; whitespace around entries is ignored."""
        items = [t.strip() for t in text.split(",")]
        vals = []
        for col, item in enumerate(items, start=1):
            try:
                vals.append(float(item))
            except ValueError:
                raise DomainError(f"spectrum entry {col} is not a number: {item!r}") from None
        return cls(tuple(vals))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def rank(self) -> int:
        return sum(1 for v in self.values if v > RANK_TOLERANCE)

    @property
    def max(self) -> float:
        return self.values[0]

    @property
    def gamma(self) -> float:
        """Inverse operator norm 1/max(p)."""
        return 1.0 / self.values[0]

    def to_json(self) -> list[float]:
        return list(self.values)


@dataclass(frozen=True)
class PureState:
    """Normalized state vector on a tensor product of factors ``dims``."""

    amplitudes: np.ndarray
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        dims = tuple(self.dims) or (amps.size,)
        if math.prod(dims) != amps.size:
            raise DomainError(f"dims {dims} do not multiply to {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOLERANCE * max(1, amps.size) ** 0.5:
            raise DomainError(f"state not normalized: norm={norm!r}")
        object.__setattr__(self, "amplitudes", _freeze(amps))
        object.__setattr__(self, "dims", dims)

    @classmethod
    def normalized(cls, amplitudes, dims: Sequence[int] = ()) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        return cls(amps / np.linalg.norm(amps), tuple(dims))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> "DensityOperator":
        v = self.amplitudes
        return DensityOperator(np.outer(v, v.conj()), self.dims)

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "amplitudes": _interleave(self.amplitudes)}

    @classmethod
    def from_json(cls, data: dict) -> "PureState":
        return cls(_deinterleave(data["amplitudes"]), tuple(data["dims"]))


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian PSD unit-trace matrix with tensor-factor metadata.

    The matrix is symmetrized on construction; a Hermiticity defect above
    ``1e-8`` is rejected rather than silently repaired.
    """

    matrix: np.ndarray
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"density operator must be square, got shape {m.shape}")
        dims = tuple(self.dims) or (m.shape[0],)
        if math.prod(dims) != m.shape[0]:
            raise DomainError(f"dims {dims} do not multiply to {m.shape[0]}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITICITY_TOLERANCE:
            raise DomainError("matrix is not Hermitian")
        m = (m + m.conj().T) / 2
        tr = np.trace(m).real
        if abs(tr - 1.0) > 1e-10:
            raise DomainError(f"trace must be 1, got {tr!r}")
        if np.linalg.eigvalsh(m).min() < -PSD_TOLERANCE:
            raise DomainError("matrix is not positive semidefinite")
        object.__setattr__(self, "matrix", _freeze(m))
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def spectrum(self) -> Spectrum:
        return Spectrum.from_eigenvalues(np.linalg.eigvalsh(self.matrix))

    def operator_norm(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[-1])

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "matrix": _interleave(self.matrix)}

    @classmethod
    def from_json(cls, data: dict) -> "DensityOperator":
        d = math.prod(data["dims"])
        return cls(_deinterleave(data["matrix"]).reshape(d, d), tuple(data["dims"]))


@dataclass(frozen=True)
class BipartiteState:
    """Pure state of ``n_A + n_B`` qubits, A first."""

    state: PureState
    split: tuple[int, int]

    def __post_init__(self):
        n_a, n_b = self.split
        if n_a < 0 or n_b < 0 or 2 ** (n_a + n_b) != self.state.dim:
            raise DomainError(f"split {self.split} incompatible with dimension {self.state.dim}")
        if self.state.dims != (2**n_a, 2**n_b):
            object.__setattr__(
                self, "state", PureState(self.state.amplitudes, (2**n_a, 2**n_b))
            )

    @classmethod
    def from_amplitudes(cls, amplitudes, split: tuple[int, int]) -> "BipartiteState":
        n_a, n_b = split
        return cls(PureState.normalized(amplitudes, (2**n_a, 2**n_b)), tuple(split))

    @property
    def dim_a(self) -> int:
        return 2 ** self.split[0]

    @property
    def dim_b(self) -> int:
        return 2 ** self.split[1]

    def coefficient_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to ``(dim_A, dim_B)``."""
        return self.state.amplitudes.reshape(self.dim_a, self.dim_b)

    def reduced_a(self) -> DensityOperator:
        m = self.coefficient_matrix()
        return DensityOperator(m @ m.conj().T)

    def reduced_b(self) -> DensityOperator:
        m = self.coefficient_matrix()
        return DensityOperator(m.T @ m.conj())

    def to_json(self) -> dict:
        return {"split": list(self.split), **self.state.to_json()}


OperatorLike = Union[DensityOperator, PureState, np.ndarray]


def _interleave(a: np.ndarray) -> list[float]:
    flat = np.asarray(a, dtype=complex).ravel()
    out = np.empty(2 * flat.size)
    out[0::2], out[1::2] = flat.real, flat.imag
    return out.tolist()


def _deinterleave(data: Sequence[float]) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    return arr[0::2] + 1j * arr[1::2]


def as_matrix(x: OperatorLike) -> np.ndarray:
    """Density matrix of a state given as operator, vector or PureState."""
    if isinstance(x, DensityOperator):
        return x.matrix
    if isinstance(x, PureState):
        x = x.amplitudes
    a = np.asarray(x, dtype=complex)
    if a.ndim == 1:
        return np.outer(a, a.conj())
    return a


def ket(bits: str) -> np.ndarray:
    """Computational basis vector for a bit string, most significant first."""
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2) if bits else 0] = 1.0
    return v


def bell_pair() -> BipartiteState:
    return BipartiteState.from_amplitudes(ket("00") + ket("11"), (1, 1))


def partial_trace(rho: DensityOperator, keep: Sequence[int]) -> DensityOperator:
    """Reduce onto the factors listed in ``keep`` (in the given order)."""
    dims = rho.dims
    n = len(dims)
    keep = list(keep)
    if any(i < 0 or i >= n for i in keep) or len(set(keep)) != len(keep):
        raise DomainError(f"invalid subsystem indices {keep} for {n} factors")
    traced = [i for i in range(n) if i not in keep]
    t = rho.matrix.reshape(dims + dims)
    # Trace pairs from the highest index down so earlier axes keep their positions.
    for count, i in enumerate(sorted(traced, reverse=True)):
        cur = n - count
        t = np.trace(t, axis1=i, axis2=i + cur)
    remaining = sorted(keep)
    if remaining != keep:
        order = [remaining.index(i) for i in keep]
        r = len(keep)
        t = t.transpose(order + [o + r for o in order])
    d_keep = math.prod(dims[i] for i in keep)
    new_dims = tuple(dims[i] for i in keep) or (1,)
    return DensityOperator(np.asarray(t).reshape(d_keep, d_keep), new_dims)


@dataclass(frozen=True)
class SchmidtDecomposition:
    spectrum: Spectrum
    basis_a: np.ndarray  # columns |a_i>
    basis_b: np.ndarray  # columns |b_i>

    def reconstruct(self) -> np.ndarray:
        coeffs = np.sqrt(np.asarray(self.spectrum.values))
        r = len(coeffs)
        return np.einsum("i,ai,bi->ab", coeffs, self.basis_a[:, :r], self.basis_b[:, :r]).ravel()


def schmidt(psi: BipartiteState) -> SchmidtDecomposition:
    """Schmidt coefficients (squared) and local bases by SVD."""
    u, s, vh = np.linalg.svd(psi.coefficient_matrix(), full_matrices=False)
    return SchmidtDecomposition(Spectrum.from_eigenvalues(s**2), u, vh.T)


def renyi_entropy(spectrum, alpha) -> float:
    """Rényi entropy in bits.

    ``alpha`` is a non-negative float or one of ``"zero"``, ``"one"``,
    ``"infinity"``; ``math.inf`` is accepted for the min-entropy.
    """
    p = np.asarray(getattr(spectrum, "values", spectrum), dtype=float)
    if isinstance(alpha, str):
        alpha = {"zero": 0.0, "one": 1.0, "infinity": math.inf}[alpha]
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    # Entries at or below the rank tolerance count as zero for every order.
    nz = p[p > RANK_TOLERANCE]
    if alpha == 0:
        return math.log2(len(nz))
    if alpha == 1:
        return float(max(0.0, -np.sum(nz * np.log2(nz))))
    if math.isinf(alpha):
        return float(max(0.0, -math.log2(p.max())))
    return float(max(0.0, math.log2(np.sum(nz**alpha)) / (1 - alpha)))


def von_neumann_entropy(spectrum) -> float:
    return renyi_entropy(spectrum, 1)


def min_entropy(spectrum) -> float:
    return renyi_entropy(spectrum, math.inf)


def binary_entropy(eta: float) -> float:
    if eta < 0 or eta > 1:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    if eta in (0, 1):
        return 0.0
    return -eta * math.log2(eta) - (1 - eta) * math.log2(1 - eta)


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DomainError(f"dimension mismatch: {a.shape} vs {b.shape}")


def trace_norm(a: np.ndarray) -> float:
    """Sum of singular values of a Hermitian matrix."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(a))))


def trace_distance(rho: OperatorLike, sigma: OperatorLike) -> float:
    """Half the trace norm of the difference."""
    a, b = as_matrix(rho), as_matrix(sigma)
    _check_same_dim(a, b)
    return 0.5 * trace_norm(a - b)


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(a)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def fidelity(rho: OperatorLike, sigma: OperatorLike) -> float:
    """Squared Uhlmann fidelity ``||sqrt(ρ) sqrt(σ)||_1^2``."""
    if isinstance(rho, PureState) and isinstance(sigma, PureState):
        if rho.dim != sigma.dim:
            raise DomainError("dimension mismatch")
        return float(abs(np.vdot(rho.amplitudes, sigma.amplitudes)) ** 2)
    a, b = as_matrix(rho), as_matrix(sigma)
    _check_same_dim(a, b)
    s = _psd_sqrt(a)
    inner = np.linalg.eigvalsh(s @ b @ s)
    return float(min(1.0, np.sum(np.sqrt(np.clip(inner, 0, None))) ** 2))


def haar_state(dim: int, rng: np.random.Generator, dims: Sequence[int] = ()) -> PureState:
    """Haar-random pure state from a normalized complex Gaussian vector."""
    if dim < 1:
        raise DomainError(f"dim must be >= 1, got {dim}")
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(v / np.linalg.norm(v), tuple(dims))


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    """Random mixed state ``G G† / tr`` with a ``dim x rank`` Ginibre matrix."""
    rank = rank or dim
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    return DensityOperator(m / np.trace(m).real)


def random_bipartite(split: tuple[int, int], rng: np.random.Generator) -> BipartiteState:
    n_a, n_b = split
    return BipartiteState(haar_state(2 ** (n_a + n_b), rng), split)
