"""State ensembles and their k-copy moment operators.

Four families are supported:

* ``Haar(n)``: Haar-random n-qubit states.
* ``HaarSubsystem(n, m)``: an m-qubit Haar core on the first ``2^m``
  computational basis states, moved by a uniformly random permutation of
  all ``2^n`` bit strings.
* ``RestrictedHaarSubsystem(n, m, N, seed)``: the same, but the permutation
  is drawn from a fixed list of N permutations.
* ``Pseudoentangled(inner, eta, s)``: ``√(1-η)|0⟩|0⟩|0…0⟩|φ+⟩^{⊗s} +
  √η|1⟩|1⟩|ψ⟩`` with ψ drawn from ``inner``.

Qubit layout for the pseudoentangled family is ``[flag_A, A, flag_B, B]``
where A and B are the inner registers. The ebit padding occupies the last
``s`` qubits of each register, paired position by position.

Exact moments use closed forms; sampled moments carry a Bernstein error
budget. Distances are trace distances (half the trace norm).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import CapacityError, DomainError
from .quantum import (
    BipartiteState,
    PureState,
    binary_entropy,
    haar_state,
    min_entropy,
    von_neumann_entropy,
)
from .schur_weyl import all_permutations, permutation_index

DEFAULT_MOMENT_CAP = 1024
DEFAULT_SUBSET_CAP = 10**5
DEFAULT_STATE_QUBITS = 20
DEFAULT_FAILURE_PROBABILITY = 0.01


def _default_split(n: int) -> tuple[int, int]:
    return (n // 2, n - n // 2)


def _check_split(n: int, split: tuple[int, int] | None) -> None:
    if split is not None and (len(split) != 2 or min(split) < 0 or sum(split) != n):
        raise DomainError(f"split {split} does not partition {n} qubits")


@dataclass(frozen=True)
class Haar:
    n: int
    split: tuple[int, int] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        _check_split(self.n, self.split)
        object.__setattr__(self, "split", tuple(self.split or _default_split(self.n)))

    @property
    def qubits(self) -> int:
        return self.n

    @property
    def bipartition(self) -> tuple[int, int]:
        return self.split

    def to_json(self) -> dict:
        return {"variant": "haar", "n": self.n, "split": list(self.bipartition)}


@dataclass(frozen=True)
class HaarSubsystem:
    n: int
    m: int
    split: tuple[int, int] | None = None

    def __post_init__(self):
        if not 0 <= self.m <= self.n:
            raise DomainError(f"need 0 <= m <= n, got m={self.m}, n={self.n}")
        _check_split(self.n, self.split)
        object.__setattr__(self, "split", tuple(self.split or _default_split(self.n)))

    @property
    def qubits(self) -> int:
        return self.n

    @property
    def bipartition(self) -> tuple[int, int]:
        return self.split

    def to_json(self) -> dict:
        return {"variant": "haar-subsystem", "n": self.n, "m": self.m, "split": list(self.bipartition)}


@dataclass(frozen=True)
class RestrictedHaarSubsystem:
    """Haar-subsystem states over a fixed list of N permutations.

    With an integer ``permutation_seed`` the list is drawn from
    ``np.random.default_rng(permutation_seed)``. With ``None`` it is the
    covering family: one permutation per ``2^m``-subset, which reproduces
    the unrestricted ensemble exactly and requires ``N = C(2^n, 2^m)``.
    """

    n: int
    m: int
    N: int
    permutation_seed: int | None
    split: tuple[int, int] | None = None

    def __post_init__(self):
        if not 0 <= self.m <= self.n:
            raise DomainError(f"need 0 <= m <= n, got m={self.m}, n={self.n}")
        if self.N < 1:
            raise DomainError(f"N must be >= 1, got {self.N}")
        if self.permutation_seed is None and self.N != math.comb(2**self.n, 2**self.m):
            raise DomainError(
                f"covering family needs N = C(2^{self.n}, 2^{self.m}) = "
                f"{math.comb(2**self.n, 2**self.m)}, got {self.N}"
            )
        _check_split(self.n, self.split)
        object.__setattr__(self, "split", tuple(self.split or _default_split(self.n)))

    @property
    def qubits(self) -> int:
        return self.n

    @property
    def bipartition(self) -> tuple[int, int]:
        return self.split

    def permutations(self, cap: int = DEFAULT_SUBSET_CAP) -> np.ndarray:
        """``(N, 2^n)`` array; row i maps bit string x to ``perms[i, x]``."""
        if self.N > cap:
            raise CapacityError("restricted permutation list", cap, self.N)
        dim, size = 2**self.n, 2**self.m
        if self.permutation_seed is None:
            rows = []
            for subset in itertools.combinations(range(dim), size):
                rest = sorted(set(range(dim)) - set(subset))
                rows.append(list(subset) + rest)
            return np.array(rows, dtype=np.int64)
        rng = np.random.default_rng(self.permutation_seed)
        return np.array([rng.permutation(dim) for _ in range(self.N)], dtype=np.int64)

    def to_json(self) -> dict:
        return {
            "variant": "restricted-haar-subsystem",
            "n": self.n,
            "m": self.m,
            "N": self.N,
            "permutation_seed": self.permutation_seed,
            "split": list(self.bipartition),
        }


@dataclass(frozen=True)
class Pseudoentangled:
    inner: "EnsembleSpec"
    eta: float
    s_min: int

    def __post_init__(self):
        if isinstance(self.inner, Pseudoentangled):
            raise DomainError("nested pseudoentangled ensembles are not supported")
        if not 0 <= self.eta <= 1:
            raise DomainError(f"eta must lie in [0, 1], got {self.eta}")
        n_a, n_b = self.inner.bipartition
        if not 0 <= self.s_min <= min(n_a, n_b):
            raise DomainError(f"s_min must lie in [0, {min(n_a, n_b)}], got {self.s_min}")

    @property
    def qubits(self) -> int:
        return self.inner.qubits + 2

    @property
    def bipartition(self) -> tuple[int, int]:
        n_a, n_b = self.inner.bipartition
        return (n_a + 1, n_b + 1)

    def to_json(self) -> dict:
        return {
            "variant": "pseudoentangled",
            "inner": self.inner.to_json(),
            "eta": self.eta,
            "s_min": self.s_min,
            "split": list(self.bipartition),
        }


EnsembleSpec = Union[Haar, HaarSubsystem, RestrictedHaarSubsystem, Pseudoentangled]


def spec_from_json(data: dict) -> EnsembleSpec:
    variant = data.get("variant")
    split = tuple(data["split"]) if data.get("split") is not None else None
    if variant == "haar":
        return Haar(int(data["n"]), split)
    if variant == "haar-subsystem":
        return HaarSubsystem(int(data["n"]), int(data["m"]), split)
    if variant == "restricted-haar-subsystem":
        seed = data["permutation_seed"]
        return RestrictedHaarSubsystem(
            int(data["n"]), int(data["m"]), int(data["N"]), None if seed is None else int(seed), split
        )
    if variant == "pseudoentangled":
        return Pseudoentangled(spec_from_json(data["inner"]), float(data["eta"]), int(data["s_min"]))
    raise DomainError(f"unknown ensemble variant {variant!r}")


_SPEC_HELP = "haar:N | subsystem:N:M | restricted:N:M:COUNT:SEED|cover | pseudo:ETA:S:<inner>"


def parse_spec(text: str) -> EnsembleSpec:
    """Parse the command-line ensemble syntax.

    ``haar:4``, ``subsystem:4:2``, ``restricted:3:1:28:7`` (``cover`` in
    place of the seed selects the covering family) and
    ``pseudo:0.125:0:subsystem:6:3``.
    """
    fields = text.strip().split(":")
    try:
        kind = fields[0]
        if kind == "haar" and len(fields) == 2:
            return Haar(int(fields[1]))
        if kind == "subsystem" and len(fields) == 3:
            return HaarSubsystem(int(fields[1]), int(fields[2]))
        if kind == "restricted" and len(fields) == 5:
            seed = None if fields[4] == "cover" else int(fields[4])
            return RestrictedHaarSubsystem(int(fields[1]), int(fields[2]), int(fields[3]), seed)
        if kind == "pseudo" and len(fields) >= 4:
            return Pseudoentangled(parse_spec(":".join(fields[3:])), float(fields[1]), int(fields[2]))
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"cannot parse ensemble {text!r}: {exc}") from None
    raise DomainError(f"cannot parse ensemble {text!r}; expected {_SPEC_HELP}")


# -- sampling ---------------------------------------------------------------------


def _subsystem_amplitudes(n: int, m: int, perm: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    core = haar_state(2**m, rng).amplitudes
    amps = np.zeros(2**n, dtype=complex)
    amps[perm[: 2**m]] = core
    return amps


def ebit_padding(n_a: int, n_b: int, s: int) -> np.ndarray:
    """Coefficient matrix of ``|0…0⟩|φ+⟩^{⊗s}`` on registers of n_A and n_B qubits."""
    mat = np.zeros((2**n_a, 2**n_b), dtype=complex)
    idx = np.arange(2**s)
    mat[idx, idx] = 2 ** (-s / 2)
    return mat


def pseudoentangled_state(spec: Pseudoentangled, inner: BipartiteState) -> BipartiteState:
    """Assemble the two orthogonal branches around a given inner state."""
    n_a, n_b = spec.inner.bipartition
    if inner.split != (n_a, n_b):
        raise DomainError(f"inner split {inner.split} != {(n_a, n_b)}")
    d_a, d_b = 2**n_a, 2**n_b
    mat = np.zeros((2 * d_a, 2 * d_b), dtype=complex)
    mat[:d_a, :d_b] = math.sqrt(1 - spec.eta) * ebit_padding(n_a, n_b, spec.s_min)
    mat[d_a:, d_b:] = math.sqrt(spec.eta) * inner.coefficient_matrix()
    return BipartiteState(PureState(mat.ravel(), (2 * d_a, 2 * d_b)), spec.bipartition)


def sample_pseudoentangled(spec: Pseudoentangled, rng: np.random.Generator) -> tuple[BipartiteState, BipartiteState]:
    """A sampled state together with the inner state it was built from."""
    inner = sample_state(spec.inner, rng)
    return pseudoentangled_state(spec, inner), inner


def sample_state(spec: EnsembleSpec, rng: np.random.Generator, max_qubits: int = DEFAULT_STATE_QUBITS) -> BipartiteState:
    """Draw one state of the ensemble as a bipartite pure state."""
    if spec.qubits > max_qubits:
        raise CapacityError(f"state vector of {spec.qubits} qubits", max_qubits, spec.qubits)
    if isinstance(spec, Haar):
        return BipartiteState(haar_state(2**spec.n, rng), spec.bipartition)
    if isinstance(spec, HaarSubsystem):
        perm = rng.permutation(2**spec.n)
        return BipartiteState.from_amplitudes(_subsystem_amplitudes(spec.n, spec.m, perm, rng), spec.bipartition)
    if isinstance(spec, RestrictedHaarSubsystem):
        perms = _restricted_cache(spec)
        perm = perms[rng.integers(len(perms))]
        return BipartiteState.from_amplitudes(_subsystem_amplitudes(spec.n, spec.m, perm, rng), spec.bipartition)
    if isinstance(spec, Pseudoentangled):
        return sample_pseudoentangled(spec, rng)[0]
    raise DomainError(f"unknown ensemble {spec!r}")


_PERMUTATION_CACHE: dict[RestrictedHaarSubsystem, np.ndarray] = {}


def _restricted_cache(spec: RestrictedHaarSubsystem) -> np.ndarray:
    if spec not in _PERMUTATION_CACHE:
        _PERMUTATION_CACHE[spec] = spec.permutations()
    return _PERMUTATION_CACHE[spec]


# -- entropies -------------------------------------------------------------------


def planted_entropies(eta: float, s_min: float, inner_s1: float, inner_smin: float) -> tuple[float, float]:
    """(S_1, S_min) of the A-reduction of a pseudoentangled state.

    The reduction is ``(1-η)·I/2^s ⊕ η·ρ_A(ψ)``, which gives
    ``S_1 = (1-η)s + η S_1(ψ_A) + h_2(η)`` and
    ``S_min = min{s - log2(1-η), S_min(ψ_A) - log2 η}``.
    """
    if not 0 <= eta <= 1:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    s1 = (1 - eta) * s_min + eta * inner_s1 + binary_entropy(eta)
    first = s_min - math.log2(1 - eta) if eta < 1 else math.inf
    second = inner_smin - math.log2(eta) if eta > 0 else math.inf
    return s1, min(first, second)


@dataclass(frozen=True)
class EntropyTestInstance:
    alpha: float
    beta: float
    n: int
    m: int
    eta: float
    high: Pseudoentangled
    low: Pseudoentangled
    high_entropies: tuple[float, float]
    low_entropies: tuple[float, float]
    sample_bound: float

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "n": self.n,
            "m": self.m,
            "eta": self.eta,
            "high": self.high.to_json(),
            "low": self.low.to_json(),
            "high_s1": self.high_entropies[0],
            "high_smin": self.high_entropies[1],
            "low_s1": self.low_entropies[0],
            "low_smin": self.low_entropies[1],
            "sample_bound": self.sample_bound,
        }


def entropy_test_instance(alpha: float, beta: float, n: int, rng: np.random.Generator) -> EntropyTestInstance:
    """The pair of ensembles that hides an α-vs-β entropy gap.

    Uses ``m = round(nα/β)``, ``η = α/n`` and no ebit padding. Planted
    entropies are exact values for one sampled inner state per family; the
    sample lower bound ``2^{αn/(2β)}`` is reported with constant 1.
    """
    if not 0 < alpha < beta < n:
        raise DomainError(f"need 0 < alpha < beta < n, got alpha={alpha}, beta={beta}, n={n}")
    m = round(n * alpha / beta)
    eta = alpha / n
    high = Pseudoentangled(Haar(n), eta, 0)
    low = Pseudoentangled(HaarSubsystem(n, m), eta, 0)
    entropies = []
    for spec in (high, low):
        inner = sample_state(spec.inner, rng).reduced_a().spectrum()
        entropies.append(planted_entropies(eta, 0, von_neumann_entropy(inner), min_entropy(inner)))
    return EntropyTestInstance(
        alpha, beta, n, m, eta, high, low, entropies[0], entropies[1], 2 ** (alpha * n / (2 * beta))
    )


# -- moments --------------------------------------------------------------------


def bernstein_epsilon(dim: int, k: int, samples: int, failure: float = DEFAULT_FAILURE_PROBABILITY) -> float:
    """ε with ``exp(-Nε²/(16 d^{2k}) + 1/4) = failure``: a trace-norm deviation bound."""
    if samples < 1 or not 0 < failure < 1:
        raise DomainError(f"need samples >= 1 and 0 < failure < 1, got {samples}, {failure}")
    return 4 * float(dim) ** k * math.sqrt((0.25 + math.log(1 / failure)) / samples)


def symmetric_projector(dim: int, k: int, cap: int = DEFAULT_MOMENT_CAP) -> np.ndarray:
    """Π_sym = (1/k!) Σ_π R_π on ``(C^dim)^{⊗k}``."""
    size = dim**k
    if size > cap:
        raise CapacityError("dense symmetric projector", cap, size)
    rows = np.arange(size)
    out = np.zeros((size, size))
    perms = all_permutations(k)
    for perm in perms:
        out[rows, permutation_index(perm, dim)] += 1.0
    return out / len(perms)


def distinct_counts(dim: int, k: int) -> np.ndarray:
    """Number of distinct entries of each multi-index in ``[dim]^k``."""
    if k == 0:
        return np.zeros(1, dtype=np.int64)
    digits = np.stack(np.unravel_index(np.arange(dim**k), (dim,) * k))
    digits.sort(axis=0)
    return 1 + np.count_nonzero(np.diff(digits, axis=0), axis=0)


def subset_inclusion(n: int, m: int, k: int) -> list[Fraction]:
    """``f_j``: probability a uniform ``2^m``-subset contains j given strings."""
    big, size = 2**n, 2**m
    total = math.comb(big, size)
    return [Fraction(math.comb(big - j, size - j), total) if j <= size else Fraction(0) for j in range(k + 1)]


@dataclass(frozen=True)
class MomentOperator:
    """A k-copy moment ``E[ψψ†^{⊗k}]`` on ``dim^k``-dimensional space.

    ``kind`` is ``"dense"`` (explicit matrix), ``"symmetric"`` (exact Haar
    moment kept implicit as Π_sym/tr Π_sym) or ``"samples"`` (equal-weight
    average of ``v^{⊗k}`` for the stored base vectors).
    """

    k: int
    dim: int
    kind: str
    exact: bool
    matrix: np.ndarray | None = field(default=None, repr=False)
    vectors: np.ndarray | None = field(default=None, repr=False)
    bernstein: float = 0.0

    @property
    def samples(self) -> int:
        return 0 if self.vectors is None else len(self.vectors)

    def dense(self, cap: int = DEFAULT_MOMENT_CAP) -> np.ndarray:
        size = self.dim**self.k
        if self.kind == "dense":
            return self.matrix
        if size > cap:
            raise CapacityError("dense moment operator", cap, size)
        if self.kind == "symmetric":
            return symmetric_projector(self.dim, self.k, cap) / math.comb(self.dim + self.k - 1, self.k)
        powers = _tensor_powers(self.vectors, self.k)
        return powers.T @ powers.conj() / len(powers)

    def tag(self) -> dict:
        if self.exact:
            return {"mode": "exact"}
        return {"mode": "empirical", "samples": self.samples, "bernstein_epsilon": self.bernstein}


def _tensor_powers(vectors: np.ndarray, k: int) -> np.ndarray:
    out = np.ones((len(vectors), 1), dtype=complex)
    for _ in range(k):
        out = np.einsum("ia,ib->iab", out, vectors).reshape(len(vectors), -1)
    return out


def _diagonal_weights_moment(dim: int, m_size: int, k: int, weights: np.ndarray, cap: int) -> np.ndarray:
    return symmetric_projector(dim, k, cap) * weights[None, :] / math.comb(m_size + k - 1, k)


def exact_moment(spec: EnsembleSpec, k: int, cap: int = DEFAULT_MOMENT_CAP) -> MomentOperator:
    """Exact k-copy moment; not available for pseudoentangled ensembles.

    The subsystem moment is ``Π_sym · diag(w) / C(2^m+k-1, k)`` where
    ``w(x)`` is the chance that the random subset contains every string in
    the multi-index x; for the uniform subset this depends only on the
    number of distinct strings.
    """
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    dim = 2**spec.qubits
    if isinstance(spec, Haar):
        if dim**k > cap:
            return MomentOperator(k, dim, "symmetric", True)
        mat = symmetric_projector(dim, k, cap) / math.comb(dim + k - 1, k)
        return MomentOperator(k, dim, "dense", True, matrix=mat)
    if isinstance(spec, HaarSubsystem):
        _check_moment_cap(dim, k, cap)
        f = np.array([float(x) for x in subset_inclusion(spec.n, spec.m, k)])
        w = f[distinct_counts(dim, k)]
        return MomentOperator(k, dim, "dense", True, matrix=_diagonal_weights_moment(dim, 2**spec.m, k, w, cap))
    if isinstance(spec, RestrictedHaarSubsystem):
        _check_moment_cap(dim, k, cap)
        w = restricted_weights(_restricted_cache(spec), spec.m, k)
        return MomentOperator(k, dim, "dense", True, matrix=_diagonal_weights_moment(dim, 2**spec.m, k, w, cap))
    raise DomainError(f"no exact moment for {type(spec).__name__}; use empirical mode")


def _check_moment_cap(dim: int, k: int, cap: int) -> None:
    if dim**k > cap:
        raise CapacityError("dense moment operator", cap, dim**k)


def restricted_weights(perms: np.ndarray, m: int, k: int) -> np.ndarray:
    """Fraction of the listed subsets that contain every string of each multi-index."""
    dim = perms.shape[1]
    digits = np.stack(np.unravel_index(np.arange(dim**k), (dim,) * k)) if k else np.zeros((0, 1), dtype=int)
    w = np.zeros(digits.shape[1])
    for perm in perms:
        inside = np.zeros(dim, dtype=bool)
        inside[perm[: 2**m]] = True
        w += inside[digits].all(axis=0)
    return w / len(perms)


def enumerated_subsystem_moment(
    n: int, m: int, k: int, cap: int = DEFAULT_SUBSET_CAP, dense_cap: int = DEFAULT_MOMENT_CAP
) -> np.ndarray:
    """Average of the truncated symmetric projectors over every ``2^m``-subset."""
    dim, size = 2**n, 2**m
    count = math.comb(dim, size)
    if count > cap:
        raise CapacityError(f"enumeration of {size}-subsets of {dim} strings", cap, count)
    _check_moment_cap(dim, k, dense_cap)
    digits = np.stack(np.unravel_index(np.arange(dim**k), (dim,) * k))
    proj = symmetric_projector(dim, k, dense_cap)
    acc = np.zeros_like(proj)
    for subset in itertools.combinations(range(dim), size):
        inside = np.zeros(dim, dtype=bool)
        inside[list(subset)] = True
        keep = inside[digits].all(axis=0)
        acc += proj * np.outer(keep, keep)
    return acc / count / math.comb(size + k - 1, k)


def empirical_moment(
    spec: EnsembleSpec, k: int, samples: int, rng: np.random.Generator,
    failure: float = DEFAULT_FAILURE_PROBABILITY,
) -> MomentOperator:
    """Equal-weight average over ``samples`` drawn states, with its Bernstein ε."""
    dim = 2**spec.qubits
    vecs = np.array([sample_state(spec, rng).state.amplitudes for _ in range(samples)])
    return MomentOperator(k, dim, "samples", False, vectors=vecs, bernstein=bernstein_epsilon(dim, k, samples, failure))


def moment_operator(
    spec: EnsembleSpec, k: int, mode: str = "exact", samples: int = 0,
    rng: np.random.Generator | None = None, cap: int = DEFAULT_MOMENT_CAP,
) -> MomentOperator:
    if mode == "exact":
        return exact_moment(spec, k, cap)
    if mode == "empirical":
        if samples < 1 or rng is None:
            raise DomainError("empirical mode needs samples >= 1 and a generator")
        return empirical_moment(spec, k, samples, rng)
    raise DomainError(f"unknown mode {mode!r}")


# -- distances ----------------------------------------------------------------------


def _psd_frame(gram: np.ndarray, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    lam, vec = np.linalg.eigh((gram + gram.conj().T) / 2)
    keep = lam > tol * max(1.0, lam[-1])
    return lam[keep], vec[:, keep]


def _weighted_trace_norm(vectors: np.ndarray, weights: np.ndarray, k: int) -> float:
    """``||Σ w_i v_i^{⊗k} v_i^{⊗k}†||_1`` through the Gram matrix."""
    gram = (vectors.conj() @ vectors.T) ** k
    lam, vec = _psd_frame(gram)
    root = np.sqrt(lam)
    core = (root[:, None] * (vec.conj().T @ (weights[:, None] * vec))) * root[None, :]
    return float(np.sum(np.abs(np.linalg.eigvalsh((core + core.conj().T) / 2))))


def _symmetric_vs_samples(sym: MomentOperator, emp: MomentOperator) -> float:
    k, dim = sym.k, sym.dim
    c = math.comb(dim + k - 1, k)
    gram = (emp.vectors.conj() @ emp.vectors.T) ** k
    lam, vec = _psd_frame(gram)
    w = np.full(len(gram), 1.0 / len(gram))
    root = np.sqrt(lam)
    core = (root[:, None] * (vec.conj().T @ (w[:, None] * vec))) * root[None, :]
    inside = np.eye(len(lam)) / c - (core + core.conj().T) / 2
    return (c - len(lam)) / c + float(np.sum(np.abs(np.linalg.eigvalsh(inside))))


def trace_norm_between(a: MomentOperator, b: MomentOperator, cap: int = DEFAULT_MOMENT_CAP) -> float:
    if (a.k, a.dim) != (b.k, b.dim):
        raise DomainError("moment operators act on different spaces")
    kinds = {a.kind, b.kind}
    if kinds == {"samples"}:
        vecs = np.vstack([a.vectors, b.vectors])
        w = np.concatenate([np.full(a.samples, 1.0 / a.samples), np.full(b.samples, -1.0 / b.samples)])
        return _weighted_trace_norm(vecs, w, a.k)
    if kinds == {"symmetric"}:
        return 0.0
    if kinds == {"symmetric", "samples"}:
        return _symmetric_vs_samples(*(sorted((a, b), key=lambda x: x.kind != "symmetric")))
    diff = a.dense(cap) - b.dense(cap)
    return float(np.sum(np.abs(np.linalg.eigvalsh((diff + diff.conj().T) / 2))))


def haar_subsystem_distance(n: int, m: int, k: int) -> Fraction:
    """Exact trace distance between the Haar and Haar-subsystem k-copy moments.

    Both operators are diagonal in the symmetrized computational basis;
    multisets with j distinct strings (there are ``C(2^n, j) C(k-1, j-1)``
    of them) carry eigenvalues ``1/C(2^n+k-1, k)`` and ``f_j/C(2^m+k-1, k)``.
    """
    if k == 0:
        return Fraction(0)
    big, size = 2**n, 2**m
    f = subset_inclusion(n, m, k)
    haar = Fraction(1, math.comb(big + k - 1, k))
    sub_norm = math.comb(size + k - 1, k)
    total = sum(
        math.comb(big, j) * math.comb(k - 1, j - 1) * abs(haar - f[j] / sub_norm)
        for j in range(1, k + 1)
    )
    return total / 2


@dataclass(frozen=True)
class MomentDistance:
    distance: float
    error_budget: float
    tags: tuple[dict, dict]
    reference_scale: float | None

    def to_json(self) -> dict:
        return {
            "distance": self.distance,
            "error_budget": self.error_budget,
            "a": self.tags[0],
            "b": self.tags[1],
            "reference_scale": self.reference_scale,
        }


def _reference_scale(a: EnsembleSpec, b: EnsembleSpec, k: int) -> float | None:
    ms = [s.m for s in (a, b) if isinstance(s, (HaarSubsystem, RestrictedHaarSubsystem))]
    return k * k / 2 ** min(ms) if ms else None


def moment_distance(
    a: EnsembleSpec, b: EnsembleSpec, k: int, mode: str = "exact", samples: int = 0,
    rng: np.random.Generator | None = None, cap: int = DEFAULT_MOMENT_CAP,
) -> MomentDistance:
    """Trace distance between two k-copy moments.

    By the Helstrom bound, a k-copy distinguisher guesses which ensemble it
    faces with probability at most ``(1 + distance)/2``. ``error_budget``
    is half the summed Bernstein ε of any sampled side, i.e. a trace-distance
    allowance holding with probability 0.99 per side. In ``"exact"`` mode a
    Haar vs Haar-subsystem pair uses the rational closed form.
    """
    if a == b:
        tag = {"mode": "exact"} if mode == "exact" else {"mode": "identical"}
        return MomentDistance(0.0, 0.0, (tag, tag), _reference_scale(a, b, k))
    if mode == "exact":
        pair = {type(a), type(b)}
        if pair == {Haar, HaarSubsystem} and a.qubits == b.qubits:
            sub = a if isinstance(a, HaarSubsystem) else b
            exact = float(haar_subsystem_distance(sub.n, sub.m, k))
            return MomentDistance(exact, 0.0, ({"mode": "exact"}, {"mode": "exact"}), _reference_scale(a, b, k))
    if a.qubits != b.qubits:
        raise DomainError(f"ensembles live on {a.qubits} and {b.qubits} qubits")
    ma = moment_operator(a, k, mode, samples, rng, cap)
    mb = moment_operator(b, k, mode, samples, rng, cap)
    dist = trace_norm_between(ma, mb, cap) / 2
    budget = (ma.bernstein + mb.bernstein) / 2
    return MomentDistance(dist, budget, (ma.tag(), mb.tag()), _reference_scale(a, b, k))


@dataclass(frozen=True)
class ConcentrationResult:
    k: int
    samples: int
    distance: float
    epsilon: float
    failure: float

    @property
    def passed(self) -> bool:
        # ε bounds the trace norm, which is twice the trace distance.
        return 2 * self.distance <= self.epsilon

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "samples": self.samples,
            "distance": self.distance,
            "bernstein_epsilon": self.epsilon,
            "failure_probability": self.failure,
            "pass": self.passed,
        }


def concentration_check(
    spec: EnsembleSpec, k: int, samples: int, rng: np.random.Generator,
    failure: float = DEFAULT_FAILURE_PROBABILITY, cap: int = DEFAULT_MOMENT_CAP,
) -> ConcentrationResult:
    """Empirical k-copy mean of ``samples`` draws against the exact moment."""
    dim = 2**spec.qubits
    eps = bernstein_epsilon(dim, k, samples, failure)
    if k == 0:
        return ConcentrationResult(0, samples, 0.0, eps, failure)
    exact = exact_moment(spec, k, cap)
    emp = empirical_moment(spec, k, samples, rng, failure)
    return ConcentrationResult(k, samples, trace_norm_between(exact, emp, cap) / 2, eps, failure)

