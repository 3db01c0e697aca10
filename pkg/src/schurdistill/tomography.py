"""Rank-one approximations, LOCC tomography budgets and dilution costs.

Copy counts are computed in exact rational arithmetic (ε enters through
``Fraction(repr(ε))``), so ``ε = 0.1`` means exactly one tenth and the
budgets are reproducible integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .quantum import (
    BipartiteState,
    DensityOperator,
    PureState,
    as_matrix,
    ket,
    trace_norm,
)

DISTILLATION_SUCCESS = Fraction(2, 3)
# Norms within this of 1/2 count as a tie for the top eigenvector.
NORM_TOL = 1e-12


def _exact(x: float | int | Fraction) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(repr(float(x)))


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _top_eigenpair(matrix: np.ndarray) -> tuple[float, np.ndarray]:
    w, v = np.linalg.eigh(matrix)
    return float(w[-1]), v[:, -1]


def closest_rank_one(rho: DensityOperator) -> tuple[PureState, float]:
    """Top eigenvector of ρ and its trace-norm distance ``2(1 - ||ρ||)``.

    Raises:
        DomainError: ``||ρ|| <= 1/2``, where the closest pure state need not
            be unique.
    """
    top, vec = _top_eigenpair(rho.matrix)
    if top <= 0.5 + NORM_TOL:
        raise DomainError(f"operator norm {top!r} <= 1/2: closest pure state is not unique")
    return PureState(vec, rho.dims), 2 * (1 - top)


@dataclass(frozen=True)
class ProductApproximation:
    """Best product approximation ``ψ_A ⊗ ψ_B`` from the top local eigenvectors.

    ``distance`` is the Hilbert-Schmidt distance ``||ψψ† - φφ†||_2``, equal
    to ``√(2(1 - ||ρ_A||))``. ``trace_norm_distance`` is the trace norm of
    the same difference, ``2√(1 - ||ρ_A||)``.
    """

    state: BipartiteState
    local_a: np.ndarray
    local_b: np.ndarray
    norm_a: float
    distance: float
    trace_norm_distance: float


def product_approximation(psi: BipartiteState) -> ProductApproximation:
    """Product of the top eigenvectors of the two reductions.

    Raises:
        DomainError: ``||ρ_A|| <= 1/2``.
    """
    m = psi.coefficient_matrix()
    u, s, vh = np.linalg.svd(m)
    top = float(s[0] ** 2)
    if top <= 0.5 + NORM_TOL:
        raise DomainError(f"||rho_A|| = {top!r} <= 1/2: top eigenvectors are not unique")
    a, b = u[:, 0], vh[0]
    phase = np.vdot(np.kron(a, b), psi.state.amplitudes)
    b = b * (phase / abs(phase))
    prod = BipartiteState.from_amplitudes(np.kron(a, b), psi.split)
    gap = max(0.0, 1 - top)
    return ProductApproximation(prod, a, b, top, math.sqrt(2 * gap), 2 * math.sqrt(gap))


def pure_state_distances(psi: np.ndarray, phi: np.ndarray) -> tuple[float, float]:
    """(Hilbert-Schmidt, trace-norm) distances between two pure states, directly."""
    diff = as_matrix(np.asarray(psi)) - as_matrix(np.asarray(phi))
    return float(np.linalg.norm(diff)), trace_norm(diff)


def pct_budget(d: int, epsilon: float) -> int:
    """ceil(d/ε²): principal-component tomography copies with constant 1."""
    eps = _exact(epsilon)
    if not 0 < eps <= 1:
        raise DomainError(f"epsilon must lie in (0, 1], got {epsilon}")
    return _ceil(Fraction(d) / eps**2)


def teleportation_cost(n: int, copies: int) -> int:
    """Ebits to teleport ``copies`` n-qubit states: n per copy."""
    if n < 0 or copies < 0:
        raise DomainError(f"n and copies must be non-negative, got {n}, {copies}")
    return n * copies


def simulate_teleportation(state: np.ndarray) -> tuple[float, tuple[float, ...]]:
    """Teleport one qubit through a Bell pair; return (worst fidelity, outcome probabilities).

    Qubit 0 holds the input, qubits 1 and 2 the shared pair. Alice applies
    CNOT(0→1) and H(0), measures both, and Bob corrects with X^{m1} Z^{m0}.
    """
    v = np.asarray(state, dtype=complex)
    v = v / np.linalg.norm(v)
    bell = (ket("00") + ket("11")) / math.sqrt(2)
    psi = np.kron(v, bell).reshape(2, 2, 2)
    psi = psi.copy()
    psi[1] = psi[1][::-1].copy()  # CNOT with control 0, target 1
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    psi = np.einsum("ia,abc->ibc", h, psi)
    x = np.array([[0, 1], [1, 0]])
    z = np.diag([1, -1])
    worst, probs = 1.0, []
    for m0 in (0, 1):
        for m1 in (0, 1):
            bob = psi[m0, m1]
            p = float(np.vdot(bob, bob).real)
            probs.append(p)
            out = np.linalg.matrix_power(z, m0) @ np.linalg.matrix_power(x, m1) @ bob / math.sqrt(p)
            worst = min(worst, float(abs(np.vdot(v, out)) ** 2))
    return worst, tuple(probs)


@dataclass(frozen=True)
class TomographyPlan:
    n: int
    epsilon: float
    branch: str
    total_copies: int
    branch_copies: int
    product_copies: int
    distill_and_teleport_copies: int
    distillation_copies: int
    distillation_cap: int
    teleport_ebits: int
    tomography_copies: int
    principal_a: int
    principal_b: int
    product_epsilon: float
    distillation_success: float

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "epsilon": self.epsilon,
            "branch": self.branch,
            "total_copies": self.total_copies,
            "branch_copies": self.branch_copies,
            "product_copies": self.product_copies,
            "distill_and_teleport_copies": self.distill_and_teleport_copies,
            "distillation_copies": self.distillation_copies,
            "distillation_cap": self.distillation_cap,
            "teleport_ebits": self.teleport_ebits,
            "tomography_copies": self.tomography_copies,
            "principal_a": self.principal_a,
            "principal_b": self.principal_b,
            "product_epsilon": self.product_epsilon,
            "distillation_success": self.distillation_success,
        }


def locc_tomography_plan(
    n: int, epsilon: float, k_n: int, k_a: int, k_b: int, s_min: float | None = None
) -> TomographyPlan:
    """Copy budget for two-party LOCC tomography of an n-qubit pure state.

    Branch ``product_approximation`` (``S_min <= ε²/8``): both parties run
    principal-component tomography at accuracy ε/4, ``K_A + K_B`` copies.
    Branch ``distill_and_teleport``: distill ``n·K_n`` ebits from
    ``k = 4nK_n/S_min`` copies (at most ``32nK_n/ε²``), teleport K_n copies
    and run full tomography. ``total_copies`` is the larger of the two
    branch costs, ``max{(32n/ε² + 1)K_n, K_A + K_B}``, which covers either
    outcome of the branch test; ``branch_copies`` is the cost of the branch
    actually selected. With ``s_min=None`` the distillation count falls back
    to the cap.
    """
    eps = _exact(epsilon)
    if not 0 < eps < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    if n < 1 or min(k_n, k_a, k_b) < 1:
        raise DomainError("n and all tomography budgets must be positive")
    if s_min is not None and s_min < 0:
        raise DomainError(f"s_min must be non-negative, got {s_min}")

    cap = _ceil(32 * n * k_n / eps**2)
    product = k_a + k_b
    combined = _ceil((32 * n / eps**2 + 1) * k_n)
    if s_min is not None and _exact(s_min) <= eps**2 / 8:
        branch = "product_approximation"
        distill = 0
    else:
        branch = "distill_and_teleport"
        distill = cap if s_min is None else min(cap, _ceil(4 * n * k_n / _exact(s_min)))
    teleport = distill + k_n if branch == "distill_and_teleport" else 0
    return TomographyPlan(
        n=n,
        epsilon=float(epsilon),
        branch=branch,
        total_copies=max(combined, product),
        branch_copies=product if branch == "product_approximation" else teleport,
        product_copies=product,
        distill_and_teleport_copies=combined,
        distillation_copies=distill,
        distillation_cap=cap,
        teleport_ebits=teleportation_cost(n, k_n) if branch == "distill_and_teleport" else 0,
        tomography_copies=k_n,
        principal_a=k_a,
        principal_b=k_b,
        product_epsilon=float(eps / 4),
        distillation_success=float(DISTILLATION_SUCCESS),
    )


@dataclass(frozen=True)
class RateBounds:
    distill_upper: float
    dilute_lower: float
    informative: bool

    def to_json(self) -> dict:
        return {
            "distill_upper": self.distill_upper,
            "dilute_lower": self.dilute_lower,
            "dilute_informative": self.informative,
        }


def rate_bounds(s1: float, n_a: int, p: float, epsilon: float) -> RateBounds:
    """Finite-ε rate bounds ``R_D <= S_1/(p-ε)`` and ``R_C >= p S_1 - n_A p ε``.

    The dilution bound is informative only when ``ε <= S_1/n_A``.

    Raises:
        DomainError: ``p <= ε``.
    """
    if p <= epsilon:
        raise DomainError(f"success probability p={p} must exceed epsilon={epsilon}")
    return RateBounds(s1 / (p - epsilon), p * s1 - n_a * p * epsilon, epsilon <= s1 / n_a)
