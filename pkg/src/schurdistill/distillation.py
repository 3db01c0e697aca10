"""Exact outcome laws and bound checks for the weak-Schur-sampling distiller.

Alice and Bob each apply weak Schur sampling to their halves of ``ψ^{⊗k}``,
obtain the same label λ, and keep ``log2 dim V_λ`` ebits. Everything here is
either an exact enumeration over partitions or a dense simulation small
enough to check against one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DomainError
from .partitions import Partition, dim_symmetric_irrep, dim_unitary_irrep, enumerate_partitions, plancherel
from .quantum import BipartiteState, DensityOperator, Spectrum, min_entropy
from .schur_weyl import (
    SchurLaw,
    _block_basis,
    check_dense_cap,
    irrep_projectors,
    kfold_coefficients,
    maximally_entangled_fidelity,
    schur_law,
    tensor_power,
)

DOMINANCE_SLACK = 1e-10
BASE_SUCCESS = 2 / 3
BOOSTED_SUCCESS = math.sqrt(64 / 65)
REGIME_THRESHOLD = 13 / 2
BOOST_REPETITIONS = 5


@dataclass(frozen=True)
class DistillationOutcome:
    partition: Partition
    ebits: float
    probability: float

    def to_json(self) -> dict:
        return {"lambda": self.partition.to_json(), "ebits": self.ebits, "prob": self.probability}


def ebits_of(lam: Partition) -> float:
    return math.log2(dim_symmetric_irrep(Partition.of(lam)))


def outcomes_from_law(law: SchurLaw) -> list[DistillationOutcome]:
    return [DistillationOutcome(lam, ebits_of(lam), p) for lam, p in law.entries.items()]


def distill_law(spectrum, k: int, cap: int | None = None) -> list[DistillationOutcome]:
    """Every weak Schur sampling outcome with its ebit yield and probability."""
    return outcomes_from_law(schur_law(spectrum, k, cap))


def ebit_distribution(outcomes: Sequence[DistillationOutcome]) -> dict[float, float]:
    """Probability of each distinct ebit count, ascending."""
    dist: dict[float, float] = {}
    for o in outcomes:
        dist[o.ebits] = dist.get(o.ebits, 0.0) + o.probability
    return dict(sorted(dist.items()))


def tail_probability(outcomes: Sequence[DistillationOutcome], threshold: float) -> float:
    """Pr(ebits >= threshold)."""
    return math.fsum(o.probability for o in outcomes if o.ebits >= threshold)


# -- guaranteed rates ------------------------------------------------------------


@dataclass(frozen=True)
class GuaranteedRate:
    """Rate promised by the min-entropy analysis and whether it applies.

    ``block`` is the coherent-boosting block length l: the protocol runs on
    ``ψ^{⊗l}`` (min-entropy ``l·S_min``) with ``k/l`` copies, and the rate
    is reported per copy of ψ.
    """

    s_min: float
    k: int
    block: int
    rate: float
    probability: float
    boosted_rate: float
    boosted_probability: float
    preconditions: dict[str, bool]

    @property
    def in_regime(self) -> bool:
        return all(self.preconditions.values())

    def to_json(self) -> dict:
        return {
            "s_min": self.s_min,
            "k": self.k,
            "block": self.block,
            "rate": self.rate,
            "probability": self.probability,
            "boosted_rate": self.boosted_rate,
            "boosted_probability": self.boosted_probability,
            "preconditions": dict(sorted(self.preconditions.items())),
            "in_regime": self.in_regime,
        }


def guaranteed_rate(s_min: float, k: int, block: int = 1) -> GuaranteedRate:
    """min{S_min, log2 k}/4 at success 2/3, and the five-run boosted figure.

    Out-of-regime inputs still get the arithmetic value; the precondition
    flags say whether the success probability is actually backed.
    """
    if k < 1 or block < 1:
        raise DomainError(f"k and block must be positive, got k={k}, block={block}")
    eff_smin = block * s_min
    eff_k = k / block
    log_k = math.log2(eff_k)
    per_run = min(eff_smin, log_k) / 4
    flags = {
        "s_min_at_least_6.5": eff_smin >= REGIME_THRESHOLD,
        "log2_k_at_least_6.5": log_k >= REGIME_THRESHOLD,
        "k_at_most_2^s_min": log_k <= eff_smin,
    }
    return GuaranteedRate(
        s_min, k, block,
        per_run / block, BASE_SUCCESS,
        per_run / BOOST_REPETITIONS / block, BOOSTED_SUCCESS,
        flags,
    )


# -- rate statistics --------------------------------------------------------------


@dataclass(frozen=True)
class RateReport:
    k: int
    spectrum: tuple[float, ...]
    s_min: float
    expected_ebits: float
    thresholds: dict[float, float]
    guaranteed: GuaranteedRate
    outcomes: list[DistillationOutcome] = field(repr=False)

    @property
    def expected_rate(self) -> float:
        return self.expected_ebits / self.k if self.k else 0.0

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "spectrum": list(self.spectrum),
            "s_min": self.s_min,
            "expected_ebits": self.expected_ebits,
            "expected_rate": self.expected_rate,
            "thresholds": [{"t": t, "prob": p} for t, p in self.thresholds.items()],
            "guaranteed": self.guaranteed.to_json(),
            "outcomes": [o.to_json() for o in self.outcomes],
        }

    def csv_rows(self) -> list[dict]:
        return [
            {"k": self.k, "lambda": " ".join(map(str, o.partition)), "prob": o.probability, "ebits": o.ebits}
            for o in self.outcomes
        ]


def rate_statistics(spectrum, k: int, thresholds: Sequence[float] = (), cap: int | None = None) -> RateReport:
    """Exact E[ebits], Pr(ebits >= t) and the guaranteed-rate accounting."""
    spec = spectrum if isinstance(spectrum, Spectrum) else Spectrum(tuple(spectrum))
    outcomes = distill_law(spec, k, cap)
    expected = sum(o.probability * o.ebits for o in outcomes)
    tails = {float(t): tail_probability(outcomes, t) for t in sorted(thresholds)}
    s_min = min_entropy(spec)
    return RateReport(k, spec.values, s_min, expected, tails, guaranteed_rate(s_min, max(k, 1)), outcomes)


# -- the inequality chain --------------------------------------------------------


def probability_upper_bound(lam: Sequence[int], spectrum, k: int | None = None) -> float:
    """μ(λ)·e^{k²/γ} with μ the Plancherel weight and γ = 1/max(spectrum).

    Bounds Pr(λ) from above; it is only useful when ``k <= γ``.
    """
    lam = Partition.of(lam)
    k = lam.weight if k is None else k
    top = max(getattr(spectrum, "values", spectrum))
    if top <= 0:
        raise DomainError("spectrum has no positive entry")
    return float(plancherel(lam)) * math.exp(k * k * top)


def log_tail_bound(k: int, c: float) -> float:
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    ln_k = math.log(k)
    return k + 2 * c * k * ln_k - math.lgamma(k + 1) + math.pi * math.sqrt(2 * k / 3) - 0.75 * ln_k


def tail_bound(k: int, c: float) -> float:
    """e^k · e^{2ck ln k}/k! · e^{π√(2k/3)}/k^{3/4}.

    Bounds Pr(dim V_λ <= 2^{ck log2 k}) when ``k <= γ``. The exponent uses
    the natural log: ``e^{2ck ln k} = 2^{2ck log2 k}`` is exactly the square
    of the dimension threshold, which is what the Plancherel sum needs.
    """
    return math.exp(log_tail_bound(k, c))


def exact_low_dimension_tail(spectrum, k: int, c: float) -> float:
    """Pr(dim V_λ <= 2^{ck log2 k}) under the exact law."""
    limit = c * k * math.log2(k)
    return sum(o.probability for o in distill_law(spectrum, k) if o.ebits <= limit + 1e-12)


def maximally_mixed(rank: int) -> Spectrum:
    return Spectrum((1.0 / rank,) * rank)


# -- monotonicity ------------------------------------------------------------------


@dataclass(frozen=True)
class DominanceResult:
    k: int
    holds: bool
    worst_slack: float
    thresholds: tuple[float, ...]
    tail_k: tuple[float, ...]
    tail_next: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "holds": self.holds,
            "worst_slack": self.worst_slack,
            "rows": [
                {"t": t, "tail_k": a, "tail_k_plus_1": b}
                for t, a, b in zip(self.thresholds, self.tail_k, self.tail_next)
            ],
        }


def dominance_check(spectrum, k: int, slack: float = DOMINANCE_SLACK) -> DominanceResult:
    """Check Pr_{k+1}(ebits >= t) >= Pr_k(ebits >= t) for every t in the joint support."""
    now, nxt = distill_law(spectrum, k), distill_law(spectrum, k + 1)
    support = sorted({o.ebits for o in now} | {o.ebits for o in nxt})
    tail_now = tuple(tail_probability(now, t) for t in support)
    tail_next = tuple(tail_probability(nxt, t) for t in support)
    worst = max((a - b for a, b in zip(tail_now, tail_next)), default=0.0)
    return DominanceResult(k, worst <= slack, worst, tuple(support), tail_now, tail_next)


# -- two-sided measurement on arbitrary k-copy states ------------------------------


def _split_dims(rho_k: DensityOperator, k: int | None) -> tuple[int, int, int]:
    dims = rho_k.dims
    if len(dims) < 2 or len(dims) % 2:
        raise DomainError(f"expected (A, B) factor pairs, got dims {dims}")
    d_a, d_b = dims[0], dims[1]
    if dims != (d_a, d_b) * (len(dims) // 2):
        raise DomainError(f"dims {dims} are not an (A, B) pattern repeated k times")
    kk = len(dims) // 2
    if k is not None and k != kk:
        raise DomainError(f"state has {kk} copies, expected {k}")
    return d_a, d_b, kk


def regroup_copies(matrix: np.ndarray, d_a: int, d_b: int, k: int) -> np.ndarray:
    """Reorder a ``(AB)^{⊗k}`` operator to ``A^{⊗k} ⊗ B^{⊗k}``."""
    order = list(range(0, 2 * k, 2)) + list(range(1, 2 * k, 2))
    t = matrix.reshape((d_a, d_b) * k * 2)
    t = t.transpose(order + [2 * k + o for o in order])
    dim = (d_a * d_b) ** k
    return t.reshape(dim, dim)


def joint_two_sided_law(
    rho_k: DensityOperator, k: int | None = None, cap: int | None = None
) -> dict[tuple[Partition, Partition], float]:
    """tr[(Π_{λ_A} ⊗ Π_{λ_B}) ρ_k] for all label pairs, A labels outermost.

    ``rho_k`` must carry dims ``(d_A, d_B, d_A, d_B, ...)``: copy-major order.
    """
    d_a, d_b, k = _split_dims(rho_k, k)
    dim_a, dim_b = d_a**k, d_b**k
    check_dense_cap(dim_a * dim_b, cap, "two-sided k-copy state")
    r4 = regroup_copies(rho_k.matrix, d_a, d_b, k).reshape(dim_a, dim_b, dim_a, dim_b)
    law = {}
    for la, pa in irrep_projectors(d_a, k).items():
        # Contract the A side once per λ_A.
        left = np.einsum("ac,cdab->db", pa.matrix, r4)
        for lb, pb in irrep_projectors(d_b, k).items():
            law[(la, lb)] = float(np.real(np.sum(pb.matrix * left)))
    return law


@dataclass(frozen=True)
class TwoSidedOutcome:
    lambda_a: Partition
    lambda_b: Partition

    @property
    def abort(self) -> bool:
        return self.lambda_a != self.lambda_b


def abort_probability(law: dict[tuple[Partition, Partition], float]) -> float:
    return sum(p for (la, lb), p in law.items() if la != lb)


def sample_from(probabilities: Sequence[float], rng: np.random.Generator, size: int | None = None):
    """Inverse-CDF sampling over a fixed outcome order."""
    cdf = np.cumsum(np.clip(probabilities, 0.0, None))
    u = rng.random(size) * cdf[-1]
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)


def sample_two_sided(
    law: dict[tuple[Partition, Partition], float], rng: np.random.Generator, size: int
) -> list[TwoSidedOutcome]:
    keys = list(law)
    picks = sample_from([law[key] for key in keys], rng, size)
    return [TwoSidedOutcome(*keys[i]) for i in picks]


def joint_two_sided_sample(
    rho_k: DensityOperator, rng: np.random.Generator, k: int | None = None, cap: int | None = None
) -> tuple[Partition, Partition, bool]:
    """Sample ``(λ_A, λ_B, abort)`` from the exact two-sided law."""
    out = sample_two_sided(joint_two_sided_law(rho_k, k, cap), rng, 1)[0]
    return out.lambda_a, out.lambda_b, out.abort


def iid_density(psi: BipartiteState, k: int) -> DensityOperator:
    """``(ψψ†)^{⊗k}`` with dims in copy-major ``(A, B)`` order."""
    v = tensor_power(psi.state.amplitudes, k)
    return DensityOperator(np.outer(v, v.conj()), (psi.dim_a, psi.dim_b) * k)


def perturbed_iid_density(
    psi: BipartiteState, k: int, delta: float, junk: DensityOperator
) -> DensityOperator:
    """``(1-δ)(ψψ†)^{⊗k} + δ·junk``, trace distance at most δ from i.i.d."""
    if not 0 <= delta <= 1:
        raise DomainError(f"delta must lie in [0, 1], got {delta}")
    base = iid_density(psi, k)
    if junk.dim != base.dim:
        raise DomainError(f"junk dimension {junk.dim} != {base.dim}")
    return DensityOperator((1 - delta) * base.matrix + delta * junk.matrix, base.dims)


# -- full protocol simulation -----------------------------------------------------


@dataclass(frozen=True)
class ProtocolOutcome:
    partition: Partition
    ebits: float
    probability: float
    fidelity: float

    def to_json(self) -> dict:
        return {
            "lambda": self.partition.to_json(),
            "ebits": self.ebits,
            "prob": self.probability,
            "fidelity": self.fidelity,
        }


@dataclass(frozen=True)
class ProtocolSimulation:
    """Measured label masses and extracted-state fidelities for ``ψ^{⊗k}``.

    Probabilities are the simulated masses ``||(Π_λ^A ⊗ I) ψ^{⊗k}||²``, not
    the Schur-polynomial formula, so they serve as an independent check.
    """

    k: int
    outcomes: tuple[ProtocolOutcome, ...]

    def sample(self, rng: np.random.Generator) -> ProtocolOutcome:
        return self.outcomes[int(sample_from([o.probability for o in self.outcomes], rng))]


def simulate_protocol(psi: BipartiteState, k: int, cap: int | None = None) -> ProtocolSimulation:
    """Dense simulation: measure λ on A, project B, rotate to the Schur basis.

    The fidelity is that of the normalized V_λ ⊗ V_λ component with
    ``|φ+⟩`` of dimension dim V_λ once the U_λ factors are discarded.
    """
    d_a, d_b = psi.dim_a, psi.dim_b
    check_dense_cap(d_a**k * d_b**k, cap, "k-fold bipartite state")
    return _simulate(psi.state.amplitudes.tobytes(), psi.split, k)


@lru_cache(maxsize=32)
def _simulate(raw: bytes, split: tuple[int, int], k: int) -> ProtocolSimulation:
    psi = BipartiteState.from_amplitudes(np.frombuffer(raw, dtype=complex), split)
    d_a, d_b = psi.dim_a, psi.dim_b
    m = kfold_coefficients(psi, k)
    proj_b = irrep_projectors(d_b, k)
    basis_a, basis_b = _block_basis(d_a, k), _block_basis(d_b, k)
    outs = []
    for lam, pa in irrep_projectors(d_a, k).items():
        measured = pa.matrix @ m
        prob = float(np.linalg.norm(measured) ** 2)
        fid = 1.0
        if prob > 1e-14 and lam in proj_b:
            coeff = basis_a.blocks[lam].T @ measured @ basis_b.blocks[lam]
            fid = maximally_entangled_fidelity(
                coeff, dim_unitary_irrep(lam, d_a), dim_unitary_irrep(lam, d_b), dim_symmetric_irrep(lam)
            )
        outs.append(ProtocolOutcome(lam, ebits_of(lam), prob, fid))
    return ProtocolSimulation(k, tuple(outs))


def run_protocol(
    psi: BipartiteState, k: int, rng: np.random.Generator, cap: int | None = None
) -> ProtocolOutcome:
    """One run: sampled label, ebit yield and extracted-state fidelity."""
    return simulate_protocol(psi, k, cap).sample(rng)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Per-trial generator derived from the root seed and trial index."""
    return np.random.default_rng([seed, trial])


def run_protocol_trials(
    psi: BipartiteState, k: int, trials: int, seed: int, cap: int | None = None
) -> dict[Partition, int]:
    """Outcome counts over independent seeded runs, in canonical label order."""
    sim = simulate_protocol(psi, k, cap)
    counts = {o.partition: 0 for o in sim.outcomes}
    for t in range(trials):
        counts[sim.sample(trial_rng(seed, t)).partition] += 1
    return counts
