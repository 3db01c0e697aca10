import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schurdistill.distillation import (
    abort_probability,
    distill_law,
    dominance_check,
    ebit_distribution,
    exact_low_dimension_tail,
    guaranteed_rate,
    iid_density,
    joint_two_sided_law,
    maximally_mixed,
    perturbed_iid_density,
    probability_upper_bound,
    rate_statistics,
    regroup_copies,
    run_protocol_trials,
    simulate_protocol,
    tail_bound,
    tail_probability,
)
from schurdistill.errors import DomainError
from schurdistill.partitions import Partition, dim_symmetric_irrep, enumerate_partitions, plancherel
from schurdistill.quantum import BipartiteState, DensityOperator, Spectrum, bell_pair, random_bipartite
from schurdistill.schur_weyl import schur_law


def test_bell_law_examples():
    out = {o.partition: o for o in distill_law((0.5, 0.5), 2)}
    assert out[Partition(2)].probability == pytest.approx(0.75, abs=1e-12)
    assert out[Partition(2)].ebits == 0.0
    dist = ebit_distribution(distill_law((0.5, 0.5), 3))
    assert dist[1.0] == pytest.approx(0.5, abs=1e-12)


def test_bell_expected_ebits_oracle():
    # For the maximally mixed qubit, Pr(λ) = dimV·dimU^(2)/2^k.
    for k in (4, 8, 12):
        exact = sum(
            dim_symmetric_irrep(l) * (l[0] - (l[1] if len(l) > 1 else 0) + 1) / 2**k * math.log2(dim_symmetric_irrep(l))
            for l in enumerate_partitions(k, 2)
        )
        assert rate_statistics((0.5, 0.5), k).expected_ebits == pytest.approx(exact, rel=1e-12)


def test_tail_probability_type_and_values():
    out = distill_law((0.5, 0.5), 3)
    assert tail_probability(out, 5.0) == 0.0
    assert isinstance(tail_probability(out, 5.0), float)
    assert tail_probability(out, 0.0) == pytest.approx(1.0)


def test_guaranteed_rate_flags():
    g = guaranteed_rate(7.0, 128)
    assert g.in_regime
    assert g.rate == pytest.approx(7 / 4)
    assert g.boosted_probability == pytest.approx(math.sqrt(64 / 65))
    assert not guaranteed_rate(1.0, 4).in_regime
    boosted = guaranteed_rate(1.0, 1024, block=8)
    assert boosted.preconditions["s_min_at_least_6.5"]
    with pytest.raises(DomainError):
        guaranteed_rate(1.0, 0)


def test_probability_upper_bound_dominates_exact_law():
    spec = maximally_mixed(6)
    for k in (2, 3, 4):
        law = schur_law(spec, k)
        for lam, p in law.entries.items():
            assert p <= probability_upper_bound(lam, spec) + 1e-15


def test_plancherel_limit_of_law():
    # Large rank with k <= rank gives nearly Plancherel weights.
    law = schur_law(maximally_mixed(200), 3)
    for lam, p in law.entries.items():
        assert p == pytest.approx(float(plancherel(lam)), abs=0.02)


def test_tail_bound_calibration_point():
    assert tail_bound(91, 0.25) < 1 / 3
    for k in (8, 10, 12):
        assert exact_low_dimension_tail(maximally_mixed(k), k, 0.25) <= tail_bound(k, 0.25)


@settings(max_examples=20, deadline=None)
@given(raw=st.lists(st.floats(0.05, 1.0), min_size=1, max_size=3), k=st.integers(1, 8))
def test_dominance_random_spectra(raw, k):
    p = tuple(np.array(raw) / sum(raw))
    assert dominance_check(p, k).holds


def test_regroup_copies_matches_tensor_order(rng):
    a = [rng.normal(size=(2, 2)) for _ in range(2)]
    b = [rng.normal(size=(3, 3)) for _ in range(2)]
    interleaved = np.kron(np.kron(a[0], b[0]), np.kron(a[1], b[1]))
    grouped = np.kron(np.kron(a[0], a[1]), np.kron(b[0], b[1]))
    assert np.allclose(regroup_copies(interleaved, 2, 3, 2), grouped)


def test_iid_two_sided_law_never_aborts(rng):
    psi = random_bipartite((1, 1), rng)
    law = joint_two_sided_law(iid_density(psi, 3))
    assert abort_probability(law) == pytest.approx(0.0, abs=1e-12)
    assert sum(law.values()) == pytest.approx(1.0, abs=1e-12)


def test_perturbed_abort_bounded_by_delta(rng):
    psi = random_bipartite((1, 1), rng)
    junk = DensityOperator(np.eye(64) / 64, (2, 2) * 3)
    rho = perturbed_iid_density(psi, 3, 0.1, junk)
    assert abort_probability(joint_two_sided_law(rho)) <= 0.1 + 1e-12
    with pytest.raises(DomainError):
        joint_two_sided_law(DensityOperator(np.eye(8) / 8, (2, 4)), k=2)


def test_protocol_simulation_matches_law():
    psi = BipartiteState.from_amplitudes(np.sqrt([0.9, 0, 0, 0.1]), (1, 1))
    sim = simulate_protocol(psi, 4)
    law = schur_law((0.9, 0.1), 4)
    for o in sim.outcomes:
        assert o.probability == pytest.approx(law.prob(o.partition), abs=1e-12)
        if o.probability > 1e-12:
            assert o.fidelity == pytest.approx(1.0, abs=1e-10)


def test_protocol_trials_are_seeded():
    psi = bell_pair()
    a = run_protocol_trials(psi, 3, 200, seed=7)
    assert a == run_protocol_trials(psi, 3, 200, seed=7)
    assert sum(a.values()) == 200


def test_bell_rate_at_64():
    report = rate_statistics((0.5, 0.5), 64, thresholds=[0.75 * 64])
    assert 0 < report.thresholds[48.0] < 1
    assert report.expected_rate >= 1 - 5 * math.log2(65) / 64


def test_rank_twelve_high_dimension_probability():
    low = exact_low_dimension_tail(maximally_mixed(12), 12, 0.25)
    assert 1 - low >= 2 / 3


def test_guaranteed_rate_examples():
    g = guaranteed_rate(8.0, 2**8)
    assert g.rate == pytest.approx(2.0) and g.probability == pytest.approx(2 / 3)
    assert g.boosted_rate == pytest.approx(0.4)
    assert not guaranteed_rate(1.0, 4).preconditions["s_min_at_least_6.5"]


def test_probability_upper_bound_examples():
    assert probability_upper_bound((2, 1), (0.5, 0.5)) == pytest.approx(4 / 6 * math.exp(4.5))
    assert probability_upper_bound((1, 1), (0.5, 0.5)) == pytest.approx(0.5 * math.e**2)


def test_dominance_examples():
    assert dominance_check((0.7, 0.3), 5).holds
    res = dominance_check((0.5, 0.5), 2)
    at_one = dict(zip(res.thresholds, zip(res.tail_k, res.tail_next)))[1.0]
    assert at_one[0] == pytest.approx(0.0) and at_one[1] == pytest.approx(0.5)


def test_joint_two_sided_sample(rng):
    from schurdistill.distillation import joint_two_sided_sample

    la, lb, abort = joint_two_sided_sample(iid_density(bell_pair(), 2), rng)
    assert la == lb and not abort


def test_bell_run_reports_high_fidelity():
    from schurdistill.distillation import run_protocol, trial_rng

    for t in range(20):
        out = run_protocol(bell_pair(), 3, trial_rng(5, t))
        if out.partition == Partition(2, 1):
            assert out.fidelity >= 1 - 1e-8
            break
    else:
        pytest.fail("no (2,1) outcome in 20 seeded runs")


def test_law_vs_simulation_frequencies():
    psi = BipartiteState.from_amplitudes(np.sqrt([0.9, 0, 0, 0.1]), (1, 1))
    trials = 10_000
    counts = run_protocol_trials(psi, 4, trials, seed=2024)
    law = schur_law((0.9, 0.1), 4)
    for lam, count in counts.items():
        p = law.prob(lam)
        sigma = math.sqrt(p * (1 - p) / trials)
        assert abs(count / trials - p) <= 3 * sigma + 1e-12
