import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schurdistill.errors import DomainError
from schurdistill.quantum import (
    BipartiteState,
    DensityOperator,
    PureState,
    Spectrum,
    bell_pair,
    binary_entropy,
    fidelity,
    haar_state,
    ket,
    min_entropy,
    partial_trace,
    random_bipartite,
    random_density,
    renyi_entropy,
    schmidt,
    trace_distance,
    von_neumann_entropy,
)


def test_spectrum_sorting_and_validation():
    s = Spectrum((0.25, 0.75))
    assert s.values == (0.75, 0.25)
    assert s.gamma == pytest.approx(4 / 3)
    with pytest.raises(DomainError):
        Spectrum((0.5, 0.6))
    with pytest.raises(DomainError):
        Spectrum(())


def test_spectrum_parse_reports_column():
    assert Spectrum.parse(" 0.5, 0.5 ").values == (0.5, 0.5)
    with pytest.raises(DomainError, match="entry 2"):
        Spectrum.parse("0.5,abc")


def test_density_operator_validation():
    with pytest.raises(DomainError):
        DensityOperator(np.diag([0.5, 0.6]))
    with pytest.raises(DomainError):
        DensityOperator(np.diag([1.5, -0.5]))
    with pytest.raises(DomainError):
        DensityOperator(np.array([[0.5, 1.0], [0.0, 0.5]]))


def test_bell_reduction_is_maximally_mixed():
    rho = bell_pair().reduced_a()
    assert np.allclose(rho.matrix, np.eye(2) / 2)
    assert von_neumann_entropy(rho.spectrum()) == pytest.approx(1.0)


def test_partial_trace_matches_reduction(rng):
    psi = random_bipartite((2, 1), rng)
    rho = psi.state.density()
    rho = DensityOperator(rho.matrix, (4, 2))
    assert np.allclose(partial_trace(rho, [0]).matrix, psi.reduced_a().matrix)
    assert np.allclose(partial_trace(rho, [1]).matrix, psi.reduced_b().matrix)


def test_partial_trace_reorders_factors(rng):
    a, b, c = (random_density(2, rng) for _ in range(3))
    rho = DensityOperator(np.kron(np.kron(a.matrix, b.matrix), c.matrix), (2, 2, 2))
    assert np.allclose(partial_trace(rho, [2, 0]).matrix, np.kron(c.matrix, a.matrix))
    assert np.allclose(partial_trace(rho, []).matrix, [[1.0]])
    with pytest.raises(DomainError):
        partial_trace(rho, [3])


def test_schmidt_example_and_reconstruction(rng):
    psi = BipartiteState.from_amplitudes(np.sqrt([0.9, 0, 0, 0.1]), (1, 1))
    assert schmidt(psi).spectrum.values == pytest.approx((0.9, 0.1))
    for _ in range(10):
        psi = random_bipartite((2, 1), rng)
        dec = schmidt(psi)
        assert np.allclose(dec.reconstruct(), psi.state.amplitudes)


def test_reductions_share_spectrum(rng):
    for _ in range(20):
        psi = random_bipartite((2, 2), rng)
        assert psi.reduced_a().operator_norm() == pytest.approx(psi.reduced_b().operator_norm(), abs=1e-12)


def test_entropy_examples():
    s = Spectrum((0.5, 0.25, 0.25))
    assert von_neumann_entropy(s) == pytest.approx(1.5)
    assert min_entropy(s) == pytest.approx(1.0)
    assert renyi_entropy(s, "zero") == pytest.approx(math.log2(3))
    assert renyi_entropy(s, 2) == pytest.approx(-math.log2(0.375))
    assert binary_entropy(0.25) == pytest.approx(0.8112781244591328)
    assert binary_entropy(0) == 0.0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=6).filter(lambda v: sum(v) > 1e-3))
def test_renyi_monotone_in_alpha(raw):
    p = Spectrum(tuple(np.array(raw) / sum(raw)))
    alphas = [0, 0.5, 1, 2, 3, math.inf]
    values = [renyi_entropy(p, a) for a in alphas]
    assert all(a >= b - 1e-9 for a, b in zip(values, values[1:]))
    assert renyi_entropy(p, 2) <= 2 * min_entropy(p) + 1e-9


def test_distance_examples():
    mixed, zero = np.eye(2) / 2, np.diag([1.0, 0.0])
    assert trace_distance(mixed, zero) == pytest.approx(0.5)
    assert fidelity(mixed, zero) == pytest.approx(0.5)
    assert fidelity(PureState(ket("0")), PureState(ket("1"))) == 0.0


def test_fuchs_van_de_graaf(rng):
    for _ in range(50):
        r, s = random_density(3, rng), random_density(3, rng)
        f, t = fidelity(r, s), trace_distance(r, s)
        assert 1 - math.sqrt(f) <= t + 1e-9
        assert t <= math.sqrt(1 - f) + 1e-9


def test_haar_state_normalized(rng):
    psi = haar_state(16, rng)
    assert np.linalg.norm(psi.amplitudes) == pytest.approx(1.0)


def test_json_round_trips(rng):
    psi = haar_state(4, rng, (2, 2))
    assert np.allclose(PureState.from_json(psi.to_json()).amplitudes, psi.amplitudes)
    rho = random_density(2, rng)
    assert np.allclose(DensityOperator.from_json(rho.to_json()).matrix, rho.matrix)


def test_partial_trace_example():
    psi = BipartiteState.from_amplitudes(np.sqrt([0.9, 0, 0, 0.1]), (1, 1))
    assert np.allclose(psi.reduced_a().matrix, np.diag([0.9, 0.1]))


def test_renyi_two_on_maximally_mixed_qubit():
    assert renyi_entropy(Spectrum((0.5, 0.5)), 2) == pytest.approx(1.0)


def test_haar_first_moment_and_seeds():
    rng = np.random.default_rng(0)
    vecs = np.array([haar_state(4, rng).amplitudes for _ in range(2000)])
    mean = vecs.T @ vecs.conj() / len(vecs)
    assert trace_distance(mean, np.eye(4) / 4) <= 0.05
    a = haar_state(4, np.random.default_rng(1)).amplitudes
    b = haar_state(4, np.random.default_rng(2)).amplitudes
    assert np.linalg.norm(a - b) > 1e-6
