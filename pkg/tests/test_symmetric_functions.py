import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schurdistill.errors import DomainError
from schurdistill.partitions import Partition, dim_symmetric_irrep, dim_unitary_irrep, enumerate_partitions
from schurdistill.symmetric_functions import (
    character,
    character_table,
    class_size,
    cycle_type,
    power_sum,
    schur_polynomial,
    weighted_schur,
    z_constant,
)


def test_small_characters():
    assert character((2, 1), (3,)) == -1
    assert character((1, 1, 1), (2, 1)) == -1
    assert character((2, 1), (1, 1, 1)) == 2
    assert character((3,), (2, 1)) == 1
    with pytest.raises(DomainError):
        character((2,), (1,))


@pytest.mark.parametrize("k", range(1, 9))
def test_character_table_orthogonality(k):
    parts, table = character_table(k)
    kfact = math.factorial(k)
    sizes = [class_size(mu) for mu in parts]
    for a in range(len(parts)):
        for b in range(len(parts)):
            inner = sum(sizes[c] * table[a][c] * table[b][c] for c in range(len(parts)))
            assert inner == (kfact if a == b else 0)


@pytest.mark.parametrize("k", range(1, 10))
def test_identity_column_is_dimension(k):
    ident = Partition(*([1] * k))
    for lam in enumerate_partitions(k):
        assert character(lam, ident) == dim_symmetric_irrep(lam)


def test_sign_character():
    for perm in itertools.permutations(range(5)):
        mu = cycle_type(perm)
        sign = (-1) ** (5 - mu.rows)
        assert character((1, 1, 1, 1, 1), mu) == sign


def test_class_sizes_sum_to_factorial():
    for k in range(1, 9):
        assert sum(class_size(mu) for mu in enumerate_partitions(k)) == math.factorial(k)
    assert z_constant(Partition(2, 1)) == 2


def test_schur_examples():
    x = (0.5, 0.5)
    for method in ("jacobi-trudi", "frobenius"):
        assert schur_polynomial((2,), x, method) == pytest.approx(0.75, abs=1e-15)
        assert schur_polynomial((1, 1), x, method) == pytest.approx(0.25, abs=1e-15)
    assert schur_polynomial((1, 1, 1), x) == 0.0
    with pytest.raises(DomainError):
        schur_polynomial((1,), x, "bialternant")


def _monomial_expansion(lam, x):
    # s_λ(x) as the sum over semistandard tableaux of x^content.
    cells = [(i, j) for i, r in enumerate(lam) for j in range(r)]
    total = 0.0
    for vals in itertools.product(range(len(x)), repeat=len(cells)):
        fill = dict(zip(cells, vals))
        if all(
            (j == 0 or fill[(i, j - 1)] <= v) and (i == 0 or fill[(i - 1, j)] < v)
            for (i, j), v in fill.items()
        ):
            total += math.prod(x[v] for v in vals)
    return total


@settings(max_examples=30, deadline=None)
@given(
    x=st.lists(st.floats(0.0, 1.0), min_size=1, max_size=3),
    k=st.integers(1, 5),
)
def test_two_evaluators_agree_with_tableau_sum(x, k):
    for lam in enumerate_partitions(k):
        oracle = _monomial_expansion(lam, x)
        assert schur_polynomial(lam, x, "jacobi-trudi") == pytest.approx(oracle, abs=1e-10)
        assert schur_polynomial(lam, x, "frobenius") == pytest.approx(oracle, abs=1e-10)


def test_schur_at_ones_is_unitary_dimension():
    for d in (2, 3, 4):
        for lam in enumerate_partitions(6, d):
            assert schur_polynomial(lam, [1.0] * d) == pytest.approx(dim_unitary_irrep(lam, d), rel=1e-10)


def test_weighted_schur_sums_to_one():
    rng = np.random.default_rng(3)
    p = rng.dirichlet(np.ones(3))
    total = sum(weighted_schur(lam, p) for lam in enumerate_partitions(5, 3))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_power_sum():
    assert power_sum((2, 1), (0.5, 0.5)) == pytest.approx(0.5)
    assert power_sum((), (0.3, 0.7)) == 1.0


def test_class_size_examples():
    assert class_size((2, 1)) == 3
    for k in range(1, 7):
        cycles = sum(1 for p in itertools.permutations(range(k)) if cycle_type(p) == Partition(k))
        assert class_size((k,)) == cycles == math.factorial(k - 1)


def test_power_sum_example():
    assert power_sum((3,), (0.5, 0.5)) == pytest.approx(0.25)
