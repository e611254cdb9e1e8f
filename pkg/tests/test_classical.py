import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scatterwalk.classical import (
    ClassicalSearchSpec,
    Variant,
    average,
    blind_average,
    blind_pmf,
    blind_pmf_table,
    memory_average,
    memory_pmf,
    memory_pmf_table,
    monte_carlo_average,
    pmf_mean,
    simulate_steps,
)
from scatterwalk.errors import InvalidParameterError


def test_blind_basics():
    spec = ClassicalSearchSpec(5, 5)
    assert blind_pmf(spec, 1) == 1 and blind_average(spec) == 1
    assert blind_average(ClassicalSearchSpec(256, 1)) == 256
    assert blind_pmf(ClassicalSearchSpec(4, 1), 3) == pytest.approx(0.75 ** 2 * 0.25)
    assert blind_pmf(spec, 0) == 0


def test_blind_pmf_sums_to_one():
    table = blind_pmf_table(ClassicalSearchSpec(100, 3))
    assert abs(math.fsum(table) - 1) <= 1e-10


def test_memory_basics():
    assert memory_average(ClassicalSearchSpec(256, 1)) == 128.5
    assert memory_average(ClassicalSearchSpec(7, 7)) == 1
    spec = ClassicalSearchSpec(10, 3)
    assert memory_pmf(spec, 0) == 0 and memory_pmf(spec, 9) == 0
    table = memory_pmf_table(spec)
    assert len(table) == 8
    assert abs(math.fsum(table) - 1) <= 1e-10
    for k in range(1, 9):
        assert memory_pmf(spec, k) == pytest.approx(table[k - 1], rel=1e-12)


def test_memory_pmf_by_enumeration():
    # N=5, v=2: count orderings of {S,S,n,n,n}; first special at position k
    N, v = 5, 2
    spec = ClassicalSearchSpec(N, v)
    expected = {1: 2 / 5, 2: 3 / 5 * 2 / 4, 3: 3 / 5 * 2 / 4 * 2 / 3, 4: 3 / 5 * 2 / 4 * 1 / 3 * 1}
    for k, p in expected.items():
        assert memory_pmf(spec, k) == pytest.approx(p)


@pytest.mark.parametrize("N,v", [(10, 1), (256, 1), (1000, 7), (10_000, 1), (10_000, 50)])
def test_closed_forms_match_summation(N, v):
    assert abs(pmf_mean(memory_pmf_table(ClassicalSearchSpec(N, v))) - memory_average(ClassicalSearchSpec(N, v))) <= 1e-8
    assert abs(pmf_mean(blind_pmf_table(ClassicalSearchSpec(N, v))) - blind_average(ClassicalSearchSpec(N, v))) <= 1e-8


def test_memory_never_slower_than_blind():
    for N in range(1, 1001, 37):
        for v in range(1, N + 1, max(1, N // 7)):
            spec = ClassicalSearchSpec(N, v)
            assert memory_average(spec) <= blind_average(spec)


def test_averages_scale_linearly():
    for N in (100, 400, 2000):
        for v in (1, 2, 5):
            for fn in (blind_average, memory_average):
                ratio = fn(ClassicalSearchSpec(2 * N, v)) / fn(ClassicalSearchSpec(N, v))
                assert 1.99 <= ratio <= 2.01


@pytest.mark.parametrize("variant,expected", [(Variant.BLIND, 100.0), (Variant.MEMORY, 50.5)])
def test_monte_carlo_agrees(variant, expected):
    mean, err = monte_carlo_average(ClassicalSearchSpec(100, 1, variant), 100_000, seed=2024)
    assert abs(mean - expected) <= 3 * err


def test_monte_carlo_all_special():
    for variant in Variant:
        assert monte_carlo_average(ClassicalSearchSpec(6, 6, variant), 500, seed=1) == (1.0, 0.0)


def test_monte_carlo_is_deterministic():
    spec = ClassicalSearchSpec(50, 2, Variant.MEMORY)
    assert monte_carlo_average(spec, 1000, seed=9) == monte_carlo_average(spec, 1000, seed=9)


def test_invalid_spec():
    with pytest.raises(InvalidParameterError):
        ClassicalSearchSpec(3, 4)
    with pytest.raises(InvalidParameterError):
        monte_carlo_average(ClassicalSearchSpec(3, 1), 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 30).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n))),
       st.sampled_from(list(Variant)), st.integers(0, 2**32))
def test_simulated_draws_are_in_range(nv, variant, seed):
    N, v = nv
    spec = ClassicalSearchSpec(N, v, variant)
    steps = simulate_steps(spec, 200, np.random.default_rng(seed))
    assert steps.min() >= 1
    if variant is Variant.MEMORY:
        assert steps.max() <= N - v + 1
    assert average(spec) >= 1
