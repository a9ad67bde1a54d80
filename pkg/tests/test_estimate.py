from fractions import Fraction
from itertools import product
from math import comb, prod

import pytest

from strongsim import FockState, OpCounter, count_states, estimate, haar_random_unitary, slos_gen
from strongsim.estimate import asymptotic_growth, average_growth_ratio, single_output_average

from conftest import brute_force_layer


def _single_output_ops(t):
    """Gather terms needed for one output: every nonzero t' <= t pays one per occupied mode."""
    return sum(
        sum(1 for x in sub if x)
        for sub in product(*(range(x + 1) for x in t))
    )


def test_state_counts_at_scale():
    assert count_states(12, 12) == 1_352_078
    assert count_states(24, 12) == 834_451_800
    assert estimate(12, 12).full_ops == 12 * 1_352_078


@pytest.mark.parametrize("m,n", [(1, 1), (2, 3), (3, 3), (4, 4), (5, 2)])
def test_average_matches_enumeration(m, n):
    layer = brute_force_layer(m, n)
    brute = Fraction(sum(_single_output_ops(t) for t in layer), len(layer))
    assert single_output_average(m, n) == brute


def test_small_values():
    assert single_output_average(1, 1) == 1
    assert single_output_average(4, 4) == Fraction(96, 7)


def test_average_matches_engine():
    m, n = 3, 3
    U = haar_random_unitary(m, 0)
    s = FockState((1, 1, 1))
    total = 0
    for t in brute_force_layer(m, n):
        counter = OpCounter()
        slos_gen([s], [t], U, counter=counter)
        total += counter.count
    assert Fraction(total, count_states(m, n)) == single_output_average(m, n)


def test_growth_ratio_tends_to_limit():
    assert asymptotic_growth(1.0) == pytest.approx(27 / 16, rel=1e-12)
    gaps = [abs(average_growth_ratio(1.0, n) - 27 / 16) for n in (10, 100, 1000, 10000)]
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[-1] < 1e-3
    assert average_growth_ratio(2.0, 5000) == pytest.approx(asymptotic_growth(2.0), rel=1e-3)


def test_estimate_fields():
    est = estimate(6, 4)
    sizes = [comb(k + 5, 5) for k in range(5)]
    assert est.state_count == sizes[-1]
    assert est.worst_single_ops == 4 * 8
    assert est.memory_bytes_full == 16 * sizes[-1]
    assert est.memory_bytes_rolling == 16 * (sizes[-1] + sizes[-2])
    assert est.memory_bytes_all_layers == 16 * sum(sizes)
    assert est.index_bytes == sum(sizes[k] * k for k in range(1, 5))
    assert est.as_dict()["theta"] == 1.5
    with pytest.raises(ValueError):
        estimate(0, 3)


def test_vacuum_estimate():
    est = estimate(3, 0)
    assert est.state_count == 1 and est.full_ops == 0 and est.worst_single_ops == 0
    assert est.avg_growth_ratio is None
