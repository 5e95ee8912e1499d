import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rlcmoments import maxent
from rlcmoments.enumeration import (
    BudgetExceeded,
    CodeParams,
    count_T,
    count_T_bar,
    count_T_exhaustive,
    estimate_prob_T,
    exact_prob_T,
    image_counts,
    layer,
    log2_T_asymptotic,
    loglog_slope,
)
from rlcmoments.subspaces import Subspace, all_subspaces, even_space, full_space, zero_space

P6 = CodeParams(6, Fraction(1, 3), Fraction(1, 3))


def even3_count(n, w):
    """|T_{E^3}|: the three nonzero column types each appear w/2 times."""
    a = w // 2
    return math.factorial(n) // (math.factorial(a) ** 3 * math.factorial(n - 3 * a))


def test_params_validation():
    p = CodeParams(12, "1/3", "1/4")
    assert (p.w, p.r) == (4, 3)
    for bad in [(6, Fraction(1, 2), Fraction(1, 3)), (9, Fraction(1, 3), Fraction(1, 3)),
                (6, Fraction(1, 6), Fraction(1, 3)), (6, Fraction(1, 3), Fraction(1, 4)),
                (12, Fraction(1, 6), Fraction(3, 4)), (0, Fraction(1, 3), Fraction(1, 3))]:
        with pytest.raises(ValueError):
            CodeParams(*bad)


def test_layer():
    L = layer(6, 2)
    assert len(L) == 15 and all(bin(x).count("1") == 2 for x in L)


def test_known_counts():
    assert count_T(even_space(2), P6).value == 15
    assert count_T(even_space(3), P6).value == 120
    assert count_T(zero_space(3), P6).value == 0
    assert count_T(full_space(2), P6).value == 15 * 15


@pytest.mark.parametrize("n,w", [(6, 2), (12, 4), (24, 8), (48, 16)])
def test_even_space_closed_forms(n, w):
    p = CodeParams(n, Fraction(w, n), Fraction(1, n))
    assert count_T(even_space(2), p).value == math.comb(n, w)
    assert count_T(even_space(3), p).value == even3_count(n, w)


@pytest.mark.parametrize("k", [2, 3])
def test_dp_matches_exhaustive_everywhere(k):
    p = CodeParams(6, Fraction(1, 3), Fraction(1, 6))
    for V in all_subspaces(k):
        assert count_T(V, p).value == count_T_exhaustive(V, p).value


@st.composite
def small_instances(draw):
    n, w = draw(st.sampled_from([(5, 2), (6, 2), (8, 2), (10, 2), (10, 4)]))
    k = draw(st.integers(1, 20 // n))
    vecs = draw(st.lists(st.integers(0, (1 << k) - 1), max_size=k))
    return Subspace.span(k, vecs), CodeParams(n, Fraction(w, n), Fraction(1, n))


@settings(max_examples=40, deadline=None)
@given(small_instances())
def test_dp_matches_exhaustive_random(inst):
    V, p = inst
    assert count_T(V, p).value == count_T_exhaustive(V, p).value


def test_image_counts_and_inversion():
    direct = image_counts(3, P6)
    assert sum(direct.values()) == 15**3
    for U in all_subspaces(3):
        assert count_T_bar(U, P6).value == direct.get(U, 0)


def test_budget_guards():
    with pytest.raises(BudgetExceeded):
        count_T(full_space(4), CodeParams(48, Fraction(1, 3), Fraction(1, 48)), budget=1e3)
    with pytest.raises(BudgetExceeded):
        count_T_exhaustive(even_space(4), CodeParams(8, Fraction(1, 4), Fraction(1, 8)))
    with pytest.raises(BudgetExceeded):
        image_counts(4, CodeParams(12, Fraction(1, 3), Fraction(1, 12)))


@pytest.mark.parametrize("n", [12, 24, 48, 96])
def test_exact_probability_k3(n):
    w = n // 3
    want = 2.0 ** (math.log2(even3_count(n, w)) - n * maxent.F(3, 1 / 3))
    assert exact_prob_T(3, n, Fraction(1, 3)) == pytest.approx(want, rel=1e-12)


def test_exact_probability_scaling():
    p3 = [exact_prob_T(3, n, Fraction(1, 3)) for n in (12, 24, 48, 96)]
    p4 = [exact_prob_T(4, n, Fraction(1, 3)) for n in (12, 24, 48)]
    assert -1.65 <= loglog_slope((12, 24, 48, 96), p3) <= -1.35
    assert -2.25 <= loglog_slope((12, 24, 48), p4) <= -1.75


def test_probability_is_count_times_pi():
    # at k=2 pi(A) = 2^(-n h(gamma)) on T, so Pr = C(n, w) 2^(-n h)
    n = 30
    want = math.comb(n, 10) * 2.0 ** (-n * maxent.h(1 / 3))
    assert exact_prob_T(2, n, Fraction(1, 3)) == pytest.approx(want, rel=1e-12)


def test_monte_carlo_agrees_with_exact(rng):
    est, se = estimate_prob_T(3, 24, Fraction(1, 3), 10**6, rng)
    assert abs(est - exact_prob_T(3, 24, Fraction(1, 3))) <= 4 * se


def test_monte_carlo_independent_of_workers():
    a = estimate_prob_T(3, 12, Fraction(1, 3), 50_000, np.random.default_rng(3), workers=1, batch_size=8192)
    b = estimate_prob_T(3, 12, Fraction(1, 3), 50_000, np.random.default_rng(3), workers=2, batch_size=8192)
    assert a == b


def test_monte_carlo_no_hits():
    est, se = estimate_prob_T(4, 48, Fraction(1, 3), 10, np.random.default_rng(0))
    assert est == 0.0 and se > 0.0


def test_asymptotic_centre():
    p = CodeParams(48, Fraction(1, 3), Fraction(1, 48))
    exact = math.log2(count_T(even_space(3), p).value)
    assert abs(exact - log2_T_asymptotic(3, p)) < 3 * 3  # O(k) window
    assert abs(math.log2(math.comb(48, 16)) - log2_T_asymptotic(2, p)) < 2


def test_probability_guards():
    with pytest.raises(ValueError):
        exact_prob_T(3, 9, Fraction(1, 3))
    with pytest.raises(ValueError):
        estimate_prob_T(1, 12, Fraction(1, 3), 10, np.random.default_rng(0))
