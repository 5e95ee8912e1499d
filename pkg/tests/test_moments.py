import math
from fractions import Fraction

import numpy as np
import pytest

from rlcmoments import maxent
from rlcmoments.enumeration import CodeParams
from rlcmoments.moments import (
    G_d_exact,
    G_d_upper,
    R_U,
    Regime,
    central_moment_bruteforce,
    central_moment_exact,
    k0,
    k1,
    k_in_range,
    mean_variance,
    monte_carlo_moment,
    pairing_count,
    predict_moment,
    predict_normalized,
    robust_sum,
    x_distribution,
)
from rlcmoments.subspaces import all_subspaces, even_space, is_robust, zero_space

P6 = CodeParams(6, Fraction(1, 3), Fraction(1, 3))
P8 = CodeParams(8, Fraction(1, 4), Fraction(1, 4))
P10 = CodeParams(10, Fraction(1, 5), Fraction(1, 5))

# exact central moments, confirmed by averaging over every parity-check matrix
FROZEN = {
    (6, 2): Fraction(45, 16),
    (6, 3): Fraction(225, 32),
    (6, 4): Fraction(13545, 256),
    (8, 2): Fraction(21, 4),
    (8, 3): Fraction(147, 8),
    (8, 4): Fraction(6027, 32),
}


def test_R_U_examples():
    assert R_U(even_space(2), P6) == Fraction(3, 16)
    # every projection of {0} is 0-dimensional: sum_j C(k,j)(-1)^(k-j) 2^(-r(k-j))
    for k in (1, 2, 3):
        r = P6.r
        assert R_U(zero_space(k), P6) == Fraction((2**r - 1) ** k, 2 ** (r * k))


@pytest.mark.parametrize("p", [P6, P8, P10], ids=["6", "8", "10"])
def test_non_robust_R_U_vanishes(p):
    for k in range(1, 5):
        for U in all_subspaces(k):
            if not is_robust(U):
                assert R_U(U, p) == 0


@pytest.mark.parametrize("p", [P6, P8, P10], ids=["6", "8", "10"])
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_exact_equals_bruteforce(p, k):
    assert central_moment_exact(p, k).value == central_moment_bruteforce(p, k)


@pytest.mark.parametrize("key", sorted(FROZEN))
def test_frozen_moments(key):
    n, k = key
    p = {6: P6, 8: P8}[n]
    assert central_moment_exact(p, k).value == FROZEN[key]


def test_decomposition():
    m = central_moment_exact(P6, 4)
    assert sum(m.decomposition.values()) == m.value
    assert all(v == 0 for U, v in m.decomposition.items() if not is_robust(U))
    assert m.decomposition[even_space(4)] != 0
    assert central_moment_exact(P6, 1).value == 0


def test_exact_order_guard():
    with pytest.raises(ValueError):
        central_moment_exact(P6, 6)


def test_mean_variance():
    assert mean_variance(P6) == (Fraction(15, 4), Fraction(45, 16))
    for p in (P6, P8, P10):
        mean, var = mean_variance(p)
        assert var <= mean
        dist = x_distribution(p)
        total = sum(dist.values())
        assert Fraction(sum(x * c for x, c in dist.items()), total) == mean
    big = CodeParams(60, Fraction(1, 3), Fraction(1, 2))
    mean, var = mean_variance(big)
    assert float(var / mean) == pytest.approx(1.0, abs=1e-9)


def test_x_distribution_total():
    dist = x_distribution(P6)
    assert sum(dist.values()) == 2 ** (P6.r * P6.n)
    assert max(dist) == 15  # K = 0 keeps the whole layer


def test_bruteforce_guard():
    with pytest.raises(ValueError):
        central_moment_bruteforce(CodeParams(12, Fraction(1, 3), Fraction(1, 6)), 2)


def test_monte_carlo_moment(rng):
    est, se = monte_carlo_moment(P6, 2, 10**5, rng)
    assert abs(est - 45 / 16) <= 4 * se
    est1, se1 = monte_carlo_moment(P6, 1, 10**5, rng)
    assert abs(est1) <= 4 * se1
    a = monte_carlo_moment(P8, 3, 5000, np.random.default_rng(9))
    b = monte_carlo_moment(P8, 3, 5000, np.random.default_rng(9))
    assert a == b


def test_monte_carlo_guard(rng):
    with pytest.raises(ValueError):
        monte_carlo_moment(CodeParams(32, Fraction(1, 4), Fraction(1, 4)), 2, 10, rng)


def test_k0_examples():
    assert k0(0.2, 0.3) == 3
    assert k0(0.2, 0.6) > 3
    # at m = 3 the condition reads lambda < 2 (F(3) - 1.5 h)
    edge = 2 * (maxent.F(3, 0.2) - 1.5 * maxent.h(0.2))
    assert edge == pytest.approx(0.5478, abs=1e-4)
    assert k0(0.2, edge - 1e-6) == 3 and k0(0.2, edge + 1e-6) > 3
    with pytest.raises(ValueError):
        k0(0.2, 0.8)


def test_k0_is_minimal():
    for g, lam in [(0.1, 0.3), (0.2, 0.65), (0.3, 0.85)]:
        kk = k0(g, lam)
        cond = lambda m: maxent.F(m, g) - (m - 1) * lam > m / 2 * (maxent.h(g) - lam)
        # m = 2 is an equality (F(2) = h), so the float check starts at 3
        assert cond(kk) and not any(cond(m) for m in range(3, kk))
        assert all(cond(m) for m in range(kk, kk + 10))


@pytest.mark.parametrize("gamma", [0.05, 0.15, 0.25, 0.35, 0.45])
def test_k0_nondecreasing_in_lambda(gamma):
    hg = maxent.h(gamma)
    vals = [k0(gamma, hg * j / 50) for j in range(1, 50)]
    assert vals == sorted(vals)


def test_k1():
    for g, lam in [(0.2, 0.3), (0.2, 0.6), (0.1, 0.4), (0.4, 0.9)]:
        kk = k1(g, lam)
        assert kk >= 3 and kk % 2 == 1
        p = CodeParams(10**5, Fraction(1, 5) if g == 0.2 else Fraction(g).limit_denominator(10), Fraction(lam).limit_denominator(10))
        for k in range(kk, kk + 20, 2):
            assert predict_moment(p, k).regime is Regime.EVEN
        for k in range(3, kk, 2):
            assert predict_moment(p, k).regime is Regime.ODD_MIXED


def test_pairing_count():
    assert [pairing_count(k) for k in (2, 4, 6, 8)] == [1, 3, 15, 105]
    assert pairing_count(3) == 0


def test_G_d_upper():
    p = CodeParams(300, Fraction(1, 5), Fraction(3, 10))
    assert G_d_upper(p, 4, 0) == 0.0
    k = 5
    want = p.n * (maxent.F(k, 0.2) - (k - 1) * 0.3) + k
    assert G_d_upper(p, k, k - 1) == pytest.approx(want, rel=1e-12)
    big = [G_d_upper(p, 8, d) for d in range(4, 8)]
    assert all(big[i + 1] - 2 * big[i] + big[i - 1] > 0 for i in range(1, len(big) - 1))
    with pytest.raises(ValueError):
        G_d_upper(p, 4, 4)


@pytest.mark.parametrize("p", [P6, P8, P10], ids=["6", "8", "10"])
def test_small_d_bound_holds_exactly(p):
    for k in (3, 4):
        for d in range(0, (k + 1) // 2):
            g = G_d_exact(p, k, d)
            if g:
                assert math.log2(g) <= G_d_upper(p, k, d) + 1e-9


def test_robust_sum_is_sum_of_G_d():
    for k in (2, 3, 4):
        assert robust_sum(P8, k) == sum(G_d_exact(P8, k, d) for d in range(k + 1))


def test_prediction_formulas():
    p = CodeParams(3000, Fraction(1, 5), Fraction(3, 10))
    n, lam = 3000, 0.3
    kk0 = k0(0.2, 0.3)
    lo = predict_moment(p, 2)
    assert lo.regime is Regime.PAIRING and lo.dominant_d == 1
    assert lo.log2_value == pytest.approx(math.log2(math.comb(n, 600)) - lam * n, rel=1e-12)
    hi = predict_moment(p, 4)
    assert 4 >= kk0 and hi.regime is Regime.EVEN and hi.dominant_d == 3
    assert hi.log2_value == pytest.approx(n * (maxent.F(4, 0.2) - 3 * lam) - 2 * math.log2(n), rel=1e-12)


def test_regime_switch_at_k0():
    p = CodeParams(10**5, Fraction(1, 5), Fraction(3, 5))
    kk0 = k0(0.2, 0.6)
    for k in range(2, 2 * kk0 + 4, 2):
        want = Regime.EVEN if k >= kk0 else Regime.PAIRING
        assert predict_moment(p, k).regime is want


def test_normalized_branches():
    p = CodeParams(3000, Fraction(1, 5), Fraction(3, 5))
    assert k0(0.2, 0.6) == 6
    assert predict_normalized(p, 3).branch == "o(1)"
    four = predict_normalized(p, 4)
    assert four.branch == "k!!" and four.value == 3.0
    assert predict_normalized(p, 6).branch == "growing"


def test_normalized_pairing_gap_shrinks():
    gaps = []
    # the exact gap is -2 log2(1 - 2^(-lambda n)), so n stays small enough to see it
    for n in (10, 20, 30, 40):
        p = CodeParams(n, Fraction(1, 5), Fraction(3, 5))
        pred = predict_moment(p, 4, safety=0.5)
        assert pred.regime is Regime.PAIRING
        _, var = mean_variance(p)
        gaps.append(abs(pred.log2_value - 2 * math.log2(var) - math.log2(3)))
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_k_range_guard():
    assert k_in_range(3000, 4)
    assert not k_in_range(100, 4)
    with pytest.raises(ValueError):
        predict_moment(CodeParams(60, Fraction(1, 5), Fraction(3, 10)), 4)
    with pytest.raises(ValueError):
        predict_moment(CodeParams(3000, Fraction(1, 5), Fraction(3, 10)), 1)


def test_robust_ratio_report(capsys):
    for p in (P6, P8, P10):
        for k in (2, 3, 4):
            ratio = robust_sum(p, k) / central_moment_exact(p, k).value
            print(f"robust-sum / moment at n={p.n} k={k}: {float(ratio):.4f}")
            assert ratio > 0
