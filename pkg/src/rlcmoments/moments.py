"""Central moments of X = |C ∩ L| for the random code C = ker K.

Exact small-instance values come from the subspace expansion
E(X - EX)^k = sum_U |T-bar_U| R_U and, independently, from averaging over
every parity-check matrix K.  Asymptotic predictions compare the pairing
term with the even-space term at leading order in n.
"""

from __future__ import annotations

import enum
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import maxent
from .enumeration import CodeParams, count_T, layer
from .gf2core import projected_dim
from .subspaces import Subspace, all_subspaces, is_robust, mobius_coefficient, subspaces_of

BRUTEFORCE_MAX_BITS = 20
K_RANGE_SAFETY = 8.0
# linear exponents closer than this count as tied; ties go to the term with
# the larger log n coefficient, which is never the even-space term
TIE_TOL = 1e-12


def R_U(U: Subspace, p: CodeParams) -> Fraction:
    """Signed sum over coordinate subsets attached to U.

    R_U = sum_I (-1)^(k-|I|) 2^(-r (d_I(U) + k - |I|)) with r = lambda*n.
    The exponent is d_I + k - |I|: row i outside I contributes its own
    factor -E(Y) = -2^(-r), which is what the brute-force average over K
    reproduces (the variance check at k=2 fails with d_I - k + |I|).
    """
    k, r = U.ambient_k, p.r
    total = Fraction(0)
    for size in range(k + 1):
        sign = -1 if (k - size) % 2 else 1
        for I in itertools.combinations(range(k), size):
            e = r * (projected_dim(U, I) + k - size)
            total += Fraction(sign, 1 << e)
    return total


@dataclass(frozen=True)
class MomentExact:
    k: int
    value: Fraction
    decomposition: dict = field(compare=False, repr=False)


def t_counts(k: int, p: CodeParams) -> dict[Subspace, int]:
    return {V: count_T(V, p).value for V in all_subspaces(k)}


def t_bar_counts(k: int, p: CodeParams) -> dict[Subspace, int]:
    T = t_counts(k, p)
    return {
        U: sum(mobius_coefficient(U.dim - V.dim) * T[V] for V in subspaces_of(U))
        for U in T
    }


def central_moment_exact(p: CodeParams, k: int) -> MomentExact:
    """k-th central moment of X as an exact rational, by the subspace expansion."""
    if not 1 <= k <= 5:
        raise ValueError("exact moments need 1 <= k <= 5 (full subspace lattice)")
    decomposition = {}
    for U, tb in t_bar_counts(k, p).items():
        decomposition[U] = tb * R_U(U, p) if tb else Fraction(0)
    return MomentExact(k, sum(decomposition.values(), Fraction(0)), decomposition)


def x_distribution(p: CodeParams, max_bits: int = BRUTEFORCE_MAX_BITS) -> Counter:
    """Exact law of X over all 2^(r n) parity-check matrices: {X value: #K}."""
    n, r = p.n, p.r
    if r * n > max_bits:
        raise ValueError(f"r*n = {r * n} exceeds the brute-force limit {max_bits}")
    L = layer(n, p.w)
    # bit j of zero_set[y] says the j-th layer vector is orthogonal to row y
    zero_set = []
    for y in range(1 << n):
        m = 0
        for j, x in enumerate(L):
            if (y & x).bit_count() % 2 == 0:
                m |= 1 << j
        zero_set.append(m)
    rows = Counter(zero_set)
    states = Counter({(1 << len(L)) - 1: 1})
    for _ in range(r):
        nxt: Counter = Counter()
        for s, c in states.items():
            for z, cz in rows.items():
                nxt[s & z] += c * cz
        states = nxt
    out: Counter = Counter()
    for s, c in states.items():
        out[s.bit_count()] += c
    return out


def mean_variance(p: CodeParams) -> tuple[Fraction, Fraction]:
    """E(X) = C(n, w) 2^-r and Var(X) = E(X)(1 - 2^-r)."""
    q = Fraction(1, 1 << p.r)
    mean = math.comb(p.n, p.w) * q
    return mean, mean * (1 - q)


def central_moment_bruteforce(p: CodeParams, k: int, max_bits: int = BRUTEFORCE_MAX_BITS) -> Fraction:
    """k-th central moment of X averaged exactly over every parity-check matrix."""
    dist = x_distribution(p, max_bits)
    total = sum(dist.values())
    mean = Fraction(sum(x * c for x, c in dist.items()), total)
    return sum((c * (x - mean) ** k for x, c in dist.items()), Fraction(0)) / total


def monte_carlo_moment(
    p: CodeParams, k: int, samples: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Sample central moment of X about the exact mean, with jackknife standard error."""
    n, r, w = p.n, p.r, p.w
    if n > 30 or math.comb(n, w) > 10**6:
        raise ValueError("monte_carlo_moment needs n <= 30 and C(n, w) <= 1e6")
    L = np.array(layer(n, w), dtype=np.uint64)
    mu = float(mean_variance(p)[0])
    batch = max(1, (1 << 22) // (r * len(L)))
    xs = np.empty(samples, dtype=np.int64)
    for start in range(0, samples, batch):
        size = min(batch, samples - start)
        K = rng.integers(0, 1 << n, size=(size, r), dtype=np.uint64)
        odd = np.bitwise_count(K[:, :, None] & L[None, None, :]) & np.uint8(1)
        xs[start:start + size] = (odd.max(axis=1) == 0).sum(axis=1)
    vals = (xs - mu) ** k
    N = len(vals)
    if N < 2:
        return float(vals.mean()), math.inf
    loo = (vals.sum() - vals) / (N - 1)
    se = math.sqrt((N - 1) / N * ((loo - loo.mean()) ** 2).sum())
    return float(vals.mean()), se


def robust_sum(p: CodeParams, k: int) -> Fraction:
    """sum over robust V of |T_V| 2^(-r dim V); brackets the k-th moment up to constants."""
    return sum(
        (Fraction(c, 1 << (p.r * V.dim)) for V, c in t_counts(k, p).items() if c and is_robust(V)),
        Fraction(0),
    )


def G_d_exact(p: CodeParams, k: int, d: int) -> Fraction:
    """G_d = 2^(-r d) times the total |T_V| over robust d-dimensional V."""
    return sum(
        (Fraction(c, 1 << (p.r * d)) for V, c in t_counts(k, p).items() if V.dim == d and c and is_robust(V)),
        Fraction(0),
    )


def _check_gl(gamma: float, lam: float) -> float:
    hg = maxent.h(gamma)
    if not 0.0 < gamma < 0.5:
        raise ValueError(f"gamma must lie in (0, 1/2), got {gamma}")
    if not 0.0 < lam < hg:
        raise ValueError(f"need 0 < lambda < h(gamma) = {hg:.6f}, got {lam}")
    return hg


def even_minus_pairing(m: int, gamma: float, lam: float) -> float:
    """[F(m) - (m-1) lam] - (m/2)(h - lam), using the cancellation-free F gap."""
    hg = maxent.h(gamma)
    return 0.5 * m * (hg - lam) - (1.0 - lam) + maxent.F_gap(m, gamma)


def k0(gamma: float, lam: float) -> int:
    """Least m with F(m) - (m-1) lam > (m/2)(h(gamma) - lam).

    m = 2 is an identity (F(2) = h), so the scan starts at 3; F(m) >= m h - 1
    bounds the scan.
    """
    hg = _check_gl(gamma, lam)
    bound = math.ceil(2.0 * (1.0 - lam) / (hg - lam)) + 1
    for m in range(3, bound + 1):
        if even_minus_pairing(m, gamma, lam) > TIE_TOL:
            return m
    return bound


def _mixed_linear(k: int, gamma: float, lam: float) -> float:
    hg = maxent.h(gamma)
    return 0.5 * (k - 3) * (hg - lam) - lam + max(hg, maxent.F(3, gamma) - lam)


def _even_linear(k: int, gamma: float, lam: float) -> float:
    hg = maxent.h(gamma)
    return k * hg - 1.0 + maxent.F_gap(k, gamma) - (k - 1) * lam


def k1(gamma: float, lam: float, k_limit: int = 100001) -> int:
    """Least odd k >= 3 where the even-space exponent beats the mixed odd exponent."""
    _check_gl(gamma, lam)
    for k in range(3, k_limit, 2):
        if _even_linear(k, gamma, lam) - _mixed_linear(k, gamma, lam) > TIE_TOL:
            return k
    raise ArithmeticError("k1 scan did not terminate")


def G_d_upper(p: CodeParams, k: int, d: int) -> float:
    """log2 upper bound on G_d: trivial entropy bound below k/2, F-based bound above."""
    if not 0 <= d <= k - 1:
        raise ValueError("need 0 <= d <= k-1")
    n, gm, lam = p.n, float(p.gamma), float(p.lam)
    hg = maxent.h(gm)
    if 2 * d < k:
        return n * d * (hg - lam) + k * d
    return n * (maxent.F(2 * (d + 1) - k, gm) - (k - 1) * lam + (k - d - 1) * (hg - lam)) + (k - d) * k


class Regime(enum.Enum):
    PAIRING = "PairingDominant"
    EVEN = "EvenDominant"
    ODD_MIXED = "OddMixed"


def pairing_count(k: int) -> int:
    """Number of perfect matchings of k points, (k-1)(k-3)...1, for even k."""
    return math.prod(range(k - 1, 0, -2)) if k % 2 == 0 else 0


@dataclass(frozen=True)
class MomentPrediction:
    k: int
    log2_value: float
    regime: Regime
    dominant_d: int
    candidates: dict = field(compare=False)
    linear_tie: bool = False


def k_in_range(n: int, k: int, safety: float = K_RANGE_SAFETY) -> bool:
    """Concrete stand-in for k = o(n / log n): k log2 n <= n / safety."""
    return k * math.log2(n) <= n / safety


def predict_moment(p: CodeParams, k: int, safety: float = K_RANGE_SAFETY) -> MomentPrediction:
    """log2 of the leading asymptotic expression for E(X - EX)^k.

    Candidates are ranked by the coefficient of n in the exponent; a tie
    there goes to the term with the larger log n coefficient, which is
    never the even-space term.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if not k_in_range(p.n, k, safety):
        raise ValueError(f"k={k} outside the guarded range k log2 n <= n/{safety:g} for n={p.n}")
    n, gm, lam = p.n, float(p.gamma), float(p.lam)
    hg = maxent.h(gm)
    log_n = math.log2(n)
    even_lin = _even_linear(k, gm, lam)
    even_val = n * even_lin - 0.5 * k * log_n
    if k % 2 == 0:
        other = Regime.PAIRING
        other_lin = 0.5 * k * (hg - lam)
        log_binom = math.log2(math.comb(n, p.w))
        other_val = math.log2(pairing_count(k)) + 0.5 * k * (log_binom - lam * n)
        other_d = k // 2
        diff = even_minus_pairing(k, gm, lam)
    else:
        other = Regime.ODD_MIXED
        f3 = maxent.F(3, gm)
        other_lin = _mixed_linear(k, gm, lam)
        base = n * (0.5 * (k - 3) * (hg - lam) - lam) - 0.25 * (k - 1) * log_n
        low_branch = n * hg
        high_branch = n * (f3 - lam) - 0.5 * log_n
        other_val = base + max(low_branch, high_branch)
        # E^3 plus (k-3)/2 pairs has dimension (k+1)/2
        other_d = (k - 1) // 2 if low_branch >= high_branch else (k + 1) // 2
        diff = even_lin - other_lin
    candidates = {Regime.EVEN: even_val, other: other_val}
    if diff > TIE_TOL:
        return MomentPrediction(k, even_val, Regime.EVEN, k - 1, candidates, False)
    return MomentPrediction(k, other_val, other, other_d, candidates, abs(diff) <= TIE_TOL)


@dataclass(frozen=True)
class NormalizedPrediction:
    k: int
    branch: str
    value: float | None
    log2_value: float | None


def predict_normalized(p: CodeParams, k: int) -> NormalizedPrediction:
    """Leading behaviour of E(X - EX)^k / Var(X)^(k/2).

    For k >= k0 the exponent is F(k) - (k/2) h - (k/2 - 1) lam - k log n/(4n);
    the symbol printed as m in that branch is read as k.
    """
    gm, lam = float(p.gamma), float(p.lam)
    kk0 = k0(gm, lam)
    if k < kk0:
        if k % 2:
            return NormalizedPrediction(k, "o(1)", 0.0, None)
        c = pairing_count(k)
        return NormalizedPrediction(k, "k!!", float(c), math.log2(c))
    n = p.n
    hg = maxent.h(gm)
    lin = maxent.F(k, gm) - 0.5 * k * hg - (0.5 * k - 1) * lam
    return NormalizedPrediction(k, "growing", None, n * lin - 0.25 * k * math.log2(n))
