"""Counting k x n matrices with prescribed row weights and column space.

T_V is the set of k x n binary matrices whose rows all have weight gamma*n
and whose columns all lie in V; T-bar_V those whose columns span exactly V.
"""

from __future__ import annotations

import functools
import itertools
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import maxent
from .subspaces import Subspace, even_space, mobius_coefficient, subspaces_of

DEFAULT_BUDGET = 5 * 10**7
EXHAUSTIVE_MAX_BITS = 24
IMAGE_COUNT_MAX = 2 * 10**6
MC_BATCH = 1 << 18


class BudgetExceeded(RuntimeError):
    def __init__(self, what: str, estimate: float, budget: float):
        super().__init__(f"{what}: estimated cost {estimate:.3g} exceeds budget {budget:.3g}")
        self.estimate = estimate
        self.budget = budget


def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**6)
    return Fraction(x)


@dataclass(frozen=True)
class CodeParams:
    """Problem instance: length n, relative weight gamma, redundancy lambda.

    gamma*n must be an even integer and lambda*n an integer.  ``lam`` is
    spelled out because ``lambda`` is reserved.
    """

    n: int
    gamma: Fraction
    lam: Fraction
    lambda_tol: float = 1e-12

    def __post_init__(self):
        object.__setattr__(self, "gamma", _as_fraction(self.gamma))
        object.__setattr__(self, "lam", _as_fraction(self.lam))
        n, gm, lm = self.n, self.gamma, self.lam
        if n < 1:
            raise ValueError(f"n must be positive, got {n}")
        if not 0 < gm < Fraction(1, 2):
            raise ValueError(f"gamma must lie in (0, 1/2), got {gm}")
        if not 0 < lm < 1:
            raise ValueError(f"lambda must lie in (0, 1), got {lm}")
        gn, ln = gm * n, lm * n
        if gn.denominator != 1 or gn.numerator % 2:
            raise ValueError(f"gamma*n = {gn} must be an even integer")
        if ln.denominator != 1:
            raise ValueError(f"lambda*n = {ln} must be an integer")
        if not float(lm) < maxent.h(float(gm)) - self.lambda_tol:
            raise ValueError(f"need lambda < h(gamma) = {maxent.h(float(gm)):.6f}, got {float(lm)}")

    @property
    def w(self) -> int:
        """Row weight gamma*n."""
        return int(self.gamma * self.n)

    @property
    def r(self) -> int:
        """Number of parity checks lambda*n."""
        return int(self.lam * self.n)


@dataclass(frozen=True)
class CountResult:
    value: int
    method: str


def _dp_cost(V: Subspace, n: int, w: int) -> float:
    return float(n) * (1 << V.dim) * (w + 1) ** V.ambient_k


def count_T(V: Subspace, p: CodeParams, budget: float = DEFAULT_BUDGET) -> CountResult:
    """Exact |T_V|: the coefficient of prod_i x_i^w in (sum_{v in V} x^v)^n.

    The DP appends one column at a time over a table of partial row sums
    capped at w, with exact integer entries.
    """
    return CountResult(_count_T(V, p.n, p.w, budget), "exact-dp")


@functools.lru_cache(maxsize=4096)
def _count_T(V: Subspace, n: int, w: int, budget: float) -> int:
    k = V.ambient_k
    if k > 6:
        raise ValueError("exact counting is limited to k <= 6")
    cost = _dp_cost(V, n, w)
    if cost > budget:
        raise BudgetExceeded("count_T", cost, budget)
    shape = (w + 1,) * k
    moves = []
    for v in V.elements():
        dst = tuple(slice(1, None) if (v >> i) & 1 else slice(None) for i in range(k))
        src = tuple(slice(None, -1) if (v >> i) & 1 else slice(None) for i in range(k))
        moves.append((dst, src))
    table = np.zeros(shape, dtype=object)
    table[(0,) * k] = 1
    for _ in range(n):
        nxt = np.zeros(shape, dtype=object)
        for dst, src in moves:
            nxt[dst] += table[src]
        table = nxt
    return int(table[(w,) * k])


def count_T_exhaustive(V: Subspace, p: CodeParams, max_bits: int = EXHAUSTIVE_MAX_BITS) -> CountResult:
    """|T_V| by scanning all 2^(kn) matrices; an independent oracle for small kn."""
    k, n, w = V.ambient_k, p.n, p.w
    if k * n > max_bits:
        raise BudgetExceeded("count_T_exhaustive", 2.0 ** (k * n), 2.0**max_bits)
    member = np.zeros(1 << k, dtype=bool)
    member[V.elements()] = True
    row_mask = np.uint64((1 << n) - 1)
    total = 0
    chunk = 1 << 20
    for start in range(0, 1 << (k * n), chunk):
        a = np.arange(start, min(start + chunk, 1 << (k * n)), dtype=np.uint64)
        rows = [(a >> np.uint64(i * n)) & row_mask for i in range(k)]
        ok = np.ones(a.shape, dtype=bool)
        for row in rows:
            ok &= np.bitwise_count(row) == w
        for j in range(n):
            col = np.zeros(a.shape, dtype=np.int64)
            for i, row in enumerate(rows):
                col |= ((row >> np.uint64(j)) & np.uint64(1)).astype(np.int64) << i
            ok &= member[col]
        total += int(ok.sum())
    return CountResult(total, "exhaustive")


def layer(n: int, w: int) -> list[int]:
    """All weight-w vectors of length n as ints."""
    return [sum(1 << i for i in c) for c in itertools.combinations(range(n), w)]


def image_counts(k: int, p: CodeParams, limit: int = IMAGE_COUNT_MAX) -> Counter:
    """|T-bar_U| for every U <= F_2^k by direct enumeration of row-weight-w matrices."""
    L = layer(p.n, p.w)
    if len(L) ** k > limit:
        raise BudgetExceeded("image_counts", float(len(L)) ** k, limit)
    out: Counter = Counter()
    for rows in itertools.product(L, repeat=k):
        cols = []
        for j in range(p.n):
            c = 0
            for i, row in enumerate(rows):
                c |= ((row >> j) & 1) << i
            cols.append(c)
        out[Subspace.span(k, cols)] += 1
    return out


def count_T_bar(U: Subspace, p: CodeParams, budget: float = DEFAULT_BUDGET) -> CountResult:
    """|T-bar_U| by Moebius inversion over the subspaces below U."""
    d = U.dim
    total = 0
    for V in subspaces_of(U):
        total += mobius_coefficient(d - V.dim) * count_T(V, p, budget).value
    if total < 0:
        raise ArithmeticError(f"negative T-bar count {total} for {U}")
    return CountResult(total, "closed-form")


def log2_T_asymptotic(k: int, p: CodeParams) -> float:
    """Centre of the estimate log2 |T_{E^k}| = n F(k, gamma) - (k/2) log2 n + O(k)."""
    n, gm = p.n, float(p.gamma)
    if k == 2:
        return n * maxent.h(gm) - 0.5 * math.log2(n)
    if k < 2:
        raise ValueError("k must be at least 2")
    return n * maxent.F(k, gm) - 0.5 * k * math.log2(n)


def _check_layer(n: int, gamma) -> tuple[Fraction, int]:
    gm = Fraction(gamma)
    gn = gm * n
    if gn.denominator != 1 or gn.numerator % 2:
        raise ValueError(f"gamma*n = {gn} must be an even integer")
    if not 0 < gm < Fraction(1, 2):
        raise ValueError(f"gamma must lie in (0, 1/2), got {gm}")
    return gm, int(gn)


def exact_prob_T(k: int, n: int, gamma, budget: float = DEFAULT_BUDGET) -> float:
    """Pr_{A~pi}(A in T) = |T_{E^k}| * pi(A), with pi constant on T."""
    gm, w = _check_layer(n, gamma)
    count = _count_T(even_space(k), n, w, budget)
    return 2.0 ** (math.log2(count) - n * maxent.F(k, float(gm)))


def _mc_batch(args) -> int:
    """Hits in one batch: rows are generated as binomial splits of the odd/even columns."""
    seed, size, n, w, p01, p10 = args
    rng = np.random.default_rng(seed)
    odd = np.zeros(size, dtype=np.int64)
    for a, b in zip(p01, p10):
        s = rng.binomial(n - odd, a)
        t = rng.binomial(odd, b)
        keep = s + t == w
        odd = (odd + s - t)[keep]
        if odd.size == 0:
            return 0
    return int(odd.size)


def estimate_prob_T(
    k: int,
    n: int,
    gamma,
    samples: int,
    rng: np.random.Generator,
    workers: int = 1,
    batch_size: int = MC_BATCH,
) -> tuple[float, float]:
    """Monte Carlo Pr_{A~pi}(A in T) with its binomial standard error.

    Columns of A are i.i.d. from P_{k,gamma}.  Row i is drawn all at once:
    given how many columns have an odd prefix, its ones split into two
    independent binomials, which is exact in distribution.  Samples that
    already failed a row are dropped.  Batches are seeded from ``rng`` in a
    fixed schedule, so results do not depend on ``workers``.

    With no hits the estimate is 0 and the standard error is computed as if
    one hit had been seen.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if samples < 1:
        raise ValueError("samples must be positive")
    gm, w = _check_layer(n, gamma)
    chain = maxent.chain_probs(k, float(gm))
    root = np.random.SeedSequence(int(rng.integers(2**63)))
    sizes = [batch_size] * (samples // batch_size)
    if samples % batch_size:
        sizes.append(samples % batch_size)
    jobs = [(s, size, n, w, chain.p01, chain.p10) for s, size in zip(root.spawn(len(sizes)), sizes)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(_mc_batch, jobs))
    else:
        hits = sum(map(_mc_batch, jobs))
    est = hits / samples
    pe = max(est, 1.0 / samples)
    return est, math.sqrt(pe * (1.0 - pe) / samples)


def loglog_slope(ns, values) -> float:
    """Least-squares slope of log2(value) against log2(n)."""
    x = np.log2(np.asarray(ns, dtype=float))
    y = np.log2(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])
