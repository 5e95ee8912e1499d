"""Invariant suites behind ``rlcmoments verify``.

Each check produces a record with fields suite, check, status, measured,
bound.  Suites: oracle (exact rational identities), maxent (F and sampler
properties), scaling (Monte Carlo slope of Pr(A in T) against n).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from . import maxent
from .enumeration import (
    CodeParams,
    count_T,
    count_T_exhaustive,
    estimate_prob_T,
    image_counts,
    loglog_slope,
)
from .moments import R_U, central_moment_bruteforce, central_moment_exact, k0, mean_variance, t_bar_counts
from .subspaces import all_subspaces, even_space, is_robust, subspaces_of

SUITES = ("oracle", "maxent", "scaling", "all")

GAMMA_GRID = tuple(round(0.05 * i, 2) for i in range(1, 10))
DELTA_GRID = tuple(round(0.1 * i, 1) for i in range(11))
ORACLE_PARAMS = ((6, Fraction(1, 3), Fraction(1, 3)), (8, Fraction(1, 4), Fraction(1, 4)), (10, Fraction(1, 5), Fraction(1, 5)))
SCALING_NS = {3: (12, 24, 48, 96), 4: (12, 24, 48)}
SCALING_BANDS = {3: (-1.65, -1.35), 4: (-2.25, -1.75)}
SCALING_GAMMA = Fraction(1, 3)


@dataclass
class Record:
    suite: str
    check: str
    status: str
    measured: object
    bound: object

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    def as_dict(self) -> dict:
        return asdict(self)


def _rec(suite, check, ok, measured, bound) -> Record:
    return Record(suite, check, "PASS" if ok else "FAIL", measured, bound)


def _fmt_params(n, g, l) -> str:
    return f"({n},{g},{l})"


# oracle -------------------------------------------------------------------

def oracle_moments(params=ORACLE_PARAMS[:2], ks=(1, 2, 3, 4)) -> Iterator[Record]:
    for n, g, l in params:
        p = CodeParams(n, g, l)
        for k in ks:
            a = central_moment_exact(p, k).value
            b = central_moment_bruteforce(p, k)
            yield _rec("oracle", f"central_moment_exact == bruteforce {_fmt_params(n, g, l)} k={k}",
                       a == b, str(a), str(b))


def oracle_anchors() -> Iterator[Record]:
    p = CodeParams(6, Fraction(1, 3), Fraction(1, 3))
    mean, var = mean_variance(p)
    bf_mean = central_moment_bruteforce(p, 1) + mean  # first central moment about the exact mean
    bf_var = central_moment_bruteforce(p, 2)
    yield _rec("oracle", "E(X) at (6,1/3,1/3)", mean == Fraction(15, 4) and bf_mean == mean, str(mean), "15/4")
    yield _rec("oracle", "Var(X) at (6,1/3,1/3)", var == Fraction(45, 16) and bf_var == var, str(var), "45/16")
    for k, want in ((2, 15), (3, 120)):
        V = even_space(k)
        dp = count_T(V, p).value
        ex = count_T_exhaustive(V, p).value
        yield _rec("oracle", f"count_T(E^{k},6,1/3) dp == exhaustive == {want}",
                   dp == ex == want, f"{dp}/{ex}", want)


def oracle_nonrobust(params=ORACLE_PARAMS, k_max: int = 4) -> Iterator[Record]:
    for n, g, l in params:
        p = CodeParams(n, g, l)
        bad, total = 0, 0
        for k in range(1, k_max + 1):
            for U in all_subspaces(k):
                if not is_robust(U):
                    total += 1
                    if R_U(U, p) != 0:
                        bad += 1
        yield _rec("oracle", f"R_U == 0 for all non-robust U, k<=4 {_fmt_params(n, g, l)}",
                   bad == 0, f"{bad} nonzero of {total}", 0)


def oracle_mobius(n: int = 6, gamma=Fraction(1, 3), k: int = 3) -> Iterator[Record]:
    p = CodeParams(n, gamma, Fraction(1, n))
    direct = image_counts(k, p)
    tbar = t_bar_counts(k, p)
    inv_ok = all(direct.get(U, 0) == tbar[U] for U in tbar)
    sum_ok = all(
        sum(direct.get(V, 0) for V in subspaces_of(U)) == count_T(U, p).value for U in tbar
    )
    yield _rec("oracle", f"Moebius inversion == direct image counts, U <= F_2^{k}, (n,gamma)=({n},{gamma})",
               inv_ok, sum(direct.values()), sum(tbar.values()))
    yield _rec("oracle", f"sum of T-bar_V over V <= U == T_U, U <= F_2^{k}", sum_ok, len(tbar), len(tbar))


def suite_oracle(seed: int = 0) -> Iterator[Record]:
    yield from oracle_moments()
    yield from oracle_anchors()
    yield from oracle_nonrobust()
    yield from oracle_mobius()


# maxent -------------------------------------------------------------------

def gap_upper(m: int, gamma: float) -> float:
    """log2(1 + (1-2 gamma)^m), accurate when the power is tiny."""
    return math.log1p((1.0 - 2.0 * gamma) ** m) / math.log(2.0)


def maxent_f2(gammas=GAMMA_GRID) -> Iterator[Record]:
    err = max(abs(maxent.F(2, g) - maxent.h(g)) for g in gammas)
    yield _rec("maxent", "F(2,gamma) == h(gamma)", err <= 1e-10, err, 1e-10)


def maxent_bounds(gammas=GAMMA_GRID, ms=range(2, 41), rel_tol: float = 1e-12) -> Iterator[Record]:
    """Sandwich on the gap; the upper side is tight to relative order (1-2g)^m,
    so it is compared relatively."""
    lower_ok = True
    worst = math.inf
    for g in gammas:
        for m in ms:
            gap = maxent.F_gap(m, g)
            lower_ok &= gap > 0.0
            worst = min(worst, (gap_upper(m, g) - gap) / gap_upper(m, g))
    yield _rec("maxent", "m h - 1 <= F(m) <= m h + log2(1+(1-2g)^m) - 1, m in 2..40",
               lower_ok and worst >= -rel_tol, worst, -rel_tol)


def maxent_gap_decay(gammas=GAMMA_GRID, ms=range(2, 41), slack: float = 0.05) -> Iterator[Record]:
    """Gap decay toward 0 at rate about (1-2 gamma) per step.

    The consecutive ratio approaches 1-2 gamma from above, so for larger
    gamma the first few ratios exceed (1-2 gamma)+slack; ``from_m`` reports
    the first m after which every ratio is within the bound.
    """
    for g in gammas:
        gaps = [maxent.F_gap(m, g) for m in ms]
        ratios = [b / a for a, b in zip(gaps, gaps[1:])]
        bound = (1.0 - 2.0 * g) + slack
        mono = all(b <= a for a, b in zip(gaps, gaps[1:]))
        yield _rec("maxent", f"gap nonincreasing toward 0, gamma={g}", mono and gaps[-1] < gaps[0], gaps[-1], gaps[0])
        yield _rec("maxent", f"gap ratio <= (1-2g)+{slack} for all m in {ms.start}..{ms.stop - 1}, gamma={g}",
                   max(ratios) <= bound, max(ratios), bound)
        from_m = next((ms[i] for i in range(len(ratios)) if all(r <= bound for r in ratios[i:])), None)
        yield Record("maxent", f"gap ratio within bound from m, gamma={g}", "INFO", from_m, bound)


def maxent_convexity(gammas=GAMMA_GRID, ms=range(3, 21), tol: float = 1e-9) -> Iterator[Record]:
    """Second differences of F in m.

    F(m) - (m h - 1) has the same second differences as F, and computing
    them from the gap keeps full relative precision even where they are
    far below 1e-9.  Each must be positive; the tolerance only guards the
    comparison of raw F values.
    """
    worst = math.inf
    worst_raw = math.inf
    for g in gammas:
        gaps = {m: maxent.F_gap(m, g) for m in range(ms.start - 1, ms.stop + 1)}
        vals = {m: maxent.F(m, g) for m in gaps}
        for m in ms:
            worst = min(worst, gaps[m + 1] - 2.0 * gaps[m] + gaps[m - 1])
            worst_raw = min(worst_raw, vals[m + 1] - 2.0 * vals[m] + vals[m - 1])
    yield _rec("maxent", "second difference of F in m > 0, m in 3..20", worst > 0.0 and worst_raw > -tol,
               worst, 0.0)


def maxent_delta_monotone(gammas=GAMMA_GRID, ms=range(2, 9), deltas=DELTA_GRID, tol: float = 1e-9) -> Iterator[Record]:
    worst = -math.inf
    for g in gammas:
        for m in ms:
            vals = [maxent.F(m, g, d) for d in deltas]
            for a, b in zip(vals, vals[1:]):
                if b is maxent.MINUS_INF:
                    continue
                if a is maxent.MINUS_INF:
                    worst = math.inf
                    continue
                worst = max(worst, b - a)
    yield _rec("maxent", "F(m,gamma,delta) nonincreasing in delta, m in 2..8", worst <= tol, worst, tol)


def maxent_sampler(gammas=GAMMA_GRID, ms=range(2, 11)) -> Iterator[Record]:
    path_err, ident_err = 0.0, 0.0
    for g in gammas:
        for m in ms:
            chain = maxent.chain_probs(m, g)
            P = maxent.pmf(maxent.fit(m, g))
            for u in range(1 << m):
                if u.bit_count() % 2 == 0:
                    path_err = max(path_err, abs(maxent.path_probability(chain, u) - P[u]))
            for i in range(1, m + 1):
                e = chain.e[i - 1]
                lhs = chain.p10[i - 1] * e + chain.p01[i - 1] * (1.0 - e)
                ident_err = max(ident_err, abs(lhs - g))
    yield _rec("maxent", "chain path probability == alpha^|u|/Z on E^m, m <= 10", path_err <= 1e-10, path_err, 1e-10)
    yield _rec("maxent", "gamma == p10 e_(i-1) + p01 (1 - e_(i-1))", ident_err <= 1e-12, ident_err, 1e-12)


def maxent_negation(ms=range(2, 9), gammas=(0.6, 0.7, 0.8), deltas=(0.0, 0.3, 1.0), tol: float = 1e-9) -> Iterator[Record]:
    failures = [
        (m, g, d) for m in ms for g in gammas for d in deltas
        if not maxent.F_negation_identity_check(m, g, d, tol)
    ]
    yield _rec("maxent", "F(m,gamma,delta) == F(m,1-gamma,delta') for gamma > 1/2",
               not failures, len(failures), 0)


def maxent_k0(gamma_grid=GAMMA_GRID, lam_steps: int = 40) -> Iterator[Record]:
    v = k0(0.2, 0.3)
    yield _rec("maxent", "k0(0.2, 0.3) == 3", v == 3, v, 3)
    bad = 0
    for g in gamma_grid:
        hg = maxent.h(g)
        lams = [hg * j / lam_steps for j in range(1, lam_steps)]
        vals = [k0(g, l) for l in lams]
        bad += sum(1 for a, b in zip(vals, vals[1:]) if b < a)
    yield _rec("maxent", "k0 nondecreasing in lambda", bad == 0, bad, 0)


def suite_maxent(seed: int = 0) -> Iterator[Record]:
    yield from maxent_f2()
    yield from maxent_bounds()
    yield from maxent_gap_decay()
    yield from maxent_convexity()
    yield from maxent_delta_monotone()
    yield from maxent_sampler()
    yield from maxent_negation()
    yield from maxent_k0()


# scaling ------------------------------------------------------------------

def scaling_slopes(samples: int, seed: int, workers: int = 1, ks=(3, 4)) -> Iterator[Record]:
    rng = np.random.default_rng(seed)
    for k in ks:
        ns = SCALING_NS[k]
        ests = []
        for n in ns:
            est, se = estimate_prob_T(k, n, SCALING_GAMMA, samples, rng, workers=workers)
            ests.append(est)
            yield Record("scaling", f"Pr(A in T) k={k} n={n}", "INFO", est, se)
        lo, hi = SCALING_BANDS[k]
        if min(ests) <= 0.0:
            yield _rec("scaling", f"log-log slope k={k}", False, "no hits", [lo, hi])
            continue
        slope = loglog_slope(ns, ests)
        yield _rec("scaling", f"log-log slope k={k}", lo <= slope <= hi, slope, [lo, hi])


def suite_scaling(seed: int = 0, samples: int = 10**7, workers: int = 1) -> Iterator[Record]:
    yield from scaling_slopes(samples, seed, workers)


def run_suite(name: str, seed: int = 0, samples: int = 10**7, workers: int = 1) -> Iterator[Record]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    runners: dict[str, Callable[[], Iterator[Record]]] = {
        "oracle": lambda: suite_oracle(seed),
        "maxent": lambda: suite_maxent(seed),
        "scaling": lambda: suite_scaling(seed, samples, workers),
    }
    names = ("oracle", "maxent", "scaling") if name == "all" else (name,)
    for n in names:
        yield from runners[n]()
