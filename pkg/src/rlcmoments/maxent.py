"""Maximum-entropy distributions P_{m,gamma,delta} on {0,1}^m and the exponent F.

P(u) is proportional to alpha^|u|, with an extra factor beta on odd-weight
vectors; alpha fixes the per-coordinate mean gamma and beta the odd-weight
probability delta.  F(m, gamma, delta) = h(P) - h(delta).

All logarithms are base 2.  Powers (1 +- x)^m are evaluated as
(1+x)^m * (1 +- r^m) with r = (1-x)/(1+x), which stays finite for large m.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

LN2 = math.log(2.0)
BOUNDARY_TOL = 1e-12


@functools.total_ordering
class _MinusInfinity:
    """Tagged value for F outside the feasible range; below every real number."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "MinusInfinity"

    def __float__(self):
        return -math.inf

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("MinusInfinity")

    def __add__(self, other):
        if isinstance(other, (int, float)) and not math.isfinite(other) and other > 0:
            raise ArithmeticError("MinusInfinity + inf is undefined")
        return self

    __radd__ = __add__

    def __sub__(self, other):
        if other is self:
            raise ArithmeticError("MinusInfinity - MinusInfinity is undefined")
        return self


MINUS_INF = _MinusInfinity()
Exponent = Union[float, _MinusInfinity]


def h(t: float) -> float:
    """Binary entropy in bits."""
    if t <= 0.0 or t >= 1.0:
        if t < 0.0 or t > 1.0:
            raise ValueError(f"h(t) needs t in [0,1], got {t}")
        return 0.0
    return -(t * math.log2(t) + (1.0 - t) * math.log2(1.0 - t))


def gamma_min(m: float, delta: float) -> float:
    return delta / m


def gamma_max(m: int, delta: float) -> float:
    """Largest feasible mean; the mirror image of gamma_min under bit negation."""
    flipped = delta if m % 2 == 0 else 1.0 - delta
    return 1.0 - flipped / m


def _is_int(m) -> bool:
    return float(m) == int(m)


def _rpow(x: float, j: float) -> tuple[float, float]:
    """(r^j, 1 - r^j) for r = (1-x)/(1+x), accurate when r is close to 1."""
    if x == 1.0:
        return (1.0, 0.0) if j == 0 else (0.0, 1.0)
    if x < 1.0:
        lr = math.log1p(-x) - math.log1p(x)
        return math.exp(j * lr), -math.expm1(j * lr)
    if not _is_int(j):
        raise ValueError("x > 1 requires an integer exponent")
    r = (1.0 - x) / (1.0 + x)
    rj = r ** int(j)
    return rj, 1.0 - rj


def _gamma_of_x(m: float, x: float, delta: float) -> float:
    rm1, om1 = _rpow(x, m - 1)
    rm, om = _rpow(x, m)
    val = 0.0
    if delta < 1.0:
        val += (1.0 - delta) * om1 / (1.0 + rm)
    if delta > 0.0:
        val += delta * (1.0 + rm1) / om
    return x / (1.0 + x) * val


def gamma_of_alpha(m: float, alpha: float, delta: float = 0.0) -> float:
    """Mean of each coordinate under P with parameter ``alpha``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0,1], got {delta}")
    return _gamma_of_x(m, alpha, delta)


def _fit_log_alpha(m: float, gamma: float, delta: float) -> float:
    """ln(alpha) solving gamma(m, alpha, delta) = gamma by bisection in log space."""
    if gamma <= 0.5:
        hi = 0.0
        lo = -1.0
        while _gamma_of_x(m, math.exp(lo), delta) > gamma:
            lo *= 2.0
            if lo < -700:
                raise ArithmeticError("alpha underflow")
    else:
        lo, hi = 0.0, 1.0
        while _gamma_of_x(m, math.exp(hi), delta) < gamma:
            hi *= 2.0
            if hi > 700:
                raise ArithmeticError("alpha overflow")
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _gamma_of_x(m, math.exp(mid), delta) < gamma:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _check_fit_domain(m: float, gamma: float, delta: float, upper: float) -> None:
    if m <= 1:
        raise ValueError(f"alpha is only determined for m > 1, got m={m}")
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0,1], got {delta}")
    if not gamma_min(m, delta) < gamma < upper:
        raise ValueError(
            f"gamma={gamma} outside ({gamma_min(m, delta)}, {upper}) for m={m}, delta={delta}"
        )


def alpha_of_gamma(m: float, gamma: float, delta: float = 0.0) -> float:
    """The unique alpha in (0,1) with gamma(m, alpha, delta) = gamma."""
    _check_fit_domain(m, gamma, delta, 0.5)
    return math.exp(_fit_log_alpha(m, gamma, delta))


def _beta_at(m: float, alpha: float, delta: float) -> float:
    if delta == 0.0:
        return 0.0
    if delta == 1.0:
        return math.inf
    rm, om = _rpow(alpha, m)
    return delta / (1.0 - delta) * (1.0 + rm) / om


def beta_of(m: float, gamma: float, delta: float) -> float:
    """Odd-weight multiplier beta at the fitted alpha; 0 at delta=0, inf at delta=1."""
    if delta in (0.0, 1.0):
        _check_fit_domain(m, gamma, delta, 0.5)
        return 0.0 if delta == 0.0 else math.inf
    return _beta_at(m, alpha_of_gamma(m, gamma, delta), delta)


def g(m: float, gamma: float, x: float, delta: float = 0.0) -> float:
    """The cross-entropy bound whose minimum over x > 0 is F(m, gamma, delta)."""
    if x <= 0.0:
        raise ValueError(f"g needs x > 0, got {x}")
    rm, om = _rpow(x, m)
    val = m * math.log2(1.0 + x) - gamma * m * math.log2(x) - 1.0
    if delta < 1.0:
        val += (1.0 - delta) * math.log1p(rm) / LN2
    if delta > 0.0:
        val += delta * math.log2(om)
    return val


def _boundary_value(m: float, gamma: float, delta: float) -> Exponent | None:
    """F at or beyond the feasibility limits, or None for an interior point."""
    if m == 1:
        # a single bit: the mean equals the odd-weight probability
        return 0.0 if abs(gamma - delta) <= BOUNDARY_TOL else MINUS_INF
    lo = gamma_min(m, delta)
    if gamma < lo - BOUNDARY_TOL:
        return MINUS_INF
    if abs(gamma - lo) <= BOUNDARY_TOL:
        # all mass on weights 0 and 1
        return delta * math.log2(m)
    if gamma > 0.5:
        if not _is_int(m):
            raise ValueError("gamma > 1/2 is only defined for integer m")
        hi = gamma_max(int(m), delta)
        if gamma > hi + BOUNDARY_TOL:
            return MINUS_INF
        if abs(gamma - hi) <= BOUNDARY_TOL:
            return (1.0 - hi) * m * math.log2(m)
    return None


def _check_F_args(m: float, gamma: float, delta: float) -> None:
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0,1), got {gamma}")
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0,1], got {delta}")


def F(m: float, gamma: float, delta: float = 0.0) -> Exponent:
    """Entropy exponent F(m, gamma, delta), evaluated as g at the fitted alpha.

    Returns MINUS_INF when no distribution has the requested mean and odd
    probability.  Non-integer m is accepted for gamma <= 1/2.
    """
    _check_F_args(m, gamma, delta)
    edge = _boundary_value(m, gamma, delta)
    if edge is not None:
        return edge
    alpha = math.exp(_fit_log_alpha(m, gamma, delta))
    return g(m, gamma, alpha, delta)


def golden_section_min(f, lo: float, hi: float, tol: float = 1e-11, max_iter: int = 500):
    """Minimise a unimodal ``f`` on [lo, hi]; returns (argmin, min)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, min(fc, fd, f(x))


def F_by_minimization(m: float, gamma: float, delta: float = 0.0) -> Exponent:
    """F as the direct minimum of g over x > 0 (independent of the alpha fit).

    g is convex in ln x, so a golden-section search on ln x is safe.
    """
    _check_F_args(m, gamma, delta)
    edge = _boundary_value(m, gamma, delta)
    if edge is not None:
        return edge
    if gamma <= 0.5:
        # the minimiser is below 1; past it (1-x)^m needs an integer m
        lo, hi = -60.0, (0.5 if _is_int(m) else 0.0)
    else:
        lo, hi = -0.5, 40.0
    _, val = golden_section_min(lambda t: g(m, gamma, math.exp(t), delta), lo, hi)
    return val


def _log1pmx(u: float) -> float:
    """log(1+u) - u without cancellation for small u."""
    if abs(u) < 1e-3:
        return -u * u * (0.5 - u * (1 / 3 - u * (0.25 - u * (0.2 - u / 6))))
    return math.log1p(u) - u


def F_gap(m: float, gamma: float) -> float:
    """F(m, gamma) - (m h(gamma) - 1), computed without cancellation.

    With q = 1 - 2 gamma and r = (1 - alpha)/(1 + alpha), the excess splits
    into log2(1 + r^m) plus m times a divergence-like term in r - q that is
    second order, so the value keeps full relative precision even when it
    is far below the magnitude of F itself.
    """
    if not 0.0 < gamma < 0.5:
        raise ValueError(f"gamma must lie in (0, 1/2), got {gamma}")
    if m <= 1:
        raise ValueError(f"m must exceed 1, got {m}")
    alpha = math.exp(_fit_log_alpha(m, gamma, 0.0))
    q = 1.0 - 2.0 * gamma
    r = (1.0 - alpha) / (1.0 + alpha)
    rm1, om1 = _rpow(alpha, m - 1)
    rm, _ = _rpow(alpha, m)
    eps = -(1.0 - q) * rm1 * (1.0 + r) / om1
    psi = -((1.0 + q) / 2.0 * _log1pmx(eps / (1.0 + q)) + (1.0 - q) / 2.0 * _log1pmx(-eps / (1.0 - q)))
    return (m * psi + math.log1p(rm)) / LN2


def F_negation_identity_check(m: int, gamma: float, delta: float, tol: float = 1e-9) -> bool:
    """Check F(m,g,d) against its bit-negated counterpart for gamma > 1/2."""
    if not 0.5 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (1/2, 1), got {gamma}")
    lhs = F(m, gamma, delta)
    rhs = F(m, 1.0 - gamma, delta if m % 2 == 0 else 1.0 - delta)
    if lhs is MINUS_INF or rhs is MINUS_INF:
        return lhs is rhs
    return abs(lhs - rhs) <= tol


@dataclass(frozen=True)
class MaxEntParams:
    """Fitted parameters of P_{m,gamma,delta}.

    ``log2_Z`` normalises the unnormalised weights alpha^|u| (times beta on
    odd u).  At delta=1 beta is infinite and the odd weights are taken as
    alpha^|u| alone, so ``log2_Z`` is the odd-part normaliser.  At the
    boundary gamma = delta/m, alpha is 0 and P lives on weights 0 and 1.
    """

    m: int
    gamma: float
    delta: float
    alpha: float
    beta: float
    log2_Z: float
    F: Exponent

    @property
    def Z(self) -> float:
        try:
            return 2.0 ** self.log2_Z
        except OverflowError:
            return math.inf

    def parity_weights(self) -> tuple[float, float]:
        """Multipliers applied to even and odd weights."""
        if self.delta == 0.0:
            return 1.0, 0.0
        if self.delta == 1.0:
            return 0.0, 1.0
        return 1.0, self.beta

    def entropy(self) -> float:
        """h(P) = log Z - delta log beta - gamma m log alpha."""
        if self.alpha == 0.0:
            return h(self.delta) + self.delta * math.log2(self.m)
        ce, co = self.parity_weights()
        val = self.log2_Z - self.gamma * self.m * math.log2(self.alpha)
        if 0.0 < self.delta < 1.0:
            val -= self.delta * math.log2(co) + (1.0 - self.delta) * math.log2(ce)
        return val


def fit(m: int, gamma: float, delta: float = 0.0) -> MaxEntParams:
    """Fit alpha, beta, Z and F for integer m >= 2 and gamma_min <= gamma < 1/2."""
    if m < 2 or not _is_int(m):
        raise ValueError(f"fit needs an integer m >= 2, got {m}")
    _check_F_args(m, gamma, delta)
    if gamma >= 0.5:
        raise ValueError("fit covers gamma < 1/2")
    lo = gamma_min(m, delta)
    if gamma < lo - BOUNDARY_TOL:
        raise ValueError(f"gamma={gamma} below gamma_min={lo}")
    if abs(gamma - lo) <= BOUNDARY_TOL:
        return MaxEntParams(m, gamma, delta, 0.0, math.inf, 0.0, delta * math.log2(m))
    alpha = math.exp(_fit_log_alpha(m, gamma, delta))
    beta = _beta_at(m, alpha, delta)
    rm, om = _rpow(alpha, m)
    if delta == 0.0:
        tail = math.log1p(rm)
    elif delta == 1.0:
        tail = math.log(om)
    else:
        # ((1+beta) + (1-beta) r^m) / 2 in a form that keeps precision when beta is large
        tail = math.log((1.0 + rm) + beta * om)
    log2_Z = m * math.log2(1.0 + alpha) + tail / LN2 - 1.0
    return MaxEntParams(m, gamma, delta, alpha, beta, log2_Z, g(m, gamma, alpha, delta))


@dataclass(frozen=True)
class ChainProbs:
    """Coordinate-by-coordinate transition probabilities of P_{m,gamma}.

    ``p01[i-1]`` is Pr(u_i = 1 | prefix weight even), ``p10[i-1]`` the same
    given an odd prefix, and ``e[i]`` is Pr(prefix of length i is odd).
    """

    m: int
    gamma: float
    alpha: float
    p01: tuple[float, ...]
    p10: tuple[float, ...]
    e: tuple[float, ...]


def chain_probs(m: int, gamma: float) -> ChainProbs:
    if m < 2:
        raise ValueError("chain_probs needs m >= 2")
    alpha = alpha_of_gamma(m, gamma, 0.0)
    c = alpha / (1.0 + alpha)
    p01, p10 = [], []
    for i in range(1, m + 1):
        rj, oj = _rpow(alpha, m - i)
        rj1, oj1 = _rpow(alpha, m - i + 1)
        p01.append(c * oj / (1.0 + rj1))
        p10.append(c * (1.0 + rj) / oj1)
    # the last bit is forced by parity; pin it against rounding
    p01[-1], p10[-1] = 0.0, 1.0
    rm, _ = _rpow(alpha, m)
    e = []
    for i in range(m + 1):
        _, oi = _rpow(alpha, i)
        _, omi = _rpow(alpha, m - i)
        e.append(oi * omi / (2.0 * (1.0 + rm)))
    return ChainProbs(m, gamma, alpha, tuple(p01), tuple(p10), tuple(e))


def path_probability(chain: ChainProbs, u: int) -> float:
    """Probability that the sequential sampler emits ``u``."""
    p, odd = 1.0, 0
    for i in range(chain.m):
        bit = (u >> i) & 1
        q = chain.p10[i] if odd else chain.p01[i]
        p *= q if bit else 1.0 - q
        odd ^= bit
    return p


def pmf(params: MaxEntParams) -> np.ndarray:
    """Probabilities of every u in {0,1}^m, indexed by the integer u (m <= 20)."""
    m = params.m
    if m > 20:
        raise ValueError("pmf is limited to m <= 20")
    w = np.array([bin(u).count("1") for u in range(1 << m)])
    if params.alpha == 0.0:
        out = np.where(w == 0, 1.0 - params.delta, 0.0)
        return np.where(w == 1, params.delta / m, out)
    ce, co = params.parity_weights()
    mult = np.where(w % 2 == 1, co, ce)
    logp = w * math.log2(params.alpha) - params.log2_Z
    return mult * np.exp2(logp)


def weight_distribution(params: MaxEntParams) -> np.ndarray:
    """Pr(|u| = w) for w = 0..m."""
    m = params.m
    if params.alpha == 0.0:
        out = np.zeros(m + 1)
        out[0], out[1] = 1.0 - params.delta, params.delta
        return out
    ce, co = params.parity_weights()
    logc = np.array([math.lgamma(m + 1) - math.lgamma(w + 1) - math.lgamma(m - w + 1) for w in range(m + 1)]) / LN2
    ws = np.arange(m + 1)
    mult = np.where(ws % 2 == 1, co, ce)
    with np.errstate(divide="ignore"):
        logp = logc + ws * math.log2(params.alpha) - params.log2_Z
    return mult * np.exp2(logp)


def sample_P_many(params: MaxEntParams, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` independent draws from P as uint64 bit patterns.

    delta = 0 uses the parity chain; otherwise the weight is drawn first and
    its positions uniformly.
    """
    m = params.m
    if m > 64:
        raise ValueError("vectors are limited to 64 coordinates")
    if params.delta == 0.0 and params.alpha > 0.0:
        chain = chain_probs(m, params.gamma)
        out = np.zeros(size, dtype=np.uint64)
        odd = np.zeros(size, dtype=bool)
        for i in range(m):
            prob = np.where(odd, chain.p10[i], chain.p01[i])
            bit = rng.random(size) < prob
            out |= bit.astype(np.uint64) << np.uint64(i)
            odd ^= bit
        return out
    wd = weight_distribution(params)
    weights = rng.choice(m + 1, size=size, p=wd / wd.sum())
    order = np.argsort(rng.random((size, m)), axis=1)
    ranks = np.empty_like(order)
    np.put_along_axis(ranks, order, np.arange(m)[None, :].repeat(size, axis=0), axis=1)
    chosen = ranks < weights[:, None]
    shifts = np.uint64(1) << np.arange(m, dtype=np.uint64)
    return (chosen.astype(np.uint64) * shifts).sum(axis=1, dtype=np.uint64)


def sample_P(params: MaxEntParams, rng: np.random.Generator) -> int:
    """One draw from P as an int bit pattern."""
    return int(sample_P_many(params, 1, rng)[0])


def random_feasible_distributions(params: MaxEntParams, count: int, rng: np.random.Generator) -> np.ndarray:
    """Random distributions on {0,1}^m with the same coordinate means and odd mass as P.

    Each is P plus a random direction projected onto the null space of the
    linear constraints, scaled to stay nonnegative.
    """
    m = params.m
    p = pmf(params)
    u = np.arange(1 << m)
    odd = np.array([bin(x).count("1") % 2 for x in u], dtype=float)
    # at delta in {0, 1} one parity class carries no mass; perturb the rest
    support = (p > 0) if params.delta in (0.0, 1.0) else np.ones(len(u), dtype=bool)
    rows = [np.ones(len(u))] + [((u >> i) & 1).astype(float) for i in range(m)] + [odd]
    A = np.array(rows)[:, support]
    _, s, vt = np.linalg.svd(A)
    null = vt[int((s > 1e-10).sum()):]
    ps = p[support]
    out = np.zeros((count, len(u)))
    if len(null) == 0:
        out[:, support] = ps  # the constraints pin P down
        return out
    for j in range(count):
        direction = rng.standard_normal(len(null)) @ null
        neg = direction < 0
        tmax = np.min(ps[neg] / -direction[neg])
        out[j, support] = np.clip(ps + rng.uniform(0.0, 1.0) * tmax * direction, 0.0, None)
    return out


def entropy_bits(dist: np.ndarray) -> float:
    q = dist[dist > 0]
    return float(-(q * np.log2(q)).sum())
