"""Expurgated and random-coding error exponents for DMCs.

All logarithms are base 2; rates and exponents are in bits per symbol.
The expurgated family is

    E_x(rho, Q) = -rho * log2( sum_{a,b} Q(a) Q(b) Z(a,b)^(1/rho) ),   rho >= 1,

and the expurgated exponent at rate R is max over rho of E_x(rho, Q) - rho R.
The random-coding baseline uses Gallager's E_0 over rho in [0, 1].
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channel import BhattMatrix, Channel
from .errors import (
    BudgetExceededError,
    LengthMismatchError,
    NoConvergenceError,
    RhoMaxTooSmallError,
    RhoRangeError,
)

PMF_SUM_TOL = 1e-12

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class InputDistribution:
    """Single-letter input distribution Q; generates i.i.d. Q^n."""

    pmf: np.ndarray

    def __post_init__(self):
        arr = np.array(self.pmf, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("pmf must be a nonempty 1-d array")
        if np.any(arr < 0.0):
            raise ValueError("pmf entries must be nonnegative")
        s = float(arr.sum())
        if abs(s - 1.0) > PMF_SUM_TOL:
            raise ValueError(f"pmf sums to {s!r}, expected 1 within {PMF_SUM_TOL}")
        arr.setflags(write=False)
        object.__setattr__(self, "pmf", arr)

    @classmethod
    def uniform(cls, k: int) -> "InputDistribution":
        return cls(np.full(k, 1.0 / k))


@dataclass(frozen=True)
class GammaKind:
    """Confidence sequence gamma_n.

    "sqrt-exp" gives gamma_n = 2^sqrt(n), "poly" gives gamma_n = n^k.  Both
    tend to infinity with (log2 gamma_n)/n -> 0.  "fixed" holds gamma constant
    and deliberately violates gamma_n -> infinity; it exists as a test hook
    for the classical gamma = 2 worst-half expurgation regression.
    """

    kind: str
    param: float = 0.0

    def __post_init__(self):
        if self.kind not in ("sqrt-exp", "poly", "fixed"):
            raise ValueError(f"unknown gamma kind {self.kind!r}")
        if self.kind == "poly" and self.param <= 0:
            raise ValueError("poly exponent must be positive")
        if self.kind == "fixed" and self.param <= 0:
            raise ValueError("fixed gamma must be positive")

    @classmethod
    def sqrt_exp(cls) -> "GammaKind":
        return cls("sqrt-exp")

    @classmethod
    def poly(cls, k: float) -> "GammaKind":
        return cls("poly", float(k))

    @classmethod
    def fixed(cls, gamma: float) -> "GammaKind":
        return cls("fixed", float(gamma))

    @classmethod
    def parse(cls, text: str) -> "GammaKind":
        """Parse "sqrt-exp", "poly:K" or "fixed:G"."""
        if text == "sqrt-exp":
            return cls.sqrt_exp()
        if text.startswith("poly:"):
            return cls.poly(float(text.split(":", 1)[1]))
        if text.startswith("fixed:"):
            return cls.fixed(float(text.split(":", 1)[1]))
        raise ValueError(f"cannot parse gamma kind {text!r}")

    def __str__(self) -> str:
        if self.kind == "sqrt-exp":
            return "sqrt-exp"
        if self.kind == "poly":
            return f"poly:{self.param:g}"
        return f"fixed:{self.param:g}"

    def log2_gamma(self, n: int) -> float:
        """log2 of gamma_n; kept in log domain so huge n cannot overflow."""
        if self.kind == "sqrt-exp":
            return math.sqrt(n)
        if self.kind == "poly":
            return self.param * math.log2(n)
        return math.log2(self.param)

    def gamma(self, n: int) -> float:
        return 2.0 ** self.log2_gamma(n)


@dataclass(frozen=True)
class ExponentSolution:
    """Optimized expurgated exponent at one rate.

    e_ex = ex_value - rho_hat * rate holds exactly by construction; capped
    flags a maximizer pinned at the rho search ceiling, which happens at
    rates low enough that the optimal rho diverges.
    """

    rate: float
    rho_hat: float
    ex_value: float
    e_ex: float
    capped: bool
    s: float


@dataclass(frozen=True)
class Schedule:
    """gamma_n / delta_n pair and the probability bounds they induce."""

    n: int
    gamma_kind: GammaKind
    gamma: float
    delta: float
    lemma_bound: float
    theorem_bound: float


def ex_single_letter(rho: float, q: InputDistribution, bm: BhattMatrix) -> float:
    """E_x(rho, Q) for i.i.d. Q^n, in bits/symbol.

    Zero Bhattacharyya entries contribute 0^(1/rho) = 0; an all-zero inner
    sum (impossible for a pmf Q with the unit diagonal) would map to +inf.
    """
    if rho < 1.0:
        raise RhoRangeError(f"rho = {rho} but the expurgated family needs rho >= 1")
    if q.pmf.size != bm.input_size:
        raise LengthMismatchError(
            f"Q has {q.pmf.size} atoms but the channel has {bm.input_size} inputs"
        )
    zp = bm.z ** (1.0 / rho)
    inner = float(q.pmf @ zp @ q.pmf)
    if inner <= 0.0:
        return math.inf
    return -rho * math.log2(inner)


def ex_limit(q: InputDistribution, bm: BhattMatrix) -> float:
    """rho -> infinity limit of E_x: -sum_{a,b} Q(a)Q(b) log2 Z(a,b).

    +inf when some pair with positive Q-mass has Z = 0.
    """
    total = 0.0
    z = bm.z
    for a in range(bm.input_size):
        for b in range(bm.input_size):
            w = float(q.pmf[a] * q.pmf[b])
            if w == 0.0:
                continue
            if z[a, b] == 0.0:
                return math.inf
            total -= w * math.log2(z[a, b])
    return total


def ex_multi_letter_exact(rho: float, spec, bm: BhattMatrix) -> float:
    """Eq.-level n-letter expurgated exponent by exhaustive enumeration.

    Sums Q^n(x) Q^n(x') Z_n(x, x')^(1/rho) over all ordered sequence pairs
    and returns -(rho/n) log2 of the sum.  Supports i.i.d. and constant
    composition ensembles; this is the tiny-n oracle the single-letter
    formula is checked against.
    """
    if rho < 1.0:
        raise RhoRangeError(f"rho = {rho} but the expurgated family needs rho >= 1")
    n = spec.n
    k = bm.input_size
    if k ** (2 * n) > 2 ** 24:
        raise BudgetExceededError(
            f"|X|^(2n) = {k ** (2 * n)} exceeds the 2^24 enumeration budget"
        )
    seqs = np.array(list(itertools.product(range(k), repeat=n)), dtype=np.int64)
    if spec.kind == "iid":
        probs = np.prod(spec.q.pmf[seqs], axis=1)
    elif spec.kind == "cc":
        counts = np.asarray(spec.counts, dtype=np.int64)
        member = np.ones(len(seqs), dtype=bool)
        for a in range(k):
            member &= (seqs == a).sum(axis=1) == counts[a]
        seqs = seqs[member]
        probs = np.full(len(seqs), 1.0 / len(seqs))
    else:
        raise ValueError(f"unsupported ensemble kind {spec.kind!r}")

    zp = bm.z ** (1.0 / rho)
    total = 0.0
    block = 256
    for lo in range(0, len(seqs), block):
        blk = seqs[lo : lo + block]
        acc = np.ones((len(blk), len(seqs)))
        for i in range(n):
            acc *= zp[blk[:, i][:, None], seqs[:, i][None, :]]
        total += float(probs[lo : lo + block] @ acc @ probs)
    if total <= 0.0:
        return math.inf
    return -(rho / n) * math.log2(total)


def gallager_e0(rho: float, q: InputDistribution, ch: Channel) -> float:
    """Gallager's E_0(rho, Q) = -log2 sum_y ( sum_a Q(a) W(y|a)^(1/(1+rho)) )^(1+rho)."""
    if not 0.0 <= rho <= 1.0:
        raise RhoRangeError(f"rho = {rho} outside [0, 1]")
    if q.pmf.size != ch.input_size:
        raise LengthMismatchError(
            f"Q has {q.pmf.size} atoms but the channel has {ch.input_size} inputs"
        )
    wa = ch.matrix ** (1.0 / (1.0 + rho))
    inner = q.pmf @ wa
    return -math.log2(float(np.sum(inner ** (1.0 + rho))))


def _golden_max(
    f: Callable[[float], float], lo: float, hi: float, tol: float
) -> tuple[float, float]:
    """Maximize a unimodal f on [lo, hi] by golden-section search.

    Compares the interior estimate against both endpoints, so boundary
    maximizers are returned exactly.
    """
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    best_x, best_v = lo, f(lo)
    for cand in (hi, x):
        v = f(cand)
        if v > best_v:
            best_x, best_v = cand, v
    return best_x, best_v


def random_coding_exponent(
    rate: float, q: InputDistribution, ch: Channel
) -> tuple[float, float]:
    """max over rho in [0, 1] of E_0(rho, Q) - rho * rate.

    Returns (rho_star, e_r).  The objective is concave in rho; rho = 0 always
    yields 0, so e_r is never meaningfully negative.
    """
    if rate < 0.0:
        raise ValueError(f"rate must be nonnegative, got {rate}")
    return _golden_max(lambda r: gallager_e0(r, q, ch) - r * rate, 0.0, 1.0, 1e-6)


def optimize_rho(
    rate: float, q: InputDistribution, bm: BhattMatrix, rho_max: float = 64.0
) -> ExponentSolution:
    """Maximize E_x(rho, Q) - rho * rate over rho in [1, rho_max].

    The objective is concave in rho, so golden-section search to an absolute
    rho tolerance of 1e-6 locates the maximizer; capped is set when it sits
    within 10 tolerances of rho_max.
    """
    if rho_max < 1.0:
        raise RhoMaxTooSmallError(f"rho_max = {rho_max} is below 1")
    if rate < 0.0:
        raise ValueError(f"rate must be nonnegative, got {rate}")
    tol = 1e-6
    rho_hat, _ = _golden_max(
        lambda r: ex_single_letter(r, q, bm) - r * rate, 1.0, rho_max, tol
    )
    ex_value = ex_single_letter(rho_hat, q, bm)
    return ExponentSolution(
        rate=rate,
        rho_hat=rho_hat,
        ex_value=ex_value,
        e_ex=ex_value - rho_hat * rate,
        capped=(rho_max - rho_hat) <= 10.0 * tol,
        s=1.0 / rho_hat,
    )


def schedule(n: int, rho_hat: float, gamma_kind: GammaKind) -> Schedule:
    """gamma_n, delta_n = (rho_hat/n) log2 gamma_n, and the derived bounds."""
    if n < 1:
        raise ValueError(f"block length must be >= 1, got {n}")
    lg = gamma_kind.log2_gamma(n)
    gamma = 2.0 ** lg
    return Schedule(
        n=n,
        gamma_kind=gamma_kind,
        gamma=gamma,
        delta=(rho_hat / n) * lg,
        lemma_bound=1.0 - 1.0 / gamma,
        theorem_bound=1.0 - 1.0 / math.sqrt(gamma),
    )


N0_SCAN_CAP = 2 ** 31


def n0_threshold(eps: float, eps1: float, gamma_kind: GammaKind) -> int:
    """Smallest n with (eps - eps1) * sqrt(gamma_n) > 1 + eps.

    Past this block length the census event probability is at least
    1 - 1/sqrt(gamma_n).  Doubling scan followed by bisection; degenerate
    gamma kinds that never satisfy the inequality raise NoConvergenceError.
    """
    if not 0.0 < eps1 < eps:
        raise ValueError(f"need 0 < eps1 < eps, got eps1={eps1}, eps={eps}")
    need = math.log2(1.0 + eps) - math.log2(eps - eps1)

    def ok(n: int) -> bool:
        return 0.5 * gamma_kind.log2_gamma(n) > need

    if ok(1):
        return 1
    hi = 2
    while hi < N0_SCAN_CAP and not ok(hi):
        hi *= 2
    if not ok(hi):
        raise NoConvergenceError(
            f"no n below 2^31 satisfies the tail gap for gamma kind {gamma_kind}"
        )
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi
