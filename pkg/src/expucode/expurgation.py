"""Per-codeword error evaluation, the indicator census, and expurgation.

The default evaluation is the union-Bhattacharyya bound
P_e,m <= sum_{k != m} Z_n(x_m, x_k), whose ensemble moments generate the
expurgated exponent; an exact ML decoder over the enumerated output space is
available as an opt-in oracle for tiny instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .channel import BhattMatrix, Channel
from .ensembles import Codebook, ceil_int
from .errors import BudgetExceededError, KeepTooLargeError

ML_BUDGET = 2 ** 20


@dataclass(frozen=True)
class CodewordEval:
    """Error probability and exponent of one codeword within one code."""

    m: int
    pe_bound: float
    exponent: float
    infinite: bool
    pe_exact: Optional[float] = None


@dataclass(frozen=True)
class TrialCensus:
    """Counts of codewords above/below an exponent threshold.

    phi[m] is the strict indicator {exponent_m > threshold}; big_phi and
    big_psi are the above/below counts; passed records whether big_phi
    reached ceil(m_n * (1 + eps1)).
    """

    threshold: float
    phi: tuple[bool, ...]
    big_phi: int
    big_psi: int
    m_n: int
    eps1: float
    passed: bool

    @property
    def m_prime(self) -> int:
        return len(self.phi)


@dataclass(frozen=True)
class ExpurgatedCode:
    """Surviving codeword indices (0-based rows) after expurgation."""

    kept: tuple[int, ...]
    min_exponent: float
    achieved_rate: float


def _check_rows(rows: np.ndarray, size: int) -> None:
    # kernels run with bounds checks off; validate symbols once up front
    if rows.size and (rows.min() < 0 or rows.max() >= size):
        raise IndexError(f"codebook contains symbols outside [0, {size})")


def union_bhattacharyya_bound(code: Codebook, m: int, bm: BhattMatrix) -> float:
    """sum_{k != m} Z_n(x_m, x_k); probability-scale, may exceed 1."""
    if not 0 <= m < code.m_prime:
        raise IndexError(f"codeword index {m} out of range for M' = {code.m_prime}")
    _check_rows(code.rows, bm.input_size)
    return float(kernels.ub_sum_one(code.rows, m, bm.z))


def exact_ml_error(code: Codebook, m: int, ch: Channel) -> float:
    """Exact ML block error probability of codeword m, by enumerating Y^n.

    The decoder maximizes W^n(y|x_k) with ties broken toward the lowest
    index.  Requires |Y|^n <= 2^20.
    """
    if not 0 <= m < code.m_prime:
        raise IndexError(f"codeword index {m} out of range for M' = {code.m_prime}")
    return float(exact_ml_errors(code, ch)[m])


def exact_ml_errors(code: Codebook, ch: Channel) -> np.ndarray:
    """Exact ML error probabilities for every codeword in one enumeration pass."""
    if ch.output_size ** code.n > ML_BUDGET:
        raise BudgetExceededError(
            f"|Y|^n = {ch.output_size ** code.n} exceeds the 2^20 ML budget"
        )
    _check_rows(code.rows, ch.input_size)
    return kernels.ml_error_probs(code.rows, ch.matrix)


def codeword_exponent(pe: float, n: int) -> float:
    """E = -(1/n) log2 pe; +inf for pe = 0, negative when pe > 1."""
    if pe < 0.0:
        raise ValueError(f"error probability must be nonnegative, got {pe}")
    if pe == 0.0:
        return math.inf
    if pe == 1.0:
        return 0.0
    return -math.log2(pe) / n


def evaluate_codebook(
    code: Codebook,
    bm: BhattMatrix,
    method: str = "ub",
    ch: Optional[Channel] = None,
) -> list[CodewordEval]:
    """Evaluate every codeword of a code.

    method "ub" scores by the union-Bhattacharyya bound; "exact" also runs
    the ML oracle and takes exponents from it.
    """
    if method not in ("ub", "exact"):
        raise ValueError(f"unknown evaluation method {method!r}")
    _check_rows(code.rows, bm.input_size)
    bounds = kernels.ub_sums(code.rows, bm.z)
    exact = None
    if method == "exact":
        if ch is None:
            raise ValueError("exact evaluation needs the channel")
        exact = exact_ml_errors(code, ch)
    n = code.n
    evals = []
    for m in range(code.m_prime):
        pe_bound = float(bounds[m])
        pe_exact = None if exact is None else float(exact[m])
        pe = pe_bound if exact is None else pe_exact
        evals.append(
            CodewordEval(
                m=m,
                pe_bound=pe_bound,
                exponent=codeword_exponent(pe, n),
                infinite=(pe == 0.0),
                pe_exact=pe_exact,
            )
        )
    return evals


def census(
    evals: Sequence[CodewordEval], threshold: float, m_n: int, eps1: float
) -> TrialCensus:
    """Count codewords with exponent strictly above the threshold.

    Equality does not count; +inf does.  passed records the theorem event
    big_phi >= ceil(m_n * (1 + eps1)).
    """
    if eps1 < 0.0:
        raise ValueError(f"eps1 must be nonnegative, got {eps1}")
    phi = tuple(e.exponent > threshold for e in evals)
    big_phi = sum(phi)
    required = m_n + ceil_int(m_n * eps1)
    return TrialCensus(
        threshold=threshold,
        phi=phi,
        big_phi=big_phi,
        big_psi=len(phi) - big_phi,
        m_n=m_n,
        eps1=eps1,
        passed=big_phi >= required,
    )


def expurgate(
    code: Codebook, evals: Sequence[CodewordEval], keep: int
) -> ExpurgatedCode:
    """Keep the `keep` best codewords (highest exponent, ties to lower index)."""
    if keep > len(evals):
        raise KeepTooLargeError(f"keep = {keep} exceeds M' = {len(evals)}")
    if keep < 1:
        raise ValueError(f"keep must be >= 1, got {keep}")
    order = sorted(range(len(evals)), key=lambda i: (-evals[i].exponent, i))
    kept = tuple(sorted(order[:keep]))
    return ExpurgatedCode(
        kept=kept,
        min_exponent=min(evals[i].exponent for i in kept),
        achieved_rate=math.log2(keep) / code.n,
    )


def is_good_mother_code(c: TrialCensus) -> bool:
    """Weaker eps1 = 0 criterion: enough survivors to fill the target code."""
    return c.big_phi >= c.m_n
