"""Pairwise-independent random codebooks: sizing, description, sampling.

Codewords are drawn mutually independently (which is stronger than the
pairwise independence the theory needs): i.i.d. ensembles draw every symbol
from Q, constant-composition ensembles draw each row as an independent
uniform permutation of a fixed composition multiset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import SizeOverflowError
from .exponents import InputDistribution

SIZING_GUARD_BITS = 40.0


def ceil_int(v: float) -> int:
    """Ceiling with a snap: values within 4 ulps of an integer round to it.

    Guards quantities like M * eps whose mathematical value is integral but
    whose float image may land one ulp past it.
    """
    r = round(v)
    if abs(v - r) <= 4.0 * math.ulp(max(abs(v), 1.0)):
        return int(r)
    return int(math.ceil(v))


def codebook_size(rate: float, n: int, eps: float) -> tuple[int, int]:
    """(M_n, M'_n) = (ceil(2^(n rate)), M_n + ceil(M_n * eps)).

    Exact integer shifting when n * rate is integral; otherwise exp2 with the
    ulp snap.  M_n + ceil(M_n * eps) equals ceil(M_n * (1 + eps)) exactly and
    avoids the float product M_n * (1 + eps).
    """
    if rate < 0.0 or eps < 0.0 or n < 1:
        raise ValueError(f"need rate >= 0, eps >= 0, n >= 1; got {rate}, {eps}, {n}")
    x = n * rate
    if x > SIZING_GUARD_BITS:
        raise SizeOverflowError(
            f"n * rate = {x} exceeds the {SIZING_GUARD_BITS}-bit sizing guard"
        )
    r = round(x)
    if abs(x - r) <= 32.0 * math.ulp(max(abs(x), 1.0)):
        m_n = 1 << int(r)
    else:
        m_n = ceil_int(2.0 ** x)
    m_prime = m_n + ceil_int(m_n * eps)
    return m_n, m_prime


def nearest_composition(q: InputDistribution, n: int) -> tuple[int, ...]:
    """Composition counts closest to n * Q by largest-remainder rounding.

    Ties break toward the lower symbol index; counts always sum to n.
    """
    if n < 1:
        raise ValueError(f"block length must be >= 1, got {n}")
    target = q.pmf * n
    base = np.floor(target).astype(np.int64)
    rem = target - base
    deficit = n - int(base.sum())
    order = sorted(range(q.pmf.size), key=lambda a: (-rem[a], a))
    for a in order[:deficit]:
        base[a] += 1
    return tuple(int(c) for c in base)


@dataclass(frozen=True)
class EnsembleSpec:
    """Description of one random-codebook ensemble at block length n.

    kind is "iid" (with q) or "cc" (with counts).  m_n is the post-expurgation
    target size, m_prime the mother-code size sampled before expurgation.
    """

    kind: str
    n: int
    rate: float
    eps: float
    m_n: int
    m_prime: int
    q: Optional[InputDistribution] = None
    counts: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.kind not in ("iid", "cc"):
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.n < 1:
            raise ValueError(f"block length must be >= 1, got {self.n}")
        if self.m_n < 1 or self.m_prime < self.m_n:
            raise ValueError(
                f"bad sizes: m_n={self.m_n}, m_prime={self.m_prime}"
            )
        if self.eps > 0.0 and self.m_prime <= self.m_n:
            raise ValueError("eps > 0 requires m_prime > m_n")
        if self.kind == "iid":
            if self.q is None:
                raise ValueError("iid ensembles need an input distribution")
        else:
            if self.counts is None:
                raise ValueError("cc ensembles need composition counts")
            if any(c < 0 for c in self.counts):
                raise ValueError("composition counts must be nonnegative")
            if sum(self.counts) != self.n:
                raise ValueError(
                    f"composition sums to {sum(self.counts)}, expected n = {self.n}"
                )

    @classmethod
    def iid(
        cls, q: InputDistribution, n: int, rate: float, eps: float
    ) -> "EnsembleSpec":
        m_n, m_prime = codebook_size(rate, n, eps)
        return cls(kind="iid", n=n, rate=rate, eps=eps, m_n=m_n, m_prime=m_prime, q=q)

    @classmethod
    def constant_composition(
        cls, counts: Sequence[int], n: int, rate: float, eps: float
    ) -> "EnsembleSpec":
        m_n, m_prime = codebook_size(rate, n, eps)
        return cls(
            kind="cc",
            n=n,
            rate=rate,
            eps=eps,
            m_n=m_n,
            m_prime=m_prime,
            counts=tuple(int(c) for c in counts),
        )

    @classmethod
    def gallager(
        cls,
        n: int,
        rate: float,
        q: Optional[InputDistribution] = None,
        counts: Optional[Sequence[int]] = None,
    ) -> "EnsembleSpec":
        """Classical mother code with M' = 2 M - 1, i.e. eps = (M-1)/M.

        Used by the gamma = 2 worst-half expurgation regression.
        """
        m_n, _ = codebook_size(rate, n, 0.0)
        eps = (m_n - 1) / m_n
        if counts is not None:
            return cls(
                kind="cc", n=n, rate=rate, eps=eps, m_n=m_n,
                m_prime=2 * m_n - 1, counts=tuple(int(c) for c in counts),
            )
        if q is None:
            raise ValueError("gallager spec needs q or counts")
        return cls(
            kind="iid", n=n, rate=rate, eps=eps, m_n=m_n, m_prime=2 * m_n - 1, q=q
        )


@dataclass(frozen=True)
class Codebook:
    """One sampled mother code: m_prime rows of n input symbols."""

    spec: EnsembleSpec
    rows: np.ndarray
    seed: int
    trial_id: int

    @property
    def m_prime(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]


def _generator(master_seed: int, n: int, trial_id: int) -> np.random.Generator:
    # Splittable stream: PCG64 seeded from SeedSequence(master_seed) with the
    # (block length, trial id) spawn key.  Distinct trials never share state,
    # and the mapping is documented and fixed for reproducibility.
    ss = np.random.SeedSequence(master_seed, spawn_key=(n, trial_id))
    return np.random.Generator(np.random.PCG64(ss))


def sample_codebook(spec: EnsembleSpec, master_seed: int, trial_id: int) -> Codebook:
    """Draw one codebook; deterministic in (spec, master_seed, trial_id)."""
    gen = _generator(master_seed, spec.n, trial_id)
    if spec.kind == "iid":
        cdf = np.cumsum(spec.q.pmf)
        u = gen.random((spec.m_prime, spec.n))
        rows = np.searchsorted(cdf, u, side="right").astype(np.int64)
        np.clip(rows, 0, spec.q.pmf.size - 1, out=rows)
    else:
        k = len(spec.counts)
        base = np.repeat(np.arange(k, dtype=np.int64), spec.counts)
        rows = np.empty((spec.m_prime, spec.n), dtype=np.int64)
        bounds = np.arange(spec.n, 1, -1)
        for r in range(spec.m_prime):
            row = base.copy()
            # Fisher-Yates, consuming one bounded draw per step from the high end
            js = gen.integers(0, bounds) if spec.n > 1 else ()
            for i, j in zip(range(spec.n - 1, 0, -1), js):
                row[i], row[j] = row[j], row[i]
            rows[r] = row
    rows.setflags(write=False)
    return Codebook(spec=spec, rows=rows, seed=master_seed, trial_id=trial_id)
