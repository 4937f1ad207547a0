"""Pure-Python evaluation kernels.

Reference backend used when the compiled extension is unavailable (or forced
via EXPU_PURE=1).  Loop nesting, Kahan updates and zero-term skips match
expucode._kernels operation for operation, so the two backends return
bit-identical floats.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"


def ub_sums(rows: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Union-Bhattacharyya sums for every codeword.

    out[m] = sum over k != m of prod_t z[rows[m,t], rows[k,t]], accumulated
    with Kahan compensation in ascending-k order.  Each unordered pair is
    computed once; products stop at the first exact zero factor.
    """
    m_count, n = rows.shape
    rl = rows.tolist()
    zl = z.tolist()
    s = [0.0] * m_count
    c = [0.0] * m_count
    for i in range(m_count):
        ri = rl[i]
        for j in range(i + 1, m_count):
            rj = rl[j]
            p = 1.0
            for t in range(n):
                p *= zl[ri[t]][rj[t]]
                if p == 0.0:
                    break
            if p == 0.0:
                continue
            y = p - c[i]
            tt = s[i] + y
            c[i] = (tt - s[i]) - y
            s[i] = tt
            y = p - c[j]
            tt = s[j] + y
            c[j] = (tt - s[j]) - y
            s[j] = tt
    return np.array(s, dtype=np.float64)


def ub_sum_one(rows: np.ndarray, m: int, z: np.ndarray) -> float:
    """Union-Bhattacharyya sum for codeword m alone; same order as ub_sums."""
    m_count, n = rows.shape
    rl = rows.tolist()
    zl = z.tolist()
    rm = rl[m]
    s = 0.0
    c = 0.0
    for k in range(m_count):
        if k == m:
            continue
        rk = rl[k]
        p = 1.0
        for t in range(n):
            p *= zl[rm[t]][rk[t]]
            if p == 0.0:
                break
        if p == 0.0:
            continue
        y = p - c
        tt = s + y
        c = (tt - s) - y
        s = tt
    return s


def ml_error_probs(rows: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Exact ML block-error probability of every codeword.

    Walks all |Y|^n output sequences in lexicographic order, maintaining the
    per-codeword likelihood prefix products; the decoder picks the highest
    likelihood with ties toward the lowest index.  The caller enforces the
    enumeration budget.
    """
    m_count, n = rows.shape
    y_size = w.shape[1]
    rl = rows.tolist()
    wl = w.tolist()
    pe = [0.0] * m_count
    comp = [0.0] * m_count
    part = [[1.0] * m_count for _ in range(n + 1)]
    y = [0] * n
    d0 = 0
    while True:
        for d in range(d0, n):
            pd = part[d]
            pn = part[d + 1]
            yd = y[d]
            for k in range(m_count):
                pn[k] = pd[k] * wl[rl[k][d]][yd]
        leaf = part[n]
        best = leaf[0]
        bi = 0
        for k in range(1, m_count):
            if leaf[k] > best:
                best = leaf[k]
                bi = k
        for k in range(m_count):
            if k != bi:
                v = leaf[k]
                yy = v - comp[k]
                tt = pe[k] + yy
                comp[k] = (tt - pe[k]) - yy
                pe[k] = tt
        p = n - 1
        while p >= 0 and y[p] == y_size - 1:
            y[p] = 0
            p -= 1
        if p < 0:
            break
        y[p] += 1
        d0 = p
    return np.array(pe, dtype=np.float64)
