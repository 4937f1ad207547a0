"""Discrete memoryless channels and Bhattacharyya coefficients.

A channel is a row-stochastic |X| x |Y| matrix; row ``a`` is the conditional
pmf W(.|a).  The n-letter channel acts independently per position, so sequence
likelihoods and sequence Bhattacharyya coefficients factor over positions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    ChannelFormatError,
    DegenerateAlphabetError,
    LengthMismatchError,
    NegativeEntryError,
    RowSumError,
)

ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class Channel:
    """Validated discrete memoryless channel.

    ``matrix[a, b]`` is W(b|a); rows are conditional pmfs.  Instances are
    immutable (the array is marked read-only) and safe to share across
    threads.
    """

    input_size: int
    output_size: int
    matrix: np.ndarray


@dataclass(frozen=True)
class BhattMatrix:
    """Single-letter Bhattacharyya coefficients Z(a, b) for one channel.

    Symmetric with unit diagonal; all entries in [0, 1].
    """

    z: np.ndarray

    @property
    def input_size(self) -> int:
        return self.z.shape[0]


def validate_channel(matrix: Sequence[Sequence[float]]) -> Channel:
    """Build a Channel from a rectangular array of rows, or raise.

    Rows must be length-matched, entries nonnegative and at most 1, and each
    row must sum to 1 within 1e-12.  Entries are stored untouched (no silent
    renormalization).
    """
    rows = list(matrix)
    if len(rows) < 2:
        raise DegenerateAlphabetError(
            f"need at least 2 input symbols, got {len(rows)}"
        )
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ChannelFormatError(
                f"row {i} has {len(row)} entries, row 0 has {width}"
            )
    if width < 2:
        raise DegenerateAlphabetError(
            f"need at least 2 output symbols, got {width}"
        )
    arr = np.array(rows, dtype=np.float64)
    for i in range(arr.shape[0]):
        for j in range(arr.shape[1]):
            v = arr[i, j]
            if v < 0.0:
                raise NegativeEntryError(f"matrix[{i}][{j}] = {v} is negative")
            if v > 1.0 + ROW_SUM_TOL:
                raise ChannelFormatError(f"matrix[{i}][{j}] = {v} exceeds 1")
        s = float(arr[i].sum())
        if abs(s - 1.0) > ROW_SUM_TOL:
            raise RowSumError(f"row {i} sums to {s!r}, expected 1 within {ROW_SUM_TOL}")
    arr.setflags(write=False)
    return Channel(input_size=arr.shape[0], output_size=arr.shape[1], matrix=arr)


def bsc(crossover: float) -> Channel:
    """Binary symmetric channel with the given crossover probability."""
    p = float(crossover)
    return validate_channel([[1.0 - p, p], [p, 1.0 - p]])


def erasure(p: float) -> Channel:
    """Binary erasure channel; output symbol 2 is the erasure."""
    p = float(p)
    return validate_channel([[1.0 - p, 0.0, p], [0.0, 1.0 - p, p]])


def load_channel(path: str | Path) -> Channel:
    """Read a channel from a JSON file {"inputs", "outputs", "matrix"}."""
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ChannelFormatError(f"{path}: not valid JSON ({exc})") from exc
    for key in ("inputs", "outputs", "matrix"):
        if key not in obj:
            raise ChannelFormatError(f"{path}: missing key {key!r}")
    ch = validate_channel(obj["matrix"])
    if ch.input_size != obj["inputs"] or ch.output_size != obj["outputs"]:
        raise ChannelFormatError(
            f"{path}: declared {obj['inputs']}x{obj['outputs']} but matrix is "
            f"{ch.input_size}x{ch.output_size}"
        )
    return ch


def save_channel(ch: Channel, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(
            {
                "inputs": ch.input_size,
                "outputs": ch.output_size,
                "matrix": ch.matrix.tolist(),
            },
            fh,
            indent=2,
        )
        fh.write("\n")


def bhattacharyya(ch: Channel, a: int, b: int) -> float:
    """Z(a, b) = sum_y sqrt(W(y|a)) * sqrt(W(y|b)).

    The factored form keeps zero entries exact and makes Z(a, b) the inner
    product of the square-rooted rows.
    """
    if not (0 <= a < ch.input_size and 0 <= b < ch.input_size):
        raise IndexError(f"input symbols ({a}, {b}) out of range for |X|={ch.input_size}")
    sa = np.sqrt(ch.matrix[a])
    sb = np.sqrt(ch.matrix[b])
    return float(sa @ sb)


def bhattacharyya_matrix(ch: Channel) -> BhattMatrix:
    """All pairwise single-letter coefficients, symmetric by construction.

    The diagonal is mathematically 1 (each row is a pmf); it is snapped to
    exactly 1.0 after a 1e-12 sanity check so that products over equal
    sequences come out as exactly 1.
    """
    s = np.sqrt(ch.matrix)
    k = ch.input_size
    z = np.empty((k, k), dtype=np.float64)
    for a in range(k):
        for b in range(a, k):
            v = float(s[a] @ s[b])
            z[a, b] = v
            z[b, a] = v
    for a in range(k):
        if abs(z[a, a] - 1.0) > 1e-12:
            raise RowSumError(f"row {a} is not a pmf: Z({a},{a}) = {z[a, a]!r}")
        z[a, a] = 1.0
    z.setflags(write=False)
    return BhattMatrix(z=z)


def bhattacharyya_seq(bm: BhattMatrix, x: Sequence[int], x2: Sequence[int]) -> float:
    """Multi-letter coefficient Z_n(x, x') = prod_i Z(x_i, x'_i).

    Exact for memoryless channels; returns exactly 0.0 as soon as any factor
    is 0.
    """
    if len(x) != len(x2):
        raise LengthMismatchError(f"sequence lengths differ: {len(x)} vs {len(x2)}")
    z = bm.z
    p = 1.0
    for a, b in zip(x, x2):
        p *= z[a, b]
        if p == 0.0:
            return 0.0
    return float(p)


def sequence_likelihood(ch: Channel, x: Sequence[int], y: Sequence[int]) -> float:
    """W^n(y|x) = prod_i W(y_i|x_i)."""
    if len(x) != len(y):
        raise LengthMismatchError(f"sequence lengths differ: {len(x)} vs {len(y)}")
    w = ch.matrix
    p = 1.0
    for a, b in zip(x, y):
        if not (0 <= a < ch.input_size and 0 <= b < ch.output_size):
            raise IndexError(f"symbol pair ({a}, {b}) out of range")
        p *= w[a, b]
    return float(p)
