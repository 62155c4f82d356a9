"""Sensing matrix constructions, l0 accounting and the SENSEMAT text format."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import Iterable

import numpy as np

from .bounds import exact_min_binary_cost
from .errors import DomainError, InfeasibleError, MatrixParseError
from .numkit import binomial

__all__ = [
    "SensingMatrix",
    "BisectionStep",
    "AdaptivePlan",
    "CostReport",
    "min_cost_binary",
    "grid_levels",
    "grid_capacity",
    "grid_packing",
    "bisection_plan",
    "baseline_matrix",
    "l0_cost",
    "cost_report",
    "serialize",
    "parse",
]

BINARY = "binary"
REAL = "real"
KINDS = (BINARY, REAL)

FORMAT_MAGIC = "SENSEMAT 1"


def _frozen(array, dtype):
    out = np.array(array, dtype=dtype)
    out.setflags(write=False)
    return out


class SensingMatrix:
    """Immutable sparse M x N matrix stored as coordinate triples.

    Entries are kept sorted by (column, row). Binary matrices hold only ones;
    no stored value is ever zero.
    """

    def __init__(self, rows: int, cols: int, kind: str, row_idx, col_idx, values):
        if kind not in KINDS:
            raise DomainError(f"kind must be one of {KINDS}, got {kind!r}")
        if rows < 1 or cols < 1:
            raise DomainError(f"matrix dimensions must be positive, got {rows}x{cols}")
        r = np.asarray(row_idx, dtype=np.int64).ravel()
        c = np.asarray(col_idx, dtype=np.int64).ravel()
        v = np.asarray(values, dtype=np.float64).ravel()
        if not (r.shape == c.shape == v.shape):
            raise DomainError("row, column and value arrays differ in length")
        if r.size:
            if r.min() < 0 or r.max() >= rows or c.min() < 0 or c.max() >= cols:
                raise DomainError("entry index out of range")
            if np.any(v == 0.0):
                raise DomainError("stored entries must be nonzero")
            if not np.all(np.isfinite(v)):
                raise DomainError("stored entries must be finite")
            if kind == BINARY and np.any(v != 1.0):
                raise DomainError("binary matrices may only store ones")
            order = np.lexsort((r, c))
            r, c, v = r[order], c[order], v[order]
            same = (r[1:] == r[:-1]) & (c[1:] == c[:-1])
            if np.any(same):
                raise DomainError("duplicate (row, col) entry")
        object.__setattr__(self, "rows", int(rows))
        object.__setattr__(self, "cols", int(cols))
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "row_idx", _frozen(r, np.int64))
        object.__setattr__(self, "col_idx", _frozen(c, np.int64))
        object.__setattr__(self, "values", _frozen(v, np.float64))

    def __setattr__(self, name, value):
        raise AttributeError("SensingMatrix is immutable")

    @classmethod
    def from_columns(cls, rows: int, kind: str, columns: Iterable) -> "SensingMatrix":
        """Build from an iterable of columns, each a sequence of (row, value)."""
        r, c, v = [], [], []
        cols = 0
        for j, column in enumerate(columns):
            cols = j + 1
            for i, value in column:
                r.append(i)
                c.append(j)
                v.append(value)
        return cls(rows, cols, kind, r, c, v)

    @classmethod
    def from_dense(cls, array, kind: str = REAL) -> "SensingMatrix":
        a = np.asarray(array, dtype=np.float64)
        if a.ndim != 2:
            raise DomainError("dense input must be two-dimensional")
        r, c = np.nonzero(a)
        return cls(a.shape[0], a.shape[1], kind, r, c, a[r, c])

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return int(self.values.size)

    def entries(self):
        """Yield ``(row, col, value)`` in (col, row) order."""
        for i, j, v in zip(self.row_idx.tolist(), self.col_idx.tolist(), self.values.tolist()):
            yield i, j, v

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape)
        out[self.row_idx, self.col_idx] = self.values
        return out

    def column(self, j: int) -> np.ndarray:
        if not 0 <= j < self.cols:
            raise DomainError(f"column index {j} out of range for {self.cols} columns")
        lo, hi = self._col_ptr[j], self._col_ptr[j + 1]
        out = np.zeros(self.rows)
        out[self.row_idx[lo:hi]] = self.values[lo:hi]
        return out

    @cached_property
    def _col_ptr(self):
        return np.searchsorted(self.col_idx, np.arange(self.cols + 1), side="left")

    @cached_property
    def column_weights(self) -> np.ndarray:
        return np.diff(self._col_ptr)

    @cached_property
    def columns_distinct_nonzero(self) -> bool:
        if np.any(self.column_weights == 0):
            return False
        ptr = self._col_ptr
        rows = self.row_idx.tolist()
        vals = self.values.tolist()
        seen = set()
        for j in range(self.cols):
            key = (tuple(rows[ptr[j]:ptr[j + 1]]), tuple(vals[ptr[j]:ptr[j + 1]]))
            if key in seen:
                return False
            seen.add(key)
        return True

    def __eq__(self, other):
        if not isinstance(other, SensingMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.kind == other.kind
            and np.array_equal(self.row_idx, other.row_idx)
            and np.array_equal(self.col_idx, other.col_idx)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def __repr__(self):
        return f"SensingMatrix({self.rows}x{self.cols}, kind={self.kind}, nnz={self.nnz})"


@dataclass(frozen=True)
class CostReport:
    l0_cost: int
    r0: int | None
    c_m: float | None
    per_weight_counts: tuple


def l0_cost(a: SensingMatrix) -> int:
    return a.nnz


def cost_report(a: SensingMatrix) -> CostReport:
    """l0 cost with the per-column-weight histogram.

    ``r0`` and ``c_m`` refer to the binary minimum-cost reference at the
    matrix's own (N, M); they are ``None`` when no binary matrix of that size
    has distinct nonzero columns.
    """
    counts = Counter(a.column_weights.tolist())
    hist = tuple(sorted(counts.items()))
    r0 = c_m = None
    if a.cols <= 2**a.rows - 1:
        ref = exact_min_binary_cost(a.cols, a.rows)
        r0, c_m = ref.r0, ref.c_m
    return CostReport(l0_cost(a), r0, c_m, hist)


def min_cost_binary(n: int, m: int) -> SensingMatrix:
    """Binary matrix whose columns are the n lightest distinct nonzero m-vectors.

    Weight classes are taken in ascending order; within a class the supports
    follow lexicographic order of their sorted row tuples.
    """
    if n < 1 or m < 1:
        raise DomainError(f"n and m must be positive, got n={n}, m={m}")
    if n > 2**m - 1:
        raise InfeasibleError(f"n exceeds 2^m - 1 = {2**m - 1}", capacity=2**m - 1)
    rows, cols = [], []
    j = 0
    for weight in range(1, m + 1):
        for support in combinations(range(m), weight):
            rows.extend(support)
            cols.extend([j] * weight)
            j += 1
            if j == n:
                return SensingMatrix(m, n, BINARY, rows, cols, np.ones(len(rows)))
    raise AssertionError("unreachable")


def grid_levels(tau: float, d: float, weight: int) -> int:
    """Largest k with k * d * sqrt(weight) <= tau."""
    k = math.floor(tau / (d * math.sqrt(weight)))
    # Guard floating rounding in either direction.
    while k > 0 and (k * d) ** 2 * weight > tau**2:
        k -= 1
    while ((k + 1) * d) ** 2 * weight <= tau**2:
        k += 1
    return k


def grid_capacity(m: int, tau: float, d: float):
    """Per-weight column counts of :func:`grid_packing`: ``[(weight, levels, count)]``."""
    out = []
    for weight in range(1, m + 1):
        k = grid_levels(tau, d, weight)
        out.append((weight, k, binomial(m, weight) * k**weight))
    return out


def grid_packing(n: int, m: int, tau: float, d: float) -> SensingMatrix:
    """Real matrix of n columns with norms <= tau and pairwise distances >= d.

    Columns of weight l put values from {d, 2d, ..., k d}, k = grid_levels,
    on each of l coordinates. Weights ascend; within a weight, supports and
    then coordinate tuples go in lexicographic order.
    """
    if not (tau > 0 and d > 0):
        raise DomainError(f"tau and d must be positive, got tau={tau}, d={d}")
    if n < 1 or m < 1:
        raise DomainError(f"n and m must be positive, got n={n}, m={m}")
    capacity = sum(count for _, _, count in grid_capacity(m, tau, d))
    if n > capacity:
        raise InfeasibleError(
            f"n={n} exceeds the grid packing capacity {capacity} "
            f"(m={m}, tau={tau}, d={d})",
            capacity=capacity,
        )
    rows, cols, vals = [], [], []
    j = 0
    for weight in range(1, m + 1):
        k = grid_levels(tau, d, weight)
        if k == 0:
            continue
        levels = [i * d for i in range(1, k + 1)]
        for support in combinations(range(m), weight):
            for coords in product(levels, repeat=weight):
                rows.extend(support)
                cols.extend([j] * weight)
                vals.extend(coords)
                j += 1
                if j == n:
                    return SensingMatrix(m, n, REAL, rows, cols, vals)
    raise AssertionError("unreachable")


def baseline_matrix(kind: str, n: int, m: int, seed: int = 0) -> SensingMatrix:
    """Identity (m must equal n) or dense seeded standard-normal baseline."""
    if n < 1 or m < 1:
        raise DomainError(f"n and m must be positive, got n={n}, m={m}")
    if kind == "identity":
        if m != n:
            raise DomainError(f"identity baseline needs m == n, got m={m}, n={n}")
        idx = np.arange(n)
        return SensingMatrix(n, n, BINARY, idx, idx, np.ones(n))
    if kind == "gaussian":
        rng = np.random.default_rng(_as_seed(seed))
        return SensingMatrix.from_dense(rng.standard_normal((m, n)), REAL)
    raise DomainError(f"unknown baseline kind {kind!r}")


def _as_seed(seed):
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


# Adaptive bisection


@dataclass(frozen=True)
class BisectionStep:
    """One measurement: the active block and the sensed part, both half-open."""

    block: tuple
    sensed: tuple

    @property
    def size(self) -> int:
        return self.sensed[1] - self.sensed[0]


def split_block(lo: int, hi: int):
    """Sensed half of block [lo, hi): the first ceil(b/2) indices."""
    return lo, lo + (hi - lo + 1) // 2


@dataclass(frozen=True)
class AdaptivePlan:
    """Deterministic bisection schedule over indices 0..n-1.

    ``steps`` lists the path that always lands in the sensed half. That half is
    the larger one, so this path is the longest and the most expensive.
    """

    n: int
    steps: tuple

    @property
    def step_count(self) -> int:
        return len(self.steps)

    @property
    def total_cost(self) -> int:
        return sum(step.size for step in self.steps)

    def path(self, support: int):
        """Steps taken by a noiseless run with the given support."""
        return _walk(self.n, support)

    def realized_matrix(self, support: int = 0) -> SensingMatrix:
        """Rows sensed along the noiseless path of ``support``, stacked as a matrix."""
        steps = self.path(support)
        rows, cols = [], []
        for t, step in enumerate(steps):
            span = range(*step.sensed)
            rows.extend([t] * len(span))
            cols.extend(span)
        return SensingMatrix(max(len(steps), 1), self.n, BINARY, rows, cols, np.ones(len(rows)))


def _walk(n, support):
    if not 0 <= support < n:
        raise DomainError(f"support {support} out of range for n={n}")
    lo, hi = 0, n
    out = []
    while hi - lo > 1:
        s_lo, s_hi = split_block(lo, hi)
        out.append(BisectionStep((lo, hi), (s_lo, s_hi)))
        if support < s_hi:
            hi = s_hi
        else:
            lo = s_hi
    return out


def bisection_plan(n: int) -> AdaptivePlan:
    if n < 2:
        raise DomainError(f"bisection needs n >= 2, got {n}")
    return AdaptivePlan(n, tuple(_walk(n, 0)))


# SENSEMAT text format


def _render_value(kind, value):
    return "1" if kind == BINARY else repr(float(value))


def serialize(a: SensingMatrix) -> bytes:
    lines = [
        FORMAT_MAGIC,
        f"kind {a.kind}",
        f"rows {a.rows}",
        f"cols {a.cols}",
        f"nnz {a.nnz}",
    ]
    lines.extend(f"{i} {j} {_render_value(a.kind, v)}" for i, j, v in a.entries())
    return ("\n".join(lines) + "\n").encode("utf-8")


def _header_int(line, key, lineno, minimum):
    parts = line.split(" ")
    if len(parts) != 2 or parts[0] != key:
        raise MatrixParseError(f"expected '{key} <int>', got {line!r}", lineno)
    try:
        value = int(parts[1])
    except ValueError:
        raise MatrixParseError(f"invalid integer {parts[1]!r}", lineno) from None
    if value < minimum or not parts[1].isdigit():
        raise MatrixParseError(f"{key} must be an integer >= {minimum}", lineno)
    return value


def parse(data: bytes | str) -> SensingMatrix:
    """Inverse of :func:`serialize`; raises MatrixParseError naming the line."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MatrixParseError(f"not UTF-8: {exc}") from None
    if not data.endswith("\n"):
        raise MatrixParseError("missing final line feed")
    lines = data[:-1].split("\n")
    if len(lines) < 5:
        raise MatrixParseError("truncated header", len(lines) + 1)
    if lines[0] != FORMAT_MAGIC:
        raise MatrixParseError(f"expected {FORMAT_MAGIC!r}, got {lines[0]!r}", 1)
    if lines[1] not in ("kind binary", "kind real"):
        raise MatrixParseError(f"expected 'kind binary' or 'kind real', got {lines[1]!r}", 2)
    kind = lines[1].split(" ")[1]
    rows = _header_int(lines[2], "rows", 3, 1)
    cols = _header_int(lines[3], "cols", 4, 1)
    nnz = _header_int(lines[4], "nnz", 5, 0)
    body = lines[5:]
    if len(body) != nnz:
        raise MatrixParseError(f"nnz declares {nnz} entries, found {len(body)}", 5)

    r = np.empty(nnz, dtype=np.int64)
    c = np.empty(nnz, dtype=np.int64)
    v = np.empty(nnz, dtype=np.float64)
    prev = None
    for k, line in enumerate(body):
        lineno = k + 6
        parts = line.split(" ")
        if len(parts) != 3:
            raise MatrixParseError(f"expected '<row> <col> <value>', got {line!r}", lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise MatrixParseError(f"invalid index in {line!r}", lineno) from None
        if not (parts[0].isdigit() and parts[1].isdigit()):
            raise MatrixParseError(f"invalid index in {line!r}", lineno)
        if not (0 <= i < rows and 0 <= j < cols):
            raise MatrixParseError(f"index out of range: ({i}, {j})", lineno)
        if kind == BINARY:
            if parts[2] != "1":
                if _is_zero(parts[2]):
                    raise MatrixParseError("zero value", lineno)
                raise MatrixParseError(f"binary value must be '1', got {parts[2]!r}", lineno)
            value = 1.0
        else:
            try:
                value = float(parts[2])
            except ValueError:
                raise MatrixParseError(f"invalid value {parts[2]!r}", lineno) from None
            if value == 0.0:
                raise MatrixParseError("zero value", lineno)
            if not math.isfinite(value):
                raise MatrixParseError(f"non-finite value {parts[2]!r}", lineno)
        key = (j, i)
        if prev is not None:
            if key == prev:
                raise MatrixParseError(f"duplicate entry ({i}, {j})", lineno)
            if key < prev:
                raise MatrixParseError("entries not sorted by (col, row)", lineno)
        prev = key
        r[k], c[k], v[k] = i, j, value
    return SensingMatrix(rows, cols, kind, r, c, v)


def _is_zero(text):
    try:
        return float(text) == 0.0
    except ValueError:
        return False
