"""Exact integer linear algebra: Smith normal form, finitely generated
abelian groups, divisibility, and bounded box enumeration.

Everything here is arbitrary-precision integer arithmetic; no floats.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from typing import Iterator, Sequence

DEFAULT_ENUM_BUDGET = 10**7
ENUM_BUDGET_ENV = "SINGFIB_ENUM_BUDGET"


class InputError(ValueError):
    """Malformed or inconsistent user input."""


class BudgetExceededError(RuntimeError):
    """An enumeration would exceed the configured budget."""


def enum_budget() -> int:
    raw = os.environ.get(ENUM_BUDGET_ENV)
    if raw is None:
        return DEFAULT_ENUM_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{ENUM_BUDGET_ENV} must be an integer, got {raw!r}")


@dataclass(frozen=True)
class IntegerMatrix:
    """Immutable integer matrix; entries stored row-major as nested tuples."""

    entries: tuple[tuple[int, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntegerMatrix":
        rows = [tuple(int(x) for x in r) for r in rows]
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise InputError("ragged rows in integer matrix")
            if cols is not None and cols != width:
                raise InputError(f"expected {cols} columns, got {width}")
        elif cols is None:
            cols = 0
        if not rows and cols:
            # an empty (0 x cols) matrix still remembers its width
            return cls(entries=((),) * 0)._with_cols(cols)
        return cls(entries=tuple(rows))

    def _with_cols(self, cols: int) -> "IntegerMatrix":
        object.__setattr__(self, "_empty_cols", cols)
        return self

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        if self.entries:
            return len(self.entries[0])
        return getattr(self, "_empty_cols", 0)

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def transpose(self) -> "IntegerMatrix":
        if not self.entries:
            return IntegerMatrix.from_rows([[] for _ in range(self.cols)], cols=0) \
                if self.cols else self
        return IntegerMatrix(tuple(zip(*self.entries)))


def _as_matrix(m) -> IntegerMatrix:
    if isinstance(m, IntegerMatrix):
        return m
    return IntegerMatrix.from_rows(m)


@dataclass(frozen=True)
class AbelianGroup:
    """Finitely generated abelian group in invariant-factor form.

    torsion is the ordered list d_1 | d_2 | ... | d_k with every d_i >= 2.
    """

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise InputError("free rank must be nonnegative")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise InputError(f"torsion factors must divide in order: {self.torsion}")
        if any(d < 2 for d in self.torsion):
            raise InputError("torsion factors must be >= 2")

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def num_generators(self) -> int:
        return self.free_rank + len(self.torsion)

    def describe(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def smith_normal_form(m) -> tuple[tuple[int, ...], int]:
    """Invariant factors d_1 | d_2 | ... of m and the free rank of coker(m).

    Classical pivoting with gcd reduction; entries stay exact Python ints.
    """
    mat = _as_matrix(m)
    a = mat.to_lists()
    nrows, ncols = mat.rows, mat.cols
    factors: list[int] = []
    top = 0
    while top < min(nrows, ncols):
        # locate a nonzero pivot of minimal absolute value
        pivot = None
        for i in range(top, nrows):
            for j in range(top, ncols):
                if a[i][j] and (pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        pi, pj = pivot
        a[top], a[pi] = a[pi], a[top]
        for row in a:
            row[top], row[pj] = row[pj], row[top]
        # clear the pivot row and column; restart if a smaller entry appears
        while True:
            p = a[top][top]
            dirty = False
            for i in range(top + 1, nrows):
                q = a[i][top] // p
                if q:
                    for j in range(top, ncols):
                        a[i][j] -= q * a[top][j]
                if a[i][top]:
                    a[top], a[i] = a[i], a[top]
                    dirty = True
                    break
            if dirty:
                continue
            for j in range(top + 1, ncols):
                q = a[top][j] // p
                if q:
                    for i in range(top, nrows):
                        a[i][j] -= q * a[i][top]
                if a[top][j]:
                    for i in range(nrows):
                        a[i][top], a[i][j] = a[i][j], a[i][top]
                    dirty = True
                    break
            if dirty:
                continue
            # pivot must divide the remaining block for true SNF
            bad = None
            for i in range(top + 1, nrows):
                for j in range(top + 1, ncols):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            for j in range(top, ncols):
                a[top][j] += a[bad][j]
        factors.append(abs(a[top][top]))
        top += 1
    # drop trailing zeros (rank deficiency) and normalize divisibility
    factors = [d for d in factors if d]
    factors.sort()
    free_rank = ncols - len(factors)
    return tuple(factors), free_rank


def cokernel(m) -> AbelianGroup:
    """Z^cols modulo the row span of m, in invariant-factor form."""
    factors, free_rank = smith_normal_form(m)
    return AbelianGroup(free_rank=free_rank, torsion=tuple(d for d in factors if d > 1))


def divisibility(v: Sequence[int], ambient: AbelianGroup) -> int:
    """Largest k with the free part of v equal to k times an integral class.

    Torsion coordinates are ignored; returns 0 when the free part vanishes.
    """
    v = [int(x) for x in v]
    if len(v) != ambient.num_generators:
        raise InputError(
            f"class has {len(v)} coordinates; ambient group has "
            f"{ambient.num_generators} generators"
        )
    free_part = v[: ambient.free_rank]
    return math.gcd(*free_part) if free_part else 0


def enumerate_box(dim: int, bound: int, budget: int | None = None) -> Iterator[tuple[int, ...]]:
    """Yield every integer vector with coordinates in [-bound, bound]."""
    if dim < 0:
        raise InputError("dimension must be nonnegative")
    if bound < 0:
        raise InputError("bound must be nonnegative")
    check_enum_budget((2 * bound + 1) ** dim, budget)
    return itertools.product(range(-bound, bound + 1), repeat=dim)


def check_enum_budget(count: int, budget: int | None = None) -> None:
    limit = enum_budget() if budget is None else budget
    if count > limit:
        raise BudgetExceededError(
            f"enumeration of {count} vectors exceeds budget {limit} "
            f"(override with {ENUM_BUDGET_ENV})"
        )


def determinant(m) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    mat = _as_matrix(m)
    if mat.rows != mat.cols:
        raise InputError("determinant requires a square matrix")
    n = mat.rows
    if n == 0:
        return 1
    a = mat.to_lists()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]
