"""Exact linear algebra: GF(2) elimination, Bareiss determinants, Smith normal form.

Integer matrices are plain lists of row lists of Python ints, so entries
never overflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .graph import Graph

IntMatrix = list[list[int]]


class AlgebraError(ValueError):
    pass


def _square(a: Sequence[Sequence[int]]) -> int:
    n = len(a)
    if any(len(row) != n for row in a):
        raise AlgebraError("matrix is not square")
    return n


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> IntMatrix:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def adjacency_matrix(g: Graph) -> IntMatrix:
    return [[(g.adj[i] >> j) & 1 for j in range(g.order)] for i in range(g.order)]


def circulant_matrix(first_row: Sequence[int]) -> IntMatrix:
    """``circ_m(a_0, ..., a_{m-1})``: each row is the previous one shifted right."""
    m = len(first_row)
    return [[int(first_row[(j - i) % m]) for j in range(m)] for i in range(m)]


# -- GF(2) -------------------------------------------------------------------


@dataclass(frozen=True)
class Gf2Matrix:
    """Bit matrix with each row packed into an int (bit ``j`` = column ``j``)."""

    rows: int
    cols: int
    data: tuple[int, ...]

    @classmethod
    def from_int_matrix(cls, a: Sequence[Sequence[int]]) -> "Gf2Matrix":
        cols = len(a[0]) if a else 0
        packed = tuple(sum((int(x) & 1) << j for j, x in enumerate(row)) for row in a)
        return cls(len(a), cols, packed)

    @classmethod
    def from_graph(cls, g: Graph) -> "Gf2Matrix":
        return cls(g.order, g.order, g.adj)


def gf2_rank(a: Gf2Matrix | Sequence[Sequence[int]]) -> int:
    if not isinstance(a, Gf2Matrix):
        a = Gf2Matrix.from_int_matrix(a)
    work = list(a.data)
    rank = 0
    for col in range(a.cols):
        bit = 1 << col
        pivot = next((r for r in range(rank, len(work)) if work[r] & bit), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for r in range(rank + 1, len(work)):
            if work[r] & bit:
                work[r] ^= work[rank]
        rank += 1
        if rank == len(work):
            break
    return rank


def gf2_determinant(a: Gf2Matrix | Sequence[Sequence[int]]) -> int:
    if not isinstance(a, Gf2Matrix):
        a = Gf2Matrix.from_int_matrix(a)
    if a.rows != a.cols:
        raise AlgebraError(f"determinant of non-square {a.rows}x{a.cols} matrix")
    return int(gf2_rank(a) == a.rows)


def necessary_condition_open(g: Graph) -> str:
    """``'fail'`` rules out any open XOR-magic labeling; ``'pass'`` is inconclusive."""
    return "fail" if gf2_determinant(Gf2Matrix.from_graph(g)) else "pass"


# -- integer determinant -----------------------------------------------------


def int_determinant(a: Sequence[Sequence[int]]) -> int:
    """Fraction-free Bareiss elimination; exact for any integer matrix."""
    n = _square(a)
    if n == 0:
        return 1
    m = [list(map(int, row)) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pkk = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            row_i, row_k = m[i], m[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pkk - mik * row_k[j]) // prev
            row_i[k] = 0
        prev = pkk
    return sign * m[n - 1][n - 1]


# -- Smith normal form -------------------------------------------------------


@dataclass(frozen=True)
class SnfDecomposition:
    """``L @ M @ R == S`` with ``L``, ``R`` unimodular and ``S`` diagonal."""

    L: IntMatrix
    S: IntMatrix
    R: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return [self.S[i][i] for i in range(len(self.S))]

    @property
    def abs_det(self) -> int:
        out = 1
        for d in self.diagonal:
            out *= d
        return out

    def check(self, source: Sequence[Sequence[int]]) -> None:
        """Assert every defining property; raises ``AssertionError`` on failure."""
        n = len(self.S)
        diag = self.diagonal
        assert all(self.S[i][j] == 0 for i in range(n) for j in range(n) if i != j), "S not diagonal"
        assert all(d >= 0 for d in diag), "negative invariant factor"
        for a, b in zip(diag, diag[1:]):
            assert (b == 0) if a == 0 else (b % a == 0), f"{a} does not divide {b}"
        assert abs(int_determinant(self.L)) == 1, "L not unimodular"
        assert abs(int_determinant(self.R)) == 1, "R not unimodular"
        assert matmul(matmul(self.L, source), self.R) == self.S, "L M R != S"
        assert self.abs_det == abs(int_determinant(source)), "|det| not preserved"


def smith_normal_form(a: Sequence[Sequence[int]]) -> SnfDecomposition:
    """Smith decomposition by repeated pivot-to-corner reduction.

    The pivot is the nonzero entry of least absolute value in the trailing
    submatrix (ties: lowest row, then lowest column). Row operations are
    mirrored into ``L`` and column operations into ``R``.
    """
    n = _square(a)
    m = [list(map(int, row)) for row in a]
    L = identity(n)
    R = identity(n)

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        L[i], L[j] = L[j], L[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in R:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row[dst] += q * row[src]
        m[dst] = [x + q * y for x, y in zip(m[dst], m[src])]
        L[dst] = [x + q * y for x, y in zip(L[dst], L[src])]

    def add_col(dst, src, q):
        for row in m:
            row[dst] += q * row[src]
        for row in R:
            row[dst] += q * row[src]

    for t in range(n):
        best = None
        for i in range(t, n):
            for j in range(t, n):
                v = abs(m[i][j])
                if v and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        _, pi, pj = best
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            p = m[t][t]
            for i in range(t + 1, n):
                if m[i][t]:
                    add_row(i, t, -(m[i][t] // p))
            for j in range(t + 1, n):
                if m[t][j]:
                    add_col(j, t, -(m[t][j] // p))
            # leftover remainders are smaller than the pivot: promote the least
            rest = [(abs(m[i][t]), i, t) for i in range(t + 1, n) if m[i][t]]
            rest += [(abs(m[t][j]), t, j) for j in range(t + 1, n) if m[t][j]]
            if rest:
                _, pi, pj = min(rest)
                swap_rows(t, pi)
                swap_cols(t, pj)
                continue
            # pivot must divide the whole trailing block
            bad = next((i for i in range(t + 1, n) for j in range(t + 1, n) if m[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            L[t] = [-x for x in L[t]]
    return SnfDecomposition(L, m, R)


def snf_diagonal(a: Sequence[Sequence[int]]) -> list[int]:
    return smith_normal_form(a).diagonal


def snf_predicts_non_magic(g: Graph) -> str:
    """``'not_open_magic'`` when the SNF determinant is odd, else ``'inconclusive'``."""
    return "not_open_magic" if smith_normal_form(adjacency_matrix(g)).abs_det % 2 else "inconclusive"


def algebra_report(g: Graph) -> dict:
    a = adjacency_matrix(g)
    snf = smith_normal_form(a)
    det = int_determinant(a)
    return {
        "order": g.order,
        "det": det,
        "abs_det": abs(det),
        "det_mod_2": abs(det) % 2,
        "gf2_rank": gf2_rank(Gf2Matrix.from_graph(g)),
        "snf_diagonal": snf.diagonal,
        "necessary_condition_open": necessary_condition_open(g),
        "snf_verdict": "not_open_magic" if snf.abs_det % 2 else "inconclusive",
    }
