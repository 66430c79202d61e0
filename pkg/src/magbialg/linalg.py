"""Exact Gaussian elimination over the rationals, dense or sparse input.

Rows are reduced into a row-reduced echelon form kept as sparse dicts.  The
RREF of a matrix is unique, so the kernel basis returned here (one vector per
free column, 1 in that column) does not depend on the order rows arrive in.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

SparseRow = Mapping[int, Fraction]


class RowReducer:
    """Incrementally maintained sparse RREF."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, dict[int, Fraction]] = {}
        # column -> pivot columns whose row has a nonzero entry there
        self._uses: dict[int, set[int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: SparseRow) -> dict[int, Fraction]:
        r = {c: Fraction(v) for c, v in row.items() if v}
        for p in [c for c in r if c in self.pivots]:
            f = r.get(p)
            if not f:
                continue
            for c, v in self.pivots[p].items():
                nv = r.get(c, 0) - f * v
                if nv:
                    r[c] = nv
                else:
                    r.pop(c, None)
        return r

    def add(self, row: SparseRow) -> bool:
        """Insert a row; returns True if it increased the rank."""
        r = self.reduce(row)
        if not r:
            return False
        p = min(r)
        inv = 1 / r[p]
        r = {c: v * inv for c, v in r.items()}
        for q in list(self._uses.get(p, ())):
            prow = self.pivots[q]
            f = prow[p]
            for c, v in r.items():
                nv = prow.get(c, 0) - f * v
                if nv:
                    if c not in prow:
                        self._uses.setdefault(c, set()).add(q)
                    prow[c] = nv
                else:
                    prow.pop(c, None)
                    self._uses.get(c, set()).discard(q)
        self._uses.pop(p, None)
        self.pivots[p] = r
        for c in r:
            if c != p:
                self._uses.setdefault(c, set()).add(p)
        return True

    def kernel(self) -> list[dict[int, Fraction]]:
        basis = []
        for f in range(self.ncols):
            if f in self.pivots:
                continue
            vec = {f: Fraction(1)}
            for q in self._uses.get(f, ()):
                vec[q] = -self.pivots[q][f]
            basis.append(dict(sorted(vec.items())))
        return basis

    def rref(self) -> list[dict[int, Fraction]]:
        return [dict(sorted(self.pivots[p].items())) for p in sorted(self.pivots)]


def sparse_kernel(rows: Iterable[SparseRow], ncols: int) -> list[dict[int, Fraction]]:
    red = RowReducer(ncols)
    for row in rows:
        red.add(row)
    return red.kernel()


def sparse_rank(rows: Iterable[SparseRow], ncols: int | None = None) -> int:
    red = RowReducer(ncols or 0)
    for row in rows:
        red.add(row)
    return red.rank


def kernel(matrix: Sequence[Sequence]) -> list[list[Fraction]]:
    """Kernel basis of a dense matrix, as dense vectors."""
    if not matrix:
        return []
    ncols = len(matrix[0])
    rows = [{j: Fraction(v) for j, v in enumerate(row) if v} for row in matrix]
    out = []
    for vec in sparse_kernel(rows, ncols):
        dense = [Fraction(0)] * ncols
        for j, v in vec.items():
            dense[j] = v
        out.append(dense)
    return out


def kernel_of_columns(ncols: int, columns: Sequence[SparseRow]) -> list[dict[int, Fraction]]:
    """Kernel of the matrix given column-wise (column j is ``columns[j]``, row -> value)."""
    rows: dict = {}
    for j, col in enumerate(columns):
        for i, v in col.items():
            if v:
                rows.setdefault(i, {})[j] = v
    return sparse_kernel(rows.values(), ncols)


def rank(matrix: Sequence[Sequence]) -> int:
    return sparse_rank({j: Fraction(v) for j, v in enumerate(row) if v} for row in matrix)


def same_span(a: Sequence[SparseRow], b: Sequence[SparseRow]) -> bool:
    """Whether two lists of sparse vectors span the same subspace."""
    ra, rb = sparse_rank(a), sparse_rank(b)
    return ra == rb == sparse_rank(list(a) + list(b))
