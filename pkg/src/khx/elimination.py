"""Sparse exact integer elimination.

Two engines back the homology computations:

* `snf_diagonal`: diagonalizes an integer matrix by unimodular row/column
  operations.  Pivoting prefers +-1 entries with the least fill (so the bulk
  of a Khovanov differential is eliminated without coefficient growth) and
  falls back to smallest-entry gcd pivoting; arbitrary-precision integers
  throughout.  The diagonal multiset determines the cokernel, so invariant
  factors are recovered afterwards by gcd/lcm merging.

* `online_rank_profile`: a row-at-a-time echelon pass over a fixed column
  order.  Processing rows in a fixed order yields pivot positions whose
  counts give the rank of every (row-prefix x column-prefix) submatrix,
  which is exactly the data a filtered complex needs.
"""

from __future__ import annotations

import heapq
from math import gcd


class SparseElim:
    """Mutable sparse integer matrix supporting unimodular elimination."""

    def __init__(self, n_rows: int, n_cols: int,
                 triplets: list[tuple[int, int, int]]):
        self.rows: dict[int, dict[int, int]] = {}
        self.col_rows: dict[int, set[int]] = {}
        for r, c, v in triplets:
            if v == 0:
                continue
            row = self.rows.setdefault(r, {})
            w = row.get(c, 0) + v
            if w:
                row[c] = w
                self.col_rows.setdefault(c, set()).add(r)
            else:
                del row[c]
                self.col_rows[c].discard(r)
        for r in [r for r, row in self.rows.items() if not row]:
            del self.rows[r]
        self.diagonal: list[int] = []

    # -- entry bookkeeping --------------------------------------------------

    def _set(self, r: int, c: int, v: int) -> None:
        row = self.rows.setdefault(r, {})
        if v:
            row[c] = v
            self.col_rows.setdefault(c, set()).add(r)
        else:
            if c in row:
                del row[c]
                self.col_rows[c].discard(r)
            if not row:
                del self.rows[r]

    def _drop_pivot(self, r: int, c: int) -> None:
        for cc in self.rows.pop(r, {}):
            self.col_rows[cc].discard(r)
        self.col_rows.pop(c, None)

    # -- elimination --------------------------------------------------------

    def _row_axpy(self, r_dst: int, r_src: int, f: int) -> None:
        """row[r_dst] -= f * row[r_src]"""
        src = self.rows.get(r_src, {})
        dst = self.rows.setdefault(r_dst, {})
        for c, v in src.items():
            w = dst.get(c, 0) - f * v
            if w:
                dst[c] = w
                self.col_rows.setdefault(c, set()).add(r_dst)
            elif c in dst:
                del dst[c]
                self.col_rows[c].discard(r_dst)
        if not dst:
            del self.rows[r_dst]

    def _row_gcd_transform(self, r: int, r2: int, c: int) -> None:
        """Unimodular 2-row transform leaving gcd at (r, c), zero at (r2, c)."""
        a = self.rows[r][c]
        b = self.rows[r2][c]
        g, s, t = _xgcd(a, b)
        u, v = -(b // g), a // g
        row1 = dict(self.rows.get(r, {}))
        row2 = dict(self.rows.get(r2, {}))
        for cc in set(row1) | set(row2):
            x, y = row1.get(cc, 0), row2.get(cc, 0)
            self._set(r, cc, s * x + t * y)
            self._set(r2, cc, u * x + v * y)

    def _col_values(self, c: int) -> dict[int, int]:
        return {r: self.rows[r][c] for r in self.col_rows.get(c, set())}

    def _col_axpy(self, c_dst: int, c_src: int, f: int) -> None:
        """col[c_dst] -= f * col[c_src]"""
        for r in list(self.col_rows.get(c_src, set())):
            v = self.rows[r][c_src]
            self._set(r, c_dst, self.rows.get(r, {}).get(c_dst, 0) - f * v)

    def _col_gcd_transform(self, c: int, c2: int) -> None:
        rset = self.col_rows.get(c, set()) | self.col_rows.get(c2, set())
        pivot_rows = sorted(rset)
        a = None
        # use the row that currently holds the pivot entry of column c
        # (callers arrange that col c has a unique designated pivot row)
        vals = [(r, self.rows[r].get(c, 0), self.rows[r].get(c2, 0)) for r in pivot_rows]
        # gcd transform on the pair of columns using their entries in the
        # first row where col c is nonzero
        for r, x, y in vals:
            if x:
                a, b, rr = x, y, r
                break
        g, s, t = _xgcd(a, b)
        u, v = -(b // g), a // g
        for r, x, y in vals:
            self._set(r, c, s * x + t * y)
            self._set(r, c2, u * x + v * y)

    def _eliminate_unit(self, r: int, c: int) -> None:
        v = self.rows[r][c]
        for r2 in list(self.col_rows.get(c, set())):
            if r2 == r:
                continue
            self._row_axpy(r2, r, self.rows[r2][c] * v)  # f = entry / v, v in {+-1}
        self.diagonal.append(1)
        self._drop_pivot(r, c)

    def _eliminate_general(self, r: int, c: int) -> None:
        while True:
            # clear column c by row operations
            changed = True
            while changed:
                changed = False
                v = self.rows[r][c]
                for r2 in sorted(self.col_rows.get(c, set())):
                    if r2 == r:
                        continue
                    u = self.rows[r2][c]
                    if u % v == 0:
                        self._row_axpy(r2, r, u // v)
                    else:
                        self._row_gcd_transform(r, r2, c)
                        changed = True
                        break
            # clear row r by column operations
            v = self.rows[r][c]
            row_cols = sorted(cc for cc in self.rows[r] if cc != c)
            dirty = False
            for cc in row_cols:
                u = self.rows[r].get(cc, 0)
                if not u:
                    continue
                if u % v == 0:
                    self._col_axpy(cc, c, u // v)
                else:
                    self._col_gcd_transform(c, cc)
                    dirty = True
                    break
            if dirty:
                continue
            if all(r2 == r for r2 in self.col_rows.get(c, set())):
                break
        self.diagonal.append(abs(self.rows[r][c]))
        self._drop_pivot(r, c)

    def run(self) -> list[int]:
        """Diagonalize; returns the (unsorted) diagonal values."""
        # phase 1: +-1 pivots, least (row-1)(col-1) fill first
        heap: list[tuple[int, int, int]] = []

        def score(r, c):
            return (len(self.rows[r]) - 1) * (len(self.col_rows[c]) - 1)

        for r, row in self.rows.items():
            for c, v in row.items():
                if v in (1, -1):
                    heap.append((score(r, c), r, c))
        heapq.heapify(heap)
        while heap:
            s, r, c = heapq.heappop(heap)
            v = self.rows.get(r, {}).get(c, 0)
            if v not in (1, -1):
                continue
            pivot_row = list(self.rows[r].items())
            touched = [r2 for r2 in self.col_rows.get(c, set()) if r2 != r]
            self._eliminate_unit(r, c)
            for r2 in touched:
                row2 = self.rows.get(r2)
                if not row2:
                    continue
                for cc, _ in pivot_row:
                    w = row2.get(cc, 0)
                    if w in (1, -1):
                        heapq.heappush(heap, (score(r2, cc), r2, cc))
        # phase 2: smallest-entry gcd pivoting on whatever remains
        while self.rows:
            best = None
            for r in sorted(self.rows):
                for c, v in sorted(self.rows[r].items()):
                    key = (abs(v), r, c)
                    if best is None or key < best:
                        best = key
            _, r, c = best
            if self.rows[r][c] in (1, -1):
                self._eliminate_unit(r, c)
            else:
                self._eliminate_general(r, c)
        return self.diagonal


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """g, s, t with s*a + t*b = g = gcd(a, b), g > 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def snf_diagonal(triplets: list[tuple[int, int, int]],
                 n_rows: int, n_cols: int) -> list[int]:
    """Diagonal values (positive, unsorted) of a Smith diagonalization."""
    return SparseElim(n_rows, n_cols, triplets).run()


def divisor_chain(diagonal: list[int]) -> tuple[int, ...]:
    """Merge positive diagonal values into the invariant-factor chain
    d1 | d2 | ... via gcd/lcm exchanges.  Units pass straight through."""
    ones = sum(1 for d in diagonal if abs(d) == 1)
    vals = [abs(d) for d in diagonal if d and abs(d) != 1]
    changed = True
    while changed:
        changed = False
        vals.sort()
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                a, b = vals[i], vals[j]
                if b % a:
                    g = gcd(a, b)
                    vals[i], vals[j] = g, a * b // g
                    changed = True
        if vals and vals[0] == 1:
            keep = [v for v in vals if v != 1]
            ones += len(vals) - len(keep)
            vals = keep
    return (1,) * ones + tuple(sorted(vals))


# ---------------------------------------------------------------------------
# Online echelon with rank profile
# ---------------------------------------------------------------------------

def online_rank_profile(rows) -> list[tuple[int, int]]:
    """Row-at-a-time echelon pass.

    `rows` yields (row_key, row_dict) in a fixed processing order, where
    row_dict maps column index -> integer coefficient.  Returns one
    (row_key, leading_column) pair per pivot.  Because rows are reduced in
    order against earlier pivots and keep their leftmost surviving column,
    the rank of the submatrix on any prefix of rows and prefix of columns
    equals the number of pivots inside that corner.
    """
    pivots: dict[int, tuple[int, list[tuple[int, int]]]] = {}
    table: list[tuple[int, int]] = []
    pivots_get = pivots.get
    for key, row in rows:
        r = {c: v for c, v in row.items() if v}
        while r:
            c = min(r)
            hit = pivots_get(c)
            if hit is None:
                g = 0
                for v in r.values():
                    g = gcd(g, v)
                if g > 1:
                    r = {c2: v // g for c2, v in r.items()}
                if r[c] < 0:
                    r = {c2: -v for c2, v in r.items()}
                pivots[c] = (r[c], sorted(r.items()))
                table.append((key, c))
                break
            pv, items = hit
            rv = r[c]
            if pv == 1:
                fp, fr = rv, 1
            else:
                g = gcd(pv, rv)
                fp, fr = rv // g, pv // g
            rget = r.get
            if fr == 1:
                for c2, v in items:
                    w = rget(c2, 0) - fp * v
                    if w:
                        r[c2] = w
                    else:
                        del r[c2]
            else:
                new = {c2: fr * v for c2, v in r.items()}
                nget = new.get
                for c2, v in items:
                    w = nget(c2, 0) - fp * v
                    if w:
                        new[c2] = w
                    else:
                        del new[c2]
                g = 0
                for v in new.values():
                    g = gcd(g, v)
                r = {c2: v // g for c2, v in new.items()} if g > 1 else new
    return table
