"""Lee homology over Q, filtration survivors, spectral pages, and the
s-invariant.

The Lee differential respects the filtration F^p = span{q(x) >= p}, so with
columns ordered by descending q and rows by ascending q, every quantity of
interest is a rank of a (column-prefix x row-prefix) submatrix.  One online
echelon pass per homological degree records pivot positions (row q, col q);
counting pivots in a box then gives:

* rank d_i restricted to F^p            (columns with q >= p),
* rank of d_{i-1} followed by projection to q < p   (rows with q < p),
* the Z_r^{p} = {x in F^p : dx in F^{p+r}} dimensions behind the pages.

Survivor multiplicity at filtration level p is the drop of
dim im(H(F^p C) -> H(C)) between consecutive levels; for a knot exactly two
classes survive, their q-gradings differ by 2, and the s-invariant is their
average.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .complex import LEE, GradedChainComplex, build_complex
from .cube import DEFAULT_CUBE_LIMIT
from .diagram import PlanarDiagram
from .elimination import online_rank_profile, snf_diagonal


@dataclass(frozen=True)
class SInvariantResult:
    s: int
    survivor_gradings: tuple[int, int]  # (s-1, s+1)
    degree: int  # homological degree of the surviving classes

    def to_json_obj(self) -> dict:
        return {"s": self.s,
                "survivors": [{"q": q, "i": self.degree} for q in self.survivor_gradings]}


@dataclass(frozen=True)
class SpectralData:
    """E_infinity survivors per homological degree, with optional page
    history: pages[r][(i, p)] = dim E_r^{i, p}."""

    survivors: dict  # i -> tuple of (q, multiplicity)
    pages: dict | None = None
    stabilized_at: int | None = None

    def survivor_cells(self) -> list[tuple[int, int, int]]:
        return [(i, q, m) for i, qs in sorted(self.survivors.items()) for q, m in qs]

    def total_rank(self) -> int:
        return sum(m for _, _, m in self.survivor_cells())


class LeeAnalysis:
    """Rank data of the Lee differential of one diagram.

    Plain ranks (one per homological degree, enough for Lee homology ranks)
    run through the pivoting sparse eliminator.  The order-constrained pivot
    profiles that feed the filtration and page formulas cost much more, so
    they are computed lazily per degree; for a knot only the degrees around
    the surviving homology ever need one.
    """

    def __init__(self, d: PlanarDiagram, limit: int = DEFAULT_CUBE_LIMIT):
        self.diagram = d
        self.complex: GradedChainComplex = build_complex(d, LEE, normalized=True, limit=limit)
        c = self.complex
        self._hist: dict[int, dict[int, int]] = {}
        self._ranks: dict[int, int] = {}
        self._profiles: dict[int, list[tuple[int, int]]] = {}
        for i in c.degrees():
            hist: dict[int, int] = {}
            for q in c.gen_q(i):
                hist[q] = hist.get(q, 0) + 1
            self._hist[i] = hist
        for i in c.degrees():
            if c.dim(i) == 0 or c.dim(i + 1) == 0:
                self._ranks[i] = 0
                continue
            triplets = [(tgt, col, v)
                        for col, items in c.iter_columns(i) for tgt, v in items]
            diag = snf_diagonal(triplets, c.dim(i + 1), c.dim(i))
            self._ranks[i] = len(diag)

    def _pivots(self, i: int) -> list[tuple[int, int]]:
        hit = self._profiles.get(i)
        if hit is None:
            c = self.complex
            if c.dim(i) == 0 or c.dim(i + 1) == 0:
                hit = []
            else:
                hit = self._profile(i)
                if len(hit) != self._ranks[i]:
                    raise RuntimeError("rank disagreement between eliminators")
            self._profiles[i] = hit
        return hit

    def _profile(self, i: int) -> list[tuple[int, int]]:
        c = self.complex
        src_q = c.gen_q(i)
        tgt_q = c.gen_q(i + 1)
        col_order = sorted(range(len(src_q)), key=lambda k: (-src_q[k], k))
        col_rank = [0] * len(src_q)
        for pos, k in enumerate(col_order):
            col_rank[k] = pos
        col_q = [src_q[k] for k in col_order]
        rows: dict[int, dict[int, int]] = {}
        rows_get = rows.get
        for col, items in c.iter_columns(i):
            cr = col_rank[col]
            for tgt, v in items:
                row = rows_get(tgt)
                if row is None:
                    rows[tgt] = {cr: v}
                else:
                    row[cr] = row.get(cr, 0) + v
        order = sorted(rows, key=lambda t: (tgt_q[t], t))
        pivots = online_rank_profile(
            (tgt_q[t], rows[t]) for t in order)
        return [(row_q, col_q[ci]) for row_q, ci in pivots]

    # -- counting helpers ---------------------------------------------------

    def dim(self, i: int) -> int:
        return self.complex.dim(i)

    def dim_from(self, i: int, p: int) -> int:
        """dim F^p C^i."""
        return sum(k for q, k in self._hist.get(i, {}).items() if q >= p)

    def rank(self, i: int) -> int:
        return self._ranks.get(i, 0)

    def rank_cols_from(self, i: int, p: int) -> int:
        """rank of d_i restricted to columns with q >= p."""
        return sum(1 for _, cq in self._pivots(i) if cq >= p)

    def rank_rows_below(self, i: int, s: int) -> int:
        """rank of d_i composed with projection to rows with q < s."""
        return sum(1 for rq, _ in self._pivots(i) if rq < s)

    def rank_box(self, i: int, p: int, s: int) -> int:
        """rank of d_i restricted to columns q >= p, rows q < s."""
        return sum(1 for rq, cq in self._pivots(i) if cq >= p and rq < s)

    def z_dim(self, i: int, p: int, r: int) -> int:
        """dim {x in F^p C^i : dx in F^(p+r)}."""
        return self.dim_from(i, p) - self.rank_box(i, p, p + r)

    # -- homology and filtration --------------------------------------------

    def homology_rank(self, i: int) -> int:
        return self.dim(i) - self.rank(i) - self.rank(i - 1)

    def homology_ranks(self) -> dict[int, int]:
        out = {}
        for i in self.complex.degrees():
            r = self.homology_rank(i)
            if r:
                out[i] = r
        return out

    def filtered_image_dim(self, i: int, p: int) -> int:
        """dim of the image of H^i(F^p C) -> H^i(C), i.e. dim F^p H^i."""
        kernel_f = self.dim_from(i, p) - self.rank_cols_from(i, p)
        image_in_f = self.rank(i - 1) - self.rank_rows_below(i - 1, p)
        return kernel_f - image_in_f

    def q_levels(self) -> list[int]:
        qs = sorted({q for h in self._hist.values() for q in h})
        return qs

    def survivors(self) -> dict[int, tuple[tuple[int, int], ...]]:
        """E_infinity data: for each degree i, ((q, multiplicity), ...)."""
        out: dict[int, tuple[tuple[int, int], ...]] = {}
        levels = self.q_levels()
        for i in self.complex.degrees():
            if self.homology_rank(i) == 0:
                continue
            cells = []
            for p in levels:
                m = self.filtered_image_dim(i, p) - self.filtered_image_dim(i, p + 2)
                if m:
                    cells.append((p, m))
            if cells:
                out[i] = tuple(cells)
        return out

    # -- spectral pages ------------------------------------------------------

    def page(self, r: int) -> dict[tuple[int, int], int]:
        """dim E_r^{i, p} for every cell, r >= 1."""
        out: dict[tuple[int, int], int] = {}
        levels = self.q_levels()
        for i in self.complex.degrees():
            if self.dim(i) == 0:
                continue
            for p in levels:
                dim = (self.z_dim(i, p, r) - self.z_dim(i, p + 1, r - 1)
                       + self.z_dim(i - 1, p - r + 1, r) - self.z_dim(i - 1, p - r + 1, r - 1))
                if dim:
                    out[(i, p)] = dim
        return out


@lru_cache(maxsize=2)
def _analysis(d: PlanarDiagram, limit: int) -> LeeAnalysis:
    return LeeAnalysis(d, limit)


def lee_homology_rank(d: PlanarDiagram, limit: int = DEFAULT_CUBE_LIMIT) -> dict[int, int]:
    """Lee homology ranks per homological degree; the total over all degrees
    is 2^(number of components)."""
    return _analysis(d, limit).homology_ranks()


def e_infinity_gradings(d: PlanarDiagram, limit: int = DEFAULT_CUBE_LIMIT) -> SpectralData:
    """Filtration gradings of the surviving classes (knots only)."""
    if d.components != 1:
        raise ValueError("E_infinity grading analysis is restricted to knots")
    a = _analysis(d, limit)
    return SpectralData(survivors=a.survivors())


def s_invariant(d: PlanarDiagram, limit: int = DEFAULT_CUBE_LIMIT) -> SInvariantResult:
    """The average of the two surviving q-gradings of a knot."""
    data = e_infinity_gradings(d, limit)
    cells = data.survivor_cells()
    total = sum(m for _, _, m in cells)
    if total != 2:
        raise RuntimeError(f"internal consistency failure: {total} survivors, expected 2")
    flat = []
    for i, q, m in cells:
        flat.extend([(i, q)] * m)
    (i1, q1), (i2, q2) = sorted(flat, key=lambda t: t[1])
    if q2 - q1 != 2:
        raise RuntimeError(
            f"internal consistency failure: survivor gradings {q1}, {q2} do not differ by 2")
    return SInvariantResult(s=(q1 + q2) // 2, survivor_gradings=(q1, q2), degree=i1)


def spectral_pages(d: PlanarDiagram, max_r: int = 24,
                   limit: int = DEFAULT_CUBE_LIMIT) -> SpectralData:
    """Page-by-page dimensions E_1, E_2, ... up to stabilization.

    The r-th differential has bidegree (1, r).  If the pages do not reach
    the survivor table by max_r, the partial history is returned with
    stabilized_at=None.
    """
    if d.components != 1:
        raise ValueError("spectral page analysis is restricted to knots")
    a = _analysis(d, limit)
    surv = a.survivors()
    target = {(i, q): m for i, qs in surv.items() for q, m in qs}
    pages: dict[int, dict[tuple[int, int], int]] = {}
    stabilized_at = None
    for r in range(1, max_r + 1):
        pages[r] = a.page(r)
        if pages[r] == target:
            stabilized_at = r
            break
    return SpectralData(survivors=surv, pages=pages, stabilized_at=stabilized_at)
