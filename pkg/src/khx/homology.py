"""Bigraded homology of a cube complex: ranks over Q, ranks plus torsion
over Z via Smith normal form.

Matrices are processed one q-grading block at a time (the Khovanov
differential is q-homogeneous), and torsion of H^i in grading j comes from
the invariant factors of d^{i-1} restricted to grading j, matching the
cohomological tables where the Z_2's sit one diagonal above the free parts.
Setting KHX_THREADS>1 fans the independent blocks out over processes.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

from .complex import GradedChainComplex
from .elimination import divisor_chain, snf_diagonal


@dataclass(frozen=True)
class SmithDecomposition:
    """Invariant factors d1 | d2 | ... (all nonzero) of an integer matrix."""

    invariant_factors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.invariant_factors if d > 1)


def smith_normal_form(matrix) -> SmithDecomposition:
    """Smith normal form of an integer matrix.

    Accepts a dense list of rows or a ``(n_rows, n_cols, triplets)`` sparse
    form.  Only the invariant factors are returned (no transforms).

    >>> smith_normal_form([[2, 0], [0, 3]]).invariant_factors
    (1, 6)
    >>> smith_normal_form([[0, 0], [0, 0]]).rank
    0
    """
    if isinstance(matrix, tuple) and len(matrix) == 3:
        n_rows, n_cols, triplets = matrix
    else:
        rows = [list(r) for r in matrix]
        n_rows = len(rows)
        n_cols = len(rows[0]) if rows else 0
        if any(len(r) != n_cols for r in rows):
            raise ValueError("ragged matrix")
        triplets = [(i, j, v) for i, r in enumerate(rows)
                    for j, v in enumerate(r) if v]
    diag = snf_diagonal(list(triplets), n_rows, n_cols)
    return SmithDecomposition(divisor_chain(diag))


def _prime_powers(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            q = 1
            while n % p == 0:
                n //= p
                q *= p
            out.append(q)
        p += 1
    if n > 1:
        out.append(n)
    return out


def torsion_prime_powers(invariant_factors: Sequence[int]) -> tuple[int, ...]:
    out: list[int] = []
    for d in invariant_factors:
        if d > 1:
            out.extend(_prime_powers(d))
    return tuple(sorted(out))


class BigradedGroup:
    """Map (homological degree i, q-grading j) -> free rank + torsion.

    Torsion is stored as a sorted tuple of prime powers.  Zero entries are
    dropped, so equality is equality of the supported tables.
    """

    def __init__(self, ring: str, entries: Mapping[tuple[int, int], tuple]):
        if ring not in ("Z", "Q"):
            raise ValueError(f"unsupported ring {ring!r}")
        clean: dict[tuple[int, int], tuple[int, tuple[int, ...]]] = {}
        for (i, j), val in entries.items():
            free, torsion = val
            torsion = tuple(sorted(torsion))
            if ring == "Q" and torsion:
                raise ValueError("torsion is empty over Q")
            if free or torsion:
                clean[(i, j)] = (free, torsion)
        self.ring = ring
        self.entries = dict(sorted(clean.items()))

    def free(self, i: int, j: int) -> int:
        return self.entries.get((i, j), (0, ()))[0]

    def torsion(self, i: int, j: int) -> tuple[int, ...]:
        return self.entries.get((i, j), (0, ()))[1]

    def support(self) -> list[tuple[int, int]]:
        return list(self.entries)

    def degrees(self) -> list[int]:
        return sorted({i for i, _ in self.entries})

    def gradings(self) -> list[int]:
        return sorted({j for _, j in self.entries})

    def degree_group(self, i: int) -> dict[int, tuple[int, tuple[int, ...]]]:
        return {j: val for (ii, j), val in self.entries.items() if ii == i}

    def total_rank(self) -> int:
        return sum(free for free, _ in self.entries.values())

    def free_ranks(self) -> dict[tuple[int, int], int]:
        return {k: free for k, (free, _) in self.entries.items() if free}

    def __eq__(self, other):
        if not isinstance(other, BigradedGroup):
            return NotImplemented
        return self.ring == other.ring and self.entries == other.entries

    def __hash__(self):
        return hash((self.ring, tuple(self.entries.items())))

    def __repr__(self):
        cells = ", ".join(f"({i},{j}):{free}+{list(tor)}" if tor else f"({i},{j}):{free}"
                          for (i, j), (free, tor) in self.entries.items())
        return f"BigradedGroup[{self.ring}]({cells})"

    # -- serialization ------------------------------------------------------

    def to_json_obj(self) -> dict:
        return {"ring": self.ring,
                "entries": [{"i": i, "j": j, "free": free, "torsion": list(tor)}
                            for (i, j), (free, tor) in self.entries.items()]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(", ", ": "))

    @classmethod
    def from_json_obj(cls, obj: dict) -> "BigradedGroup":
        entries = {(int(e["i"]), int(e["j"])): (int(e["free"]), tuple(e.get("torsion", ())))
                   for e in obj["entries"]}
        return cls(obj["ring"], entries)

    @classmethod
    def from_json(cls, text: str) -> "BigradedGroup":
        return cls.from_json_obj(json.loads(text))

    # -- rendering ----------------------------------------------------------

    def _cell(self, i: int, j: int) -> str:
        free, tor = self.entries.get((i, j), (0, ()))
        sym = self.ring
        parts = []
        if free == 1:
            parts.append(sym)
        elif free > 1:
            parts.append(f"{sym}^{free}")
        parts.extend(f"Z_{d}" for d in tor)
        return "+".join(parts)

    def render_table(self) -> str:
        """Paper-style grid: rows are homological degrees descending,
        columns q-gradings ascending."""
        if not self.entries:
            return "(trivial)\n"
        degs = self.degrees()
        grads = self.gradings()
        header = ["i\\j"] + [str(j) for j in grads]
        rows = []
        for i in reversed(range(degs[0], degs[-1] + 1)):
            rows.append([str(i)] + [self._cell(i, j) for j in grads])
        widths = [max(len(r[k]) for r in [header] + rows) for k in range(len(header))]
        lines = ["  ".join(cell.rjust(w) for cell, w in zip(r, widths)).rstrip()
                 for r in [header] + rows]
        return "\n".join(lines) + "\n"


def _solve_block(job):
    key, n_rows, n_cols, triplets = job
    return key, snf_diagonal(list(triplets), n_rows, n_cols)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("KHX_THREADS", "1")))
    except ValueError:
        return 1


def _block_diagonals(c: GradedChainComplex):
    """SNF diagonal of every (degree, q) block of the differential.

    Yields (i, {j: (n_cols_at_(i,j), diagonal of d_i|_j)}) in degree order.
    """
    threads = _threads()
    pool = ProcessPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for i in c.degrees():
            blocks = c.blocks(i)
            jobs = [((j,), n_rows, n_cols, trip)
                    for j, (n_cols, n_rows, trip) in sorted(blocks.items())]
            if pool is not None:
                results = list(pool.map(_solve_block, jobs))
            else:
                results = [_solve_block(job) for job in jobs]
            out = {}
            for (key, diag), (j, (n_cols, n_rows, _)) in zip(results, sorted(blocks.items())):
                assert key == (j,)
                out[j] = (n_cols, diag)
            yield i, out
    finally:
        if pool is not None:
            pool.shutdown()


def _homology(c: GradedChainComplex, ring: str, with_torsion: bool) -> BigradedGroup:
    if not c.theory.q_homogeneous:
        raise ValueError(
            "differential is not q-homogeneous (a Lee complex? use the lee module)")
    if c.theory.ring != ring:
        raise ValueError(f"complex is over {c.theory.ring}, expected {ring}")
    entries: dict[tuple[int, int], tuple[int, tuple[int, ...]]] = {}
    prev_rank: dict[int, int] = {}
    prev_tors: dict[int, tuple[int, ...]] = {}
    for i, blocks in _block_diagonals(c):
        rank: dict[int, int] = {}
        tors: dict[int, tuple[int, ...]] = {}
        for j, (n_cols, diag) in blocks.items():
            rank[j] = len(diag)
            if with_torsion:
                t = torsion_prime_powers(divisor_chain(diag))
                if t:
                    tors[j] = t
            free = n_cols - rank[j] - prev_rank.get(j, 0)
            torsion = prev_tors.get(j, ())
            if free or torsion:
                entries[(i, j)] = (free, torsion)
        # gradings torsioned by d_{i-1} but with no generators at degree i
        for j, t in prev_tors.items():
            if j not in blocks and t:
                raise AssertionError("torsion outside block support")
        prev_rank, prev_tors = rank, tors
    return BigradedGroup(ring, entries)


def homology_q(c: GradedChainComplex) -> BigradedGroup:
    """Bigraded ranks over Q of a Khovanov-type complex."""
    return _homology(c, "Q", with_torsion=False)


def homology_z(c: GradedChainComplex) -> BigradedGroup:
    """Free ranks and torsion over Z; torsion of H^i comes from the
    invariant factors of d^{i-1} in the same q-grading."""
    return _homology(c, "Z", with_torsion=True)
