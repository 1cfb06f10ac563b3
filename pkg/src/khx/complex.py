"""Chain complexes from the resolution cube via a Frobenius theory.

A generator is a cube vertex plus a label in {1, X} for each circle of its
resolution; its q-grading is (#1-labels - #X-labels) + weight, plus the
global shift n_plus - 2*n_minus when normalized.  Labels are encoded in a
bitmask with bit (c-1-i) set when circle i carries X, so ascending masks
enumerate labelings in lexicographic order with 1 < X.  Generators of one
homological degree are ordered by (vertex bit-tuple, labeling), making every
matrix reproducible byte for byte.

Differentials apply the theory's multiplication along merge edges and its
comultiplication along split edges, the identity on the remaining circles,
times the edge sign.  Matrices are materialized on demand, whole-degree or
sliced into q-grading blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .cube import DEFAULT_CUBE_LIMIT, ResolutionCube, build_cube
from .diagram import OrientationData, PlanarDiagram, orient_and_count

ONE, X = 0, 1
_ALG_DEG = (1, -1)  # q-degree of the labels 1 and X


@dataclass(frozen=True)
class FrobeniusTheory:
    """Multiplication/comultiplication tables over the basis {1, X}.

    `multiplication[(a, b)]` maps a target label to its coefficient;
    `comultiplication[a]` maps a label pair to its coefficient.
    """

    name: str
    ring: str  # "Z" | "Q"
    multiplication: tuple  # indexed [a][b] -> tuple of (c, coeff)
    comultiplication: tuple  # indexed [a] -> tuple of (b, c, coeff)

    @property
    def q_homogeneous(self) -> bool:
        """True when every structure-map term drops the algebra grading by
        exactly 1, so the shifted differential preserves q."""
        return not self._grading_jumps()

    def _grading_jumps(self) -> set[int]:
        jumps = set()
        for a in (ONE, X):
            for b in (ONE, X):
                for c, coeff in self.multiplication[a][b]:
                    if coeff:
                        jumps.add(_ALG_DEG[c] - _ALG_DEG[a] - _ALG_DEG[b] + 1)
            for b, c, coeff in self.comultiplication[a]:
                if coeff:
                    jumps.add(_ALG_DEG[b] + _ALG_DEG[c] - _ALG_DEG[a] + 1)
        jumps.discard(0)
        return jumps

    @property
    def filtered(self) -> bool:
        """True when no term lowers q (the Lee situation)."""
        return all(j > 0 for j in self._grading_jumps())


def _table(pairs):
    return tuple(tuple(pairs[a][b] for b in (ONE, X)) for a in (ONE, X))


def khovanov(ring: str = "Q") -> FrobeniusTheory:
    """m(1,1)=1, m(1,X)=m(X,1)=X, m(X,X)=0; D(1)=1X+X1, D(X)=XX."""
    if ring not in ("Z", "Q"):
        raise ValueError(f"unsupported ring {ring!r}")
    mult = _table({ONE: {ONE: ((ONE, 1),), X: ((X, 1),)},
                   X: {ONE: ((X, 1),), X: ()}})
    comult = (((ONE, X, 1), (X, ONE, 1)), ((X, X, 1),))
    return FrobeniusTheory("khovanov", ring, mult, comult)


def lee() -> FrobeniusTheory:
    """Lee's deformation: m'(X,X)=1 and D'(X)=XX+11, over Q only."""
    mult = _table({ONE: {ONE: ((ONE, 1),), X: ((X, 1),)},
                   X: {ONE: ((X, 1),), X: ((ONE, 1),)}})
    comult = (((ONE, X, 1), (X, ONE, 1)), ((X, X, 1), (ONE, ONE, 1)))
    return FrobeniusTheory("lee", "Q", mult, comult)


KHOVANOV_Q = khovanov("Q")
KHOVANOV_Z = khovanov("Z")
LEE = lee()


# cache of labelings by circle count and X-count: (sorted masks, mask -> rank)
_MASKS: dict[tuple[int, int], tuple[list[int], dict[int, int]]] = {}


def masks_with_popcount(c: int, t: int) -> tuple[list[int], dict[int, int]]:
    key = (c, t)
    hit = _MASKS.get(key)
    if hit is None:
        lst = [m for m in range(1 << c) if m.bit_count() == t]
        hit = _MASKS[key] = (lst, {m: i for i, m in enumerate(lst)})
    return hit


@dataclass(frozen=True)
class _DegreeInfo:
    """States of one weight, sorted by vertex bit-tuple (cube axis 0 first)."""

    states: tuple  # of ResolvedState
    offsets: tuple[int, ...]  # generator offset per state
    dim: int
    rank_of_bits: dict


def _bit_tuple_key(bits: int, n: int) -> tuple[int, ...]:
    return tuple((bits >> k) & 1 for k in range(n))


class GradedChainComplex:
    """The cube complex of a diagram under a Frobenius theory.

    Public homological degrees run over [h_shift, n + h_shift]; q-gradings
    carry q_shift.  `shift(h, q)` relabels gradings only.
    """

    def __init__(self, diagram: PlanarDiagram, theory: FrobeniusTheory,
                 cube: ResolutionCube, orientation: OrientationData,
                 h_shift: int, q_shift: int, normalized: bool):
        self.diagram = diagram
        self.theory = theory
        self.cube = cube
        self.orientation = orientation
        self.h_shift = h_shift
        self.q_shift = q_shift
        self.normalized = normalized
        self.n = diagram.n
        by_weight: list[list] = [[] for _ in range(self.n + 1)]
        for st in cube.states:
            by_weight[st.weight].append(st)
        self._degrees: list[_DegreeInfo] = []
        for w, group in enumerate(by_weight):
            group.sort(key=lambda st: _bit_tuple_key(st.bits, self.n))
            offsets, total = [], 0
            for st in group:
                offsets.append(total)
                total += 1 << st.circle_count
            self._degrees.append(_DegreeInfo(
                tuple(group), tuple(offsets), total,
                {st.bits: r for r, st in enumerate(group)}))

    # -- gradings ----------------------------------------------------------

    @property
    def degree_range(self) -> tuple[int, int]:
        return self.h_shift, self.n + self.h_shift

    def degrees(self) -> range:
        return range(self.h_shift, self.n + self.h_shift + 1)

    def _weight(self, i: int) -> int:
        return i - self.h_shift

    def dim(self, i: int) -> int:
        w = self._weight(i)
        if 0 <= w <= self.n:
            return self._degrees[w].dim
        return 0

    def total_dim(self) -> int:
        return sum(info.dim for info in self._degrees)

    def _state_q0(self, st) -> int:
        # q of the all-1 labeling: every circle contributes +1
        return st.circle_count + st.weight + self.q_shift

    def gen_q(self, i: int) -> list[int]:
        """q-grading of each generator of degree i, canonical order."""
        w = self._weight(i)
        if not (0 <= w <= self.n):
            return []
        out = []
        for st in self._degrees[w].states:
            q0 = self._state_q0(st)
            out.extend(q0 - 2 * m.bit_count() for m in range(1 << st.circle_count))
        return out

    def q_support(self, i: int) -> list[int]:
        w = self._weight(i)
        qs = set()
        if 0 <= w <= self.n:
            for st in self._degrees[w].states:
                q0 = self._state_q0(st)
                qs.update(q0 - 2 * t for t in range(st.circle_count + 1))
        return sorted(qs)

    def shift(self, h: int, q: int) -> "GradedChainComplex":
        out = GradedChainComplex.__new__(GradedChainComplex)
        out.__dict__.update(self.__dict__)
        out.h_shift = self.h_shift + h
        out.q_shift = self.q_shift + q
        return out

    # -- differentials -----------------------------------------------------

    def _scatter_table(self, e, c_s: int, c_u: int) -> list[int]:
        """Bit-scatter of the circles untouched by edge `e` (source mask bits
        to target mask bits); the merging/splitting circles contribute 0."""
        contrib = [0] * c_s
        skip = {e.merged[0], e.merged[1]} if e.kind == "merge" else {e.split_from}
        for circ in range(c_s):
            if circ in skip:
                continue
            contrib[c_s - 1 - circ] = 1 << (c_u - 1 - e.carry[circ])
        table = [0] * (1 << c_s)
        for m in range(1, 1 << c_s):
            low = m & -m
            table[m] = table[m ^ low] | contrib[low.bit_length() - 1]
        return table

    def _edge_terms(self, e, c_s: int, c_u: int):
        """Positional parameters for applying edge `e` to source masks."""
        if e.kind == "merge":
            pa = c_s - 1 - e.merged[0]
            pb = c_s - 1 - e.merged[1]
            pt = c_u - 1 - e.carry[e.merged[0]]
            return ("merge", pa, pb, pt)
        pc = c_s - 1 - e.split_from
        pja = c_u - 1 - e.split_to[0]
        pjb = c_u - 1 - e.split_to[1]
        return ("split", pc, pja, pjb)

    def iter_columns(self, i: int) -> Iterator[tuple[int, list[tuple[int, int]]]]:
        """Columns of d_i in canonical order: (source index, [(target index,
        coefficient), ...])."""
        w = self._weight(i)
        if not (0 <= w < self.n):
            return
        src_info, tgt_info = self._degrees[w], self._degrees[w + 1]
        mult, comult = self.theory.multiplication, self.theory.comultiplication
        for rs, st in enumerate(src_info.states):
            c_s = st.circle_count
            base = src_info.offsets[rs]
            edges = []
            for axis in range(self.n):
                if (st.bits >> axis) & 1:
                    continue
                e = self.cube.edge(st.bits, axis)
                tgt = self.cube.state(st.bits | (1 << axis))
                ru = tgt_info.rank_of_bits[tgt.bits]
                row_base = tgt_info.offsets[ru]
                c_u = tgt.circle_count
                edges.append((e, c_u, row_base,
                              self._scatter_table(e, c_s, c_u),
                              self._edge_terms(e, c_s, c_u)))
            for m in range(1 << c_s):
                items: list[tuple[int, int]] = []
                for e, c_u, row_base, scatter, terms in edges:
                    others = scatter[m]
                    sign = e.sign
                    if terms[0] == "merge":
                        _, pa, pb, pt = terms
                        la, lb = (m >> pa) & 1, (m >> pb) & 1
                        for lc, coeff in mult[la][lb]:
                            items.append((row_base + (others | (lc << pt)), coeff * sign))
                    else:
                        _, pc, pja, pjb = terms
                        lc = (m >> pc) & 1
                        for la, lb, coeff in comult[lc]:
                            items.append((row_base + (others | (la << pja) | (lb << pjb)),
                                          coeff * sign))
                yield base + m, items

    def matrix(self, i: int) -> list[tuple[int, int, int]]:
        """d_i as (row, col, coeff) triplets, rows living in degree i+1."""
        out = []
        for col, items in self.iter_columns(i):
            out.extend((row, col, v) for row, v in items)
        out.sort()
        return out

    def _block_layout(self, w: int):
        """Per q-grading block at weight w: column counts and per-(state, t)
        base offsets.  Returns (dims, base) with base[(rank, t)] = (j, off)."""
        info = self._degrees[w]
        dims: dict[int, int] = {}
        base: dict[tuple[int, int], tuple[int, int]] = {}
        for rank, st in enumerate(info.states):
            q0 = self._state_q0(st)
            c = st.circle_count
            for t in range(c + 1):
                j = q0 - 2 * t
                off = dims.get(j, 0)
                base[(rank, t)] = (j, off)
                dims[j] = off + len(masks_with_popcount(c, t)[0])
        return dims, base

    def blocks(self, i: int) -> dict[int, tuple[int, int, list[tuple[int, int, int]]]]:
        """d_i split by q-grading: {j: (n_cols, n_rows, triplets)}.

        Only valid for q-homogeneous theories; block-local indices follow the
        canonical generator order restricted to grading j.
        """
        if not self.theory.q_homogeneous:
            raise ValueError("q-blocks are only defined for a q-homogeneous theory")
        w = self._weight(i)
        col_dims, col_base = self._block_layout(w) if 0 <= w <= self.n else ({}, {})
        row_dims, row_base = self._block_layout(w + 1) if 0 <= w + 1 <= self.n else ({}, {})
        triplets: dict[int, list[tuple[int, int, int]]] = {j: [] for j in col_dims}
        if 0 <= w < self.n:
            src_info, tgt_info = self._degrees[w], self._degrees[w + 1]
            mult, comult = self.theory.multiplication, self.theory.comultiplication
            for rs, st in enumerate(src_info.states):
                c_s = st.circle_count
                q0 = self._state_q0(st)
                for axis in range(self.n):
                    if (st.bits >> axis) & 1:
                        continue
                    e = self.cube.edge(st.bits, axis)
                    tgt = self.cube.state(st.bits | (1 << axis))
                    ru = tgt_info.rank_of_bits[tgt.bits]
                    c_u = tgt.circle_count
                    scatter = self._scatter_table(e, c_s, c_u)
                    terms = self._edge_terms(e, c_s, c_u)
                    sign = e.sign
                    q0_u = self._state_q0(tgt)
                    for t in range(c_s + 1):
                        j = q0 - 2 * t
                        _, coff = col_base[(rs, t)]
                        t_u = (q0_u - j) >> 1
                        masks, _ = masks_with_popcount(c_s, t)
                        rindex = masks_with_popcount(c_u, t_u)[1] if 0 <= t_u <= c_u else None
                        if rindex is None:
                            continue
                        _, roff = row_base[(ru, t_u)]
                        tl = triplets[j]
                        if terms[0] == "merge":
                            _, pa, pb, pt = terms
                            for k, m in enumerate(masks):
                                others = scatter[m]
                                la, lb = (m >> pa) & 1, (m >> pb) & 1
                                for lc, coeff in mult[la][lb]:
                                    tl.append((roff + rindex[others | (lc << pt)],
                                               coff + k, coeff * sign))
                        else:
                            _, pc, pja, pjb = terms
                            for k, m in enumerate(masks):
                                others = scatter[m]
                                lc = (m >> pc) & 1
                                for la, lb, coeff in comult[lc]:
                                    tl.append((roff + rindex[others | (la << pja) | (lb << pjb)],
                                               coff + k, coeff * sign))
        return {j: (col_dims.get(j, 0), row_dims.get(j, 0), sorted(tl))
                for j, tl in triplets.items()}

    # -- reporting ---------------------------------------------------------

    def q_histogram(self, i: int) -> dict[int, int]:
        hist: dict[int, int] = {}
        for q in self.gen_q(i):
            hist[q] = hist.get(q, 0) + 1
        return dict(sorted(hist.items()))

    def to_dump(self) -> str:
        """Per-degree generator count, q histogram, and matrix triplets."""
        lines = []
        for i in self.degrees():
            lines.append(f"degree {i}: dim {self.dim(i)}")
            for q, k in self.q_histogram(i).items():
                lines.append(f"  q {q}: {k}")
            for r, c, v in self.matrix(i):
                lines.append(f"  d {r} {c} {v:+d}")
        return "\n".join(lines) + "\n"


def build_complex(d: PlanarDiagram, theory: FrobeniusTheory = KHOVANOV_Q,
                  normalized: bool = True, limit: int = DEFAULT_CUBE_LIMIT,
                  flips: tuple[int, ...] = (),
                  cube: ResolutionCube | None = None) -> GradedChainComplex:
    """Run diagram -> cube -> complex.  Lee's theory requires ring Q."""
    if theory.name == "lee" and theory.ring != "Q":
        raise ValueError("Lee's theory is only defined over Q")
    orientation = orient_and_count(d, flips)
    if cube is None:
        cube = build_cube(d, limit)
    if normalized:
        h, q = -orientation.n_minus, orientation.n_plus - 2 * orientation.n_minus
    else:
        h, q = 0, 0
    return GradedChainComplex(d, theory, cube, orientation, h, q, normalized)


@dataclass(frozen=True)
class SubcomplexSplit:
    """The mapping-cone view of one crossing: CKh(D) is the total complex of
    CKh(D(*0)) -> CKh(D(*1)), with the *1 side included via {1}[1].

    All three complexes are unnormalized.  `include1[w]` maps each generator
    of c1 at weight w to (index in `big` at weight w+1, sign); `embed0[w]`
    maps each generator of c0 at weight w to its index in `big` at weight w
    (the section of the quotient map onto the *0 subcube).
    """

    d0: PlanarDiagram
    d1: PlanarDiagram
    big: GradedChainComplex
    c0: GradedChainComplex
    c1: GradedChainComplex
    include1: dict
    embed0: dict


def _sub_generator_map(big: GradedChainComplex, sub: GradedChainComplex,
                       arc_images: dict, k: int, bit: int, signed: bool):
    """Per weight w: list sending sub generator index -> (big index, sign).

    The sub diagram's resolutions are literally the big diagram's at vertices
    with bit k fixed; circles correspond through `arc_images` (old free
    circles first, smoothing circles after).  For the *1 inclusion a sign
    (-1)^(#1-bits above axis k) makes it a chain map.
    """
    d_big = big.diagram
    big_arcs = {a: idx for idx, a in enumerate(d_big.arcs)}
    sub_arcs = {a: idx for idx, a in enumerate(sub.diagram.arcs)}
    out: dict[int, list[tuple[int, int]]] = {}
    low = (1 << k) - 1
    for w in range(sub.n + 1):
        info_s = sub._degrees[w]
        info_b = big._degrees[w + bit]
        table: list[tuple[int, int]] = [None] * info_s.dim
        for rank_s, st in enumerate(info_s.states):
            bits = st.bits
            big_bits = ((bits & ~low) << 1) | (bits & low) | (bit << k)
            rank_b = info_b.rank_of_bits[big_bits]
            bst = big.cube.state(big_bits)
            c = st.circle_count
            if bst.circle_count != c:
                raise RuntimeError("smoothed state has mismatched circles")
            corr = [None] * c
            for old_arc, img in arc_images.items():
                kind, val = img
                b_ci = bst.circle_of_arc[big_arcs[old_arc]]
                if kind == "arc":
                    s_ci = st.circle_of_arc[sub_arcs[val]]
                else:
                    s_ci = c - sub.diagram.circles + d_big.circles + val
                if corr[s_ci] not in (None, b_ci):
                    raise RuntimeError("inconsistent circle correspondence")
                corr[s_ci] = b_ci
            for i in range(d_big.circles):  # shared crossing-free circles
                corr[c - sub.diagram.circles + i] = bst.circle_count - d_big.circles + i
            if any(x is None for x in corr):
                raise RuntimeError("incomplete circle correspondence")
            sign = 1
            if signed and (bits >> k).bit_count() & 1:
                sign = -1
            base_s = info_s.offsets[rank_s]
            base_b = info_b.offsets[rank_b]
            for m in range(1 << c):
                big_m = 0
                for ci in range(c):
                    if (m >> (c - 1 - ci)) & 1:
                        big_m |= 1 << (c - 1 - corr[ci])
                table[base_s + m] = (base_b + big_m, sign)
        out[w] = table
    return out


def subcomplex_split(d: PlanarDiagram, k: int,
                     theory: FrobeniusTheory = KHOVANOV_Q,
                     limit: int = DEFAULT_CUBE_LIMIT) -> SubcomplexSplit:
    """Split the unnormalized complex of `d` along crossing `k` into the
    disjoint subquotients coming from D(*0) and D(*1)."""
    from .diagram import smooth_crossing
    s0 = smooth_crossing(d, k, 0)
    s1 = smooth_crossing(d, k, 1)
    big = build_complex(d, theory, normalized=False, limit=limit)
    c0 = build_complex(s0.diagram, theory, normalized=False, limit=limit)
    c1 = build_complex(s1.diagram, theory, normalized=False, limit=limit)
    include1 = _sub_generator_map(big, c1, s1.arc_images, k, 1, signed=True)
    embed0 = _sub_generator_map(big, c0, s0.arc_images, k, 0, signed=False)
    return SubcomplexSplit(s0.diagram, s1.diagram, big, c0, c1, include1, embed0)
