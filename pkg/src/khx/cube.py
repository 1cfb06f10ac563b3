"""The n-cube of total smoothings of a diagram.

Vertices are bitmasks over the crossings (bit k = 1 means crossing k takes
its 1-smoothing); each vertex resolves to a collection of circles via a
disjoint-set union over arc endpoints.  The 0-smoothing of X[x1,x2,x3,x4]
pairs (x1,x4),(x2,x3) -- the oriented resolution of a positive crossing --
and the 1-smoothing pairs (x1,x2),(x3,x4).  Edges increase one bit, are
classified merge/split by the circle-count change, and carry the sign
(-1)^(number of 1-bits below the changed axis) so every square of the cube
anticommutes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .diagram import PlanarDiagram

DEFAULT_CUBE_LIMIT = 20


class CubeLimitError(RuntimeError):
    """Resource guard: the diagram exceeds the configured cube limit."""


def smoothing_pairs(arcs: tuple[int, int, int, int], bit: int):
    """Arc pairings of one crossing under the given smoothing bit."""
    x1, x2, x3, x4 = arcs
    if bit == 0:
        return (x1, x4), (x2, x3)
    return (x1, x2), (x3, x4)


@dataclass(frozen=True)
class ResolvedState:
    """One total smoothing: `circle_of_arc[i]` is the circle index of the
    i-th arc (diagram arc order); circles are numbered by least arc, with
    any crossing-free circles of the diagram appended at the end."""

    bits: int
    n: int
    circle_count: int
    circle_of_arc: tuple[int, ...]

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def bit_tuple(self) -> tuple[int, ...]:
        return tuple((self.bits >> k) & 1 for k in range(self.n))


@dataclass(frozen=True)
class CubeEdge:
    """Cube edge from `source_bits` along `axis` (bit 0 -> 1).

    `carry[s]` is the target circle index of source circle s; for a merge the
    two `merged` circles share one target, and for a split the `split_from`
    circle maps to the pair `split_to` (carry sends it to split_to[0]).
    """

    source_bits: int
    axis: int
    kind: str  # "merge" | "split"
    sign: int
    carry: tuple[int, ...]
    merged: tuple[int, int] | None = None
    split_from: int | None = None
    split_to: tuple[int, int] | None = None


def edge_sign(bits: Sequence[int] | int, axis: int) -> int:
    """(-1)^(number of 1-bits strictly below `axis`)."""
    if not isinstance(bits, int):
        bits = sum(b << k for k, b in enumerate(bits))
    if (bits >> axis) & 1:
        raise ValueError(f"axis {axis} already resolved to 1")
    below = bits & ((1 << axis) - 1)
    return -1 if below.bit_count() & 1 else 1


class _ArcIndex:
    def __init__(self, d: PlanarDiagram):
        self.labels = d.arcs
        self.index = {a: i for i, a in enumerate(self.labels)}
        self.n_arcs = len(self.labels)


def _resolve_bits(d: PlanarDiagram, ai: _ArcIndex, bits: int) -> ResolvedState:
    n_arcs = ai.n_arcs
    parent = list(range(n_arcs))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k, c in enumerate(d.crossings):
        for a, b in smoothing_pairs(c.arcs, (bits >> k) & 1):
            ra, rb = find(ai.index[a]), find(ai.index[b])
            if ra != rb:
                # union by index keeps the least arc as representative
                if ra < rb:
                    parent[rb] = ra
                else:
                    parent[ra] = rb
    reps = sorted({find(i) for i in range(n_arcs)})
    rep_pos = {r: i for i, r in enumerate(reps)}
    circle_of_arc = tuple(rep_pos[find(i)] for i in range(n_arcs))
    return ResolvedState(bits, d.n, len(reps) + d.circles, circle_of_arc)


def resolve(d: PlanarDiagram, v: Sequence[int] | int) -> ResolvedState:
    """Resolve every crossing of `d` according to the vertex `v`."""
    bits = v if isinstance(v, int) else sum(b << k for k, b in enumerate(v))
    ai = _ArcIndex(d)
    if d.n and bits >> d.n:
        raise ValueError("vertex has more bits than crossings")
    return _resolve_bits(d, ai, bits)


class ResolutionCube:
    """All 2^n resolved states of a diagram; edges are built on demand."""

    def __init__(self, d: PlanarDiagram, limit: int = DEFAULT_CUBE_LIMIT):
        if d.n > limit:
            raise CubeLimitError(
                f"diagram has {d.n} crossings, over the cube limit {limit}")
        self.diagram = d
        self.n = d.n
        self._ai = _ArcIndex(d)
        self.states = [_resolve_bits(d, self._ai, v) for v in range(1 << d.n)]
        # circle index of each crossing-free circle (same in every state)
        self.free_circles = tuple(
            self.states[0].circle_count - d.circles + i for i in range(d.circles))

    def state(self, bits: int) -> ResolvedState:
        return self.states[bits]

    def _circle_at(self, state: ResolvedState, arc_label: int) -> int:
        return state.circle_of_arc[self._ai.index[arc_label]]

    def edge(self, source_bits: int, axis: int) -> CubeEdge:
        if (source_bits >> axis) & 1:
            raise ValueError(f"axis {axis} already resolved to 1")
        src = self.states[source_bits]
        tgt = self.states[source_bits | (1 << axis)]
        x1, x2, x3, x4 = self.diagram.crossings[axis].arcs
        sign = edge_sign(source_bits, axis)

        # representative arc per source circle (least arc index)
        rep = [None] * src.circle_count
        for arc_i, ci in enumerate(src.circle_of_arc):
            if rep[ci] is None:
                rep[ci] = arc_i
        carry = [0] * src.circle_count
        for ci in range(src.circle_count):
            if rep[ci] is not None:
                carry[ci] = tgt.circle_of_arc[rep[ci]]
        for k, ci in enumerate(self.free_circles):
            carry[ci] = tgt.circle_count - self.diagram.circles + k

        ia = self._circle_at(src, x1)
        ib = self._circle_at(src, x2)
        if ia != ib:
            if tgt.circle_count != src.circle_count - 1:
                raise RuntimeError("non-planar diagram: edge is neither merge nor split")
            return CubeEdge(source_bits, axis, "merge", sign, tuple(carry),
                            merged=(ia, ib) if ia < ib else (ib, ia))
        ja = self._circle_at(tgt, x1)
        jb = self._circle_at(tgt, x3)
        if ja == jb or tgt.circle_count != src.circle_count + 1:
            raise RuntimeError("non-planar diagram: edge is neither merge nor split")
        carry[ia] = ja
        return CubeEdge(source_bits, axis, "split", sign, tuple(carry),
                        split_from=ia, split_to=(ja, jb))

    def edges(self) -> Iterator[CubeEdge]:
        for v in range(1 << self.n):
            for axis in range(self.n):
                if not (v >> axis) & 1:
                    yield self.edge(v, axis)

    def edges_from_weight(self, w: int) -> Iterator[CubeEdge]:
        for v in range(1 << self.n):
            if v.bit_count() == w:
                for axis in range(self.n):
                    if not (v >> axis) & 1:
                        yield self.edge(v, axis)

    def weight_profile(self) -> list[tuple[int, ...]]:
        """Circle counts per weight column, each sorted by vertex bits."""
        cols: list[list[int]] = [[] for _ in range(self.n + 1)]
        for st in self.states:
            cols[st.weight].append(st.circle_count)
        return [tuple(c) for c in cols]


def build_cube(d: PlanarDiagram, limit: int = DEFAULT_CUBE_LIMIT) -> ResolutionCube:
    return ResolutionCube(d, limit)


def dump(cube: ResolutionCube) -> str:
    """Debug dump: `bits weight circle_count` per vertex, then
    `bits axis kind sign` per edge."""
    n = cube.n
    lines = []
    for st in cube.states:
        bits = format(st.bits, f"0{n}b")[::-1] if n else "-"
        lines.append(f"{bits} {st.weight} {st.circle_count}")
    for e in cube.edges():
        bits = format(e.source_bits, f"0{n}b")[::-1] if n else "-"
        lines.append(f"{bits} {e.axis} {e.kind} {e.sign:+d}")
    return "\n".join(lines) + "\n"
