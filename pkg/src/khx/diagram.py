"""Planar link diagrams in PD notation: parsing, pretzel generation, orientation.

A diagram is a list of crossings, each a 4-tuple of arc labels read
counterclockwise starting at the incoming under-strand, plus a count of
crossing-free circles (so unknots and unlinks are representable).  Crossing
signs follow the rule: a crossing is positive when the under-strand, rotated
counterclockwise by 90 degrees, points along the over-strand.  In tuple terms
the over-strand occupies slots 2 and 4, and the crossing is positive exactly
when it flows slot 2 -> slot 4.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass


class InvalidDiagramError(ValueError):
    """Raised for syntactically or combinatorially invalid diagram input."""


@dataclass(frozen=True)
class Crossing:
    """One crossing: arcs (x1, x2, x3, x4) counterclockwise from the incoming
    under-strand.  The under-strand runs x1 -> x3; the over-strand occupies
    x2 and x4."""

    arcs: tuple[int, int, int, int]

    def __post_init__(self):
        if len(self.arcs) != 4:
            raise InvalidDiagramError(f"crossing tuple arity {len(self.arcs)} != 4")


@dataclass(frozen=True)
class PlanarDiagram:
    crossings: tuple[Crossing, ...]
    circles: int = 0  # crossing-free circle components

    def __post_init__(self):
        if self.circles < 0:
            raise InvalidDiagramError("negative circle count")
        if not self.crossings and self.circles == 0:
            raise InvalidDiagramError("empty diagram: no crossings and no circles")
        _validate_arcs(self)

    @property
    def n(self) -> int:
        return len(self.crossings)

    @property
    def arcs(self) -> tuple[int, ...]:
        seen = set()
        for c in self.crossings:
            seen.update(c.arcs)
        return tuple(sorted(seen))

    @property
    def components(self) -> int:
        return len(strands(self)) + self.circles

    def to_pd_text(self) -> str:
        parts = [f"X[{c.arcs[0]},{c.arcs[1]},{c.arcs[2]},{c.arcs[3]}]" for c in self.crossings]
        parts.extend("O" * self.circles)
        return ",".join(parts)

    def to_json_obj(self) -> dict:
        return {"crossings": [list(c.arcs) for c in self.crossings], "circles": self.circles}

    def __repr__(self):
        return f"PlanarDiagram({self.to_pd_text()!r})"


def _validate_arcs(d: PlanarDiagram) -> None:
    count: dict[int, int] = {}
    for c in d.crossings:
        for a in c.arcs:
            count[a] = count.get(a, 0) + 1
    bad = {a: k for a, k in count.items() if k != 2}
    if bad:
        raise InvalidDiagramError(f"arc labels not occurring exactly twice: {bad}")


_X_RE = re.compile(r"X\[\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\]")
_P_RE = re.compile(r"P\(\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\)")


def parse_pd(text: str) -> PlanarDiagram:
    """Parse PD notation like ``X[1,4,2,5],X[3,6,4,1],X[5,2,6,3]``.

    A bare ``O`` token adds one crossing-free circle, so the 0-crossing
    unknot is ``O`` and a split unknotted circle can ride along any code.
    Validation: 4-tuples only, every arc label exactly twice, and a
    consistent strand flow (checked on demand by `orient`).
    """
    crossings: list[Crossing] = []
    circles = 0
    pos = 0
    text = text.strip()
    if not text:
        raise InvalidDiagramError("empty PD string")
    while pos < len(text):
        if text[pos] in ", \t\n":
            pos += 1
            continue
        if text[pos] == "O":
            circles += 1
            pos += 1
            continue
        m = _X_RE.match(text, pos)
        if m is None:
            frag = text[pos:pos + 24]
            if text[pos] == "X":
                raise InvalidDiagramError(f"malformed crossing tuple at {frag!r} (need 4 arcs)")
            raise InvalidDiagramError(f"unexpected token at {frag!r}")
        crossings.append(Crossing(tuple(int(g) for g in m.groups())))
        pos = m.end()
    d = PlanarDiagram(tuple(crossings), circles)
    orient(d)  # validates flow consistency up front
    return d


def parse_diagram(text: str) -> PlanarDiagram:
    """Accept any supported diagram syntax: PD text, pretzel shorthand
    ``P(p1,p2,p3)``, or JSON ``{"crossings": [[1,4,2,5], ...], "circles": 0}``."""
    text = text.strip()
    if text.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise InvalidDiagramError(f"bad diagram JSON: {e}") from None
        try:
            cr = tuple(Crossing(tuple(int(a) for a in t)) for t in obj.get("crossings", []))
            d = PlanarDiagram(cr, int(obj.get("circles", 0)))
        except (TypeError, ValueError) as e:
            raise InvalidDiagramError(f"bad diagram JSON: {e}") from None
        orient(d)
        return d
    m = _P_RE.fullmatch(text)
    if m:
        return pretzel(*(int(g) for g in m.groups()))
    return parse_pd(text)


def unlink(k: int) -> PlanarDiagram:
    """The k-component unlink as a 0-crossing diagram."""
    return PlanarDiagram((), circles=k)


# ---------------------------------------------------------------------------
# Orientation
# ---------------------------------------------------------------------------

# Flow values for a (crossing, slot) endpoint.  Slot 1 is forced _IN and
# slot 3 forced _OUT by the PD convention; over slots 2/4 are resolved by
# propagation (the over-strand enters one and leaves the other).
_IN, _OUT = 0, 1
_STRAND_MATE = {1: 3, 3: 1, 2: 4, 4: 2}


@dataclass(frozen=True)
class OrientationData:
    """Per-crossing signs plus the counts n_plus / n_minus driving the
    [-n_minus]{n_plus - 2 n_minus} normalization shifts."""

    n_plus: int
    n_minus: int
    signs: tuple[int, ...]
    components: tuple[tuple[int, ...], ...]  # arcs of each strand, traversal order
    free_flags: tuple[bool, ...]  # True where the orientation was a free choice

    @property
    def writhe(self) -> int:
        return self.n_plus - self.n_minus


def _occurrences(d: PlanarDiagram) -> dict[int, tuple[tuple[int, int], tuple[int, int]]]:
    occ: dict[int, list[tuple[int, int]]] = {}
    for ci, c in enumerate(d.crossings):
        for pos, a in enumerate(c.arcs, start=1):
            occ.setdefault(a, []).append((ci, pos))
    return {a: tuple(ends) for a, ends in occ.items()}


def _propagate(d, occ, flow, seeds):
    """Spread flow constraints from `seeds`; mutates `flow` in place."""
    queue = list(seeds)
    while queue:
        end = queue.pop()
        val = flow[end]
        opposite = _OUT if val == _IN else _IN
        ci, pos = end
        arc = d.crossings[ci].arcs[pos - 1]
        a, b = occ[arc]
        other = b if end == a else a
        for tgt, tval in ((other, opposite),
                          ((ci, _STRAND_MATE[pos]), opposite)):
            cur = flow.get(tgt)
            if cur is None:
                flow[tgt] = tval
                queue.append(tgt)
            elif cur != tval:
                raise InvalidDiagramError("inconsistent strand flow: non-manifold pairing")


def _forced_flow(d: PlanarDiagram, occ) -> dict[tuple[int, int], int]:
    flow: dict[tuple[int, int], int] = {}
    for ci in range(d.n):
        for pos, val in ((1, _IN), (3, _OUT)):
            if flow.get((ci, pos), val) != val:
                raise InvalidDiagramError("inconsistent strand flow: non-manifold pairing")
            flow[(ci, pos)] = val
    _propagate(d, occ, flow, list(flow))
    return flow


def orient(d: PlanarDiagram) -> dict[tuple[int, int], int]:
    """Assign an in/out flow to every (crossing, slot) endpoint.

    Components that pass under somewhere are intrinsically oriented by the
    PD convention.  An always-over component is oriented deterministically:
    starting from its lowest arc label, head toward the neighbour arc with
    the smaller label (the increasing-label direction).
    """
    occ = _occurrences(d)
    flow = _forced_flow(d, occ)
    undecided = sorted(a for a, ends in occ.items() if ends[0] not in flow)
    for low in undecided:
        if occ[low][0] in flow:
            continue  # settled while orienting an earlier cycle
        e0, e1 = occ[low]

        def next_arc(end):
            ci, pos = end
            return d.crossings[ci].arcs[_STRAND_MATE[pos] - 1]

        head = e0 if (next_arc(e0), e0) <= (next_arc(e1), e1) else e1
        flow[head] = _IN
        _propagate(d, occ, flow, [head])
    return flow


def strands(d: PlanarDiagram) -> list[tuple[int, ...]]:
    """Strand components (free circles excluded) as oriented arc cycles,
    each listed from its lowest arc."""
    if d.n == 0:
        return []
    occ = _occurrences(d)
    flow = orient(d)

    def successor(arc: int) -> int:
        for end in occ[arc]:
            if flow[end] == _IN:
                ci, pos = end
                return d.crossings[ci].arcs[_STRAND_MATE[pos] - 1]
        raise InvalidDiagramError(f"arc {arc} has no inflow endpoint")

    comps = []
    left = set(occ)
    while left:
        start = min(left)
        cyc = [start]
        left.discard(start)
        a = successor(start)
        while a != start:
            cyc.append(a)
            left.discard(a)
            a = successor(a)
        comps.append(tuple(cyc))
    return comps


def orient_and_count(d: PlanarDiagram, flips: tuple[int, ...] = ()) -> OrientationData:
    """Orient the diagram and count positive/negative crossings.

    `flips` lists strand-component indices whose orientation is reversed
    relative to the deterministic choice; a crossing's sign flips when
    exactly one of its two strands is reversed.  For a knot the homology is
    independent of this choice; for links it moves the normalization shifts.
    """
    if d.n == 0:
        return OrientationData(0, 0, (), (), ())
    occ = _occurrences(d)
    flow = orient(d)
    comps = strands(d)
    arc_comp = {a: k for k, cyc in enumerate(comps) for a in cyc}
    forced = _forced_flow(d, occ)
    free_flags = tuple(occ[cyc[0]][0] not in forced for cyc in comps)
    flipset = set(flips)
    signs = []
    for ci, c in enumerate(d.crossings):
        base = 1 if flow[(ci, 2)] == _IN else -1  # over flows slot2 -> slot4: positive
        under_comp = arc_comp[c.arcs[0]]
        over_comp = arc_comp[c.arcs[1]]
        if (under_comp in flipset) != (over_comp in flipset):
            base = -base
        signs.append(base)
    n_plus = sum(1 for s in signs if s > 0)
    return OrientationData(n_plus, len(signs) - n_plus, tuple(signs), tuple(comps), free_flags)


def mirror(d: PlanarDiagram) -> PlanarDiagram:
    """Switch every crossing (over <-> under).  The new tuple starts at the
    old incoming over-strand, preserving the counterclockwise order."""
    if d.n == 0:
        return d
    flow = orient(d)
    new = []
    for ci, c in enumerate(d.crossings):
        a, b, cc, dd = c.arcs
        if flow[(ci, 2)] == _IN:   # over flows b -> d: new under-in is b
            new.append(Crossing((b, cc, dd, a)))
        else:                      # over flows d -> b
            new.append(Crossing((dd, a, b, cc)))
    return PlanarDiagram(tuple(new), d.circles)


@dataclass(frozen=True)
class SmoothedDiagram:
    """Result of replacing one crossing by a smoothing.

    `arc_images` sends each old arc label to ("arc", new_label) or, when the
    smoothing closed it off, to ("circle", index) with the index counted
    after the parent diagram's own free circles.
    """

    diagram: PlanarDiagram
    arc_images: dict
    new_circles: int


def smooth_crossing(d: PlanarDiagram, k: int, bit: int) -> SmoothedDiagram:
    """The diagram D(*0) or D(*1): crossing k replaced by its 0- or
    1-smoothing.  Fused arcs take the least label of their class; arcs whose
    ends are entirely consumed at crossing k become free circles."""
    if not (0 <= k < d.n):
        raise InvalidDiagramError(f"crossing index {k} out of range")
    if bit not in (0, 1):
        raise InvalidDiagramError("smoothing bit must be 0 or 1")
    x1, x2, x3, x4 = d.crossings[k].arcs
    pairs = ((x1, x4), (x2, x3)) if bit == 0 else ((x1, x2), (x3, x4))

    parent = {a: a for a in (x1, x2, x3, x4)}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    classes: dict[int, list[int]] = {}
    for a in parent:
        classes.setdefault(find(a), []).append(a)

    # a class closes into a circle when all endpoints of all its arcs sit at
    # crossing k (slots occupied = 2 * number of member arcs)
    slot_count: dict[int, int] = {}
    for a in (x1, x2, x3, x4):
        slot_count[a] = slot_count.get(a, 0) + 1
    arc_images: dict[int, tuple] = {}
    new_circles = 0
    for root in sorted(classes):
        members = sorted(set(classes[root]))
        slots = sum(slot_count[a] for a in members)
        if slots == 2 * len(members):
            for a in members:
                arc_images[a] = ("circle", new_circles)
            new_circles += 1
        else:
            for a in members:
                arc_images[a] = ("arc", members[0])
    for a in d.arcs:
        if a not in arc_images:
            arc_images[a] = ("arc", a)

    def image(a):
        kind, val = arc_images[a]
        if kind == "circle":
            raise InvalidDiagramError(
                "smoothing closed an arc that another crossing still uses")
        return val

    crossings = tuple(Crossing(tuple(image(a) for a in c.arcs))
                      for i, c in enumerate(d.crossings) if i != k)
    out = PlanarDiagram(crossings, d.circles + new_circles)
    return SmoothedDiagram(out, arc_images, new_circles)


# ---------------------------------------------------------------------------
# Pretzel diagrams
# ---------------------------------------------------------------------------

def pretzel(p1: int, p2: int, p3: int) -> PlanarDiagram:
    """The 3-column pretzel diagram P(p1, p2, p3).

    Column i is a vertical 2-strand twist region with |p_i| crossings, all of
    handedness sign(p_i); columns are joined by nested arcs at top and bottom.
    A zero entry means the band is absent (closure arcs pass straight
    through), so P(3,-3,0) is a 6-crossing 2-component-unlink diagram and
    P(1,0,0) is a 1-crossing unknot.  Crossing order: column 1 top to bottom,
    then column 2, then column 3 -- "the last crossing of the last column"
    is the final cube axis.
    """
    ps = (p1, p2, p3)
    if all(p == 0 for p in ps):
        raise InvalidDiagramError("pretzel(0,0,0) has no crossings and no representable bands")
    ks = [abs(p) for p in ps]

    # Ports ("P", col, row, corner) of real crossings; fuse terminals
    # ("T"/"B", col, side) stand in for the two boundary points of an
    # absent (zero) band and are contracted away below.
    connections: list[tuple] = []
    for col, k in enumerate(ks):
        for row in range(k - 1):
            connections.append((("P", col, row, "SW"), ("P", col, row + 1, "NW")))
            connections.append((("P", col, row, "SE"), ("P", col, row + 1, "NE")))

    def top(col, side):
        if ks[col] == 0:
            return ("T", col, side)
        return ("P", col, 0, "NW" if side == "L" else "NE")

    def bot(col, side):
        if ks[col] == 0:
            return ("B", col, side)
        return ("P", col, ks[col] - 1, "SW" if side == "L" else "SE")

    for boundary in (top, bot):
        connections.append((boundary(0, "R"), boundary(1, "L")))
        connections.append((boundary(1, "R"), boundary(2, "L")))
        connections.append((boundary(0, "L"), boundary(2, "R")))
    for col, k in enumerate(ks):
        if k == 0:
            connections.append((("T", col, "L"), ("T", col, "R")))
            connections.append((("B", col, "L"), ("B", col, "R")))

    link: dict[tuple, list] = {}
    for u, v in connections:
        link.setdefault(u, []).append(v)
        link.setdefault(v, []).append(u)

    # Contract fuse terminals: each arc runs between two real ports.
    arc_of_port: dict[tuple, tuple] = {}
    for u in sorted(link):
        if u[0] != "P" or u in arc_of_port:
            continue
        prev, cur = u, link[u][0]
        while cur[0] != "P":
            step = [w for w in link[cur] if w != prev]
            prev, cur = cur, step[0]
        arc_of_port[u] = (u, cur)
        arc_of_port[cur] = (u, cur)

    # Trace strands (local passage NW<->SE, NE<->SW) to fix an orientation,
    # so each tuple can start at its incoming under-strand.
    mate = {"NW": "SE", "SE": "NW", "NE": "SW", "SW": "NE"}
    flows: dict[tuple, str] = {}
    for p0 in sorted(arc_of_port):
        if p0 in flows:
            continue
        cur = p0
        while cur not in flows:
            flows[cur] = "in"
            _, col, row, corner = cur
            out_port = ("P", col, row, mate[corner])
            flows[out_port] = "out"
            u, v = arc_of_port[out_port]
            cur = v if out_port == u else u

    arc_label = {}
    for i, pair in enumerate(sorted(set(arc_of_port.values())), start=1):
        arc_label[pair] = i

    crossings: list[Crossing] = []
    ccw = {"NE": "NW", "NW": "SW", "SW": "SE", "SE": "NE"}
    for col, p in enumerate(ps):
        # handedness +1: the NE->SW strand is over; calibrated so P(3,-3,q)
        # realizes n_plus = q+3, n_minus = 3
        under_pair = ("NW", "SE") if p > 0 else ("NE", "SW")
        for row in range(ks[col]):
            under_in = next(c for c in under_pair if flows[("P", col, row, c)] == "in")
            order = [under_in]
            while len(order) < 4:
                order.append(ccw[order[-1]])
            crossings.append(Crossing(tuple(
                arc_label[arc_of_port[("P", col, row, c)]] for c in order)))
    return PlanarDiagram(tuple(crossings), circles=0)
