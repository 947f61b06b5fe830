"""Hereditary saturated sets, admissible pairs and the primitive ideal space.

Vertex subsets are handled as bitmasks (bit ``i`` = ``g.vertices[i]``)
internally and exposed as frozensets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

from .errors import InconsistencyError, PreconditionError, SizeBoundError, StructureError
from .graph import (
    Graph,
    ZERO,
    VertexClass,
    brute_force_bound,
    condition_k,
    is_regular,
    vertex_class,
)
from .moves import SpliceResult, cuntz_splice

MAX_PAIRS = 1 << 16


# -- hereditary and saturated sets ---------------------------------------------


def _tables(g: Graph):
    idx = g.index
    reach = []
    succ = []
    for v in g.vertices:
        r = 0
        for w in g.reachable(v):
            r |= 1 << idx[w]
        reach.append(r)
        s = 0
        for w in g.successors(v):
            s |= 1 << idx[w]
        succ.append(s)
    regular = [is_regular(g, v) for v in g.vertices]
    return reach, succ, regular


def _to_mask(g: Graph, S: Iterable) -> int:
    m = 0
    for v in S:
        g._check(v)
        m |= 1 << g.index[v]
    return m


def _to_set(g: Graph, mask: int) -> frozenset:
    return frozenset(v for i, v in enumerate(g.vertices) if mask >> i & 1)


def _is_hereditary(mask, reach):
    i = 0
    m = mask
    while m:
        if m & 1 and reach[i] & ~mask:
            return False
        m >>= 1
        i += 1
    return True


def _is_saturated(mask, succ, regular):
    # a regular vertex outside the set must send some edge outside it
    return all(
        not regular[i] or mask >> i & 1 or succ[i] & ~mask for i in range(len(succ))
    )


def is_hereditary(g: Graph, S: Iterable) -> bool:
    reach, _, _ = _tables(g)
    return _is_hereditary(_to_mask(g, S), reach)


def is_saturated(g: Graph, S: Iterable) -> bool:
    _, succ, regular = _tables(g)
    return _is_saturated(_to_mask(g, S), succ, regular)


def hs_closure(g: Graph, S: Iterable) -> frozenset:
    """Smallest hereditary and saturated superset of ``S``."""
    reach, succ, regular = _tables(g)
    mask = _to_mask(g, S)
    while True:
        before = mask
        for i in range(len(reach)):
            if mask >> i & 1:
                mask |= reach[i]
        for i in range(len(succ)):
            if regular[i] and not succ[i] & ~mask:
                mask |= 1 << i
        if mask == before:
            return _to_set(g, mask)


def _check_bound(g: Graph, what: str):
    bound = brute_force_bound()
    if len(g) > bound:
        raise SizeBoundError(f"{what}: {len(g)} vertices exceeds brute-force bound {bound}")


def _hs_masks(g: Graph) -> list:
    reach, succ, regular = _tables(g)
    found = [
        m
        for m in range(1 << len(g))
        if _is_hereditary(m, reach) and _is_saturated(m, succ, regular)
    ]
    found.sort(key=lambda m: (bin(m).count("1"), [i for i in range(len(g)) if m >> i & 1]))
    return found


def enumerate_hs(g: Graph) -> list:
    """All hereditary saturated subsets, ordered by size then vertex order."""
    _check_bound(g, "enumerate_hs")
    return [_to_set(g, m) for m in _hs_masks(g)]


def h_infinity_fin(g: Graph, H: Iterable) -> frozenset:
    """Infinite emitters outside ``H`` sending finitely many (but some) edges outside ``H``."""
    H = frozenset(H)
    reach, succ, regular = _tables(g)
    mask = _to_mask(g, H)
    if not (_is_hereditary(mask, reach) and _is_saturated(mask, succ, regular)):
        raise PreconditionError(f"{sorted(H)} is not hereditary and saturated", criterion="hereditary_saturated")
    out = set()
    for v in g.vertices:
        if v in H or vertex_class(g, v) is not VertexClass.INFINITE_EMITTER:
            continue
        total = ZERO
        for w in g.successors(v):
            if w not in H:
                total = total + g.mult(v, w)
        if total.is_finite and total != 0:
            out.add(v)
    return frozenset(out)


# -- admissible pairs ------------------------------------------------------------


@dataclass(frozen=True)
class AdmissiblePair:
    H: frozenset
    B: frozenset = frozenset()

    def __le__(self, other: "AdmissiblePair") -> bool:
        return self.H <= other.H and self.B <= (other.H | other.B)

    def to_json(self) -> dict:
        return {"H": sorted(self.H), "B": sorted(self.B)}

    def label(self) -> str:
        h = ",".join(sorted(self.H)) or "∅"
        if self.B:
            return f"({{{h}}}, {{{','.join(sorted(self.B))}}})"
        return f"{{{h}}}"


class IdealLattice:
    """Admissible pairs of a graph ordered by ``H ⊆ H'`` and ``B ⊆ H' ∪ B'``."""

    def __init__(self, graph: Graph, pairs: Sequence[AdmissiblePair]):
        self.graph = graph
        self.pairs = tuple(pairs)
        self._index = {p: i for i, p in enumerate(self.pairs)}
        n = len(self.pairs)
        self.leq = tuple(tuple(p <= q for q in self.pairs) for p in self.pairs)
        # up[i]: bitmask of j with pairs[i] <= pairs[j]
        self.up = [sum(1 << j for j in range(n) if self.leq[i][j]) for i in range(n)]
        self.down = [sum(1 << j for j in range(n) if self.leq[j][i]) for i in range(n)]
        self._by_up = {m: i for i, m in enumerate(self.up)}

    def __len__(self):
        return len(self.pairs)

    def index(self, p: AdmissiblePair) -> int:
        return self._index[p]

    def le(self, p: AdmissiblePair, q: AdmissiblePair) -> bool:
        return self.leq[self._index[p]][self._index[q]]

    def bottom(self) -> AdmissiblePair:
        return self._extreme(self.up, "bottom")

    def top(self) -> AdmissiblePair:
        return self._extreme(self.down, "top")

    def _extreme(self, masks, what):
        full = (1 << len(self.pairs)) - 1
        for i, m in enumerate(masks):
            if m == full:
                return self.pairs[i]
        raise StructureError(f"ideal lattice has no {what}")

    def join_index(self, i: int, j: int) -> int:
        k = self._by_up.get(self.up[i] & self.up[j])
        if k is not None:
            return k
        raise StructureError(f"{self.pairs[i].label()} and {self.pairs[j].label()} have no join")

    def join(self, p: AdmissiblePair, q: AdmissiblePair) -> AdmissiblePair:
        return self.pairs[self.join_index(self._index[p], self._index[q])]

    def lower_covers(self, i: int) -> list:
        below = self.down[i] & ~(1 << i)
        return [j for j in _bit_indices(below) if not any(
            k != j and self.down[k] >> j & 1 for k in _bit_indices(below)
        )]

    def hasse_edges(self) -> list:
        return [(j, i) for i in range(len(self.pairs)) for j in self.lower_covers(i)]

    def join_irreducibles(self) -> list:
        return [i for i in range(len(self.pairs)) if len(self.lower_covers(i)) == 1]

    def to_json(self) -> dict:
        return {
            "pairs": [p.to_json() for p in self.pairs],
            "order": [[i, j] for i in range(len(self)) for j in range(len(self)) if i != j and self.leq[i][j]],
            "hasse": [list(e) for e in self.hasse_edges()],
        }

    def to_dot(self, name: str = "ideals") -> str:
        lines = [f"digraph {json.dumps(name)} {{", "  rankdir=BT;"]
        for i, p in enumerate(self.pairs):
            lines.append(f"  p{i} [label={json.dumps(p.label())}];")
        for j, i in self.hasse_edges():
            lines.append(f"  p{j} -> p{i};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _bit_indices(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def ideal_lattice(g: Graph) -> IdealLattice:
    if not condition_k(g):
        raise PreconditionError(
            "admissible pairs parametrize ideals only under Condition (K)", criterion="condition_k"
        )
    _check_bound(g, "ideal_lattice")
    pairs = []
    for H in enumerate_hs(g):
        extra = sorted(h_infinity_fin(g, H), key=g.index.get)
        for r in range(len(extra) + 1):
            for B in combinations(extra, r):
                pairs.append(AdmissiblePair(H, frozenset(B)))
                if len(pairs) > MAX_PAIRS:
                    raise SizeBoundError(f"more than {MAX_PAIRS} admissible pairs")
    return IdealLattice(g, pairs)


def lift_pair(p: AdmissiblePair, splice: SpliceResult) -> AdmissiblePair:
    if splice.v in p.H:
        return AdmissiblePair(p.H | {splice.u1, splice.u2}, p.B)
    return p


def splice_lattice_map(g: Graph, v, splice: Optional[SpliceResult] = None) -> dict:
    """The order isomorphism of admissible pairs induced by splicing at ``v``.

    Raises :class:`InconsistencyError` if the map fails to be a bijection
    that preserves and reflects the order.
    """
    splice = splice or cuntz_splice(g, v)
    src = ideal_lattice(g)
    tgt = ideal_lattice(splice.graph)
    mapping = {p: lift_pair(p, splice) for p in src.pairs}
    _check_order_iso(src, tgt, mapping)
    return mapping


def _check_order_iso(src: IdealLattice, tgt: IdealLattice, mapping: Mapping):
    image = set(mapping.values())
    if len(image) != len(src) or image != set(tgt.pairs):
        raise InconsistencyError("splice map is not a bijection of admissible pairs")
    for p in src.pairs:
        for q in src.pairs:
            if src.le(p, q) != tgt.le(mapping[p], mapping[q]):
                raise InconsistencyError(
                    f"splice map does not preserve the order between {p.label()} and {q.label()}"
                )


# -- primitive ideal space ---------------------------------------------------------


class PrimSpace:
    """A finite T0 space given by its points and specialization order.

    Point ``x`` stands for the ideal ``pair_of[x]``, the smallest open set
    containing it; ``x >= y`` iff ``pair_of[x] <= pair_of[y]``.
    """

    def __init__(self, points: Sequence, pair_of: Mapping, graph: Optional[Graph] = None):
        self.points = tuple(points)
        self.pair_of = dict(pair_of)
        self.h_of = {x: self.pair_of[x].H for x in self.points}
        self.graph = graph
        self._geq = {
            (x, y): self.pair_of[x] <= self.pair_of[y] for x in self.points for y in self.points
        }

    def geq(self, x, y) -> bool:
        return self._geq[(x, y)]

    def __len__(self):
        return len(self.points)

    def comparable_pairs(self) -> list:
        """All ``(x, y)`` with ``x >= y`` and ``x != y``."""
        return [(x, y) for x in self.points for y in self.points if x != y and self.geq(x, y)]

    def top_points(self) -> list:
        """Points whose open neighbourhood is largest, i.e. minimal in ``>=``."""
        return [x for x in self.points if not any(y != x and self.geq(x, y) for y in self.points)]

    def transport(self, mapping: Mapping) -> "PrimSpace":
        """Relabel: point ``x`` of the new space carries the data of ``mapping[x]``."""
        return PrimSpace(list(mapping), {x: self.pair_of[mapping[x]] for x in mapping}, self.graph)

    def to_json(self) -> dict:
        return {
            "points": [
                {"id": x, "H": sorted(self.h_of[x]), "pair": self.pair_of[x].to_json()}
                for x in self.points
            ],
            "geq": [[x, y] for x, y in self.comparable_pairs()],
        }

    def to_dot(self, name: str = "prim") -> str:
        lines = [f"digraph {json.dumps(name)} {{"]
        for x in self.points:
            lines.append(f"  {json.dumps(str(x))} [label={json.dumps(f'{x}: ' + self.pair_of[x].label())}];")
        pairs = self.comparable_pairs()
        for x, y in pairs:
            covered = any(z not in (x, y) and self.geq(x, z) and self.geq(z, y) for z in self.points)
            if not covered:
                lines.append(f"  {json.dumps(str(x))} -> {json.dumps(str(y))};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _check_distributive(lat: IdealLattice, ji: Sequence[int]):
    n = len(lat)
    ji_mask = sum(1 << j for j in ji)
    below = [lat.down[i] & ji_mask for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            k = lat.join_index(i, j)
            if below[k] != below[i] | below[j]:
                raise StructureError(
                    "ideal lattice is not distributive; refusing to build a primitive ideal space"
                )


def prim_space(lat: IdealLattice) -> PrimSpace:
    """Points are the join-irreducible admissible pairs."""
    lat.bottom()
    lat.top()
    ji = lat.join_irreducibles()
    _check_distributive(lat, ji)
    points = [f"x{k}" for k in range(len(ji))]
    return PrimSpace(points, {x: lat.pairs[i] for x, i in zip(points, ji)}, lat.graph)


@dataclass
class PrimHomeo:
    """Point bijection between the primitive ideal spaces of a graph and its splice."""

    splice: SpliceResult
    source: PrimSpace
    target: PrimSpace
    mapping: dict

    def to_json(self) -> dict:
        return {
            "mapping": self.mapping,
            "source": self.source.to_json(),
            "target": self.target.to_json(),
        }


def prim_homeo_under_splice(g: Graph, v, splice: Optional[SpliceResult] = None) -> PrimHomeo:
    splice = splice or cuntz_splice(g, v)
    lat = ideal_lattice(g)
    lat_c = ideal_lattice(splice.graph)
    pair_map = {p: lift_pair(p, splice) for p in lat.pairs}
    _check_order_iso(lat, lat_c, pair_map)
    X = prim_space(lat)
    XC = prim_space(lat_c)
    point_of = {XC.pair_of[y]: y for y in XC.points}
    mapping = {}
    for x in X.points:
        image = pair_map[X.pair_of[x]]
        if image not in point_of:
            raise InconsistencyError(f"image of point {x} is not join-irreducible")
        mapping[x] = point_of[image]
    if len(set(mapping.values())) != len(XC):
        raise InconsistencyError("splice does not induce a bijection of primitive ideals")
    for x in X.points:
        for y in X.points:
            if X.geq(x, y) != XC.geq(mapping[x], mapping[y]):
                raise InconsistencyError("splice does not preserve the specialization order")
        grow = {splice.u1, splice.u2} if v in X.h_of[x] else set()
        if XC.h_of[mapping[x]] != X.h_of[x] | grow:
            raise InconsistencyError(f"H of point {x} does not transform as expected")
    return PrimHomeo(splice, X, XC, mapping)
