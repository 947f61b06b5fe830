"""Graph moves: Cuntz splice, truncated desingularization, contraction.

Desingularization of a graph with singular vertices produces an infinite
graph. Here it is cut off after ``depth`` tail vertices; the last tail
vertex of each tail is a *frontier* vertex with no outgoing edges. Truncated
graphs are only compared structurally and never fed to K-theory.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Mapping, Optional

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher

from .errors import GraphFormatError, PreconditionError, SizeBoundError
from .graph import (
    ExtendedNat,
    Graph,
    ReturnPathClass,
    VertexClass,
    return_path_class,
    vertex_class,
)

DEFAULT_MAX_ISO_VERTICES = 24


@dataclass(frozen=True)
class SpliceResult:
    graph: Graph
    v: str
    u1: str
    u2: str
    original: Graph = field(repr=False)

    def to_json(self) -> dict:
        return {"graph": self.graph.to_json(), "v": self.v, "u1": self.u1, "u2": self.u2}


def cuntz_splice(g: Graph, v) -> SpliceResult:
    """Attach the two-vertex segment ``v ⇄ u1 ⇄ u2`` (loops at u1, u2) at ``v``."""
    cls = return_path_class(g, v)
    if cls is not ReturnPathClass.TWO_OR_MORE:
        raise PreconditionError(
            f"Cuntz splice at {v!r} needs at least two return paths; vertex has class {cls.value}",
            criterion="return_path_class",
        )
    return _attach_segment(g, v)


def _attach_segment(g: Graph, v) -> SpliceResult:
    u1 = g.fresh_id("u1")
    u2 = g.fresh_id("u2", taken=[u1])
    added = {
        (v, u1): 1,
        (u1, v): 1,
        (u1, u1): 1,
        (u1, u2): 1,
        (u2, u1): 1,
        (u2, u2): 1,
    }
    return SpliceResult(g.with_mult(added, extra_vertices=(u1, u2)), v, u1, u2, g)


# -- desingularization -----------------------------------------------------------


@dataclass(frozen=True)
class EdgeEnumeration:
    """An eventually periodic listing of the edges an infinite emitter sends out.

    ``pattern[:period_start]`` is listed once, then ``pattern[period_start:]``
    repeats forever. Entries are target vertices.
    """

    vertex: str
    pattern: tuple
    period_start: int = 0

    def __post_init__(self):
        object.__setattr__(self, "pattern", tuple(self.pattern))
        if not 0 <= self.period_start < len(self.pattern):
            raise GraphFormatError(
                f"enumeration for {self.vertex!r}: period_start must index a non-empty periodic part"
            )

    def target(self, i: int):
        p = self.period_start
        if i < p:
            return self.pattern[i]
        return self.pattern[p + (i - p) % (len(self.pattern) - p)]

    def validate(self, g: Graph):
        v = self.vertex
        prefix = self.pattern[: self.period_start]
        periodic = set(self.pattern[self.period_start:])
        listed = set(self.pattern)
        for w in listed:
            g._check(w)
        for w in g.vertices:
            m = g.mult(v, w)
            if w in periodic:
                if not m.is_omega:
                    raise GraphFormatError(
                        f"enumeration for {v!r} repeats {w!r} forever but only {m!r} edges go there"
                    )
            elif prefix.count(w) != m:
                raise GraphFormatError(
                    f"enumeration for {v!r} lists {prefix.count(w)} edges to {w!r}, graph has {m!r}"
                )

    def shifted(self, first) -> "EdgeEnumeration":
        """The enumeration ``(first, e1, e2, ...)``."""
        return EdgeEnumeration(self.vertex, (first,) + self.pattern, self.period_start + 1)

    def to_json(self) -> dict:
        return {"vertex": self.vertex, "pattern": list(self.pattern), "period_start": self.period_start}

    @classmethod
    def from_json(cls, obj) -> "EdgeEnumeration":
        try:
            return cls(obj["vertex"], tuple(obj["pattern"]), int(obj.get("period_start", 0)))
        except (KeyError, TypeError) as exc:
            raise GraphFormatError(f"malformed enumeration {obj!r}") from exc


def default_enumeration(g: Graph, v) -> EdgeEnumeration:
    """Finite targets first (each as often as its multiplicity), then cycle the ω targets."""
    prefix, periodic = [], []
    for w in g.successors(v):
        m = g.mult(v, w)
        if m.is_omega:
            periodic.append(w)
        else:
            prefix.extend([w] * int(m))
    if not periodic:
        raise PreconditionError(f"{v!r} is not an infinite emitter", criterion="infinite_emitter")
    return EdgeEnumeration(v, tuple(prefix + periodic), len(prefix))


@dataclass(frozen=True)
class TruncatedDesing:
    graph: Graph
    frontier: frozenset
    depth: int
    tail_map: Mapping

    def to_json(self) -> dict:
        return {
            "graph": self.graph.to_json(),
            "frontier": sorted(self.frontier),
            "depth": self.depth,
            "tail_map": {k: list(t) for k, t in self.tail_map.items()},
        }


def desingularize_truncated(
    g: Graph,
    order: Optional[Mapping[str, EdgeEnumeration]] = None,
    depth: int = 3,
    *,
    depths: Optional[Mapping[str, int]] = None,
) -> TruncatedDesing:
    """Add a tail of ``depth`` vertices to every sink and infinite emitter.

    ``order`` gives the edge enumeration of each infinite emitter; emitters
    missing from it use :func:`default_enumeration`. ``depths`` overrides the
    tail length per vertex.
    """
    if depth < 1:
        raise PreconditionError(f"depth must be >= 1, got {depth}", criterion="depth")
    order = dict(order or {})
    depths = dict(depths or {})
    for v, e in order.items():
        if e.vertex != v:
            raise GraphFormatError(f"enumeration keyed by {v!r} describes {e.vertex!r}")
        if vertex_class(g, v) is not VertexClass.INFINITE_EMITTER:
            raise GraphFormatError(f"enumeration given for {v!r}, which is not an infinite emitter")
        e.validate(g)

    entries = g.items()
    new_vertices = []
    tail_map = {}
    frontier = set()
    taken = set(g.vertices)
    for v in g.vertices:
        cls = vertex_class(g, v)
        if cls is VertexClass.REGULAR:
            continue
        d = depths.get(v, depth)
        if d < 1:
            raise PreconditionError(f"depth for {v!r} must be >= 1", criterion="depth")
        tail = []
        for i in range(1, d + 1):
            t = g.fresh_id(f"{v}_{i}", taken)
            taken.add(t)
            tail.append(t)
        new_vertices.extend(tail)
        tail_map[v] = tuple(tail)
        frontier.add(tail[-1])
        chain = [v] + tail
        for a, b in zip(chain, chain[1:]):
            entries[(a, b)] = ExtendedNat(1)
        if cls is VertexClass.INFINITE_EMITTER:
            e = order.get(v) or default_enumeration(g, v)
            for w in g.successors(v):
                del entries[(v, w)]
            # chain[i] emits the (i+1)-th listed edge; the frontier emits nothing
            for i, src in enumerate(chain[:-1]):
                dst = e.target(i)
                entries[(src, dst)] = entries.get((src, dst), ExtendedNat(0)) + 1
    return TruncatedDesing(
        graph=Graph(g.vertices + tuple(new_vertices), entries),
        frontier=frozenset(frontier),
        depth=depth,
        tail_map=tail_map,
    )


# -- contraction and isomorphism -------------------------------------------------


def contract_vertex(g: Graph, w) -> Graph:
    """Remove a loop-free regular vertex, rerouting every path through it.

    ``mult(u, x) += mult(u, w) * mult(w, x)`` for all remaining ``u, x``.
    """
    if vertex_class(g, w) is not VertexClass.REGULAR:
        raise PreconditionError(f"cannot contract {w!r}: not a regular vertex", criterion="regular")
    if g.mult(w, w):
        raise PreconditionError(f"cannot contract {w!r}: it has a loop", criterion="no_loop")
    rest = [u for u in g.vertices if u != w]
    entries = {}
    for u in rest:
        for x in rest:
            m = g.mult(u, x) + g.mult(u, w) * g.mult(w, x)
            if m:
                entries[(u, x)] = m
    return Graph(rest, entries)


def iso_bound() -> int:
    return int(os.environ.get("SPLICECHECK_MAX_ISO_VERTICES", DEFAULT_MAX_ISO_VERTICES))


def _to_nx(g: Graph) -> nx.DiGraph:
    G = nx.DiGraph()
    for v in g.vertices:
        G.add_node(v, loop=g.mult(v, v).to_json())
    for u, w, m in g.edges():
        if u != w:
            G.add_edge(u, w, mult=m.to_json())
    return G


def _mult_profile(g: Graph):
    return sorted((str(m) for _, _, m in g.edges()))


def graphs_isomorphic(g1: Graph, g2: Graph) -> Optional[dict]:
    """A multiplicity-preserving vertex bijection ``g1 -> g2``, or ``None``."""
    bound = iso_bound()
    if max(len(g1), len(g2)) > bound:
        raise SizeBoundError(f"graphs_isomorphic: more than {bound} vertices")
    if len(g1) != len(g2) or _mult_profile(g1) != _mult_profile(g2):
        return None
    matcher = DiGraphMatcher(
        _to_nx(g1),
        _to_nx(g2),
        node_match=lambda a, b: a["loop"] == b["loop"],
        edge_match=lambda a, b: a["mult"] == b["mult"],
    )
    for mapping in matcher.isomorphisms_iter():
        if all(g1.mult(u, w) == g2.mult(mapping[u], mapping[w]) for u in g1.vertices for w in g1.vertices):
            return {u: mapping[u] for u in g1.vertices}
    return None


# -- commutation of desingularization with the splice -----------------------------


@dataclass
class CommuteReport:
    v: str
    depth: int
    commutes: bool
    v_two_return_paths: bool
    return_path_depth: int
    contracted: Optional[str]
    splice_then_desing: Graph
    desing_then_splice: Graph
    mapping: Optional[dict]

    @property
    def verdict(self) -> bool:
        return self.commutes and self.v_two_return_paths

    def to_json(self, verbose: bool = False) -> dict:
        out = {
            "verdict": self.verdict,
            "v": self.v,
            "depth": self.depth,
            "commutes": self.commutes,
            "v_two_return_paths": self.v_two_return_paths,
            "return_path_depth": self.return_path_depth,
            "contracted": self.contracted,
            "mapping": self.mapping,
        }
        if verbose:
            out["desing_then_splice"] = self.desing_then_splice.to_json()
            out["splice_then_desing"] = self.splice_then_desing.to_json()
        return out


def verify_desing_splice_commutes(
    g: Graph,
    v,
    order: Optional[Mapping[str, EdgeEnumeration]] = None,
    depth: int = 4,
) -> CommuteReport:
    """Compare splice-after-desingularization with desingularization-after-splice.

    When ``v`` is an infinite emitter the spliced graph enumerates ``v``'s
    edges as ``(f1, e1, e2, ...)`` with ``f1`` the new edge into ``u1``; its
    tail at ``v`` is built one vertex longer and then the first tail vertex is
    contracted, which lines the two tails up. Frontier vertices are stripped
    on both sides before testing isomorphism. The return paths of ``v`` are
    counted on a truncation deep enough to show two periods of its
    enumeration, since a shallow cut can hide them.
    """
    if depth < 3:
        raise PreconditionError(f"depth must be >= 3 to compare truncations, got {depth}", criterion="depth")
    spliced = cuntz_splice(g, v)
    order = dict(order or {})

    F = desingularize_truncated(g, order, depth)
    FC = _attach_segment(F.graph, v)

    contracted = None
    check_depth = depth
    if vertex_class(g, v) is VertexClass.INFINITE_EMITTER:
        enum_v = order.get(v) or default_enumeration(g, v)
        # two full periods of the tail are enough to exhibit two return paths
        # through it whenever the untruncated desingularization has them
        period = len(enum_v.pattern) - enum_v.period_start
        check_depth = max(depth, enum_v.period_start + 2 * period + 1)
        order_c = dict(order)
        order_c[v] = enum_v.shifted(spliced.u1)
        D = desingularize_truncated(spliced.graph, order_c, depth, depths={v: depth + 1})
        contracted = D.tail_map[v][0]
        lower = contract_vertex(D.graph, contracted)
    else:
        D = desingularize_truncated(spliced.graph, order, depth)
        lower = D.graph
    lower = lower.without(D.frontier)

    deep = F if check_depth == depth else desingularize_truncated(g, order, check_depth)
    two_paths = return_path_class(deep.graph, v) is ReturnPathClass.TWO_OR_MORE

    upper = FC.graph.without(F.frontier)
    mapping = graphs_isomorphic(upper, lower)
    return CommuteReport(
        v=v,
        depth=depth,
        commutes=mapping is not None,
        v_two_return_paths=two_paths,
        return_path_depth=check_depth,
        contracted=contracted,
        splice_then_desing=lower,
        desing_then_splice=upper,
        mapping=mapping,
    )

