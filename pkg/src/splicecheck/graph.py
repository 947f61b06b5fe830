"""Finite directed graphs with edge multiplicities in N ∪ {ω}.

Edges are not individual objects: a graph is a vertex list plus a
multiplicity for every ordered pair of vertices. ``ω`` marks infinitely many
parallel edges and is what makes a vertex an infinite emitter.
"""

from __future__ import annotations

import enum
import json
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    GraphFormatError,
    InfiniteMultiplicityError,
    SizeBoundError,
    UnknownVertexError,
)
from .intlinalg import IntMatrix

DEFAULT_MAX_VERTICES = 16


def brute_force_bound() -> int:
    """Vertex bound for subset enumerations; ``SPLICECHECK_MAX_VERTICES`` overrides."""
    return int(os.environ.get("SPLICECHECK_MAX_VERTICES", DEFAULT_MAX_VERTICES))


class ExtendedNat:
    """A non-negative integer or ω."""

    __slots__ = ("_value",)

    def __init__(self, value=0):
        if isinstance(value, ExtendedNat):
            value = value._value
        elif value in ("inf", "ω", "omega"):
            value = None
        elif isinstance(value, bool) or not isinstance(value, int):
            raise TypeError(f"cannot make an extended natural from {value!r}")
        elif value < 0:
            raise ValueError(f"multiplicities are non-negative, got {value}")
        self._value = value

    @property
    def is_omega(self) -> bool:
        return self._value is None

    @property
    def is_finite(self) -> bool:
        return self._value is not None

    def __int__(self):
        if self._value is None:
            raise OverflowError("ω has no integer value")
        return self._value

    def __index__(self):
        return int(self)

    def __bool__(self):
        return self._value != 0

    def __add__(self, other):
        other = ExtendedNat(other)
        if self.is_omega or other.is_omega:
            return OMEGA
        return ExtendedNat(self._value + other._value)

    __radd__ = __add__

    def __mul__(self, other):
        other = ExtendedNat(other)
        if self._value == 0 or other._value == 0:
            return ExtendedNat(0)
        if self.is_omega or other.is_omega:
            return OMEGA
        return ExtendedNat(self._value * other._value)

    __rmul__ = __mul__

    def _key(self):
        return (1, 0) if self._value is None else (0, self._value)

    def __eq__(self, other):
        if isinstance(other, (int, ExtendedNat)) and not isinstance(other, bool):
            return self._key() == ExtendedNat(other)._key()
        return NotImplemented

    def __lt__(self, other):
        return self._key() < ExtendedNat(other)._key()

    def __le__(self, other):
        return self._key() <= ExtendedNat(other)._key()

    def __gt__(self, other):
        return self._key() > ExtendedNat(other)._key()

    def __ge__(self, other):
        return self._key() >= ExtendedNat(other)._key()

    def __hash__(self):
        return hash(self._value) if self._value is not None else hash("ω")

    def __repr__(self):
        return "ω" if self._value is None else str(self._value)

    def to_json(self):
        return "inf" if self._value is None else self._value


OMEGA = ExtendedNat("inf")
ZERO = ExtendedNat(0)


class VertexClass(enum.Enum):
    REGULAR = "regular"
    SINK = "sink"
    INFINITE_EMITTER = "infinite_emitter"


class ReturnPathClass(enum.Enum):
    ZERO = "zero"
    ONE = "one"
    TWO_OR_MORE = "two_or_more"


class Graph:
    """Immutable finite graph.

    ``mult`` maps ``(src, dst)`` pairs to multiplicities; missing pairs mean 0.
    Vertex order is part of the value and fixes every matrix ordering.
    """

    def __init__(self, vertices: Iterable[str], mult: Optional[Mapping] = None):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphFormatError(f"duplicate vertex ids in {self.vertices}")
        self.index = {v: i for i, v in enumerate(self.vertices)}
        entries = {}
        for (u, w), m in (mult or {}).items():
            self._check(u)
            self._check(w)
            m = ExtendedNat(m)
            if m:
                entries[(u, w)] = m
        self._mult = entries

    def _check(self, v):
        if v not in self.index:
            raise UnknownVertexError(v)

    def __contains__(self, v):
        return v in self.index

    def __len__(self):
        return len(self.vertices)

    def mult(self, u, w) -> ExtendedNat:
        self._check(u)
        self._check(w)
        return self._mult.get((u, w), ZERO)

    def edges(self):
        """Nonzero ``(src, dst, mult)`` triples in vertex order."""
        for u in self.vertices:
            for w in self.vertices:
                m = self._mult.get((u, w))
                if m:
                    yield u, w, m

    def items(self) -> dict:
        return dict(self._mult)

    def successors(self, v) -> tuple:
        self._check(v)
        return self._succ[v]

    def out_total(self, v) -> ExtendedNat:
        total = ZERO
        for w in self.successors(v):
            total = total + self._mult[(v, w)]
        return total

    @cached_property
    def _succ(self) -> dict:
        return {u: tuple(w for w in self.vertices if (u, w) in self._mult) for u in self.vertices}

    @cached_property
    def _reach(self) -> dict:
        """Vertices reachable by paths of length >= 1."""
        out = {}
        for v in self.vertices:
            seen = set()
            stack = list(self._succ[v])
            while stack:
                w = stack.pop()
                if w not in seen:
                    seen.add(w)
                    stack.extend(self._succ[w])
            out[v] = frozenset(seen)
        return out

    def reachable(self, v) -> frozenset:
        self._check(v)
        return self._reach[v]

    # -- derived graphs -----------------------------------------------------

    def with_mult(self, updates: Mapping, extra_vertices: Sequence[str] = ()) -> "Graph":
        entries = dict(self._mult)
        entries.update(updates)
        return Graph(self.vertices + tuple(extra_vertices), entries)

    def induced(self, keep: Iterable[str]) -> "Graph":
        keep = set(keep)
        verts = [v for v in self.vertices if v in keep]
        return Graph(verts, {(u, w): m for (u, w), m in self._mult.items() if u in keep and w in keep})

    def without(self, drop: Iterable[str]) -> "Graph":
        drop = set(drop)
        return self.induced(v for v in self.vertices if v not in drop)

    def reordered(self, order: Sequence[str]) -> "Graph":
        if sorted(order) != sorted(self.vertices):
            raise GraphFormatError("reordering must be a permutation of the vertices")
        return Graph(order, self._mult)

    def fresh_id(self, base: str, taken: Iterable[str] = ()) -> str:
        taken = set(taken) | set(self.vertices)
        if base not in taken:
            return base
        k = 1
        while f"{base}'{k}" in taken:
            k += 1
        return f"{base}'{k}"

    # -- value semantics ----------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.vertices == other.vertices and self._mult == other._mult

    def __hash__(self):
        return hash((self.vertices, frozenset(self._mult.items())))

    def __repr__(self):
        edges = ", ".join(f"{u}->{w}:{m!r}" for u, w, m in self.edges())
        return f"Graph({list(self.vertices)}, {{{edges}}})"

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"src": u, "dst": w, "mult": m.to_json()} for u, w, m in self.edges()],
        }

    @classmethod
    def from_json(cls, obj) -> "Graph":
        if not isinstance(obj, dict) or "vertices" not in obj:
            raise GraphFormatError("graph JSON must be an object with a 'vertices' list")
        vertices = obj["vertices"]
        if not isinstance(vertices, list) or not all(isinstance(v, str) for v in vertices):
            raise GraphFormatError("'vertices' must be a list of strings")
        mult = {}
        for e in obj.get("edges", []):
            try:
                key = (e["src"], e["dst"])
                m = e.get("mult", 1)
            except (TypeError, KeyError) as exc:
                raise GraphFormatError(f"malformed edge entry {e!r}") from exc
            if key in mult:
                raise GraphFormatError(f"duplicate edge entry {key[0]!r} -> {key[1]!r}")
            try:
                mult[key] = ExtendedNat(m)
            except (TypeError, ValueError) as exc:
                raise GraphFormatError(f"bad multiplicity {m!r} on {key}") from exc
        return cls(vertices, mult)

    @classmethod
    def load(cls, path) -> "Graph":
        with open(path) as f:
            try:
                obj = json.load(f)
            except json.JSONDecodeError as exc:
                raise GraphFormatError(f"{path}: {exc}") from exc
        return cls.from_json(obj)

    def to_dot(self, name: str = "E") -> str:
        lines = [f"digraph {json.dumps(name)} {{"]
        for v in self.vertices:
            lines.append(f"  {json.dumps(v)};")
        for u, w, m in self.edges():
            if m.is_omega:
                lines.append(f'  {json.dumps(u)} -> {json.dumps(w)} [label="ω", style=bold, color=red];')
            else:
                lines.append(f'  {json.dumps(u)} -> {json.dumps(w)} [label="{int(m)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


# -- structural queries --------------------------------------------------------


def vertex_class(g: Graph, v) -> VertexClass:
    total = g.out_total(v)
    if total.is_omega:
        return VertexClass.INFINITE_EMITTER
    if total == 0:
        return VertexClass.SINK
    return VertexClass.REGULAR


def is_regular(g: Graph, v) -> bool:
    return vertex_class(g, v) is VertexClass.REGULAR


def singular_vertices(g: Graph) -> list:
    return [v for v in g.vertices if not is_regular(g, v)]


def reaches(g: Graph, v, w) -> bool:
    """True iff there is a path of length >= 1 from ``v`` to ``w``."""
    g._check(w)
    return w in g.reachable(v)


def reaches_refl(g: Graph, v, w) -> bool:
    """Like :func:`reaches` but also true when ``v == w``."""
    return v == w or reaches(g, v, w)


def strong_component(g: Graph, v) -> frozenset:
    """The vertices ``w`` with ``v >= w >= v`` (reflexively)."""
    return frozenset(w for w in g.vertices if reaches_refl(g, v, w) and reaches_refl(g, w, v))


def return_path_class(g: Graph, v) -> ReturnPathClass:
    """How many return paths are based at ``v``, capped at two.

    One return path exactly when the strong component of ``v`` is a bare
    cycle: each member has a single internal out-edge of multiplicity 1.
    """
    if not reaches(g, v, v):
        return ReturnPathClass.ZERO
    comp = strong_component(g, v)
    for u in comp:
        inside = [g.mult(u, w) for w in g.successors(u) if w in comp]
        if len(inside) != 1 or inside[0] != 1:
            return ReturnPathClass.TWO_OR_MORE
    return ReturnPathClass.ONE


def condition_k(g: Graph) -> bool:
    return all(return_path_class(g, v) is not ReturnPathClass.ONE for v in g.vertices)


def breaking_vertices(g: Graph) -> frozenset:
    out = set()
    for v in g.vertices:
        if vertex_class(g, v) is not VertexClass.INFINITE_EMITTER:
            continue
        back = ZERO
        for w in g.successors(v):
            if reaches_refl(g, w, v):
                back = back + g.mult(v, w)
        if back.is_finite and back != 0:
            out.add(v)
    return frozenset(out)


def _check_bound(g: Graph, what: str):
    bound = brute_force_bound()
    if len(g) > bound:
        raise SizeBoundError(f"{what}: {len(g)} vertices exceeds brute-force bound {bound}")


def _masks(g: Graph):
    """Bitmask tables: reflexive reach, strict ancestors, successors."""
    idx = g.index
    reach_refl = []
    ancestors = [0] * len(g)
    succ = []
    for v in g.vertices:
        m = 1 << idx[v]
        for w in g.reachable(v):
            m |= 1 << idx[w]
            ancestors[idx[w]] |= 1 << idx[v]
        reach_refl.append(m)
        s = 0
        for w in g.successors(v):
            s |= 1 << idx[w]
        succ.append(s)
    return reach_refl, ancestors, succ


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _subset_key(g: Graph, subset) -> tuple:
    ids = sorted(g.index[v] for v in subset)
    return (len(ids), ids)


def maximal_tails(g: Graph) -> list:
    """All maximal tails, by brute force over vertex subsets."""
    _check_bound(g, "maximal_tails")
    n = len(g)
    reach_refl, ancestors, succ = _masks(g)
    regular = [is_regular(g, v) for v in g.vertices]
    tails = []
    for M in range(1, 1 << n):
        members = list(_bits(M))
        if any(ancestors[w] & ~M for w in members):
            continue
        if any(regular[v] and not succ[v] & M for v in members):
            continue
        if any(
            not (reach_refl[v] & reach_refl[w] & M)
            for i, v in enumerate(members)
            for w in members[i + 1:]
        ):
            continue
        tails.append(frozenset(g.vertices[i] for i in members))
    tails.sort(key=lambda t: _subset_key(g, t))
    return tails


@dataclass(frozen=True)
class PureInfinitenessReport:
    condition_k: bool
    no_breaking_vertices: bool
    tails_connect_to_cycles: bool
    breaking: frozenset = field(default_factory=frozenset)
    bad_tails: tuple = ()

    @property
    def verdict(self) -> bool:
        return self.condition_k and self.no_breaking_vertices and self.tails_connect_to_cycles

    def failed_criteria(self) -> list:
        names = []
        if not self.condition_k:
            names.append("condition_k")
        if not self.no_breaking_vertices:
            names.append("no_breaking_vertices")
        if not self.tails_connect_to_cycles:
            names.append("tails_connect_to_cycles")
        return names

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "condition_k": self.condition_k,
            "no_breaking_vertices": self.no_breaking_vertices,
            "tails_connect_to_cycles": self.tails_connect_to_cycles,
            "breaking_vertices": sorted(self.breaking),
            "tails_without_cycles": [sorted(t) for t in self.bad_tails],
            "failed": self.failed_criteria(),
        }


def purely_infinite_report(g: Graph) -> PureInfinitenessReport:
    tails = maximal_tails(g)
    on_cycle = {v for v in g.vertices if reaches(g, v, v)}
    bad = []
    for M in tails:
        cyc = on_cycle & M
        # a cycle through y in M lies inside M because tails are closed upward
        if not all(any(reaches_refl(g, w, y) for y in cyc) for w in M):
            bad.append(M)
    breaking = breaking_vertices(g)
    return PureInfinitenessReport(
        condition_k=condition_k(g),
        no_breaking_vertices=not breaking,
        tails_connect_to_cycles=not bad,
        breaking=breaking,
        bad_tails=tuple(bad),
    )


def adjacency_matrix(g: Graph, rows: Optional[Sequence] = None, cols: Optional[Sequence] = None) -> IntMatrix:
    rows = g.vertices if rows is None else rows
    cols = g.vertices if cols is None else cols
    data = []
    for u in rows:
        r = []
        for w in cols:
            m = g.mult(u, w)
            if m.is_omega:
                raise InfiniteMultiplicityError(u, w)
            r.append(int(m))
        data.append(r)
    return IntMatrix(data, len(rows), len(cols))
