"""K-theory of graph algebras and the filtered invariant over the primitive ideal space.

For a graph with all vertices regular, K0 and K1 are the cokernel and the
kernel of ``(A - 1)^t`` acting on the free abelian group on the vertices.
Over a point ``x`` of the primitive ideal space the same recipe is applied to
the restriction of ``A`` to ``H_x``; for ``x >= y`` the transition is induced
by the coordinate inclusion ``Z^{H_x} -> Z^{H_y}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import InconsistencyError, ScopeError
from .graph import Graph, adjacency_matrix, is_regular, singular_vertices
from .ideals import PrimSpace
from .intlinalg import (
    FgAbelianGroup,
    IntMatrix,
    cokernel_group,
    coker_map_injective,
    in_column_span,
    induced_coker_matrix,
    kernel_basis,
    solve,
)


@dataclass(frozen=True)
class GradedGroup:
    """``K0 = Z^basis / im relations`` and ``K1 = ker relations`` with explicit bases."""

    k0: FgAbelianGroup
    k1: FgAbelianGroup
    relations: IntMatrix
    kernel: IntMatrix
    basis: tuple = ()
    unfiltered_formula: bool = False

    @classmethod
    def of(cls, relations: IntMatrix, basis: Sequence = (), unfiltered_formula: bool = False):
        kernel = kernel_basis(relations)
        return cls(
            k0=cokernel_group(relations),
            k1=FgAbelianGroup(kernel.cols),
            relations=relations,
            kernel=kernel,
            basis=tuple(basis),
            unfiltered_formula=unfiltered_formula,
        )

    def to_json(self, verbose: bool = False) -> dict:
        out = {"K0": self.k0.to_json(), "K1": self.k1.to_json()}
        if self.unfiltered_formula:
            out["note"] = "unfiltered formula"
        if verbose:
            out["basis"] = list(self.basis)
            out["relations"] = self.relations.to_json()
            out["kernel"] = self.kernel.to_json()
        return out

    def __str__(self):
        return f"K₀ = {self.k0}, K₁ = {self.k1}"


def k_matrix(g: Graph) -> IntMatrix:
    """``(A - 1)^t`` with rows for all vertices and columns for the regular ones."""
    regular = [v for v in g.vertices if is_regular(g, v)]
    A = adjacency_matrix(g, regular, g.vertices)
    rows = []
    for i, w in enumerate(g.vertices):
        rows.append([A[j, i] - (u == w) for j, u in enumerate(regular)])
    return IntMatrix(rows, len(g), len(regular))


def k_theory(g: Graph) -> GradedGroup:
    return GradedGroup.of(k_matrix(g), g.vertices, unfiltered_formula=bool(singular_vertices(g)))


def ordered_subset(g: Graph, H, lead: Sequence = ()) -> tuple:
    """``H`` in graph order, except that members of ``lead`` come first in the given order."""
    head = tuple(u for u in lead if u in H)
    return head + tuple(u for u in g.vertices if u in H and u not in head)


def restricted_k_matrix(g: Graph, enum: Sequence) -> IntMatrix:
    """``(A_H - 1)^t`` for the vertex list ``enum``."""
    A = adjacency_matrix(g, enum, enum)
    n = len(enum)
    return IntMatrix([[A[j, i] - (i == j) for j in range(n)] for i in range(n)], n, n)


def inclusion_matrix(src: Sequence, tgt: Sequence) -> IntMatrix:
    """0/1 matrix of the coordinate inclusion ``Z^src -> Z^tgt``."""
    pos = {u: i for i, u in enumerate(tgt)}
    missing = [u for u in src if u not in pos]
    if missing:
        raise InconsistencyError(f"inclusion: {missing} not in target basis")
    M = [[0] * len(src) for _ in tgt]
    for j, u in enumerate(src):
        M[pos[u]][j] = 1
    return IntMatrix(M, len(tgt), len(src))


@dataclass
class XKModule:
    """The diagram ``x -> K_*(ideal at x)`` over a primitive ideal space."""

    space: PrimSpace
    enum_of: dict
    at: dict
    trans: dict = field(default_factory=dict)

    def k0_map(self, x, y) -> IntMatrix:
        return self.trans[(x, y)][0]

    def k1_map(self, x, y) -> IntMatrix:
        return self.trans[(x, y)][1]

    def k0_induced(self, x, y) -> IntMatrix:
        """The K0 transition in the canonical coordinates of both groups."""
        return induced_coker_matrix(self.k0_map(x, y), self.at[x].relations, self.at[y].relations)

    def k0_injective(self, x, y) -> bool:
        return coker_map_injective(self.k0_map(x, y), self.at[x].relations, self.at[y].relations)

    def check_functoriality(self) -> bool:
        pts = self.space.points
        for x in pts:
            for y in pts:
                for z in pts:
                    if len({x, y, z}) < 3:
                        continue
                    if not (self.space.geq(x, y) and self.space.geq(y, z)):
                        continue
                    q0 = self.k0_map(x, z) - self.k0_map(y, z) @ self.k0_map(x, y)
                    if not in_column_span(self.at[z].relations, q0):
                        return False
                    if self.k1_map(x, z) != self.k1_map(y, z) @ self.k1_map(x, y):
                        return False
        return True

    def to_json(self, verbose: bool = False) -> dict:
        out = {
            "points": {
                x: dict(H=list(self.enum_of[x]), **self.at[x].to_json(verbose)) for x in self.space.points
            },
            "transitions": [],
        }
        for (x, y), (q0, q1) in self.trans.items():
            entry = {"from": x, "to": y, "K0_induced": self.k0_induced(x, y).to_json()}
            if verbose:
                entry["K0"] = q0.to_json()
                entry["K1"] = q1.to_json()
            out["transitions"].append(entry)
        return out

    def table(self) -> str:
        rows = [("point", "H_x", "K0", "K1")]
        for x in self.space.points:
            rows.append((str(x), "{" + ",".join(self.enum_of[x]) + "}", str(self.at[x].k0), str(self.at[x].k1)))
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
        for (x, y) in self.trans:
            lines.append(f"{x} -> {y}: K0 map {self.k0_induced(x, y).to_list()}")
        return "\n".join(lines)


def _require_regular(g: Graph):
    bad = singular_vertices(g)
    if bad:
        raise ScopeError(
            f"filtered invariants need every vertex regular; singular: {bad} "
            "(desingularize first; that route is structural only)",
            criterion="all_regular",
        )


def filtered_xk(g: Graph, X: PrimSpace, v_first: Optional[str] = None, lead: Sequence = ()) -> XKModule:
    _require_regular(g)
    lead = tuple(lead) or ((v_first,) if v_first is not None else ())
    enum_of = {x: ordered_subset(g, X.h_of[x], lead) for x in X.points}
    at = {
        x: GradedGroup.of(restricted_k_matrix(g, enum_of[x]), enum_of[x]) for x in X.points
    }
    trans = {}
    for x, y in X.comparable_pairs():
        incl = inclusion_matrix(enum_of[x], enum_of[y])
        image = incl @ at[x].kernel
        cols = []
        for c in image.columns():
            r = solve(at[y].kernel, c)
            if r is None:
                raise InconsistencyError(f"kernel at {x} does not include into kernel at {y}")
            cols.append(r)
        trans[(x, y)] = (incl, IntMatrix.from_columns(cols, at[y].kernel.cols))
    return XKModule(X, enum_of, at, trans)


def graded_groups_isomorphic(a: GradedGroup, b: GradedGroup) -> bool:
    """Pointwise comparison of invariant factors in both degrees."""
    return a.k0 == b.k0 and a.k1 == b.k1
