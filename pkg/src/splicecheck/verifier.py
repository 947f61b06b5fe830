"""Chain-level verification that the Cuntz splice preserves the filtered invariant.

For each point ``x`` of the primitive ideal space the complex of a graph is
``Z^{H_x} --(A_x - 1)^t--> Z^{H_x}``, and for ``x >= y`` the structure maps
are coordinate inclusions. The chain map goes from the spliced complex back
to the original one. Enumerations follow a fixed convention: ``H_x`` starts
with the splice vertex ``v`` and ``H'_x`` starts with ``(u2, u1, v)``, the
remaining vertices in graph order on both sides, so that the chain map has
the block form

    psi1 = [0 0 | 1],    psi0 = [-e_v 0 | 1]

where ``-e_v`` sends the ``u2`` coordinate to minus the ``v`` coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import InconsistencyError, PreconditionError, WellDefinednessError
from .graph import Graph, ReturnPathClass, purely_infinite_report, return_path_class
from .ideals import PrimSpace, prim_homeo_under_splice, splice_lattice_map
from .intlinalg import (
    FgAbelianGroup,
    IntMatrix,
    cokernel_group,
    induced_coker_iso,
    induced_ker_iso,
    induced_ker_matrix,
    kernel_basis,
)
from .moves import SpliceResult, cuntz_splice
from .xk import (
    _require_regular,
    filtered_xk,
    graded_groups_isomorphic,
    inclusion_matrix,
    k_theory,
    ordered_subset,
    restricted_k_matrix,
)


@dataclass
class DiagramComplex:
    space: PrimSpace
    enum_of: dict
    phi: dict
    incl: dict
    lead: tuple = ()

    def rank_of(self, x) -> int:
        return len(self.enum_of[x])

    def module_map_failures(self) -> list:
        return [
            (x, y)
            for (x, y), inc in self.incl.items()
            if inc @ self.phi[x] != self.phi[y] @ inc
        ]


@dataclass
class ChainMap:
    psi1: dict
    psi0: dict


def _enumeration(g: Graph, H, lead) -> tuple:
    present = [u for u in lead if u in H]
    if present and len(present) != len(lead):
        raise PreconditionError(
            f"enumeration convention violated: H contains {present} but not all of {list(lead)}",
            criterion="enumeration",
        )
    return ordered_subset(g, H, lead)


def build_complex(
    g: Graph, X: PrimSpace, v: Optional[str] = None, *, splice: Optional[SpliceResult] = None
) -> DiagramComplex:
    """The complex of ``g`` over ``X``.

    Pass ``v`` for the original graph, or ``splice`` when ``g`` is the spliced
    graph, to fix the enumeration convention.
    """
    _require_regular(g)
    if splice is not None:
        if splice.graph != g:
            raise PreconditionError("splice result does not belong to this graph", criterion="enumeration")
        lead = (splice.u2, splice.u1, splice.v)
    elif v is not None:
        g._check(v)
        lead = (v,)
    else:
        lead = ()
    enum_of = {x: _enumeration(g, X.h_of[x], lead) for x in X.points}
    phi = {x: restricted_k_matrix(g, enum_of[x]) for x in X.points}
    incl = {(x, y): inclusion_matrix(enum_of[x], enum_of[y]) for x, y in X.comparable_pairs()}
    cx = DiagramComplex(X, enum_of, phi, incl, lead)
    bad = cx.module_map_failures()
    if bad:
        raise InconsistencyError(f"differential is not a module map at {bad}")
    return cx


def build_psi(gE: Graph, v, X: PrimSpace, corrupt: bool = False) -> ChainMap:
    """Block matrices of the chain map from the spliced complex to the original.

    ``corrupt`` flips the sign of the ``-1`` entry; it exists for negative
    controls only.
    """
    _require_regular(gE)
    cls = return_path_class(gE, v)
    if cls is not ReturnPathClass.TWO_OR_MORE:
        raise PreconditionError(
            f"{v!r} has return path class {cls.value}", criterion="return_path_class"
        )
    psi1, psi0 = {}, {}
    for x in X.points:
        n = len(X.h_of[x])
        if v in X.h_of[x]:
            p1 = [[0, 0] + [int(i == j) for j in range(n)] for i in range(n)]
            p0 = [list(r) for r in p1]
            p0[0][0] = 1 if corrupt else -1
            psi1[x] = IntMatrix(p1, n, n + 2)
            psi0[x] = IntMatrix(p0, n, n + 2)
        else:
            psi1[x] = psi0[x] = IntMatrix.identity(n)
    return ChainMap(psi1, psi0)


# -- reports ----------------------------------------------------------------------


@dataclass
class FaceCheck:
    face: str
    x: str
    y: Optional[str]
    ok: bool

    def to_json(self) -> dict:
        return {"face": self.face, "x": self.x, "y": self.y, "ok": self.ok}


@dataclass
class CubeReport:
    faces: list

    @property
    def verdict(self) -> bool:
        return all(f.ok for f in self.faces)

    def failures(self) -> list:
        return [f for f in self.faces if not f.ok]

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "faces": [f.to_json() for f in self.faces]}


def _check_shapes(cE: DiagramComplex, cEC: DiagramComplex, psi: ChainMap):
    if set(cE.space.points) != set(cEC.space.points):
        raise ValueError("complexes live over different point sets")
    for x in cE.space.points:
        want = (cE.rank_of(x), cEC.rank_of(x))
        for name, maps in (("psi1", psi.psi1), ("psi0", psi.psi0)):
            if maps[x].shape != want:
                raise ValueError(f"{name} at {x} has shape {maps[x].shape}, expected {want}")


def verify_cube(cE: DiagramComplex, cEC: DiagramComplex, psi: ChainMap) -> CubeReport:
    """Check every face of the cube for every point and every ``x >= y``."""
    _check_shapes(cE, cEC, psi)
    faces = []
    for x in cE.space.points:
        top = cE.phi[x] @ psi.psi1[x] == psi.psi0[x] @ cEC.phi[x]
        faces.append(FaceCheck("top", x, None, top))
    for x, y in cE.space.comparable_pairs():
        iE, iC = cE.incl[(x, y)], cEC.incl[(x, y)]
        faces.append(FaceCheck("front", x, y, iE @ cE.phi[x] == cE.phi[y] @ iE))
        faces.append(FaceCheck("back", x, y, iC @ cEC.phi[x] == cEC.phi[y] @ iC))
        faces.append(FaceCheck("left", x, y, iE @ psi.psi1[x] == psi.psi1[y] @ iC))
        faces.append(FaceCheck("right", x, y, iE @ psi.psi0[x] == psi.psi0[y] @ iC))
        faces.append(
            FaceCheck("bottom", x, y, cE.phi[y] @ psi.psi1[y] == psi.psi0[y] @ cEC.phi[y])
        )
    return CubeReport(faces)


@dataclass
class PointHomology:
    x: str
    ker_iso: bool
    coker_iso: bool
    ker_map_injective: bool
    k0_E: object
    k1_E: object
    k0_EC: object
    k1_EC: object
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.ker_iso and self.coker_iso and self.ker_map_injective and self.error is None

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "ok": self.ok,
            "ker_iso": self.ker_iso,
            "coker_iso": self.coker_iso,
            "ker_map_injective": self.ker_map_injective,
            "E": {"K0": str(self.k0_E), "K1": str(self.k1_E)},
            "EC": {"K0": str(self.k0_EC), "K1": str(self.k1_EC)},
            "error": self.error,
        }


@dataclass
class QuasiIsoReport:
    points: list

    @property
    def verdict(self) -> bool:
        return all(p.ok for p in self.points)

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "points": [p.to_json() for p in self.points]}


def _restricted_kernel_injective(Q: IntMatrix, M: IntMatrix, N: IntMatrix) -> bool:
    # the kernel of psi1 restricted to ker(phi_EC) is ker(R) for R in kernel bases
    R = induced_ker_matrix(Q, M, N)
    return R is not None and kernel_basis(R).cols == 0


def verify_quasi_iso(cE: DiagramComplex, cEC: DiagramComplex, psi: ChainMap) -> QuasiIsoReport:
    _check_shapes(cE, cEC, psi)
    out = []
    for x in cE.space.points:
        M, N = cEC.phi[x], cE.phi[x]
        groups = dict(
            k0_E=cokernel_group(N),
            k1_E=FgAbelianGroup(kernel_basis(N).cols),
            k0_EC=cokernel_group(M),
            k1_EC=FgAbelianGroup(kernel_basis(M).cols),
        )
        try:
            ker = induced_ker_iso(psi.psi1[x], M, N)
            inj = _restricted_kernel_injective(psi.psi1[x], M, N)
            coker = induced_coker_iso(psi.psi0[x], M, N)
        except WellDefinednessError as exc:
            out.append(PointHomology(x, False, False, False, error=str(exc), **groups))
            continue
        out.append(PointHomology(x, ker, coker, inj, **groups))
    return QuasiIsoReport(out)


# -- orchestration ------------------------------------------------------------------


@dataclass
class Stage:
    name: str
    ok: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"stage": self.name, "ok": self.ok, "detail": self.detail}


@dataclass
class InvarianceReport:
    graph: Graph
    v: str
    stages: list = field(default_factory=list)
    splice: Optional[SpliceResult] = None
    cube: Optional[CubeReport] = None
    quasi_iso: Optional[QuasiIsoReport] = None
    point_map: dict = field(default_factory=dict)
    groups: dict = field(default_factory=dict)
    complexes: tuple = ()
    psi: Optional[ChainMap] = None

    @property
    def verdict(self) -> bool:
        return bool(self.stages) and all(s.ok for s in self.stages)

    def failed_stages(self) -> list:
        return [s.name for s in self.stages if not s.ok]

    def to_json(self, verbose: bool = False) -> dict:
        out = {
            "verdict": self.verdict,
            "v": self.v,
            "stages": [s.to_json() for s in self.stages],
            "point_map": self.point_map,
            "groups": self.groups,
        }
        if self.cube is not None:
            out["cube"] = self.cube.to_json() if verbose else {"verdict": self.cube.verdict, "failures": [f.to_json() for f in self.cube.failures()]}
        if self.quasi_iso is not None:
            out["quasi_iso"] = self.quasi_iso.to_json()
        if verbose and self.complexes:
            cE, cEC = self.complexes
            out["matrices"] = {
                x: {
                    "H_E": list(cE.enum_of[x]),
                    "H_EC": list(cEC.enum_of[x]),
                    "phi_E": cE.phi[x].to_json(),
                    "phi_EC": cEC.phi[x].to_json(),
                    "psi1": self.psi.psi1[x].to_json(),
                    "psi0": self.psi.psi0[x].to_json(),
                }
                for x in cE.space.points
            }
        return out


def check_preconditions(g: Graph, v):
    """Raise :class:`PreconditionError` naming the first failing hypothesis."""
    _require_regular(g)
    g._check(v)
    report = purely_infinite_report(g)
    if not report.verdict:
        failed = report.failed_criteria()
        raise PreconditionError(
            f"graph algebra is not purely infinite: failed {', '.join(failed)}",
            criterion=failed[0],
        )
    cls = return_path_class(g, v)
    if cls is not ReturnPathClass.TWO_OR_MORE:
        raise PreconditionError(
            f"{v!r} has return path class {cls.value}; the splice needs two or more",
            criterion="return_path_class",
        )


def verify_cuntz_splice_invariance(g: Graph, v, corrupt_psi: bool = False) -> InvarianceReport:
    check_preconditions(g, v)
    rep = InvarianceReport(g, v)
    stages = rep.stages

    splice = cuntz_splice(g, v)
    rep.splice = splice
    stages.append(Stage("splice", True, f"u1={splice.u1}, u2={splice.u2}"))

    try:
        pair_map = splice_lattice_map(g, v, splice)
        stages.append(Stage("lattice_order_iso", True, f"{len(pair_map)} admissible pairs"))
        homeo = prim_homeo_under_splice(g, v, splice)
        stages.append(Stage("prim_homeo", True, f"{len(homeo.mapping)} points"))
    except InconsistencyError as exc:
        stages.append(Stage("lattice_order_iso", False, str(exc)))
        return rep
    rep.point_map = dict(homeo.mapping)

    X = homeo.source
    XC = homeo.target.transport(homeo.mapping)
    cE = build_complex(g, X, v)
    cEC = build_complex(splice.graph, XC, splice=splice)
    rep.complexes = (cE, cEC)
    stages.append(Stage("complexes", True, "module-map identities hold"))

    psi = build_psi(g, v, X, corrupt=corrupt_psi)
    rep.psi = psi
    stages.append(Stage("psi", True))

    rep.cube = verify_cube(cE, cEC, psi)
    stages.append(
        Stage("cube", rep.cube.verdict, ", ".join(f"{f.face}@{f.x}" for f in rep.cube.failures()))
    )
    if not rep.cube.verdict:
        return rep

    rep.quasi_iso = verify_quasi_iso(cE, cEC, psi)
    stages.append(
        Stage(
            "quasi_iso",
            rep.quasi_iso.verdict,
            ", ".join(p.x for p in rep.quasi_iso.points if not p.ok),
        )
    )

    xkE = filtered_xk(g, X, v)
    xkC = filtered_xk(splice.graph, homeo.target, lead=(splice.u2, splice.u1, v))
    mismatched = []
    for x in X.points:
        a, b = xkE.at[x], xkC.at[homeo.mapping[x]]
        rep.groups[x] = {"E": a.to_json(), "EC": b.to_json()}
        if not graded_groups_isomorphic(a, b):
            mismatched.append(x)
    stages.append(Stage("pointwise_groups", not mismatched, ", ".join(mismatched)))

    # the whole vertex set is a point only when the top ideal is join-irreducible
    whole = k_theory(g)
    tops = [x for x in X.points if X.h_of[x] == frozenset(g.vertices)]
    consistent = all(graded_groups_isomorphic(xkE.at[x], whole) for x in tops)
    consistent &= graded_groups_isomorphic(whole, k_theory(splice.graph))
    stages.append(Stage("top_point_k_theory", consistent, f"K_*(E): {whole}"))
    return rep
