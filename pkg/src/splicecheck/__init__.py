"""Exact invariants of directed graphs and their graph algebras, and a checker
for invariance of the filtered K-theory complex under the Cuntz splice."""

from .errors import (
    GraphFormatError,
    InconsistencyError,
    InfiniteMultiplicityError,
    PreconditionError,
    ScopeError,
    SizeBoundError,
    SpliceCheckError,
    StructureError,
    UnknownVertexError,
    WellDefinednessError,
)
from .graph import (
    OMEGA,
    ExtendedNat,
    Graph,
    ReturnPathClass,
    VertexClass,
    adjacency_matrix,
    breaking_vertices,
    condition_k,
    maximal_tails,
    purely_infinite_report,
    reaches,
    reaches_refl,
    return_path_class,
    vertex_class,
)
from .moves import (
    EdgeEnumeration,
    contract_vertex,
    cuntz_splice,
    desingularize_truncated,
    graphs_isomorphic,
    verify_desing_splice_commutes,
)
from .ideals import (
    AdmissiblePair,
    IdealLattice,
    PrimSpace,
    enumerate_hs,
    h_infinity_fin,
    hs_closure,
    ideal_lattice,
    prim_homeo_under_splice,
    prim_space,
    splice_lattice_map,
)
from .intlinalg import (
    FgAbelianGroup,
    IntMatrix,
    cokernel_group,
    induced_coker_iso,
    induced_ker_iso,
    kernel_basis,
    smith,
    solve,
)
from .xk import filtered_xk, graded_groups_isomorphic, k_matrix, k_theory
from .verifier import (
    build_complex,
    build_psi,
    verify_cube,
    verify_cuntz_splice_invariance,
    verify_quasi_iso,
)

__version__ = "0.1.0"
