import random

import pytest
from hypothesis import given, settings, strategies as st
from sympy import ZZ
from sympy.matrices.normalforms import invariant_factors

from oracles import (
    box_kernel,
    brute_coker_verdict,
    brute_ker_verdict,
    coker_instance,
    ker_instance,
    to_sympy,
)
from splicecheck import (
    FgAbelianGroup,
    IntMatrix,
    WellDefinednessError,
    cokernel_group,
    induced_coker_iso,
    induced_ker_iso,
    kernel_basis,
    smith,
    solve,
)
from splicecheck.intlinalg import cokernel_coordinates, induced_coker_matrix, induced_ker_matrix


def M(rows):
    return IntMatrix(rows)


def random_matrix(rng, max_dim=6, bound=9):
    r, c = rng.randint(1, max_dim), rng.randint(1, max_dim)
    return IntMatrix([[rng.randint(-bound, bound) for _ in range(c)] for _ in range(r)], r, c)


def sympy_factors(A: IntMatrix) -> list:
    """Nonzero invariant factors from sympy (positive)."""
    return [abs(int(d)) for d in invariant_factors(to_sympy(A), domain=ZZ) if d != 0]


# -- matrices ------------------------------------------------------------------------


def test_matrix_basics():
    A = M([[1, 2], [3, 4]])
    assert (A @ IntMatrix.identity(2)) == A
    assert A.T.to_list() == [[1, 3], [2, 4]]
    assert A.det() == -2
    assert (A - A).is_zero()
    assert IntMatrix.from_json([[1, 2]]) == M([[1, 2]])
    assert A.hstack(A).shape == (2, 4) and A.vstack(A).shape == (4, 2)


def test_empty_matrices():
    E = IntMatrix.zeros(3, 0)
    assert E.shape == (3, 0)
    assert (E @ IntMatrix.zeros(0, 2)) == IntMatrix.zeros(3, 2)
    assert IntMatrix.zeros(0, 0).det() == 1
    assert cokernel_group(E) == FgAbelianGroup(3)
    assert kernel_basis(IntMatrix.zeros(0, 2)).shape == (2, 2)


def test_shape_errors():
    with pytest.raises(ValueError):
        M([[1, 2]]) @ M([[1, 2]])
    with pytest.raises(ValueError):
        IntMatrix([[1, 2], [3]])


# -- Smith normal form ---------------------------------------------------------------


def test_smith_examples():
    assert smith(IntMatrix.identity(3)).S == IntMatrix.identity(3)
    assert smith(M([[2, 0], [1, 2]])).S == M([[1, 0], [0, 4]])
    assert smith(IntMatrix.zeros(2, 3)).S == IntMatrix.zeros(2, 3)


def _check_decomposition(A):
    dec = smith(A)
    assert dec.U @ A @ dec.V == dec.S
    assert abs(dec.U.det()) == 1 and abs(dec.V.det()) == 1
    assert dec.U @ dec.U_inv == IntMatrix.identity(A.rows)
    assert dec.V @ dec.V_inv == IntMatrix.identity(A.cols)
    S = dec.S
    for i in range(S.rows):
        for j in range(S.cols):
            if i != j:
                assert S[i, j] == 0
    diag = dec.diagonal
    assert all(d >= 0 for d in diag)
    nz = [d for d in diag if d]
    assert diag[: len(nz)] == tuple(nz)  # zeros last
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    return dec


def test_smith_random_thousand():
    rng = random.Random(2024)
    for _ in range(1000):
        A = random_matrix(rng)
        dec = _check_decomposition(A)
        assert [d for d in dec.diagonal if d] == sympy_factors(A)


def test_smith_deterministic():
    A = M([[4, 6, 2], [2, 8, 10], [6, 2, 0]])
    assert smith(A).to_json() == smith(A).to_json()


# -- kernels and cokernels ---------------------------------------------------------


def test_kernel_examples():
    assert kernel_basis(M([[1]])).shape == (1, 0)
    assert kernel_basis(M([[0]])).to_list() == [[1]]
    K = kernel_basis(M([[1, 1], [1, 1]]))
    assert K.cols == 1 and K.col(0) in ((1, -1), (-1, 1))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_kernel_basis_properties(seed):
    rng = random.Random(seed)
    A = random_matrix(rng, 4, 3)
    K = kernel_basis(A)
    assert (A @ K).is_zero()
    rank = to_sympy(A).rank()
    assert K.cols == A.cols - rank
    if K.cols:
        assert to_sympy(K).rank() == K.cols
    # every kernel lattice point in a box is an integer combination of the basis
    if A.cols <= 4:
        for x in box_kernel(A, 2).tolist():
            assert solve(K, x) is not None


def test_cokernel_examples():
    assert cokernel_group(M([[1]])).is_trivial
    assert cokernel_group(M([[2]])) == FgAbelianGroup(0, (2,))
    assert cokernel_group(M([[2, 0], [1, 2]])) == FgAbelianGroup(0, (4,))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_cokernel_order_is_det(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    A = IntMatrix([[rng.randint(-5, 5) for _ in range(n)] for _ in range(n)], n, n)
    G = cokernel_group(A)
    if A.det() == 0:
        assert G.free_rank > 0
    else:
        assert G.order() == abs(A.det())
        assert list(G.torsion) == [d for d in sympy_factors(A) if d > 1]


def test_cokernel_coordinates_kill_relations():
    A = M([[2, 0], [1, 2]])
    cc = cokernel_coordinates(A)
    assert cc.moduli == (4,)
    for col in A.columns():
        assert cc.coords(col) == (0,)
    assert cc.coords((0, 1)) in ((2,),)


def test_group_validation_and_str():
    assert str(FgAbelianGroup(1, (2,))) == "ℤ/2 ⊕ ℤ"
    assert str(FgAbelianGroup()) == "0"
    assert str(FgAbelianGroup(2)) == "ℤ^2"
    with pytest.raises(ValueError):
        FgAbelianGroup(0, (2, 3))
    with pytest.raises(ValueError):
        FgAbelianGroup(0, (1,))


# -- solving --------------------------------------------------------------------------


def test_solve_examples():
    assert solve(M([[2]]), [4]) == (2,)
    assert solve(M([[2]]), [3]) is None
    assert solve(IntMatrix.zeros(2, 0), [0, 0]) == ()
    with pytest.raises(ValueError):
        solve(M([[2]]), [1, 2])


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_solve_sound_and_complete(seed):
    rng = random.Random(seed)
    A = random_matrix(rng, 4, 4)
    if rng.random() < 0.5:
        x0 = [rng.randint(-3, 3) for _ in range(A.cols)]
        b = A.apply(x0)
    else:
        b = tuple(rng.randint(-6, 6) for _ in range(A.rows))
    x = solve(A, b)
    if x is not None:
        assert A.apply(x) == tuple(b)
    # b lies in the column span iff appending it leaves the invariants unchanged
    Ab = A.hstack(IntMatrix.column(b))
    same = sympy_factors(A) == sympy_factors(Ab)
    assert (x is not None) == same


# -- induced maps ---------------------------------------------------------------------


SPLICED_O2 = M([[0, 1, 0], [1, 0, 1], [0, 1, 1]])


def test_coker_iso_examples():
    A = M([[2, 1], [0, 3]])
    assert induced_coker_iso(IntMatrix.identity(2), A, A)
    assert not induced_coker_iso(M([[2]]), M([[0]]), M([[0]]))
    assert induced_coker_iso(M([[-1, 0, 1]]), SPLICED_O2, M([[1]]))
    assert brute_coker_verdict(M([[-1, 0, 1]]), SPLICED_O2, M([[1]])) is True


def test_coker_not_well_defined():
    with pytest.raises(WellDefinednessError):
        induced_coker_iso(M([[1]]), M([[2]]), M([[3]]))


def test_coker_induced_matrix_doubles():
    # Z/2 -> Z/4 induced by the inclusion of w2 into {w1, w2}
    Q = M([[0], [1]])
    R = induced_coker_matrix(Q, M([[2]]), M([[2, 0], [1, 2]]))
    assert R.to_list() in ([[2]],)


def test_ker_iso_examples():
    A = M([[1, -1], [2, -2]])
    assert induced_ker_iso(IntMatrix.identity(2), A, A)
    assert not induced_ker_iso(M([[2]]), M([[0]]), M([[0]]))
    assert induced_ker_iso(M([[0, 1], [1, 0]]), IntMatrix.zeros(2, 2), IntMatrix.zeros(2, 2))


def test_ker_not_well_defined():
    with pytest.raises(WellDefinednessError):
        induced_ker_iso(M([[1]]), M([[0]]), M([[1]]))


def test_ker_matrix_shape():
    R = induced_ker_matrix(M([[0, 1], [1, 0]]), IntMatrix.zeros(2, 2), IntMatrix.zeros(2, 2))
    assert R.shape == (2, 2) and abs(R.det()) == 1


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_coker_iso_matches_residue_enumeration(seed):
    Q, A, B, verdict = coker_instance(random.Random(seed))
    assert induced_coker_iso(Q, A, B) == verdict


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_ker_iso_matches_box_enumeration(seed):
    Q, A, B, R = ker_instance(random.Random(seed))
    truth = R.rows == 0 or abs(R.det()) == 1
    assert brute_ker_verdict(Q, A, B, 24, 2) == truth
    assert induced_ker_iso(Q, A, B) == truth
