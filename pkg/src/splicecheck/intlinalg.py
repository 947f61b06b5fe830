"""Exact integer linear algebra.

Everything here works over Python's arbitrary precision ``int``; there is no
floating point anywhere. Matrices may have zero rows or zero columns, which
is how a graph with no regular vertices ends up with a ``n x 0`` K-matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import WellDefinednessError

__all__ = [
    "IntMatrix",
    "SmithDecomposition",
    "FgAbelianGroup",
    "smith",
    "kernel_basis",
    "cokernel_group",
    "cokernel_coordinates",
    "solve",
    "in_column_span",
    "coker_map_surjective",
    "coker_map_injective",
    "induced_coker_iso",
    "induced_coker_matrix",
    "induced_ker_iso",
    "induced_ker_matrix",
]


class IntMatrix:
    """Immutable dense integer matrix with explicit shape."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Iterable[int]] = (), rows=None, cols=None):
        data = tuple(tuple(int(a) for a in row) for row in data)
        if rows is None:
            rows = len(data)
        if cols is None:
            cols = len(data[0]) if data else 0
        if len(data) != rows:
            if rows and not data and cols == 0:
                data = ((),) * rows
            else:
                raise ValueError(f"expected {rows} rows, got {len(data)}")
        for row in data:
            if len(row) != cols:
                raise ValueError(f"ragged matrix: row of length {len(row)}, expected {cols}")
        self.rows = rows
        self.cols = cols
        self._data = data

    # -- construction -------------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        return cls([[c[i] for c in columns] for i in range(rows)], rows, len(columns))

    @classmethod
    def column(cls, vec: Sequence[int]) -> "IntMatrix":
        return cls([[a] for a in vec], len(vec), 1)

    @classmethod
    def from_json(cls, obj, cols=None) -> "IntMatrix":
        rows = [list(r) for r in obj]
        return cls(rows, len(rows), cols if cols is not None else (len(rows[0]) if rows else 0))

    # -- access -------------------------------------------------------------

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    def row(self, i: int) -> tuple:
        return self._data[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self._data)

    def columns(self) -> list:
        return [self.col(j) for j in range(self.cols)]

    def to_list(self) -> list:
        return [list(r) for r in self._data]

    def to_json(self) -> list:
        return self.to_list()

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        return IntMatrix([[self._data[i][j] for j in cols] for i in rows], len(rows), len(cols))

    # -- arithmetic ---------------------------------------------------------

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ocols = other.columns()
        return IntMatrix(
            [[sum(a * b for a, b in zip(r, c)) for c in ocols] for r in self._data],
            self.rows,
            other.cols,
        )

    def apply(self, vec: Sequence[int]) -> tuple:
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} for matrix with {self.cols} columns")
        return tuple(sum(a * b for a, b in zip(r, vec)) for r in self._data)

    def _check_same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same_shape(other)
        return IntMatrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)],
            self.rows,
            self.cols,
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same_shape(other)
        return IntMatrix(
            [[a - b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)],
            self.rows,
            self.cols,
        )

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-a for a in r] for r in self._data], self.rows, self.cols)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix([[k * a for a in r] for r in self._data], self.rows, self.cols)

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix([list(c) for c in self.columns()], self.cols, self.rows)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError(f"cannot hstack {self.shape} and {other.shape}")
        return IntMatrix(
            [r + s for r, s in zip(self._data, other._data)], self.rows, self.cols + other.cols
        )

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise ValueError(f"cannot vstack {self.shape} and {other.shape}")
        return IntMatrix(self._data + other._data, self.rows + other.rows, self.cols)

    def is_zero(self) -> bool:
        return all(a == 0 for r in self._data for a in r)

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.to_list()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        return hash((self.rows, self.cols, self._data))

    def __repr__(self):
        if self.rows == 0 or self.cols == 0:
            return f"IntMatrix.zeros({self.rows}, {self.cols})"
        return f"IntMatrix({self.to_list()})"

    def pretty(self) -> str:
        if self.rows == 0 or self.cols == 0:
            return f"[empty {self.rows}x{self.cols}]"
        width = max(len(str(a)) for r in self._data for a in r)
        return "\n".join("[" + " ".join(str(a).rjust(width) for a in r) + "]" for r in self._data)


@dataclass(frozen=True)
class SmithDecomposition:
    """``S = U @ M @ V`` with ``U``, ``V`` unimodular and ``S`` diagonal.

    The inverses of ``U`` and ``V`` are carried along because they are needed
    for generators of cokernels and cost nothing to track.
    """

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix = field(repr=False)
    V_inv: IntMatrix = field(repr=False)

    @property
    def diagonal(self) -> tuple:
        return tuple(self.S[i, i] for i in range(min(self.S.shape)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    def to_json(self) -> dict:
        return {"U": self.U.to_json(), "S": self.S.to_json(), "V": self.V.to_json()}


def smith(M: IntMatrix) -> SmithDecomposition:
    """Smith normal form with transforms.

    Pivot rule: smallest nonzero absolute value in the active block, ties
    broken by lowest (row, column) index. The result is deterministic.
    """
    m, n = M.shape
    a = M.to_list()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Ui = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    # Row op "row_i += k row_j" is left multiplication by E; U <- E U,
    # U_inv <- U_inv E^-1 (column op col_j -= k col_i on U_inv).
    def row_add(i, j, k):
        if k == 0:
            return
        a[i] = [x + k * y for x, y in zip(a[i], a[j])]
        U[i] = [x + k * y for x, y in zip(U[i], U[j])]
        for r in Ui:
            r[j] -= k * r[i]

    def row_swap(i, j):
        if i == j:
            return
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def row_neg(i):
        a[i] = [-x for x in a[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    # Column op "col_i += k col_j" is right multiplication by E; V <- V E,
    # V_inv <- E^-1 V_inv (row op row_j -= k row_i on V_inv).
    def col_add(i, j, k):
        if k == 0:
            return
        for r in a:
            r[i] += k * r[j]
        for r in V:
            r[i] += k * r[j]
        Vi[j] = [x - k * y for x, y in zip(Vi[j], Vi[i])]

    def col_swap(i, j):
        if i == j:
            return
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    t = 0
    while t < min(m, n):
        pivot = None
        for i in range(t, m):
            for j in range(t, n):
                x = a[i][j]
                if x and (pivot is None or abs(x) < pivot[0]):
                    pivot = (abs(x), i, j)
        if pivot is None:
            break
        while True:
            _, pi, pj = pivot
            row_swap(t, pi)
            col_swap(t, pj)
            p = a[t][t]
            for i in range(t + 1, m):
                row_add(i, t, -(a[i][t] // p))
            for j in range(t + 1, n):
                col_add(j, t, -(a[t][j] // p))
            clean = all(a[i][t] == 0 for i in range(t + 1, m)) and all(
                a[t][j] == 0 for j in range(t + 1, n)
            )
            if clean:
                bad = next(
                    (i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p),
                    None,
                )
                if bad is None:
                    break
                row_add(t, bad, 1)
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    x = a[i][j]
                    if x and (pivot is None or abs(x) < pivot[0]) and (i == t or j == t):
                        pivot = (abs(x), i, j)
        if a[t][t] < 0:
            row_neg(t)
        t += 1

    return SmithDecomposition(
        U=IntMatrix(U, m, m),
        S=IntMatrix(a, m, n),
        V=IntMatrix(V, n, n),
        U_inv=IntMatrix(Ui, m, m),
        V_inv=IntMatrix(Vi, n, n),
    )


@dataclass(frozen=True)
class FgAbelianGroup:
    """Finitely generated abelian group ``Z^free_rank + sum Z/d_i``, d_i | d_{i+1}."""

    free_rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        ds = tuple(self.torsion)
        if any(d < 2 for d in ds):
            raise ValueError(f"invariant factors must be >= 2, got {ds}")
        if any(ds[i + 1] % ds[i] for i in range(len(ds) - 1)):
            raise ValueError(f"invariant factors must form a divisibility chain, got {ds}")
        object.__setattr__(self, "torsion", ds)

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> Optional[int]:
        if not self.is_finite:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    def __str__(self):
        parts = [f"ℤ/{d}" for d in self.torsion]
        if self.free_rank == 1:
            parts.append("ℤ")
        elif self.free_rank > 1:
            parts.append(f"ℤ^{self.free_rank}")
        return " ⊕ ".join(parts) if parts else "0"


def _diagonal_to_group(diag, ambient: int) -> FgAbelianGroup:
    rank = sum(1 for d in diag if d)
    return FgAbelianGroup(ambient - rank, tuple(d for d in diag if d > 1))


def kernel_basis(M: IntMatrix) -> IntMatrix:
    """Columns form a Z-basis of ``{x : M x = 0}``."""
    dec = smith(M)
    r = dec.rank
    return dec.V.submatrix(range(M.cols), range(r, M.cols))


def cokernel_group(M: IntMatrix) -> FgAbelianGroup:
    """Invariant factors of ``Z^rows / colspan(M)``."""
    dec = smith(M)
    return _diagonal_to_group(dec.diagonal, M.rows)


@dataclass(frozen=True)
class CokernelCoordinates:
    """Canonical coordinates on ``Z^rows / colspan(M)``.

    ``proj`` maps an ambient vector to coordinates, one per entry of
    ``moduli`` (0 means a free coordinate); ``generators`` has one ambient
    column per coordinate.
    """

    group: FgAbelianGroup
    proj: IntMatrix
    moduli: tuple
    generators: IntMatrix

    def coords(self, vec: Sequence[int]) -> tuple:
        raw = self.proj.apply(vec)
        return tuple(c % d if d else c for c, d in zip(raw, self.moduli))


def cokernel_coordinates(M: IntMatrix) -> CokernelCoordinates:
    dec = smith(M)
    diag = dec.diagonal
    keep, moduli = [], []
    for i in range(M.rows):
        d = diag[i] if i < len(diag) else 0
        if d != 1:
            keep.append(i)
            moduli.append(d)
    # torsion coordinates first (in divisibility order), then free ones
    order = sorted(range(len(keep)), key=lambda k: (moduli[k] == 0, k))
    keep = [keep[k] for k in order]
    moduli = tuple(moduli[k] for k in order)
    return CokernelCoordinates(
        group=_diagonal_to_group(diag, M.rows),
        proj=dec.U.submatrix(keep, range(M.rows)),
        moduli=moduli,
        generators=dec.U_inv.submatrix(range(M.rows), keep),
    )


def solve(M: IntMatrix, b: Sequence[int]) -> Optional[tuple]:
    """An integer ``x`` with ``M x = b``, or ``None`` if there is none."""
    if len(b) != M.rows:
        raise ValueError(f"right-hand side of length {len(b)} for {M.rows} rows")
    dec = smith(M)
    c = dec.U.apply(b)
    diag = dec.diagonal
    y = [0] * M.cols
    for i, ci in enumerate(c):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if ci != 0:
                return None
        elif ci % d:
            return None
        else:
            y[i] = ci // d
    return dec.V.apply(y)


def in_column_span(M: IntMatrix, vecs: IntMatrix) -> bool:
    return all(solve(M, c) is not None for c in vecs.columns())


def _check_shapes(Q: IntMatrix, M_rows: int, N_rows: int, what: str):
    if Q.cols != M_rows or Q.rows != N_rows:
        raise ValueError(
            f"{what}: map of shape {Q.shape} does not go from Z^{M_rows} to Z^{N_rows}"
        )


def coker_map_surjective(Q: IntMatrix, N: IntMatrix) -> bool:
    return cokernel_group(Q.hstack(N)).is_trivial


def coker_map_injective(Q: IntMatrix, M: IntMatrix, N: IntMatrix) -> bool:
    """Whether ``Z^a/im M -> Z^b/im N`` induced by ``Q`` has trivial kernel."""
    K = kernel_basis(Q.hstack(-N))
    xs = K.submatrix(range(Q.cols), range(K.cols))
    return in_column_span(M, xs)


def _coker_well_defined(Q, M, N):
    _check_shapes(Q, M.rows, N.rows, "induced_coker_iso")
    if not in_column_span(N, Q @ M):
        raise WellDefinednessError("Q does not map im M into im N")


def induced_coker_iso(Q: IntMatrix, M: IntMatrix, N: IntMatrix) -> bool:
    """Whether ``Q`` induces an isomorphism ``Z^a/im M -> Z^b/im N``."""
    _coker_well_defined(Q, M, N)
    return coker_map_surjective(Q, N) and coker_map_injective(Q, M, N)


def induced_coker_matrix(Q: IntMatrix, M: IntMatrix, N: IntMatrix) -> IntMatrix:
    """The induced map in the canonical coordinates of both cokernels.

    Column ``k`` is the image of the ``k``-th source generator, reduced.
    """
    _coker_well_defined(Q, M, N)
    src, tgt = cokernel_coordinates(M), cokernel_coordinates(N)
    cols = [tgt.coords(Q.apply(g)) for g in src.generators.columns()]
    return IntMatrix.from_columns(cols, len(tgt.moduli))


def induced_ker_matrix(Q: IntMatrix, M: IntMatrix, N: IntMatrix) -> Optional[IntMatrix]:
    """``R`` with ``Q K_M = K_N R`` for the canonical kernel bases, or ``None``."""
    _check_shapes(Q, M.cols, N.cols, "induced_ker_iso")
    KM, KN = kernel_basis(M), kernel_basis(N)
    image = Q @ KM
    if not (N @ image).is_zero():
        raise WellDefinednessError("Q does not map ker M into ker N")
    cols = []
    for c in image.columns():
        r = solve(KN, c)
        if r is None:
            return None
        cols.append(r)
    return IntMatrix.from_columns(cols, KN.cols)


def induced_ker_iso(Q: IntMatrix, M: IntMatrix, N: IntMatrix) -> bool:
    """Whether ``Q`` restricts to an isomorphism ``ker M -> ker N``."""
    R = induced_ker_matrix(Q, M, N)
    if R is None:
        # the image lies in ker N by well-definedness, and K_N is a basis of ker N
        raise AssertionError("kernel image not expressible in a kernel basis")
    return R.rows == R.cols and abs(R.det()) == 1

