"""Exact integer matrices, Smith normal form and cokernels.

All arithmetic is on Python ints, so nothing can overflow.  Matrices act on
row vectors where that matters (``v @ M``), matching the row-form convention
used for abelianized automorphisms: row ``i`` of ``M`` is the image of the
``i``-th basis vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class _Infinite:
    """The cardinality of an infinite set of classes."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE"

    __str__ = __repr__

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


class IntMatrix:
    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable[int]], ncols: int | None = None):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix rows")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, m: int, n: int) -> "IntMatrix":
        return cls([[0] * n for _ in range(m)], n)

    @classmethod
    def diagonal(cls, entries: Sequence[int]) -> "IntMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def parse(cls, text: str) -> "IntMatrix":
        """Parse ``"1 -2; 0 1"``: rows split on ``;``, entries on whitespace."""
        rows = [r.split() for r in text.strip().split(";")]
        if not rows or not rows[0]:
            raise ValueError(f"empty matrix literal {text!r}")
        try:
            return cls([[int(x) for x in r] for r in rows])
        except ValueError as exc:
            raise ValueError(f"bad matrix literal {text!r}: {exc}") from None

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.shape, self.rows))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other.rows)) if other.nrows else [()] * other.ncols
        return IntMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows], other.ncols)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-a for a in r] for r in self.rows], self.ncols)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(zip(*self.rows), self.nrows) if self.nrows else IntMatrix.zeros(self.ncols, 0)

    T = property(transpose)

    def row_times(self, v: Sequence[int]) -> tuple[int, ...]:
        """The row vector ``v @ self``."""
        return tuple(sum(v[i] * self.rows[i][j] for i in range(self.nrows)) for j in range(self.ncols))

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        n = self.nrows
        a = [list(r) for r in self.rows]
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1

    def __repr__(self) -> str:
        return f"IntMatrix({self})"

    def __str__(self) -> str:
        return "; ".join(" ".join(str(x) for x in r) for r in self.rows)


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ M @ V == D`` with ``U``, ``V`` unimodular and ``D`` in Smith form."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D[i, i] for i in range(min(self.D.shape)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(M: IntMatrix) -> SmithDecomposition:
    """Smith normal form with transforms.

    The pivot is the entry of smallest nonzero absolute value in the
    remaining block (ties: first in row-major order).
    """
    m, n = M.shape
    A = [list(r) for r in M.rows]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in A:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] != 0 and (pivot is None or abs(A[i][j]) < abs(A[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            swap_rows(t, pivot[0])
            swap_cols(t, pivot[1])
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    dirty = dirty or A[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return SmithDecomposition(IntMatrix(U, m), IntMatrix(A, n), IntMatrix(V, n))


@dataclass(frozen=True)
class AbelianGroupStructure:
    """``Z^free_rank + Z/torsion[0] + ... `` with a divisibility chain."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    @property
    def order(self):
        if self.free_rank:
            return INFINITE
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion]
        if self.free_rank:
            parts.insert(0, "Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"


def _structure_from_diagonal(diag: Sequence[int], ambient: int) -> AbelianGroupStructure:
    nonzero = [d for d in diag if d != 0]
    return AbelianGroupStructure(ambient - len(nonzero), tuple(d for d in nonzero if d >= 2))


def cokernel_structure(M: IntMatrix) -> AbelianGroupStructure:
    """Structure of ``Z^n / M Z^n`` for square ``M`` (rows or columns give the
    same group up to isomorphism)."""
    if not M.is_square():
        raise ValueError("cokernel_structure expects a square matrix")
    return _structure_from_diagonal(smith_normal_form(M).diagonal, M.nrows)


def abelian_reidemeister(M: IntMatrix):
    """Number of twisted classes of the endomorphism ``M`` of ``Z^n``:
    ``|det(I - M)|``, or ``INFINITE`` when that determinant vanishes."""
    if not M.is_square():
        raise ValueError("abelian_reidemeister expects a square matrix")
    d = (IntMatrix.identity(M.nrows) - M).det()
    return INFINITE if d == 0 else abs(d)


def fixed_sublattice_trivial(M: IntMatrix) -> bool:
    if not M.is_square():
        raise ValueError("fixed_sublattice_trivial expects a square matrix")
    return (M - IntMatrix.identity(M.nrows)).det() != 0


class LatticeQuotient:
    """``Z^n`` modulo the row span of a relation matrix, with canonical
    representatives of cosets."""

    def __init__(self, relations: IntMatrix):
        self.dim = relations.ncols
        self.snf = smith_normal_form(relations)
        self._diag = list(self.snf.diagonal) + [0] * (self.dim - len(self.snf.diagonal))

    @property
    def structure(self) -> AbelianGroupStructure:
        return _structure_from_diagonal(self._diag, self.dim)

    def free_coordinates(self) -> list[int]:
        return [j for j, d in enumerate(self._diag) if d == 0]

    def coordinates(self, v: Sequence[int]) -> tuple[int, ...]:
        # rowspan(R) V == rowspan(D), so v V reduced modulo d_j is canonical
        return self.snf.V.row_times(v)

    def canonical(self, v: Sequence[int]) -> tuple[int, ...]:
        c = self.coordinates(v)
        return tuple(x % d if d else x for x, d in zip(c, self._diag) if d != 1)

    def free_part(self, v: Sequence[int]) -> tuple[int, ...]:
        c = self.coordinates(v)
        return tuple(c[j] for j in self.free_coordinates())

    def free_basis_lifts(self) -> list[tuple[int, ...]]:
        """Vectors of ``Z^n`` mapping to the standard basis of the free part."""
        Vinv = _unimodular_inverse(self.snf.V)
        return [Vinv.rows[j] for j in self.free_coordinates()]


def _unimodular_inverse(V: IntMatrix) -> IntMatrix:
    n = V.nrows
    d = V.det()
    if abs(d) != 1:
        raise ValueError("matrix is not unimodular")
    # adjugate / det, exact since det = +-1
    cof = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = IntMatrix([[V[r, c] for c in range(n) if c != j] for r in range(n) if r != i], n - 1)
            cof[i][j] = (-1) ** (i + j) * (minor.det() if n > 1 else 1)
    return IntMatrix([[cof[j][i] * d for j in range(n)] for i in range(n)], n)


def induced_free_part_map(quotient: LatticeQuotient, M: IntMatrix) -> IntMatrix:
    """Matrix (row form) of the map induced by ``v -> v @ M`` on the free part
    of ``quotient``.  ``M`` must preserve the relation lattice."""
    return IntMatrix([quotient.free_part(M.row_times(lift)) for lift in quotient.free_basis_lifts()], len(quotient.free_coordinates()))


class SupportedVector:
    """A finitely supported integer vector indexed by all integers."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[int, int] = {}
        for k, v in items:
            acc[k] = acc.get(k, 0) + v
        self._coeffs = {k: v for k, v in sorted(acc.items()) if v != 0}

    @classmethod
    def basis(cls, index: int, coeff: int = 1) -> "SupportedVector":
        return cls({index: coeff})

    def items(self):
        return self._coeffs.items()

    def support(self) -> tuple[int, ...]:
        return tuple(self._coeffs)

    def __getitem__(self, index: int) -> int:
        return self._coeffs.get(index, 0)

    def __add__(self, other: "SupportedVector") -> "SupportedVector":
        return SupportedVector(list(self.items()) + list(other.items()))

    def __neg__(self) -> "SupportedVector":
        return SupportedVector({k: -v for k, v in self.items()})

    def __sub__(self, other: "SupportedVector") -> "SupportedVector":
        return self + (-other)

    def __rmul__(self, n: int) -> "SupportedVector":
        return SupportedVector({k: n * v for k, v in self.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, SupportedVector):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(tuple(self._coeffs.items()))

    def augmentation(self) -> int:
        return sum(self._coeffs.values())

    def __str__(self) -> str:
        if not self._coeffs:
            return "0"
        out = ""
        for k, v in self._coeffs.items():
            sign = "-" if v < 0 else "+"
            mag = "" if abs(v) == 1 else f"{abs(v)}"
            term = f"{mag}e{k}" if k >= 0 else f"{mag}e({k})"
            out += (f" {sign} " if out else ("-" if v < 0 else "")) + term
        return out

    def __repr__(self) -> str:
        return f"SupportedVector({self})"


def supported_apply(images: Mapping[int, SupportedVector], v: SupportedVector) -> SupportedVector:
    out = SupportedVector()
    for k, c in v.items():
        if k not in images:
            raise KeyError(f"no image given for basis index {k}")
        out = out + c * images[k]
    return out
