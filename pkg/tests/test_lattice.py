import itertools
import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import matrices
from reidemeister import (
    INFINITE,
    IntMatrix,
    SupportedVector,
    abelian_reidemeister,
    cokernel_structure,
    fixed_sublattice_trivial,
    finite_quotient_count,
    smith_normal_form,
    supported_apply,
)
from reidemeister.lattice import LatticeQuotient, induced_free_part_map


def check_snf(M):
    snf = smith_normal_form(M)
    assert snf.U @ M @ snf.V == snf.D
    assert abs(snf.U.det()) == 1 and abs(snf.V.det()) == 1
    D = snf.D
    for i in range(D.nrows):
        for j in range(D.ncols):
            if i != j:
                assert D[i, j] == 0
    diag = list(snf.diagonal)
    assert all(d >= 0 for d in diag)
    for a, b in zip(diag, diag[1:]):
        assert (b == 0) or (a != 0 and b % a == 0)
    return snf


def test_snf_examples():
    assert check_snf(IntMatrix.identity(2)).D == IntMatrix.identity(2)
    assert check_snf(IntMatrix([[2, 0], [0, 3]])).D == IntMatrix([[1, 0], [0, 6]])
    assert check_snf(IntMatrix([[0, 3], [0, 0]])).D == IntMatrix([[3, 0], [0, 0]])


def test_diag_2_3_matches_determinantal_divisors():
    # invariant factors are gcds of k x k minors divided by the previous ones
    M = IntMatrix([[2, 0], [0, 3]])

    d1 = 0
    for x in (M[0, 0], M[0, 1], M[1, 0], M[1, 1]):
        d1 = gcd(d1, x)
    d2 = abs(M.det()) // d1
    assert tuple(smith_normal_form(M).diagonal) == (d1, d2) == (1, 6)


def test_snf_thousand_random_4x4():
    rng = random.Random(20261015)
    for _ in range(1000):
        M = IntMatrix([[rng.randint(-10, 10) for _ in range(4)] for _ in range(4)])
        check_snf(M)


@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_snf_rectangular(m, n, data):
    rows = data.draw(st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m))
    check_snf(IntMatrix(rows, n))


def test_cokernel_examples():
    s = cokernel_structure(IntMatrix([[2, 0], [0, 2]]))
    assert (s.free_rank, tuple(s.torsion), s.order) == (0, (2, 2), 4)
    t = cokernel_structure(IntMatrix.identity(2))
    assert (t.free_rank, tuple(t.torsion), t.order) == (0, (), 1)
    u = cokernel_structure(IntMatrix([[2, -1], [0, 2]]))
    assert (tuple(u.torsion), u.order) == ((4,), 4)
    assert cokernel_structure(IntMatrix([[0, 3], [0, 0]])).order is INFINITE


def residue_count(A):
    """|Z^n / column span of A| by brute force: every residue class has a
    representative in [0, d)^n, d = |det A|; merge the box modulo the lattice."""
    n = A.nrows
    d = abs(A.det())
    cols = [tuple(A[i, j] for i in range(n)) for j in range(n)]
    box = list(itertools.product(range(d), repeat=n))
    parent = {p: p for p in box}

    def find(p):
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        return p

    for p in box:
        for c in cols:
            q = tuple((p[i] + c[i]) % d for i in range(n))
            parent[find(p)] = find(q)
    return len({find(p) for p in box})


def test_cokernel_example_enumerated():
    assert residue_count(IntMatrix([[2, -1], [0, 2]])) == 4
    assert residue_count(IntMatrix([[2, 0], [0, 2]])) == 4


@pytest.mark.parametrize("seed", range(25))
def test_abelian_reidemeister_vs_residue_count_3x3(seed):
    rng = random.Random(seed)
    while True:
        M = IntMatrix([[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)])
        d = abs((IntMatrix.identity(3) - M).det())
        if 0 < d <= 12:
            break
    assert abelian_reidemeister(M) == residue_count(IntMatrix.identity(3) - M) == d


def test_abelian_reidemeister_examples():
    for m in range(-2, 3):
        assert abelian_reidemeister(IntMatrix([[1, -m], [0, 1]])) is INFINITE
        assert abelian_reidemeister(IntMatrix([[-1, m], [0, -1]])) == 4
    assert abelian_reidemeister(IntMatrix([[2, 1], [1, 1]])) == 1


def test_infinite_is_a_singleton_symbol():
    import pickle

    assert pickle.loads(pickle.dumps(INFINITE)) is INFINITE
    assert not isinstance(INFINITE, int)
    assert str(INFINITE) == "INFINITE"


def rational_kernel_trivial(A):
    """Gaussian elimination over Q: does A x = 0 only have x = 0?"""
    rows = [[Fraction(x) for x in r] for r in A.rows]
    n = A.ncols
    rank = 0
    for col in range(n):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank == n


def test_fixed_sublattice_examples():
    for m in (-2, 1, 3):
        assert fixed_sublattice_trivial(IntMatrix([[-1, m], [0, -1]]))
        assert not fixed_sublattice_trivial(IntMatrix([[1, -m], [0, 1]]))
    assert not fixed_sublattice_trivial(IntMatrix.identity(2))


@given(st.integers(1, 4).flatmap(lambda n: matrices(n, -3, 3)))
def test_fixed_sublattice_matches_rational_nullspace(M):
    assert fixed_sublattice_trivial(M) == rational_kernel_trivial(M - IntMatrix.identity(M.nrows))


def test_finite_quotient_count_examples():
    assert finite_quotient_count([5], IntMatrix([[1]])) == 5
    assert finite_quotient_count([5], IntMatrix([[2]])) == 1
    assert finite_quotient_count([2, 2], IntMatrix.identity(2)) == 4
    with pytest.raises(ValueError):
        finite_quotient_count([2, 3], IntMatrix([[1, 1], [0, 1]]))


def test_lattice_quotient_canonical_representatives():
    Q = LatticeQuotient(IntMatrix([[2, 0, 0], [0, 3, 0]]))
    assert str(Q.structure) == "Z + Z/6"
    assert Q.canonical((2, 0, 5)) == Q.canonical((0, 0, 5))
    assert Q.canonical((0, 3, 1)) == Q.canonical((0, 0, 1))
    assert Q.canonical((1, 0, 0)) != Q.canonical((0, 0, 0))
    assert Q.free_part((7, 5, -2)) in ((-2,), (2,))


def test_induced_free_part_map():
    # Z^2 / <(2, 0)> has free part spanned by e_1, on which M acts by -1
    Q = LatticeQuotient(IntMatrix([[2, 0]]))
    N = induced_free_part_map(Q, IntMatrix([[1, 0], [0, -1]]))
    assert N == IntMatrix([[-1]])


# ---------------------------------------------------------------- supported vectors

e = SupportedVector.basis


def test_supported_vector_basics():
    v = e(0) + e(0) - e(0) - e(0)
    assert v == SupportedVector() and v.support() == ()
    assert str(e(1) - e(0)) == "-e0 + e1"
    assert (2 * e(3)).augmentation() == 2


def test_supported_apply_examples():
    ident = {i: e(i) for i in range(-3, 4)}
    assert supported_apply(ident, e(0)) == e(0)
    assert supported_apply({0: e(0)}, 2 * e(0)) == 2 * e(0)
    shift = {i: e(i + 1) for i in range(-3, 4)}
    assert supported_apply(shift, e(0) - e(1)) == e(1) - e(2)
    with pytest.raises(KeyError):
        supported_apply({0: e(0)}, e(1))


vectors = st.dictionaries(st.integers(-3, 3), st.integers(-4, 4), max_size=5).map(SupportedVector)


@given(vectors, vectors, st.lists(vectors, min_size=7, max_size=7))
def test_supported_apply_additive(u, v, imgs):
    images = dict(zip(range(-3, 4), imgs))
    assert supported_apply(images, u + v) == supported_apply(images, u) + supported_apply(images, v)


def test_snf_diagonal_matches_sympy():
    sympy = pytest.importorskip("sympy")
    from sympy.matrices.normalforms import smith_normal_form as sympy_snf

    rng = random.Random(99)
    for _ in range(200):
        n, m = rng.randint(1, 4), rng.randint(1, 4)
        rows = [[rng.randint(-9, 9) for _ in range(m)] for _ in range(n)]
        D = sympy_snf(sympy.Matrix(rows), domain=sympy.ZZ)
        theirs = sorted(abs(int(D[i, i])) for i in range(min(n, m)))
        assert sorted(smith_normal_form(IntMatrix(rows, m)).diagonal) == theirs
