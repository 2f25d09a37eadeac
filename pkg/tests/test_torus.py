import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_gl2
from reidemeister import (
    GroupError,
    IntMatrix,
    PfMorphism,
    SupportedVector,
    ball_enumerate,
    bmv_classify,
    eta_ab_image,
    family_automorphism,
    make_mapping_torus,
    rs_rewrite,
)
from reidemeister.torus import (
    BmvCase,
    bmv_predicates,
    closed_form_images,
    induced_quotient_matrix,
    kernel_membership,
    quotient_coordinates,
    verify_relators,
    y_exponent_scale,
)

e = SupportedVector.basis
GRID = [(k, m, i) for k in (1, 2, 3, -2) for m in range(-2, 3) for i in range(abs(k))]


# ---------------------------------------------------------------- construction


def test_relators_hold_in_normal_form():
    for k in (1, 2, 3, -1, -3):
        T = make_mapping_torus(k)
        G = T.group
        tinv = G.invert(T.t)
        assert G.product([tinv, T.x, T.t]) == G.multiply(T.x, G.power(T.y, k))
        assert G.product([tinv, T.y, T.t]) == T.y


def test_normal_form_convention():
    # t^-1 x t = x y^2 forces t x = x y^-2 t
    T = make_mapping_torus(2)
    G = T.group
    assert G.multiply(T.t, T.x) == T.parse("x y^-2 t")
    assert G.multiply(T.t, T.y) == T.parse("y t")
    assert G.multiply(T.x, T.t) == G.element(T.x.kernel, T.t.quotient)


def test_k_zero_rejected():
    with pytest.raises(GroupError):
        make_mapping_torus(0)


# ---------------------------------------------------------------- classification


def test_bmv_examples():
    assert bmv_classify(IntMatrix.identity(2)) is BmvCase.I_identity
    assert bmv_classify(-IntMatrix.identity(2)) is BmvCase.II_minus_identity
    assert bmv_classify(IntMatrix([[1, 3], [0, -1]])) is BmvCase.IV_det_minus_one_with_eigenvalue_one
    assert bmv_classify(IntMatrix([[1, 2], [0, 1]])) is BmvCase.V_unipotent_nonidentity
    assert bmv_classify(IntMatrix([[2, 1], [1, 1]])) is BmvCase.III_no_eigenvalue_one
    with pytest.raises(ValueError):
        bmv_classify(IntMatrix([[2, 0], [0, 1]]))


def conjugate_to_normal_form(M, case, box=3, kmax=8):
    """Search P in GL_2(Z) with small entries and P M P^-1 = [[1, n], [0, +-1]]."""
    sign = -1 if case is BmvCase.IV_det_minus_one_with_eigenvalue_one else 1
    for a, b, c, d in itertools.product(range(-box, box + 1), repeat=4):
        det = a * d - b * c
        if abs(det) != 1:
            continue
        P = IntMatrix([[a, b], [c, d]])
        Pinv = IntMatrix([[d * det, -b * det], [-c * det, a * det]])
        N = P @ M @ Pinv
        if N[0, 0] == 1 and N[1, 0] == 0 and N[1, 1] == sign and abs(N[0, 1]) <= kmax:
            return N
    return None


@pytest.mark.parametrize("seed", range(30))
def test_bmv_cases_iv_v_have_their_normal_forms(seed):
    # the eigenvalue test agrees with an explicit integral conjugacy search
    M = random_gl2(random.Random(seed), 3)
    case = bmv_classify(M)
    if case in (BmvCase.IV_det_minus_one_with_eigenvalue_one, BmvCase.V_unipotent_nonidentity):
        N = conjugate_to_normal_form(M, case)
        assert N is not None, M
        assert case is BmvCase.IV_det_minus_one_with_eigenvalue_one or N[0, 1] != 0


@given(st.integers(0, 10**6), st.integers(1, 8))
def test_bmv_total_and_single_valued(seed, length):
    M = random_gl2(random.Random(seed), length)
    preds = bmv_predicates(M)
    assert sum(preds.values()) == 1
    assert preds[bmv_classify(M)]


# ---------------------------------------------------------------- families


def test_family_examples():
    T = make_mapping_torus(2)
    assert family_automorphism(T, "a", 0, 0).morphism == PfMorphism.identity(T.group)
    assert list(family_automorphism(T, "a", 1, 0).morphism.images) == [T.parse(s) for s in ("t^-1 x", "y", "t")]
    d = family_automorphism(T, "d", 0, 0).morphism
    assert list(d.images) == [T.parse(s) for s in ("x^-1", "y", "t^-1 y^2")]
    for k in (1, 3):
        T = make_mapping_torus(k)
        assert family_automorphism(T, "a", 1, 0).morphism.images[0] == T.parse("t^-1 x")


def test_family_range_checks():
    T = make_mapping_torus(2)
    with pytest.raises(ValueError):
        family_automorphism(T, "a", 0, 2)
    with pytest.raises(ValueError):
        family_automorphism(T, "e", 0, 0)


@pytest.mark.parametrize("k,m,i", GRID)
def test_family_grid(k, m, i):
    T = make_mapping_torus(k)
    expected = {"a": [[1, -m], [0, 1]], "b": [[1, -m], [0, -1]], "c": [[-1, m], [0, 1]], "d": [[-1, m], [0, -1]]}
    for form in "abcd":
        th = family_automorphism(T, form, m, i)
        assert verify_relators(T, th.morphism)
        assert list(th.morphism.images) == closed_form_images(T, form, m, i)
        assert induced_quotient_matrix(T, th) == IntMatrix(expected[form])
        assert th.morphism.has_verified_inverse()


def test_primed_families_verify():
    T = make_mapping_torus(2)
    for g in ball_enumerate(T.group, 2):
        for form in "abcd":
            th = family_automorphism(T, form, 1, 1, g)
            assert verify_relators(T, th.morphism)
            # conjugation does not change the induced quotient map
            assert induced_quotient_matrix(T, th) == induced_quotient_matrix(T, family_automorphism(T, form, 1, 1))


# ---------------------------------------------------------------- the kernel H


def test_rs_rewrite_examples():
    T = make_mapping_torus(2)
    assert rs_rewrite(T, T.parse("y")) == e(0)
    assert rs_rewrite(T, T.parse("x y x^-1 y^-1")) == e(1) - e(0)
    assert rs_rewrite(T, T.parse("y y")) == 2 * e(0)
    assert not kernel_membership(T, T.parse("x"))
    with pytest.raises(ValueError):
        rs_rewrite(T, T.parse("t"))


def kernel_words(T, radius):
    return [g for g in ball_enumerate(T.group, radius) if kernel_membership(T, g)]


def test_rs_rewrite_is_homomorphism():
    T = make_mapping_torus(2)
    pool = kernel_words(T, 4)
    rng = random.Random(3)
    for _ in range(300):
        g, h = rng.choice(pool), rng.choice(pool)
        assert rs_rewrite(T, T.group.multiply(g, h)) == rs_rewrite(T, g) + rs_rewrite(T, h)


def test_eta_examples():
    T = make_mapping_torus(2)
    assert eta_ab_image(family_automorphism(T, "d", 0, 0), 0) == e(0)
    assert eta_ab_image(PfMorphism.identity(T.group), 1, T) == e(1)
    assert eta_ab_image(family_automorphism(T, "a", 0, 1), 1) == e(1)


@pytest.mark.parametrize("k,m,i", GRID)
def test_eta_fixes_e0_for_case_d(k, m, i):
    T = make_mapping_torus(k)
    th = family_automorphism(T, "d", m, i)
    assert eta_ab_image(th, 0) == e(0)
    assert y_exponent_scale(T, th) == 1


def test_eta_primed_case_d_moves_e0_by_the_x_exponent_of_g():
    # Theta' = Psi^-m gamma_g^-1 Omega Delta Xi^i sends y to a conjugate of y by
    # a word of x-exponent -p, p the x-exponent of g, so e_0 goes to e_{-p}.
    # The augmentation is still preserved.
    for k in (1, 2, 3):
        T = make_mapping_torus(k)
        for g in ball_enumerate(T.group, 2):
            p = quotient_coordinates(T, g)[0]
            for m in (-1, 0, 2):
                th = family_automorphism(T, "d", m, 0, g)
                assert eta_ab_image(th, 0) == e(-p)
                assert y_exponent_scale(T, th) == 1
