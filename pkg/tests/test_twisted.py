import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_gl2
from reidemeister import (
    INFINITE,
    FreeMorphism,
    IntMatrix,
    PfGroup,
    PfMorphism,
    VerificationError,
    Word,
    abelian_class_invariant,
    abelian_reidemeister,
    ball_enumerate,
    certify_r_infinite,
    direct_product,
    family_automorphism,
    finite_quotient_count,
    klein_bottle_group,
    make_mapping_torus,
    twisted_orbit_report,
)
from reidemeister.twisted import AbelianInvariant, Conclusion, UnionFind, orbit_partition

Z = PfGroup(0, 1)
Z2 = PfGroup(1, 1, kernel_names=["a"], quotient_names=["b"])


def z2_morphism(M):
    """Automorphism of Z^2 = <a> x <b> with row form M."""
    (p, q), (r, s) = M.rows
    det = p * s - q * r
    inv = [[s * det, -q * det], [-r * det, p * det]]
    img = [Z2.element(Word.generator(1, 0, row[0]), Word.generator(1, 0, row[1])) for row in (M.rows)]
    back = [Z2.element(Word.generator(1, 0, row[0]), Word.generator(1, 0, row[1])) for row in inv]
    return PfMorphism(Z2, img, back)


NEG = PfMorphism.from_text(Z, ["t^-1"], ["t^-1"])
CAT = z2_morphism(IntMatrix([[2, 1], [1, 1]]))


# ---------------------------------------------------------------- union-find


def test_union_find():
    uf = UnionFind(6)
    assert uf.union(0, 1) and uf.union(2, 3) and uf.union(1, 3)
    assert not uf.union(0, 2)
    assert uf.classes == 3
    assert uf.find(0) == uf.find(3)


# ---------------------------------------------------------------- orbit oracle


def test_orbit_examples():
    r = twisted_orbit_report(Z, PfMorphism.identity(Z), 3, 5)
    assert (r.ball_size, r.class_upper_bound, r.invariant_lower_bound) == (7, 7, 7)
    r = twisted_orbit_report(Z, NEG, 3, 5)
    assert (r.class_upper_bound, r.invariant_lower_bound) == (2, 2)
    r = twisted_orbit_report(Z2, CAT, 4, 6)
    assert (r.class_upper_bound, r.invariant_lower_bound) == (1, 1)
    assert r.unsound_merges == 0


def test_orbit_partition_agrees_with_report():
    part = orbit_partition(Z, NEG, 3, 5)
    ball = ball_enumerate(Z, 3)
    # parity of the t-exponent
    for g, root in zip(ball, part):
        assert (len(g.quotient) - len(ball[root].quotient)) % 2 == 0


@pytest.mark.parametrize(
    "G,phi",
    [
        (Z, NEG),
        (Z2, CAT),
        (klein_bottle_group(), PfMorphism.identity(klein_bottle_group())),
        (Z2, z2_morphism(IntMatrix([[-1, 0], [0, -1]]))),
    ],
    ids=["Z-neg", "Z2-cat", "klein-id", "Z2-minus-id"],
)
def test_monotone_in_conjugator_radius(G, phi):
    prev = None
    for C in range(1, 7):
        r = twisted_orbit_report(G, phi, 3, C)
        assert r.invariant_lower_bound <= r.class_upper_bound
        assert r.unsound_merges == 0
        if prev is not None:
            assert r.class_upper_bound <= prev
        prev = r.class_upper_bound


@pytest.mark.parametrize("M", [[[-1, 0], [0, -1]], [[0, -1], [1, 0]], [[-1, 1], [0, -1]], [[2, 1], [1, 1]], [[1, 1], [1, 0]]])
def test_oracle_reaches_abelian_count(M):
    # for Z^2 the abelian count is the exact Reidemeister number
    M = IntMatrix(M)
    n = abelian_reidemeister(M)
    r = twisted_orbit_report(Z2, z2_morphism(M), 4, 4)
    assert r.invariant_lower_bound == n == r.class_upper_bound


def test_workers_give_identical_reports():
    G = direct_product(2, 1)
    phi = PfMorphism.from_text(G, ["y", "x", "t^-1 x"])
    one = twisted_orbit_report(G, phi, 3, 2, jobs=1)
    four = twisted_orbit_report(G, phi, 3, 2, jobs=4)
    assert "\n".join(one.lines()) == "\n".join(four.lines())


# ---------------------------------------------------------------- invariants


def test_invariant_examples(klein):
    b = klein.parse("b")
    idk = PfMorphism.identity(klein)
    assert abelian_class_invariant(klein, idk, b) != abelian_class_invariant(klein, idk, klein.power(b, 3))
    assert abelian_class_invariant(klein, idk, klein.identity) == AbelianInvariant(klein, idk)(klein.identity)
    inv = AbelianInvariant(Z2, CAT)
    assert len({inv(g) for g in ball_enumerate(Z2, 3)}) == 1 and inv.order == 1


def test_finite_quotient_count_examples():
    assert finite_quotient_count([5], IntMatrix([[1]])) == 5
    assert finite_quotient_count([5], IntMatrix([[2]])) == 1
    assert finite_quotient_count([2, 2], IntMatrix.identity(2)) == 4


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_invariant_is_a_class_function(seed):
    # g and s g phi(s)^-1 always share the invariant
    rng = random.Random(seed)
    G = direct_product(2, 1)
    phi = PfMorphism.from_text(G, ["y", "x t", "t^-1"])
    inv = AbelianInvariant(G, phi)
    pool = ball_enumerate(G, 3)
    g, s = rng.choice(pool), rng.choice(pool)
    h = G.product([s, g, G.invert(phi(s))])
    assert inv(g) == inv(h)


# ---------------------------------------------------------------- swap case


def swap_setup():
    """F_2 x F_2 with phi(a, b) = (phi2(b), phi1(a)), phi1 and phi2 sending the
    generators between the two factors.  Twisted classes of (1, b) follow the
    classes of phi1 o phi2 on F_2."""
    G = direct_product(2, 2)
    phi1 = ["u^-1", "v^-1"]  # x, y -> words in the second factor
    phi2 = ["x", "x y"]  # u, v -> words in the first factor
    phi = PfMorphism.from_text(G, phi1 + phi2)
    F = PfGroup(2, 0, kernel_names=["u", "v"])
    p1 = [F.parse(s) for s in phi1]
    p2 = [F.parse(s.replace("x", "u").replace("y", "v")) for s in phi2]
    phi3 = PfMorphism(F, [PfMorphism(F, p1)(w) for w in p2])
    return G, phi, F, phi3


def test_swap_case_invariants_match():
    G, phi, F, phi3 = swap_setup()
    inv_g = AbelianInvariant(G, phi)
    inv_f = AbelianInvariant(F, phi3)
    M3 = phi3.abelianization()
    assert inv_g.order == inv_f.order == abs((IntMatrix.identity(2) - M3).det()) == 4
    ball = ball_enumerate(F, 3)
    lifted = [G.element(Word.identity(2), b.kernel) for b in ball]
    pairs = list(zip(ball, lifted))
    assert len({inv_f(b) for b in ball}) == len({inv_g(g) for g in lifted}) == 4
    for b1, g1 in pairs:
        for b2, g2 in pairs[:60]:
            assert (inv_f(b1) == inv_f(b2)) == (inv_g(g1) == inv_g(g2))


def test_swap_case_oracle_respects_invariants():
    G, phi, F, phi3 = swap_setup()
    r = twisted_orbit_report(G, phi, 2, 2)
    assert r.unsound_merges == 0
    assert r.invariant_lower_bound == 4 <= r.class_upper_bound


# ---------------------------------------------------------------- certificates


def torus_inversion():
    G = PfGroup(2, 1, [FreeMorphism(2, 2, [Word(2, [-1]), Word(2, [-2])])])
    phi = PfMorphism.from_text(G, ["x", "y", "t^-1"], ["x", "y", "t^-1"])
    return G, phi


def test_certify_examples(klein):
    cert = certify_r_infinite(klein, PfMorphism.from_text(klein, ["a", "b"], ["a", "b"]))
    assert cert.conclusion is Conclusion.R_INFINITE
    assert cert.root.rule == "QuotientWitness"
    assert cert.replay()

    cert = certify_r_infinite(Z2, CAT)
    assert cert.conclusion is Conclusion.UNDECIDED and cert.root is None
    assert all(outcome.startswith("not applicable") for _, outcome in cert.attempts)

    G, phi = torus_inversion()
    cert = certify_r_infinite(G, phi)
    assert cert.root.rule == "AbelianizationWitness"
    assert ("coker_order", "4") in cert.root.evidence
    assert cert.replay()


@pytest.mark.parametrize("k,m,i", [(1, 0, 0), (2, 1, 0), (2, -2, 1), (3, 2, 2), (-2, 1, 1)])
def test_certify_case_d(k, m, i):
    T = make_mapping_torus(k)
    cert = certify_r_infinite(T, family_automorphism(T, "d", m, i).morphism)
    assert cert.conclusion is Conclusion.R_INFINITE
    assert cert.root.rule == "KernelWitnessFixTrivial"
    assert cert.replay()


def test_certify_other_forms_use_quotients():
    T = make_mapping_torus(2)
    for form in "abc":
        cert = certify_r_infinite(T, family_automorphism(T, form, 1, 1).morphism)
        assert cert.conclusion is Conclusion.R_INFINITE and cert.replay()
        assert cert.root.rule == "QuotientWitness"


def test_certify_rejects_unverified():
    T = make_mapping_torus(2)
    with pytest.raises(VerificationError):
        certify_r_infinite(T, PfMorphism.from_text(T.group, ["x", "y", "t"]))
    with pytest.raises(VerificationError):
        certify_r_infinite(klein_bottle_group(), PfMorphism.from_text(T.group, ["x", "y", "t"], ["x", "y", "t"]))


def test_replay_detects_tampering(klein):
    from dataclasses import replace

    cert = certify_r_infinite(klein, PfMorphism.from_text(klein, ["a", "b"], ["a", "b"]))
    leaves = [n for n in cert.root.walk() if n.rule == "DirectComputation"]
    assert leaves
    broken = replace(leaves[0], check=lambda: False)

    def swap(node):
        if node is leaves[0]:
            return broken
        return replace(node, children=tuple(swap(c) for c in node.children))

    assert not replace(cert, root=swap(cert.root)).replay()


def test_serialization_is_stable():
    T = make_mapping_torus(3)
    th = family_automorphism(T, "d", -1, 2).morphism
    a = certify_r_infinite(T, th).serialize()
    T2 = make_mapping_torus(3)
    b = certify_r_infinite(T2, family_automorphism(T2, "d", -1, 2).morphism).serialize()
    assert a == b
    assert a.startswith("conclusion: R_INFINITE\nattempts:\n")


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_certifier_sound_on_z2(seed, length):
    # on Z^2 the abelian count is exact: R_INFINITE iff det(I - M) = 0
    M = random_gl2(random.Random(seed), length)
    cert = certify_r_infinite(Z2, z2_morphism(M))
    assert cert.conclusion is not Conclusion.R_FINITE
    if cert.conclusion is Conclusion.R_INFINITE:
        assert abelian_reidemeister(M) is INFINITE
        assert cert.replay()
    else:
        assert abelian_reidemeister(M) is not INFINITE
