"""Certifying R(phi) = infinity, and the brute-force orbit oracle beside it."""

from reidemeister import (
    FreeMorphism,
    PfGroup,
    PfMorphism,
    Word,
    certify_r_infinite,
    family_automorphism,
    klein_bottle_group,
    make_mapping_torus,
    twisted_orbit_report,
)

K = klein_bottle_group()
cert = certify_r_infinite(K, PfMorphism.from_text(K, ["a", "b"], ["a", "b"]))
print(cert.serialize())

T = make_mapping_torus(2)
cert = certify_r_infinite(T, family_automorphism(T, "d", 1, 0).morphism)
print(cert.serialize())
print("replays:", cert.replay())

# F_2 x| Z with t inverting both generators; the automorphism inverts t
G = PfGroup(2, 1, [FreeMorphism(2, 2, [Word(2, [-1]), Word(2, [-2])])])
cert = certify_r_infinite(G, PfMorphism.from_text(G, ["x", "y", "t^-1"], ["x", "y", "t^-1"]))
print("inversion torus:", cert.conclusion.value, "via", cert.root.rule)

# Z^2 with the cat map has a single twisted class: honest UNDECIDED
Z2 = PfGroup(1, 1, kernel_names=["a"], quotient_names=["b"])
cat = PfMorphism.from_text(Z2, ["a^2 b", "a b"], ["a b^-1", "a^-1 b^2"])
print("cat map:", certify_r_infinite(Z2, cat).conclusion.value)
for C in range(1, 7):
    r = twisted_orbit_report(Z2, cat, 4, C)
    print(f"  L=4 C={C}: at most {r.class_upper_bound} classes, at least {r.invariant_lower_bound}")
