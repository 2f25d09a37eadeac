"""Mapping tori M_k = <x, y, t | t^-1 x t = x y^k, t^-1 y t = y> and their automorphisms."""

from reidemeister import (
    IntMatrix,
    SupportedVector,
    bmv_classify,
    eta_ab_image,
    family_automorphism,
    make_mapping_torus,
    rs_rewrite,
)
from reidemeister.torus import induced_quotient_matrix, verify_relators

T = make_mapping_torus(2)
G = T.group
print("t x =", G.format(G.multiply(T.t, T.x)), "(normal form, t pushed right)")
print("monodromy abelianized:", T.monodromy.abelianization(), "->", bmv_classify(T.monodromy.abelianization()).name)

I = IntMatrix.identity(2)
for form in "abcd":
    th = family_automorphism(T, form, 1, 1)
    Q = induced_quotient_matrix(T, th)
    print(f"form {form}: {th.morphism}")
    print(f"   relators ok {verify_relators(T, th.morphism)}, induced {Q}, det(I - Q) = {(I - Q).det()}")

# on H = <<y>>, written in the basis e_p = x^p y x^-p
print("\nrewrite x y x^-1 y^-1 ->", rs_rewrite(T, T.parse("x y x^-1 y^-1")))
d = family_automorphism(T, "d", 1, 0)
print("form d sends e0 to", eta_ab_image(d, 0))
primed = family_automorphism(T, "d", 1, 0, T.parse("x t"))
v = eta_ab_image(primed, 0)
print(f"form d' with g = x t sends e0 to {v} (coefficient sum {v.augmentation()}, still {SupportedVector.basis(0).augmentation()})")
