"""Free-group words, centralizers and recognizing automorphisms of F_2."""

from reidemeister import (
    FreeMorphism,
    centralizer_free,
    compose,
    cyclic_reduce,
    find_inner_witness,
    format_word,
    parse_word,
    primitive_root,
    rank2_inverse,
)

XY = ["x", "y"]


def fmt(f):
    return ", ".join(f"{n} -> {format_word(w, XY)}" for n, w in zip(XY, f.images))


def show(label, w):
    print(f"{label:>28}: {format_word(w, XY)}")


w = parse_word("x y x y x^-1 x", XY)
show("reduced", w)
root, n = primitive_root(w)
show(f"primitive root (power {n})", root)
print(f"{'centralizer':>28}: {centralizer_free(w).tag} on {format_word(centralizer_free(w).root, XY)}")

core, conj = cyclic_reduce(parse_word("y x^2 y^-1", XY))
show("cyclic core of y x^2 y^-1", core)
show("conjugator", conj)

# Nielsen reduction finds an inverse when one exists
f = FreeMorphism(2, 2, [parse_word("y x y", XY), parse_word("x y", XY)])
inv = rank2_inverse(f)
print("\nf:", fmt(f))
print("inverse:", fmt(inv), "| f o f^-1 is identity:", compose(f, inv).is_identity())

g = FreeMorphism(2, 2, [parse_word("x^2 y x^-1", XY), parse_word("y", XY)])
print("g:", fmt(g), "| automorphism:", rank2_inverse(g) is not None, f"(abelianization det {g.abelianization().det()})")

# conjugation by c is recognized as inner, with c recovered
c = parse_word("x y^-1", XY)
h = FreeMorphism.conjugation(c)
show("inner witness for conj by x y^-1", find_inner_witness(h, 3))
