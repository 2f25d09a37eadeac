"""Polyfree groups F_r x| F_s: arithmetic, centralizers, abelianization, Euler data."""

from reidemeister import (
    FreeMorphism,
    PfGroup,
    Word,
    ball_enumerate,
    centralizer,
    descriptor_contains,
    direct_product,
    euler_data,
    klein_bottle_group,
)

K = klein_bottle_group()
a, b = K.generators
print("Klein bottle:", K)
print("  b a   =", K.format(K.multiply(b, a)))
print("  (a b)^-1 =", K.format(K.invert(K.multiply(a, b))))
print("  abelianization:", K.abelianization())

# Z x| F_2, u inverting a and v acting trivially
invert = FreeMorphism(1, 1, [Word(1, [-1])])
G = PfGroup(1, 2, [invert, FreeMorphism.identity(1)], kernel_names=["a"], quotient_names=["u", "v"])
ball = ball_enumerate(G, 3)
print(f"\nZ x| F_2, radius-3 ball of {len(ball)} elements")
for text in ("a", "u v", "a u^2", "a u"):
    g = G.parse(text)
    d = centralizer(G, g)
    agree = all(G.commutes(g, h) == descriptor_contains(G, d, h) for h in ball)
    print(f"  C({text:6}) -> {d.tag:26} brute force agrees: {agree}")

F = direct_product(2, 2)
d = centralizer(F, F.parse("x^2 u"))
print(f"\nF_2 x F_2: C(x^2 u) -> {d.tag}")

for ranks in ((2, 2), (3, 2), (2, 1)):
    e = euler_data(ranks)
    print(f"ranks {ranks}: length {e.length}, chi {e.characteristic}, series bound {e.bound}")
