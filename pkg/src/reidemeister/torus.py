"""Mapping tori of F_2: ``M_k = <x, y, t | t^-1 x t = x y^k, t^-1 y t = y>``.

``M_k`` is realized as the PfGroup ``F_2 x| Z``.  Since PfGroup actions obey
``t a t^-1 = theta_t(a)``, the stored action is the inverse of the
monodromy: ``theta_t = (x -> x y^-k, y -> y)``.

Automorphisms compose as ordinary functions (``f o g`` applies ``g``
first).  A product such as ``Psi^-m Omega Delta Xi^i`` is read as the
composite ``Psi^-m o Omega o Delta o Xi^i``; with that reading the four
families reproduce the closed-form images below exactly, which
``family_automorphism`` checks on every call.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .lattice import IntMatrix, SupportedVector
from .polyfree import GroupError, PfElement, PfGroup, PfMorphism, VerificationError
from .words import FreeMorphism, Word, exponent_sum


class MappingTorus:
    def __init__(self, k: int):
        if k == 0:
            raise GroupError("k = 0 gives F_2 x Z; build it with build_group instead")
        self.k = k
        x, y = Word.generator(2, 0), Word.generator(2, 1)
        self.monodromy = FreeMorphism(2, 2, [x * y**k, y])
        action = FreeMorphism(2, 2, [x * y**-k, y])
        self.group = PfGroup(2, 1, [action], [self.monodromy], kernel_names=["x", "y"], quotient_names=["t"])
        G = self.group
        self.x, self.y, self.t = G.generators

    def parse(self, text: str) -> PfElement:
        return self.group.parse(text)

    def __repr__(self) -> str:
        return f"MappingTorus(k={self.k})"


def make_mapping_torus(k: int) -> MappingTorus:
    return MappingTorus(k)


def verify_relators(T: MappingTorus, f: PfMorphism) -> bool:
    """Check ``f(t)^-1 f(x) f(t) = f(x) f(y)^k`` and ``f(t)^-1 f(y) f(t) = f(y)``."""
    G = T.group
    fx, fy, ft = f.images
    tinv = G.invert(ft)
    lhs1 = G.product([tinv, fx, ft])
    rhs1 = G.multiply(fx, G.power(fy, T.k))
    lhs2 = G.product([tinv, fy, ft])
    return lhs1 == rhs1 and lhs2 == fy


# ---------------------------------------------------------------- classification


class BmvCase(enum.Enum):
    I_identity = "i"
    II_minus_identity = "ii"
    III_no_eigenvalue_one = "iii"
    IV_det_minus_one_with_eigenvalue_one = "iv"
    V_unipotent_nonidentity = "v"


def bmv_predicates(M: IntMatrix) -> dict[BmvCase, bool]:
    """The five defining conditions, each evaluated on its own."""
    I = IntMatrix.identity(2)
    d = M.det()
    eig1 = (M - I).det() == 0
    return {
        BmvCase.I_identity: M == I,
        BmvCase.II_minus_identity: M == -I,
        BmvCase.III_no_eigenvalue_one: M != -I and not eig1,
        BmvCase.IV_det_minus_one_with_eigenvalue_one: d == -1 and eig1,
        BmvCase.V_unipotent_nonidentity: d == 1 and eig1 and M != I,
    }


def bmv_classify(M: IntMatrix) -> BmvCase:
    """Which of the five cases the abelianized automorphism ``M`` of ``Z^2`` falls in."""
    if M.shape != (2, 2):
        raise ValueError("bmv_classify expects a 2x2 matrix")
    if abs(M.det()) != 1:
        raise ValueError(f"matrix {M} is not in GL_2(Z)")
    I = IntMatrix.identity(2)
    if M == I:
        return BmvCase.I_identity
    if M == -I:
        return BmvCase.II_minus_identity
    if (M - I).det() != 0:
        return BmvCase.III_no_eigenvalue_one
    if M.det() == -1:
        return BmvCase.IV_det_minus_one_with_eigenvalue_one
    return BmvCase.V_unipotent_nonidentity


# ---------------------------------------------------------------- automorphisms


def _morph(T: MappingTorus, images, inverse) -> PfMorphism:
    G = T.group
    return PfMorphism(G, [G.parse(s) for s in images], [G.parse(s) for s in inverse])


def psi(T: MappingTorus) -> PfMorphism:
    return _morph(T, ["t x", "y", "t"], ["t^-1 x", "y", "t"])


def omega(T: MappingTorus) -> PfMorphism:
    return _morph(T, ["x", "y^-1", "t^-1"], ["x", "y^-1", "t^-1"])


def delta(T: MappingTorus) -> PfMorphism:
    k = T.k
    return _morph(T, ["x^-1", "y^-1", f"t y^{-k}"], ["x^-1", "y^-1", f"t y^{-k}"])


def xi(T: MappingTorus) -> PfMorphism:
    return _morph(T, ["x y", "y", "t"], ["x y^-1", "y", "t"])


def inner(T: MappingTorus, g: PfElement) -> PfMorphism:
    """``u -> g u g^-1``."""
    G = T.group
    ginv = G.invert(g)
    return PfMorphism(G, [G.conjugate(g, h) for h in G.generators], [G.conjugate(ginv, h) for h in G.generators])


def morphism_power(f: PfMorphism, n: int) -> PfMorphism:
    base = f if n >= 0 else f.inverse()
    out = PfMorphism.identity(f.group)
    for _ in range(abs(n)):
        out = out.compose(base)
    return out


_FORMS = {
    # factors between Psi^-m (and the optional inner factor) and Xi^i
    "a": (),
    "b": ("omega",),
    "c": ("delta",),
    "d": ("omega", "delta"),
}


def closed_form_images(T: MappingTorus, form: str, m: int, i: int) -> list[PfElement]:
    k = T.k
    text = {
        "a": [f"t^{-m} x y^{i}", "y", "t"],
        "b": [f"t^{-m} x y^{-i}", "y^-1", "t^-1"],
        "c": [f"x^-1 t^{m} y^{-i}", "y^-1", f"t y^{-k}"],
        "d": [f"x^-1 t^{m} y^{i}", "y", f"t^-1 y^{k}"],
    }[form]
    return [T.parse(s) for s in text]


@dataclass(frozen=True)
class FamilyAutomorphism:
    torus: MappingTorus
    form: str
    m: int
    i: int
    g: PfElement | None
    morphism: PfMorphism

    @property
    def primed(self) -> bool:
        return self.g is not None

    def label(self) -> str:
        G = self.torus.group
        tail = f" g={G.format(self.g)}" if self.g is not None else ""
        return f"form={self.form}{chr(39) if self.primed else ''} m={self.m} i={self.i}{tail}"


def family_automorphism(T: MappingTorus, form: str, m: int, i: int, g: PfElement | None = None) -> FamilyAutomorphism:
    """Build ``Psi^-m [gamma_g^-1] F Xi^i`` for ``F`` in {1, Omega, Delta, Omega Delta}."""
    if form not in _FORMS:
        raise ValueError(f"unknown form {form!r}; expected one of a, b, c, d")
    if not 0 <= i <= abs(T.k) - 1:
        raise ValueError(f"i = {i} outside 0..{abs(T.k) - 1}")
    factors = [morphism_power(psi(T), -m)]
    if g is not None:
        factors.append(inner(T, g).inverse())
    named = {"omega": omega, "delta": delta}
    factors.extend(named[n](T) for n in _FORMS[form])
    factors.append(morphism_power(xi(T), i))
    theta = factors[0]
    for f in factors[1:]:
        theta = theta.compose(f)
    if not verify_relators(T, theta):
        raise VerificationError(f"family automorphism form={form} m={m} i={i} fails the relators")
    if g is None and list(theta.images) != closed_form_images(T, form, m, i):
        raise VerificationError(f"family automorphism form={form} m={m} i={i} disagrees with its closed form")
    return FamilyAutomorphism(T, form, m, i, g, theta)


# ---------------------------------------------------------------- quotient Z^2


def quotient_coordinates(T: MappingTorus, g: PfElement) -> tuple[int, int]:
    """``(w_x, w_t)``: exponent sums of ``x`` and ``t``; ``y`` dies."""
    return exponent_sum(g.kernel, 0), sum(1 if c > 0 else -1 for c in g.quotient.codes)


def _morphism_of(theta) -> PfMorphism:
    return theta.morphism if isinstance(theta, FamilyAutomorphism) else theta


def induced_quotient_matrix(T: MappingTorus, theta) -> IntMatrix:
    """Row form on ``Z^2 = <x, t>``: rows are the images of ``x`` and ``t``."""
    f = _morphism_of(theta)
    fx, fy, ft = f.images
    if quotient_coordinates(T, fy) != (0, 0):
        raise VerificationError("image of y does not die in the quotient Z^2")
    return IntMatrix([quotient_coordinates(T, fx), quotient_coordinates(T, ft)])


# ---------------------------------------------------------------- the kernel H


def kernel_membership(T: MappingTorus, g: PfElement) -> bool:
    """Membership in ``H``, the normal closure of ``y``."""
    return quotient_coordinates(T, g) == (0, 0)


def rs_rewrite(T: MappingTorus, g: PfElement) -> SupportedVector:
    """Class in ``H^ab`` with basis ``e_p = [x^p y x^-p]``."""
    if not kernel_membership(T, g):
        raise ValueError(f"{T.group.format(g)} is not in H")
    coeffs: dict[int, int] = {}
    p = 0
    for c in g.kernel.codes:
        if abs(c) == 1:
            p += 1 if c > 0 else -1
        else:
            coeffs[p] = coeffs.get(p, 0) + (1 if c > 0 else -1)
    return SupportedVector(coeffs)


def h_generator(T: MappingTorus, index: int) -> PfElement:
    """``x^index y x^-index``."""
    G = T.group
    xp = G.power(T.x, index)
    return G.conjugate(xp, T.y)


def eta_ab_image(theta, index: int, T: MappingTorus | None = None) -> SupportedVector:
    """Image of ``e_index`` under the map induced on ``H^ab``."""
    if T is None:
        T = theta.torus
    f = _morphism_of(theta)
    img = f(h_generator(T, index))
    if not kernel_membership(T, img):
        raise VerificationError(f"image of x^{index} y x^-{index} left H")
    return rs_rewrite(T, img)


def y_exponent_scale(T: MappingTorus, theta) -> int:
    """The sign ``delta`` with ``aug(eta(v)) = delta aug(v)`` for ``v`` in
    ``H^ab``, where ``aug`` sums coefficients.

    ``theta(x^p y x^-p)`` is a product of conjugates of ``theta(y)``;
    conjugating kernel words of zero x-exponent by ``x`` or ``t`` keeps their
    y-exponent, so every basis vector is scaled by the y-exponent of
    ``theta(y)``.
    """
    f = _morphism_of(theta)
    fy = f.images[1]
    if not kernel_membership(T, fy):
        raise VerificationError("image of y is not in H")
    return exponent_sum(fy.kernel, 1)
