"""Polyfree groups of length at most two: ``F_r x|_theta F_s``.

Elements are pairs ``(a, b)`` with ``a`` in the kernel ``F_r`` and ``b`` in
the quotient ``F_s``; the pair stands for the product ``a * b``.  The action
is written ``theta_b`` and satisfies ``b a b^-1 = theta_b(a)``, so

    (a, b) (a', b') = (a theta_b(a'), b b').

A rank of 0 is allowed on either side and gives the trivial group, so free
groups and ``Z`` are covered as degenerate cases.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .lattice import AbelianGroupStructure, IntMatrix, LatticeQuotient, cokernel_structure
from .words import (
    FreeMorphism,
    RankError,
    Word,
    compose,
    exponent_vector,
    format_word,
    invert,
    is_power_of,
    parse_word,
    primitive_root,
    rank2_inverse,
)


class GroupError(ValueError):
    """Malformed group data, or an operation applied to the wrong kind of group."""


class VerificationError(GroupError):
    """A claimed automorphism or relation failed to check."""


class ResourceCapExceeded(RuntimeError):
    """A brute-force enumeration would exceed its configured cap."""


MAX_BALL_RADIUS = 8
MAX_BALL_SIZE = 50_000


class PfElement(NamedTuple):
    kernel: Word
    quotient: Word


class PfGroup:
    """``F_r x|_theta F_s`` with ``theta`` given on quotient generators."""

    def __init__(
        self,
        r: int,
        s: int,
        actions: Sequence[FreeMorphism] | None = None,
        inverses: Sequence[FreeMorphism] | None = None,
        kernel_names: Sequence[str] | None = None,
        quotient_names: Sequence[str] | None = None,
    ):
        if r < 0 or s < 0:
            raise GroupError("ranks must be non-negative")
        if actions is None:
            actions = [FreeMorphism.identity(r)] * s
        if len(actions) != s:
            raise GroupError(f"need one action per quotient generator ({s}), got {len(actions)}")
        if inverses is None:
            inverses = [None] * s
        self.kernel_names = list(kernel_names) if kernel_names else default_kernel_names(r)
        self.quotient_names = list(quotient_names) if quotient_names else default_quotient_names(s)
        if len(self.kernel_names) != r or len(self.quotient_names) != s:
            raise GroupError("generator name lists do not match the ranks")
        if len(set(self.kernel_names + self.quotient_names)) != r + s:
            raise GroupError("generator names must be distinct")
        checked = []
        for b, f, g in zip(self.quotient_names, actions, inverses):
            if f.domain_rank != r or f.codomain_rank != r:
                raise GroupError(f"action of {b} is not an endomorphism of F_{r}")
            checked.append(_verified_inverse(f, g, r, b, self.kernel_names))
        self.r = r
        self.s = s
        self.actions = tuple(actions)
        self.action_inverses = tuple(checked)
        self._act_cache: dict[Word, FreeMorphism] = {}

    # -- structure

    @property
    def names(self) -> list[str]:
        return self.kernel_names + self.quotient_names

    def is_direct(self) -> bool:
        return all(f.is_identity() for f in self.actions)

    @property
    def identity(self) -> PfElement:
        return PfElement(Word.identity(self.r), Word.identity(self.s))

    def kernel_generator(self, i: int) -> PfElement:
        return PfElement(Word.generator(self.r, i), Word.identity(self.s))

    def quotient_generator(self, j: int) -> PfElement:
        return PfElement(Word.identity(self.r), Word.generator(self.s, j))

    @property
    def generators(self) -> list[PfElement]:
        return [self.kernel_generator(i) for i in range(self.r)] + [self.quotient_generator(j) for j in range(self.s)]

    def element(self, kernel: Word | None = None, quotient: Word | None = None) -> PfElement:
        kernel = Word.identity(self.r) if kernel is None else kernel
        quotient = Word.identity(self.s) if quotient is None else quotient
        if kernel.rank != self.r or quotient.rank != self.s:
            raise RankError("element parts do not match the group ranks")
        return PfElement(kernel, quotient)

    # -- arithmetic

    def action(self, b: Word) -> FreeMorphism:
        """``theta_b`` as an automorphism of the kernel."""
        f = self._act_cache.get(b)
        if f is None:
            f = FreeMorphism.identity(self.r)
            for c in b.codes:
                step = self.actions[c - 1] if c > 0 else self.action_inverses[-c - 1]
                f = compose(f, step)
            if len(self._act_cache) < 4096:
                self._act_cache[b] = f
        return f

    def act(self, b: Word, a: Word) -> Word:
        if b.is_identity():
            return a
        if len(b) == 1:
            c = b.codes[0]
            f = self.actions[c - 1] if c > 0 else self.action_inverses[-c - 1]
            return f(a)
        return self.action(b)(a)

    def _check(self, g: PfElement) -> None:
        if g.kernel.rank != self.r or g.quotient.rank != self.s:
            raise GroupError("element does not belong to this group")

    def multiply(self, g: PfElement, h: PfElement) -> PfElement:
        self._check(g)
        self._check(h)
        return PfElement(g.kernel * self.act(g.quotient, h.kernel), g.quotient * h.quotient)

    def invert(self, g: PfElement) -> PfElement:
        self._check(g)
        binv = invert(g.quotient)
        return PfElement(self.act(binv, invert(g.kernel)), binv)

    def product(self, elements: Iterable[PfElement]) -> PfElement:
        out = self.identity
        for g in elements:
            out = self.multiply(out, g)
        return out

    def power(self, g: PfElement, n: int) -> PfElement:
        base = g if n >= 0 else self.invert(g)
        out = self.identity
        for _ in range(abs(n)):
            out = self.multiply(out, base)
        return out

    def conjugate(self, w: PfElement, g: PfElement) -> PfElement:
        return self.multiply(self.multiply(w, g), self.invert(w))

    def commutes(self, g: PfElement, h: PfElement) -> bool:
        return self.multiply(g, h) == self.multiply(h, g)

    def from_word(self, w: Word) -> PfElement:
        """Evaluate a word over all ``r + s`` generators (kernel first)."""
        if w.rank != self.r + self.s:
            raise RankError("word is not over the group's generators")
        gens = self.generators
        inv = [self.invert(g) for g in gens]
        return self.product(gens[c - 1] if c > 0 else inv[-c - 1] for c in w.codes)

    def parse(self, text: str) -> PfElement:
        return self.from_word(parse_word(text, self.names))

    def format(self, g: PfElement) -> str:
        k = format_word(g.kernel, self.kernel_names) if g.kernel.codes else ""
        q = format_word(g.quotient, self.quotient_names) if g.quotient.codes else ""
        return " ".join(p for p in (k, q) if p) or "1"

    def as_letters(self, g: PfElement) -> list[int]:
        """Normal form as a letter sequence over all generators."""
        return list(g.kernel.codes) + [c + self.r if c > 0 else c - self.r for c in g.quotient.codes]

    # -- abelianization

    def exponent_vector(self, g: PfElement) -> tuple[int, ...]:
        return exponent_vector(g.kernel) + exponent_vector(g.quotient)

    def abelian_relations(self) -> IntMatrix:
        """Rows ``e_a theta_b^ab - e_a``: the relations cutting ``Z^(r+s)`` down to ``G^ab``."""
        n = self.r + self.s
        rows = []
        for f in self.actions:
            M = f.abelianization()
            for i in range(self.r):
                row = [M[i, j] - (1 if i == j else 0) for j in range(self.r)] + [0] * self.s
                if any(row):
                    rows.append(row)
        return IntMatrix(rows, n)

    def abelianization(self) -> AbelianGroupStructure:
        return LatticeQuotient(self.abelian_relations()).structure

    def __repr__(self) -> str:
        kind = "direct" if self.is_direct() else "semidirect"
        return f"PfGroup({kind}, r={self.r}, s={self.s})"


def default_kernel_names(r: int) -> list[str]:
    if r <= 3:
        return ["x", "y", "z"][:r]
    return [f"x{i + 1}" for i in range(r)]


def default_quotient_names(s: int) -> list[str]:
    if s == 1:
        return ["t"]
    if s <= 3:
        return ["u", "v", "w"][:s]
    return [f"u{i + 1}" for i in range(s)]


def _verified_inverse(f: FreeMorphism, g: FreeMorphism | None, r: int, label: str, names: Sequence[str]) -> FreeMorphism:
    def show(h: FreeMorphism) -> str:
        return ", ".join(f"{n} -> {format_word(w, names)}" for n, w in zip(names, h.images))

    if g is not None:
        if compose(f, g).is_identity() and compose(g, f).is_identity():
            return g
        raise VerificationError(f"supplied inverse of the action of {label} does not compose to the identity")
    if r == 0:
        return f
    if r == 1:
        img = f.images[0]
        if len(img) == 1:
            return f
        raise VerificationError(f"action of {label} ({show(f)}) is not an automorphism of Z")
    if r == 2:
        inv = rank2_inverse(f)
        if inv is None:
            raise VerificationError(f"action of {label} ({show(f)}) is not an automorphism of F_2")
        return inv
    raise VerificationError(f"action of {label} on F_{r} needs an explicitly supplied inverse")


def build_group(
    r: int,
    s: int,
    actions: Sequence[FreeMorphism] | None = None,
    inverses: Sequence[FreeMorphism] | None = None,
    **names,
) -> PfGroup:
    return PfGroup(r, s, actions, inverses, **names)


def klein_bottle_group() -> PfGroup:
    """``Z x| Z`` with the generator acting by inversion."""
    return PfGroup(1, 1, [FreeMorphism(1, 1, [Word(1, [(0, -1)])])], kernel_names=["a"], quotient_names=["b"])


def direct_product(r: int, s: int) -> PfGroup:
    return PfGroup(r, s)


# ---------------------------------------------------------------- morphisms


class PfMorphism:
    """An endomorphism of a PfGroup, given by the images of all generators
    (kernel generators first)."""

    def __init__(self, group: PfGroup, images: Sequence[PfElement], inverse_images: Sequence[PfElement] | None = None):
        images = tuple(images)
        n = group.r + group.s
        if len(images) != n:
            raise GroupError(f"expected {n} generator images, got {len(images)}")
        for g in images:
            group._check(g)
        self.group = group
        self.images = images
        self.inverse_images = tuple(inverse_images) if inverse_images is not None else None
        self._inv = tuple(group.invert(g) for g in images)

    @classmethod
    def identity(cls, group: PfGroup) -> "PfMorphism":
        gens = group.generators
        return cls(group, gens, gens)

    @classmethod
    def from_text(cls, group: PfGroup, images: Sequence[str], inverse_images: Sequence[str] | None = None) -> "PfMorphism":
        inv = [group.parse(t) for t in inverse_images] if inverse_images is not None else None
        return cls(group, [group.parse(t) for t in images], inv)

    def __call__(self, g: PfElement) -> PfElement:
        G = self.group
        G._check(g)
        r = G.r
        out = G.identity
        for c in g.kernel.codes:
            out = G.multiply(out, self.images[c - 1] if c > 0 else self._inv[-c - 1])
        for c in g.quotient.codes:
            out = G.multiply(out, self.images[r + c - 1] if c > 0 else self._inv[r - c - 1])
        return out

    def apply_kernel_word(self, a: Word) -> PfElement:
        return self(PfElement(a, Word.identity(self.group.s)))

    def compose(self, other: "PfMorphism") -> "PfMorphism":
        """``self o other``."""
        inv = None
        if self.inverse_images is not None and other.inverse_images is not None:
            inv = [other.inverse()(g) for g in self.inverse_images]
        return PfMorphism(self.group, [self(g) for g in other.images], inv)

    def inverse(self) -> "PfMorphism":
        if self.inverse_images is None:
            raise VerificationError("no inverse recorded for this morphism")
        return PfMorphism(self.group, self.inverse_images, self.images)

    def has_verified_inverse(self) -> bool:
        if self.inverse_images is None:
            return False
        inv = PfMorphism(self.group, self.inverse_images)
        gens = self.group.generators
        return all(self(inv(g)) == g and inv(self(g)) == g for g in gens)

    def abelianization(self) -> IntMatrix:
        """Row form on ``Z^(r+s)``: row ``i`` is the exponent vector of the image of generator ``i``."""
        return IntMatrix([self.group.exponent_vector(g) for g in self.images], self.group.r + self.group.s)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PfMorphism):
            return NotImplemented
        return self.group is other.group and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def describe(self) -> str:
        G = self.group
        return ", ".join(f"{n} -> {G.format(g)}" for n, g in zip(G.names, self.images))

    def __repr__(self) -> str:
        return f"PfMorphism({self.describe()})"


def verify_endomorphism(G: PfGroup, f: PfMorphism) -> bool:
    """Check every defining relation ``b a b^-1 = theta_b(a)`` maps to a true
    relation."""
    return not relator_failures(G, f)


def relator_failures(G: PfGroup, f: PfMorphism) -> list[str]:
    failures = []
    for j in range(G.s):
        fb = f.images[G.r + j]
        for i in range(G.r):
            lhs = G.conjugate(fb, f.images[i])
            rhs = f.apply_kernel_word(G.actions[j].images[i])
            if lhs != rhs:
                failures.append(f"{G.quotient_names[j]} {G.kernel_names[i]} {G.quotient_names[j]}^-1 = theta({G.kernel_names[i]})")
    return failures


def preserves_series(G: PfGroup, f: PfMorphism) -> bool:
    """True when ``f`` maps the kernel ``F_r`` into itself."""
    return all(f.images[i].quotient.is_identity() for i in range(G.r))


def induced_quotient_morphism(G: PfGroup, f: PfMorphism) -> FreeMorphism:
    """The map induced on ``F_s`` by a series-preserving morphism."""
    if not preserves_series(G, f):
        raise GroupError("morphism does not preserve the kernel")
    return FreeMorphism(G.s, G.s, [f.images[G.r + j].quotient for j in range(G.s)])


def kernel_restriction(G: PfGroup, f: PfMorphism) -> FreeMorphism:
    if not preserves_series(G, f):
        raise GroupError("morphism does not preserve the kernel")
    return FreeMorphism(G.r, G.r, [f.images[i].kernel for i in range(G.r)])


# ---------------------------------------------------------------- centralizers


@dataclass(frozen=True)
class SubgroupDescriptor:
    """Centralizer of an element, in one of the closed forms below.

    ``kernel_root`` / ``quotient_root`` are primitive roots; ``twist`` is the
    kernel part of the generator in the ``TwistedCyclic`` case.
    """

    tag: str
    kernel_root: Word | None = None
    quotient_root: Word | None = None
    twist: Word | None = None
    note: str = ""

    def __str__(self) -> str:
        parts = [self.tag]
        if self.kernel_root is not None:
            parts.append(f"kernel_root={self.kernel_root}")
        if self.quotient_root is not None:
            parts.append(f"quotient_root={self.quotient_root}")
        if self.twist is not None:
            parts.append(f"twist={self.twist}")
        if self.note:
            parts.append(f"note={self.note}")
        return " ".join(parts)


def centralizer_direct_product(G: PfGroup, g: PfElement) -> SubgroupDescriptor:
    if not G.is_direct():
        raise GroupError("centralizer_direct_product needs a direct product")
    a, b = g
    if a.is_identity() and b.is_identity():
        return SubgroupDescriptor("WholeGroup")
    if b.is_identity():
        return SubgroupDescriptor("KernelTimesCentralizer", kernel_root=primitive_root(a)[0])
    if a.is_identity():
        return SubgroupDescriptor("KernelTimesCentralizer", quotient_root=primitive_root(b)[0])
    return SubgroupDescriptor("CentralizerPair", kernel_root=primitive_root(a)[0], quotient_root=primitive_root(b)[0])


def _parity_flags(G: PfGroup) -> list[bool]:
    """For ``Z x| F_s``: which quotient generators act by inversion."""
    if G.r != 1:
        raise GroupError("expected a group of the form Z x| F_s")
    flags = []
    for f in G.actions:
        img = f.images[0]
        if img == Word.generator(1, 0):
            flags.append(False)
        elif img == Word.generator(1, 0, -1):
            flags.append(True)
        else:
            raise GroupError("action on Z must be +-1")
    return flags


def in_orientation_kernel(G: PfGroup, b: Word) -> bool:
    """Membership of ``b`` in ``F_s'``, the kernel of ``F_s -> Aut(Z) = Z/2``."""
    flags = _parity_flags(G)
    return sum(1 for c in b.codes if flags[abs(c) - 1]) % 2 == 0


def centralizer_z_semidirect(G: PfGroup, g: PfElement) -> SubgroupDescriptor:
    """Centralizer of ``(a, b)`` in ``Z x|_theta F_s`` with ``theta`` onto ``Z/2``.

    Case V splits three ways.  With ``rho`` the primitive root of ``b``:
    ``rho`` in ``F_s'`` gives ``Z x <rho>``; ``b`` in ``F_s'`` but ``rho``
    not gives ``Z x <rho^2>``; ``b`` outside ``F_s'`` gives the infinite
    cyclic group generated by ``(a, rho)``.
    """
    flags = _parity_flags(G)
    if not any(flags):
        raise GroupError("action on Z is trivial; use centralizer_direct_product")
    a, b = g
    if a.is_identity() and b.is_identity():
        return SubgroupDescriptor("WholeGroup")
    rank_prime = 2 * G.s - 1
    if b.is_identity():
        return SubgroupDescriptor("ZCrossKernelPrime", note=f"F_s' free of rank {rank_prime}")
    rho = primitive_root(b)[0]
    b_even = in_orientation_kernel(G, b)
    if a.is_identity():
        if b_even:
            return SubgroupDescriptor("ZCrossCentralizer", quotient_root=rho)
        return SubgroupDescriptor("CentralizerOnly", quotient_root=rho)
    if in_orientation_kernel(G, rho):
        return SubgroupDescriptor("ZCrossCentralizer", quotient_root=rho)
    if b_even:
        return SubgroupDescriptor("ZCrossCentralizerSquares", quotient_root=rho, note="interpretation: even powers of the root")
    return SubgroupDescriptor("TwistedCyclic", quotient_root=rho, twist=a, note="interpretation: generated by (a, root)")


def _cyclic_exponent(u: Word, root: Word) -> int | None:
    """``n`` with ``u == root**n``, or ``None``."""
    if u.is_identity():
        return 0
    r, e = primitive_root(u)
    if r == root:
        return e
    if r == invert(root):
        return -e
    return None


def descriptor_contains(G: PfGroup, desc: SubgroupDescriptor, h: PfElement) -> bool:
    """Membership of ``h`` in the subgroup described by ``desc``."""
    c, d = h
    tag = desc.tag
    if tag == "WholeGroup":
        return True
    if tag == "KernelTimesCentralizer":
        if desc.kernel_root is not None:
            return is_power_of(c, desc.kernel_root)
        return is_power_of(d, desc.quotient_root)
    if tag == "CentralizerPair":
        return is_power_of(c, desc.kernel_root) and is_power_of(d, desc.quotient_root)
    if tag == "ZCrossKernelPrime":
        return in_orientation_kernel(G, d)
    if tag == "ZCrossCentralizer":
        return is_power_of(d, desc.quotient_root)
    if tag == "CentralizerOnly":
        return c.is_identity() and is_power_of(d, desc.quotient_root)
    if tag == "ZCrossCentralizerSquares":
        n = _cyclic_exponent(d, desc.quotient_root)
        return n is not None and n % 2 == 0
    if tag == "TwistedCyclic":
        n = _cyclic_exponent(d, desc.quotient_root)
        if n is None:
            return False
        return c == (desc.twist if n % 2 else Word.identity(G.r))
    raise ValueError(f"unknown descriptor tag {tag}")


def centralizer(G: PfGroup, g: PfElement) -> SubgroupDescriptor:
    """Dispatch to the direct-product or ``Z x| F_s`` centralizer rule."""
    if G.is_direct():
        return centralizer_direct_product(G, g)
    if G.r == 1:
        return centralizer_z_semidirect(G, g)
    raise GroupError("no closed-form centralizer for this group shape")


# ---------------------------------------------------------------- abelian data


@dataclass(frozen=True)
class FreeByCyclicAbelianization:
    """``Z + coker(I - theta_t^ab)``."""

    cokernel: AbelianGroupStructure

    @property
    def structure(self) -> AbelianGroupStructure:
        return AbelianGroupStructure(self.cokernel.free_rank + 1, self.cokernel.torsion)

    def __str__(self) -> str:
        return f"Z + ({self.cokernel})"


def abelianization_free_by_cyclic(G: PfGroup) -> FreeByCyclicAbelianization:
    if G.s != 1:
        raise GroupError("abelianization_free_by_cyclic needs s = 1")
    M = G.actions[0].abelianization()
    return FreeByCyclicAbelianization(cokernel_structure(IntMatrix.identity(G.r) - M))


class _NotApplicable:
    def __repr__(self) -> str:
        return "NOT_APPLICABLE"

    __str__ = __repr__

    def __reduce__(self):
        return "NOT_APPLICABLE"


NOT_APPLICABLE = _NotApplicable()


@dataclass(frozen=True)
class PolyfreeSeries:
    ranks: tuple[int, ...]

    def __post_init__(self):
        if not self.ranks or any(r < 1 for r in self.ranks):
            raise GroupError("a polyfree series needs at least one factor, each of positive rank")


@dataclass(frozen=True)
class EulerData:
    length: int
    characteristic: int
    bound: object  # int or NOT_APPLICABLE


def euler_data(series: PolyfreeSeries | Sequence[int]) -> EulerData:
    """Length, Euler characteristic ``prod(r_i - 1)`` and, when it is nonzero,
    the bound ``(c+1)^((k-1)c + k^2 - 1)`` on the number of polyfree series."""
    if not isinstance(series, PolyfreeSeries):
        series = PolyfreeSeries(tuple(series))
    k = len(series.ranks)
    c = 1
    for r in series.ranks:
        c *= r - 1
    bound = NOT_APPLICABLE if c == 0 else (c + 1) ** ((k - 1) * c + k * k - 1)
    return EulerData(k, c, bound)


# ---------------------------------------------------------------- center


@dataclass(frozen=True)
class CenterReport:
    element: PfElement
    commutes: tuple[tuple[str, bool], ...]
    meets_kernel_trivially: bool
    reason: str

    @property
    def ok(self) -> bool:
        return all(v for _, v in self.commutes) and self.meets_kernel_trivially


def center_conjugation_case(G: PfGroup, w: Word) -> CenterReport:
    """For ``F_r x| Z`` whose generator acts by conjugation by ``w``, return
    the central element ``(w, t^-1)`` with a verification report."""
    if G.s != 1:
        raise GroupError("center_conjugation_case needs s = 1")
    if w.rank != G.r:
        raise RankError("conjugator is not a kernel word")
    if G.actions[0] != FreeMorphism.conjugation(w):
        raise VerificationError(f"the action is not conjugation by {format_word(w, G.kernel_names)}")
    z = PfElement(w, Word.generator(1, 0, -1))
    commutes = tuple((n, G.commutes(z, g)) for n, g in zip(G.names, G.generators))
    # z^n has t-exponent -n, so it lies in F_r only for n = 0
    return CenterReport(z, commutes, True, "powers z^n carry t-exponent -n")


def quotient_by_center_map(G: PfGroup, w: Word):
    """The homomorphism ``G -> F_r``, ``(a, t^n) -> a w^n``, which kills
    ``(w, t^-1)`` and restricts to the identity on ``F_r``."""
    def psi(g: PfElement) -> Word:
        n = sum(1 if c > 0 else -1 for c in g.quotient.codes)
        return g.kernel * (w ** n)
    return psi


# ---------------------------------------------------------------- balls


def ball_enumerate(G: PfGroup, radius: int, max_size: int = MAX_BALL_SIZE) -> list[PfElement]:
    """All elements of word length at most ``radius``, in BFS order with
    generators taken as kernel then quotient, each followed by its inverse."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if radius > MAX_BALL_RADIUS:
        raise ResourceCapExceeded(f"ball radius {radius} exceeds cap {MAX_BALL_RADIUS}")
    steps = []
    for g in G.generators:
        steps.append(g)
        steps.append(G.invert(g))
    seen = {G.identity}
    order = [G.identity]
    frontier = [G.identity]
    for _ in range(radius):
        nxt = []
        for g in frontier:
            for st in steps:
                h = G.multiply(g, st)
                if h not in seen:
                    seen.add(h)
                    order.append(h)
                    nxt.append(h)
                    if len(order) > max_size:
                        raise ResourceCapExceeded(f"ball exceeds {max_size} elements")
        frontier = nxt
    return order
