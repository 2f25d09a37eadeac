"""Twisted conjugacy: brute-force orbit bounds, abelian class invariants and
certificates of infinitely many classes.

Two elements ``g, h`` are twisted conjugate under ``phi`` when
``h = s g phi(s)^-1`` for some ``s``.
"""

from __future__ import annotations

import enum
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .lattice import (
    INFINITE,
    IntMatrix,
    LatticeQuotient,
    abelian_reidemeister,
    fixed_sublattice_trivial,
    induced_free_part_map,
)
from .polyfree import (
    PfElement,
    PfGroup,
    PfMorphism,
    VerificationError,
    abelianization_free_by_cyclic,
    ball_enumerate,
    center_conjugation_case,
    induced_quotient_morphism,
    kernel_restriction,
    preserves_series,
    quotient_by_center_map,
    verify_endomorphism,
)
from .torus import (
    BmvCase,
    MappingTorus,
    bmv_classify,
    eta_ab_image,
    induced_quotient_matrix,
    y_exponent_scale,
)
from .words import FreeMorphism, compose, format_word, find_inner_witness, rank2_inverse


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.classes = n

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> bool:
        a, b = self.find(i), self.find(j)
        if a == b:
            return False
        if self.size[a] < self.size[b]:
            a, b = b, a
        self.parent[b] = a
        self.size[a] += self.size[b]
        self.classes -= 1
        return True


# ---------------------------------------------------------------- invariants


class AbelianInvariant:
    """``g -> [g^ab]`` in ``G^ab / (1 - phi^ab) G^ab``, a twisted-class invariant."""

    def __init__(self, G: PfGroup, phi: PfMorphism):
        n = G.r + G.s
        M = phi.abelianization()
        rows = list(G.abelian_relations().rows)
        for i in range(n):
            row = tuple((1 if i == j else 0) - M[i, j] for j in range(n))
            if any(row):
                rows.append(row)
        self.group = G
        self.quotient = LatticeQuotient(IntMatrix(rows, n))

    def __call__(self, g: PfElement) -> tuple[int, ...]:
        return self.quotient.canonical(self.group.exponent_vector(g))

    @property
    def order(self):
        return self.quotient.structure.order


def abelian_class_invariant(G: PfGroup, phi: PfMorphism, g: PfElement) -> tuple[int, ...]:
    return AbelianInvariant(G, phi)(g)


def finite_quotient_count(moduli: Sequence[int], M: IntMatrix) -> int:
    """Brute-force number of orbits of ``x -> x + (I - M) s`` on
    ``Z/n_1 + ... + Z/n_d`` (``M`` acts on columns)."""
    d = len(moduli)
    if M.shape != (d, d):
        raise ValueError("matrix size does not match the number of moduli")
    if any(n < 1 for n in moduli):
        raise ValueError("moduli must be positive")
    for i in range(d):
        for j in range(d):
            if (M[i, j] * moduli[j]) % moduli[i]:
                raise ValueError("matrix does not define an endomorphism of this finite group")
    A = IntMatrix.identity(d) - M
    elements = list(itertools.product(*(range(n) for n in moduli)))
    index = {x: k for k, x in enumerate(elements)}
    uf = UnionFind(len(elements))
    cols = [[A[i, j] for i in range(d)] for j in range(d)]
    for x in elements:
        for col in cols:
            y = tuple((x[i] + col[i]) % moduli[i] for i in range(d))
            uf.union(index[x], index[y])
    return uf.classes


# ---------------------------------------------------------------- orbit oracle


@dataclass(frozen=True)
class OrbitReport:
    ball_radius: int
    conjugator_radius: int
    ball_size: int
    class_upper_bound: int
    invariant_lower_bound: int
    merges: int
    unsound_merges: int

    def lines(self) -> list[str]:
        return [
            f"ball_radius: {self.ball_radius}",
            f"conjugator_radius: {self.conjugator_radius}",
            f"ball_size: {self.ball_size}",
            f"class_upper_bound: {self.class_upper_bound}",
            f"invariant_lower_bound: {self.invariant_lower_bound}",
            f"merges: {self.merges}",
            f"unsound_merges: {self.unsound_merges}",
        ]


def _merge_pairs(G: PfGroup, phi: PfMorphism, ball: list[PfElement], sigmas: list[PfElement]) -> list[tuple[int, int]]:
    index = {g: i for i, g in enumerate(ball)}
    pairs = []
    for s in sigmas:
        ps = G.invert(phi(s))
        for i, g in enumerate(ball):
            j = index.get(G.multiply(G.multiply(s, g), ps))
            if j is not None and j != i:
                pairs.append((i, j))
    return pairs


def twisted_orbit_report(G: PfGroup, phi: PfMorphism, ball_radius: int, conjugator_radius: int, jobs: int = 1) -> OrbitReport:
    """Union-find over the ball of radius ``ball_radius``, merging ``g`` with
    ``s g phi(s)^-1`` when both lie in the ball and ``|s| <= conjugator_radius``."""
    ball = ball_enumerate(G, ball_radius)
    sigmas = ball_enumerate(G, conjugator_radius)
    if jobs > 1 and len(sigmas) > 1:
        chunks = [sigmas[w::jobs] for w in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_merge_pairs, [G] * jobs, [phi] * jobs, [ball] * jobs, chunks))
        pairs = [p for chunk in results for p in chunk]
    else:
        pairs = _merge_pairs(G, phi, ball, sigmas)
    inv = AbelianInvariant(G, phi)
    invariants = [inv(g) for g in ball]
    uf = UnionFind(len(ball))
    unsound = 0
    merges = 0
    for i, j in sorted(set(pairs)):
        merges += 1
        if invariants[i] != invariants[j]:
            unsound += 1
        uf.union(i, j)
    return OrbitReport(ball_radius, conjugator_radius, len(ball), uf.classes, len(set(invariants)), merges, unsound)


def orbit_partition(G: PfGroup, phi: PfMorphism, ball_radius: int, conjugator_radius: int) -> list[int]:
    """Class representative index for each ball element (same merging rule)."""
    ball = ball_enumerate(G, ball_radius)
    sigmas = ball_enumerate(G, conjugator_radius)
    uf = UnionFind(len(ball))
    for i, j in _merge_pairs(G, phi, ball, sigmas):
        uf.union(i, j)
    return [uf.find(i) for i in range(len(ball))]


# ---------------------------------------------------------------- certificates


class Conclusion(enum.Enum):
    R_INFINITE = "R_INFINITE"
    R_FINITE = "R_FINITE"
    UNDECIDED = "UNDECIDED"


FREE_GROUP_AXIOM = (
    "Levitt-Lustig (2000); Fel'shtyn (2001): every automorphism of a free group "
    "of finite rank >= 2 has infinitely many twisted conjugacy classes"
)
GBS_AXIOM = (
    "Levitt (2007): non-elementary generalized Baumslag-Solitar groups have "
    "infinitely many twisted classes for every automorphism"
)
IA_AXIOM = "Magnus-Karrass-Solitar, Combinatorial Group Theory: an automorphism of F_2 acting trivially on Z^2 is inner"
QUOTIENT_RULE = "an epimorphism onto a quotient maps twisted classes onto twisted classes of the induced map"
KERNEL_RULE = (
    "for an invariant normal subgroup N with induced quotient map q: if Fix(q) is finite and the "
    "restriction to N has infinitely many classes, so does the whole map"
)


@dataclass(frozen=True)
class CertNode:
    rule: str
    claim: str
    evidence: tuple[tuple[str, str], ...] = ()
    children: tuple["CertNode", ...] = ()
    citation: str | None = None
    check: Callable[[], bool] | None = field(default=None, compare=False, repr=False)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def lines(self, indent: int = 0) -> list[str]:
        pad = " " * indent
        out = [f"{pad}- rule: {self.rule}", f"{pad}  claim: {self.claim}"]
        if self.citation:
            out.append(f"{pad}  citation: {self.citation}")
        if self.evidence:
            out.append(f"{pad}  evidence:")
            out.extend(f"{pad}    {k}: {v}" for k, v in self.evidence)
        if self.children:
            out.append(f"{pad}  children:")
            for c in self.children:
                out.extend(c.lines(indent + 4))
        return out


AXIOM_RULES = ("FreeQuotientAxiom", "ExternalAxiom")


def _computed(claim: str, check: Callable[[], bool], **evidence) -> CertNode:
    if not check():
        raise AssertionError(f"direct computation failed: {claim}")
    return CertNode("DirectComputation", claim, tuple((k, str(v)) for k, v in evidence.items()), check=check)


def _free_axiom(claim: str) -> CertNode:
    return CertNode("FreeQuotientAxiom", claim, citation=FREE_GROUP_AXIOM)


@dataclass(frozen=True)
class Certificate:
    conclusion: Conclusion
    root: CertNode | None
    attempts: tuple[tuple[str, str], ...]

    def replay(self) -> bool:
        """Recompute every direct computation and check every leaf is either
        a computation or a cited axiom."""
        if self.root is None:
            return self.conclusion is Conclusion.UNDECIDED
        for node in self.root.walk():
            if node.rule == "DirectComputation":
                if node.check is None or not node.check():
                    return False
            elif node.rule in AXIOM_RULES:
                if not node.citation:
                    return False
            elif not node.children:
                return False
        return True

    def lines(self) -> list[str]:
        out = [f"conclusion: {self.conclusion.value}", "attempts:"]
        out.extend(f"  {name}: {outcome}" for name, outcome in self.attempts)
        if self.root is not None:
            out.append("certificate:")
            out.extend(self.root.lines(2))
        return out

    def serialize(self) -> str:
        return "\n".join(self.lines()) + "\n"


class _NotApplicable(Exception):
    pass


def _need(cond: bool, why: str) -> None:
    if not cond:
        raise _NotApplicable(why)


def _is_automorphism(f: FreeMorphism) -> bool:
    n = f.domain_rank
    if n == 1:
        return len(f.images[0]) == 1
    if n == 2:
        return rank2_inverse(f) is not None
    return True  # induced by an automorphism of G; free groups are Hopfian


def _series_quotient(G: PfGroup, phi: PfMorphism) -> CertNode:
    _need(G.s >= 1, "trivial quotient")
    _need(preserves_series(G, phi), "kernel not preserved")
    qbar = induced_quotient_morphism(G, phi)
    preserved = _computed(
        "the morphism maps every kernel generator into the kernel",
        lambda: preserves_series(G, phi),
        induced_quotient_map=", ".join(
            f"{a} -> {format_word(w, G.quotient_names)}" for a, w in zip(G.quotient_names, qbar.images)
        ),
    )
    if G.s >= 2:
        auto = _computed(
            f"the induced map is an automorphism of the free quotient of rank {G.s}",
            lambda: _is_automorphism(induced_quotient_morphism(G, phi)),
        )
        return CertNode(
            "QuotientWitness",
            "infinitely many classes on the free quotient",
            (("quotient", f"F_{G.s}"),),
            (preserved, auto, _free_axiom(f"R = infinity for automorphisms of F_{G.s}")),
            citation=QUOTIENT_RULE,
        )
    M = qbar.abelianization()
    value = abelian_reidemeister(M)
    _need(value is INFINITE, f"induced map on Z is {M}, with {value} classes")
    comp = _computed(
        "det(I - induced map) = 0 on the quotient Z",
        lambda: abelian_reidemeister(induced_quotient_morphism(G, phi).abelianization()) is INFINITE,
        induced_matrix=M,
    )
    return CertNode("QuotientWitness", "infinitely many classes on the quotient Z", (("quotient", "Z"),), (preserved, comp), citation=QUOTIENT_RULE)


def _free_abelian_quotient(G: PfGroup, phi: PfMorphism) -> CertNode:
    def induced() -> IntMatrix:
        return induced_free_part_map(LatticeQuotient(G.abelian_relations()), phi.abelianization())

    N = induced()
    _need(N.nrows > 0, "abelianization is finite")
    value = abelian_reidemeister(N)
    _need(value is INFINITE, f"induced map on Z^{N.nrows} has {value} classes")
    comp = _computed(
        f"det(I - N) = 0 for the map N induced on G^ab / torsion = Z^{N.nrows}",
        lambda: abelian_reidemeister(induced()) is INFINITE,
        induced_matrix=N,
    )
    return CertNode(
        "QuotientWitness",
        "infinitely many classes on the free part of the abelianization (a characteristic quotient)",
        (("quotient", f"Z^{N.nrows}"),),
        (comp,),
        citation=QUOTIENT_RULE,
    )


def _abelianization_route(G: PfGroup, phi: PfMorphism) -> CertNode:
    _need(G.s == 1 and G.r >= 2, "needs F_r x| Z with r >= 2")
    coker = abelianization_free_by_cyclic(G).cokernel
    n = coker.order
    _need(n is not INFINITE, f"coker(I - theta_t^ab) = {coker} is infinite")

    def coker_order():
        return abelianization_free_by_cyclic(G).cokernel.order

    def free_part_sign():
        return induced_free_part_map(LatticeQuotient(G.abelian_relations()), phi.abelianization())

    S = free_part_sign()
    sign = S[0, 0]
    comm_rank = 1 + n * (G.r - 1)
    children = (
        _computed(f"|coker(I - theta_t^ab)| = {n} is finite", lambda: coker_order() == n, coker=coker, order=n),
        _computed(
            f"[G,G] has index {n} in F_{G.r}, so it is free of rank {comm_rank} >= 2",
            lambda: 1 + coker_order() * (G.r - 1) >= 2,
            commutator_rank=comm_rank,
        ),
        _computed(
            "the induced map on G^ab / torsion = Z is +-1, so either G^ab has infinitely many classes "
            "or the fixed subgroup of G^ab is finite",
            lambda: free_part_sign().shape == (1, 1) and abs(free_part_sign()[0, 0]) == 1,
            sign=sign,
        ),
        _free_axiom(f"R = infinity for the restriction to [G,G], free of rank {comm_rank}"),
    )
    return CertNode(
        "AbelianizationWitness",
        "commutator subgroup is free of rank >= 2 and of finite index in the fibre",
        (("coker_order", str(n)),),
        children,
        citation=KERNEL_RULE + "; " + QUOTIENT_RULE,
    )


def _center_route(G: PfGroup, phi: PfMorphism) -> CertNode:
    _need(G.s == 1 and G.r >= 2, "needs F_r x| Z with r >= 2")
    theta = G.actions[0]
    bound = 2 * max(len(w) for w in theta.images) + 2
    w = find_inner_witness(theta, bound)
    _need(w is not None, "action is not an inner automorphism")
    report = center_conjugation_case(G, w)
    psi = quotient_by_center_map(G, w)
    z = report.element

    def quotient_ok():
        gens = G.generators
        return (
            center_conjugation_case(G, w).ok
            and psi(z).is_identity()
            and all(psi(g) == g.kernel for g in gens[: G.r])
            and all(psi(G.multiply(g, h)) == psi(g) * psi(h) for g in gens for h in gens)
        )

    children = (
        _computed(
            f"the action is conjugation by {G.format(G.element(w))}",
            lambda: G.actions[0] == FreeMorphism.conjugation(w),
            witness=G.format(G.element(w)),
        ),
        _computed(
            "the element z = w t^-1 commutes with every generator and G/<z> = F_r via (a, t^n) -> a w^n",
            quotient_ok,
            central_element=G.format(z),
        ),
        _free_axiom(f"R = infinity for the automorphism induced on G/Z(G) = F_{G.r}"),
    )
    return CertNode(
        "CenterWitness",
        "the center is characteristic and the quotient by it is free of rank >= 2",
        (("central_element", G.format(z)),),
        children,
        citation=QUOTIENT_RULE,
    )


def _torus_kernel_route(T: MappingTorus, phi: PfMorphism) -> CertNode:
    Q = induced_quotient_matrix(T, phi)
    _need(fixed_sublattice_trivial(Q), f"induced map {Q} on Z^2 fixes a nonzero vector")
    d = (IntMatrix.identity(2) - Q).det()
    scale = y_exponent_scale(T, phi)
    _need(scale == 1, "the induced map on H^ab reverses the augmentation")
    window = range(-3, 4)
    e0 = eta_ab_image(phi, 0, T)
    children = (
        _computed(
            f"det(I - Q) = {d} != 0 for the induced map Q on Z^2 = <x, t>, so its fixed subgroup is trivial",
            lambda: fixed_sublattice_trivial(induced_quotient_matrix(T, phi)),
            induced_matrix=Q,
            det=d,
        ),
        _computed(
            "the image of y has y-exponent 1, so the map induced on H^ab preserves the coefficient sum",
            lambda: y_exponent_scale(T, phi) == 1
            and all(eta_ab_image(phi, p, T).augmentation() == 1 for p in window),
            eta_e0=e0,
            checked_indices=f"{window.start}..{window.stop - 1}",
        ),
        _computed(
            "the augmentation H^ab -> Z is equivariant with induced map the identity, so H^ab has infinitely many classes",
            lambda: abelian_reidemeister(IntMatrix([[y_exponent_scale(T, phi)]])) is INFINITE,
        ),
    )
    return CertNode(
        "KernelWitnessFixTrivial",
        "trivial fixed subgroup on Z^2 and infinitely many classes on H = <<y>>",
        (("kernel", "H = normal closure of y"), ("quotient", "Z^2")),
        children,
        citation=KERNEL_RULE + "; " + QUOTIENT_RULE,
    )


def _series_kernel_route(G: PfGroup, phi: PfMorphism) -> CertNode:
    _need(G.s == 1 and G.r >= 2, "needs F_r x| Z with r >= 2")
    _need(preserves_series(G, phi), "kernel not preserved")
    M = induced_quotient_morphism(G, phi).abelianization()
    _need(fixed_sublattice_trivial(M), f"induced map {M} on Z has fixed points")
    children = (
        _computed(
            "the kernel is preserved and the induced map on Z is -1, so its fixed subgroup is trivial",
            lambda: preserves_series(G, phi) and fixed_sublattice_trivial(induced_quotient_morphism(G, phi).abelianization()),
            induced_matrix=M,
        ),
        _computed(
            f"the restriction to the kernel is an automorphism of F_{G.r}",
            lambda: _is_automorphism(kernel_restriction(G, phi)),
        ),
        _free_axiom(f"R = infinity for the restriction to F_{G.r}"),
    )
    return CertNode(
        "KernelWitnessFixTrivial",
        "trivial fixed subgroup on the quotient Z and infinitely many classes on the free kernel",
        (("kernel", f"F_{G.r}"), ("quotient", "Z")),
        children,
        citation=KERNEL_RULE,
    )


def _case_iv_route(G: PfGroup, phi: PfMorphism) -> CertNode:
    _need(G.s == 1 and G.r == 2, "needs F_2 x| Z")
    theta = G.actions[0]
    case = bmv_classify(theta.abelianization())
    _need(case is BmvCase.IV_det_minus_one_with_eigenvalue_one, f"action is in case {case.value}")
    sq = compose(theta, theta)
    w = find_inner_witness(sq, 4 * max(len(x) for x in theta.images) + 2)
    _need(w is not None, "no inner witness found for the square of the action")
    children = (
        _computed(
            "the abelianized action has determinant -1 and eigenvalue 1",
            lambda: bmv_classify(G.actions[0].abelianization()) is BmvCase.IV_det_minus_one_with_eigenvalue_one,
            matrix=theta.abelianization(),
        ),
        _computed(
            "the square of the action is conjugation by an explicit word",
            lambda: compose(theta, theta) == FreeMorphism.conjugation(w),
            witness=w,
        ),
        CertNode(
            "ExternalAxiom",
            "a mapping torus of F_2 whose monodromy has finite order in Out(F_2) is a non-elementary GBS group",
            citation=IA_AXIOM + "; Levitt (2007), generalized Baumslag-Solitar groups",
        ),
        CertNode("ExternalAxiom", "non-elementary GBS groups have R = infinity for every automorphism", citation=GBS_AXIOM),
    )
    return CertNode(
        "ExternalAxiom",
        "mapping torus with action of finite order in Out(F_2)",
        (("case", case.value),),
        children,
        citation=GBS_AXIOM,
    )


def certify_r_infinite(G, phi: PfMorphism) -> Certificate:
    """Try the strategies in a fixed order; the first that applies wins.

    ``G`` may be a ``PfGroup`` or a ``MappingTorus``; the latter also enables
    the argument through the normal closure of ``y``.
    """
    torus = G if isinstance(G, MappingTorus) else None
    group = G.group if torus else G
    if phi.group is not group:
        raise VerificationError("morphism belongs to a different group")
    if not verify_endomorphism(group, phi):
        raise VerificationError("morphism fails the defining relations")
    if not phi.has_verified_inverse() or not verify_endomorphism(group, phi.inverse()):
        raise VerificationError("morphism has no verified two-sided inverse")

    strategies = [
        ("QuotientWitness[series]", lambda: _series_quotient(group, phi)),
        ("QuotientWitness[abelian]", lambda: _free_abelian_quotient(group, phi)),
        ("AbelianizationWitness", lambda: _abelianization_route(group, phi)),
        ("CenterWitness", lambda: _center_route(group, phi)),
    ]
    if torus is not None:
        strategies.append(("KernelWitnessFixTrivial[torus]", lambda: _torus_kernel_route(torus, phi)))
    strategies.append(("KernelWitnessFixTrivial[series]", lambda: _series_kernel_route(group, phi)))
    strategies.append(("ExternalAxiom[case iv]", lambda: _case_iv_route(group, phi)))

    attempts = []
    for name, run in strategies:
        try:
            node = run()
        except _NotApplicable as why:
            attempts.append((name, f"not applicable ({why})"))
            continue
        attempts.append((name, "success"))
        return Certificate(Conclusion.R_INFINITE, node, tuple(attempts))
    return Certificate(Conclusion.UNDECIDED, None, tuple(attempts))
