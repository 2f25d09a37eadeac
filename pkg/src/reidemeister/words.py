"""Reduced words in free groups of finite rank, and morphisms between them.

A word is stored as a tuple of signed letter codes: generator ``i`` is the
code ``i + 1`` and its inverse is ``-(i + 1)``.  Every constructor freely
reduces, so two words are equal exactly when they represent the same group
element.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .lattice import IntMatrix


class Letter(NamedTuple):
    index: int
    sign: int

    @property
    def code(self) -> int:
        return self.sign * (self.index + 1)

    @classmethod
    def from_code(cls, code: int) -> "Letter":
        return cls(abs(code) - 1, 1 if code > 0 else -1)


class RankError(ValueError):
    """A generator index or rank does not match the ambient free group."""


def _as_code(item) -> int:
    if isinstance(item, int):
        if item == 0:
            raise ValueError("letter code 0 is not a letter")
        return item
    index, sign = item
    if sign not in (1, -1):
        raise ValueError(f"letter sign must be +1 or -1, got {sign}")
    return sign * (index + 1)


def _reduce_codes(codes: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for c in codes:
        if stack and stack[-1] == -c:
            stack.pop()
        else:
            stack.append(c)
    return tuple(stack)


class Word:
    """An element of the free group of a given rank, freely reduced."""

    __slots__ = ("rank", "codes", "_hash")

    def __init__(self, rank: int, letters: Iterable = ()):
        if rank < 0:
            raise RankError(f"rank must be non-negative, got {rank}")
        codes = [_as_code(x) for x in letters]
        for c in codes:
            if abs(c) > rank:
                raise RankError(f"generator index {abs(c) - 1} out of range for rank {rank}")
        self.rank = rank
        self.codes = _reduce_codes(codes)
        self._hash = None

    @classmethod
    def _trusted(cls, rank: int, codes: tuple[int, ...]) -> "Word":
        w = cls.__new__(cls)
        w.rank = rank
        w.codes = codes
        w._hash = None
        return w

    @classmethod
    def identity(cls, rank: int) -> "Word":
        return cls._trusted(rank, ())

    @classmethod
    def generator(cls, rank: int, index: int, power: int = 1) -> "Word":
        if not 0 <= index < rank:
            raise RankError(f"generator index {index} out of range for rank {rank}")
        c = index + 1 if power >= 0 else -(index + 1)
        return cls._trusted(rank, (c,) * abs(power))

    @property
    def letters(self) -> tuple[Letter, ...]:
        return tuple(Letter.from_code(c) for c in self.codes)

    def is_identity(self) -> bool:
        return not self.codes

    def __len__(self) -> int:
        return len(self.codes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        return self.rank == other.rank and self.codes == other.codes

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rank, self.codes))
        return self._hash

    def __lt__(self, other: "Word") -> bool:
        # shortlex, used only for deterministic ordering
        return (len(self.codes), self.codes) < (len(other.codes), other.codes)

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __pow__(self, n: int) -> "Word":
        base = self if n >= 0 else invert(self)
        result = Word.identity(self.rank)
        for _ in range(abs(n)):
            result = multiply(result, base)
        return result

    def inverse(self) -> "Word":
        return invert(self)

    def __repr__(self) -> str:
        return f"Word({self.rank}, {format_word(self)!r})"

    def __str__(self) -> str:
        return format_word(self)


def reduce(rank: int, raw: Sequence) -> Word:
    return Word(rank, raw)


def multiply(u: Word, v: Word) -> Word:
    if u.rank != v.rank:
        raise RankError(f"rank mismatch: {u.rank} vs {v.rank}")
    a, b = u.codes, v.codes
    i = 0
    n = min(len(a), len(b))
    while i < n and a[len(a) - 1 - i] == -b[i]:
        i += 1
    return Word._trusted(u.rank, a[: len(a) - i] + b[i:])


def invert(u: Word) -> Word:
    return Word._trusted(u.rank, tuple(-c for c in reversed(u.codes)))


def conjugate(w: Word, g: Word) -> Word:
    """Return ``w g w^-1``."""
    return multiply(multiply(w, g), invert(w))


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split ``w`` as ``conjugator * core * conjugator^-1`` with ``core``
    cyclically reduced."""
    c = w.codes
    i, j = 0, len(c) - 1
    while i < j and c[i] == -c[j]:
        i += 1
        j -= 1
    return Word._trusted(w.rank, c[i : j + 1]), Word._trusted(w.rank, c[:i])


def _smallest_period(seq: tuple[int, ...]) -> int:
    n = len(seq)
    fail = [0] * n
    k = 0
    for i in range(1, n):
        while k and seq[i] != seq[k]:
            k = fail[k - 1]
        if seq[i] == seq[k]:
            k += 1
        fail[i] = k
    p = n - fail[-1]
    return p if n % p == 0 else n


def primitive_root(w: Word) -> tuple[Word, int]:
    """Return ``(root, e)`` with ``w == root**e`` and ``root`` not a proper power."""
    if w.is_identity():
        return w, 0
    core, conj = cyclic_reduce(w)
    d = _smallest_period(core.codes)
    root = conjugate(conj, Word._trusted(w.rank, core.codes[:d]))
    return root, len(core) // d


def is_power_of(u: Word, root: Word) -> bool:
    """True when ``u`` lies in the cyclic subgroup generated by the primitive word ``root``."""
    if u.is_identity():
        return True
    r, _ = primitive_root(u)
    return r == root or r == invert(root)


@dataclass(frozen=True)
class CentralizerDescriptor:
    tag: str  # "WholeGroup" or "CyclicOnRoot"
    root: Word | None = None

    def contains(self, u: Word) -> bool:
        if self.tag == "WholeGroup":
            return True
        return is_power_of(u, self.root)

    def __str__(self) -> str:
        if self.tag == "WholeGroup":
            return "WholeGroup"
        return f"CyclicOnRoot({self.root})"


def centralizer_free(w: Word) -> CentralizerDescriptor:
    if w.is_identity():
        return CentralizerDescriptor("WholeGroup")
    return CentralizerDescriptor("CyclicOnRoot", primitive_root(w)[0])


def exponent_sum(w: Word, generator_index: int) -> int:
    if not 0 <= generator_index < w.rank:
        raise RankError(f"generator index {generator_index} out of range for rank {w.rank}")
    g = generator_index + 1
    return sum(1 if c == g else -1 for c in w.codes if abs(c) == g)


def exponent_vector(w: Word) -> tuple[int, ...]:
    v = [0] * w.rank
    for c in w.codes:
        v[abs(c) - 1] += 1 if c > 0 else -1
    return tuple(v)


# ---------------------------------------------------------------- morphisms


class FreeMorphism:
    """Homomorphism ``F_domain_rank -> F_codomain_rank`` given by generator images."""

    __slots__ = ("domain_rank", "codomain_rank", "images", "_inv_images")

    def __init__(self, domain_rank: int, codomain_rank: int, images: Sequence[Word]):
        images = tuple(images)
        if len(images) != domain_rank:
            raise RankError(f"expected {domain_rank} images, got {len(images)}")
        for w in images:
            if w.rank != codomain_rank:
                raise RankError(f"image {w} is not over rank {codomain_rank}")
        self.domain_rank = domain_rank
        self.codomain_rank = codomain_rank
        self.images = images
        self._inv_images = tuple(invert(w) for w in images)

    @classmethod
    def identity(cls, rank: int) -> "FreeMorphism":
        return cls(rank, rank, [Word.generator(rank, i) for i in range(rank)])

    @classmethod
    def conjugation(cls, w: Word) -> "FreeMorphism":
        """The inner automorphism ``g -> w g w^-1``."""
        n = w.rank
        return cls(n, n, [conjugate(w, Word.generator(n, i)) for i in range(n)])

    def __call__(self, w: Word) -> Word:
        return apply_morphism(self, w)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FreeMorphism):
            return NotImplemented
        return (self.domain_rank, self.codomain_rank, self.images) == (
            other.domain_rank,
            other.codomain_rank,
            other.images,
        )

    def __hash__(self) -> int:
        return hash((self.domain_rank, self.codomain_rank, self.images))

    def is_identity(self) -> bool:
        return self.domain_rank == self.codomain_rank and self == FreeMorphism.identity(self.domain_rank)

    def abelianization(self) -> IntMatrix:
        """Row form: row ``i`` is the exponent vector of the image of generator ``i``."""
        return IntMatrix([exponent_vector(w) for w in self.images])

    def __repr__(self) -> str:
        body = ", ".join(f"{format_word(Word.generator(self.domain_rank, i))} -> {w}" for i, w in enumerate(self.images))
        return f"FreeMorphism({body})"


def apply_morphism(f: FreeMorphism, w: Word) -> Word:
    if w.rank != f.domain_rank:
        raise RankError(f"word over rank {w.rank} given to morphism with domain rank {f.domain_rank}")
    out: list[int] = []
    for c in w.codes:
        piece = f.images[c - 1] if c > 0 else f._inv_images[-c - 1]
        for d in piece.codes:
            if out and out[-1] == -d:
                out.pop()
            else:
                out.append(d)
    return Word._trusted(f.codomain_rank, tuple(out))


def compose(f: FreeMorphism, g: FreeMorphism) -> FreeMorphism:
    """``f o g``: apply ``g`` first."""
    if g.codomain_rank != f.domain_rank:
        raise RankError("cannot compose: codomain of g differs from domain of f")
    return FreeMorphism(g.domain_rank, f.codomain_rank, [f(w) for w in g.images])


def _nielsen_moves(n: int = 2):
    # (target, other, side, sign): target <- other^sign * target (side 0) or target * other^sign (side 1)
    moves = []
    for target in range(n):
        for other in range(n):
            if other == target:
                continue
            for side in (1, 0):
                for sign in (1, -1):
                    moves.append((target, other, side, sign))
    return moves


_MOVES2 = _nielsen_moves(2)


def _move_morphism(move) -> FreeMorphism:
    target, other, side, sign = move
    g = [Word.generator(2, i) for i in range(2)]
    o = Word.generator(2, other, sign)
    g[target] = g[target] * o if side == 1 else o * g[target]
    return FreeMorphism(2, 2, g)


def _apply_move(pair: tuple[Word, Word], move) -> tuple[Word, Word]:
    target, other, side, sign = move
    o = pair[other] if sign == 1 else invert(pair[other])
    new = list(pair)
    new[target] = pair[target] * o if side == 1 else o * pair[target]
    return new[0], new[1]


def _signed_permutation(pair: tuple[Word, Word]) -> FreeMorphism | None:
    """If ``pair`` is ``(g_i^{e}, g_j^{f})`` with ``{i, j} = {0, 1}``, return
    the morphism sending generator ``k`` to ``pair[k]``."""
    if all(len(w) == 1 for w in pair) and {abs(pair[0].codes[0]), abs(pair[1].codes[0])} == {1, 2}:
        return FreeMorphism(2, 2, pair)
    return None


def _invert_signed_permutation(p: FreeMorphism) -> FreeMorphism:
    images = [None, None]
    for k, w in enumerate(p.images):
        c = w.codes[0]
        images[abs(c) - 1] = Word.generator(2, k, 1 if c > 0 else -1)
    return FreeMorphism(2, 2, images)


def rank2_inverse(f: FreeMorphism) -> FreeMorphism | None:
    """Decide whether an endomorphism of F_2 is an automorphism by Nielsen
    reduction of the image pair; return its inverse, or ``None``.

    Length-reducing moves are taken greedily (shortest result first, ties by
    the fixed move order).  When no move reduces, the plateau of pairs with
    the same total length is searched breadth-first, which is enough to
    reach a Nielsen-reduced pair.
    """
    if f.domain_rank != 2 or f.codomain_rank != 2:
        raise RankError("rank2_inverse needs an endomorphism of F_2")
    if abs(f.abelianization().det()) != 1:
        return None
    pair = f.images
    # transform: current pair == images of (f o acc)
    acc = FreeMorphism.identity(2)
    while True:
        perm = _signed_permutation(pair)
        if perm is not None:
            inv = compose(acc, _invert_signed_permutation(perm))
            if compose(f, inv).is_identity() and compose(inv, f).is_identity():
                return inv
            return None
        if any(w.is_identity() for w in pair):
            return None
        total = len(pair[0]) + len(pair[1])
        best = None
        for move in _MOVES2:
            cand = _apply_move(pair, move)
            size = len(cand[0]) + len(cand[1])
            if size < total and (best is None or size < best[0]):
                best = (size, move, cand)
        if best is not None:
            pair = best[2]
            acc = compose(acc, _move_morphism(best[1]))
            continue
        found = _plateau_search(pair, total)
        if found is None:
            return None
        path, pair = found
        for move in path:
            acc = compose(acc, _move_morphism(move))


def _plateau_search(start, total):
    """BFS over equal-length moves for a pair admitting a reducing move."""
    seen = {start}
    frontier = [(start, [])]
    while frontier:
        nxt = []
        for pair, path in frontier:
            for move in _MOVES2:
                cand = _apply_move(pair, move)
                size = len(cand[0]) + len(cand[1])
                if size < total:
                    return path + [move], cand
                if size == total and cand not in seen:
                    seen.add(cand)
                    nxt.append((cand, path + [move]))
        frontier = nxt
    return None


def is_automorphism_rank2(f: FreeMorphism) -> bool:
    return rank2_inverse(f) is not None


def find_inner_witness(f: FreeMorphism, max_length: int) -> Word | None:
    """Return ``w`` with ``f(g) == w g w^-1`` on every generator and
    ``len(w) <= max_length``, or ``None``.

    Works in any rank: if ``f`` is conjugation by ``w`` then ``f(g_0)`` is a
    conjugate ``c g_0 c^-1`` and ``w`` lies in the coset ``c <g_0>``, so only
    that coset needs scanning.
    """
    n = f.domain_rank
    if f.codomain_rank != n or n == 0:
        return None
    g0 = Word.generator(n, 0)
    core, c = cyclic_reduce(f.images[0])
    if core != g0:
        return None
    span = max_length + len(c) + 1
    candidates = [c * Word.generator(n, 0, j) for j in range(-span, span + 1)]
    candidates = sorted((w for w in candidates if len(w) <= max_length), key=lambda w: (len(w), w.codes))
    for w in candidates:
        if all(f.images[i] == conjugate(w, Word.generator(n, i)) for i in range(n)):
            return w
    return None


# ---------------------------------------------------------------- literals


def default_names(rank: int) -> list[str]:
    if rank <= 26:
        return [chr(ord("a") + i) for i in range(rank)]
    return [f"g{i}" for i in range(rank)]


class WordParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at column {position + 1})")
        self.position = position


_TOKEN = re.compile(r"\S+")
_ATOM = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(?:\^(-?\d+))?$")


def parse_word(text: str, names: Sequence[str]) -> Word:
    """Parse ``"x y^-1 x^2"`` over the alphabet ``names``.  ``1`` denotes the
    identity.  Errors carry the 0-based column of the offending token."""
    index = {name: i for i, name in enumerate(names)}
    codes: list[int] = []
    for m in _TOKEN.finditer(text):
        tok = m.group()
        if tok == "1":
            continue
        a = _ATOM.match(tok)
        if a is None:
            raise WordParseError(f"malformed token {tok!r}", m.start())
        name, power = a.group(1), a.group(2)
        if name not in index:
            raise WordParseError(f"unknown generator {name!r}", m.start())
        p = int(power) if power is not None else 1
        c = index[name] + 1
        codes.extend([c if p > 0 else -c] * abs(p))
    return Word(len(names), codes)


def format_word(w: Word, names: Sequence[str] | None = None) -> str:
    if names is None:
        names = default_names(w.rank)
    if not w.codes:
        return "1"
    parts = []
    i = 0
    c = w.codes
    while i < len(c):
        j = i
        while j < len(c) and c[j] == c[i]:
            j += 1
        p = (j - i) * (1 if c[i] > 0 else -1)
        name = names[abs(c[i]) - 1]
        parts.append(name if p == 1 else f"{name}^{p}")
        i = j
    return " ".join(parts)
