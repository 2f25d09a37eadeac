"""Line-oriented job files for the command line front end.

A job declares a group, optionally a morphism (or a mapping-torus family
member), an element or a matrix, and one command::

    # comments run to the end of the line
    group kind=semidirect r=2 s=1
    t: x -> "x y^2", y -> "y"
    morphism: x -> "x", y -> "y", t -> "t^-1"
    inverse: x -> "x", y -> "y", t -> "t^-1"
    command certify

The full grammar lives in ``docs/job_grammar.ebnf``.  Generators missing
from an action, morphism or inverse line are mapped to themselves.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .lattice import IntMatrix
from .polyfree import (
    MAX_BALL_RADIUS,
    GroupError,
    PfElement,
    PfGroup,
    PfMorphism,
    default_kernel_names,
    default_quotient_names,
    relator_failures,
)
from .torus import MappingTorus, family_automorphism
from .words import FreeMorphism, Word, WordParseError, parse_word

COMMANDS = ("classify", "certify", "orbits", "centralizer", "snf", "euler", "verify")
MAX_JOBS = 64


class JobError(ValueError):
    """Parse or validation failure, located by 1-based line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    kind: str  # NAME, INT, STRING, or the punctuation itself
    text: str
    column: int  # 1-based

    @property
    def value(self) -> str:
        return self.text[1:-1] if self.kind == "STRING" else self.text


_LEX = re.compile(
    r'(?P<STRING>"[^"]*")|(?P<ARROW>->)|(?P<PUNCT>[=:,])|(?P<INT>[-+]?\d+)(?![A-Za-z_])|(?P<NAME>[A-Za-z_][A-Za-z_0-9]*)|(?P<WS>\s+)'
)


def tokenize(line: str, lineno: int) -> list[Token]:
    code = _strip_comment(line)
    out = []
    pos = 0
    while pos < len(code):
        m = _LEX.match(code, pos)
        if m is None:
            if code[pos] == '"':
                raise JobError("unterminated string", lineno, pos + 1)
            raise JobError(f"unexpected character {code[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind != "WS":
            text = m.group()
            out.append(Token(text if kind == "PUNCT" else kind, text, pos + 1))
        pos = m.end()
    return out


def _strip_comment(line: str) -> str:
    inside = False
    for i, ch in enumerate(line):
        if ch == '"':
            inside = not inside
        elif ch == "#" and not inside:
            return line[:i]
    return line


@dataclass
class JobSpec:
    group: PfGroup | None = None
    torus: MappingTorus | None = None
    morphism: PfMorphism | None = None
    family: str | None = None  # label of the family member, if any
    element: PfElement | None = None
    matrix: IntMatrix | None = None
    command: str = ""
    args: dict[str, str] = field(default_factory=dict)
    positional: list[str] = field(default_factory=list)
    ball: int = 2
    conj: int = 2
    jobs: int = 1
    relator_problems: list[str] = field(default_factory=list)
    source_lines: int = 0


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.group_line: tuple[int, dict[str, Token]] | None = None
        self.actions: dict[str, tuple[int, list]] = {}
        self.action_inverses: dict[str, tuple[int, list]] = {}
        self.morphism: list[tuple[int, list]] = []
        self.inverse: list[tuple[int, list]] = []
        self.family: tuple[int, dict[str, Token]] | None = None
        self.element: tuple[int, Token] | None = None
        self.matrix: tuple[int, Token] | None = None
        self.options: dict[str, tuple[int, Token]] = {}
        self.command: tuple[int, Token, dict[str, Token], list[Token]] | None = None

    # -- pass 1: syntax

    def scan(self) -> None:
        for lineno, line in enumerate(self.text.splitlines(), start=1):
            toks = tokenize(line, lineno)
            if toks:
                self.statement(toks, lineno)

    def statement(self, toks: list[Token], ln: int) -> None:
        head = toks[0]
        if head.kind != "NAME":
            raise JobError(f"expected a keyword, got {head.text!r}", ln, head.column)
        kw = head.text
        rest = toks[1:]
        if kw == "group":
            self._once(self.group_line, "group", ln, head)
            self.group_line = (ln, self.keyvalues(rest, ln))
        elif kw in ("action", "action_inverse"):
            target = self.actions if kw == "action" else self.action_inverses
            if len(rest) < 2 or rest[0].kind != "NAME" or rest[1].kind != ":":
                raise JobError(f"expected '{kw} <generator>: ...'", ln, head.column)
            self.add_assignments(target, rest[0], rest[2:], ln)
        elif kw in ("morphism", "inverse"):
            if not rest or rest[0].kind != ":":
                raise JobError(f"expected ':' after {kw}", ln, head.column + len(kw))
            (self.morphism if kw == "morphism" else self.inverse).append((ln, self.assignments(rest[1:], ln)))
        elif kw == "family":
            self._once(self.family, "family", ln, head)
            self.family = (ln, self.keyvalues(rest, ln))
        elif kw in ("element", "matrix"):
            if len(rest) != 1 or rest[0].kind != "STRING":
                raise JobError(f"expected {kw} \"...\"", ln, head.column)
            self._once(getattr(self, kw), kw, ln, head)
            setattr(self, kw, (ln, rest[0]))
        elif kw == "option":
            for key, tok in self.keyvalues(rest, ln).items():
                self.options[key] = (ln, tok)
        elif kw == "command":
            self._once(self.command, "command", ln, head)
            if not rest or rest[0].kind != "NAME":
                raise JobError("expected a command name", ln, head.column)
            kv: dict[str, Token] = {}
            pos: list[Token] = []
            i = 1
            while i < len(rest):
                if i + 1 < len(rest) and rest[i + 1].kind == "=":
                    key, j = rest[i].text, i + 2
                    vals, j = self.value(rest, j, ln)
                    kv[key] = vals
                    i = j
                elif rest[i].kind in ("STRING", "INT", "NAME"):
                    pos.append(rest[i])
                    i += 1
                else:
                    raise JobError(f"unexpected {rest[i].text!r}", ln, rest[i].column)
            self.command = (ln, rest[0], kv, pos)
        elif len(rest) >= 1 and rest[0].kind == ":":
            # shorthand action line: "t: x -> ..."
            self.add_assignments(self.actions, head, rest[1:], ln)
        else:
            raise JobError(f"unknown statement {kw!r}", ln, head.column)

    def _once(self, existing, what: str, ln: int, tok: Token) -> None:
        if existing is not None:
            raise JobError(f"duplicate {what} statement", ln, tok.column)

    def value(self, toks: list[Token], j: int, ln: int) -> tuple[Token, int]:
        """One value, possibly a comma-joined list of INT/NAME atoms."""
        if j >= len(toks):
            col = toks[-1].column + len(toks[-1].text)
            raise JobError("missing value after '='", ln, col)
        first = toks[j]
        if first.kind not in ("STRING", "INT", "NAME"):
            raise JobError(f"unexpected {first.text!r}", ln, first.column)
        parts = [first.text]
        j += 1
        if first.kind != "STRING":
            while j + 1 < len(toks) and toks[j].kind == "," and toks[j + 1].kind in ("INT", "NAME"):
                parts.append(toks[j + 1].text)
                j += 2
        if len(parts) > 1:
            return Token("LIST", ",".join(parts), first.column), j
        return first, j

    def keyvalues(self, toks: list[Token], ln: int) -> dict[str, Token]:
        out: dict[str, Token] = {}
        i = 0
        while i < len(toks):
            key = toks[i]
            if key.kind != "NAME" or i + 1 >= len(toks) or toks[i + 1].kind != "=":
                raise JobError(f"expected key=value, got {key.text!r}", ln, key.column)
            if key.text in out:
                raise JobError(f"duplicate key {key.text!r}", ln, key.column)
            val, i = self.value(toks, i + 2, ln)
            out[key.text] = val
        return out

    def assignments(self, toks: list[Token], ln: int) -> list[tuple[Token, Token]]:
        out = []
        i = 0
        while i < len(toks):
            if i + 2 >= len(toks) or toks[i].kind != "NAME" or toks[i + 1].kind != "ARROW" or toks[i + 2].kind != "STRING":
                raise JobError('expected <generator> -> "<word>"', ln, toks[i].column)
            out.append((toks[i], toks[i + 2]))
            i += 3
            if i < len(toks):
                if toks[i].kind != ",":
                    raise JobError("expected ','", ln, toks[i].column)
                i += 1
                if i == len(toks):
                    raise JobError("trailing ','", ln, toks[i - 1].column)
        if not out:
            raise JobError("empty assignment list", ln, 1)
        return out

    def add_assignments(self, target: dict, gen: Token, toks: list[Token], ln: int) -> None:
        if gen.text in target:
            raise JobError(f"duplicate action for {gen.text!r}", ln, gen.column)
        target[gen.text] = (ln, self.assignments(toks, ln), gen)

    # -- pass 2: semantics

    def build(self) -> JobSpec:
        if self.command is None:
            raise JobError("no command given" if self.text.strip() else "empty job", 1 if self.text.strip() else 0, 1)
        ln, name, kv, pos = self.command
        if name.text not in COMMANDS:
            raise JobError(f"unknown command {name.text!r}; expected one of {', '.join(COMMANDS)}", ln, name.column)
        job = JobSpec(command=name.text, args={k: v.value for k, v in kv.items()}, positional=[p.value for p in pos])
        job.source_lines = len(self.text.splitlines())
        self.build_options(job)
        if self.group_line is not None:
            self.build_group(job)
        elif self.actions or self.morphism or self.family or self.element:
            raise JobError("group statement required", ln, 1)
        if self.matrix is not None:
            mln, tok = self.matrix
            job.matrix = _parse_matrix(tok, mln)
        if self.element is not None:
            eln, tok = self.element
            job.element = _parse_in(job.group, tok, eln)
        if self.family is not None:
            self.build_family(job)
        if self.morphism:
            if job.morphism is not None:
                raise JobError("both a family and a morphism were given", self.morphism[0][0], 1)
            self.build_morphism(job)
        elif self.inverse:
            raise JobError("inverse given without morphism", self.inverse[0][0], 1)
        return job

    def build_options(self, job: JobSpec) -> None:
        for key, (ln, tok) in self.options.items():
            if key not in ("ball", "conj", "jobs"):
                raise JobError(f"unknown option {key!r}", ln, tok.column)
            if tok.kind != "INT":
                raise JobError(f"option {key} needs an integer", ln, tok.column)
            setattr(job, key, int(tok.text))
        validate_numeric(job)

    def build_group(self, job: JobSpec) -> None:
        ln, kv = self.group_line
        kind_tok = kv.get("kind")
        if kind_tok is None:
            raise JobError("group needs kind=direct|semidirect|mapping_torus", ln, 1)
        kind = kind_tok.value
        allowed = {"direct": {"r", "s", "kernel", "quotient"}, "semidirect": {"r", "s", "kernel", "quotient"}, "mapping_torus": {"k"}}
        if kind not in allowed:
            raise JobError(f"unknown group kind {kind!r}", ln, kind_tok.column)
        for key, tok in kv.items():
            if key != "kind" and key not in allowed[kind]:
                raise JobError(f"key {key!r} not allowed for kind={kind}", ln, tok.column)
        if kind == "mapping_torus":
            k = _int(kv, "k", ln)
            if k == 0:
                raise JobError("k must be nonzero", ln, kv["k"].column)
            if self.actions or self.action_inverses:
                first = min(v[0] for v in list(self.actions.values()) + list(self.action_inverses.values()))
                raise JobError("a mapping torus has a fixed action; remove the action lines", first, 1)
            job.torus = MappingTorus(k)
            job.group = job.torus.group
            return
        r = _int(kv, "r", ln)
        s = _int(kv, "s", ln)
        if r < 0 or s < 0 or r + s == 0:
            raise JobError("ranks must be non-negative and not both zero", ln, kv["r"].column)
        kernel = _names(kv, "kernel", ln, r)
        quotient = _names(kv, "quotient", ln, s)
        kernel = kernel or default_kernel_names(r)
        quotient = quotient or default_quotient_names(s)
        if kind == "direct" and (self.actions or self.action_inverses):
            first = min(v[0] for v in list(self.actions.values()) + list(self.action_inverses.values()))
            raise JobError("a direct product takes no action lines", first, 1)
        actions = []
        inverses = []
        for target in list(self.actions) + list(self.action_inverses):
            if target not in quotient:
                src = self.actions.get(target) or self.action_inverses[target]
                raise JobError(f"{target!r} is not a quotient generator", src[0], src[2].column)
        for b in quotient:
            actions.append(self._kernel_map(self.actions.get(b), kernel, r))
            inv = self.action_inverses.get(b)
            inverses.append(self._kernel_map(inv, kernel, r) if inv else None)
        try:
            job.group = PfGroup(r, s, actions, inverses, kernel, quotient)
        except GroupError as exc:
            src = next((self.actions[b] for b in quotient if b in self.actions), None)
            raise JobError(f"invalid action: {exc}", src[0] if src else ln, 1) from None

    def _kernel_map(self, entry, kernel: list[str], r: int) -> FreeMorphism:
        images = [Word.generator(r, i) for i in range(r)]
        if entry is None:
            return FreeMorphism(r, r, images)
        ln, pairs, _ = entry
        for gen, word in pairs:
            if gen.text not in kernel:
                raise JobError(f"{gen.text!r} is not a kernel generator", ln, gen.column)
            images[kernel.index(gen.text)] = _parse_word_at(word, kernel, ln)
        return FreeMorphism(r, r, images)

    def build_family(self, job: JobSpec) -> None:
        ln, kv = self.family
        if job.torus is None:
            raise JobError("family automorphisms need group kind=mapping_torus", ln, 1)
        for key, tok in kv.items():
            if key not in ("form", "m", "i", "g"):
                raise JobError(f"unknown family key {key!r}", ln, tok.column)
        form_tok = kv.get("form")
        if form_tok is None or form_tok.value not in ("a", "b", "c", "d"):
            raise JobError("family needs form=a|b|c|d", ln, form_tok.column if form_tok else 1)
        m = _int(kv, "m", ln)
        i = _int(kv, "i", ln)
        g = _parse_in(job.group, kv["g"], ln) if "g" in kv else None
        try:
            fam = family_automorphism(job.torus, form_tok.value, m, i, g)
        except ValueError as exc:
            raise JobError(str(exc), ln, kv["i"].column) from None
        job.morphism = fam.morphism
        job.family = fam.label()

    def build_morphism(self, job: JobSpec) -> None:
        G = job.group
        images = self._images(self.morphism, G)
        inverse = self._images(self.inverse, G) if self.inverse else None
        ln = self.morphism[0][0]
        try:
            f = PfMorphism(G, images, inverse)
        except GroupError as exc:
            raise JobError(f"invalid morphism: {exc}", ln, 1) from None
        problems = relator_failures(G, f)
        if f.has_verified_inverse():
            problems += [f"inverse: {p}" for p in relator_failures(G, f.inverse())]
        if problems and job.command != "verify":
            raise JobError("morphism is not well defined: " + "; ".join(problems), ln, 1)
        job.morphism = f
        job.relator_problems = problems

    def _images(self, lines, G: PfGroup) -> list[PfElement]:
        images = list(G.generators)
        seen: set[str] = set()
        for ln, pairs in lines:
            for gen, word in pairs:
                if gen.text not in G.names:
                    raise JobError(f"unknown generator {gen.text!r}", ln, gen.column)
                if gen.text in seen:
                    raise JobError(f"generator {gen.text!r} assigned twice", ln, gen.column)
                seen.add(gen.text)
                images[G.names.index(gen.text)] = _parse_in(G, word, ln)
        return images


def _int(kv: dict[str, Token], key: str, ln: int) -> int:
    tok = kv.get(key)
    if tok is None:
        raise JobError(f"missing {key}=<int>", ln, 1)
    if tok.kind != "INT":
        raise JobError(f"{key} must be an integer", ln, tok.column)
    return int(tok.text)


def _names(kv: dict[str, Token], key: str, ln: int, n: int) -> list[str] | None:
    tok = kv.get(key)
    if tok is None:
        return None
    names = tok.value.split(",")
    if len(names) != n or not all(re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", x) for x in names):
        raise JobError(f"{key} needs {n} comma-separated generator names", ln, tok.column)
    return names


def _parse_word_at(tok: Token, names, ln: int) -> Word:
    try:
        return parse_word(tok.value, names)
    except WordParseError as exc:
        raise JobError(str(exc).rsplit(" (at column", 1)[0], ln, tok.column + 1 + exc.position) from None


def _parse_in(G: PfGroup | None, tok: Token, ln: int) -> PfElement:
    if G is None:
        raise JobError("a group is needed to read this word", ln, tok.column)
    return G.from_word(_parse_word_at(tok, G.names, ln))


def _parse_matrix(tok: Token, ln: int) -> IntMatrix:
    try:
        return IntMatrix.parse(tok.value)
    except ValueError as exc:
        raise JobError(f"bad matrix: {exc}", ln, tok.column) from None


def validate_numeric(job: JobSpec) -> None:
    if not 0 <= job.ball <= MAX_BALL_RADIUS:
        raise JobError(f"ball radius must lie in 0..{MAX_BALL_RADIUS}")
    if not 0 <= job.conj <= MAX_BALL_RADIUS:
        raise JobError(f"conjugator radius must lie in 0..{MAX_BALL_RADIUS}")
    if not 1 <= job.jobs <= MAX_JOBS:
        raise JobError(f"worker count must lie in 1..{MAX_JOBS}")


def parse_job(text: str) -> JobSpec:
    """Parse and fully validate a job; raises ``JobError`` with a location."""
    p = _Parser(text)
    p.scan()
    return p.build()
