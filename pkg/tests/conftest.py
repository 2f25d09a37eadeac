import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from reidemeister import FreeMorphism, IntMatrix, PfGroup, Word, compose

settings.register_profile("repo", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=60)
settings.load_profile("repo")


def words(rank=2, max_len=8):
    codes = st.lists(st.integers(1, rank).flatmap(lambda i: st.sampled_from([i, -i])), max_size=max_len)
    return codes.map(lambda cs: Word(rank, cs))


def matrices(n, lo=-10, hi=10):
    return st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n).map(IntMatrix)


ELEMENTARY = [
    IntMatrix([[1, 1], [0, 1]]),
    IntMatrix([[1, 0], [1, 1]]),
    IntMatrix([[0, 1], [1, 0]]),
    IntMatrix([[-1, 0], [0, 1]]),
]


def random_gl2(rng: random.Random, length: int) -> IntMatrix:
    M = IntMatrix.identity(2)
    for _ in range(length):
        E = rng.choice(ELEMENTARY)
        M = M @ (E if rng.random() < 0.5 else _inv2(E))
    return M


def _inv2(E: IntMatrix) -> IntMatrix:
    a, b, c, d = E[0, 0], E[0, 1], E[1, 0], E[1, 1]
    det = a * d - b * c
    return IntMatrix([[d * det, -b * det], [-c * det, a * det]])


def nielsen_automorphism(rng: random.Random, steps: int) -> FreeMorphism:
    """A random automorphism of F_2 built from elementary Nielsen moves."""
    x, y = Word.generator(2, 0), Word.generator(2, 1)
    moves = [
        FreeMorphism(2, 2, [x * y, y]),
        FreeMorphism(2, 2, [y * x, y]),
        FreeMorphism(2, 2, [x, y * x]),
        FreeMorphism(2, 2, [x, x * y]),
        FreeMorphism(2, 2, [x.inverse(), y]),
        FreeMorphism(2, 2, [y, x]),
    ]
    f = FreeMorphism.identity(2)
    for _ in range(steps):
        f = compose(f, rng.choice(moves))
    return f


@pytest.fixture
def klein():
    from reidemeister import klein_bottle_group

    return klein_bottle_group()


@pytest.fixture
def z2_direct():
    return PfGroup(1, 1, kernel_names=["a"], quotient_names=["b"])


# one "ACCEPTANCE n: PASS|FAIL ..." line per criterion, echoed after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
