import sys
from pathlib import Path

import pytest
from hypothesis import assume, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from tilecoh import (Alphabet, SequenceSpec, Substitution, SubstitutionFamily, is_primitive,
                     parse_system)

ROOT = Path(__file__).resolve().parent.parent
SYSTEMS = ROOT / "systems"

LONG_FAMILY_TEXT = """alphabet: a b c
sub phi1: a -> ab / b -> bc / c -> ca
sub phi2: a -> bb / b -> cc / c -> ac
"""


def system(text):
    family, spec = parse_system(text)
    return family, spec


@pytest.fixture
def bbaaab():
    return system("a -> bbaaab\nb -> bbab\n")


@pytest.fixture
def aba():
    return system("a -> aba\nb -> bbab\n")


@pytest.fixture
def long_family():
    return system(LONG_FAMILY_TEXT)[0]


@pytest.fixture
def fibonacci():
    return system("sub phi: a -> ab / b -> a")


# ----------------------------------------------------------------------------
# hypothesis strategies

@st.composite
def substitutions(draw, min_letters=1, max_letters=3, max_len=4, name="phi", alphabet=None):
    if alphabet is None:
        m = draw(st.integers(min_letters, max_letters))
        alphabet = Alphabet(tuple("abcd"[:m]))
    m = len(alphabet)
    images = tuple(tuple(draw(st.lists(st.integers(0, m - 1), min_size=1, max_size=max_len)))
                   for _ in range(m))
    return Substitution(alphabet, images, name)


@st.composite
def primitive_substitutions(draw, min_letters=2, max_letters=3, min_len=2, max_len=4):
    m = draw(st.integers(min_letters, max_letters))
    alphabet = Alphabet(tuple("abcd"[:m]))
    images = tuple(tuple(draw(st.lists(st.integers(0, m - 1), min_size=min_len, max_size=max_len)))
                   for _ in range(m))
    sub = Substitution(alphabet, images)
    assume(is_primitive(sub).verdict == "yes")
    return sub


@st.composite
def mixed_systems(draw, max_members=2, max_letters=3, max_len=3):
    m = draw(st.integers(2, max_letters))
    alphabet = Alphabet(tuple("abcd"[:m]))
    k = draw(st.integers(1, max_members))
    subs = [draw(substitutions(alphabet=alphabet, max_len=max_len, name=f"phi{i + 1}"))
            for i in range(k)]
    family = SubstitutionFamily(alphabet, tuple(subs))
    per = tuple(draw(st.lists(st.integers(0, k - 1), min_size=1, max_size=3)))
    pre = tuple(draw(st.lists(st.integers(0, k - 1), max_size=2)))
    return family, SequenceSpec(per, pre)


# ----------------------------------------------------------------------------
# acceptance summary

ACCEPTANCE_RESULTS: dict[int, tuple[str, bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        title, ok, detail = ACCEPTANCE_RESULTS[k]
        line = f"criterion {k} [{'PASS' if ok else 'FAIL'}] {title}"
        terminalreporter.write_line(line + (f": {detail}" if detail else ""))
