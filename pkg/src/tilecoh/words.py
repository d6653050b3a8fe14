"""Alphabets, words, substitutions and mixed (s-adic) substitution systems.

Words are tuples of alphabet indices; the alphabet only matters for parsing
and display.  Everything here is immutable and hashable so that the legal
word languages can be cached per ``(family, spec, k)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .zmatrix import IntMatrix

Word = tuple[int, ...]


class ParseError(ValueError):
    """Malformed system description (carries a 1-based line/column)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        if self.column is None:
            return f"line {self.line}: {self.message}"
        return f"line {self.line}, column {self.column}: {self.message}"


@dataclass(frozen=True)
class Alphabet:
    letters: tuple[str, ...]

    def __post_init__(self):
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        if not letters:
            raise ValueError("alphabet must be non-empty")
        if len(set(letters)) != len(letters):
            raise ValueError(f"duplicate letters in alphabet {letters}")
        for x in letters:
            if not x or any(ch.isspace() for ch in x) or x in ("->", "|", "/"):
                raise ValueError(f"bad letter token {x!r}")

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    @property
    def single_char(self) -> bool:
        return all(len(x) == 1 for x in self.letters)

    def index(self, letter: str) -> int:
        try:
            return self._lookup[letter]
        except KeyError:
            raise KeyError(f"unknown letter {letter!r}") from None

    @property
    def _lookup(self) -> dict[str, int]:
        return {x: i for i, x in enumerate(self.letters)}

    def parse_word(self, text: str) -> Word:
        """``"abba"`` for single-character alphabets, ``"x0 x1"`` otherwise."""
        tokens = list(text.replace(" ", "")) if self.single_char else text.split()
        lookup = self._lookup
        try:
            return tuple(lookup[t] for t in tokens)
        except KeyError as exc:
            raise KeyError(f"unknown letter {exc.args[0]!r}") from None

    def format(self, word: Iterable[int]) -> str:
        sep = "" if self.single_char else " "
        return sep.join(self.letters[i] for i in word)

    def words(self, k: int) -> list[Word]:
        """All words of length k in lexicographic (index) order."""
        return list(product(range(len(self)), repeat=k))


def subwords(word: Sequence[int], k: int) -> set[Word]:
    return {tuple(word[i:i + k]) for i in range(len(word) - k + 1)}


@dataclass(frozen=True)
class Substitution:
    alphabet: Alphabet
    images: tuple[Word, ...]
    name: str = "phi"

    def __post_init__(self):
        images = tuple(tuple(int(i) for i in img) for img in self.images)
        object.__setattr__(self, "images", images)
        n = len(self.alphabet)
        if len(images) != n:
            raise ValueError(f"{self.name}: expected {n} images, got {len(images)}")
        for x, img in zip(self.alphabet, images):
            if not img:
                raise ValueError(f"{self.name}: empty image for letter {x!r}")
            if any(not 0 <= i < n for i in img):
                raise ValueError(f"{self.name}: image of {x!r} uses an index outside the alphabet")

    @classmethod
    def from_rules(cls, rules: Mapping[str, str], name: str = "phi",
                   alphabet: Alphabet | None = None) -> "Substitution":
        """Build from ``{"a": "ab", "b": "a"}``; the alphabet defaults to the key order."""
        if alphabet is None:
            alphabet = Alphabet(tuple(rules))
        missing = [x for x in alphabet if x not in rules]
        if missing:
            raise ValueError(f"{name}: no rule for letters {missing}")
        return cls(alphabet, tuple(alphabet.parse_word(rules[x]) for x in alphabet), name)

    def __call__(self, word: Iterable[int]) -> Word:
        return apply(self, word)

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(img) for img in self.images)

    def rules(self) -> dict[str, str]:
        return {x: self.alphabet.format(img) for x, img in zip(self.alphabet, self.images)}

    def __str__(self) -> str:
        return ", ".join(f"{x} -> {w}" for x, w in self.rules().items())


def apply(sub: Substitution, w: Iterable[int]) -> Word:
    images = sub.images
    out: list[int] = []
    for x in w:
        out.extend(images[x])
    return tuple(out)


def compose(outer: Substitution, inner: Substitution, name: str | None = None) -> Substitution:
    """The substitution ``x -> outer(inner(x))``."""
    if outer.alphabet != inner.alphabet:
        raise ValueError("cannot compose substitutions over different alphabets")
    if name is None:
        name = f"{outer.name}{inner.name}"
    return Substitution(outer.alphabet, tuple(apply(outer, img) for img in inner.images), name)


def power(sub: Substitution, n: int) -> Substitution:
    if n < 1:
        raise ValueError("power must be >= 1")
    out = sub
    for _ in range(n - 1):
        out = compose(sub, out, name=sub.name)
    return Substitution(sub.alphabet, out.images, f"{sub.name}^{n}" if n > 1 else sub.name)


def substitution_matrix(sub: Substitution) -> IntMatrix:
    """Entry (i, j) counts occurrences of letter i in the image of letter j."""
    n = len(sub.alphabet)
    rows = [[0] * n for _ in range(n)]
    for j, img in enumerate(sub.images):
        for i in img:
            rows[i][j] += 1
    return IntMatrix(rows)


@dataclass(frozen=True)
class SubstitutionFamily:
    alphabet: Alphabet
    substitutions: tuple[Substitution, ...]

    def __post_init__(self):
        subs = tuple(self.substitutions)
        object.__setattr__(self, "substitutions", subs)
        if not subs:
            raise ValueError("a family needs at least one substitution")
        names = [s.name for s in subs]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate substitution names {names}")
        for s in subs:
            if s.alphabet != self.alphabet:
                raise ValueError(f"{s.name} does not act on the family alphabet")

    @classmethod
    def of(cls, *subs: Substitution) -> "SubstitutionFamily":
        return cls(subs[0].alphabet, subs)

    def __len__(self) -> int:
        return len(self.substitutions)

    def __getitem__(self, i: int) -> Substitution:
        return self.substitutions[i]

    def __iter__(self):
        return iter(self.substitutions)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.substitutions)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown substitution {name!r}") from None

    def subfamily(self, indices: Iterable[int]) -> "SubstitutionFamily":
        keep = sorted(set(indices))
        return SubstitutionFamily(self.alphabet, tuple(self.substitutions[i] for i in keep))


@dataclass(frozen=True)
class SequenceSpec:
    """The eventually periodic index sequence ``preperiod . period^inf`` (0-based indices).

    Position ``i`` of the tower is the shifted system ``sigma^i s``; the
    substitution mapping position ``i + 1`` onto position ``i`` is ``at(i)``.
    Positions past the preperiod are reduced into one period cycle.
    """

    period: tuple[int, ...]
    preperiod: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "period", tuple(int(i) for i in self.period))
        object.__setattr__(self, "preperiod", tuple(int(i) for i in self.preperiod))
        if not self.period:
            raise ValueError("period must be non-empty")
        if any(i < 0 for i in self.period + self.preperiod):
            raise ValueError("negative substitution index")

    @classmethod
    def constant(cls, index: int = 0) -> "SequenceSpec":
        return cls((index,))

    @property
    def cycle_start(self) -> int:
        return len(self.preperiod)

    @property
    def n_positions(self) -> int:
        return len(self.preperiod) + len(self.period)

    @property
    def used(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.preperiod + self.period)))

    def canonical(self, i: int) -> int:
        if i < 0:
            raise ValueError("negative position")
        pre = len(self.preperiod)
        if i < pre:
            return i
        return pre + (i - pre) % len(self.period)

    def at(self, i: int) -> int:
        """Index of the i-th substitution (0-based), i.e. s_{i+1}."""
        pre = len(self.preperiod)
        if i < pre:
            return self.preperiod[i]
        return self.period[(i - pre) % len(self.period)]

    def next_position(self, i: int) -> int:
        return self.canonical(self.canonical(i) + 1)

    def shift(self, n: int = 1) -> "SequenceSpec":
        spec = self
        for _ in range(n):
            if spec.preperiod:
                spec = SequenceSpec(spec.period, spec.preperiod[1:])
            else:
                spec = SequenceSpec(spec.period[1:] + spec.period[:1])
        return spec

    def validate(self, family: SubstitutionFamily) -> None:
        bad = [i for i in self.preperiod + self.period if i >= len(family)]
        if bad:
            raise ValueError(f"substitution indices {bad} out of range for a family of {len(family)}")

    def format(self, family: SubstitutionFamily | None = None) -> str:
        def name(i):
            return family[i].name if family is not None else str(i + 1)
        pre = " ".join(name(i) for i in self.preperiod)
        per = " ".join(name(i) for i in self.period)
        return f"{pre} | {per}" if pre else f"| {per}"

    @classmethod
    def parse(cls, text: str, family: SubstitutionFamily) -> "SequenceSpec":
        """Parse ``"pre ... | period ..."``; tokens are names or 1-based indices."""
        if text.count("|") > 1:
            raise ValueError("at most one '|' allowed in a sequence")
        pre_text, _, per_text = text.rpartition("|")

        def indices(part: str) -> tuple[int, ...]:
            out = []
            for tok in part.split():
                if tok in family.names:
                    out.append(family.index_of(tok))
                elif tok.isdigit() and 1 <= int(tok) <= len(family):
                    out.append(int(tok) - 1)
                else:
                    raise ValueError(f"unknown substitution {tok!r} in sequence")
            return tuple(out)

        pre, per = indices(pre_text), indices(per_text)
        if not per:
            raise ValueError("sequence period is empty")
        spec = cls(per, pre)
        spec.validate(family)
        return spec


# ----------------------------------------------------------------------------
# Input documents

_RULE = re.compile(r"^\s*(\S+)\s*->\s*(.*?)\s*$")


def parse_system(text: str) -> tuple[SubstitutionFamily, SequenceSpec | None]:
    """Parse a system document; see the README for the grammar.

    A document with a single substitution and no ``sequence:`` line gets
    the constant sequence of that substitution.
    """
    alphabet: Alphabet | None = None
    blocks: list[dict] = []          # {"name", "line", "rules": [(lineno, col, lhs, rhs)]}
    sequence: tuple[str, int, int] | None = None
    current: dict | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        stripped = line.strip()
        col0 = len(line) - len(line.lstrip()) + 1
        key, sep, rest = stripped.partition(":")
        key = key.strip()
        if sep and key == "alphabet":
            if alphabet is not None:
                raise ParseError("alphabet given twice", lineno, col0)
            try:
                alphabet = Alphabet(tuple(rest.split()))
            except ValueError as exc:
                raise ParseError(str(exc), lineno, col0) from None
            current = None
            continue
        if sep and key == "sequence":
            if sequence is not None:
                raise ParseError("sequence given twice", lineno, col0)
            sequence = (rest, lineno, line.index(":") + 2)
            current = None
            continue
        if sep and (key.startswith("sub ") or key == "sub"):
            name = key[3:].strip()
            if not name or "->" in name:
                raise ParseError("substitution name missing", lineno, col0)
            if any(b["name"] == name for b in blocks):
                raise ParseError(f"duplicate substitution name {name!r}", lineno, col0 + 4)
            current = {"name": name, "line": lineno, "rules": []}
            blocks.append(current)
            offset = line.index(":") + 1
            _collect_rules(line[offset:], lineno, offset, current)
            continue
        if "->" not in stripped:
            raise ParseError(f"cannot parse {stripped!r}", lineno, col0)
        if current is None:
            if blocks:
                raise ParseError("rule outside a 'sub' block", lineno, col0)
            current = {"name": "phi", "line": lineno, "rules": []}
            blocks.append(current)
        _collect_rules(line, lineno, 0, current)

    if not blocks:
        raise ParseError("no substitution found")

    if alphabet is None:
        first = blocks[0]["rules"]
        letters = []
        for ln, col, lhs, _ in first:
            if lhs not in letters:
                letters.append(lhs)
        try:
            alphabet = Alphabet(tuple(letters))
        except ValueError as exc:
            raise ParseError(str(exc), blocks[0]["line"]) from None

    subs = [_block_to_substitution(b, alphabet) for b in blocks]
    family = SubstitutionFamily(alphabet, tuple(subs))

    if sequence is None:
        spec = SequenceSpec.constant(0) if len(family) == 1 else None
    else:
        seq_text, ln, col = sequence
        try:
            spec = SequenceSpec.parse(seq_text, family)
        except ValueError as exc:
            raise ParseError(str(exc), ln, col) from None
    return family, spec


def _collect_rules(text: str, lineno: int, offset: int, block: dict) -> None:
    # offset: 0-based column of text within its line
    pos = offset
    for chunk in text.split("/"):
        if chunk.strip():
            m = _RULE.match(chunk)
            if m is None:
                raise ParseError(f"expected 'letter -> word', got {chunk.strip()!r}",
                                 lineno, pos + len(chunk) - len(chunk.lstrip()) + 1)
            lhs, rhs = m.group(1), m.group(2)
            col = pos + chunk.index(lhs) + 1
            block["rules"].append((lineno, col, lhs, rhs))
        pos += len(chunk) + 1


def _block_to_substitution(block: dict, alphabet: Alphabet) -> Substitution:
    images: dict[str, Word] = {}
    for ln, col, lhs, rhs in block["rules"]:
        if lhs not in alphabet.letters:
            raise ParseError(f"unknown letter {lhs!r}", ln, col)
        if lhs in images:
            raise ParseError(f"duplicate rule for {lhs!r} in {block['name']}", ln, col)
        if not rhs.strip():
            raise ParseError(f"empty image for {lhs!r} in {block['name']}", ln, col)
        try:
            images[lhs] = alphabet.parse_word(rhs)
        except KeyError as exc:
            raise ParseError(f"{exc.args[0]} in image of {lhs!r}", ln, col) from None
    missing = [x for x in alphabet if x not in images]
    if missing:
        raise ParseError(f"{block['name']}: no rule for {', '.join(missing)}", block["line"])
    return Substitution(alphabet, tuple(images[x] for x in alphabet), block["name"])


def format_system(family: SubstitutionFamily, spec: SequenceSpec | None = None) -> str:
    lines = ["alphabet: " + " ".join(family.alphabet)]
    for sub in family:
        lines.append(f"sub {sub.name}:")
        lines.extend(f"  {x} -> {w}" for x, w in sub.rules().items())
    if spec is not None:
        lines.append("sequence: " + spec.format(family))
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------------
# Legal words

def _window_image(sub: Substitution, w: Word, k: int) -> set[Word]:
    u = apply(sub, w)
    if len(u) < k:
        return {u}
    return subwords(u, k)


@lru_cache(maxsize=256)
def _legal_language(family: SubstitutionFamily, spec: SequenceSpec, k: int) -> tuple[frozenset, ...]:
    """Per canonical position: k-windows of composite images plus whole images shorter than k.

    A k-window of phi(W) covers at most k consecutive letters of W, so the
    state at position i is the image under phi_{s_i} of the state at the
    next position (and of single letters).  Iterated to the least fixpoint.
    """
    spec.validate(family)
    n = spec.n_positions
    letters = {(x,) for x in range(len(family.alphabet))}
    state: list[set[Word]] = [set() for _ in range(n)]
    cap = 10 * len(family.alphabet) ** k * n + 10 * n
    for _ in range(cap):
        changed = False
        for i in reversed(range(n)):
            sub = family[spec.at(i)]
            nxt = state[spec.next_position(i)]
            new: set[Word] = set()
            for w in letters | nxt:
                new |= _window_image(sub, w, k)
            if not new <= state[i]:
                state[i] |= new
                changed = True
        if not changed:
            return tuple(frozenset(w for w in s if len(w) == k) for s in state)
    raise RuntimeError(f"legal word iteration did not stabilise within {cap} sweeps")


def legal_words(family: SubstitutionFamily, spec: SequenceSpec, position: int, k: int) -> list[Word]:
    """Sorted list of k-letter words legal for the system ``(family, sigma^position spec)``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    lang = _legal_language(family, spec, k)
    return sorted(lang[spec.canonical(position)])


# ----------------------------------------------------------------------------
# Perron-Frobenius data

@dataclass(frozen=True)
class PFData:
    eigenvalue: float
    left_eigenvector: tuple[float, ...]
    residual: float


def _left_residual(v: np.ndarray, a: np.ndarray, lam: float) -> float:
    return float(np.max(np.abs(v @ a - lam * v)))


def pf_data(sub: Substitution, tol: float = 1e-12, max_iter: int = 10**6) -> PFData:
    """Dominant eigenvalue and positive left eigenvector (min entry 1) by power iteration."""
    from .analysis import is_primitive

    decision = is_primitive(sub)
    if decision.verdict != "yes":
        raise ValueError(f"{sub.name} is not primitive: {decision}")
    a = np.array(substitution_matrix(sub).tolist(), dtype=float)
    v = np.ones(a.shape[0])
    lam = 0.0
    res = np.inf
    for _ in range(max_iter):
        w = v @ a
        w = w / w.min()
        lam = float((w @ a) @ w / (w @ w))
        v = w
        res = _left_residual(v, a, lam)
        if res < tol:
            break
    else:
        raise RuntimeError(f"power iteration did not converge (residual {res:.3e})")
    return PFData(lam, tuple(float(x) for x in v), res)


@dataclass(frozen=True)
class CommonEigenReport:
    exists: bool
    vector: tuple[float, ...] | None
    worst_residual: float
    members: tuple[PFData, ...] = field(default=())


def common_left_pf(family: SubstitutionFamily, tol: float = 1e-9) -> CommonEigenReport:
    """Check whether one member's left PF vector is a left eigenvector of every member."""
    data = tuple(pf_data(sub) for sub in family)
    mats = [np.array(substitution_matrix(sub).tolist(), dtype=float) for sub in family]
    best: tuple[float, tuple[float, ...]] | None = None
    for cand in data:
        v = np.array(cand.left_eigenvector)
        worst = max(_left_residual(v, a, d.eigenvalue) for a, d in zip(mats, data))
        if best is None or worst < best[0]:
            best = (worst, cand.left_eigenvector)
    worst, vec = best
    if worst < tol:
        return CommonEigenReport(True, vec, worst, data)
    return CommonEigenReport(False, None, worst, data)
