"""Decision procedures: primitivity (single, family, family with sequence) and self-correction.

Primitivity only depends on zero patterns of substitution matrices, which
are kept as tuples of row bitmasks: bit j of row i is set when letter i
occurs in the image of letter j.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

from .words import (Alphabet, SequenceSpec, Substitution, SubstitutionFamily, Word, apply,
                    subwords)

Pattern = tuple[int, ...]

VERDICTS = ("yes", "no", "unknown")


@dataclass(frozen=True)
class Decision:
    verdict: str
    witness: int | None = None
    certificate: str | None = None
    note: str = ""

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict == "yes" and self.witness is None:
            raise ValueError("a yes verdict needs a witness")
        if self.verdict == "no" and self.certificate is None:
            raise ValueError("a no verdict needs a certificate")

    def __bool__(self) -> bool:
        return self.verdict == "yes"

    def __str__(self) -> str:
        if self.verdict == "yes":
            return f"yes (n={self.witness})"
        if self.verdict == "no":
            return f"no ({self.certificate})"
        return f"unknown ({self.note})" if self.note else "unknown"


def wielandt_bound(m: int) -> int:
    return m * m - 2 * m + 2


def pattern(sub: Substitution) -> Pattern:
    n = len(sub.alphabet)
    rows = [0] * n
    for j, img in enumerate(sub.images):
        for i in img:
            rows[i] |= 1 << j
    return tuple(rows)


def pattern_product(p: Pattern, q: Pattern) -> Pattern:
    out = []
    for row in p:
        acc = 0
        k = 0
        while row:
            if row & 1:
                acc |= q[k]
            row >>= 1
            k += 1
        out.append(acc)
    return tuple(out)


def is_positive(p: Pattern) -> bool:
    full = (1 << len(p)) - 1
    return all(r == full for r in p)


def _zero_entry(p: Pattern) -> tuple[int, int] | None:
    """First zero (i, j) scanning columns j outermost."""
    n = len(p)
    for j in range(n):
        for i in range(n):
            if not p[i] >> j & 1:
                return i, j
    return None


def is_primitive(sub: Substitution) -> Decision:
    """Exact: A^n > 0 for some n <= m^2 - 2m + 2, with n minimal."""
    letters = sub.alphabet.letters
    a = pattern(sub)
    bound = wielandt_bound(len(letters))
    p = a
    union = a
    for n in range(1, bound + 1):
        if is_positive(p):
            return Decision("yes", n)
        p = pattern_product(p, a)
        union = tuple(x | y for x, y in zip(union, p))
    missing = _zero_entry(union)
    if missing is not None:
        i, j = missing
        return Decision("no", certificate=f"({letters[i]},{letters[j]})",
                        note=f"{letters[i]} never occurs in {sub.name}^n({letters[j]})")
    i, j = _zero_entry(p)
    return Decision("no", certificate=f"({letters[i]},{letters[j]})",
                    note=f"irreducible but periodic; {letters[i]} does not occur in "
                         f"{sub.name}^{bound + 1}({letters[j]})")


def is_family_primitive(family: SubstitutionFamily, cap: int = 12) -> Decision:
    """Exact decision over all products of the family.

    Positive patterns are absorbing (no image is empty), so the family is
    primitive iff the graph of reachable non-positive patterns under
    right multiplication by the generators is acyclic; the minimal witness
    is one more than its longest path.  ``cap`` is accepted for interface
    symmetry and does not limit the search.
    """
    gens = [pattern(sub) for sub in family]
    names = family.names
    start = {}
    for r, g in enumerate(gens):
        if not is_positive(g):
            start.setdefault(g, (r,))
    if not start:
        return Decision("yes", 1)

    # explore non-positive patterns, remembering one index word reaching each
    reach: dict[Pattern, tuple[int, ...]] = dict(start)
    succ: dict[Pattern, list[tuple[int, Pattern]]] = {}
    frontier = list(start)
    while frontier:
        nxt = []
        for p in frontier:
            succ[p] = []
            for r, g in enumerate(gens):
                q = pattern_product(p, g)
                if is_positive(q):
                    continue
                succ[p].append((r, q))
                if q not in reach:
                    reach[q] = reach[p] + (r,)
                    nxt.append(q)
        frontier = nxt

    # iterative DFS for a cycle, longest paths otherwise
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {p: WHITE for p in succ}
    longest: dict[Pattern, int] = {}
    for root in sorted(start, key=lambda p: start[p]):
        if colour[root] != WHITE:
            continue
        stack = [(root, iter(succ[root]))]
        path = [root]
        colour[root] = GREY
        while stack:
            p, it = stack[-1]
            step = next(it, None)
            if step is None:
                colour[p] = BLACK
                longest[p] = 1 + max((longest[q] for _, q in succ[p]), default=0)
                stack.pop()
                path.pop()
                continue
            r, q = step
            if colour[q] == GREY:
                k = path.index(q)
                cyc = _cycle_labels(path[k:] + [q], succ)
                prefix = " ".join(names[i] for i in reach[q])
                cert = f"{prefix} ({' '.join(names[i] for i in cyc)})^inf"
                return Decision("no", certificate=cert,
                                note="this product never becomes strictly positive")
            if colour[q] == WHITE:
                colour[q] = GREY
                stack.append((q, iter(succ[q])))
                path.append(q)
    return Decision("yes", 1 + max(longest[p] for p in start))


def _cycle_labels(nodes: list[Pattern], succ) -> list[int]:
    labels = []
    for p, q in zip(nodes, nodes[1:]):
        labels.append(next(r for r, t in succ[p] if t == q))
    return labels


def is_pair_primitive(family: SubstitutionFamily, spec: SequenceSpec, cap: int = 12) -> Decision:
    """Window products starting at every tower position eventually become positive.

    Exact: from each position the search runs past a full Wielandt bound of
    period composites, after which positivity can no longer first appear.
    ``cap`` is accepted for interface symmetry.
    """
    spec.validate(family)
    gens = [pattern(sub) for sub in family]
    m = len(family.alphabet)
    horizon = spec.cycle_start + len(spec.period) * (wielandt_bound(m) + 1)
    witness = 0
    for pos in range(spec.n_positions):
        p = gens[spec.at(pos)]
        found = None
        for n in range(1, horizon + 1):
            if is_positive(p):
                found = n
                break
            p = pattern_product(p, gens[spec.at(pos + n)])
        if found is None:
            return Decision("no", certificate=f"position {pos}",
                            note=f"products starting at position {pos} are never positive")
        witness = max(witness, found)
    return Decision("yes", witness)


# ----------------------------------------------------------------------------
# Self-correction

def _step2(sub: Substitution, words: frozenset) -> frozenset:
    out: set[Word] = set()
    for w in words:
        out |= subwords(apply(sub, w), 2)
    return frozenset(out)


def is_self_correcting(family: SubstitutionFamily, cap: int = 12) -> Decision:
    """Check self-correction quantified over all index tuples of the family.

    For a tuple t = (r_1..r_n) let X_t be the 2-letter subwords of
    phi_t(A^2) and C_t those of phi_{r_1..r_j}(x) for j <= n and letters x.
    Level n passes when X_t is inside C_t for every t of length n.  Both
    sets evolve by prepending a substitution, so the collection of
    (X_t, C_t) pairs at level n is a deterministic function of level n-1;
    once it repeats without passing, the answer is no.
    """
    alphabet = family.alphabet
    letter_sub2 = [frozenset().union(*(subwords(img, 2) for img in sub.images))
                   for sub in family]

    states: dict[tuple[frozenset, frozenset], tuple[int, ...]] = {
        (frozenset(alphabet.words(2)), frozenset()): ()}
    seen: set[frozenset] = set()
    for n in range(1, cap + 1):
        nxt: dict[tuple[frozenset, frozenset], tuple[int, ...]] = {}
        for (x, c), t in sorted(states.items(), key=lambda kv: kv[1]):
            for r, sub in enumerate(family):
                key = (_step2(sub, x), letter_sub2[r] | _step2(sub, c))
                nxt.setdefault(key, (r,) + t)
        states = nxt
        bad = {k: t for k, t in states.items() if not k[0] <= k[1]}
        if not bad:
            return Decision("yes", n)
        level = frozenset(states)
        if level in seen:
            word, t = min(((min(k[0] - k[1]), t) for k, t in bad.items()))
            fmt = alphabet.format(word)
            prod = "".join(family[i].name for i in t)
            return Decision("no", certificate=fmt,
                            note=f"{fmt} keeps appearing in images of two-letter words "
                                 f"(e.g. under {prod}) but never in images of single letters")
        seen.add(level)
    return Decision("unknown", note=f"undecided up to n={cap}")


def max_rank_substitution(n: int) -> Substitution:
    """x_i -> x_i x_{i+1} for i < n-1 and x_{n-1} -> x_{n-1} x_0 x_0."""
    if n < 2:
        raise ValueError("need at least two letters")
    letters = tuple(string.ascii_lowercase[:n]) if n <= 26 else tuple(f"x{i}" for i in range(n))
    images = [(i, i + 1) for i in range(n - 1)] + [(n - 1, 0, 0)]
    return Substitution(Alphabet(letters), tuple(images), f"max{n}")
