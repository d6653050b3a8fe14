"""Anderson-Putnam style complexes of a (mixed) substitution system as directed multigraphs.

Five flavors are supported:

``ap``                legal 3-words, endpoints glued along legal 4-words
``ap_modified``       legal 3-words, one vertex per overlap 2-word
``ap_full``           all 3-words over the alphabet, vertices all 2-words
``ap_left``           all 2-words as edges, letters as vertices
``ap_left_modified``  legal 2-words and the letters they use
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

from scipy.cluster.hierarchy import DisjointSet

from .words import (Alphabet, SequenceSpec, SubstitutionFamily, Word, apply, legal_words)
from .zmatrix import IntMatrix

FLAVORS = ("ap", "ap_modified", "ap_full", "ap_left", "ap_left_modified")
LEFT_FLAVORS = ("ap_left", "ap_left_modified")


class ComplexError(AssertionError):
    """A bonding map failed an internal consistency check."""


def edge_length(flavor: str) -> int:
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}; expected one of {', '.join(FLAVORS)}")
    return 2 if flavor in LEFT_FLAVORS else 3


@dataclass(frozen=True)
class SystemAtPosition:
    family: SubstitutionFamily
    spec: SequenceSpec
    position: int
    flavor: str

    def __post_init__(self):
        edge_length(self.flavor)
        self.spec.validate(self.family)
        object.__setattr__(self, "position", self.spec.canonical(self.position))

    def successor(self) -> "SystemAtPosition":
        return SystemAtPosition(self.family, self.spec, self.spec.next_position(self.position),
                                self.flavor)


@dataclass(frozen=True)
class CellComplex:
    flavor: str
    alphabet: Alphabet
    edges: tuple[Word, ...]
    vertices: tuple[str, ...]
    vertex_words: tuple[Word, ...]
    head: tuple[int, ...]
    tail: tuple[int, ...]

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def edge_index(self) -> dict[Word, int]:
        return {e: i for i, e in enumerate(self.edges)}

    def edge_name(self, i: int) -> str:
        return self.alphabet.format(self.edges[i])


def _named(alphabet: Alphabet, classes: list[tuple[Word, int]]) -> tuple[str, ...]:
    """Display names; classes sharing an overlap word get _1, _2, ... suffixes."""
    counts: dict[Word, int] = {}
    for w, _ in classes:
        counts[w] = counts.get(w, 0) + 1
    seen: dict[Word, int] = {}
    names = []
    for w, _ in classes:
        base = alphabet.format(w)
        if counts[w] > 1:
            seen[w] = seen.get(w, 0) + 1
            base = f"{base}_{seen[w]}"
        names.append(base)
    return tuple(names)


def _simple_complex(flavor: str, alphabet: Alphabet, edges: list[Word]) -> CellComplex:
    """Vertices are the overlap words themselves (no splitting)."""
    ends = sorted({e[1:] for e in edges} | {e[:-1] for e in edges})
    idx = {w: i for i, w in enumerate(ends)}
    return CellComplex(flavor, alphabet, tuple(edges),
                       tuple(alphabet.format(w) for w in ends), tuple(ends),
                       tuple(idx[e[1:]] for e in edges), tuple(idx[e[:-1]] for e in edges))


@lru_cache(maxsize=512)
def build_complex(sys: SystemAtPosition) -> CellComplex:
    fam, spec, pos, flavor = sys.family, sys.spec, sys.position, sys.flavor
    alphabet = fam.alphabet
    if flavor == "ap_full":
        return _simple_complex(flavor, alphabet, alphabet.words(3))
    if flavor == "ap_left":
        return _simple_complex(flavor, alphabet, alphabet.words(2))
    if flavor == "ap_left_modified":
        return _simple_complex(flavor, alphabet, legal_words(fam, spec, pos, 2))
    edges = legal_words(fam, spec, pos, 3)
    if flavor == "ap_modified":
        return _simple_complex(flavor, alphabet, edges)

    # ap: glue endpoint tokens (edge, is_head) along legal 4-words
    idx = {e: i for i, e in enumerate(edges)}
    ds = DisjointSet([(i, h) for i in range(len(edges)) for h in (0, 1)])
    for w in legal_words(fam, spec, pos, 4):
        ds.merge((idx[w[:3]], 1), (idx[w[1:]], 0))
    classes = []
    for members in ds.subsets():
        tokens = sorted(members)
        e, h = tokens[0]
        word = edges[e][1:] if h else edges[e][:2]
        classes.append((word, tokens[0][0], tokens))
    classes.sort(key=lambda c: (c[0], c[1]))
    head = [0] * len(edges)
    tail = [0] * len(edges)
    for v, (word, _, tokens) in enumerate(classes):
        for e, h in tokens:
            overlap = edges[e][1:] if h else edges[e][:2]
            if overlap != word:
                raise ComplexError(f"vertex class mixes overlaps {word} and {overlap}")
            (head if h else tail)[e] = v
    names = _named(alphabet, [(w, m) for w, m, _ in classes])
    return CellComplex(flavor, alphabet, tuple(edges), names, tuple(w for w, _, _ in classes),
                       tuple(head), tuple(tail))


def coboundary_matrix(c: CellComplex) -> IntMatrix:
    rows = []
    for h, t in zip(c.head, c.tail):
        row = [0] * c.n_vertices
        if h != t:
            row[h] += 1
            row[t] -= 1
        rows.append(row)
    return IntMatrix(rows, c.n_vertices)


@dataclass(frozen=True)
class BondingMaps:
    a0: IntMatrix
    a1: IntMatrix
    source: SystemAtPosition
    target: SystemAtPosition


def image_path(sub, edge: Word) -> list[Word]:
    """Windows of phi(edge) sitting over the image of the edge's second letter."""
    k = len(edge)
    blocks = [apply(sub, (x,)) for x in edge]
    w = sum(blocks, ())
    start = len(blocks[0])
    return [w[q - 1:q - 1 + k] for q in range(start, start + len(blocks[1]))]


@lru_cache(maxsize=512)
def bonding_maps(source: SystemAtPosition, target: SystemAtPosition) -> BondingMaps:
    if source.flavor != target.flavor:
        raise ValueError("flavor mismatch between source and target")
    if (source.family, source.spec) != (target.family, target.spec):
        raise ValueError("source and target belong to different systems")
    if source.position != target.spec.next_position(target.position):
        raise ValueError(f"position {source.position} does not follow position {target.position}")
    sub = target.family[target.spec.at(target.position)]
    src, tgt = build_complex(source), build_complex(target)
    tidx = tgt.edge_index()

    a1 = [[0] * tgt.n_edges for _ in range(src.n_edges)]
    vimg: dict[int, int] = {}
    for e, word in enumerate(src.edges):
        path = []
        for w in image_path(sub, word):
            if w not in tidx:
                raise ComplexError(f"image window {tgt.alphabet.format(w)} of edge "
                                   f"{src.edge_name(e)} is not an edge of the target complex")
            path.append(tidx[w])
            a1[e][tidx[w]] += 1
        for v, img in ((src.head[e], tgt.head[path[-1]]), (src.tail[e], tgt.tail[path[0]])):
            if vimg.setdefault(v, img) != img:
                raise ComplexError(f"vertex {src.vertices[v]} maps to both "
                                   f"{tgt.vertices[vimg[v]]} and {tgt.vertices[img]}")
    a0 = [[0] * tgt.n_vertices for _ in range(src.n_vertices)]
    for v, img in vimg.items():
        a0[v][img] = 1
    m0 = IntMatrix(a0, tgt.n_vertices)
    m1 = IntMatrix(a1, tgt.n_edges)
    if coboundary_matrix(src) @ m0 != m1 @ coboundary_matrix(tgt):
        raise ComplexError("bonding maps do not commute with the coboundaries")
    return BondingMaps(m0, m1, source, target)


@dataclass(frozen=True)
class Tower:
    """Complexes at every canonical position and bonding maps ``next(i) -> i``."""

    positions: tuple[SystemAtPosition, ...]
    complexes: tuple[CellComplex, ...]
    maps: tuple[BondingMaps, ...]

    @property
    def spec(self) -> SequenceSpec:
        return self.positions[0].spec


def build_tower(family: SubstitutionFamily, spec: SequenceSpec, flavor: str) -> Tower:
    positions = tuple(SystemAtPosition(family, spec, i, flavor) for i in range(spec.n_positions))
    complexes = tuple(build_complex(p) for p in positions)
    maps = tuple(bonding_maps(p.successor(), p) for p in positions)
    return Tower(positions, complexes, maps)


# ----------------------------------------------------------------------------
# Export

def export_complex(c: CellComplex, fmt: str) -> str:
    if fmt == "json":
        doc = {
            "flavor": c.flavor,
            "alphabet": list(c.alphabet.letters),
            "edges": [c.alphabet.format(e) for e in c.edges],
            "vertices": list(c.vertices),
            "vertex_words": [c.alphabet.format(w) for w in c.vertex_words],
            "head": list(c.head),
            "tail": list(c.tail),
        }
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "dot":
        lines = [f'digraph "{c.flavor}" {{']
        for i, name in enumerate(c.vertices):
            lines.append(f'  v{i} [label="{name}"];')
        for i in range(c.n_edges):
            lines.append(f'  v{c.tail[i]} -> v{c.head[i]} [label="{c.edge_name(i)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown export format {fmt!r}")


def parse_complex_json(text: str) -> CellComplex:
    doc = json.loads(text)
    alphabet = Alphabet(tuple(doc["alphabet"]))
    return CellComplex(
        doc["flavor"], alphabet,
        tuple(alphabet.parse_word(e) for e in doc["edges"]),
        tuple(doc["vertices"]),
        tuple(alphabet.parse_word(w) for w in doc["vertex_words"]),
        tuple(doc["head"]), tuple(doc["tail"]),
    )
