"""Exact integer matrices: Smith normal form, kernels, cokernels, ranks.

All arithmetic is on Python ints.  Matrices are small (at most a few
hundred rows) so everything is dense.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from typing import Iterable, Sequence


class IntMatrix:
    """Immutable dense matrix of Python integers."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, rows: Iterable[Iterable[int]], ncols: int | None = None):
        data = tuple(tuple(operator.index(x) for x in r) for r in rows)  # rejects floats
        if ncols is None:
            if not data:
                raise ValueError("ncols required for a matrix with no rows")
            ncols = len(data[0])
        if any(len(r) != ncols for r in data):
            raise ValueError("ragged rows")
        self.nrows = len(data)
        self.ncols = ncols
        self._rows = data

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntMatrix":
        return cls([[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: Sequence[int]) -> "IntMatrix":
        if len(entries) != nrows * ncols:
            raise ValueError("entry count does not match shape")
        return cls([entries[i * ncols:(i + 1) * ncols] for i in range(nrows)], ncols)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[int]], nrows: int) -> "IntMatrix":
        return cls([[c[i] for c in cols] for i in range(nrows)], len(cols))

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def entries(self) -> tuple[int, ...]:
        return tuple(x for r in self._rows for x in r)

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._rows]

    def row(self, i: int) -> tuple[int, ...]:
        return self._rows[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.col(j) for j in range(self.ncols)]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self._rows[i][j]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix([[r[j] for r in self._rows] for j in range(self.ncols)], self.nrows)

    def submatrix(self, rows: Iterable[int] | None = None, cols: Iterable[int] | None = None) -> "IntMatrix":
        rows = range(self.nrows) if rows is None else list(rows)
        cols = range(self.ncols) if cols is None else list(cols)
        return IntMatrix([[self._rows[i][j] for j in cols] for i in rows], len(cols))

    def permuted(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "IntMatrix":
        """Matrix whose (i, j) entry is self[row_perm[i], col_perm[j]]."""
        return self.submatrix(row_perm, col_perm)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = other.columns()
        return IntMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self._rows],
                         other.ncols)

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(a * b for a, b in zip(r, vec)) for r in self._rows)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same(other)
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)],
                         self.ncols)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same(other)
        return IntMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)],
                         self.ncols)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-a for a in r] for r in self._rows], self.ncols)

    def __mul__(self, k: int) -> "IntMatrix":
        return IntMatrix([[k * a for a in r] for r in self._rows], self.ncols)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "IntMatrix":
        if not self.is_square or k < 0:
            raise ValueError("matrix power needs a square matrix and k >= 0")
        result = IntMatrix.identity(self.nrows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def _check_same(self, other: "IntMatrix") -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.nrows, self.ncols, self._rows))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._rows for x in r)

    def __repr__(self) -> str:
        return f"IntMatrix({self.tolist()!r}, ncols={self.ncols})"

    def format(self) -> str:
        """One bracketed row per line, entries right-aligned and space separated."""
        if not self.nrows:
            return f"[] ({self.nrows}x{self.ncols})"
        width = max((len(str(x)) for x in self.entries), default=1)
        return "\n".join("[" + " ".join(str(x).rjust(width) for x in r) + "]" for r in self._rows)

    @classmethod
    def parse(cls, text: str) -> "IntMatrix":
        rows = []
        for line in text.strip().splitlines():
            line = line.strip()
            if not (line.startswith("[") and line.endswith("]")):
                raise ValueError(f"bad matrix row {line!r}")
            rows.append([int(x) for x in line[1:-1].split()])
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise ValueError("ragged matrix text")
        return cls(rows, widths.pop() if widths else 0)


# ----------------------------------------------------------------------------
# Smith normal form

@dataclass(frozen=True)
class SNFResult:
    """``s = u @ m @ v`` with u, v unimodular; ``u_inv``/``v_inv`` are their inverses."""

    s: IntMatrix
    u: IntMatrix
    v: IntMatrix
    u_inv: IntMatrix
    v_inv: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.s[i, i] for i in range(min(self.s.shape)))

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(d for d in self.diagonal if d)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


def _eye(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def snf(m: IntMatrix) -> SNFResult:
    """Smith normal form with transforms.

    Pivot policy: smallest nonzero absolute value in the active block, ties
    broken by row-major position.  Deterministic for a given input.
    """
    nr, nc = m.shape
    a = m.tolist()
    u, ui, v, vi = _eye(nr), _eye(nr), _eye(nc), _eye(nc)

    def row_add(i, t, q):  # row i += q * row t
        a[i] = [x + q * y for x, y in zip(a[i], a[t])]
        u[i] = [x + q * y for x, y in zip(u[i], u[t])]
        for r in ui:
            r[t] -= q * r[i]

    def row_swap(i, t):
        a[i], a[t] = a[t], a[i]
        u[i], u[t] = u[t], u[i]
        for r in ui:
            r[i], r[t] = r[t], r[i]

    def col_add(j, t, q):  # col j += q * col t
        for r in a:
            r[j] += q * r[t]
        for r in v:
            r[j] += q * r[t]
        vi[t] = [x - q * y for x, y in zip(vi[t], vi[j])]

    def col_swap(j, t):
        for r in a:
            r[j], r[t] = r[t], r[j]
        for r in v:
            r[j], r[t] = r[t], r[j]
        vi[j], vi[t] = vi[t], vi[j]

    def bring(i, j, t):
        if i != t:
            row_swap(i, t)
        if j != t:
            col_swap(j, t)

    for t in range(min(nr, nc)):
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                x = a[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        bring(best[1], best[2], t)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    row_add(i, t, -(a[i][t] // p))
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, nc):
                if a[t][j]:
                    col_add(j, t, -(a[t][j] // p))
                    dirty = dirty or a[t][j] != 0
            if dirty:
                cands = [(abs(a[t][j]), t, j) for j in range(t, nc) if a[t][j]]
                cands += [(abs(a[i][t]), i, t) for i in range(t + 1, nr) if a[i][t]]
                _, i, j = min(cands, key=lambda c: c[0])
                bring(i, j, t)
                continue
            bad = next(((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc)
                        if a[i][j] % p), None)
            if bad is None:
                break
            row_add(t, bad[0], 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
            for r in ui:
                r[t] = -r[t]

    return SNFResult(IntMatrix(a, nc), IntMatrix(u, nr), IntMatrix(v, nc),
                     IntMatrix(ui, nr), IntMatrix(vi, nc))


def is_smith_form(s: IntMatrix) -> bool:
    for i in range(s.nrows):
        for j in range(s.ncols):
            if i != j and s[i, j]:
                return False
    diag = [s[i, i] for i in range(min(s.shape))]
    if any(d < 0 for d in diag):
        return False
    for d0, d1 in zip(diag, diag[1:]):
        if d0 == 0 and d1 != 0:
            return False
        if d0 and d1 % d0:
            return False
    return True


# ----------------------------------------------------------------------------
# Elimination-based routines (independent of the SNF code path)

def rank(m: IntMatrix) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination."""
    a = m.tolist()
    nr, nc = m.shape
    r, prev = 0, 1
    for c in range(nc):
        piv = next((i for i in range(r, nr) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pr = a[r]
        for i in range(r + 1, nr):
            ai = a[i]
            f = ai[c]
            for j in range(c + 1, nc):
                ai[j] = (pr[c] * ai[j] - f * pr[j]) // prev
            ai[c] = 0
        prev = pr[c]
        r += 1
        if r == nr:
            break
    return r


def det(m: IntMatrix) -> int:
    """Determinant by Bareiss elimination."""
    if not m.is_square:
        raise ValueError("determinant of a non-square matrix")
    n = m.nrows
    if n == 0:
        return 1
    a = m.tolist()
    sign, prev = 1, 1
    for c in range(n - 1):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                a[i][j] = (a[c][c] * a[i][j] - a[i][c] * a[c][j]) // prev
            a[i][c] = 0
        prev = a[c][c]
    return sign * a[n - 1][n - 1]


def rank_mod_p(m: IntMatrix, p: int) -> int:
    """Rank over the field with p elements (p prime)."""
    a = [[x % p for x in r] for r in m.tolist()]
    nr, nc = m.shape
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [(x * inv) % p for x in a[r]]
        for i in range(nr):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
        if r == nr:
            break
    return r


def eventual_rank(m: IntMatrix) -> int:
    """rank(m^n) for n = dimension; ranks of powers are stable from there on."""
    if not m.is_square:
        raise ValueError("eventual rank needs a square matrix")
    if m.nrows == 0:
        return 0
    return rank(m ** m.nrows)


# ----------------------------------------------------------------------------
# Kernels, images, quotients

def _normalize_columns(cols: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    out = []
    for c in cols:
        lead = next((x for x in c if x), 0)
        out.append(tuple(-x for x in c) if lead < 0 else c)
    return out


def kernel_basis(m: IntMatrix) -> IntMatrix:
    """Columns form a Z-basis of {x in Z^n : m x = 0}."""
    res = snf(m)
    r = res.rank
    cols = _normalize_columns([res.v.col(j) for j in range(r, m.ncols)])
    return IntMatrix.from_columns(cols, m.ncols)


def image_basis(m: IntMatrix) -> IntMatrix:
    """Columns form a Z-basis of the saturation (Q-span of columns) cap Z^n."""
    res = snf(m)
    return res.u_inv.submatrix(None, range(res.rank))


def solve_integer(b: IntMatrix, c: IntMatrix) -> IntMatrix:
    """The unique integer X with b X = c, for b of full column rank."""
    res = snf(b)
    r = res.rank
    if r != b.ncols:
        raise ValueError("solve_integer needs a matrix of full column rank")
    uc = res.u @ c
    rows = []
    for i in range(uc.nrows):
        if i < r:
            d = res.s[i, i]
            row = uc.row(i)
            if any(x % d for x in row):
                raise ValueError("system has no integer solution")
            rows.append([x // d for x in row])
        elif any(uc.row(i)):
            raise ValueError("system is inconsistent")
    y = IntMatrix(rows, c.ncols)
    return res.v @ y


@dataclass(frozen=True)
class QuotientPresentation:
    """Z^k / image(relations) in explicit coordinates.

    ``projection`` (free_rank x k) sends an ambient vector to its free
    quotient coordinates; ``basis_lift`` (k x free_rank) lifts them back.
    """

    free_rank: int
    torsion: tuple[int, ...]
    basis_lift: IntMatrix
    projection: IntMatrix
    relations: IntMatrix
    snf: SNFResult

    @property
    def ambient_rank(self) -> int:
        return self.relations.nrows

    def contains(self, vectors: IntMatrix) -> bool:
        """Whether every column of ``vectors`` lies in image(relations)."""
        uc = self.snf.u @ vectors
        diag = self.snf.diagonal
        for i in range(uc.nrows):
            d = diag[i] if i < len(diag) else 0
            for x in uc.row(i):
                if (d == 0 and x) or (d and x % d):
                    return False
        return True


def cokernel(d: IntMatrix) -> QuotientPresentation:
    res = snf(d)
    r = res.rank
    k = d.nrows
    torsion = tuple(x for x in res.invariant_factors if x > 1)
    lift = res.u_inv.submatrix(None, range(r, k))
    proj = res.u.submatrix(range(r, k), None)
    return QuotientPresentation(k - r, torsion, lift, proj, d, res)


def free_presentation(n: int) -> QuotientPresentation:
    """Z^n presented with no relations."""
    return cokernel(IntMatrix.zeros(n, 0))


def induced_quotient_map(a: IntMatrix, source_pres: QuotientPresentation,
                         target_pres: QuotientPresentation) -> IntMatrix:
    """Matrix of the map target quotient -> source quotient induced by ``a``.

    ``a`` has one row per source ambient coordinate and one column per
    target ambient coordinate.  Only the free parts are represented.
    """
    if a.shape != (source_pres.ambient_rank, target_pres.ambient_rank):
        raise ValueError(f"map shape {a.shape} does not match the presentations")
    if not source_pres.contains(a @ target_pres.relations):
        raise ValueError("map does not send relations into relations (not a chain map)")
    return source_pres.projection @ a @ target_pres.basis_lift
