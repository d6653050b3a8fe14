"""Cohomology of mixed substitution tiling spaces as direct limits over a tower of complexes."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import sympy

from .analysis import is_self_correcting
from .apcomplex import build_tower, coboundary_matrix
from .words import SequenceSpec, SubstitutionFamily
from .zmatrix import (IntMatrix, QuotientPresentation, cokernel, det,
                      free_presentation, image_basis, induced_quotient_map, kernel_basis,
                      rank, rank_mod_p, solve_integer)

FORMS = ("free", "localized", "formal")


@dataclass(frozen=True)
class Certificate:
    quotient_dim: int
    period_map: IntMatrix
    restriction: IntMatrix | None


@dataclass(frozen=True)
class GroupDescriptor:
    """Isomorphism data of a direct limit of free abelian groups.

    ``summands`` lists ``(d, multiplicity)`` with ``d = 1`` meaning a copy
    of Z and ``d > 1`` a copy of Z[1/d]; it is empty for formal results.
    """

    rank: int
    divisibility: tuple[tuple[int, int], ...]
    form: str
    summands: tuple[tuple[int, int], ...] = ()
    torsion: tuple[int, ...] = ()
    certificate: Certificate | None = field(default=None, compare=False)
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValueError(f"bad form {self.form!r}")
        if self.form == "free" and self.divisibility:
            raise ValueError("a free group has no divisibility")
        if self.form != "formal" and sum(m for _, m in self.summands) != self.rank:
            raise ValueError("summand multiplicities must add up to the rank")

    @classmethod
    def free(cls, r: int, **kw) -> "GroupDescriptor":
        return cls(r, (), "free", ((1, r),) if r else (), **kw)

    def with_warnings(self, warnings) -> "GroupDescriptor":
        return GroupDescriptor(self.rank, self.divisibility, self.form, self.summands,
                               self.torsion, self.certificate, tuple(warnings))

    def __str__(self) -> str:
        if self.form == "formal":
            div = ", ".join(f"({p},{d})" for p, d in self.divisibility)
            extra = f", torsion={list(self.torsion)}" if self.torsion else ""
            return f"formal{{rank={self.rank}, div={{{div}}}{extra}}}"
        if self.rank == 0:
            return "0"
        parts = []
        for d, m in self.summands:
            base = "Z" if d == 1 else f"Z[1/{d}]"
            parts.append(base if m == 1 else f"{base}^{m}")
        return " (+) ".join(parts)


def _primes(n: int) -> list[int]:
    return sorted(sympy.factorint(abs(n))) if abs(n) > 1 else []


def _poly_at(coeffs: list[int], m: IntMatrix) -> IntMatrix:
    """Horner evaluation of an integer polynomial (leading coefficient first)."""
    acc = IntMatrix.zeros(m.nrows, m.ncols)
    one = IntMatrix.identity(m.nrows)
    for c in coeffs:
        acc = acc @ m + one * int(c)
    return acc


def _nilpotent_mod_p(m: IntMatrix, p: int, bound: int) -> bool:
    power = IntMatrix.identity(m.nrows)
    for _ in range(bound):
        power = IntMatrix([[x % p for x in row] for row in (power @ m).tolist()], m.ncols)
        if power.is_zero():
            return True
    return False


def eventual_image(m: IntMatrix) -> IntMatrix:
    """Saturated basis of the Q-span of the columns of m^k for large k.

    Iterates B <- sat(m B) until the rank stops dropping, which avoids the
    huge entries of m^n.
    """
    basis = IntMatrix.identity(m.nrows)
    while True:
        nxt = image_basis(m @ basis)
        if nxt.ncols == basis.ncols:
            return nxt
        basis = nxt


def direct_limit(period_map: IntMatrix, ambient: QuotientPresentation | None = None) -> GroupDescriptor:
    """Limit of Z^n --M--> Z^n --M--> ... with a certified closed form where possible.

    After restricting to the saturated eventual image, the characteristic
    polynomial splits as g * f with every irreducible factor of g having
    unit constant term.  The kernel of f(M') is a saturated invariant
    sublattice carrying all of det(M'); the quotient is unimodular, hence
    contributes a free summand, and the extension splits because that
    quotient is free.  The sublattice part is Z[1/d]^a exactly when some
    power of the restriction vanishes mod every p | d.
    """
    m = period_map
    if not m.is_square:
        raise ValueError(f"period map must be square, got {m.shape}")
    n = m.nrows
    torsion = ambient.torsion if ambient is not None else ()
    if ambient is not None and ambient.free_rank != n:
        raise ValueError("period map does not act on the ambient free part")
    if n == 0:
        cert = Certificate(0, m, None)
        if torsion:
            return GroupDescriptor(0, (), "formal", (), torsion, cert)
        return GroupDescriptor.free(0, certificate=cert)
    lattice = eventual_image(m)
    r = lattice.ncols
    if r == 0:
        return GroupDescriptor(0, (), "formal" if torsion else "free", (), torsion,
                               Certificate(n, m, None))
    mr = solve_integer(lattice, m @ lattice)
    cert = Certificate(n, m, mr)
    d = det(mr)
    primes = _primes(d)
    power = mr ** r
    div = tuple((p, r - rank_mod_p(power, p)) for p in primes)
    if torsion:
        return GroupDescriptor(r, div, "formal", (), torsion, cert)
    if not primes:
        return GroupDescriptor.free(r, certificate=cert)

    x = sympy.Symbol("x")
    chi = sympy.Matrix(mr.tolist()).charpoly(x).as_expr()
    _, factors = sympy.factor_list(chi, x)
    f = sympy.Integer(1)
    for fac, mult in factors:
        if abs(sympy.Poly(fac, x).eval(0)) != 1:
            f *= fac ** mult
    fpoly = sympy.Poly(f, x)
    sub = kernel_basis(_poly_at([int(c) for c in fpoly.all_coeffs()], mr))
    a = sub.ncols
    m1 = solve_integer(sub, mr @ sub)
    d1 = det(m1)
    ok = _primes(d1) == primes and all(
        _nilpotent_mod_p(m1, p, 4 * a * sympy.multiplicity(p, d1)) for p in primes)
    if ok and all(dp == a for _, dp in div):
        dd = reduce(lambda u, v: u * v, primes, 1)
        summands = ((dd, a),) + (((1, r - a),) if r > a else ())
        return GroupDescriptor(r, div, "localized", summands, (), cert)
    return GroupDescriptor(r, div, "formal", (), (), cert)


# ----------------------------------------------------------------------------
# Towers of groups

@dataclass(frozen=True)
class LimitSystem:
    """Groups per tower position and maps ``maps[i]: G_i -> G_{next(i)}``."""

    presentations: tuple[QuotientPresentation, ...]
    maps: tuple[IntMatrix, ...]
    cycle_start: int
    period: int

    def period_composite(self) -> IntMatrix:
        c = self.cycle_start
        out = IntMatrix.identity(self.presentations[c].free_rank)
        for i in range(c, c + self.period):
            out = self.maps[i] @ out
        return out

    def limit(self) -> GroupDescriptor:
        c = self.cycle_start
        cyc = self.presentations[c:c + self.period]
        torsion = tuple(sorted(t for p in cyc for t in p.torsion))
        g = direct_limit(self.period_composite(), self.presentations[c])
        if torsion and not g.torsion:
            g = GroupDescriptor(g.rank, g.divisibility, "formal", (), torsion, g.certificate)
        return g


def default_flavor(family: SubstitutionFamily) -> str:
    return "ap" if len(family) == 1 else "ap_left_modified"


def h1_system(family: SubstitutionFamily, spec: SequenceSpec, flavor: str) -> LimitSystem:
    tower = build_tower(family, spec, flavor)
    pres = tuple(cokernel(coboundary_matrix(c)) for c in tower.complexes)
    maps = tuple(induced_quotient_map(b.a1, pres[spec.next_position(i)], pres[i])
                 for i, b in enumerate(tower.maps))
    return LimitSystem(pres, maps, spec.cycle_start, len(spec.period))


def h0_system(family: SubstitutionFamily, spec: SequenceSpec, flavor: str) -> LimitSystem:
    tower = build_tower(family, spec, flavor)
    kernels = [kernel_basis(coboundary_matrix(c)) for c in tower.complexes]
    maps = tuple(solve_integer(kernels[spec.next_position(i)], b.a0 @ kernels[i])
                 for i, b in enumerate(tower.maps))
    pres = tuple(free_presentation(k.ncols) for k in kernels)
    return LimitSystem(pres, maps, spec.cycle_start, len(spec.period))


def flavor_warnings(family: SubstitutionFamily, spec: SequenceSpec, flavor: str) -> tuple[str, ...]:
    if flavor not in ("ap_full", "ap_left"):
        return ()
    verdict = is_self_correcting(family.subfamily(sorted(set(spec.period))))
    if verdict.verdict == "yes":
        return ()
    return (f"flavor {flavor} is only reliable for self-correcting systems; "
            f"self-correction check: {verdict}",)


def h0(family: SubstitutionFamily, spec: SequenceSpec, flavor: str | None = None) -> GroupDescriptor:
    flavor = flavor or default_flavor(family)
    return h0_system(family, spec, flavor).limit()


def h1(family: SubstitutionFamily, spec: SequenceSpec, flavor: str | None = None) -> GroupDescriptor:
    flavor = flavor or default_flavor(family)
    g = h1_system(family, spec, flavor).limit()
    return g.with_warnings(flavor_warnings(family, spec, flavor))


@dataclass(frozen=True)
class RankBoundReport:
    rank: int
    bound: int
    ok: bool

    @property
    def tight(self) -> bool:
        return self.rank == self.bound


def rank_bound_report(family: SubstitutionFamily, spec: SequenceSpec,
                      flavor: str | None = None) -> RankBoundReport:
    n = len(family.alphabet)
    r = h1(family, spec, flavor).rank
    bound = n * n - n + 1
    return RankBoundReport(r, bound, r <= bound)


def coboundary_image_rank(c) -> int:
    return rank(coboundary_matrix(c))
