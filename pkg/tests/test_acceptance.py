"""Acceptance criteria, one test per criterion; results are echoed in the terminal summary."""

import random
import time
from itertools import permutations
from pathlib import Path

import sympy
from hypothesis import given, settings, strategies as st

from conftest import ACCEPTANCE_RESULTS, LONG_FAMILY_TEXT, mixed_systems, system
from oracles import brute_legal_words, determinantal_invariants, quotient_rank_and_det
from tilecoh import (Alphabet, GroupDescriptor, IntMatrix, SequenceSpec, Substitution,
                     SubstitutionFamily, SystemAtPosition, bonding_maps, build_complex,
                     coboundary_matrix, compose, h0, h1, is_family_primitive, is_primitive,
                     is_self_correcting, legal_words, max_rank_substitution, parse_system, snf)
from tilecoh.apcomplex import FLAVORS, build_tower
from tilecoh.cohomology import h1_system, rank_bound_report
from tilecoh.zmatrix import det, eventual_rank, rank

SYSTEMS = Path(__file__).resolve().parent.parent / "systems"


def record(k, title, ok, detail=""):
    ACCEPTANCE_RESULTS[k] = (title, bool(ok), detail)
    assert ok, f"criterion {k} failed: {detail}"


def oracle_period_h1(family, spec, flavor):
    tower = build_tower(family, spec, flavor)
    c = spec.cycle_start
    comp = sympy.eye(tower.complexes[c].n_edges)
    for i in range(c, c + len(spec.period)):
        comp = sympy.Matrix(tower.maps[i].a1.tolist()) * comp
    return quotient_rank_and_det(comp.tolist(), coboundary_matrix(tower.complexes[c]).tolist())


# ---------------------------------------------------------------- 1. golden matrices

REF_DELTA = [[-1, 1, 0, 0, 0, 0], [0, -1, 1, 0, 0, 0], [0, 0, -1, 0, 1, 0], [1, 0, 0, -1, 0, 0],
             [0, 0, 1, -1, 0, 0], [0, 0, 0, 1, 0, -1], [0, 0, 0, 0, -1, 1]]
REF_A0 = [[0, 0, 0, 0, 1, 0]] * 6
REF_A1 = [[1, 1, 1, 1, 0, 1, 1], [1, 1, 1, 1, 0, 1, 1], [0, 0, 1, 0, 1, 1, 1],
          [1, 1, 1, 1, 0, 1, 1], [1, 1, 1, 1, 0, 1, 1], [0, 0, 1, 0, 1, 1, 1],
          [0, 0, 1, 0, 1, 1, 1]]


def matching_permutations(delta, a0, a1):
    """All (edge, vertex) permutation pairs carrying the computed matrices onto the reference ones."""
    hits = []
    for tau in permutations(range(6)):
        cols = [[row[tau[j]] for j in range(6)] for row in delta]
        # edge order forced by the rows of delta, which are distinct
        try:
            sigma = [cols.index(r) for r in REF_DELTA]
        except ValueError:
            continue
        if len(set(sigma)) != 7:
            continue
        if all(a0[tau[i]][tau[j]] == REF_A0[i][j] for i in range(6) for j in range(6)) and \
           all(a1[sigma[i]][sigma[j]] == REF_A1[i][j] for i in range(7) for j in range(7)):
            hits.append((tuple(sigma), tau))
    return hits


def test_criterion_1_golden_matrices(bbaaab):
    pos = SystemAtPosition(*bbaaab, 0, "ap")
    c = build_complex(pos)
    delta = coboundary_matrix(c)
    b = bonding_maps(pos, pos)
    hits = matching_permutations(delta.tolist(), b.a0.tolist(), b.a1.tolist())
    nonzero_cols = [j for j in range(6) if any(b.a0.col(j))]
    one_column = len(nonzero_cols) == 1 and set(b.a0.col(nonzero_cols[0])) == {1}
    shapes = (delta.shape, b.a0.shape, b.a1.shape) == ((7, 6), (6, 6), (7, 7))
    identity = (tuple(range(7)), tuple(range(6))) in hits
    record(1, "golden matrices (ap, a->bbaaab b->bbab)", hits and one_column and shapes,
           f"{len(hits)} matching permutation pair(s), identity order {'matches' if identity else 'differs'}, "
           f"A0 single all-ones column {one_column}")


# ---------------------------------------------------------------- 2. cohomology goldens

def test_criterion_2_cohomology_goldens(bbaaab, aba):
    got = {
        "bbaaab H0": str(h0(*bbaaab, "ap")),
        "bbaaab H1": str(h1(*bbaaab, "ap")),
        "aba H0": str(h0(*aba, "ap")),
        "aba H1": str(h1(*aba, "ap")),
    }
    full = h1(*aba, "ap_full")
    got["aba H1 ap_full"] = str(full)
    want = {"bbaaab H0": "Z", "bbaaab H1": "Z[1/6]^2", "aba H0": "Z", "aba H1": "Z[1/5]^2",
            "aba H1 ap_full": "Z[1/5]^2 (+) Z"}
    warned = any("self-correct" in w for w in full.warnings)
    # exact rational oracle on the same towers
    r1, d1 = oracle_period_h1(*bbaaab, "ap")
    r2, d2 = oracle_period_h1(*aba, "ap")
    r3, d3 = oracle_period_h1(*aba, "ap_full")
    oracle_ok = (r1, set(sympy.factorint(abs(d1)))) == (2, {2, 3}) and (r2, abs(d2)) == (2, 5) \
        and r3 == 3 and set(sympy.factorint(abs(d3))) == {5}
    record(2, "cohomology goldens", got == want and warned and oracle_ok,
           "; ".join(f"{k} = {v}" for k, v in got.items()) + f"; warning emitted {warned}")


# ---------------------------------------------------------------- 3. left-collared goldens

REF_LEFT_A1 = [
    [0, 1, 0, 1, 0, 0, 0, 0, 0], [0, 0, 0, 0, 1, 1, 0, 0, 0], [0, 0, 0, 0, 0, 1, 1, 0, 0],
    [0, 1, 0, 0, 0, 0, 1, 0, 0], [0, 0, 0, 0, 0, 1, 0, 1, 0], [0, 0, 0, 0, 0, 0, 1, 0, 1],
    [1, 1, 0, 0, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 1, 0, 0, 0], [0, 0, 1, 0, 0, 0, 1, 0, 0]]
REF_LEFT_A2 = [
    [0, 0, 0, 0, 2, 0, 0, 0, 0], [0, 0, 0, 0, 0, 1, 0, 0, 1], [0, 0, 1, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 0, 0, 1, 0], [0, 0, 0, 0, 0, 0, 0, 0, 2], [0, 0, 1, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 1, 0, 0, 1, 0], [0, 0, 0, 0, 0, 0, 0, 0, 2], [0, 0, 1, 0, 0, 0, 1, 0, 0]]
REF_REDUCED_1 = [
    [0, 1, 0, 0, 0, 0, 0], [0, 0, 1, 1, 1, 0, 0], [0, 0, 0, 1, 0, 1, 0], [0, 0, 1, 0, 0, 0, 1],
    [1, 0, 0, 1, 1, 0, 0], [0, 0, -1, 1, 1, 0, 0], [0, 0, 0, 0, 1, 0, 0]]
REF_REDUCED_2 = [
    [0, 0, 2, 0, 0, 0, 0], [0, 0, 1, 1, 0, 1, 1], [0, 0, 0, 0, 0, 0, 2], [0, -1, 0, 1, 1, 0, 1],
    [0, 1, 1, 0, 0, 1, 0], [0, 1, 0, -1, 0, 0, 1], [0, 0, 0, 0, 1, 0, 0]]


def test_criterion_3_left_collared(long_family):
    spec = SequenceSpec.constant()
    a1s, reduced = [], []
    for sub in long_family:
        fam = SubstitutionFamily.of(sub)
        pos = SystemAtPosition(fam, spec, 0, "ap_left")
        c = build_complex(pos)
        assert [c.edge_name(i) for i in range(9)] == sorted(a + b for a in "abc" for b in "abc")
        a1s.append(bonding_maps(pos, pos).a1.tolist())
        reduced.append(h1_system(fam, spec, "ap_left").maps[0])
    a1_ok = a1s == [REF_LEFT_A1, REF_LEFT_A2]
    ranks = [rank(m) for m in reduced]
    ev = eventual_rank(reduced[1])
    # the reduced matrices live in another basis; compare similarity invariants
    x = sympy.Symbol("x")
    charpolys_ok = all(
        sympy.Matrix(m.tolist()).charpoly(x) == sympy.Matrix(ref).charpoly(x)
        for m, ref in zip(reduced, (REF_REDUCED_1, REF_REDUCED_2)))
    ref_ranks = [sympy.Matrix(r).rank() for r in (REF_REDUCED_1, REF_REDUCED_2)]
    record(3, "left-collared goldens (long example)",
           a1_ok and ranks == [7, 5] == ref_ranks and ev == 3 and charpolys_ok,
           f"A1 match {a1_ok}, reduced ranks {ranks}, eventual rank of second {ev}, "
           f"characteristic polynomials match {charpolys_ok}")


# ---------------------------------------------------------------- 4. rank trichotomy

def test_criterion_4_rank_trichotomy(long_family):
    want = {"| phi1": 7, "| phi2 phi1": 5, "| phi2 phi1 phi1 phi1": 3}
    got, oracle = {}, {}
    for seq in want:
        spec = SequenceSpec.parse(seq, long_family)
        got[seq] = h1(long_family, spec, "ap_left_modified").rank
        oracle[seq] = oracle_period_h1(long_family, spec, "ap_left_modified")[0]
    record(4, "mixed-rank trichotomy", got == want == oracle,
           ", ".join(f"{k.strip('| ')}: {v}" for k, v in got.items()))


# ---------------------------------------------------------------- 5. decision goldens

def test_criterion_5_decisions(long_family, aba):
    nonprim, _ = parse_system((SYSTEMS / "nonprimitive.sub").read_text())
    comp, _ = parse_system((SYSTEMS / "composition.sub").read_text())
    checks = {
        "members primitive": all(is_primitive(s).verdict == "yes" for s in nonprim),
        "family not primitive": is_family_primitive(nonprim).verdict == "no",
        "composite not primitive": is_primitive(compose(nonprim[1], nonprim[0])).verdict == "no",
    }
    fp = is_family_primitive(long_family)
    sc = is_self_correcting(long_family)
    checks["long family primitive n=4"] = (fp.verdict, fp.witness) == ("yes", 4)
    checks["long family self-correcting n=5"] = (sc.verdict, sc.witness) == ("yes", 5)
    d = is_self_correcting(aba[0])
    checks["aba not self-correcting (aa)"] = (d.verdict, d.certificate) == ("no", "aa")
    checks["composition members self-correcting"] = all(
        is_self_correcting(SubstitutionFamily.of(s)).verdict == "yes" for s in comp)
    checks["composites not self-correcting"] = all(
        is_self_correcting(SubstitutionFamily.of(c)).verdict == "no"
        for c in (compose(comp[0], comp[1]), compose(comp[1], comp[0])))
    failed = [k for k, v in checks.items() if not v]
    record(5, "decision goldens", not failed,
           f"{len(checks)} checks" + (f", failed: {failed}" if failed else ", all hold"))


# ---------------------------------------------------------------- 6. rank bound

def regression_systems():
    out = []
    for path in sorted(SYSTEMS.glob("*.sub")):
        fam, spec = parse_system(path.read_text())
        out.append((path.stem, fam, spec or SequenceSpec.constant()))
    long_fam = system(LONG_FAMILY_TEXT)[0]
    for seq in ("| phi1", "| phi2", "| phi2 phi1"):
        out.append((f"long {seq}", long_fam, SequenceSpec.parse(seq, long_fam)))
    return out


def full_left_delta_rank(n):
    """Oracle: incidence matrix of the complete left-collared graph, ranked by sympy."""
    rows = []
    for x in range(n):
        for y in range(n):
            r = [0] * n
            r[y] += 1
            r[x] -= 1
            rows.append(r)
    return sympy.Matrix(rows).rank()


def test_criterion_6_rank_bound():
    tight = {}
    for n in range(2, 6):
        fam = SubstitutionFamily.of(max_rank_substitution(n))
        spec = SequenceSpec.constant()
        tight[n] = (h1(fam, spec, "ap_left_modified").rank,
                    oracle_period_h1(fam, spec, "ap_left_modified")[0])
    tight_ok = all(r == o == n * n - n + 1 for n, (r, o) in tight.items())
    bounds_ok = all(rank_bound_report(f, s).ok for _, f, s in regression_systems())
    cob = {}
    for n in range(2, 7):
        alpha = Alphabet(tuple(f"x{i}" for i in range(n)))
        # a substitution whose images contain every two-letter word
        word = tuple(i for x in range(n) for y in range(n) for i in (x, y))
        sub = Substitution(alpha, tuple(word for _ in range(n)))
        c = build_complex(SystemAtPosition(SubstitutionFamily.of(sub), SequenceSpec.constant(), 0, "ap_left"))
        assert c.n_edges == n * n
        cob[n] = (rank(coboundary_matrix(c)), full_left_delta_rank(n))
    cob_ok = all(r == o == n - 1 for n, (r, o) in cob.items())
    record(6, "rank bound and tightness", tight_ok and bounds_ok and cob_ok,
           f"max ranks {[tight[n][0] for n in sorted(tight)]}, "
           f"{len(regression_systems())} regression systems within bound {bounds_ok}, "
           f"full left coboundary ranks {[cob[n][0] for n in sorted(cob)]}")


# ---------------------------------------------------------------- 7. flavor independence

def random_primitive(rng):
    while True:
        m = rng.randint(2, 3)
        images = tuple(tuple(rng.randrange(m) for _ in range(rng.randint(2, 4))) for _ in range(m))
        sub = Substitution(Alphabet(tuple("abc"[:m])), images)
        if is_primitive(sub).verdict == "yes":
            return sub


def test_criterion_7_flavor_independence():
    rng = random.Random(20240611)
    n_cases, n_sc, bad = 30, 0, []
    for _ in range(n_cases):
        sub = random_primitive(rng)
        fam, spec = SubstitutionFamily.of(sub), SequenceSpec.constant()
        g = h1(fam, spec, "ap")
        if g != h1(fam, spec, "ap_left_modified"):
            bad.append(str(sub))
        if is_self_correcting(fam).verdict == "yes":
            n_sc += 1
            if not (h1(fam, spec, "ap_full") == h1(fam, spec, "ap_left") == g):
                bad.append(f"{sub} (self-correcting)")
    record(7, "flavor independence", not bad,
           f"{n_cases} random primitive substitutions, {n_sc} self-correcting, "
           f"{len(bad)} disagreement(s)" + (f": {bad}" if bad else ""))


# ---------------------------------------------------------------- 8. structural properties

CASES: dict[str, int] = {}


def tick(name):
    CASES[name] = CASES.get(name, 0) + 1


@settings(max_examples=80, deadline=None)
@given(mixed_systems(), st.sampled_from(FLAVORS))
def test_criterion_8a_chain_map_and_row_sums(sys_, flavor):
    family, spec = sys_
    tower = build_tower(family, spec, flavor)
    for i, (c, b) in enumerate(zip(tower.complexes, tower.maps)):
        d = coboundary_matrix(c)
        src = tower.complexes[spec.next_position(i)]
        assert coboundary_matrix(src) @ b.a0 == b.a1 @ d
        assert all(sum(r) == 0 for r in d.tolist())
        sub = family[spec.at(i)]
        assert [sum(r) for r in b.a1.tolist()] == [len(sub.images[w[1]]) for w in src.edges]
    tick("chain map, A1 row sums, delta row sums")


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 5).flatmap(lambda r: st.integers(0, 5).flatmap(
    lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)
    .map(lambda rows: IntMatrix(rows, c)))))
def test_criterion_8b_snf_reconstruction(m):
    res = snf(m)
    assert res.u @ m @ res.v == res.s
    if m.nrows:
        assert abs(det(res.u)) == 1
    if m.ncols:
        assert abs(det(res.v)) == 1
    if 0 not in m.shape and max(m.shape) <= 3:
        assert list(res.invariant_factors) == determinantal_invariants(m.tolist())
    tick("SNF reconstruction")


@settings(max_examples=40, deadline=None)
@given(mixed_systems(max_letters=2, max_len=3))
def test_criterion_8c_subword_closure(sys_):
    family, spec = sys_
    for k in (2, 3):
        big = legal_words(family, spec, 0, k)
        small = set(legal_words(family, spec, 0, k - 1))
        assert all(w[:-1] in small and w[1:] in small for w in big)
        assert big == brute_legal_words(family, spec, 0, k)
    tick("subword closure")


FIB_FAMILY = parse_system((SYSTEMS / "fibonacci.sub").read_text())[0]


def hand_fibonacci_h1(spec):
    """Oracle: minor-gcd invariants of delta plus the rational quotient of the period composite."""
    tower = build_tower(FIB_FAMILY, spec, "ap")
    c = tower.complexes[spec.cycle_start]
    delta = coboundary_matrix(c).tolist()
    inv = determinantal_invariants(delta)
    torsion_free = all(x == 1 for x in inv if x)
    r, d = oracle_period_h1(FIB_FAMILY, spec, "ap")
    return torsion_free, r, d


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 1), max_size=3), st.lists(st.integers(0, 1), min_size=1, max_size=4))
def test_criterion_8d_fibonacci_mixing(pre, per):
    spec = SequenceSpec(tuple(per), tuple(pre))
    for flavor in ("ap", "ap_left_modified"):
        assert h1(FIB_FAMILY, spec, flavor) == GroupDescriptor.free(2)
    torsion_free, r, d = hand_fibonacci_h1(spec)
    assert torsion_free and r == 2 and abs(d) == 1
    tick("Fibonacci mixing invariance")


def test_criterion_8_summary():
    total = sum(CASES.values())
    expected = {"chain map, A1 row sums, delta row sums", "SNF reconstruction", "subword closure",
                "Fibonacci mixing invariance"}
    record(8, "structural property suite", total >= 200 and set(CASES) == expected,
           f"{total} hypothesis cases: " + ", ".join(f"{k} {v}" for k, v in sorted(CASES.items())))


def test_runtime_budget():
    start = time.perf_counter()
    fam = system(LONG_FAMILY_TEXT)[0]
    for seq in ("| phi1", "| phi2 phi1", "| phi2 phi1 phi1 phi1"):
        h1(fam, SequenceSpec.parse(seq, fam), "ap_left_modified")
    assert time.perf_counter() - start < 20
