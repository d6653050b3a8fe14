"""Command-line front end: ``tilecoh {analyze,cohomology,matrices,complex,check} FILE``."""

from __future__ import annotations

import argparse
import re
import sys
from typing import TextIO

from . import analysis
from .apcomplex import (FLAVORS, ComplexError, SystemAtPosition, build_complex, build_tower,
                        coboundary_matrix, export_complex)
from .cohomology import default_flavor, h0, h1, rank_bound_report
from .words import (ParseError, SequenceSpec, SubstitutionFamily, common_left_pf, parse_system,
                    pf_data)
from .zmatrix import IntMatrix

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tilecoh", description="Cohomology of mixed substitution tiling spaces.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, flavor=True):
        sp.add_argument("file", help="system description")
        sp.add_argument("--sequence", help="override the mixing sequence, e.g. '| phi2 phi1'")
        if flavor:
            sp.add_argument("--flavor", choices=FLAVORS, help="complex flavor (default depends on the family)")

    sp = sub.add_parser("analyze", help="full report")
    common(sp, flavor=False)
    sp.add_argument("--matrices", action="store_true", help="include the cell matrices")
    common(sub.add_parser("cohomology", help="H0 and H1"))
    common(sub.add_parser("matrices", help="coboundary and bonding matrices"))
    sp = sub.add_parser("complex", help="export a complex")
    common(sp)
    sp.add_argument("--emit", choices=("dot", "json"), required=True)
    sp.add_argument("--position", type=int, default=0)
    sp = sub.add_parser("check", help="a single decision procedure")
    common(sp, flavor=False)
    sp.add_argument("--what", choices=("primitivity", "self-correcting"), required=True)
    sp.add_argument("--cap", type=int, default=12)
    return p


def _load(args) -> tuple[SubstitutionFamily, SequenceSpec | None]:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {args.file}: {exc.strerror or exc}") from None
    try:
        family, spec = parse_system(text)
        if args.sequence is not None:
            spec = SequenceSpec.parse(args.sequence, family)
    except (ParseError, ValueError) as exc:
        raise InputError(f"{args.file}: {exc}") from None
    return family, spec


def _need_spec(spec: SequenceSpec | None) -> SequenceSpec:
    if spec is None:
        raise InputError("the family has several members; give a 'sequence:' line or --sequence")
    return spec


def _flavor(args, family) -> str:
    return getattr(args, "flavor", None) or default_flavor(family)


# ----------------------------------------------------------------------------
# Subcommands

def _cmd_cohomology(args, out: TextIO) -> None:
    family, spec = _load(args)
    spec = _need_spec(spec)
    flavor = _flavor(args, family)
    g0 = h0(family, spec, flavor)
    g1 = h1(family, spec, flavor)
    out.write(f"H0 = {g0}\nH1 = {g1}\n")
    for w in g1.warnings:
        out.write(f"warning: {w}\n")


def format_matrices(family: SubstitutionFamily, spec: SequenceSpec, flavor: str) -> str:
    """Named matrix blocks; ``A0[i]``/``A1[i]`` map position next(i) onto position i."""
    tower = build_tower(family, spec, flavor)
    parts = [f"# flavor {flavor}, sequence {spec.format(family)}"]
    for i, c in enumerate(tower.complexes):
        nxt = spec.next_position(i)
        parts.append(f"# position {i}: {c.n_edges} edges, {c.n_vertices} vertices")
        parts.append("# edges: " + " ".join(c.edge_name(e) for e in range(c.n_edges)))
        parts.append("# vertices: " + " ".join(c.vertices))
        parts.append(f"delta1[{i}] =\n{coboundary_matrix(c).format()}")
        name = family[spec.at(i)].name
        parts.append(f"# bonding maps position {nxt} -> position {i} via {name}")
        parts.append(f"A0[{i}] =\n{tower.maps[i].a0.format()}")
        parts.append(f"A1[{i}] =\n{tower.maps[i].a1.format()}")
    return "\n".join(parts) + "\n"


_BLOCK = re.compile(r"^(\w+\[\d+\]) =$")


def parse_matrices(text: str) -> dict[str, IntMatrix]:
    """Inverse of :func:`format_matrices` for the matrix blocks."""
    blocks: dict[str, list[str]] = {}
    current = None
    for line in text.splitlines():
        m = _BLOCK.match(line.strip())
        if m:
            current = m.group(1)
            blocks[current] = []
        elif line.startswith("#") or not line.strip():
            current = None
        elif current is not None:
            blocks[current].append(line)
    return {k: IntMatrix.parse("\n".join(v)) for k, v in blocks.items()}


def _cmd_matrices(args, out: TextIO) -> None:
    family, spec = _load(args)
    out.write(format_matrices(family, _need_spec(spec), _flavor(args, family)))


def _cmd_complex(args, out: TextIO) -> None:
    family, spec = _load(args)
    spec = _need_spec(spec)
    if args.position < 0:
        raise InputError("position must be non-negative")
    c = build_complex(SystemAtPosition(family, spec, args.position, _flavor(args, family)))
    out.write(export_complex(c, args.emit))


def _cmd_check(args, out: TextIO) -> None:
    family, spec = _load(args)
    if args.cap < 1:
        raise InputError("--cap must be at least 1")
    if args.what == "self-correcting":
        out.write(f"{analysis.is_self_correcting(family, args.cap)}\n")
        return
    if len(family) == 1:
        out.write(f"{analysis.is_primitive(family[0])}\n")
        return
    out.write(f"{analysis.is_family_primitive(family, args.cap)}\n")
    if spec is not None:
        out.write(f"sequence: {analysis.is_pair_primitive(family, spec, args.cap)}\n")


def analysis_report(family: SubstitutionFamily, spec: SequenceSpec, matrices: bool = False) -> str:
    lines: list[str] = []
    warnings: list[str] = []
    add = lines.append
    add(f"alphabet: {' '.join(family.alphabet.letters)}")
    for s in family:
        add(f"substitution {s.name}: {s}")
    add(f"sequence: {spec.format(family)}")
    add("")
    add("[decisions]")
    for s in family:
        add(f"primitive {s.name}: {analysis.is_primitive(s)}")
    if len(family) > 1:
        add(f"family primitive: {analysis.is_family_primitive(family)}")
    pair = analysis.is_pair_primitive(family, spec)
    add(f"sequence primitive: {pair}")
    sc = analysis.is_self_correcting(family)
    add(f"self-correcting: {sc}")
    cyc = family.subfamily(sorted(set(spec.period)))
    if len(cyc) != len(family):
        add(f"self-correcting (period members): {analysis.is_self_correcting(cyc)}")
    add("aperiodicity / injectivity on the hull: unchecked")
    add("")
    add("[tile lengths]")
    for s in family:
        if analysis.is_primitive(s).verdict != "yes":
            add(f"{s.name}: not primitive, skipped")
            continue
        pf = pf_data(s)
        lens = " ".join(f"{x}={v:.6f}" for x, v in zip(family.alphabet.letters, pf.left_eigenvector))
        add(f"{s.name}: lambda={pf.eigenvalue:.9f} {lens}")
    if len(family) > 1 and all(analysis.is_primitive(s).verdict == "yes" for s in family):
        ce = common_left_pf(family)
        add(f"common left eigenvector: {'yes' if ce.exists else 'no'} "
            f"(worst residual {ce.worst_residual:.3e})")
        if not ce.exists:
            warnings.append("members share no common left PF eigenvector; tile lengths are not uniform")
    add("")
    add("[complexes at position 0]")
    for fl in FLAVORS:
        c = build_complex(SystemAtPosition(family, spec, 0, fl))
        add(f"{fl}: {c.n_edges} edges, {c.n_vertices} vertices")
    add("")
    add("[cohomology]")
    results = {}
    for fl in FLAVORS:
        g1 = h1(family, spec, fl)
        results[fl] = g1
        add(f"{fl}: H0 = {h0(family, spec, fl)}, H1 = {g1}")
        warnings.extend(g1.warnings)
    if results["ap_left"] != results["ap_left_modified"]:
        diff = results["ap_left"].rank - results["ap_left_modified"].rank
        add(f"ap_left exceeds ap_left_modified by rank {diff}")
    rb = rank_bound_report(family, spec, "ap_left_modified")
    add(f"rank bound: {rb.rank} <= {rb.bound} ({'ok' if rb.ok else 'VIOLATED'}"
        f"{', tight' if rb.tight else ''})")
    if matrices:
        add("")
        add("[matrices]")
        lines.extend(format_matrices(family, spec, default_flavor(family)).rstrip("\n").split("\n"))
    add("")
    add("[warnings]")
    lines.extend(warnings or ["none"])
    return "\n".join(lines) + "\n"


def _cmd_analyze(args, out: TextIO) -> None:
    family, spec = _load(args)
    out.write(analysis_report(family, _need_spec(spec), args.matrices))


_COMMANDS = {
    "analyze": _cmd_analyze,
    "cohomology": _cmd_cohomology,
    "matrices": _cmd_matrices,
    "complex": _cmd_complex,
    "check": _cmd_check,
}


def run(argv: list[str], out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = _build_parser().parse_args(argv)
        _COMMANDS[args.command](args, out)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (ComplexError, AssertionError) as exc:
        err.write(f"internal error: {exc}\n")
        return EXIT_INTERNAL
    return EXIT_OK


def main() -> None:
    sys.exit(run(sys.argv[1:]))
