"""Command-line entry point: ``synchrony-lab <subcommand> ...``.

Exit status: 0 on success, 1 when an analysis disagrees with embedded
expectations, 2 on bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import SCHEMA_VERSION
from .automorphism import conjugacy_group_patterns, detect_exotic, find_automorphisms
from .checks import run_all
from .dynamics import (SearchOptions, StepTooLarge, find_equilibria, integrate, table1_report)
from .fields import FieldError, parse_system
from .fixtures import PREFIX, graph_fixture, listing, system_fixture
from .graph_model import GraphError, load_graph
from .spectra import LaplacianError, NoConvergence, eigen_signature, validate_laplacian
from .synchrony import Partition, TooManyCells, enumerate_synchrony, is_balanced

INPUT_ERRORS = (GraphError, LaplacianError, FieldError, TooManyCells, OSError,
                json.JSONDecodeError, ValueError, KeyError)


class InputError(Exception):
    pass


# --------------------------------------------------------------------------
# helpers

def default_seed() -> int:
    raw = os.environ.get("SYNCHRONY_LAB_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"SYNCHRONY_LAB_SEED must be an integer, got {raw!r}")


def pi_multiple(v: float) -> str:
    return f"{v / math.pi:.4f}π"


def render_table(headers: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [[str(h) for h in headers]] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def load_graph_arg(ref: str):
    if ref.startswith(PREFIX):
        return graph_fixture(ref)
    return load_graph(ref)


def load_system_arg(ref: str):
    if ref.startswith(PREFIX):
        return system_fixture(ref)
    with open(ref) as fh:
        return parse_system(json.load(fh))


def parse_pattern(text: str, n: int) -> Partition:
    try:
        p = Partition.parse(text, n)
    except ValueError as exc:
        raise InputError(f"bad pattern {text!r}: {exc}")
    if p.n_cells != n:
        raise InputError(f"pattern {text!r} mentions cells outside 1..{n}")
    return p


def emit(args, command: str, result: dict, table: str) -> None:
    if args.format == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": command, "result": result}
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(table)


# --------------------------------------------------------------------------
# subcommands

def cmd_synchrony(args) -> int:
    g = load_graph_arg(args.graph)
    lattice = enumerate_synchrony(g, include_trivial=args.include_trivial)
    rows = [(i, p.n_classes, str(p)) for i, p in enumerate(lattice.patterns)]
    table = render_table(["#", "classes", "pattern"], rows)
    table += f"\n{len(lattice.patterns)} balanced patterns"
    emit(args, "synchrony", lattice.to_document(), table)
    return 0


def cmd_automorphisms(args) -> int:
    g = load_graph_arg(args.graph)
    group = find_automorphisms(g)
    result = {"order": group.order, "generators": [str(p) for p in group.generators]}
    if args.elements:
        result["elements"] = [str(p) for p in group.elements]
    table = f"|Aut| = {group.order}\ngenerators: {' '.join(result['generators']) or '()'}"
    if args.elements:
        table += "\n" + "\n".join(result["elements"])
    emit(args, "automorphisms", result, table)
    return 0


def _exotic_expectation(ref: str):
    """Known exotic counts for built-in graphs; None when nothing is embedded."""
    if not ref.startswith(PREFIX):
        return None
    key = ref[len(PREFIX):].lower()
    if key.startswith("ring") and key[4:].isdigit() and 3 <= int(key[4:]) <= 8:
        return lambda k, verdicts: k == 0
    if key.startswith("g") and key[1:].isdigit():
        n = int(key[1:])
        if 5 <= n <= 9:
            return lambda k, verdicts: k == 0
        if n == 10:
            return lambda k, verdicts: k >= 1
    if key == "fig1":
        target = Partition.parse("1,4|2,5|3,6", 6)
        return lambda k, verdicts: any(v.pattern == target and not v.symmetric for v in verdicts)
    return None


def cmd_exotic(args) -> int:
    g = load_graph_arg(args.graph)
    group = find_automorphisms(g)
    patterns = enumerate_synchrony(g).patterns
    if args.pattern:
        p = parse_pattern(args.pattern, g.n_cells)
        if not is_balanced(g, p):
            raise InputError(f"{p} is not balanced")
        patterns = [p]
    verdicts = [detect_exotic(g, p, group) for p in patterns]
    exotic = [v for v in verdicts if not v.symmetric]
    result = {
        "automorphism_order": group.order,
        "exotic_count": len(exotic),
        "patterns": [{"pattern": str(v.pattern), "verdict": v.label,
                      "witness": [str(w) for w in v.witness]} for v in verdicts],
    }
    table = render_table(["pattern", "verdict", "witness generators"],
                         [(str(v.pattern), v.label, " ".join(str(w) for w in v.witness) or "-")
                          for v in verdicts])
    table += f"\n|Aut| = {group.order}\n{len(exotic)} exotic patterns"
    expect = _exotic_expectation(args.graph) if not args.pattern else None
    if expect is not None:
        result["expectation_met"] = bool(expect(len(exotic), verdicts))
    emit(args, "exotic", result, table)
    return 1 if result.get("expectation_met") is False else 0


def cmd_bounds(args) -> int:
    with open(args.matrix) as fh:
        doc = json.load(fh)
    rows = doc["rows"]
    if "n" in doc and (doc["n"] != len(rows) or any(len(r) != doc["n"] for r in rows)):
        raise InputError(f"matrix is not {doc['n']}x{doc['n']}")
    L = validate_laplacian(rows, tol=args.tol)
    rep = eigen_signature(L, zero_tol=args.zero_tol, edge_tol=args.edge_tol)
    c = rep.counts
    table = "\n".join([
        f"signature (n+, n0, n-) = {rep.signature}",
        f"counts c(G) = {c.c_G}, c(G+) = {c.c_Gplus}, c(G-) = {c.c_Gminus}",
        f"{rep.bounds.n_plus[0]} <= n+ <= {rep.bounds.n_plus[1]}",
        f"{rep.bounds.n_zero[0]} <= n0 <= {rep.bounds.n_zero[1]}",
        f"{rep.bounds.n_minus[0]} <= n- <= {rep.bounds.n_minus[1]}",
        f"within bounds: {'yes' if rep.within_bounds else 'NO'}",
    ])
    if not rep.within_bounds:
        table += f"\neigenvalue nearest zero_tol ({rep.zero_tol:.3g}): {rep.nearest_to_tol:.6g}"
    emit(args, "bounds", rep.to_document(), table)
    return 0 if rep.within_bounds else 1


def _equilibrium_rows(records):
    return [(" ".join(pi_multiple(v) for v in r.point), str(r.pattern),
             f"({r.counts_triple[0]},{r.counts_triple[1]},{r.counts_triple[2]})",
             f"[{r.interval[0]},{r.interval[1]}]", r.n_plus, r.verdict,
             "yes" if r.family_hint else "no")
            for r in records]


def cmd_equilibria(args) -> int:
    sys_ = load_system_arg(args.system)
    g = sys_.graph
    opts = SearchOptions(grid=args.grid, box=args.box)
    if args.pattern:
        patterns = [parse_pattern(args.pattern, g.n_cells)]
        if not is_balanced(g, patterns[0]):
            raise InputError(f"{patterns[0]} is not balanced")
    else:
        lattice = enumerate_synchrony(g)
        patterns = [pc.representative for pc in conjugacy_group_patterns(g, lattice)
                    if not pc.representative.is_trivial]
    records, seen = [], set()
    for p in patterns:
        for r in find_equilibria(sys_, p, opts):
            key = tuple(np.round(r.point, 6))
            if key not in seen:
                seen.add(key)
                records.append(r)
    result = {"searched": [str(p) for p in patterns], "grid": args.grid, "box": args.box,
              "torus": sys_.torus_reducible,
              "equilibria": [r.to_document() for r in records]}
    table = render_table(["point", "finest pattern", "c(G+),c(G-),c(G)", "n+ bounds",
                          "n+", "verdict", "family"], _equilibrium_rows(records))
    table += f"\n{len(records)} equilibria"
    emit(args, "equilibria", result, table)
    return 0


def cmd_simulate(args) -> int:
    sys_ = load_system_arg(args.system)
    try:
        x0 = [float(v) for v in args.x0.split(",")]
    except ValueError:
        raise InputError(f"bad --x0 {args.x0!r}")
    if len(x0) != sys_.n:
        raise InputError(f"--x0 has {len(x0)} values, the system has {sys_.n} cells")
    try:
        traj = integrate(sys_, x0, args.t_end, args.dt, record_every=args.record_every)
    except StepTooLarge as exc:
        raise InputError(str(exc))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t"] + [f"x{i + 1}" for i in range(sys_.n)] + ["potential"])
    for t, x, e in zip(traj.times, traj.states, traj.energy):
        writer.writerow([repr(float(t))] + [repr(float(v)) for v in x] + [repr(float(e))])
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
        return 0
    final = traj.final
    result = {"samples": len(traj.times), "final_state": [float(v) for v in final],
              "final_potential": float(traj.energy[-1]), "out": args.out}
    table = (f"{len(traj.times)} samples written to {args.out}\n"
             f"final state: {' '.join(pi_multiple(v) for v in final)}\n"
             f"final potential: {float(traj.energy[-1]):.10g}")
    emit(args, "simulate", result, table)
    return 0


def cmd_table1(args) -> int:
    report = table1_report(grid=args.grid)
    rows = []
    for row in report["rows"]:
        for f in row["found"] or [None]:
            if f is None:
                rows.append((row["row"], row["pattern"], "-", "-", "-", "-", "-", "-"))
                continue
            rows.append((row["row"], row["pattern"],
                         " ".join(pi_multiple(v) for v in f["representative"]),
                         *f["counts"], f"[{f['n_plus_interval'][0]},{f['n_plus_interval'][1]}]",
                         f["exact_n_plus"]))
    table = render_table(["#", "pattern", "representative", "c(G+)", "c(G-)", "c(G)",
                          "n+ bounds", "n+"], rows)
    for row in report["rows"]:
        status = "match" if row["match"] else "MISMATCH"
        line = f"row {row['row']}: {status}"
        if row["missing"] or row["extra"]:
            line += f" (golden not found: {row['missing']}; found, not golden: {row['extra']})"
        for note in row["notes"]:
            line += f" [{note}]"
        table += "\n" + line
    emit(args, "table1", report, table)
    return 0 if report["match"] else 1


def cmd_verify(args) -> int:
    results = run_all(seed=args.seed, slow=args.slow)
    lines = []
    for r in results:
        lines.append(r.line())
        lines.extend("    " + d for d in r.details)
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} criteria passed")
    # timings stay out of the structured output so it is reproducible
    doc = {"seed": args.seed, "criteria": [
        {k: v for k, v in r.to_document().items() if k != "seconds"} for r in results]}
    emit(args, "verify", doc, "\n".join(lines))
    return 0 if passed == len(results) else 1


# --------------------------------------------------------------------------
# parser

def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["table", "json"], default=argparse.SUPPRESS,
                        help="human table (default) or versioned JSON")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for randomized checks (default $SYNCHRONY_LAB_SEED or 0)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker cap; results do not depend on it")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="synchrony-lab",
        description="Synchrony patterns, signed Laplacian spectra and equilibria of coupled cell networks.")
    parser.add_argument("--fixtures", action="store_true", help="list built-in graphs and systems")
    parser.add_argument("--format", choices=["table", "json"], default="table")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=None)
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("synchrony", parents=[common], help="enumerate balanced partitions")
    p.add_argument("--graph", required=True, help="graph JSON file or fixture:<name>")
    p.add_argument("--include-trivial", action="store_true", help="also list the singleton partition")
    p.set_defaults(func=cmd_synchrony)

    p = sub.add_parser("automorphisms", parents=[common], help="automorphism group of a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--elements", action="store_true", help="list every element")
    p.set_defaults(func=cmd_automorphisms)

    p = sub.add_parser("exotic", parents=[common], help="flag balanced patterns with no symmetry origin")
    p.add_argument("--graph", required=True)
    p.add_argument("--pattern", help='single pattern such as "1,4|2,5|3,6"')
    p.set_defaults(func=cmd_exotic)

    p = sub.add_parser("bounds", parents=[common], help="signature and component bounds of a Laplacian")
    p.add_argument("--matrix", required=True, help='JSON file {"n": N, "rows": [[...], ...]}')
    p.add_argument("--zero-tol", type=float, default=None)
    p.add_argument("--edge-tol", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-10, help="symmetry / row-sum validation tolerance")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("equilibria", parents=[common], help="equilibria inside synchrony subspaces")
    p.add_argument("--system", required=True, help="system JSON file or fixture:<name>")
    p.add_argument("--pattern", help="search one pattern (default: one per conjugacy class)")
    p.add_argument("--grid", type=int, default=8, help="starts per free coordinate")
    p.add_argument("--box", type=float, default=2 * math.pi, help="half-width of the start box off the torus")
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("simulate", parents=[common], help="RK4 trajectory as CSV")
    p.add_argument("--system", required=True)
    p.add_argument("--x0", required=True, help="comma-separated initial state")
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--record-every", type=int, default=1)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("table1", parents=[common], help="Kuramoto G6 equilibrium census vs golden data")
    p.add_argument("--grid", type=int, default=8)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("verify", parents=[common], help="run every acceptance check")
    p.add_argument("--slow", action="store_true", help="include the 11-cell exotic census")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.seed is None:
            args.seed = default_seed()
        if args.fixtures:
            doc = listing()
            if args.format == "json":
                print(json.dumps({"schema_version": SCHEMA_VERSION, "command": "fixtures",
                                  "result": doc}, indent=2, sort_keys=True))
            else:
                for kind, items in doc.items():
                    print(f"{kind}:")
                    for name, desc in items.items():
                        print(f"  fixture:{name:<12} {desc}")
            return 0
        if not args.command:
            parser.print_help()
            return 2
        return args.func(args)
    except (InputError, *INPUT_ERRORS) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except NoConvergence as exc:
        print(f"error: NoConvergence: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
