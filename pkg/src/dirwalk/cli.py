"""dirwalk command line: rank, compile, sweep, verify."""

from __future__ import annotations

import argparse
import json
import re
import sys
import warnings

import numpy as np

from . import fixtures
from .compiler import (GENERIC_PAD, PAPER_FIXTURE, CompileError, CompileOptions, compile_evolution,
                       verify_circuit)
from .graph import ConvergenceError, GraphParseError, hamiltonian, pagerank, parse_graph
from .ir import CircuitIR
from .jones import input_state, sweep
from .spectral import NotEvolvableError, ctqw_centrality, eigendecompose

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_VERIFY = 0, 1, 2, 3


class DataError(Exception):
    """Bad input data; reported on stderr with exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- helpers

_PI_TERM = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?(?:e[+-]?\d+)?)\*?pi(?:/(\d+\.?\d*|\.\d+))?$")


def parse_number(text: str) -> float:
    """A float, optionally written with pi: '3', '0.5', 'pi', '2pi', '2*pi', 'pi/2'."""
    s = text.strip().lower().replace(" ", "")
    m = _PI_TERM.match(s)
    if m:
        coef = m.group(1)
        value = {"": 1.0, "+": 1.0, "-": -1.0}.get(coef) or float(coef)
        value *= np.pi
        return value / float(m.group(2)) if m.group(2) else value
    try:
        value = float(s)
    except ValueError:
        raise ValueError(f"not a number: {text!r}") from None
    if not np.isfinite(value):
        raise ValueError(f"not a finite number: {text!r}")
    return value


def parse_grid(spec: str) -> np.ndarray:
    """'start:stop:N' -> N uniform points on [start, stop); a bare number is one point."""
    parts = spec.split(":")
    if len(parts) == 1:
        return np.array([parse_number(parts[0])])
    if len(parts) != 3:
        raise ValueError(f"grid must look like start:stop:N, got {spec!r}")
    start, stop = parse_number(parts[0]), parse_number(parts[1])
    try:
        count = int(parts[2])
    except ValueError:
        raise ValueError(f"grid point count must be an integer, got {parts[2]!r}") from None
    if count < 1:
        raise ValueError("grid needs at least one point")
    if count > 1 and stop <= start:
        raise ValueError("grid stop must exceed start")
    return start + (stop - start) * np.arange(count) / count


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def _load_graph(path: str):
    try:
        return parse_graph(_read(path))
    except GraphParseError as exc:
        raise DataError(f"{path}: {exc}") from None


def _load_ir(path: str) -> CircuitIR:
    try:
        return CircuitIR.loads(_read(path))
    except (ValueError, KeyError, TypeError) as exc:
        raise DataError(f"{path}: invalid circuit: {exc}") from None


def _emit(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise DataError(f"cannot write {out}: {exc.strerror}") from None


def _groups(ranking) -> str:
    return " > ".join("{" + ",".join(str(v + 1) for v in g) + "}" for g in ranking)


# ---------------------------------------------------------------- commands

def cmd_rank(args) -> int:
    g = _load_graph(args.graph)
    methods = ("pagerank", "ctqw") if args.method == "both" else (args.method,)
    reports = []
    for method in methods:
        if method == "pagerank":
            try:
                reports.append(pagerank(g, damping=args.damping))
            except ConvergenceError as exc:
                raise DataError(str(exc)) from None
        else:
            try:
                reports.append(ctqw_centrality(eigendecompose(hamiltonian(g))))
            except NotEvolvableError as exc:
                raise DataError(f"ctqw centrality undefined: {exc}") from None

    if args.json:
        doc = {"n": g.n, "reports": [r.to_json() for r in reports]}
        if "pagerank" in methods:
            doc["damping"] = args.damping
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
        return EXIT_OK

    lines = ["vertex " + " ".join(f"{r.method:>10}" for r in reports)]
    for v in range(g.n):
        lines.append(f"{v + 1:>6} " + " ".join(f"{r.scores[v]:>10.6f}" for r in reports))
    for r in reports:
        lines.append(f"{r.method} ranking: {_groups(r.ranking)}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_compile(args) -> int:
    g = _load_graph(args.graph)
    H = hamiltonian(g)
    if g.n not in (3, 4):
        raise DataError(f"unsupported dimension {g.n}; compile handles 3- and 4-vertex graphs")
    mode = args.mode
    if mode == "auto":
        mode = PAPER_FIXTURE if fixtures.match_fixture(H) is not None else GENERIC_PAD
    dec = eigendecompose(H)
    try:
        ir = compile_evolution(dec, CompileOptions(mode=mode, center=not args.no_center))
    except (NotEvolvableError, CompileError) as exc:
        raise DataError(str(exc)) from None
    text = ir.dumps() + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        _emit(text, args.out)
        print(f"wrote {args.out}: {len(ir.stages)} stages, total_scale {ir.total_scale:.6g}, "
              f"mode {mode}, blocks {' '.join(ir.labels())}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    ir = _load_ir(args.ir)
    try:
        grid = parse_grid(args.grid)
    except ValueError as exc:
        raise DataError(f"invalid --grid: {exc}") from None
    if args.rate is not None and args.rate < 0:
        raise DataError("--rate must be non-negative")
    table = sweep(ir, input_state(ir), grid)
    if args.rate is not None:
        table = table.with_counts(args.rate, args.seed)
    _emit(table.to_csv(), args.out)
    if args.out not in (None, "-"):
        cent = ", ".join(f"{c:.6f}" for c in table.centrality())
        print(f"wrote {len(grid)} rows to {args.out}; grid-average centrality: {cent}")
    return EXIT_OK


def cmd_verify(args) -> int:
    ir = _load_ir(args.ir)
    g = _load_graph(args.graph)
    if args.samples < 1:
        raise DataError("--samples must be positive")
    try:
        report = verify_circuit(ir, hamiltonian(g), samples=args.samples)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    if args.json:
        _emit(json.dumps(report.to_json(), indent=2) + "\n", args.out)
    else:
        status = "PASS" if report.passed else "FAIL"
        lines = [f"{status}: max phase-invariant error {report.max_error:.3e} "
                 f"(tolerance {report.tolerance:.0e}, {report.samples} samples, worst t={report.worst_t:.6g})"]
        lines += [f"  {note}" for note in report.notes]
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if report.passed else EXIT_VERIFY


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dirwalk", description="Quantum-walk centrality of directed graphs and its optical compilation.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("rank", help="centrality scores of a graph")
    r.add_argument("--graph", required=True, help="edge-list or JSON graph file")
    r.add_argument("--method", choices=("pagerank", "ctqw", "both"), default="both")
    r.add_argument("--damping", type=float, default=0.85)
    r.add_argument("--json", action="store_true", help="machine-readable output")
    r.add_argument("--out", help="write to a file instead of stdout")
    r.set_defaults(func=cmd_rank)

    c = sub.add_parser("compile", help="compile the walk on a 3- or 4-vertex graph to an element program")
    c.add_argument("--graph", required=True)
    c.add_argument("--out", help="IR JSON path (default: stdout)")
    c.add_argument("--mode", choices=("auto", PAPER_FIXTURE, GENERIC_PAD), default="auto",
                   help="3x3 -> 4x4 expansion; auto uses the hand-made expansion for known graphs")
    c.add_argument("--no-center", action="store_true", help="keep the raw eigenvalues as phase coefficients")
    c.set_defaults(func=cmd_compile)

    s = sub.add_parser("sweep", help="detector probabilities of a compiled program over a t grid")
    s.add_argument("--ir", required=True)
    s.add_argument("--grid", default="0:2pi:64", help="start:stop:N, endpoint excluded; 'pi' allowed")
    s.add_argument("--rate", type=float, help="mean photons per grid point; adds Poisson count columns")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", help="CSV path (default: stdout)")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="check a program against exp(-iHt) of a graph")
    v.add_argument("--ir", required=True)
    v.add_argument("--graph", required=True)
    v.add_argument("--samples", type=int, default=32)
    v.add_argument("--json", action="store_true")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except DataError as exc:
        print(f"dirwalk {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
