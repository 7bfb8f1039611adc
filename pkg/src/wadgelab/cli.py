"""Command-line surface.

    wadgelab classify EXPR
    wadgelab check-i EXPR
    wadgelab decompose EXPR --window LO HI --depth D
    wadgelab reduce KIND [options] [--out PATH]
    wadgelab verify --map PATH --from EXPR --to EXPR --window LO HI --grid N [--seed S]
    wadgelab baire OP ARG [--depth D] [--out PATH]
    wadgelab export-map PATH [--out PATH]
    wadgelab join EXPR... --window LO HI --grid N

Exit status: 0 ok, 1 verification failure, 2 usage/parse/domain error,
3 depth budget exhausted.  Output is line oriented and deterministic.
"""

import argparse
import random
import re
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import baire as bz
from . import constructions as cons
from . import pointset as ps
from . import stages as st
from .dsl import parse_expr
from .errors import DepthExceeded, ParseError, WadgeError
from .exact import IntervalAtom, format_scalar, is_finite, parse_scalar
from .finite import fmt_atoms
from .orders import SubsetPattern
from .redmap import parse_map, verify_reduction

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DEPTH = 0, 1, 2, 3

VERBS = ("classify", "check-i", "decompose", "reduce", "verify", "baire", "export-map", "join")
REDUCE_KINDS = ("subsetfin", "belowQ", "toQ", "minimal-compact", "glue", "open-to-set")
BAIRE_OPS = ("to-real", "from-real", "probe", "transport")

# scalars such as -1/2, -inf or -sqrt2 are values, not options
_NEGATIVE = re.compile(r"^-(\d|inf$|sqrt2)")


@dataclass(frozen=True)
class Command:
    verb: str
    args: argparse.Namespace


class _Parser(argparse.ArgumentParser):
    """Raises ParseError instead of exiting; positions refer to the joined argv."""

    def __init__(self, *a, argv=(), **kw):
        super().__init__(*a, **kw)
        self._negative_number_matcher = _NEGATIVE
        self._argv = list(argv)

    def error(self, message):
        m = re.search(r"'([^']*)'", message) or re.search(r": (\S+)$", message)
        raise ParseError(message, 1, _column(self._argv, m.group(1) if m else None))


def _column(argv, token):
    col = 1
    for t in argv:
        if t == token:
            return col
        col += len(t) + 1
    return 1


def _build_parser(argv):
    p = _Parser(prog="wadgelab", description="Exact continuous reductions between subsets of the line.",
                argv=argv)
    sub = p.add_subparsers(dest="verb", parser_class=_Parser)
    sub.required = True

    def verb(name, help_text):
        return sub.add_parser(name, help=help_text, argv=argv)

    def window(q, required=True):
        q.add_argument("--window", nargs=2, metavar=("LO", "HI"), required=required)

    def out(q):
        q.add_argument("--out", metavar="PATH")

    q = verb("classify", "print the topological class of a set expression")
    q.add_argument("expr")

    q = verb("check-i", "decide the two halves of condition (I)")
    q.add_argument("expr")

    q = verb("decompose", "split a set into disjoint relatively closed pieces")
    q.add_argument("expr")
    window(q)
    q.add_argument("--depth", type=int, default=3)

    q = verb("reduce", "build a reduction and print or write its map")
    q.add_argument("kind", choices=REDUCE_KINDS)
    q.add_argument("--a", help="source pattern (subsetfin, belowQ)")
    q.add_argument("--b", help="target pattern (subsetfin, belowQ)")
    q.add_argument("--set", dest="set_expr", help="source set (toQ, open-to-set)")
    q.add_argument("--to", dest="to_expr", help="target set (minimal-compact, glue, open-to-set)")
    q.add_argument("--witness", nargs=2, metavar=("X", "Y"), help="open-to-set witness interval")
    q.add_argument("--stages", type=int)
    q.add_argument("--cells", type=int, default=2, help="glue: number of unit cells")
    out(q)

    q = verb("verify", "sample x in A <=> f(x) in B on a grid")
    q.add_argument("--map", required=True, metavar="PATH")
    q.add_argument("--from", dest="from_expr", required=True)
    q.add_argument("--to", dest="to_expr", required=True)
    window(q)
    q.add_argument("--grid", type=int, required=True)
    q.add_argument("--seed", type=int, help="add grid/10 seeded random rationals")

    q = verb("baire", "Baire space codec, probes and transported maps")
    q.add_argument("op", choices=BAIRE_OPS)
    q.add_argument("arg")
    q.add_argument("--depth", type=int, default=bz.DEFAULT_DEPTH)
    out(q)

    q = verb("export-map", "re-emit a map file in canonical form")
    q.add_argument("path")
    out(q)

    q = verb("join", "the join of finitely many sets with its embeddings")
    q.add_argument("exprs", nargs="+")
    window(q)
    q.add_argument("--grid", type=int, required=True)
    return p


def parse_command(argv):
    """argv (a list, or one shell-quoted line) -> Command; errors carry columns."""
    if isinstance(argv, str):
        import shlex
        argv = shlex.split(argv)
    argv = list(argv)
    if argv and not argv[0].startswith("-") and argv[0] not in VERBS:
        raise ParseError(f"unknown verb {argv[0]!r}", 1, 1)
    ns = _build_parser(argv).parse_args(argv)
    return Command(ns.verb, ns)


# -- helpers ---------------------------------------------------------------------

def _expr(text):
    return parse_expr(text)


def _window(pair):
    lo, hi = (parse_scalar(t) for t in pair)
    return IntervalAtom(lo, hi, is_finite(lo), is_finite(hi))


def _yes(b):
    return "yes" if b else "no"


def _emit_map(text, path, out, summary):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
        out.append(f"WROTE {path} {summary}")
    else:
        out.extend(text.rstrip("\n").split("\n"))


def _need(value, flag, kind):
    if value is None:
        raise ParseError(f"reduce {kind} needs {flag}")
    return value


# -- verbs -------------------------------------------------------------------------

def _classify(a, out):
    out.append(f"CLASS {ps.classify(_expr(a.expr))}")
    return EXIT_OK


def _check_i(a, out):
    chk = ps.check_I(_expr(a.expr))
    out.append(f"I0 {_yes(chk.i0)} I1 {_yes(chk.i1)}")
    return EXIT_OK


def _decompose(a, out):
    pieces = cons.decompose_fsigma(_expr(a.expr), _window(a.window), a.depth)
    out.append(f"PIECES {len(pieces)}")
    for k, p in enumerate(pieces):
        out.append(f"PIECE {k} " + " ".join(fmt_atoms(p)))
    return EXIT_OK


def _checks_line(state, names):
    return "CHECKS " + " ".join(f"{n}={_yes(fn(state))}" for n, fn in names)


def _reduce(a, out):
    kind = a.kind
    if kind in ("subsetfin", "belowQ"):
        pa = SubsetPattern.parse(_need(a.a, "--a", kind))
        pb = SubsetPattern.parse(_need(a.b, "--b", kind))
        build = cons.subsetfin_reduction if kind == "subsetfin" else cons.belowQ_reduction
        f = build(pa, pb)
        _emit_map(f.to_text(), a.out, out, f"cells={len(f.cells)}")
        return EXIT_OK
    if kind == "toQ":
        state = st.reduce_to_Q(_expr(_need(a.set_expr, "--set", kind)), a.stages or 6)
        _emit_map(state.to_text(), a.out, out, f"stage={state.stage} pieces={len(state.entries)}")
        out.append(_checks_line(state, (("extension", st.check_extension), ("coherence", st.check_coherence),
                                        ("eps", st.check_eps), ("sorting", st.check_sorting),
                                        ("ledger", st.check_ledger))))
        return EXIT_OK
    if kind == "minimal-compact":
        state = st.reduce_minimal_compact(_expr(_need(a.to_expr, "--to", kind)), a.stages or 4)
        _emit_map(state.to_text(), a.out, out, f"stage={state.stage} pieces={len(state.entries)}")
        out.append(_checks_line(state, (("increasing", st.check_increasing),
                                        ("coherence", st.check_coherence))))
        return EXIT_OK
    if kind == "glue":
        states = st.glue_minimal(_expr(_need(a.to_expr, "--to", kind)), a.cells, stages=a.stages or 2)
        f = st.glued_map(states)
        _emit_map(f.to_text(), a.out, out, f"cells={len(f.cells)}")
        for x, fx, y in st.boundary_values(states):
            out.append(f"BOUNDARY x={format_scalar(x)} fx={format_scalar(fx)} y={format_scalar(y)}")
        return EXIT_OK
    # open-to-set
    U = _expr(_need(a.set_expr, "--set", kind))
    A = _expr(_need(a.to_expr, "--to", kind))
    x, y = (parse_scalar(t) for t in _need(a.witness, "--witness", kind))
    f = cons.open_to_set_reduction(U, A, (x, y))
    _emit_map(f.to_text(), a.out, out, f"cells={len(f.cells)}")
    return EXIT_OK


def _seeded_points(window, n, seed):
    rng = random.Random(seed)
    lo, hi = window.lo, window.hi
    return [lo + (hi - lo) * Fraction(rng.randrange(1, 10 ** 6), 10 ** 6) for _ in range(n)]


def _report(rep, out, label=None):
    line = rep.result_line()
    out.append(line if label is None else f"{line} {label}")
    out.extend(rep.witness_lines())
    return EXIT_OK if rep.ok else EXIT_FAIL


def _verify(a, out):
    with open(a.map) as fh:
        f = parse_map(fh.read())
    A, B = _expr(a.from_expr), _expr(a.to_expr)
    w = _window(a.window)
    extra = _seeded_points(w, max(1, a.grid // 10), a.seed) if a.seed is not None else ()
    return _report(verify_reduction(f, A, B, w, a.grid, extra), out)


def _baire(a, out):
    if a.op == "to-real":
        out.append(f"REAL {bz.baire_to_real(bz.BairePoint.parse(a.arg))}")
    elif a.op == "from-real":
        out.append(f"BAIRE {bz.real_to_baire(parse_scalar(a.arg), a.depth)}")
    elif a.op == "probe":
        k = bz.right_continuity_probe(parse_scalar(a.arg), k_max=a.depth)
        if k is None:
            raise DepthExceeded(f"no stable right approach within depth {a.depth}")
        out.append(f"PROBE k={k}")
    else:
        f = bz.transport(a.arg, depth=a.depth)
        _emit_map(f.to_text(), a.out, out, f"cells={len(f.cells)}")
    return EXIT_OK


def _export(a, out):
    with open(a.path) as fh:
        f = parse_map(fh.read())
    _emit_map(f.to_text(), a.out, out, f"cells={len(f.cells)}")
    return EXIT_OK


def _join(a, out):
    sets = [_expr(e) for e in a.exprs]
    J, maps = cons.upper_bound_join(sets)
    out.append(f"JOIN {J.dsl()}")
    w = _window(a.window)
    status = EXIT_OK
    for n, (A, f) in enumerate(zip(sets, maps)):
        out.append(f"EMBED {n} {f.cells[0].piece.text()}")
        status = max(status, _report(verify_reduction(f, A, J, w, a.grid), out, f"set={n}"))
    return status


_RUN = {"classify": _classify, "check-i": _check_i, "decompose": _decompose, "reduce": _reduce,
        "verify": _verify, "baire": _baire, "export-map": _export, "join": _join}


def run(cmd):
    """Command -> (exit status, output lines).  Errors become one diagnostic line."""
    out = []
    try:
        status = _RUN[cmd.verb](cmd.args, out)
    except DepthExceeded as exc:
        return EXIT_DEPTH, out + [f"error: DepthExceeded: {exc}"]
    except (WadgeError, ValueError, OSError) as exc:
        return EXIT_USAGE, out + [f"error: {type(exc).__name__}: {exc}"]
    return status, out


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv or argv[0] in ("-h", "--help"):
        _build_parser(argv).print_help()
        return EXIT_OK if argv else EXIT_USAGE
    try:
        cmd = parse_command(argv)
    except ParseError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    status, lines = run(cmd)
    for ln in lines:
        stream = sys.stderr if ln.startswith("error: ") else sys.stdout
        print(ln, file=stream)
    return status


if __name__ == "__main__":
    sys.exit(main())
