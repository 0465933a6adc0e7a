"""powmon: set calculator, verification suites and automorphism search.

Exit status is 0 on success, 1 when a verification or cross-check fails
(the counterexample is printed), and 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .core_sets import (
    boxing_decomposition,
    dilate,
    format_finset,
    gap_set,
    max_gap,
    n_fold,
    parse_finset,
    reversion,
    sumset,
)
from .errors import PowmonError, SearchInconsistency
from .morphisms import EndoMap
from .nummon import parse_generators
from .search import DEFAULT_LIMIT, SearchReport, conjecture_probe, restriction, search_automorphisms
from .structure import nathanson_structure, special_sum, stabilization_index
from .verify import DEFAULT_SAMPLES, SUITES, run_suite


def _nonneg(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {n}")
    return n


def _positive(text: str) -> int:
    n = _nonneg(text)
    if n == 0:
        raise argparse.ArgumentTypeError("expected a positive integer, got 0")
    return n


def _emit(args: argparse.Namespace, text: str, payload) -> None:
    if args.json:
        print(json.dumps(payload, separators=(",", ":")))
    else:
        print(text)


def _set_result(args: argparse.Namespace, x) -> int:
    _emit(args, format_finset(x), x.to_json())
    return 0


def cmd_sum(args):
    return _set_result(args, sumset(parse_finset(args.a), parse_finset(args.b)))


def cmd_nfold(args):
    return _set_result(args, n_fold(parse_finset(args.a), args.h))


def cmd_dilate(args):
    return _set_result(args, dilate(parse_finset(args.a), args.k))


def cmd_rev(args):
    return _set_result(args, reversion(parse_finset(args.a)))


def cmd_gaps(args):
    x = parse_finset(args.a)
    gaps = sorted(gap_set(x))
    text = f"gaps {','.join(map(str, gaps))}\nmax_gap {max_gap(x)}"
    _emit(args, text, {"gaps": gaps, "max_gap": max_gap(x)})
    return 0


def cmd_bdim(args):
    dec = boxing_decomposition(parse_finset(args.a))
    spans = " ".join(f"[{lo},{hi}]" for lo, hi in dec.intervals)
    _emit(args, f"{dec.dimension}\n{spans}", {"dimension": dec.dimension, "intervals": [list(i) for i in dec.intervals]})
    return 0


def cmd_nathanson(args):
    print(json.dumps(nathanson_structure(parse_finset(args.a)).to_dict(), separators=(",", ":")))
    return 0


def cmd_stab(args):
    k = stabilization_index(parse_finset(args.a), parse_finset(args.b))
    _emit(args, str(k), k)
    return 0


def cmd_special(args):
    return _set_result(args, special_sum(args.a, args.n))


def cmd_verify(args):
    res = run_suite(args.suite, args.max, seed=args.seed, samples=args.samples)
    if args.json:
        print(json.dumps(res.to_dict(), separators=(",", ":")))
    else:
        if res.seed is not None:
            print(f"suite {res.suite} seed {res.seed}")
        print(res.summary())
        for line in res.failures:
            print(f"counterexample: {line}")
    return 0 if res.ok else 1


def _describe(m: EndoMap, gens) -> str:
    if m == restriction("identity", m.K, gens):
        return "identity"
    if gens is None and m == restriction("reversion", m.K):
        return "reversion"
    moved = [f"{x}->{y}" for x, y in m.items() if x != y]
    return "moves " + "; ".join(moved)


def _report(args, report: SearchReport) -> int:
    if args.json:
        print(report.to_json(timing=args.timing))
        return 0
    gens = None if report.base is None else report.base.generators
    base = "N" if gens is None else "<" + ",".join(map(str, gens)) + ">"
    print(f"K={report.K} base={base} branch={report.branch} survivors={report.count} nodes={report.nodes}")
    print("prunes " + " ".join(f"{k}={v}" for k, v in report.prunes.items()))
    if args.timing:
        print(f"ms {report.ms}")
    if report.survivors is None:
        print(f"survivors not listed: more than --limit {args.limit}")
    else:
        for i, m in enumerate(report.survivors, 1):
            print(f"{i}: {_describe(m, gens)}")
    return 0


def cmd_search(args):
    report = search_automorphisms(args.max, args.branch, prune=not args.no_prune, limit=args.limit)
    return _report(args, report)


def cmd_conjecture(args):
    s = parse_generators(args.gens)
    report = conjecture_probe(s, args.max, prune=not args.no_prune, limit=args.limit)
    return _report(args, report)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = argparse.ArgumentParser(prog="powmon", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, fn, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=fn)
        return sp

    sp = add("sum", cmd_sum, "sumset A + B")
    sp.add_argument("a")
    sp.add_argument("b")
    sp = add("nfold", cmd_nfold, "h-fold sumset hA")
    sp.add_argument("a")
    sp.add_argument("h", type=_nonneg)
    sp = add("dilate", cmd_dilate, "dilation k*A")
    sp.add_argument("a")
    sp.add_argument("k", type=_positive)
    sp = add("rev", cmd_rev, "reversion max A - A")
    sp.add_argument("a")
    sp = add("gaps", cmd_gaps, "gap set and max gap")
    sp.add_argument("a")
    sp = add("bdim", cmd_bdim, "boxing dimension and interval cover")
    sp.add_argument("a")
    sp = add("nathanson", cmd_nathanson, "eventual structure of kA (JSON)")
    sp.add_argument("a")
    sp = add("stab", cmd_stab, "least k with (k+1)A = kA + B")
    sp.add_argument("a")
    sp.add_argument("b")
    sp = add("special", cmd_special, "sum of {0,a+i,a+i+1} for i < n")
    sp.add_argument("a", type=_nonneg)
    sp.add_argument("n", type=_positive)

    sp = add("verify", cmd_verify, "run a verification suite")
    sp.add_argument("--suite", required=True, choices=list(SUITES))
    sp.add_argument("--max", type=_nonneg, default=None, help="bound (suite default if omitted)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=_positive, default=DEFAULT_SAMPLES)

    for name, fn, help_text in (
        ("search", cmd_search, "automorphism search on max X <= K"),
        ("conjecture", cmd_conjecture, "automorphism search over subsets of a numerical monoid"),
    ):
        sp = add(name, fn, help_text)
        if name == "conjecture":
            sp.add_argument("--gens", required=True, help="comma-separated generators")
        sp.add_argument("--max", type=_nonneg, required=True, metavar="K")
        if name == "search":
            sp.add_argument("--branch", choices=["identity", "both"], default="both")
        sp.add_argument("--no-prune", action="store_true", help="apply rules to finished tables only")
        sp.add_argument("--timing", action="store_true", help="report wall time (JSON ms field)")
        sp.add_argument("--limit", type=_nonneg, default=DEFAULT_LIMIT, help="list survivors only up to this count")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SearchInconsistency as exc:
        print(f"cross-check failed: {exc}", file=sys.stderr)
        return 1
    except PowmonError as exc:
        print(f"powmon {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"powmon {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
