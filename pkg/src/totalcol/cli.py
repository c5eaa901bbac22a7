"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 falsified verdicts present,
3 inconclusive where a definite answer was requested.
"""

from __future__ import annotations

import argparse
import json
import sys

from .algorithm1 import run
from .budget import Budget, BudgetExceeded
from .corpus import gen_corpus
from .ff import select_prime
from .graph import ColorAssignment, ParseError, parse_graph, verify_total_coloring
from .harness import ClaimId, Params, dumps, run_suite
from .oracle import brute_total_chromatic

BANNER = "SCALED RUN (paper precondition violated)"
EXIT_OK, EXIT_USAGE, EXIT_FALSIFIED, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", help="graph file ('-' for stdin)")
    common.add_argument("--format", choices=["edgelist", "dimacs"], help="input format (sniffed when omitted)")
    common.add_argument("--prime-override", type=int, metavar="N", help="use this prime instead of the bound")
    common.add_argument("--budget", type=int, metavar="N", help="work units per check (default $TCC_BUDGET or 20000000)")
    common.add_argument("--strategy", choices=["gradedlex", "lexmin"], default="gradedlex",
                        help="vertex monomial selection")
    common.add_argument("--output", "-o", help="write the result here instead of stdout")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="totalcol", description="Total coloring via polynomial constructions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("color", parents=[common], help="total coloring with at most delta+2 colors")
    p.add_argument("--method", choices=["alg1", "oracle"], default="alg1")
    sub.add_parser("chi-total", parents=[common], help="exact total chromatic number")
    sub.add_parser("run-alg1", parents=[common], help="full trace of the edge procedure")

    p = sub.add_parser("verify-claims", parents=[common], help="per-instance verification over a corpus")
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--min-n", type=int, default=2)
    p.add_argument("--claims", default=",".join(c.value for c in ClaimId),
                   help="comma-separated claim ids")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timings", action="store_true", help="record wall time per verdict")
    p.add_argument("--figures", metavar="DIR", help="render verdict plots into DIR")

    p = sub.add_parser("corpus", parents=[common], help="list the generated graph corpus")
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--min-n", type=int, default=2)
    return parser


def _read_graph(args):
    if not args.input:
        raise UsageError("--input is required for this command")
    if args.input == "-":
        text = sys.stdin.read()
        name = "stdin"
    else:
        try:
            with open(args.input) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(str(exc)) from None
        name = args.input
    g = parse_graph(text, args.format, name=name)
    if g.m < 1:
        raise UsageError("graph must have at least one edge")
    return g


def _emit(args, payload: dict, text: str) -> None:
    out = json.dumps(payload, sort_keys=True, indent=2) + "\n" if args.json else text
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _scaled(g, override) -> bool:
    return override is not None and select_prime(g.m, g.delta, override).below_bound


def _coloring_text(c: ColorAssignment) -> str:
    lines = [f"v{i}: {col}" for i, col in sorted(c.vertex_colors.items())]
    lines += [f"e{k}: {col}" for k, col in sorted(c.edge_colors.items())]
    return "\n".join(lines) + "\n"


def cmd_color(args) -> int:
    g = _read_graph(args)
    budget = Budget(args.budget)
    scaled = False
    if args.method == "oracle":
        res = brute_total_chromatic(g, g.delta + 2, budget)
        if res.chi_total is None:
            _emit(args, {"error": "no total coloring with delta+2 colors"}, "no total coloring with delta+2 colors\n")
            return EXIT_FALSIFIED
        coloring = res.witness
    else:
        scaled = _scaled(g, args.prime_override)
        rep = run(g, args.prime_override, args.strategy, budget)
        if rep.outcome.kind != "colored":
            code = EXIT_FALSIFIED if rep.outcome.kind == "falsified" else EXIT_INCONCLUSIVE
            payload = {"outcome": rep.outcome.as_json(), "p": int(rep.p)}
            if scaled:
                payload["banner"] = BANNER
            _emit(args, payload, (BANNER + "\n" if scaled else "") +
                  f"{rep.outcome.kind}: {rep.outcome.claim or ''} {rep.outcome.detail}\n")
            return code
        coloring = rep.assignment
    chk = verify_total_coloring(g, ColorAssignment(coloring.vertex_colors, coloring.edge_colors))
    if not chk:
        raise AssertionError(f"emitted coloring failed verification: {chk.detail}")
    payload = coloring.as_json()
    payload["palette_size"] = len(coloring.colors_used()) if args.method == "oracle" else payload["palette_size"]
    if scaled:
        payload["banner"] = BANNER
    text = (BANNER + "\n" if scaled else "") + _coloring_text(coloring) + f"colors used: {len(coloring.colors_used())}\n"
    _emit(args, payload, text)
    return EXIT_OK


def cmd_chi_total(args) -> int:
    g = _read_graph(args)
    res = brute_total_chromatic(g, g.delta + 2, Budget(args.budget))
    payload = {"chi_total": res.chi_total, "delta": g.delta, "certificate": res.certificate,
               "witness": res.witness.as_json() if res.witness else None}
    _emit(args, payload, f"chi_total = {res.chi_total} (delta = {g.delta}; {res.certificate})\n")
    return EXIT_OK if res.chi_total is not None else EXIT_FALSIFIED


def cmd_run_alg1(args) -> int:
    g = _read_graph(args)
    scaled = _scaled(g, args.prime_override)
    rep = run(g, args.prime_override, args.strategy, Budget(args.budget))
    payload = rep.as_json()
    if scaled:
        payload["banner"] = BANNER
    lines = [BANNER] if scaled else []
    lines.append(f"graph {g.label()}  p={int(rep.p)}  outcome={rep.outcome.kind}")
    if rep.choice:
        lines.append(f"vertex monomial exponents {list(rep.choice.exponents)} ({rep.choice.method})")
    lines.append(f"alpha trace {rep.alpha_trace}")
    for h in rep.history:
        lines.append("  " + " ".join(f"{k}={h[k]}" for k in sorted(h)))
    for c in rep.checks:
        lines.append(f"  check {c.claim} at i={c.i}: {c.status} {c.detail}".rstrip())
    if rep.assignment:
        lines.append(_coloring_text(rep.assignment).rstrip())
    _emit(args, payload, "\n".join(lines) + "\n")
    return {"colored": EXIT_OK, "falsified": EXIT_FALSIFIED}.get(rep.outcome.kind, EXIT_INCONCLUSIVE)


def cmd_verify(args) -> int:
    try:
        claims = [ClaimId(c.strip()) for c in args.claims.split(",") if c.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.input:
        corpus = [_read_graph(args)]
    else:
        if args.max_n > 7:
            raise UsageError("--max-n is limited to 7")
        corpus = gen_corpus(args.max_n, min_n=args.min_n)
    params = Params(args.prime_override, args.strategy, args.budget, args.seed, timings=args.timings)
    report = run_suite(corpus, claims, params, threads=max(1, args.threads))
    if any(v["instance"].get("scaled") for v in report["verdicts"]):
        report["banner"] = BANNER
    if args.figures:
        from .figures import render_figures
        report_paths = render_figures(report, args.figures)
        print("figures: " + ", ".join(report_paths), file=sys.stderr)
    lines = [BANNER] if "banner" in report else []
    for c in claims:
        s = report["summary"][c.value]
        lines.append(f"{c.value:<14} holds={s['holds']:<4} falsified={s['falsified']:<3} "
                     f"inconclusive={s['inconclusive']:<4} {s['summary']}")
    text = "\n".join(lines) + "\n"
    if args.json:
        out = dumps(report)
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(out)
        else:
            sys.stdout.write(out)
    else:
        _emit(args, report, text)
    return EXIT_FALSIFIED if report["falsified"] else EXIT_OK


def cmd_corpus(args) -> int:
    graphs = gen_corpus(args.max_n, min_n=args.min_n)
    payload = {"count": len(graphs),
               "graphs": [{"name": g.name, "n": g.n, "m": g.m, "edges": [list(ed) for ed in g.edges]} for g in graphs]}
    text = "".join(f"{g.name} n={g.n} m={g.m} " + " ".join(f"{u}-{w}" for u, w in g.edges) + "\n" for g in graphs)
    _emit(args, payload, text + f"{len(graphs)} graphs\n")
    return EXIT_OK


COMMANDS = {"color": cmd_color, "chi-total": cmd_chi_total, "run-alg1": cmd_run_alg1,
            "verify-claims": cmd_verify, "corpus": cmd_corpus}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        code = COMMANDS[args.command](args)
    except (UsageError, ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    return code


if __name__ == "__main__":
    sys.exit(main())
