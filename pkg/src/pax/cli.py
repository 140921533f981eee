"""Command-line entry point.

Exit codes: 0 success or equivalent, 1 inequivalent, 2 usage or parse error,
3 unknown (``prove``), 4 budget exceeded.  Results go to standard output,
diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import terms as T
from .data import EvalMap
from .bisim import branching_equivalent, rooted_equivalent
from .meadow import format_rational
from .parser import ParseError, SpecFile, parse_evalmap_text, parse_file, parse_term
from .pretty import pretty, pretty_evalmap, pretty_specfile
from .pts import BudgetExceeded, DEFAULT_MAX_STATES, NotEvalRootedError, explore, export
from .rewrite import RewriteBudgetExceeded, normalize, prove_equal
from .simulate import DEFAULT_MAX_STEPS, Simulator, derive_seed, make_scheduler, wilson_interval
from .sos import Engine

EXIT_OK, EXIT_INEQUIVALENT, EXIT_USAGE, EXIT_UNKNOWN, EXIT_BUDGET = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _emit(args, text: str | None = None, payload: dict | None = None) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    elif text is not None:
        print(text)


def _load(path: str) -> SpecFile:
    try:
        return parse_file(path)
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None


def _proc(sf: SpecFile, ref: str) -> T.Proc:
    """A process name from the file, or an inline term over its declarations."""
    if ref in sf.procs:
        return sf.procs[ref]
    if ref.isidentifier() and ref not in sf.actions:
        raise UsageError(f"no process named {ref!r} (known: {', '.join(sf.procs) or 'none'})")
    return parse_term(ref, sf)


def _sigma(sf: SpecFile, ref: str | None):
    if ref is None:
        return None
    if ref in sf.evals:
        return sf.evals[ref]
    return parse_evalmap_text(ref)


# -- subcommands -------------------------------------------------------------

def cmd_parse(args) -> int:
    sf = _load(args.spec)
    payload = {
        "bound": sf.bound,
        "variables": list(sf.variables),
        "actions": dict(sf.actions),
        "evals": {n: pretty_evalmap(s) for n, s in sf.evals.items()},
        "specs": list(sf.specs),
        "procs": {n: pretty(t) for n, t in sf.procs.items()},
    }
    _emit(args, pretty_specfile(sf).rstrip("\n"), payload)
    return EXIT_OK


def cmd_lts(args) -> int:
    sf = _load(args.spec)
    ctx = sf.context()
    t = _proc(sf, args.proc)
    if args.steps:
        return _dump_steps(args, sf, t)
    pts = explore(t, ctx, max_states=args.max_states, sigma_mode=args.sigma_mode)
    _report_clamps(sf.bound, dict(ctx.universe.clamp_events))
    if args.dot:
        print(export(pts, "dot"), end="")
    elif args.json or args.format == "json":
        print(export(pts, "json"), end="")
    else:
        print(pts.summary())
    return EXIT_OK


def _dump_steps(args, sf: SpecFile, t: T.Proc) -> int:
    eng = Engine(sf.context())
    sigma = _sigma(sf, args.sigma) or EvalMap({v: 0 for v in sf.variables})
    dist = sorted(eng.distribution(sigma, t).items(), key=lambda kv: pretty(kv[0]))
    steps = sorted(((pretty(a), pretty(u)) for a, u in eng.steps(sigma, t)), key=lambda s: (s[1], s[0]))
    term = eng.terminates(sigma, t)
    lines = [f"{format_rational(p)} : {pretty(u)}" for u, p in dist]
    lines += [f"--{a}--> {u}" for a, u in steps]
    if term:
        lines.append("terminates")
    payload = {"sigma": pretty_evalmap(sigma),
               "distribution": [{"p": format_rational(p), "term": pretty(u)} for u, p in dist],
               "steps": [{"label": a, "target": u} for a, u in steps], "terminates": term}
    _emit(args, "\n".join(lines), payload)
    return EXIT_OK


def cmd_bisim(args) -> int:
    sf = _load(args.spec)
    ctx = sf.context()
    t1, t2 = _proc(sf, args.p1), _proc(sf, args.p2)
    check = branching_equivalent if args.branching else rooted_equivalent
    v = check(t1, t2, ctx, max_states=args.max_states)
    kind = "branching" if args.branching else "rooted branching"
    text = "equivalent" if v.equivalent else "inequivalent"
    if args.evidence and v.evidence:
        text += f"\n{v.evidence}"
    _emit(args, text, {"relation": kind, "equivalent": v.equivalent, "evidence": v.evidence})
    return EXIT_OK if v.equivalent else EXIT_INEQUIVALENT


def cmd_prove(args) -> int:
    sf = _load(args.spec)
    v = prove_equal(_proc(sf, args.p1), _proc(sf, args.p2), sf.context())
    payload = {"verdict": v.verdict, "reason": v.reason}
    if v.traces:
        payload["axioms"] = [tr.axioms() for tr in v.traces]
    _emit(args, str(v), payload)
    return EXIT_OK if v.derived else EXIT_UNKNOWN


def cmd_simplify(args) -> int:
    sf = _load(args.spec)
    nf, trace = normalize(_proc(sf, args.proc), sf.context())
    lines = [pretty(nf)]
    if args.trace:
        lines = [str(trace)]
    payload = {"normal_form": pretty(nf), "steps": [
        {"axiom": s.axiom, "position": list(s.position), "before": pretty(s.before), "after": pretty(s.after)}
        for s in trace.steps]}
    _emit(args, "\n".join(lines), payload)
    return EXIT_OK


def _event(expr: str | None):
    """``performed:LABEL``, ``final:VAR=N`` or ``status:S``."""
    if expr is None:
        return None
    kind, _, arg = expr.partition(":")
    if kind == "performed" and arg:
        return lambda tr: arg in tr.actions
    if kind == "final" and "=" in arg:
        var, _, val = arg.partition("=")
        if not val.strip().isdigit():
            raise UsageError(f"bad event {expr!r}: expected final:VAR=N")
        var, n = var.strip(), int(val)
        return lambda tr: tr.status == "terminated" and tr.final_map is not None and tr.final_map.get(var) == n
    if kind == "status" and arg in ("terminated", "deadlocked", "step-limit"):
        return lambda tr: tr.status == arg
    raise UsageError(f"bad event {expr!r}: use performed:LABEL, final:VAR=N or status:S")


def _sim_chunk(job):
    spec, proc, init, policy, max_steps, seed, lo, hi = job
    sf = _load(spec)
    ctx = sf.context()
    sim = Simulator(_proc(sf, proc), ctx, _sigma(sf, init))
    out = []
    for i in range(lo, hi):
        s = derive_seed(seed, i)
        out.append((i, s, sim.run(s, policy, max_steps)))
    return out, dict(ctx.universe.clamp_events)


def _report_clamps(bound: int, events: dict) -> None:
    if events:
        detail = ", ".join(f"{op} {n}x" for op, n in sorted(events.items()))
        print(f"pax: note: results were clamped to the data bound {bound} ({detail})", file=sys.stderr)


def cmd_sim(args) -> int:
    if args.runs < 1:
        raise UsageError("--runs must be at least 1")
    seed = args.seed if args.seed is not None else int(os.environ.get("PAX_SEED", "0"))
    make_scheduler(args.policy)
    event = _event(args.event)
    sf = _load(args.spec)
    _proc(sf, args.proc)
    jobs = max(1, min(args.jobs, args.runs))
    bounds = [(args.runs * k // jobs, args.runs * (k + 1) // jobs) for k in range(jobs)]
    work = [(args.spec, args.proc, args.init, args.policy, args.max_steps, seed, lo, hi) for lo, hi in bounds]
    if jobs == 1:
        chunks = [_sim_chunk(work[0])]
    else:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_sim_chunk, work))
    results = [r for rs, _ in chunks for r in rs]
    clamps: dict = {}
    for _, ev in chunks:
        for op, n in ev.items():
            clamps[op] = clamps.get(op, 0) + n
    _report_clamps(sf.bound, clamps)
    rows = [(i, s, tr.status, pretty_evalmap(tr.final_map) if tr.final_map is not None else "",
             " ".join(tr.actions)) for i, s, tr in results]
    summary = None
    if event is not None:
        hits = sum(1 for _, _, tr in results if event(tr))
        lo, hi = wilson_interval(hits, args.runs)
        summary = {"event": args.event, "successes": hits, "runs": args.runs,
                   "frequency": format_rational(Fraction(hits, args.runs)), "low": lo, "high": hi}
    if args.format == "json":
        payload = {"seed": seed, "policy": args.policy, "summary": summary,
                   "runs": [dict(zip(("run", "seed", "status", "final_map", "actions"), r)) for r in rows]}
        _emit(args, None, payload)
        return EXIT_OK
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if not args.summary_only:
        w.writerow(["run", "seed", "status", "final_map", "actions"])
        w.writerows(rows)
    out = buf.getvalue()
    if summary is not None:
        out += (f"# {args.event}: {hits}/{args.runs} = {hits / args.runs:.6f} "
                f"95% interval [{lo:.6f}, {hi:.6f}]\n")
    print(out, end="")
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_all
    results = run_all(args.jobs)
    ok = all(r.passed for r in results)
    payload = {"passed": ok, "cases": [{"name": r.name, "passed": r.passed, "detail": r.detail}
                                       for r in results]}
    _emit(args, "\n".join(r.line() for r in results), payload)
    return EXIT_OK if ok else EXIT_INEQUIVALENT


# -- argument parsing ----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text", help="output format")
    common.add_argument("--jobs", type=int, default=1, help="maximum number of worker processes")

    p = _Parser(prog="pax", description="Probabilistic process algebra workbench.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("parse", parents=[common], help="check a specification file and print it back")
    s.add_argument("spec")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("lts", parents=[common], help="build the reachable transition system")
    s.add_argument("spec")
    s.add_argument("proc", help="process name or inline term")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--json", action="store_true", help="export as JSON")
    g.add_argument("--dot", action="store_true", help="export as Graphviz dot")
    g.add_argument("--steps", action="store_true", help="only the root's distribution and steps")
    s.add_argument("--sigma", help="evaluation map for --steps: a declared name or 'v=1,w=0'")
    s.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    s.add_argument("--sigma-mode", choices=("auto", "all", "canonical"), default="auto")
    s.set_defaults(func=cmd_lts)

    s = sub.add_parser("bisim", parents=[common], help="decide (rooted) branching bisimilarity")
    s.add_argument("spec")
    s.add_argument("p1")
    s.add_argument("p2")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--rooted", action="store_true", help="rooted branching bisimulation (default)")
    g.add_argument("--branching", action="store_true", help="branching bisimulation")
    s.add_argument("--evidence", action="store_true", help="explain an inequivalence")
    s.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    s.set_defaults(func=cmd_bisim)

    s = sub.add_parser("prove", parents=[common], help="try to derive an equation by rewriting")
    s.add_argument("spec")
    s.add_argument("p1")
    s.add_argument("p2")
    s.set_defaults(func=cmd_prove)

    s = sub.add_parser("simplify", parents=[common], help="rewrite a term to normal form")
    s.add_argument("spec")
    s.add_argument("proc")
    s.add_argument("--trace", action="store_true", help="print every rewrite step")
    s.set_defaults(func=cmd_simplify)

    s = sub.add_parser("sim", parents=[common], help="sample executions")
    s.add_argument("spec")
    s.add_argument("proc")
    s.add_argument("--runs", type=int, default=1)
    s.add_argument("--seed", type=int, default=None, help="base seed (default: $PAX_SEED or 0)")
    s.add_argument("--policy", default="uniform", help="uniform, first or priority:a,b,...")
    s.add_argument("--event", help="performed:LABEL, final:VAR=N or status:S")
    s.add_argument("--init", help="initial evaluation map: a declared name or 'v=1,w=0'")
    s.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    s.add_argument("--summary-only", action="store_true", help="with --event, print only the estimate")
    s.set_defaults(func=cmd_sim)

    s = sub.add_parser("selftest", parents=[common], help="run the bundled example suite")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.func(args)
    except ParseError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError, T.TermError, NotEvalRootedError) as exc:
        print(f"pax: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetExceeded, RewriteBudgetExceeded) as exc:
        print(f"pax: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
