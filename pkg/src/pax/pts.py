"""Reachable probabilistic transition systems.

:func:`explore` closes a set of root terms under distribution supports and
action targets, for every evaluation map in scope.  States are numbered in
breadth-first discovery order, so two runs over the same input produce the
same system and the same exports byte for byte.

Evaluation maps in scope: when every root is an evaluation-operator term the
ambient map is irrelevant and one canonical (empty) map is used.  Otherwise
all maps over the roots' free flexible variables are enumerated.

A state whose distribution is not the point mass on itself still has to
resolve a probabilistic choice.  Its action steps and termination are left
out: it only acts through the states it resolves to, which is also how the
simulator executes it.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Sequence

from .data import EMPTY_MAP, EvalMap
from .meadow import format_rational, parse as parse_rational
from .pretty import pretty
from . import terms as T
from .sos import Engine

DEFAULT_MAX_STATES = 100_000
DEFAULT_MAX_SIGMAS = 4096


class BudgetExceeded(Exception):
    def __init__(self, message: str, frontier: T.Proc | None = None):
        super().__init__(message)
        self.frontier = frontier


class NotEvalRootedError(ValueError):
    pass


@dataclass
class PTS:
    """Per state: names, per-sigma distributions, action edges and termination."""

    names: list[str]
    sigmas: list[EvalMap]
    labels: list[str]
    dist: list[list[tuple[tuple[int, Fraction], ...]]]
    steps: list[list[tuple[tuple[int, int], ...]]]
    term: list[list[bool]]
    roots: list[int] = field(default_factory=lambda: [0])
    terms: list[T.Proc] | None = field(default=None, compare=False, repr=False)
    tau: int | None = None

    @property
    def root(self) -> int:
        return self.roots[0]

    @property
    def n(self) -> int:
        return len(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def __eq__(self, other):
        if not isinstance(other, PTS):
            return NotImplemented
        return (self.names == other.names and self.sigmas == other.sigmas
                and self.labels == other.labels and self.dist == other.dist
                and self.steps == other.steps and self.term == other.term
                and self.roots == other.roots and self.tau == other.tau)

    def state(self, i: int) -> T.Proc:
        if self.terms is None:
            raise ValueError("this system was imported without terms")
        return self.terms[i]

    def index(self, t: T.Proc) -> int:
        return self.names.index(pretty(t))

    def summary(self) -> str:
        edges = sum(len(s) for row in self.steps for s in row)
        prob = sum(len(d) for row in self.dist for d in row)
        return f"{self.n} states, {len(self.sigmas)} evaluation map(s), {prob} probability edges, {edges} action edges"


def sigma_universe(roots: Sequence[T.Proc], ctx: T.Context, mode: str = "auto",
                   max_sigmas: int = DEFAULT_MAX_SIGMAS) -> list[EvalMap]:
    all_eval = all(isinstance(r, T.Eval) for r in roots)
    if mode == "canonical":
        if not all_eval:
            raise NotEvalRootedError("canonical evaluation-map mode needs evaluation-operator roots")
        return [EMPTY_MAP]
    if mode not in ("auto", "all"):
        raise ValueError(f"unknown evaluation-map mode {mode!r}")
    if mode == "auto" and all_eval:
        return [EMPTY_MAP]
    names = sorted(frozenset().union(*(T.free_flex_vars(r) for r in roots)))
    size = len(ctx.universe.values) ** len(names)
    if size > max_sigmas:
        raise BudgetExceeded(
            f"{size} evaluation maps over {', '.join(names)} exceed the limit of {max_sigmas}")
    return list(ctx.universe.assignments(names))


def explore(roots: T.Proc | Sequence[T.Proc], ctx: T.Context | None = None, *,
            max_states: int = DEFAULT_MAX_STATES, sigma_mode: str = "auto",
            engine: Engine | None = None, sigmas: Sequence[EvalMap] | None = None) -> PTS:
    if isinstance(roots, T.Proc):
        roots = [roots]
    ctx = ctx or (engine.ctx if engine else T.Context())
    eng = engine or Engine(ctx)
    for r in roots:
        if not T.is_closed(r):
            raise T.OpenTermError(f"root {pretty(r)} contains free recursion variables")
    sig = list(sigmas) if sigmas is not None else sigma_universe(roots, ctx, sigma_mode)

    index: dict[T.Proc, int] = {}
    states: list[T.Proc] = []
    queue: deque[int] = deque()

    def visit(t: T.Proc) -> int:
        i = index.get(t)
        if i is None:
            if len(states) >= max_states:
                raise BudgetExceeded(f"more than {max_states} states; frontier term {pretty(t)}", t)
            i = index[t] = len(states)
            states.append(t)
            queue.append(i)
        return i

    root_ids = [visit(r) for r in roots]
    label_index: dict[tuple, int] = {}
    labels: list[str] = []
    dist_rows: list = []
    step_rows: list = []
    term_rows: list = []

    def label_id(a: T.Proc) -> int:
        k = ctx.action_key(a)
        j = label_index.get(k)
        if j is None:
            j = label_index[k] = len(labels)
            labels.append(pretty(a))
        return j

    label_id(T.TAU)
    while queue:
        i = queue.popleft()
        t = states[i]
        drow, srow, trow = [], [], []
        for s in sig:
            d = eng.distribution(s, t)
            drow.append(tuple(sorted((visit(u), p) for u, p in d.items())))
            if d.get(t) == 1:
                srow.append(tuple(sorted({(label_id(a), visit(u)) for a, u in eng.steps(s, t)})))
                trow.append(eng.terminates(s, t))
            else:
                # a state still to be resolved acts only through its resolutions
                srow.append(())
                trow.append(False)
        dist_rows.append(drow)
        step_rows.append(srow)
        term_rows.append(trow)
    return PTS(names=[pretty(t) for t in states], sigmas=sig, labels=labels,
               dist=dist_rows, steps=step_rows, term=term_rows, roots=root_ids,
               terms=states, tau=0)


# --------------------------------------------------------------------------
# serialization

def export(pts: PTS, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(to_json(pts), indent=1, sort_keys=False)
    if fmt == "dot":
        return to_dot(pts)
    raise ValueError(f"unknown export format {fmt!r}")


def to_json(pts: PTS) -> dict:
    prob, act, term = [], [], []
    for i in range(pts.n):
        for k in range(len(pts.sigmas)):
            for j, p in pts.dist[i][k]:
                prob.append({"from": i, "sigma": k, "to": j, "p": format_rational(p)})
            for lab, j in pts.steps[i][k]:
                act.append({"from": i, "sigma": k, "label": pts.labels[lab], "to": j})
            if pts.term[i][k]:
                term.append({"state": i, "sigma": k})
    return {
        "states": pts.names,
        "root": pts.root,
        "roots": pts.roots,
        "sigmas": [str(s) for s in pts.sigmas],
        "labels": pts.labels,
        "prob_edges": prob,
        "act_edges": act,
        "term": term,
    }


def import_json(text: str | dict) -> PTS:
    from .parser import parse_evalmap_text
    data = json.loads(text) if isinstance(text, str) else text
    names = list(data["states"])
    sigmas = [parse_evalmap_text(s) for s in data["sigmas"]]
    labels = list(data.get("labels", []))
    lab_ix = {l: i for i, l in enumerate(labels)}
    n, m = len(names), len(sigmas)
    dist = [[[] for _ in range(m)] for _ in range(n)]
    steps = [[[] for _ in range(m)] for _ in range(n)]
    term = [[False] * m for _ in range(n)]
    for e in data["prob_edges"]:
        dist[e["from"]][e.get("sigma", 0)].append((e["to"], parse_rational(e["p"])))
    for e in data["act_edges"]:
        lab = e["label"]
        if lab not in lab_ix:
            lab_ix[lab] = len(labels)
            labels.append(lab)
        steps[e["from"]][e.get("sigma", 0)].append((lab_ix[lab], e["to"]))
    for e in data["term"]:
        term[e["state"]][e.get("sigma", 0)] = True
    return PTS(names=names, sigmas=sigmas, labels=labels,
               dist=[[tuple(sorted(d)) for d in row] for row in dist],
               steps=[[tuple(sorted(s)) for s in row] for row in steps],
               term=term, roots=list(data.get("roots", [data["root"]])),
               tau=lab_ix.get("tau"))


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(pts: PTS) -> str:
    multi = len(pts.sigmas) > 1
    lines = ["digraph pts {", "  node [shape=box, fontname=monospace];"]
    for i, name in enumerate(pts.names):
        attrs = [f'label="{i}: {_dot_escape(name)}"']
        if i in pts.roots:
            attrs.append("penwidth=2")
        if any(pts.term[i]):
            attrs.append("peripheries=2")
        lines.append(f"  s{i} [{', '.join(attrs)}];")
    for i in range(pts.n):
        for k, sigma in enumerate(pts.sigmas):
            tag = f" @{sigma}" if multi else ""
            for j, p in pts.dist[i][k]:
                if j == i and p == 1:
                    continue
                lines.append(f'  s{i} -> s{j} [style=dashed, label="{format_rational(p)}{_dot_escape(tag)}"];')
            for lab, j in pts.steps[i][k]:
                lines.append(f'  s{i} -> s{j} [label="{_dot_escape(pts.labels[lab] + tag)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# replay check

def reachable(pts: PTS, sigma: int | None = None) -> set[int]:
    """States reachable from the roots along positive probability and action edges."""
    ks = range(len(pts.sigmas)) if sigma is None else [sigma]
    seen = set(pts.roots)
    stack = list(pts.roots)
    while stack:
        i = stack.pop()
        for k in ks:
            for j, _ in pts.dist[i][k]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
            for _, j in pts.steps[i][k]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
    return seen


# --------------------------------------------------------------------------
# exact outcome probabilities

def final_map(t: T.Proc) -> EvalMap | None:
    """The evaluation map carried by an evaluation-operator state."""
    return t.sigma if isinstance(t, T.Eval) else None


def _solve(rows: dict[int, dict[int, Fraction]], rhs: dict[int, dict[Hashable, Fraction]]) -> dict[int, dict]:
    """Solve ``x_i = sum_j rows[i][j] x_j + rhs[i]`` exactly by elimination.

    ``rhs`` values are sparse vectors so several right-hand sides share one
    elimination.  The system must have a unique solution.
    """
    rows = {i: dict(r) for i, r in rows.items()}
    rhs = {i: dict(rhs.get(i, {})) for i in rows}
    users: dict[int, set[int]] = {i: set() for i in rows}
    for i, r in rows.items():
        for j in r:
            users[j].add(i)
    order = sorted(rows)
    for i in order:
        r = rows[i]
        self_coef = r.pop(i, Fraction(0))
        users[i].discard(i)
        scale = 1 / (1 - self_coef)
        if scale != 1:
            for j in r:
                r[j] *= scale
            b = rhs[i]
            for key in b:
                b[key] *= scale
        for k in list(users[i]):
            rk = rows[k]
            c = rk.pop(i)
            for j, v in r.items():
                nv = rk.get(j, 0) + c * v
                if nv:
                    rk[j] = nv
                else:
                    rk.pop(j, None)
                if j != k:
                    users[j].add(k)
            bk = rhs[k]
            for key, v in rhs[i].items():
                nv = bk.get(key, 0) + c * v
                if nv:
                    bk[key] = nv
                else:
                    bk.pop(key, None)
        for j in r:
            users[j].discard(i)
        users[i] = set()
    # back substitution in reverse elimination order
    sol: dict[int, dict] = {}
    for i in reversed(order):
        b = dict(rhs[i])
        for j, v in rows[i].items():
            for key, w in sol[j].items():
                b[key] = b.get(key, 0) + v * w
        sol[i] = {k: v for k, v in b.items() if v}
    return sol


class _Game:
    """The system under one evaluation map as a Markov decision process.

    Resolved states choose among their action steps and termination; other
    states draw from their distribution.
    """

    def __init__(self, pts: PTS, k: int, outcome: Callable[[int], Hashable]):
        self.pts = pts
        self.k = k
        self.random: dict[int, tuple] = {}
        self.choice: dict[int, list] = {}
        for i in range(pts.n):
            d = pts.dist[i][k]
            if len(d) == 1 and d[0][0] == i:
                opts = [("act", j) for _, j in pts.steps[i][k]]
                if pts.term[i][k]:
                    opts.append(("term", outcome(i)))
                self.choice[i] = sorted(set(opts), key=repr)
            else:
                self.random[i] = d

    def succ(self, i: int, policy: dict[int, int] | None = None) -> list[int]:
        if i in self.random:
            return [j for j, _ in self.random[i]]
        opts = self.choice[i]
        if policy is not None:
            opts = [opts[policy[i]]] if opts else []
        return [o[1] for o in opts if o[0] == "act"]

    def can_reach(self, accept: Callable[[Hashable], bool], policy=None) -> set[int]:
        good = {i for i, opts in self.choice.items()
                if any(o[0] == "term" and accept(o[1])
                       for o in ([opts[policy[i]]] if policy is not None and opts else opts))}
        pred: dict[int, set[int]] = {}
        for i in range(self.pts.n):
            for j in self.succ(i, policy):
                pred.setdefault(j, set()).add(i)
        stack = list(good)
        while stack:
            j = stack.pop()
            for i in pred.get(j, ()):
                if i not in good:
                    good.add(i)
                    stack.append(i)
        return good

    def forced_positive(self, accept) -> set[int]:
        """States from which every scheduler reaches an accepted outcome with positive probability."""
        pos: set[int] = set()
        changed = True
        while changed:
            changed = False
            for i in range(self.pts.n):
                if i in pos:
                    continue
                if i in self.random:
                    ok = any(j in pos for j, _ in self.random[i])
                else:
                    opts = self.choice[i]
                    ok = bool(opts) and all(
                        (o[0] == "term" and accept(o[1])) or (o[0] == "act" and o[1] in pos) for o in opts)
                if ok:
                    pos.add(i)
                    changed = True
        return pos

    def evaluate(self, policy: dict[int, int], live: set[int], accept) -> dict[int, Fraction]:
        rows, rhs = {}, {}
        for i in live:
            if i in self.random:
                rows[i] = {j: p for j, p in self.random[i] if j in live}
                rhs[i] = {}
            else:
                opts = self.choice[i]
                o = opts[policy[i]]
                if o[0] == "term":
                    rows[i] = {}
                    rhs[i] = {0: Fraction(1)} if accept(o[1]) else {}
                else:
                    rows[i] = {o[1]: Fraction(1)} if o[1] in live else {}
                    rhs[i] = {}
        sol = _solve(rows, rhs)
        return {i: sol[i].get(0, Fraction(0)) for i in live}


def reach_probability(pts: PTS, accept: Callable[[Hashable], bool], *, mode: str = "max",
                      sigma: int = 0, start: int | None = None,
                      outcome: Callable[[int], Hashable] | None = None) -> Fraction:
    """Extremal probability of terminating with an accepted outcome.

    ``outcome(i)`` maps a terminating state to its observable outcome (by
    default the final evaluation map); ``mode`` chooses the scheduler that
    maximises or minimises the probability.  Computed exactly by policy
    iteration.
    """
    if mode not in ("max", "min"):
        raise ValueError("mode must be 'max' or 'min'")
    if outcome is None:
        outcome = _default_outcome(pts)
    g = _Game(pts, sigma, outcome)
    start = pts.root if start is None else start
    if mode == "max":
        live_all = g.can_reach(accept)
    else:
        live_all = g.forced_positive(accept)
    if start not in live_all:
        return Fraction(0)

    def option_value(o, vals):
        if o[0] == "term":
            return Fraction(1) if accept(o[1]) else Fraction(0)
        return vals.get(o[1], Fraction(0))

    policy = {i: 0 for i in g.choice}
    while True:
        live = (g.can_reach(accept, policy) & live_all) if mode == "max" else live_all
        vals = g.evaluate(policy, live, accept)
        changed = False
        for i in live_all:
            opts = g.choice.get(i)
            if not opts:
                continue
            cur = option_value(opts[policy[i]], vals)
            for n, o in enumerate(opts):
                v = option_value(o, vals)
                if (v > cur) if mode == "max" else (v < cur):
                    policy[i], cur, changed = n, v, True
        if not changed:
            return vals.get(start, Fraction(0))


def _default_outcome(pts: PTS) -> Callable[[int], Hashable]:
    if pts.terms is None:
        return lambda i: pts.names[i]
    return lambda i: final_map(pts.terms[i])


def is_deterministic(pts: PTS, sigma: int = 0) -> bool:
    """Every reachable resolved state has at most one option (step or termination)."""
    for i in reachable(pts, sigma):
        d = pts.dist[i][sigma]
        if len(d) == 1 and d[0][0] == i:
            if len(set(pts.steps[i][sigma])) + pts.term[i][sigma] > 1:
                return False
    return True


def outcome_distribution(pts: PTS, *, sigma: int = 0, start: int | None = None,
                         outcome: Callable[[int], Hashable] | None = None) -> dict[Hashable, Fraction]:
    """Exact probability of each termination outcome in a system without nondeterminism.

    The missing mass (if any) is the probability of deadlock or divergence.
    """
    if not is_deterministic(pts, sigma):
        raise ValueError("the system has nondeterministic choices; use reach_probability with a mode")
    if outcome is None:
        outcome = _default_outcome(pts)
    g = _Game(pts, sigma, outcome)
    start = pts.root if start is None else start
    live = reachable(pts, sigma)
    terminal_any = g.can_reach(lambda o: True)
    live &= terminal_any
    if start not in live:
        return {}
    rows, rhs = {}, {}
    for i in live:
        if i in g.random:
            rows[i] = {j: p for j, p in g.random[i] if j in live}
            rhs[i] = {}
        else:
            opts = g.choice[i]
            o = opts[0]
            if o[0] == "term":
                rows[i], rhs[i] = {}, {o[1]: Fraction(1)}
            else:
                rows[i], rhs[i] = ({o[1]: Fraction(1)} if o[1] in live else {}), {}
    sol = _solve(rows, rhs)
    return dict(sorted(sol[start].items(), key=lambda kv: repr(kv[0])))
