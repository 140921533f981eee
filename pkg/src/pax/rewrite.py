"""Directed rewriting with the equational axioms.

:func:`normalize` rewrites a closed, recursion-free term innermost-first.
Children are normalised before the root, and every rule application is
recorded with its position, so replaying the trace from the input term
reproduces the output.

Normal forms are probabilistic choices over *sums* in canonical order.  A
sum is ``delta`` or a set of summands ``eps``, ``alpha``, ``alpha . P`` and
guarded versions of these.  Commutativity and associativity of ``+`` and
the symmetry of probabilistic choice are handled by sorting rather than by
rules, with identical summands merged and guards of summands with the same
body joined.  Conditions and data are compared by their meaning over the
finite data universe, which is how the implication rules are decided here.

The rule set is sound but deliberately incomplete, so :func:`prove_equal`
answers either "derived" or "unknown", never "not derivable".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .data import FALSE, TRUE, Or, Eq, Lit, conj_all, conj
from .pretty import pretty
from . import terms as T
from .terms import (
    Act, Alt, Assign, CMerge, Delta, Encap, Eval, Guard, Hide, LMerge,
    PAct, PChoice, Par, Proc, RecConst, RecVar, Seq, Tau, TermTest,
)


class RecursionPresentError(T.TermError):
    pass


class RewriteBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class RewriteStep:
    axiom: str
    position: tuple[int, ...]
    before: Proc
    after: Proc

    def __str__(self) -> str:
        pos = ".".join(map(str, self.position)) or "root"
        return f"{self.axiom} @ {pos}: {pretty(self.before)}  ->  {pretty(self.after)}"


@dataclass
class RewriteTrace:
    start: Proc
    steps: list[RewriteStep] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    @property
    def end(self) -> Proc:
        return self.replay()

    def replay(self) -> Proc:
        t = self.start
        for s in self.steps:
            here = subterm(t, s.position)
            if here is not s.before:
                raise ValueError(f"trace does not replay at step {s}")
            t = replace_at(t, s.position, s.after)
        return t

    def axioms(self) -> list[str]:
        return [s.axiom for s in self.steps]

    def __str__(self) -> str:
        return "\n".join(str(s) for s in self.steps)


def subterm(t: Proc, pos: tuple[int, ...]) -> Proc:
    for i in pos:
        t = t.children()[i]
    return t


def replace_at(t: Proc, pos: tuple[int, ...], new: Proc) -> Proc:
    if not pos:
        return new
    kids = list(t.children())
    kids[pos[0]] = replace_at(kids[pos[0]], pos[1:], new)
    return t.rebuild(kids)


_ATOMIC = (Act, PAct, Assign, Tau, Delta)        # constants other than eps
_ACTIONS = (Act, PAct, Assign, Tau)


def _is_prefix(t: Proc) -> bool:
    return isinstance(t, _ATOMIC)


class Rewriter:
    def __init__(self, ctx: T.Context | None = None, budget: int | None = None):
        self.ctx = ctx or T.Context()
        self.universe = self.ctx.universe
        self.budget = budget
        self._normal: set = set()
        self._ckeys: dict = {}
        self.steps: list[RewriteStep] = []

    # -- canonical comparison keys (modulo the data algebra) -------------------
    def ckey(self, t: Proc):
        k = self._ckeys.get(t)
        if k is not None:
            return k
        u = self.universe
        if isinstance(t, Act):
            k = ("a", t.name)
        elif isinstance(t, PAct):
            k = ("p", t.name, tuple(u.semantic_key(e) for e in t.args))
        elif isinstance(t, Assign):
            k = ("s", t.var, u.semantic_key(t.expr))
        elif isinstance(t, Guard):
            k = ("g", u.semantic_key(t.cond), self.ckey(t.body))
        elif isinstance(t, Alt):
            k = ("+",) + tuple(self.ckey(s) for s in _flatten_alt(t))
        elif isinstance(t, PChoice):
            k = ("pc", t.prob, self.ckey(t.left), self.ckey(t.right))
        elif isinstance(t, Eval):
            k = ("V", t.sigma.items_tuple(), self.ckey(t.body))
        elif isinstance(t, (Encap, Hide)):
            k = (type(t).__name__, tuple(sorted(repr(self.ctx.action_key(a)) for a in t.actions)),
                 self.ckey(t.body))
        elif isinstance(t, RecConst):
            k = ("rec", t.var, t.spec.name, id(t.spec))
        else:
            k = (type(t).__name__,) + tuple(self.ckey(c) for c in t.children())
        self._ckeys[t] = k
        return k

    def skey(self, t: Proc) -> str:
        return repr(self.ckey(t))

    def member(self, a: Proc, actions: frozenset) -> bool:
        k = self.ctx.action_key(a)
        return any(self.ctx.action_key(b) == k for b in actions)

    def _plain(self, t: Proc) -> bool:
        return _plain(t)

    def _may_terminate(self, t: Proc) -> bool:
        for s in _flatten_alt(t):
            while isinstance(s, Guard):
                s = s.body
            if s is T.EPS or not _plain(s):
                return True
        return False

    def _sync_safe(self, x: Proc, y: Proc) -> bool:
        """No pair of communicating parameterized actions whose arguments differ.

        Their communication is labelled with the left arguments, so swapping
        the operands, which the expansion does, would change labels."""
        px = [u for u in T.iter_subterms(x) if isinstance(u, PAct)]
        py = [u for u in T.iter_subterms(y) if isinstance(u, PAct)]
        for a in px:
            for b in py:
                if (self.ctx.comm(a.name, b.name) and len(a.args) == len(b.args)
                        and self.ckey(PAct("_", a.args)) != self.ckey(PAct("_", b.args))):
                    return False
        return True

    # -- driver --------------------------------------------------------------
    def _record(self, name: str, pos, before: Proc, after: Proc) -> None:
        self.steps.append(RewriteStep(name, pos, before, after))
        if self.budget is not None and len(self.steps) > self.budget:
            raise RewriteBudgetExceeded(
                f"rewriting exceeded {self.budget} steps; the rule set should terminate, please report")

    def norm(self, t: Proc, pos: tuple[int, ...] = ()) -> Proc:
        while True:
            if t in self._normal:
                return t
            if isinstance(t, (RecConst, RecVar)):
                raise RecursionPresentError("normalisation applies to recursion-free terms only")
            kids = t.children()
            if kids:
                new = [self.norm(c, pos + (i,)) for i, c in enumerate(kids)]
                if any(a is not b for a, b in zip(new, kids)):
                    t = t.rebuild(new)
            r = self.rule(t)
            if r is None:
                self._normal.add(t)
                return t
            name, t2 = r
            self._record(name, pos, t, t2)
            t = t2

    # -- root rules (children already normal) ----------------------------------
    def rule(self, t: Proc):
        if isinstance(t, Alt):
            return self._alt(t)
        if isinstance(t, Seq):
            return self._seq(t)
        if isinstance(t, PChoice):
            return self._pchoice(t)
        if isinstance(t, Par):
            return self._par(t)
        if isinstance(t, LMerge):
            return self._lmerge(t)
        if isinstance(t, CMerge):
            return self._cmerge(t)
        if isinstance(t, TermTest):
            return self._termtest(t)
        if isinstance(t, Encap):
            return self._encap(t)
        if isinstance(t, Hide):
            return self._hide(t)
        if isinstance(t, Guard):
            return self._guard(t)
        if isinstance(t, Eval):
            return self._eval(t)
        return None

    def _alt(self, t: Alt):
        x, y = t.left, t.right
        if isinstance(x, PChoice):
            return "pA5", PChoice(x.prob, Alt(x.left, y), Alt(x.right, y))
        if isinstance(y, PChoice):
            return "A1,pA5", PChoice(y.prob, Alt(x, y.left), Alt(x, y.right))
        return self._canon_sum(t)

    def _canon_sum(self, t: Proc):
        parts = _flatten_alt(t)
        names = []
        kept = [s for s in parts if s is not T.DELTA]
        if len(kept) < len(parts):
            names.append("A6")
        # join guards of summands with the same body; a summand that may start
        # with a probabilistic choice is never merged, since x + x = x fails for it
        groups: dict[str, list] = {}
        order = []
        for n, s in enumerate(kept):
            cond, body = (s.cond, s.body) if isinstance(s, Guard) else (TRUE, s)
            k = self.skey(body) if _plain(body) else f"#{n}"
            if k not in groups:
                groups[k] = [body, [], s]
                order.append(k)
            groups[k][1].append(cond)
        out = []
        for k in order:
            body, conds, first = groups[k]
            if len(conds) > 1:
                names.append("A3" if all(c is TRUE for c in conds) else "GC7")
            if any(self.universe.valid(c) for c in conds):
                out.append(body)
                continue
            uniq = []
            seen = set()
            for c in conds:
                ck = self.universe.semantic_key(c)
                if ck not in seen:
                    seen.add(ck)
                    uniq.append(c)
            cond = uniq[0]
            for c in uniq[1:]:
                cond = Or(cond, c)
            if self.universe.unsatisfiable(cond):
                names.append("GC2,A6")
                continue
            if self.universe.valid(cond):
                names.append("IMP2,GC1")
                out.append(body)
            else:
                out.append(Guard(cond, body) if len(conds) > 1 else first)
        out.sort(key=self.skey)
        result = T.build_altn(out)
        if result is t:
            return None
        names.append("A1,A2")
        return ",".join(dict.fromkeys(names)), result

    def _seq(self, t: Seq):
        x, y = t.left, t.right
        if x is T.EPS:
            return "A9", y
        if x is T.DELTA:
            return "A7", T.DELTA
        if y is T.EPS:
            return "A8", x
        if isinstance(x, PChoice):
            return "pA4", PChoice(x.prob, Seq(x.left, y), Seq(x.right, y))
        if isinstance(x, Alt):
            if _probabilistic(y) and self._may_terminate(x):
                return None     # A4 would resolve y once per summand
            return "A4", Alt(Seq(x.left, y), Seq(x.right, y))
        if isinstance(x, Seq):
            return "A5", Seq(x.left, Seq(x.right, y))
        if isinstance(x, Guard):
            return "GC5", Guard(x.cond, Seq(x.body, y))
        if _is_prefix(x):
            return self._branching(t)
        return None

    def _pchoice(self, t: PChoice):
        if t.prob == 1:
            return "pA6", t.left
        if t.prob == 0:
            return "pA1,pA6", t.right
        leaves = self._leaves(t)
        merged: dict[str, list] = {}
        for p, u in leaves:
            k = self.skey(u)
            if k in merged:
                merged[k][0] += p
            else:
                merged[k] = [p, u]
        entries = sorted(((p, u) for p, u in merged.values()), key=lambda e: self.skey(e[1]))
        result = T.build_prc(entries)
        if result is t:
            return None
        name = "pA3" if len(entries) < len(leaves) else "pA1,pA2"
        return name, result

    def _leaves(self, t: Proc, mass: Fraction = Fraction(1)) -> list:
        if isinstance(t, PChoice):
            return (self._leaves(t.left, mass * t.prob) + self._leaves(t.right, mass * (1 - t.prob)))
        return [(mass, t)] if mass else []

    def _par(self, t: Par):
        x, y = t.left, t.right
        if isinstance(x, PChoice):
            return "pCM1", PChoice(x.prob, Par(x.left, y), Par(x.right, y))
        if isinstance(y, PChoice):
            return "pCM2", PChoice(y.prob, Par(x, y.left), Par(x, y.right))
        if not (self._plain(x) and self._plain(y) and self._sync_safe(x, y)):
            return None
        return "CM1E'", Alt(Alt(Alt(LMerge(x, y), LMerge(y, x)), CMerge(x, y)),
                            Seq(TermTest(x), TermTest(y)))

    def _lmerge(self, t: LMerge):
        x, y = t.left, t.right
        if isinstance(x, PChoice):
            return "pCM3", PChoice(x.prob, LMerge(x.left, y), LMerge(x.right, y))
        if isinstance(y, PChoice):
            return "pCM4", PChoice(y.prob, LMerge(x, y.left), LMerge(x, y.right))
        if x is T.EPS:
            return "CM2E", T.DELTA
        if x is T.DELTA:
            return "A8,CM3,A7", T.DELTA
        if not _plain(y):
            return None         # y would be resolved once per copy
        if isinstance(x, Alt):
            return "CM4", Alt(LMerge(x.left, y), LMerge(x.right, y))
        if isinstance(x, Guard):
            return "GC8", Guard(x.cond, LMerge(x.body, y))
        if isinstance(x, Seq):
            return "CM3", Seq(x.left, Par(x.right, y))
        if _is_prefix(x):
            return "A8,CM3", Seq(x, Par(T.EPS, y))
        return None

    def _cmerge(self, t: CMerge):
        x, y = t.left, t.right
        if isinstance(x, PChoice):
            return "pCM5", PChoice(x.prob, CMerge(x.left, y), CMerge(x.right, y))
        if isinstance(y, PChoice):
            return "pCM6", PChoice(y.prob, CMerge(x, y.left), CMerge(x, y.right))
        if isinstance(x, Alt) and _plain(y):
            return "CM8", Alt(CMerge(x.left, y), CMerge(x.right, y))
        if isinstance(y, Alt) and _plain(x):
            return "CM9", Alt(CMerge(x, y.left), CMerge(x, y.right))
        if x is T.EPS:
            return "CM5E", T.DELTA
        if y is T.EPS:
            return "CM6E", T.DELTA
        if x is T.DELTA:
            return "CM10", T.DELTA
        if y is T.DELTA:
            return "CM11", T.DELTA
        if isinstance(x, Guard) and _plain(y):
            return "GC9", Guard(x.cond, CMerge(x.body, y))
        if isinstance(y, Guard) and _plain(x):
            return "GC10", Guard(y.cond, CMerge(x, y.body))
        hx, hy = _head(x), _head(y)
        if hx is None or hy is None:
            return None
        (a, x1), (b, y1) = hx, hy
        bare = not isinstance(x, Seq) and not isinstance(y, Seq)
        pre = "" if bare else ("A8," if not (isinstance(x, Seq) and isinstance(y, Seq)) else "")
        gamma = self.ctx.comm
        if isinstance(a, Assign):
            return pre + "CM7De", T.DELTA
        if isinstance(b, Assign):
            return pre + "CM7Df", T.DELTA
        if isinstance(a, PAct) and not isinstance(b, PAct):
            return pre + "CM7Dc", T.DELTA
        if isinstance(b, PAct) and not isinstance(a, PAct):
            return pre + "CM7Dd", T.DELTA
        if isinstance(a, PAct):
            c = gamma(a.name, b.name)
            if c is None or len(a.args) != len(b.args):
                return pre + "CM7Db", T.DELTA
            cond = conj_all(Eq(e, f) for e, f in zip(a.args, b.args))
            return pre + "CM7Da", Guard(cond, Seq(PAct(c, a.args), Par(x1, y1)))
        # plain actions, tau or delta: gamma is delta whenever tau or delta is involved
        c = gamma(a.name, b.name) if isinstance(a, Act) and isinstance(b, Act) else None
        if bare:
            return "CM12", Act(c) if c else T.DELTA
        return pre + "CM7", Seq(Act(c), Par(x1, y1)) if c else T.DELTA

    def _termtest(self, t: TermTest):
        x = t.body
        if x is T.EPS:
            return "TE1", T.EPS
        if _is_prefix(x):
            return "TE2", T.DELTA
        if isinstance(x, Alt):
            return "TE3", Alt(TermTest(x.left), TermTest(x.right))
        if isinstance(x, Seq):
            return "TE4", Seq(TermTest(x.left), TermTest(x.right))
        if isinstance(x, Guard):
            return "GC11", Guard(x.cond, TermTest(x.body))
        if isinstance(x, PChoice):
            return "pTE", PChoice(x.prob, TermTest(x.left), TermTest(x.right))
        return None

    def _encap(self, t: Encap):
        x, H = t.body, t.actions
        if x is T.EPS:
            return "D0", T.EPS
        if isinstance(x, _ACTIONS):
            if x is not T.TAU and self.member(x, H):
                return "D2", T.DELTA
            return "D1", x
        if x is T.DELTA:
            return "D1", T.DELTA
        if isinstance(x, Alt):
            return "D3", Alt(Encap(H, x.left), Encap(H, x.right))
        if isinstance(x, Seq):
            return "D4", Seq(Encap(H, x.left), Encap(H, x.right))
        if isinstance(x, Guard):
            return "GC12", Guard(x.cond, Encap(H, x.body))
        if isinstance(x, PChoice):
            return "pD", PChoice(x.prob, Encap(H, x.left), Encap(H, x.right))
        return None

    def _hide(self, t: Hide):
        x, I = t.body, t.actions
        if x is T.EPS:
            return "T0", T.EPS
        if isinstance(x, _ACTIONS):
            if x is not T.TAU and self.member(x, I):
                return "T2", T.TAU
            return "T1", x
        if x is T.DELTA:
            return "T1", T.DELTA
        if isinstance(x, Alt):
            return "T3", Alt(Hide(I, x.left), Hide(I, x.right))
        if isinstance(x, Seq):
            return "T4", Seq(Hide(I, x.left), Hide(I, x.right))
        if isinstance(x, Guard):
            return "GC13", Guard(x.cond, Hide(I, x.body))
        if isinstance(x, PChoice):
            return "pT", PChoice(x.prob, Hide(I, x.left), Hide(I, x.right))
        return None

    def _guard(self, t: Guard):
        phi, x = t.cond, t.body
        if self.universe.valid(phi):
            return ("GC1" if phi is TRUE else "IMP2,GC1"), x
        if self.universe.unsatisfiable(phi):
            return ("GC2" if phi is FALSE else "IMP2,GC2"), T.DELTA
        if x is T.DELTA:
            return "GC3", T.DELTA
        if isinstance(x, Alt):
            return "GC4", Alt(Guard(phi, x.left), Guard(phi, x.right))
        if isinstance(x, Guard):
            return "GC6", Guard(conj(phi, x.cond), x.body)
        return None

    def _eval(self, t: Eval):
        sigma, x = t.sigma, t.body
        u = self.universe
        if x is T.EPS:
            return "V0", T.EPS
        if x is T.DELTA:
            return "GC2,V6,GC2", T.DELTA
        if isinstance(x, Alt):
            return "V5", Alt(Eval(sigma, x.left), Eval(sigma, x.right))
        if isinstance(x, Guard):
            val = TRUE if u.sat(x.cond, sigma) else FALSE
            return "V6", Guard(val, Eval(sigma, x.body))
        if isinstance(x, PChoice):
            return "pV", PChoice(x.prob, Eval(sigma, x.left), Eval(sigma, x.right))
        head = _head(x)
        if head is None:
            return None
        a, rest = head
        pre = "A8," if not isinstance(x, Seq) else ""
        if a is T.TAU:
            return pre + "V1", Seq(a, Eval(sigma, rest))
        if isinstance(a, Act):
            return pre + "V2", Seq(a, Eval(sigma, rest))
        if isinstance(a, PAct):
            return pre + "V3", Seq(PAct(a.name, tuple(Lit(u.eval(e, sigma)) for e in a.args)), Eval(sigma, rest))
        if isinstance(a, Assign):
            d = u.eval(a.expr, sigma)
            return pre + "V4", Seq(Assign(a.var, Lit(d)), Eval(sigma.update(a.var, d), rest))
        return None

    # -- the branching axioms, applied under an action prefix -------------------
    def _branching(self, t: Seq):
        alpha, body = t.left, t.right
        leaves = self._leaves(body) if isinstance(body, PChoice) else [(Fraction(1), body)]
        for n, (p, leaf) in enumerate(leaves):
            new = self._be_leaf(leaf)
            if new is not None:
                name, repl = new
                rebuilt = T.build_prc([(q, repl if m == n else u) for m, (q, u) in enumerate(leaves)]) \
                    if len(leaves) > 1 else repl
                return name, Seq(alpha, rebuilt)
        return None

    def _be_leaf(self, leaf: Proc):
        parts = _flatten_alt(leaf)
        if not all(_plain(s) for s in parts):
            return None
        for i, s in enumerate(parts):
            if not (isinstance(s, Seq) and s.left is T.TAU and _plain(s.right)):
                continue
            target = s.right
            inner = {self.skey(v) for v in _flatten_alt(target)}
            if any(self.skey(o) not in inner for j, o in enumerate(parts) if j != i):
                continue
            if _normal_form(TermTest(target), self.ctx) is not T.DELTA:
                continue
            return "pBE", target
        return None


def _plain(t: Proc) -> bool:
    """Syntactic check that ``t`` never starts with a probabilistic choice."""
    while isinstance(t, Guard):
        t = t.body
    if t is T.EPS or _is_prefix(t):
        return True
    if isinstance(t, Seq):
        return _is_prefix(t.left)
    if isinstance(t, Alt):
        return _plain(t.left) and _plain(t.right)
    return False


def _probabilistic(t: Proc) -> bool:
    return not _plain(t)


def _flatten_alt(t: Proc) -> list:
    out = []
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Alt):
            stack.append(u.right)
            stack.append(u.left)
        else:
            out.append(u)
    return out


def _head(t: Proc):
    """``(alpha, rest)`` for ``alpha`` or ``alpha . rest`` with alpha a constant other than eps."""
    if _is_prefix(t):
        return t, T.EPS
    if isinstance(t, Seq) and _is_prefix(t.left):
        return t.left, t.right
    return None


def _normal_form(t: Proc, ctx: T.Context) -> Proc:
    return Rewriter(ctx).norm(t)


def default_budget(t: Proc) -> int:
    n = t.size
    return max(10 * n * n, 200_000)


def normalize(t: Proc, ctx: T.Context | None = None, budget: int | None = None) -> tuple[Proc, RewriteTrace]:
    """Normal form of a closed recursion-free term and the rewrite trace reaching it."""
    if T.contains_recursion(t):
        raise RecursionPresentError("normalisation applies to recursion-free terms only")
    rw = Rewriter(ctx, budget if budget is not None else default_budget(t))
    nf = rw.norm(t)
    return nf, RewriteTrace(t, rw.steps)


@dataclass
class ProofVerdict:
    derived: bool
    reason: str = ""
    normal_forms: tuple[Proc, Proc] | None = None
    traces: tuple[RewriteTrace, RewriteTrace] | None = None

    @property
    def verdict(self) -> str:
        return "derived" if self.derived else "unknown"

    def __bool__(self) -> bool:
        return self.derived

    def __str__(self) -> str:
        return f"{self.verdict}: {self.reason}" if self.reason else self.verdict


def prove_equal(t1: Proc, t2: Proc, ctx: T.Context | None = None) -> ProofVerdict:
    """Try to derive ``t1 = t2`` by rewriting both sides to a common normal form."""
    if T.contains_recursion(t1) or T.contains_recursion(t2):
        return ProofVerdict(False, "recursion constants are outside the scope of the rewriter")
    ctx = ctx or T.Context()
    n1, tr1 = normalize(t1, ctx)
    n2, tr2 = normalize(t2, ctx)
    rw = Rewriter(ctx)
    if rw.ckey(n1) == rw.ckey(n2):
        return ProofVerdict(True, f"both sides rewrite to {pretty(n1)}", (n1, n2), (tr1, tr2))
    return ProofVerdict(False, f"normal forms differ: {pretty(n1)} and {pretty(n2)}", (n1, n2), (tr1, tr2))


__all__ = ["normalize", "prove_equal", "RewriteTrace", "RewriteStep", "ProofVerdict",
           "RecursionPresentError", "RewriteBudgetExceeded", "Rewriter", "subterm", "replace_at"]
