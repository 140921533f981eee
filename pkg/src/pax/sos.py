"""Structural operational semantics: action steps, termination, distributions.

An :class:`Engine` evaluates the three relations of the semantics for a
closed term under an evaluation map.  Probability is represented by exact
distributions (dicts from terms to :class:`~fractions.Fraction`) whose
support is the set of targets with positive mass; everything outside the
support has mass zero.

Results are memoised on ``(term, sigma restricted to the term's free
flexible variables)`` so terms that do not read the ambient map share one
entry across all maps.

A term whose distribution would be a point mass on a *different* term is a
probabilistic choice whose branches coincide (``a ⊞ a``, ``a ⊞₁ b``) or a
recursion constant standing for its unfolding.  Such terms are resolved to
themselves and inherit the steps of the coinciding term; see
:meth:`Engine.distribution`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .data import EMPTY_MAP, EvalMap, Lit, UndeclaredVariableError
from . import terms as T
from .terms import (
    Act, Alt, Assign, CMerge, Context, Delta, Encap, Eps, Eval, Guard, Hide,
    LMerge, PAct, PChoice, Par, Proc, RecConst, RecVar, Seq, Tau, TermTest,
)

ONE = Fraction(1)

Distribution = dict  # Proc -> Fraction, read-only by convention


class InvalidTermError(T.TermError):
    pass


@dataclass(frozen=True)
class StepSet:
    steps: tuple[tuple[Proc, Proc], ...]
    terminating: bool

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)


class Engine:
    """Memoising evaluator of the transition relations for one context."""

    def __init__(self, ctx: Context | None = None):
        self.ctx = ctx or Context()
        self.universe = self.ctx.universe
        self._dist: dict = {}
        self._steps: dict = {}
        self._term: dict = {}
        self._alias: dict = {}
        self._hkeys: dict = {}
        self._fvs: dict = {}

    # -- memo keys -----------------------------------------------------------
    def _key(self, t: Proc, sigma: Mapping[str, int]):
        fv = T.free_flex_vars(t)
        if not fv:
            return (t, None)
        names = self._fvs.get(fv)
        if names is None:
            names = self._fvs[fv] = tuple(sorted(fv))
        try:
            return (t, tuple(sigma[v] for v in names))
        except KeyError as exc:
            raise UndeclaredVariableError(
                f"flexible variable {exc.args[0]!r} has no value in {sigma}") from None

    # -- the probability relation ----------------------------------------------
    def distribution(self, sigma: Mapping[str, int], t: Proc) -> Distribution:
        """``P_sigma(t, .)`` restricted to its support."""
        key = self._key(t, sigma)
        d = self._dist.get(key)
        if d is None:
            d = self._compute_dist(sigma, t, key)
            self._dist[key] = d
        return d

    def is_resolved(self, sigma, t: Proc) -> bool:
        """``t`` moves to itself with probability one."""
        return len(self.distribution(sigma, t)) == 1

    def _compute_dist(self, sigma, t: Proc, key) -> Distribution:
        if isinstance(t, (Act, PAct, Assign, Tau, Delta, Eps)):
            return {t: ONE}
        if isinstance(t, Alt):
            return self._product(sigma, t, Alt)
        if isinstance(t, Par):
            return self._product(sigma, t, Par)
        if isinstance(t, LMerge):
            return self._product(sigma, t, LMerge)
        if isinstance(t, CMerge):
            return self._product(sigma, t, CMerge)
        if isinstance(t, Seq):
            dx = self.distribution(sigma, t.left)
            if len(dx) == 1 and not self.terminates(sigma, t.left):
                return {t: ONE}
            out: dict = {}
            for x1, p in dx.items():
                if self.terminates(sigma, x1):
                    for y1, q in self.distribution(sigma, t.right).items():
                        _add(out, Seq(x1, y1), p * q)
                else:
                    _add(out, Seq(x1, t.right), p)
            return out
        if isinstance(t, (TermTest, Encap, Hide)):
            dx = self.distribution(sigma, t.body)
            if len(dx) == 1:
                return {t: ONE}
            return {t.rebuild([x1]): p for x1, p in dx.items()}
        if isinstance(t, PChoice):
            u = _sole_branch(t)
            if u is not None:
                # every branch of positive weight is u: behave exactly as u
                self._alias[key] = u
                du = self.distribution(sigma, u)
                return {t: ONE} if len(du) == 1 else du
            out = {}
            pi = t.prob
            if pi:
                for x1, p in self.distribution(sigma, t.left).items():
                    _add(out, x1, pi * p)
            if pi != 1:
                for y1, q in self.distribution(sigma, t.right).items():
                    _add(out, y1, (1 - pi) * q)
            return self._collapse(t, key, out)
        if isinstance(t, Guard):
            if not self.universe.sat(t.cond, sigma):
                return {t: ONE}
            dx = self.distribution(sigma, t.body)
            if len(dx) == 1:
                return {t: ONE}
            return {Guard(t.cond, x1): p for x1, p in dx.items()}
        if isinstance(t, Eval):
            dx = self.distribution(t.sigma, t.body)
            if len(dx) == 1:
                return {t: ONE}
            return {Eval(t.sigma, x1): p for x1, p in dx.items()}
        if isinstance(t, RecConst):
            return self._collapse(t, key, dict(self.distribution(sigma, T.unfold(t.var, t.spec))))
        if isinstance(t, RecVar):
            raise InvalidTermError(f"open term: recursion variable {t.name} outside its specification")
        raise InvalidTermError(f"not a process term: {t!r}")

    def _product(self, sigma, t, op) -> Distribution:
        dx = self.distribution(sigma, t.left)
        dy = self.distribution(sigma, t.right)
        if len(dx) == 1 and len(dy) == 1:
            return {t: ONE}
        out: dict = {}
        for x1, p in dx.items():
            for y1, q in dy.items():
                _add(out, op(x1, y1), p * q)
        return out

    def _collapse(self, t: Proc, key, out: dict) -> Distribution:
        if len(out) == 1:
            (u,) = out
            if u is not t:
                self._alias[key] = u
            return {t: ONE}
        return out

    # -- termination -------------------------------------------------------
    def terminates(self, sigma: Mapping[str, int], t: Proc) -> bool:
        key = self._key(t, sigma)
        r = self._term.get(key)
        if r is None:
            r = self._compute_term(sigma, t, key)
            self._term[key] = r
        return r

    def _compute_term(self, sigma, t: Proc, key) -> bool:
        if isinstance(t, Eps):
            return True
        if isinstance(t, (Act, PAct, Assign, Tau, Delta)):
            return False
        if isinstance(t, Alt):
            x, y = t.left, t.right
            return ((self.terminates(sigma, x) and self.is_resolved(sigma, y))
                    or (self.is_resolved(sigma, x) and self.terminates(sigma, y)))
        if isinstance(t, (Seq, Par)):
            return self.terminates(sigma, t.left) and self.terminates(sigma, t.right)
        if isinstance(t, (LMerge, CMerge)):
            return False
        if isinstance(t, (TermTest, Encap, Hide)):
            return self.terminates(sigma, t.body)
        if isinstance(t, Guard):
            return self.universe.sat(t.cond, sigma) and self.terminates(sigma, t.body)
        if isinstance(t, Eval):
            return self.terminates(t.sigma, t.body)
        if isinstance(t, (PChoice, RecConst)):
            u = self._resolve_alias(sigma, t, key)
            if u is None:
                return False if isinstance(t, PChoice) else self.terminates(sigma, T.unfold(t.var, t.spec))
            return self.terminates(sigma, u)
        if isinstance(t, RecVar):
            raise InvalidTermError(f"open term: recursion variable {t.name} outside its specification")
        raise InvalidTermError(f"not a process term: {t!r}")

    def _resolve_alias(self, sigma, t, key):
        self.distribution(sigma, t)
        return self._alias.get(key)

    # -- action steps ------------------------------------------------------
    def steps(self, sigma: Mapping[str, int], t: Proc) -> tuple[tuple[Proc, Proc], ...]:
        key = self._key(t, sigma)
        r = self._steps.get(key)
        if r is None:
            r = tuple(self._compute_steps(sigma, t, key))
            self._steps[key] = r
        return r

    def action_steps(self, sigma: Mapping[str, int], t: Proc) -> StepSet:
        return StepSet(self.steps(sigma, t), self.terminates(sigma, t))

    def _compute_steps(self, sigma, t: Proc, key) -> list:
        if isinstance(t, (Act, PAct, Assign, Tau)):
            return [(t, T.EPS)]
        if isinstance(t, (Delta, Eps, TermTest)):
            return []
        if isinstance(t, Alt):
            x, y = t.left, t.right
            out = []
            if self.is_resolved(sigma, y):
                out.extend(self.steps(sigma, x))
            if self.is_resolved(sigma, x):
                out.extend(self.steps(sigma, y))
            return out
        if isinstance(t, Seq):
            out = [(a, Seq(x1, t.right)) for a, x1 in self.steps(sigma, t.left)]
            if self.terminates(sigma, t.left):
                out.extend(self.steps(sigma, t.right))
            return out
        if isinstance(t, Par):
            x, y = t.left, t.right
            out = []
            if self.is_resolved(sigma, y):
                out.extend((a, Par(x1, y)) for a, x1 in self.steps(sigma, x))
            if self.is_resolved(sigma, x):
                out.extend((a, Par(x, y1)) for a, y1 in self.steps(sigma, y))
            out.extend(self._sync(sigma, x, y))
            return out
        if isinstance(t, LMerge):
            return [(a, Par(x1, t.right)) for a, x1 in self.steps(sigma, t.left)]
        if isinstance(t, CMerge):
            return self._sync(sigma, t.left, t.right)
        if isinstance(t, Encap):
            hk = self._set_keys(t.actions)
            return [(a, Encap(t.actions, x1)) for a, x1 in self.steps(sigma, t.body)
                    if a is T.TAU or self.ctx.action_key(a) not in hk]
        if isinstance(t, Hide):
            ik = self._set_keys(t.actions)
            return [(T.TAU if a is not T.TAU and self.ctx.action_key(a) in ik else a, Hide(t.actions, x1))
                    for a, x1 in self.steps(sigma, t.body)]
        if isinstance(t, Guard):
            if self.universe.sat(t.cond, sigma):
                return list(self.steps(sigma, t.body))
            return []
        if isinstance(t, Eval):
            return [self._eval_step(t.sigma, a, x1) for a, x1 in self.steps(t.sigma, t.body)]
        if isinstance(t, PChoice):
            u = self._resolve_alias(sigma, t, key)
            return list(self.steps(sigma, u)) if u is not None else []
        if isinstance(t, RecConst):
            u = self._resolve_alias(sigma, t, key)
            return list(self.steps(sigma, u if u is not None else T.unfold(t.var, t.spec)))
        if isinstance(t, RecVar):
            raise InvalidTermError(f"open term: recursion variable {t.name} outside its specification")
        raise InvalidTermError(f"not a process term: {t!r}")

    def _set_keys(self, actions: frozenset) -> frozenset:
        r = self._hkeys.get(actions)
        if r is None:
            r = self._hkeys[actions] = frozenset(self.ctx.action_key(a) for a in actions)
        return r

    def _eval_step(self, sigma: EvalMap, a: Proc, x1: Proc):
        u = self.universe
        if isinstance(a, PAct):
            return PAct(a.name, tuple(Lit(_nat(u.eval(e, sigma))) for e in a.args)), Eval(sigma, x1)
        if isinstance(a, Assign):
            d = _nat(u.eval(a.expr, sigma))
            return Assign(a.var, Lit(d)), Eval(sigma.update(a.var, d), x1)
        return a, Eval(sigma, x1)

    def _sync(self, sigma, x: Proc, y: Proc) -> list:
        sx = [s for s in self.steps(sigma, x) if isinstance(s[0], (Act, PAct))]
        if not sx:
            return []
        sy = [s for s in self.steps(sigma, y) if isinstance(s[0], (Act, PAct))]
        out = []
        gamma = self.ctx.comm
        for a, x1 in sx:
            for b, y1 in sy:
                c = gamma(a.name, b.name)
                if c is None:
                    continue
                if isinstance(a, Act) and isinstance(b, Act):
                    out.append((Act(c), Par(x1, y1)))
                elif isinstance(a, PAct) and isinstance(b, PAct) and len(a.args) == len(b.args):
                    u = self.universe
                    if all(_same(u.eval(e, sigma), u.eval(f, sigma)) for e, f in zip(a.args, b.args)):
                        out.append((PAct(c, a.args), Par(x1, y1)))
        return out

    # -- debugging -----------------------------------------------------------
    def dump(self, sigma, t: Proc) -> str:
        from .pretty import pretty
        from .meadow import format_rational
        d = self.distribution(sigma, t)
        lines = [f"{format_rational(p)} : {pretty(u)}" for u, p in sorted(d.items(), key=lambda kv: pretty(kv[0]))]
        steps = sorted(self.steps(sigma, t), key=lambda s: (pretty(s[1]), pretty(s[0])))
        lines += [f"--{pretty(a)}--> {pretty(u)}" for a, u in steps]
        if self.terminates(sigma, t):
            lines.append("terminates")
        return "\n".join(lines)


def _sole_branch(t: PChoice) -> Proc | None:
    """The only term reached with positive weight through nested choices, if unique."""
    found = None
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, PChoice):
            if u.prob:
                stack.append(u.left)
            if u.prob != 1:
                stack.append(u.right)
        elif found is None:
            found = u
        elif u is not found:
            return None
    return found


def _add(d: dict, k, v: Fraction) -> None:
    if v:
        d[k] = d.get(k, 0) + v


def _same(a, b) -> bool:
    return type(a) is type(b) and a == b


def _nat(v) -> int:
    if isinstance(v, bool):
        raise T.TermError("boolean value where a natural number was expected")
    return v


# -- module-level conveniences ---------------------------------------------

def distribution(sigma: Mapping[str, int], t: Proc, ctx: Context | None = None) -> Distribution:
    return Engine(ctx).distribution(sigma, t)


def action_steps(sigma: Mapping[str, int], t: Proc, ctx: Context | None = None) -> StepSet:
    return Engine(ctx).action_steps(sigma, t)


def terminates(sigma: Mapping[str, int], t: Proc, ctx: Context | None = None) -> bool:
    return Engine(ctx).terminates(sigma, t)


__all__ = ["Engine", "StepSet", "Distribution", "InvalidTermError",
           "distribution", "action_steps", "terminates", "EMPTY_MAP"]
