"""Seeded random generators for terms, conditions, specifications and systems.

Used by the property tests and by ``pax selftest``.  Everything is driven by
a :class:`random.Random`, so a seed reproduces a campaign exactly.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import data as D
from . import terms as T
from .data import EvalMap
from .pts import PTS

PROBS = (Fraction(0), Fraction(1), Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1, 4),
         Fraction(3, 4), Fraction(1, 6))


def campaign_context(bound: int = 2, variables: tuple[str, ...] = ("v",)) -> T.Context:
    """Basic actions a, b, c with gamma(a, b) = c and unary d, e, f with gamma(d, e) = f."""
    comm = T.CommFunction({("a", "b"): "c", ("d", "e"): "f"}, symmetric=True)
    return T.Context(comm, D.DataUniverse(bound), tuple(variables),
                     {"a": {0}, "b": {0}, "c": {0}, "d": {1}, "e": {1}, "f": {1}})


@dataclass
class TermGen:
    rng: random.Random
    ctx: T.Context = field(default_factory=campaign_context)
    basic: tuple[str, ...] = ("a", "b", "c")
    unary: tuple[str, ...] = ("d", "e")
    recursion: bool = False
    _specs: int = 0

    @property
    def variables(self) -> tuple[str, ...]:
        return self.ctx.variables

    @property
    def bound(self) -> int:
        return self.ctx.universe.bound

    # -- data ------------------------------------------------------------------
    def data(self, depth: int = 1) -> D.DataTerm:
        r = self.rng
        if depth <= 0 or r.random() < 0.5:
            if self.variables and r.random() < 0.5:
                return D.Var(r.choice(self.variables))
            return D.Lit(r.randint(0, self.bound))
        op = r.choice(("+", "-", "*", "/"))
        return D.App(op, (self.data(depth - 1), self.data(depth - 1)))

    def cond(self, depth: int = 2) -> D.Cond:
        r = self.rng
        if depth <= 0:
            return D.Eq(self.data(1), self.data(1))
        k = r.random()
        if k < 0.1:
            return D.TRUE
        if k < 0.15:
            return D.FALSE
        if k < 0.55:
            return D.Eq(self.data(1), self.data(1))
        if k < 0.7:
            return D.Not(self.cond(depth - 1))
        if k < 0.9:
            return D.Or(self.cond(depth - 1), self.cond(depth - 1))
        return D.Exists("_q", D.Eq(D.BVar("_q"), self.data(1)))

    def prob(self, proper: bool = False) -> Fraction:
        choices = PROBS[2:] if proper else PROBS
        return self.rng.choice(choices)

    def evalmap(self) -> EvalMap:
        return EvalMap({v: self.rng.randint(0, self.bound) for v in self.variables})

    # -- actions ------------------------------------------------------------------
    def basic_action(self) -> T.Proc:
        return T.Act(self.rng.choice(self.basic))

    def action(self) -> T.Proc:
        """An element of the action terms: basic, parameterized or assignment."""
        r = self.rng.random()
        if r < 0.55:
            return self.basic_action()
        if r < 0.8 or not self.variables:
            return T.PAct(self.rng.choice(self.unary), (self.data(1),))
        return T.Assign(self.rng.choice(self.variables), self.data(1))

    def alpha(self) -> T.Proc:
        """An action term, tau or delta."""
        r = self.rng.random()
        if r < 0.15:
            return T.TAU
        if r < 0.22:
            return T.DELTA
        return self.action()

    def action_set(self) -> frozenset:
        pool = [T.Act(n) for n in self.basic] + [T.PAct(n, (D.Lit(k),)) for n in self.unary
                                                 for k in range(self.bound + 1)]
        if self.variables:
            pool.append(T.Assign(self.variables[0], D.Lit(0)))
        k = self.rng.randint(1, 3)
        return frozenset(self.rng.sample(pool, k))

    # -- process terms ------------------------------------------------------------
    def leaf(self) -> T.Proc:
        r = self.rng.random()
        if r < 0.12:
            return T.EPS
        if r < 0.2:
            return T.DELTA
        if r < 0.32:
            return T.TAU
        if self.recursion and r < 0.38:
            return self.rec_const()
        return self.action()

    def term(self, depth: int = 3) -> T.Proc:
        r = self.rng
        if depth <= 0 or r.random() < 0.2:
            return self.leaf()
        k = r.random()
        d = depth - 1
        if k < 0.2:
            return T.Alt(self.term(d), self.term(d))
        if k < 0.4:
            return T.Seq(self.term(d), self.term(d))
        if k < 0.55:
            return T.PChoice(self.prob(), self.term(d), self.term(d))
        if k < 0.63:
            return T.Par(self.term(d), self.term(d))
        if k < 0.68:
            return T.LMerge(self.term(d), self.term(d))
        if k < 0.73:
            return T.CMerge(self.term(d), self.term(d))
        if k < 0.81:
            return T.Guard(self.cond(1), self.term(d))
        if k < 0.85:
            return T.TermTest(self.term(d))
        if k < 0.89:
            return T.Encap(self.action_set(), self.term(d))
        if k < 0.93:
            return T.Hide(self.action_set(), self.term(d))
        return T.Eval(self.evalmap(), self.term(d))

    def context(self, depth: int = 2) -> Callable[[T.Proc], T.Proc]:
        """A random one-hole context, returned as the function filling the hole."""
        r = self.rng
        if depth <= 0:
            return lambda x: x
        inner = self.context(depth - 1)
        s = self.term(2)
        k = r.randrange(13)
        if k == 0:
            return lambda x: T.Alt(inner(x), s)
        if k == 1:
            return lambda x: T.Alt(s, inner(x))
        if k == 2:
            return lambda x: T.Seq(inner(x), s)
        if k == 3:
            return lambda x: T.Seq(s, inner(x))
        if k in (4, 5):
            p = self.prob()
            return (lambda x: T.PChoice(p, inner(x), s)) if k == 4 else (lambda x: T.PChoice(p, s, inner(x)))
        if k == 6:
            return lambda x: T.Par(inner(x), s)
        if k == 7:
            return lambda x: T.LMerge(inner(x), s)
        if k == 8:
            return lambda x: T.CMerge(s, inner(x))
        if k == 9:
            c = self.cond(1)
            return lambda x: T.Guard(c, inner(x))
        if k == 10:
            h = self.action_set()
            return lambda x: T.Encap(h, inner(x))
        if k == 11:
            h = self.action_set()
            return lambda x: T.Hide(h, inner(x))
        m = self.evalmap()
        return lambda x: T.Eval(m, inner(x))

    def summand_term(self, depth: int = 2) -> T.Proc:
        """A term that can never be probabilistic at the root: a sum of prefixed or
        guarded summands.  Such terms satisfy ``x = x + x``."""
        r = self.rng
        parts = []
        for _ in range(r.randint(1, 2)):
            k = r.random()
            if k < 0.15:
                s = T.EPS
            elif k < 0.55 or depth <= 0:
                s = self.alpha()
            else:
                s = T.Seq(self.alpha(), self.term(depth - 1))
            if r.random() < 0.2:
                s = T.Guard(self.cond(1), s)
            parts.append(s)
        return T.build_altn(parts)

    def nonterminating_summand_term(self, depth: int = 2) -> T.Proc:
        """Like :meth:`summand_term` but never terminating immediately."""
        r = self.rng
        parts = []
        for _ in range(r.randint(1, 2)):
            a = self.alpha()
            s = a if depth <= 0 or r.random() < 0.4 else T.Seq(a, self.term(depth - 1))
            if r.random() < 0.2:
                s = T.Guard(self.cond(1), s)
            parts.append(s)
        return T.build_altn(parts)

    # -- recursion --------------------------------------------------------------------
    def linear_spec(self, n_vars: int | None = None, name: str | None = None) -> T.RecSpec:
        r = self.rng
        n = n_vars or r.randint(1, 3)
        names = [f"X{i}" for i in range(n)]
        while True:
            eqs = [(x, self.linear_rhs(names)) for x in names]
            if name is None:
                self._specs += 1
                spec_name = f"G{self._specs}"
            else:
                spec_name = name
            spec = T.RecSpec(spec_name, tuple(eqs))
            if T.is_guarded_spec(spec):
                return spec

    def linear_rhs(self, names: list[str]) -> T.Proc:
        r = self.rng
        if r.random() < 0.05:
            return T.DELTA

        def summand():
            phi = self.cond(1) if r.random() < 0.3 else D.TRUE
            if r.random() < 0.2:
                return T.Guard(phi, T.EPS)
            a = T.TAU if r.random() < 0.15 else self.action()
            return T.Guard(phi, T.Seq(a, T.RecVar(r.choice(names))))

        def sum_():
            return T.build_altn([summand() for _ in range(r.randint(1, 2))])

        if r.random() < 0.35:
            return T.PChoice(self.prob(proper=True), sum_(), sum_())
        return sum_()

    def rec_const(self) -> T.RecConst:
        spec = self.linear_spec()
        return T.RecConst(self.rng.choice(spec.variables), spec)


# -- random probabilistic transition systems ------------------------------------------

def random_pts(rng: random.Random, max_states: int = 6, labels: tuple[str, ...] = ("tau", "a", "b"),
               n_sigmas: int | None = None) -> PTS:
    """A small system shaped like those the semantics produces: under each map a
    state either resolves a probabilistic choice into resolved states, or is
    resolved and offers action steps and termination."""
    n = rng.randint(1, max_states)
    m = n_sigmas or rng.choice((1, 1, 2))
    kinds = [[n > 1 and rng.random() < 0.3 for _ in range(m)] for _ in range(n)]
    for k in range(m):
        if all(kinds[i][k] for i in range(n)):
            kinds[0][k] = False
    dist, steps, term = [], [], []
    for i in range(n):
        drow, srow, trow = [], [], []
        for k in range(m):
            pool = [j for j in range(n) if not kinds[j][k]]
            if kinds[i][k]:
                targets = rng.sample(pool, rng.randint(1, min(3, len(pool))))
                weights = [rng.randint(1, 3) for _ in targets]
                total = sum(weights)
                drow.append(tuple(sorted((j, Fraction(w, total)) for j, w in zip(targets, weights))))
                srow.append(())
                trow.append(False)
            else:
                drow.append(((i, Fraction(1)),))
                edges = {(rng.randrange(len(labels)), rng.randrange(n)) for _ in range(rng.randint(0, 3))}
                srow.append(tuple(sorted(edges)))
                trow.append(rng.random() < 0.3)
        dist.append(drow)
        steps.append(srow)
        term.append(trow)
    sigmas = [EvalMap({"v": k}) for k in range(m)] if m > 1 else [D.EMPTY_MAP]
    return PTS([f"s{i}" for i in range(n)], sigmas, list(labels), dist, steps, term,
               roots=[0], tau=labels.index("tau") if "tau" in labels else None)


def all_evalmaps(ctx: T.Context) -> list[EvalMap]:
    names = ctx.variables
    return [EvalMap(zip(names, vals)) for vals in itertools.product(ctx.universe.values, repeat=len(names))]


__all__ = ["TermGen", "campaign_context", "random_pts", "all_evalmaps", "PROBS"]
