"""The axiom schemas as instance generators, for soundness testing.

Each :class:`Axiom` produces random instances ``(lhs, rhs, premises)``.
Premises are equations that must hold for a conditional axiom to apply;
:func:`check_axiom` verifies them with the bisimulation checker before it
counts an instance, so conditional axioms are only exercised on witnesses
that really satisfy their antecedents.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from . import data as D
from . import meadow
from . import terms as T
from .bisim import rooted_equivalent
from .gen import TermGen
from .pts import BudgetExceeded
from .terms import (Alt, Assign, CMerge, Encap, Eval, Guard, Hide, LMerge, PAct, PChoice, Par, Seq,
                    TermTest, DELTA, EPS, TAU)


class NoInstance(Exception):
    """The generator could not meet a side condition this time."""


@dataclass(frozen=True)
class Instance:
    lhs: T.Proc
    rhs: T.Proc
    premises: tuple[tuple[T.Proc, T.Proc], ...] = ()


@dataclass(frozen=True)
class Axiom:
    name: str
    table: str
    make: Callable[[TermGen, int], Instance] = field(repr=False)
    conditional: bool = False

    def instance(self, g: TermGen, depth: int = 2) -> Instance:
        return self.make(g, depth)


AXIOMS: list[Axiom] = []


def axiom(name: str, table: str, conditional: bool = False):
    def deco(fn):
        AXIOMS.append(Axiom(name, table, fn, conditional))
        return fn
    return deco


def _eq(lhs, rhs, *premises) -> Instance:
    return Instance(lhs, rhs, tuple(premises))


def _gamma(g: TermGen, a: str, b: str) -> T.Proc:
    c = g.ctx.comm(a, b)
    return T.Act(c) if c else DELTA


def _x(g: TermGen, d: int) -> T.Proc:
    return g.term(d)


# -- part 1 ------------------------------------------------------------------------

P1, P2, DEP, REC = "part 1", "part 2", "data", "recursion"

@axiom("A1", P1)
def _a1(g, d):
    x, y = _x(g, d), _x(g, d)
    return _eq(Alt(x, y), Alt(y, x))


@axiom("A2", P1)
def _a2(g, d):
    x, y, z = _x(g, d), _x(g, d), _x(g, d)
    return _eq(Alt(Alt(x, y), z), Alt(x, Alt(y, z)))


@axiom("A3'", P1)
def _a3(g, d):
    a = g.alpha()
    return _eq(Alt(a, a), a)


@axiom("A3''", P1)
def _a3e(g, d):
    return _eq(Alt(EPS, EPS), EPS)


@axiom("A4", P1)
def _a4(g, d):
    x, y, z = _x(g, d), _x(g, d), _x(g, d)
    return _eq(Seq(Alt(x, y), z), Alt(Seq(x, z), Seq(y, z)))


@axiom("A5", P1)
def _a5(g, d):
    x, y, z = _x(g, d), _x(g, d), _x(g, d)
    return _eq(Seq(Seq(x, y), z), Seq(x, Seq(y, z)))


@axiom("A6", P1)
def _a6(g, d):
    x = _x(g, d)
    return _eq(Alt(x, DELTA), x)


@axiom("A7", P1)
def _a7(g, d):
    return _eq(Seq(DELTA, _x(g, d)), DELTA)


@axiom("A8", P1)
def _a8(g, d):
    x = _x(g, d)
    return _eq(Seq(x, EPS), x)


@axiom("A9", P1)
def _a9(g, d):
    x = _x(g, d)
    return _eq(Seq(EPS, x), x)


@axiom("CM1E'", P1, conditional=True)
def _cm1(g, d):
    x, y = g.summand_term(d - 1), g.summand_term(d - 1)
    return _eq(Par(x, y), Alt(Alt(Alt(LMerge(x, y), LMerge(y, x)), CMerge(x, y)), Seq(TermTest(x), TermTest(y))),
               (x, Alt(x, x)), (y, Alt(y, y)))


@axiom("CM2E", P1)
def _cm2(g, d):
    return _eq(LMerge(EPS, _x(g, d)), DELTA)


@axiom("CM3", P1)
def _cm3(g, d):
    a, x, y = g.alpha(), _x(g, d), _x(g, d)
    return _eq(LMerge(Seq(a, x), y), Seq(a, Par(x, y)))


@axiom("CM4", P1)
def _cm4(g, d):
    x, y, z = _x(g, d), _x(g, d), _x(g, d)
    return _eq(LMerge(Alt(x, y), z), Alt(LMerge(x, z), LMerge(y, z)))


@axiom("CM5E", P1)
def _cm5(g, d):
    return _eq(CMerge(EPS, _x(g, d)), DELTA)


@axiom("CM6E", P1)
def _cm6(g, d):
    return _eq(CMerge(_x(g, d), EPS), DELTA)


def _basic_or_silent(g: TermGen) -> T.Proc:
    r = g.rng.random()
    return TAU if r < 0.15 else DELTA if r < 0.25 else g.basic_action()


def _comm_const(g: TermGen, a: T.Proc, b: T.Proc) -> T.Proc:
    if isinstance(a, T.Act) and isinstance(b, T.Act):
        return _gamma(g, a.name, b.name)
    return DELTA


@axiom("CM7", P1)
def _cm7(g, d):
    a, b = _basic_or_silent(g), _basic_or_silent(g)
    if g.rng.random() < 0.6:
        a, b = T.Act("a"), T.Act("b")
    x, y = _x(g, d), _x(g, d)
    return _eq(CMerge(Seq(a, x), Seq(b, y)), Seq(_comm_const(g, a, b), Par(x, y)))


@axiom("CM8", P1)
def _cm8(g, d):
    x, y, z = _x(g, d), _x(g, d), _x(g, d)
    return _eq(CMerge(Alt(x, y), z), Alt(CMerge(x, z), CMerge(y, z)))


@axiom("CM9", P1)
def _cm9(g, d):
    x, y, z = _x(g, d), _x(g, d), _x(g, d)
    return _eq(CMerge(x, Alt(y, z)), Alt(CMerge(x, y), CMerge(x, z)))


@axiom("CM10", P1)
def _cm10(g, d):
    return _eq(CMerge(DELTA, _x(g, d)), DELTA)


@axiom("CM11", P1)
def _cm11(g, d):
    return _eq(CMerge(_x(g, d), DELTA), DELTA)


@axiom("CM12", P1)
def _cm12(g, d):
    a, b = _basic_or_silent(g), _basic_or_silent(g)
    if g.rng.random() < 0.6:
        a, b = T.Act("b"), T.Act("a")
    return _eq(CMerge(a, b), _comm_const(g, a, b))


@axiom("TE1", P1)
def _te1(g, d):
    return _eq(TermTest(EPS), EPS)


@axiom("TE2", P1)
def _te2(g, d):
    return _eq(TermTest(g.alpha()), DELTA)


@axiom("TE3", P1)
def _te3(g, d):
    x, y = _x(g, d), _x(g, d)
    return _eq(TermTest(Alt(x, y)), Alt(TermTest(x), TermTest(y)))


@axiom("TE4", P1)
def _te4(g, d):
    x, y = _x(g, d), _x(g, d)
    return _eq(TermTest(Seq(x, y)), Seq(TermTest(x), TermTest(y)))


def _member(g: TermGen, a: T.Proc, H: frozenset) -> bool:
    if not isinstance(a, T.ACTION_TYPES):
        return False
    k = g.ctx.action_key(a)
    return any(g.ctx.action_key(b) == k for b in H)


def _equivalent_variant(g: TermGen, a: T.Proc) -> T.Proc:
    """A syntactically different but data-equivalent version of an action."""
    if isinstance(a, PAct):
        return PAct(a.name, tuple(D.App("+", (e, D.Lit(0))) for e in a.args))
    if isinstance(a, Assign):
        return Assign(a.var, D.App("*", (a.expr, D.Lit(1))))
    return a


def _outside(g: TermGen, H: frozenset) -> T.Proc:
    for _ in range(50):
        a = g.alpha()
        if not _member(g, a, H):
            return a
    raise NoInstance("no action outside the set")


def _inside(g: TermGen, H: frozenset) -> T.Proc:
    a = g.rng.choice(sorted(H, key=repr))
    return _equivalent_variant(g, a) if g.rng.random() < 0.3 else a


def _unary_ops(prefix: str, ctor, silent: T.Proc):
    @axiom(f"{prefix}0", P1)
    def _0(g, d):
        return _eq(ctor(g.action_set(), EPS), EPS)

    @axiom(f"{prefix}1", P1)
    def _1(g, d):
        H = g.action_set()
        a = _outside(g, H)
        return _eq(ctor(H, a), a)

    @axiom(f"{prefix}2", P1)
    def _2(g, d):
        H = g.action_set()
        return _eq(ctor(H, _inside(g, H)), silent)

    @axiom(f"{prefix}3", P1)
    def _3(g, d):
        H, x, y = g.action_set(), _x(g, d), _x(g, d)
        return _eq(ctor(H, Alt(x, y)), Alt(ctor(H, x), ctor(H, y)))

    @axiom(f"{prefix}4", P1)
    def _4(g, d):
        H, x, y = g.action_set(), _x(g, d), _x(g, d)
        return _eq(ctor(H, Seq(x, y)), Seq(ctor(H, x), ctor(H, y)))


_unary_ops("D", Encap, DELTA)
_unary_ops("T", Hide, TAU)


# -- part 2 ------------------------------------------------------------------------

@axiom("pA1", P2)
def _pa1(g, d):
    p, x, y = g.prob(), _x(g, d), _x(g, d)
    return _eq(PChoice(p, x, y), PChoice(1 - p, y, x))


@axiom("pA2", P2)
def _pa2(g, d):
    p, r = g.prob(), g.prob()
    x, y, z = _x(g, d), _x(g, d), _x(g, d)
    inner = meadow.div((1 - p) * r, 1 - p * r)
    return _eq(PChoice(r, PChoice(p, x, y), z), PChoice(p * r, x, PChoice(inner, y, z)))


@axiom("pA3", P2)
def _pa3(g, d):
    x = _x(g, d)
    return _eq(PChoice(g.prob(), x, x), x)


@axiom("pA4", P2)
def _pa4(g, d):
    p, x, y, z = g.prob(), _x(g, d), _x(g, d), _x(g, d)
    return _eq(Seq(PChoice(p, x, y), z), PChoice(p, Seq(x, z), Seq(y, z)))


@axiom("pA5", P2)
def _pa5(g, d):
    p, x, y, z = g.prob(), _x(g, d), _x(g, d), _x(g, d)
    return _eq(Alt(PChoice(p, x, y), z), PChoice(p, Alt(x, z), Alt(y, z)))


@axiom("pA6", P2)
def _pa6(g, d):
    x = _x(g, d)
    return _eq(PChoice(1, x, _x(g, d)), x)


def _binary_dist(name: str, op, left: bool):
    @axiom(name, P2)
    def _inst(g, d):
        p, x, y, z = g.prob(), _x(g, d), _x(g, d), _x(g, d)
        if left:
            return _eq(op(PChoice(p, x, y), z), PChoice(p, op(x, z), op(y, z)))
        return _eq(op(x, PChoice(p, y, z)), PChoice(p, op(x, y), op(x, z)))


_binary_dist("pCM1", Par, True)
_binary_dist("pCM2", Par, False)
_binary_dist("pCM3", LMerge, True)
_binary_dist("pCM4", LMerge, False)
_binary_dist("pCM5", CMerge, True)
_binary_dist("pCM6", CMerge, False)


@axiom("pTE", P2)
def _pte(g, d):
    p, x, y = g.prob(), _x(g, d), _x(g, d)
    return _eq(TermTest(PChoice(p, x, y)), PChoice(p, TermTest(x), TermTest(y)))


@axiom("pD", P2)
def _pd(g, d):
    H, p, x, y = g.action_set(), g.prob(), _x(g, d), _x(g, d)
    return _eq(Encap(H, PChoice(p, x, y)), PChoice(p, Encap(H, x), Encap(H, y)))


@axiom("pT", P2)
def _pt(g, d):
    I, p, x, y = g.action_set(), g.prob(), _x(g, d), _x(g, d)
    return _eq(Hide(I, PChoice(p, x, y)), PChoice(p, Hide(I, x), Hide(I, y)))


def _be_parts(g: TermGen, d: int):
    x, y = g.nonterminating_summand_term(d - 1), g.nonterminating_summand_term(d - 1)
    premises = ((x, Alt(x, x)), (y, Alt(y, y)), (TermTest(Alt(x, y)), DELTA))
    return x, y, premises


@axiom("pBE", P2, conditional=True)
def _pbe(g, d):
    a, p, z = g.alpha(), g.prob(), _x(g, d - 1)
    x, y, prem = _be_parts(g, d)
    lhs = Seq(a, PChoice(p, Alt(Seq(TAU, Alt(x, y)), x), z))
    rhs = Seq(a, PChoice(p, Alt(x, y), z))
    return _eq(lhs, rhs, *prem)


# -- data-dependent axioms ------------------------------------------------------------

@axiom("IMP1", DEP)
def _imp1(g, d):
    e = g.data(2)
    u = g.ctx.universe
    for _ in range(30):
        f = g.data(2)
        if f != e and u.valid_eq(e, f):
            break
    else:
        f = g.rng.choice((D.App("+", (e, D.Lit(0))), D.App("*", (D.Lit(1), e)), D.App("/", (e, D.Lit(1)))))
    if g.rng.random() < 0.5:
        return _eq(PAct("d", (e,)), PAct("d", (f,)))
    v = g.rng.choice(g.variables)
    return _eq(Assign(v, e), Assign(v, f))


@axiom("IMP2", DEP)
def _imp2(g, d):
    phi = g.cond(2)
    u = g.ctx.universe
    for _ in range(30):
        psi = g.cond(2)
        if psi != phi and u.semantic_key(psi) == u.semantic_key(phi):
            break
    else:
        psi = g.rng.choice((D.Not(D.Not(phi)), D.Or(phi, phi), D.Or(phi, D.FALSE)))
    x = _x(g, d)
    return _eq(Guard(phi, x), Guard(psi, x))


@axiom("GC1", DEP)
def _gc1(g, d):
    x = _x(g, d)
    return _eq(Guard(D.TRUE, x), x)


@axiom("GC2", DEP)
def _gc2(g, d):
    return _eq(Guard(D.FALSE, _x(g, d)), DELTA)


@axiom("GC3", DEP)
def _gc3(g, d):
    return _eq(Guard(g.cond(), DELTA), DELTA)


@axiom("GC4", DEP)
def _gc4(g, d):
    phi, x, y = g.cond(), _x(g, d), _x(g, d)
    return _eq(Guard(phi, Alt(x, y)), Alt(Guard(phi, x), Guard(phi, y)))


@axiom("GC5", DEP)
def _gc5(g, d):
    phi, x, y = g.cond(), _x(g, d), _x(g, d)
    return _eq(Guard(phi, Seq(x, y)), Seq(Guard(phi, x), y))


@axiom("GC6", DEP)
def _gc6(g, d):
    phi, psi, x = g.cond(), g.cond(), _x(g, d)
    return _eq(Guard(phi, Guard(psi, x)), Guard(D.conj(phi, psi), x))


@axiom("GC7", DEP)
def _gc7(g, d):
    phi, psi, x = g.cond(), g.cond(), _x(g, d)
    return _eq(Guard(D.Or(phi, psi), x), Alt(Guard(phi, x), Guard(psi, x)))


@axiom("GC8", DEP)
def _gc8(g, d):
    phi, x, y = g.cond(), _x(g, d), _x(g, d)
    return _eq(LMerge(Guard(phi, x), y), Guard(phi, LMerge(x, y)))


@axiom("GC9", DEP)
def _gc9(g, d):
    phi, x, y = g.cond(), _x(g, d), _x(g, d)
    return _eq(CMerge(Guard(phi, x), y), Guard(phi, CMerge(x, y)))


@axiom("GC10", DEP)
def _gc10(g, d):
    phi, x, y = g.cond(), _x(g, d), _x(g, d)
    return _eq(CMerge(x, Guard(phi, y)), Guard(phi, CMerge(x, y)))


@axiom("GC11", DEP)
def _gc11(g, d):
    phi, x = g.cond(), _x(g, d)
    return _eq(TermTest(Guard(phi, x)), Guard(phi, TermTest(x)))


@axiom("GC12", DEP)
def _gc12(g, d):
    H, phi, x = g.action_set(), g.cond(), _x(g, d)
    return _eq(Encap(H, Guard(phi, x)), Guard(phi, Encap(H, x)))


@axiom("GC13", DEP)
def _gc13(g, d):
    I, phi, x = g.action_set(), g.cond(), _x(g, d)
    return _eq(Hide(I, Guard(phi, x)), Guard(phi, Hide(I, x)))


@axiom("V0", DEP)
def _v0(g, d):
    return _eq(Eval(g.evalmap(), EPS), EPS)


@axiom("V1", DEP)
def _v1(g, d):
    s, x = g.evalmap(), _x(g, d)
    return _eq(Eval(s, Seq(TAU, x)), Seq(TAU, Eval(s, x)))


@axiom("V2", DEP)
def _v2(g, d):
    s, a, x = g.evalmap(), g.basic_action(), _x(g, d)
    return _eq(Eval(s, Seq(a, x)), Seq(a, Eval(s, x)))


@axiom("V3", DEP)
def _v3(g, d):
    s, x = g.evalmap(), _x(g, d)
    args = (g.data(2),)
    name = g.rng.choice(g.unary)
    u = g.ctx.universe
    evaluated = tuple(D.Lit(u.eval(e, s)) for e in args)
    return _eq(Eval(s, Seq(PAct(name, args), x)), Seq(PAct(name, evaluated), Eval(s, x)))


@axiom("V4", DEP)
def _v4(g, d):
    s, x = g.evalmap(), _x(g, d)
    v, e = g.rng.choice(g.variables), g.data(2)
    val = g.ctx.universe.eval(e, s)
    return _eq(Eval(s, Seq(Assign(v, e), x)), Seq(Assign(v, D.Lit(val)), Eval(s.update(v, val), x)))


@axiom("V5", DEP)
def _v5(g, d):
    s, x, y = g.evalmap(), _x(g, d), _x(g, d)
    return _eq(Eval(s, Alt(x, y)), Alt(Eval(s, x), Eval(s, y)))


@axiom("V6", DEP)
def _v6(g, d):
    s, phi, x = g.evalmap(), g.cond(), _x(g, d)
    val = D.TRUE if g.ctx.universe.sat(phi, s) else D.FALSE
    return _eq(Eval(s, Guard(phi, x)), Guard(val, Eval(s, x)))


def _pact(g: TermGen, name: str) -> T.Proc:
    return PAct(name, (g.data(1),))


@axiom("CM7Da", DEP)
def _cm7da(g, d):
    a, b = _pact(g, "d"), _pact(g, "e")
    if g.rng.random() < 0.5:
        a, b = PAct("e", b.args), PAct("d", a.args)
    x, y = _x(g, d), _x(g, d)
    c = g.ctx.comm(a.name, b.name)
    cond = D.Eq(a.args[0], b.args[0])
    return _eq(CMerge(Seq(a, x), Seq(b, y)), Guard(cond, Seq(PAct(c, a.args), Par(x, y))))


@axiom("CM7Db", DEP)
def _cm7db(g, d):
    n1, n2 = g.rng.choice((("d", "d"), ("e", "e"), ("f", "d"), ("e", "f")))
    x, y = _x(g, d), _x(g, d)
    return _eq(CMerge(Seq(_pact(g, n1), x), Seq(_pact(g, n2), y)), DELTA)


def _non_pact(g: TermGen) -> T.Proc:
    r = g.rng.random()
    if r < 0.4:
        return g.basic_action()
    if r < 0.6:
        return TAU
    if r < 0.75:
        return DELTA
    return Assign(g.rng.choice(g.variables), g.data(1))


@axiom("CM7Dc", DEP)
def _cm7dc(g, d):
    x, y = _x(g, d), _x(g, d)
    return _eq(CMerge(Seq(_pact(g, g.rng.choice("def")), x), Seq(_non_pact(g), y)), DELTA)


@axiom("CM7Dd", DEP)
def _cm7dd(g, d):
    x, y = _x(g, d), _x(g, d)
    return _eq(CMerge(Seq(_non_pact(g), x), Seq(_pact(g, g.rng.choice("def")), y)), DELTA)


@axiom("CM7De", DEP)
def _cm7de(g, d):
    x, y = _x(g, d), _x(g, d)
    asg = Assign(g.rng.choice(g.variables), g.data(1))
    return _eq(CMerge(Seq(asg, x), Seq(g.alpha(), y)), DELTA)


@axiom("CM7Df", DEP)
def _cm7df(g, d):
    x, y = _x(g, d), _x(g, d)
    asg = Assign(g.rng.choice(g.variables), g.data(1))
    return _eq(CMerge(Seq(g.alpha(), x), Seq(asg, y)), DELTA)


@axiom("pGC", DEP)
def _pgc(g, d):
    phi, p, x, y = g.cond(), g.prob(), _x(g, d), _x(g, d)
    return _eq(Guard(phi, PChoice(p, x, y)), PChoice(p, Guard(phi, x), Guard(phi, y)))


@axiom("pV", DEP)
def _pv(g, d):
    s, p, x, y = g.evalmap(), g.prob(), _x(g, d), _x(g, d)
    return _eq(Eval(s, PChoice(p, x, y)), PChoice(p, Eval(s, x), Eval(s, y)))


@axiom("pBED", DEP, conditional=True)
def _pbed(g, d):
    a, p, z, phi = g.alpha(), g.prob(), _x(g, d - 1), g.cond()
    x, y, prem = _be_parts(g, d)
    lhs = Seq(a, PChoice(p, Alt(Guard(phi, Seq(TAU, Alt(x, y))), Guard(phi, x)), z))
    rhs = Seq(a, PChoice(p, Guard(phi, Alt(x, y)), z))
    return _eq(lhs, rhs, *prem)


# -- recursion -------------------------------------------------------------------------

@axiom("RDP", REC)
def _rdp(g, d):
    spec = g.linear_spec()
    x = g.rng.choice(spec.variables)
    return _eq(T.RecConst(x, spec), T.unfold(x, spec))


@axiom("RSP", REC, conditional=True)
def _rsp(g, d):
    spec = g.linear_spec()
    # a second, syntactically different specification with the same solution
    eqs = []
    for x, rhs in spec.equations:
        parts = T.summands(rhs)
        if rhs is not DELTA and not isinstance(rhs, PChoice) and len(parts) > 1:
            g.rng.shuffle(parts)
            rhs = T.build_altn(parts)
        elif rhs is not DELTA and not isinstance(rhs, PChoice):
            rhs = Alt(rhs, rhs)
        eqs.append((x, rhs))
    other = T.RecSpec(spec.name + "'", tuple(eqs))
    sol = {x: T.RecConst(x, other) for x in spec.variables}
    premises = tuple((sol[x], T.substitute(rhs, sol)) for x, rhs in spec.equations)
    x = g.rng.choice(spec.variables)
    return _eq(sol[x], T.RecConst(x, spec), *premises)


# --------------------------------------------------------------------------------------

@dataclass
class AxiomReport:
    name: str
    checked: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.checked > 0


def check_axiom(ax: Axiom, n: int, rng: random.Random, ctx: T.Context | None = None, *,
                depth: int = 2, max_states: int = 5000, attempts: int | None = None) -> AxiomReport:
    """Instantiate ``ax`` until ``n`` instances with valid premises were checked."""
    g = TermGen(rng, ctx) if ctx else TermGen(rng)
    rep = AxiomReport(ax.name)
    budget = attempts or 20 * n
    while rep.checked < n and budget > 0:
        budget -= 1
        try:
            inst = ax.instance(g, depth)
            if not all(rooted_equivalent(l, r, g.ctx, max_states=max_states) for l, r in inst.premises):
                rep.skipped += 1
                continue
            verdict = rooted_equivalent(inst.lhs, inst.rhs, g.ctx, max_states=max_states)
        except (NoInstance, BudgetExceeded):
            rep.skipped += 1
            continue
        rep.checked += 1
        if not verdict.equivalent:
            rep.failures.append((inst, verdict.evidence))
    return rep


def axiom_names() -> list[str]:
    return [a.name for a in AXIOMS]


def get_axiom(name: str) -> Axiom:
    for a in AXIOMS:
        if a.name == name:
            return a
    raise KeyError(name)


__all__ = ["AXIOMS", "Axiom", "Instance", "AxiomReport", "check_axiom", "axiom_names", "get_axiom",
           "NoInstance"]
