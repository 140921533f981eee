"""Canonical concrete syntax for terms, conditions and specification files.

The printer is the inverse of :mod:`pax.parser`: parsing the output of
:func:`pretty` gives back a structurally identical term.  Binding strength,
loosest first: ``+``; ``||``, ``|L``, ``|``; guards ``[phi] -> t``; ``.``.
All binary operators associate to the left.
"""

from __future__ import annotations

from fractions import Fraction

from .data import (
    App, BVar, BoolLit, CFalse, Eq, Exists, Lit, Not, Or, Var, EvalMap, PREDICATES,
)
from .meadow import format_rational
from . import terms as T

# -- data and conditions -------------------------------------------------------

_DATA_LEVEL = {"<": 1, ">": 1, "<=": 1, ">=": 1, "+": 2, "-": 2, "*": 3, "/": 3}


def pretty_data(e, level: int = 0) -> str:
    if isinstance(e, Lit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "btrue" if e.value else "bfalse"
    if isinstance(e, (Var, BVar)):
        return e.name
    if isinstance(e, App):
        lv = _DATA_LEVEL.get(e.op)
        if lv is None:
            return f"{e.op}(" + ", ".join(pretty_data(a) for a in e.args) + ")"
        a, b = e.args
        # comparisons do not chain; arithmetic is left-associative
        left = pretty_data(a, lv + 1 if e.op in PREDICATES else lv)
        right = pretty_data(b, lv + 1)
        s = f"{left} {e.op} {right}"
        return f"({s})" if lv < level else s
    raise TypeError(f"not a data term: {e!r}")


def _match_and(c):
    if isinstance(c, Not) and isinstance(c.arg, Or):
        l, r = c.arg.lhs, c.arg.rhs
        if isinstance(l, Not) and isinstance(r, Not):
            return l.arg, r.arg
    return None


def pretty_cond(c, level: int = 0) -> str:
    # levels: 0 quantifier body, 1 =>, 2 ||, 3 &&, 4 !, 5 atom
    if isinstance(c, CFalse):
        return "false"
    if isinstance(c, Eq):
        return f"{pretty_data(c.lhs, 1)} = {pretty_data(c.rhs, 1)}"
    if isinstance(c, Not):
        if isinstance(c.arg, CFalse):
            return "true"
        if isinstance(c.arg, Exists) and isinstance(c.arg.body, Not):
            s = f"forall {c.arg.var}. {pretty_cond(c.arg.body.arg, 0)}"
            return f"({s})" if level > 0 else s
        both = _match_and(c)
        if both is not None:
            s = f"{pretty_cond(both[0], 3)} && {pretty_cond(both[1], 4)}"
            return f"({s})" if level > 3 else s
        return f"!{pretty_cond(c.arg, 5)}"
    if isinstance(c, Or):
        if isinstance(c.lhs, Not) and not isinstance(c.lhs.arg, CFalse):
            s = f"{pretty_cond(c.lhs.arg, 2)} => {pretty_cond(c.rhs, 1)}"
            return f"({s})" if level > 1 else s
        s = f"{pretty_cond(c.lhs, 2)} || {pretty_cond(c.rhs, 3)}"
        return f"({s})" if level > 2 else s
    if isinstance(c, Exists):
        s = f"exists {c.var}. {pretty_cond(c.body, 0)}"
        return f"({s})" if level > 0 else s
    raise TypeError(f"not a condition: {c!r}")


def pretty_evalmap(sigma: EvalMap) -> str:
    return str(sigma)


def pretty_prob(p: Fraction) -> str:
    return format_rational(p)


# -- processes -----------------------------------------------------------------

_PAR_OPS = {T.Par: "||", T.LMerge: "|L", T.CMerge: "|"}


def pretty_action(a: T.Proc) -> str:
    if a is T.TAU:
        return "tau"
    if isinstance(a, T.Act):
        return a.name
    if isinstance(a, T.PAct):
        return f"{a.name}(" + ", ".join(pretty_data(e) for e in a.args) + ")"
    if isinstance(a, T.Assign):
        return f"({a.var} := {pretty_data(a.expr)})"
    raise TypeError(f"not an action: {a!r}")


def _action_set(actions) -> str:
    return "{" + ", ".join(sorted(pretty_action(a) for a in actions)) + "}"


def _pc_entries(t: T.PChoice) -> list[tuple[Fraction, T.Proc]]:
    out = []
    mass = Fraction(1)
    while isinstance(t, T.PChoice):
        out.append((mass * t.prob, t.left))
        if t.prob == 1:
            # weights after a certain branch are all zero and cannot be recovered
            return out + [(Fraction(0), t.right)]
        mass *= 1 - t.prob
        t = t.right
    out.append((mass, t))
    return out


def _pp(t: T.Proc, level: int) -> str:
    if t is T.TAU:
        return "tau"
    if t is T.DELTA:
        return "delta"
    if t is T.EPS:
        return "eps"
    if isinstance(t, T.ACTION_TYPES):
        return pretty_action(t)
    if isinstance(t, T.Alt):
        s = f"{_pp(t.left, 1)} + {_pp(t.right, 2)}"
        return f"({s})" if level > 1 else s
    if type(t) in _PAR_OPS:
        s = f"{_pp(t.left, 2)} {_PAR_OPS[type(t)]} {_pp(t.right, 3)}"
        return f"({s})" if level > 2 else s
    if isinstance(t, T.Guard):
        s = f"[{pretty_cond(t.cond)}] -> {_pp(t.body, 3)}"
        return f"({s})" if level > 3 else s
    if isinstance(t, T.Seq):
        s = f"{_pp(t.left, 4)} . {_pp(t.right, 5)}"
        return f"({s})" if level > 4 else s
    if isinstance(t, T.PChoice):
        return "pc{" + ", ".join(f"{pretty_prob(p)}: {_pp(u, 0)}" for p, u in _pc_entries(t)) + "}"
    if isinstance(t, T.TermTest):
        return f"termtest({_pp(t.body, 0)})"
    if isinstance(t, T.Encap):
        return f"encap{_action_set(t.actions)}({_pp(t.body, 0)})"
    if isinstance(t, T.Hide):
        return f"hide{_action_set(t.actions)}({_pp(t.body, 0)})"
    if isinstance(t, T.Eval):
        return f"V{pretty_evalmap(t.sigma)}({_pp(t.body, 0)})"
    if isinstance(t, T.RecVar):
        return t.name
    if isinstance(t, T.RecConst):
        return f"<{t.var} | {t.spec.name}>"
    raise TypeError(f"not a process term: {t!r}")


def pretty(t) -> str:
    """Canonical text of a process term, condition, data term or spec file."""
    if isinstance(t, T.Proc):
        s = t._pp
        if s is None:
            s = _pp(t, 0)
            object.__setattr__(t, "_pp", s)
        return s
    if isinstance(t, (CFalse, Eq, Not, Or, Exists)):
        return pretty_cond(t)
    if isinstance(t, (Lit, BoolLit, Var, BVar, App)):
        return pretty_data(t)
    if isinstance(t, EvalMap):
        return pretty_evalmap(t)
    if isinstance(t, T.RecSpec):
        return pretty_recspec(t)
    from .parser import SpecFile
    if isinstance(t, SpecFile):
        return pretty_specfile(t)
    raise TypeError(f"cannot pretty-print {t!r}")


def pretty_recspec(spec: T.RecSpec) -> str:
    lines = [f"rec {spec.name} {{"]
    for x, rhs in spec.equations:
        lines.append(f"  {x} = {pretty(rhs)};")
    lines.append("}")
    return "\n".join(lines)


def pretty_specfile(sf) -> str:
    out = [f"bound {sf.bound};"]
    if sf.variables:
        out.append("vars " + ", ".join(sf.variables) + ";")
    if sf.actions:
        decls = [n if k == 0 else f"{n}({k})" for n, k in sf.actions.items()]
        out.append("actions " + ", ".join(decls) + ";")
    seen = set()
    for (a, b), c in sorted(sf.comm.table.items()):
        if (b, a) in seen:
            continue
        seen.add((a, b))
        out.append(f"comm {a} | {b} -> {c};")
    for name, sigma in sf.evals.items():
        out.append(f"eval {name} = {pretty_evalmap(sigma)};")
    for spec in sf.specs.values():
        out.append(pretty_recspec(spec))
    for name, t in sf.procs.items():
        out.append(f"proc {name} = {pretty(t)};")
    return "\n".join(out) + "\n"
