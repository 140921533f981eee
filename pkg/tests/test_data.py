import random

import pytest

from pax import data as D
from pax.gen import TermGen, campaign_context


def test_eval_examples():
    u = D.DataUniverse(3)
    s = D.EvalMap({"v": 1, "w": 1})
    assert u.eval(D.plus(D.Var("v"), 1), s) == 2
    assert u.eval(D.times(D.Var("v"), D.Var("w")), s) == 1
    assert u.eval(D.Lit(3), s) == 3
    assert u.sat(D.TRUE, s)
    assert u.sat(D.Exists("X", D.Eq(D.BVar("X"), D.Var("v"))), D.EvalMap({"v": 2}))
    assert u.sat(D.Eq(D.Var("v"), D.Lit(1)), s)


def test_saturation_and_division():
    u = D.DataUniverse(3)
    s = D.EvalMap()
    assert u.eval(D.plus(2, 2), s) == 3
    assert u.eval(D.minus(1, 2), s) == 0
    assert u.eval(D.times(2, 3), s) == 3
    assert u.eval(D.divide(3, 2), s) == 1
    assert u.eval(D.divide(3, 0), s) == 0
    assert u.clamp_events["+"] == 1 and u.clamp_events["-"] == 1 and u.clamp_events["*"] == 1


def test_bound_variable_escape():
    with pytest.raises(D.UnboundVariableError):
        D.DataUniverse(2).eval(D.BVar("X"), D.EvalMap())


def test_update():
    s = D.EvalMap({"v": 0, "w": 3})
    assert D.update(s, "v", 2)["v"] == 2
    assert D.update(s, "v", 2)["w"] == 3
    assert D.update(D.update(s, "v", 1), "v", 2)["v"] == 2
    with pytest.raises(D.UndeclaredVariableError):
        D.update(s, "x", 1)


def test_evalmap_text():
    assert str(D.EvalMap({"w": 0, "v": 1})) == "{v=1, w=0}"


def test_abbreviations_and_update_independence():
    g = TermGen(random.Random(5), campaign_context(bound=3, variables=("v", "w")))
    u = g.ctx.universe
    for _ in range(300):
        phi, psi = g.cond(), g.cond()
        s = g.evalmap()
        assert u.sat(D.conj(phi, psi), s) == (u.sat(phi, s) and u.sat(psi, s))
        assert u.sat(D.implies(phi, psi), s) == ((not u.sat(phi, s)) or u.sat(psi, s))
        body = D.Eq(D.BVar("_q"), D.Var("v"))
        assert u.sat(D.forall("_q", body), s) == (not u.sat(D.Exists("_q", D.Not(body)), s))
        e = g.data(2)
        if "w" not in D.flex_vars(e):
            assert u.eval(e, D.update(s, "w", 3)) == u.eval(e, s)


def test_validity_is_semantic():
    u = D.DataUniverse(2)
    v = D.Var("v")
    assert u.valid(D.Or(D.Eq(v, D.Lit(0)), D.Not(D.Eq(v, D.Lit(0)))))
    assert u.unsatisfiable(D.Eq(D.plus(v, 1), D.Lit(0)))
    assert u.valid_eq(D.plus(v, 0), v)
