import random
from fractions import Fraction

import pytest

from pax import data as D
from pax import terms as T
from pax.gen import TermGen
from pax.sos import Engine

a, b = T.Act("a"), T.Act("b")
X = T.RecVar("X")


def g(t):
    return T.Guard(D.TRUE, t)


def test_hash_consing_and_immutability():
    assert T.Seq(a, b) is T.Seq(T.Act("a"), T.Act("b"))
    with pytest.raises(AttributeError):
        a.name = "z"


def test_alpha_equivalent_conditions_share_a_node():
    c1 = D.Exists("X", D.Eq(D.BVar("X"), D.Var("v")))
    c2 = D.Exists("Y", D.Eq(D.BVar("Y"), D.Var("v")))
    assert T.Guard(c1, a) is T.Guard(c2, a)


def test_validate_comm():
    assert T.validate_comm(T.CommFunction()) == []
    assert T.validate_comm(T.CommFunction({("s", "r"): "c", ("r", "s"): "c"})) == []
    kinds = {v.kind for v in T.validate_comm(T.CommFunction({("s", "r"): "c"}))}
    assert "symmetry" in kinds


def test_linear_terms():
    assert T.is_linear(T.Alt(g(T.Seq(a, X)), g(T.EPS)))
    assert not T.is_linear(T.Seq(a, X))
    assert not T.is_linear(T.PChoice(Fraction(1), g(T.EPS), g(T.EPS)))
    t = T.PChoice(Fraction(1, 2), T.Alt(g(T.Seq(a, X)), g(T.EPS)), g(T.Seq(b, X)))
    parts = T.summands(t)
    assert len(parts) == 3 and all(T.is_summand(s) for s in parts)
    assert T.is_linear(T.build_altn(parts))


def test_guardedness():
    assert not T.is_guarded_spec(T.RecSpec("L", (("X", g(T.Seq(T.TAU, X))),)))
    assert T.is_guarded_spec(T.RecSpec("G", (("X", g(T.Seq(a, X))),)))
    v = D.Var("v")
    geo = T.RecSpec("Geo", (
        ("X", g(T.Seq(T.Assign("v", D.Lit(0)), T.RecVar("Y")))),
        ("Y", T.PChoice(Fraction(1, 2), g(T.Seq(T.Assign("v", D.plus(v, 1)), T.RecVar("Y"))), g(T.EPS))),
    ))
    assert T.is_guarded_spec(geo)
    y = T.unfold("Y", geo)
    assert y is T.PChoice(Fraction(1, 2), g(T.Seq(T.Assign("v", D.plus(v, 1)), T.RecConst("Y", geo))), g(T.EPS))
    with pytest.raises(T.NonLinearError):
        T.check_guarded_linear(T.RecSpec("N", (("X", T.Seq(a, X)),)))


def test_unfold():
    spec = T.RecSpec("E", (("X", g(T.Seq(a, X))),))
    assert T.unfold("X", spec) is g(T.Seq(a, T.RecConst("X", spec)))
    assert T.unfold("X", T.RecSpec("D", (("X", T.DELTA),))) is T.DELTA
    with pytest.raises(T.UnknownVariableError):
        T.unfold("Z", spec)


def test_unfold_is_closed():
    gen = TermGen(random.Random(3))
    for _ in range(50):
        spec = gen.linear_spec()
        for x in spec.variables:
            assert T.is_closed(T.unfold(x, spec))


def test_build_prc_die():
    throws = [T.Act(f"throw{i}") for i in range(1, 7)]
    die = T.build_prc([(Fraction(1, 6), t) for t in throws])
    weights = []
    t = die
    while isinstance(t, T.PChoice):
        weights.append(t.prob)
        t = t.right
    assert weights == [Fraction(1, 6), Fraction(1, 5), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)]
    assert Engine(T.Context()).distribution(D.EvalMap(), die) == {t: Fraction(1, 6) for t in throws}
    assert T.build_prc([(Fraction(1), a)]) is a
    assert T.build_altn([]) is T.DELTA
    with pytest.raises(T.TermError):
        T.build_prc([(Fraction(1, 2), a), (Fraction(1, 3), b)])


def test_build_prc_weights_random():
    rng = random.Random(9)
    eng = Engine(T.Context())
    for _ in range(100):
        n = rng.randint(1, 5)
        raw = [rng.randint(1, 6) for _ in range(n)]
        ws = [Fraction(r, sum(raw)) for r in raw]
        leaves = [T.Act(f"t{i}") for i in range(n)]
        t = T.build_prc(list(zip(ws, leaves)))
        assert eng.distribution(D.EvalMap(), t) == dict(zip(leaves, ws))


def test_data_equiv():
    ctx = T.Context(universe=D.DataUniverse(3))
    assert T.data_equiv(T.PAct("a", (D.plus(1, 1),)), T.PAct("a", (D.Lit(2),)), ctx)
    assert T.data_equiv(T.TAU, T.TAU, ctx)
    assert not T.data_equiv(T.Assign("v", D.Lit(2)), T.Assign("w", D.Lit(2)), ctx)


def test_free_flex_vars():
    t = T.Seq(T.Assign("v", D.Var("w")), T.Eval(D.EvalMap({"u": 0}), T.PAct("d", (D.Var("u"),))))
    # v is written, not read; u is bound by the evaluation operator
    assert T.free_flex_vars(t) == {"w"}
