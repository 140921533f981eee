import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from pax import terms as T
from pax.data import EvalMap
from pax.gen import TermGen, campaign_context
from pax.parser import parse_term
from pax.sos import Engine

SIGMAS = [EvalMap({"v": n}) for n in range(3)]


def labels(eng, sigma, t):
    return sorted({(str(a), str(u)) for a, u in eng.steps(sigma, t)})


def test_action_and_sequence(abc):
    eng = Engine(abc.context())
    t = parse_term("a . b", abc)
    assert eng.distribution(EvalMap(), t) == {t: 1}
    (lab, rest), = eng.steps(EvalMap(), t)
    assert lab is T.Act("a") and rest is parse_term("eps . b", abc) or rest is parse_term("b", abc)
    assert not eng.terminates(EvalMap(), t)
    assert eng.terminates(EvalMap(), T.EPS)
    assert eng.steps(EvalMap(), T.DELTA) == () and not eng.terminates(EvalMap(), T.DELTA)


def test_pchoice_distribution(abc):
    eng = Engine(abc.context())
    t = parse_term("pc{1/3: a, 2/3: b}", abc)
    d = eng.distribution(EvalMap(), t)
    assert d == {T.Act("a"): Fraction(1, 3), T.Act("b"): Fraction(2, 3)}
    assert eng.steps(EvalMap(), t) == ()


def test_coinciding_branches_collapse(abc):
    eng = Engine(abc.context())
    t = parse_term("pc{1/2: a, 1/2: a}", abc)
    assert eng.distribution(EvalMap(), t) == {t: 1}
    assert [x for x, _ in eng.steps(EvalMap(), t)] == [T.Act("a")]


def test_alternative_combines_products(abc):
    eng = Engine(abc.context())
    t = parse_term("pc{1/2: a, 1/2: b} + c", abc)
    d = eng.distribution(EvalMap(), t)
    assert sorted(d.values()) == [Fraction(1, 2)] * 2
    assert sum(d.values()) == 1


def test_communication(abc):
    eng = Engine(abc.context())
    t = parse_term("a || b", abc)
    got = {str(a) for a, _ in eng.steps(EvalMap(), t)}
    assert got == {"a", "b", "c"}
    assert {str(a) for a, _ in eng.steps(EvalMap(), parse_term("a | b", abc))} == {"c"}
    assert {str(a) for a, _ in eng.steps(EvalMap(), parse_term("d(1) | e(1)", abc))} == {"f(1)"}
    assert eng.steps(EvalMap(), parse_term("d(1) | e(2)", abc)) == ()


def test_guard_and_assignment(abc):
    eng = Engine(abc.context())
    t = parse_term("[v = 1] -> a", abc)
    assert eng.steps(EvalMap({"v": 1, "w": 0}), t)
    assert not eng.steps(EvalMap({"v": 0, "w": 0}), t)
    u = parse_term("V{v = 1, w = 0}((v := v + 5) . ([v = 3] -> a))", abc)
    (_, nxt), = eng.steps(EvalMap(), u)
    assert isinstance(nxt, T.Eval) and nxt.sigma["v"] == 3       # saturates at the bound
    assert [str(a) for a, _ in eng.steps(EvalMap(), nxt)] == ["a"]


def test_encapsulation_and_hiding(abc):
    eng = Engine(abc.context())
    t = parse_term("encap{a, b}(a || b)", abc)
    assert {str(a) for a, _ in eng.steps(EvalMap(), t)} == {"c"}
    h = parse_term("hide{a}(a)", abc)
    assert [str(a) for a, _ in eng.steps(EvalMap(), h)] == ["tau"]


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_distributions_are_total_and_resolve(seed):
    ctx = campaign_context()
    t = TermGen(random.Random(seed), ctx).term(4)
    eng = Engine(ctx)
    for sigma in SIGMAS:
        d = eng.distribution(sigma, t)
        assert sum(d.values()) == 1 and all(p > 0 for p in d.values())
        for u in d:
            assert eng.distribution(sigma, u) == {u: 1}


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_eval_rooted_terms_ignore_ambient_map(seed):
    ctx = campaign_context()
    t = T.Eval(EvalMap({"v": 1}), TermGen(random.Random(seed), ctx).term(3))
    eng = Engine(ctx)
    ref = (eng.distribution(SIGMAS[0], t), labels(eng, SIGMAS[0], t), eng.terminates(SIGMAS[0], t))
    for sigma in SIGMAS[1:]:
        assert (eng.distribution(sigma, t), labels(eng, sigma, t), eng.terminates(sigma, t)) == ref


def test_recursion_unfolds(abc):
    from pax.parser import parse
    sf = parse("actions a\nrec R { X = [true] -> a . X }\nproc P = <X | R>")
    eng = Engine(sf.context())
    (lab, nxt), = eng.steps(EvalMap(), sf["P"])
    assert str(lab) == "a"
    (lab2, _), = eng.steps(EvalMap(), nxt)
    assert str(lab2) == "a"
