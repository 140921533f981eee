import random

import pytest

from pax import terms as T
from pax.bisim import rooted_equivalent
from pax.gen import TermGen, campaign_context
from pax.parser import parse_term
from pax.pts import BudgetExceeded
from pax.rewrite import RecursionPresentError, normalize, prove_equal
from pax.selftest import bundled


def test_simple_laws(abc):
    ctx = abc.context()
    t = parse_term("(a + a) . (b . eps) + delta", abc)
    nf, trace = normalize(t, ctx)
    assert trace.replay() is nf
    assert rooted_equivalent(t, nf, ctx).equivalent
    assert trace.axioms()
    assert prove_equal(t, parse_term("a . b", abc), ctx).verdict == "derived"


def test_pchoice_idempotence(abc):
    ctx = abc.context()
    assert prove_equal(parse_term("pc{1/4: a, 3/4: a}", abc), T.Act("a"), ctx)


def test_unknown_is_not_a_refutation(abc):
    ctx = abc.context()
    v = prove_equal(T.Act("a"), T.Act("b"), ctx)
    assert v.verdict == "unknown" and "differ" in v.reason


def test_recursion_is_outside_scope():
    sf = bundled("incompleteness")
    assert prove_equal(sf["Hidden"], sf["Plain"], sf.context()).verdict == "unknown"
    with pytest.raises(RecursionPresentError):
        normalize(sf["Hidden"], sf.context())


def test_trace_lines_name_axioms(abc):
    nf, trace = normalize(parse_term("(a + b) . c", abc), abc.context())
    text = str(trace)
    assert all(name in text for name in trace.axioms())


@pytest.mark.parametrize("seed", range(3))
def test_normal_forms_are_equivalent(seed):
    ctx = campaign_context()
    g = TermGen(random.Random(seed), ctx)
    for _ in range(60):
        t = g.term(4)
        nf, trace = normalize(t, ctx)
        assert trace.replay() is nf
        try:
            v = rooted_equivalent(t, nf, ctx, max_states=20000)
        except BudgetExceeded:
            continue
        assert v.equivalent, v.evidence
