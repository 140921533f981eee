import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pax import terms as T
from pax.gen import TermGen, campaign_context
from pax.parser import ParseError, parse, parse_term, spec_with
from pax.pretty import pretty, pretty_specfile
from pax.selftest import bundled

SF = spec_with(actions=["a", "b", "c", ("d", 1), ("e", 1), ("f", 1)], variables=["v"],
               comm={("a", "b"): "c", ("d", "e"): "f"}, bound=2)


def test_die():
    sf = bundled("die")
    throws = [T.Act(f"throw{i}") for i in range(1, 7)]
    assert sf["Die"] is T.build_prc([(Fraction(1, 6), t) for t in throws])


def test_declarations_only():
    sf = parse("actions a, b\nvars v\nbound 4\n")
    assert sf.procs == {} and sf.bound == 4 and sf.actions == {"a": 0, "b": 0}


def test_undeclared_action_is_named():
    with pytest.raises(ParseError) as err:
        parse("actions a\nproc P = a || b\n", "p.pax")
    assert "'b'" in str(err.value)
    assert str(err.value).startswith("p.pax:2:")


def test_error_positions():
    with pytest.raises(ParseError) as err:
        parse("actions a\n\nproc P = a .\n")
    assert (err.value.line, err.value.col) == (4, 1) or err.value.line == 3


@pytest.mark.parametrize("text, fragment", [
    ("actions a\nproc P = pc{3/2: a, -1/2: a}", ""),
    ("actions a\nproc P = pc{1/2: a, 1/3: a}", "sum"),
    ("actions a(1)\nproc P = a", "argument"),
    ("actions a, b, c\ncomm a | b -> c\ncomm a | c -> b", ""),
    ("actions a\nactions a", "already declared"),
    ("vars v\nproc P = V{v = 9}(eps)", "bound"),
    ("actions a\nrec R { X = [true] -> tau . X }\nproc P = <X | R>", "guard"),
])
def test_rejected(text, fragment):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert fragment in str(err.value)


def test_precedence():
    sf = spec_with(actions=["a", "b", "c"])
    t = parse_term("a . b + c", sf)
    assert t is T.Alt(T.Seq(T.Act("a"), T.Act("b")), T.Act("c"))
    assert pretty(T.Seq(T.Alt(T.Act("a"), T.Act("b")), T.Act("c"))) == "(a + b) . c"
    assert pretty(T.DELTA) == "delta"
    pc = T.Seq(T.PChoice(Fraction(1, 2), T.Act("a"), T.Act("b")), T.Act("c"))
    assert parse_term(pretty(pc), sf) is pc


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_term_round_trip(seed):
    g = TermGen(random.Random(seed), campaign_context())
    t = g.term(5)
    assert parse_term(pretty(t), SF) is t


def test_recursion_round_trip():
    g = TermGen(random.Random(11), campaign_context(), recursion=True)
    for _ in range(100):
        t = g.term(4)
        sf = spec_with(actions=["a", "b", "c", ("d", 1), ("e", 1), ("f", 1)], variables=["v"],
                       comm={("a", "b"): "c", ("d", "e"): "f"}, bound=2)
        for u in T.iter_subterms(t):
            if isinstance(u, T.RecConst):
                sf.specs[u.spec.name] = u.spec
        sf.procs["P"] = t
        again = parse(pretty_specfile(sf))
        assert again == sf


@pytest.mark.parametrize("name", ["die", "majority", "geometric", "tau", "interference", "incompleteness"])
def test_bundled_files_round_trip(name):
    sf = bundled(name)
    assert parse(pretty_specfile(sf)) == sf
