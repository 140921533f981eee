from fractions import Fraction

import pytest

from pax import terms as T
from pax.parser import parse_term
from pax.selftest import bundled
from pax.simulate import (
    PriorityScheduler, Simulator, derive_seed, estimate, final_value, performed, run_once, wilson_interval,
)


def test_same_seed_same_trace():
    sf = bundled("die")
    sim = Simulator(sf["Die"], sf.context())
    a = [sim.run(derive_seed(5, i)).actions for i in range(50)]
    b = [run_once(sf["Die"], seed=derive_seed(5, i), ctx=sf.context()).actions for i in range(50)]
    assert a == b
    assert len({tuple(x) for x in a}) > 1


def test_delta_deadlocks():
    tr = run_once(T.DELTA)
    assert tr.status == "deadlocked" and tr.actions == []


def test_eps_terminates():
    assert run_once(T.EPS).status == "terminated"


def test_step_limit(abc):
    from pax.parser import parse
    sf = parse("actions a\nrec R { X = [true] -> a . X }\nproc P = <X | R>")
    tr = run_once(sf["P"], max_steps=7, ctx=sf.context())
    assert tr.status == "step-limit" and len(tr.actions) == 7


def test_die_frequency():
    sf = bundled("die")
    est = estimate(sf["Die"], None, performed("throw3"), 3000, seed=2, ctx=sf.context())
    assert est.contains(Fraction(1, 6))


def test_geometric_final_value():
    sf = bundled("geometric")
    est = estimate(sf["Run"], None, final_value("v", 0), 2000, seed=3, ctx=sf.context())
    assert est.contains(Fraction(1, 2))


def test_priority_scheduler(abc):
    t = parse_term("a + b", abc)
    tr = run_once(t, policy=PriorityScheduler(["b", "a"]), ctx=abc.context())
    assert tr.actions == ["b"]
    assert run_once(t, policy="first", ctx=abc.context()).actions == ["a"]


def test_draws_recorded(abc):
    tr = run_once(parse_term("pc{1/2: a, 1/2: b}", abc), seed=1, ctx=abc.context())
    (name, p), = tr.draws
    assert p == Fraction(1, 2) and name in ("a", "b")


def test_wilson():
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi and hi - lo < 0.2
    with pytest.raises(ValueError):
        estimate(T.EPS, None, performed("a"), 0)
