import json
import random
from fractions import Fraction

import pytest

from pax import terms as T
from pax.gen import TermGen, campaign_context
from pax.parser import parse_term, spec_with
from pax.pts import (
    BudgetExceeded, NotEvalRootedError, explore, export, import_json, outcome_distribution,
    reach_probability, reachable, to_dot,
)
from pax.selftest import bundled


def test_delta_is_one_state():
    pts = explore(T.DELTA)
    assert pts.n == 1
    assert pts.dist[0][0] == ((0, 1),) and pts.steps[0][0] == () and not pts.term[0][0]


def test_die_export():
    sf = bundled("die")
    pts = explore(sf["Die"], sf.context())
    data = json.loads(export(pts))
    probs = [e for e in data["prob_edges"] if e["from"] == pts.root]
    assert len(probs) == 6 and all(e["p"] == "1/6" for e in probs)
    assert sorted(e["label"] for e in data["act_edges"]) == [f"throw{i}" for i in range(1, 7)]
    assert "1/6" in to_dot(pts)


def test_json_round_trip():
    sf = bundled("tau")
    pts = explore([sf["Absorb"], sf["Merged"]], sf.context())
    assert import_json(export(pts)) == pts


def test_exploration_is_deterministic():
    ctx = campaign_context()
    for seed in range(30):
        t = TermGen(random.Random(seed), ctx).term(4)
        assert explore(t, campaign_context()) == explore(t, ctx)


def test_every_state_reachable():
    ctx = campaign_context()
    for seed in range(30):
        pts = explore(TermGen(random.Random(seed), ctx).term(4), ctx)
        assert reachable(pts) == set(range(pts.n))


def test_open_maps_enumerated(abc):
    t = parse_term("[v = 1] -> a", abc)
    pts = explore(t, abc.context())
    assert len(pts.sigmas) == 4
    with pytest.raises(NotEvalRootedError):
        explore(t, abc.context(), sigma_mode="canonical")


def test_budget():
    sf = bundled("geometric")
    with pytest.raises(BudgetExceeded):
        explore(sf["Run"], sf.context(), max_states=10)


def test_geometric_outcomes():
    sf = bundled("geometric")
    od = outcome_distribution(explore(sf["Run"], sf.context()))
    got = {m["v"]: p for m, p in od.items()}
    for n in range(6):
        assert got[n] == Fraction(1, 2 ** (n + 1))


def test_reach_probability_extremes():
    sf = spec_with(actions=["a", "b"], variables=["v"], bound=1)
    t = parse_term("V{v = 0}(pc{1/2: a, 1/2: b} + (v := 1))", sf)
    pts = explore(t, sf.context())
    hit = lambda m: m is not None and m["v"] == 1
    assert reach_probability(pts, hit, mode="max") == 1
    assert reach_probability(pts, hit, mode="min") == 0
    with pytest.raises(ValueError):
        outcome_distribution(pts)
