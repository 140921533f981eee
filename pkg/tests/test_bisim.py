import random

import pytest

from pax import terms as T
from pax.bisim import (
    branching_equivalent, branching_partition, brute_force_partition, interference_free,
    is_branching_bisimulation, minimize, rooted_equivalent, same_partition,
)
from pax.data import EvalMap
from pax.gen import TermGen, campaign_context, random_pts
from pax.parser import parse_term
from pax.selftest import bundled


@pytest.fixture(scope="module")
def tau():
    sf = bundled("tau")
    return sf, sf.context()


def test_tau_prefix(tau):
    sf, ctx = tau
    assert not rooted_equivalent(sf["TA"], sf["A"], ctx).equivalent
    assert branching_equivalent(sf["TA"], sf["A"], ctx).equivalent


def test_tau_before_probability_is_observable(tau):
    sf, ctx = tau
    v = rooted_equivalent(sf["ATCoin"], sf["ACoin"], ctx)
    assert not v.equivalent and v.evidence
    assert not rooted_equivalent(sf["TEpsCoin"], sf["EpsCoin"], ctx).equivalent


def test_inert_tau_absorbed(tau):
    sf, ctx = tau
    assert rooted_equivalent(sf["Absorb"], sf["Merged"], ctx).equivalent


def test_idempotent_pchoice(abc):
    ctx = abc.context()
    assert rooted_equivalent(parse_term("pc{1/3: a, 2/3: a}", abc), T.Act("a"), ctx).equivalent
    assert rooted_equivalent(parse_term("pc{1/2: a, 1/2: b}", abc),
                             parse_term("pc{1/2: b, 1/2: a}", abc), ctx).equivalent
    assert not rooted_equivalent(parse_term("pc{1/3: a, 2/3: b}", abc),
                                 parse_term("pc{1/2: a, 1/2: b}", abc), ctx).equivalent


def test_interference():
    sf = bundled("interference")
    ctx = sf.context()
    both = EvalMap({"v": 1, "w": 1})
    assert interference_free(both, sf["T"], sf["Div"], ctx).equivalent
    assert not interference_free(both, sf["T"], sf["Add"], ctx).equivalent


def test_equivalence_properties():
    ctx = campaign_context()
    g = TermGen(random.Random(7), ctx)
    ts = [g.term(3) for _ in range(12)]
    for t in ts:
        assert rooted_equivalent(t, t, ctx).equivalent
    for t, u in zip(ts, ts[1:]):
        assert rooted_equivalent(t, u, ctx).equivalent == rooted_equivalent(u, t, ctx).equivalent


@pytest.mark.parametrize("seed", range(40))
def test_refinement_agrees_with_oracle(seed):
    pts = random_pts(random.Random(seed), max_states=5)
    fast = branching_partition(pts)
    assert is_branching_bisimulation(pts, fast)
    assert same_partition(fast, brute_force_partition(pts))


def test_minimize_counts_classes(tau):
    from pax.pts import explore
    sf, ctx = tau
    pts = explore(sf["Absorb"], ctx)
    part, n = minimize(pts)
    assert n == len(set(part)) <= pts.n
