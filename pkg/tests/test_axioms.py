import random

import pytest

from pax.axioms import AXIOMS, check_axiom, get_axiom

# Laws whose unrestricted form fails in the model: a probabilistic operand is
# resolved once per copy on one side and once on the other, or (CM1E') the
# parameters of a communication are taken from the left operand.
UNSOUND = {"A4", "CM1E'", "CM3", "CM4", "CM8", "CM9", "GC7", "pBED"}


@pytest.mark.parametrize("name", [a.name for a in AXIOMS if a.name not in UNSOUND])
def test_axiom_instances_hold(name):
    rep = check_axiom(get_axiom(name), 15, random.Random(name))
    assert rep.checked > 0
    assert not rep.failures, rep.failures[0]


def test_a4_counterexample_exists():
    rep = check_axiom(get_axiom("A4"), 200, random.Random("A4"))
    assert rep.failures
