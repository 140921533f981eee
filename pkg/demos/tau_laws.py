"""When is a silent step invisible?

Rooted branching bisimulation lets an internal step disappear only where it
cannot be noticed.  Before a probabilistic choice it *can* be noticed: the
tau commits to the choice being resolved later.

    python3 demos/tau_laws.py
"""
from pathlib import Path

from pax import branching_equivalent, parse_file, rooted_equivalent

sf = parse_file(Path(__file__).with_name("tau.pax"))
ctx = sf.context()


def show(left, right, check=rooted_equivalent):
    v = check(sf[left], sf[right], ctx)
    verdict = "equivalent" if v.equivalent else "inequivalent"
    print(f"{left:9} vs {right:8} [{check.__name__}] {verdict}")
    if v.evidence:
        print("    ", v.evidence)


# A leading tau is visible at the root but not further in.
show("TA", "A")
show("TA", "A", branching_equivalent)

# a.(tau.coin) and a.coin differ: the tau in front of the coin is not inert.
show("ATCoin", "ACoin")
show("TEpsCoin", "EpsCoin")

# An inert tau whose alternatives are still available afterwards is absorbed.
show("Absorb", "Merged")
