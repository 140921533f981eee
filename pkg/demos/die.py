"""Throwing a fair die, exactly and by sampling.

The die is a six-way probabilistic choice between the actions throw1..throw6.
We compute its distribution exactly, check it against the nested binary
form, and then estimate P(throw6) with the simulator.

    python3 demos/die.py
"""
from fractions import Fraction
from pathlib import Path

from pax import Engine, EvalMap, parse_file, rooted_equivalent
from pax.simulate import estimate, performed
from pax.meadow import format_rational

sf = parse_file(Path(__file__).with_name("die.pax"))
ctx = sf.context()

# The one-step distribution: each throw gets mass 1/6, exactly.
for term, p in sorted(Engine(ctx).distribution(EvalMap(), sf["Die"]).items(), key=lambda kv: str(kv[0])):
    print(f"{str(term):8} {format_rational(p)}")

# pc{...} with six branches is stored as nested binary choices, and the file
# spells the same die out by hand; the two are bisimilar.
print("nested form equivalent:", rooted_equivalent(sf["Die"], sf["Nested"], ctx).equivalent)

# Monte Carlo: 95% Wilson interval for the frequency of throw6.
est = estimate(sf["Die"], None, performed("throw6"), 20_000, seed=7, ctx=ctx)
print("throw6:", est, "covers 1/6:", est.contains(Fraction(1, 6)))
