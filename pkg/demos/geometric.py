"""A counter that stops with probability 1/2 at every round.

The bundled geometric example counts v up from 0 and stops after each
increment with probability 1/2, so the final value n has probability
1/2^(n+1) (cut off at the data bound, where the counter saturates).  We
build the finite transition system and solve for the outcome distribution
exactly.

    python3 demos/geometric.py
"""
from pax import explore, outcome_distribution
from pax.meadow import format_rational
from pax.selftest import bundled

sf = bundled("geometric")
pts = explore(sf["Run"], sf.context())
print(pts.summary())

dist = outcome_distribution(pts)
for sigma, p in sorted(dist.items(), key=lambda kv: kv[0]["v"])[:8]:
    print(f"v = {sigma['v']:2}  {format_rational(p)}")
print("total:", format_rational(sum(dist.values())))
