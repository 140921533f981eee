"""Do two components interfere through shared variables?

A component T runs v := v * w and then, if v = 1, copies v into w.  Put in
parallel with v := v / w, running both under one evaluation map or each
under its own copy gives the same behaviour from v = w = 1.  With v := v + w
the shared run can observe the other component's update, and it shows.

    python3 demos/interference.py
"""
from pax import EvalMap, interference_free
from pax.pretty import pretty
from pax.selftest import bundled

sf = bundled("interference")
ctx = sf.context()
sigma = EvalMap({"v": 1, "w": 1})

for other in ("Div", "Add"):
    v = interference_free(sigma, sf["T"], sf[other], ctx)
    print(f"T with {pretty(sf[other])}: {'no interference' if v.equivalent else 'interference'}")
    if v.evidence:
        print("   ", v.evidence)
