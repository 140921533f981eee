"""Equational reasoning by rewriting to normal form.

The rewriter orients the axioms and normalises recursion-free terms.  Every
step names the law it used, and replaying the trace gives back the normal
form.  When the normal forms differ the answer is "unknown": the axioms may
still prove the equation, or it may be false.

    python3 demos/rewriting.py
"""
from pax import normalize, parse_term, prove_equal, rooted_equivalent
from pax.parser import spec_with
from pax.pretty import pretty

sf = spec_with(actions=["a", "b", "c"], variables=["v"], bound=2)
ctx = sf.context()

t = parse_term("(a + a) . pc{1/4: b, 3/4: b} + delta . c", sf)
nf, trace = normalize(t, ctx)
print(pretty(t), "=>", pretty(nf))
print(trace)
assert trace.replay() is nf
print("sound here:", rooted_equivalent(t, nf, ctx).equivalent)

print(prove_equal(parse_term("a . (b + c)", sf), parse_term("a . (c + b)", sf), ctx))
print(prove_equal(parse_term("a . b", sf), parse_term("a . c", sf), ctx))
