"""The bundled example suite behind ``pax selftest``.

Each case loads one of the ``.pax`` files shipped in ``pax/data`` and checks
a known verdict or an exact probability.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Callable

from . import terms as T
from .bisim import branching_equivalent, rooted_equivalent
from .data import EvalMap
from .meadow import format_rational
from .parser import SpecFile, parse
from .pts import explore, outcome_distribution
from .rewrite import prove_equal
from .simulate import estimate, performed
from .sos import Engine


@dataclass
class CaseResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail} ({self.seconds:.2f}s)"


def bundled(name: str) -> SpecFile:
    """Parse one of the bundled example files, e.g. ``bundled("die")``."""
    text = resources.files("pax").joinpath("data", f"{name}.pax").read_text(encoding="utf-8")
    return parse(text, f"{name}.pax")


def bundled_path(name: str) -> str:
    return str(resources.files("pax").joinpath("data", f"{name}.pax"))


def _die() -> tuple[bool, str]:
    sf = bundled("die")
    ctx = sf.context()
    d = Engine(ctx).distribution(EvalMap(), sf["Die"])
    exact = len(d) == 6 and all(p == Fraction(1, 6) for p in d.values())
    same = rooted_equivalent(sf["Die"], sf["Nested"], ctx).equivalent
    est = estimate(sf["Die"], None, performed("throw6"), 6000, seed=1, ctx=ctx)
    ok = exact and same and est.contains(Fraction(1, 6))
    return ok, f"six masses of 1/6: {exact}; nested form equivalent: {same}; throw6 {est}"


def _geometric() -> tuple[bool, str]:
    sf = bundled("geometric")
    od = outcome_distribution(explore(sf["Run"], sf.context()))
    got = {m["v"]: p for m, p in od.items()}
    bad = [n for n in range(5) if got.get(n) != Fraction(1, 2 ** (n + 1))]
    shown = ", ".join(f"{n}:{format_rational(got.get(n, Fraction(0)))}" for n in range(5))
    return not bad, f"P(final v = n) for n = 0..4: {shown}"


def _majority() -> tuple[bool, str]:
    sf = bundled("majority")
    ctx = sf.context()
    worst, count = Fraction(1), 0
    for vals in itertools.product(range(sf.bound + 1), repeat=3):
        if max(vals.count(x) for x in vals) * 2 <= 3:
            continue
        sigma = EvalMap({"v1": vals[0], "v2": vals[1], "v3": vals[2], "v": 0, "c": 0, "w": 0})
        od = outcome_distribution(explore(T.Eval(sigma, sf["Majority"]), ctx))
        p = sum((q for m, q in od.items() if m["w"] == 1), Fraction(0))
        worst = min(worst, p)
        count += 1
    return worst >= Fraction(1, 2), f"{count} initial maps with a strict majority; least P(w = 1) = {format_rational(worst)}"


def _tau_laws() -> tuple[bool, str]:
    sf = bundled("tau")
    ctx = sf.context()
    checks = [
        ("tau.a vs a rooted", rooted_equivalent(sf["TA"], sf["A"], ctx).equivalent, False),
        ("tau.a vs a branching", branching_equivalent(sf["TA"], sf["A"], ctx).equivalent, True),
        ("a.(tau.coin) vs a.coin", rooted_equivalent(sf["ATCoin"], sf["ACoin"], ctx).equivalent, False),
        ("(tau.eps).coin vs eps.coin", rooted_equivalent(sf["TEpsCoin"], sf["EpsCoin"], ctx).equivalent, False),
        ("a.(tau.(b+c)+b) vs a.(b+c)", rooted_equivalent(sf["Absorb"], sf["Merged"], ctx).equivalent, True),
    ]
    wrong = [n for n, got, want in checks if got != want]
    return not wrong, "all verdicts as expected" if not wrong else "wrong: " + "; ".join(wrong)


def _interference() -> tuple[bool, str]:
    sf = bundled("interference")
    ctx = sf.context()
    div = rooted_equivalent(sf["Joint"], sf["Apart"], ctx).equivalent
    add = rooted_equivalent(sf["JointAdd"], sf["ApartAdd"], ctx).equivalent
    return div and not add, f"with v := v / w: {div}; with v := v + w: {add}"


def _incompleteness() -> tuple[bool, str]:
    sf = bundled("incompleteness")
    ctx = sf.context()
    eq = rooted_equivalent(sf["Hidden"], sf["Plain"], ctx).equivalent
    proof = prove_equal(sf["Hidden"], sf["Plain"], ctx).verdict
    return eq and proof == "unknown", f"equivalent: {eq}; rewriting: {proof}"


CASES: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
    ("die", _die),
    ("majority", _majority),
    ("geometric", _geometric),
    ("tau-laws", _tau_laws),
    ("interference", _interference),
    ("incompleteness", _incompleteness),
]


def run_case(name: str) -> CaseResult:
    fn = dict(CASES)[name]
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:    # a crash is a failed case, not a crashed suite
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CaseResult(name, ok, detail, time.perf_counter() - t0)


def run_all(jobs: int = 1) -> list[CaseResult]:
    names = [n for n, _ in CASES]
    if jobs <= 1:
        return [run_case(n) for n in names]
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_case, names))
