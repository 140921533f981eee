"""Seeded random executions.

Each visited state first resolves its probabilistic choice by an exact
inverse-CDF draw, then a scheduler picks one of the enabled action steps or
termination.  Schedulers are not part of the semantics; they are a tool for
exploring it.  Given the same root, initial map, seed, policy and step limit,
a run is reproducible bit for bit.
"""

from __future__ import annotations

import bisect
import hashlib
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt
from statistics import NormalDist
from typing import Callable, Mapping, Sequence

from .data import EMPTY_MAP, EvalMap
from .pretty import pretty
from . import terms as T
from .sos import Engine

DEFAULT_MAX_STEPS = 10_000
_SCALE = 1 << 64

TERMINATE = "<terminate>"


@dataclass(frozen=True)
class Option:
    label: str | None       # None for termination
    target: T.Proc | None

    @property
    def name(self) -> str:
        return TERMINATE if self.label is None else self.label


@dataclass
class Trace:
    events: list[tuple] = field(default_factory=list)   # ("draw", term, p) | ("act", label)
    status: str = "step-limit"                          # terminated | deadlocked | step-limit
    final_map: EvalMap | None = None
    final_state: str = ""

    @property
    def actions(self) -> list[str]:
        return [e[1] for e in self.events if e[0] == "act"]

    @property
    def draws(self) -> list[tuple[str, Fraction]]:
        return [(e[1], e[2]) for e in self.events if e[0] == "draw"]


# -- schedulers ----------------------------------------------------------------

class Scheduler:
    name = "scheduler"

    def choose(self, options: Sequence[Option], rng: random.Random) -> int:
        raise NotImplementedError


class UniformScheduler(Scheduler):
    name = "uniform"

    def choose(self, options, rng):
        return rng.randrange(len(options))


class FirstScheduler(Scheduler):
    """Always the first option in canonical order (actions by label and target, then termination)."""
    name = "first"

    def choose(self, options, rng):
        return 0


class PriorityScheduler(Scheduler):
    """Prefer actions whose name comes first in ``order``; ``<terminate>`` may be listed too."""
    name = "priority"

    def __init__(self, order: Sequence[str]):
        self.order = list(order)
        self.rank = {n: i for i, n in enumerate(self.order)}

    def choose(self, options, rng):
        def rank(i):
            o = options[i]
            key = TERMINATE if o.label is None else _action_name(o.label)
            return (self.rank.get(key, len(self.rank)), i)
        return min(range(len(options)), key=rank)


def _action_name(label: str) -> str:
    if label.startswith("("):
        return label[1:].split(":=")[0].strip()
    return label.split("(")[0]


def make_scheduler(policy: str | Scheduler | Sequence[str] | None) -> Scheduler:
    if policy is None:
        return UniformScheduler()
    if isinstance(policy, Scheduler):
        return policy
    if isinstance(policy, str):
        if policy == "uniform":
            return UniformScheduler()
        if policy == "first":
            return FirstScheduler()
        if policy.startswith("priority:"):
            return PriorityScheduler([p.strip() for p in policy[len("priority:"):].split(",") if p.strip()])
        raise ValueError(f"unknown scheduler policy {policy!r}")
    return PriorityScheduler(policy)


# -- compiled states -------------------------------------------------------------

class _Node:
    __slots__ = ("support", "thresholds", "probs", "options")

    def __init__(self):
        self.support = None
        self.thresholds = None
        self.probs = None
        self.options = None


class Simulator:
    """Runs executions of a root term, caching the semantics of visited states."""

    def __init__(self, root: T.Proc, ctx: T.Context | None = None, sigma0: Mapping[str, int] | None = None,
                 engine: Engine | None = None):
        if not T.is_closed(root):
            raise T.OpenTermError("simulation needs a closed root")
        self.root = root
        self.ctx = ctx or (engine.ctx if engine else T.Context())
        self.engine = engine or Engine(self.ctx)
        self.sigma = EvalMap(sigma0) if sigma0 is not None else EMPTY_MAP
        self.nodes: dict[T.Proc, _Node] = {}

    def _node(self, t: T.Proc) -> _Node:
        node = self.nodes.get(t)
        if node is None:
            node = _Node()
            eng = self.engine
            d = eng.distribution(self.sigma, t)
            if len(d) > 1:
                items = sorted(d.items(), key=lambda kv: pretty(kv[0]))
                node.support = [u for u, _ in items]
                node.probs = [p for _, p in items]
                cum = Fraction(0)
                th = []
                for _, p in items:
                    cum += p
                    th.append(-((-cum * _SCALE) // 1))    # ceil(cum * 2^64)
                node.thresholds = th
            opts = {(pretty(a), u) for a, u in eng.steps(self.sigma, t)}
            options = [Option(lab, u) for lab, u in sorted(opts, key=lambda o: (o[0], pretty(o[1])))]
            if eng.terminates(self.sigma, t):
                options.append(Option(None, None))
            node.options = options
            self.nodes[t] = node
        return node

    def run(self, seed: int, policy: Scheduler | str | None = None, max_steps: int = DEFAULT_MAX_STEPS,
            record: bool = True) -> Trace:
        sched = make_scheduler(policy)
        rng = random.Random(seed)
        trace = Trace()
        t = self.root
        steps = 0
        while True:
            node = self._node(t)
            guard = 0
            while node.support is not None:
                u = rng.getrandbits(64)
                k = bisect.bisect_right(node.thresholds, u)
                if record:
                    trace.events.append(("draw", pretty(node.support[k]), node.probs[k]))
                t = node.support[k]
                node = self._node(t)
                guard += 1
                if guard > 64:
                    raise RuntimeError("probabilistic resolution did not settle")
            if not node.options:
                trace.status = "deadlocked"
                break
            if steps >= max_steps:
                trace.status = "step-limit"
                break
            opt = node.options[sched.choose(node.options, rng)] if len(node.options) > 1 else node.options[0]
            if opt.label is None:
                trace.status = "terminated"
                break
            trace.events.append(("act", opt.label))
            t = opt.target
            steps += 1
        trace.final_state = pretty(t)
        trace.final_map = t.sigma if isinstance(t, T.Eval) else (self.sigma if len(self.sigma) else None)
        return trace


def derive_seed(seed: int, i: int) -> int:
    h = hashlib.blake2b(f"{seed}:{i}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big")


def run_once(root: T.Proc, sigma0: Mapping[str, int] | None = None, seed: int = 0,
             policy: Scheduler | str | None = None, max_steps: int = DEFAULT_MAX_STEPS,
             ctx: T.Context | None = None) -> Trace:
    return Simulator(root, ctx, sigma0).run(seed, policy, max_steps)


@dataclass(frozen=True)
class Estimate:
    successes: int
    runs: int
    low: float
    high: float

    @property
    def frequency(self) -> Fraction:
        return Fraction(self.successes, self.runs)

    @property
    def half_width(self) -> float:
        return (self.high - self.low) / 2

    def contains(self, p) -> bool:
        return self.low <= float(p) <= self.high

    def __str__(self) -> str:
        return (f"{self.successes}/{self.runs} = {float(self.frequency):.6f} "
                f"[{self.low:.6f}, {self.high:.6f}]")


def wilson_interval(successes: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    if n < 1:
        raise ValueError("need at least one run")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = successes / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def estimate(root: T.Proc, sigma0: Mapping[str, int] | None, event: Callable[[Trace], bool],
             n_runs: int, seed: int = 0, policy: Scheduler | str | None = None,
             ctx: T.Context | None = None, max_steps: int = DEFAULT_MAX_STEPS,
             simulator: Simulator | None = None) -> Estimate:
    """Frequency of ``event`` over ``n_runs`` runs with a 95% Wilson interval."""
    if n_runs < 1:
        raise ValueError("n_runs must be at least 1")
    sim = simulator or Simulator(root, ctx, sigma0)
    hits = 0
    for i in range(n_runs):
        if event(sim.run(derive_seed(seed, i), policy, max_steps)):
            hits += 1
    low, high = wilson_interval(hits, n_runs)
    return Estimate(hits, n_runs, low, high)


def performed(label: str) -> Callable[[Trace], bool]:
    return lambda tr: label in tr.actions


def final_value(var: str, value: int) -> Callable[[Trace], bool]:
    return lambda tr: tr.status == "terminated" and tr.final_map is not None and tr.final_map.get(var) == value
