"""Branching and rooted branching bisimulation on finite systems.

A state is *resolved* under an evaluation map when its distribution is the
point mass on itself.  Steps and termination are compared between resolved
states only; a state that still has to resolve a probabilistic choice is
judged by the probability it sends into each class.  Every resolution target
is itself resolved, so one level of lifting suffices.

:func:`branching_partition` computes the coarsest branching bisimulation by
signature refinement.  The signature of a resolved state ``s`` records

* whether ``s`` terminates,
* every observable step ``(label, target block)`` available from a state
  reachable from ``s`` along internal moves (tau steps and positive
  probability steps) that stay inside the block of ``s``.

A tau step back into the own block is not observable when the block does not
terminate: the other side may stutter.  An unresolved state gets the mass its
targets send to each resolved signature; a point mass makes it
indistinguishable from its targets.

:func:`rooted_partition` groups resolved states by termination and first
steps into branching classes, and lifts unresolved states the same way.

:func:`brute_force_partition` is an independent oracle that enumerates every
equivalence relation on a small system and checks the transfer conditions
literally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import terms as T
from .pts import PTS, explore, DEFAULT_MAX_STATES
from .sos import Engine
from .meadow import format_rational


Partition = list[int]   # state index -> block id, ids numbered by first occurrence


def _renumber(keys: list) -> Partition:
    ids: dict = {}
    return [ids.setdefault(k, len(ids)) for k in keys]


def blocks(part: Partition) -> list[list[int]]:
    out: dict[int, list[int]] = {}
    for i, b in enumerate(part):
        out.setdefault(b, []).append(i)
    return [out[b] for b in sorted(out)]


def same_partition(p: Partition, q: Partition) -> bool:
    return _renumber(p) == _renumber(q)


def _tau(pts: PTS) -> int | None:
    if pts.tau is not None:
        return pts.tau
    return pts.labels.index("tau") if "tau" in pts.labels else None


def _dist_sig(pts: PTS, part: Partition, i: int, k: int) -> tuple:
    acc: dict[int, Fraction] = {}
    for j, p in pts.dist[i][k]:
        acc[part[j]] = acc.get(part[j], 0) + p
    return tuple(sorted(acc.items()))


def _inert_closure(pts: PTS, part: Partition, i: int, k: int, tau: int | None) -> list[int]:
    b = part[i]
    seen = {i}
    stack = [i]
    while stack:
        s = stack.pop()
        for j, p in pts.dist[s][k]:
            if part[j] == b and j not in seen:
                seen.add(j)
                stack.append(j)
        if tau is not None:
            for lab, j in pts.steps[s][k]:
                if lab == tau and part[j] == b and j not in seen:
                    seen.add(j)
                    stack.append(j)
    return sorted(seen)


def resolved(pts: PTS, i: int, k: int) -> bool:
    row = pts.dist[i][k]
    return len(row) == 1 and row[0][0] == i


def _lift(pts: PTS, comps: list[list], i: int, k: int):
    """Mass the targets of ``i`` send to each resolved component under map ``k``."""
    acc: dict = {}
    for j, p in pts.dist[i][k]:
        c = comps[j][k] if comps[j][k] is not None else ("unresolved", j)
        acc[c] = acc.get(c, 0) + p
    return tuple(sorted(acc.items(), key=repr))


def _lifted_keys(pts: PTS, comps: list[list]) -> list[tuple]:
    return [tuple(_lift(pts, comps, i, k) for k in range(len(pts.sigmas))) for i in range(pts.n)]


def _observations(pts: PTS, part: Partition, i: int, k: int, tau: int | None) -> tuple:
    b = part[i]
    obs = set()
    for s in _inert_closure(pts, part, i, k, tau):
        for lab, j in pts.steps[s][k]:
            if lab == tau and part[j] == b and not pts.term[s][k]:
                continue
            obs.add((lab, part[j]))
    return tuple(sorted(obs))


def _branching_comps(pts: PTS, part: Partition, tau: int | None) -> list[list]:
    return [[(part[i], pts.term[i][k], _observations(pts, part, i, k, tau)) if resolved(pts, i, k) else None
             for k in range(len(pts.sigmas))] for i in range(pts.n)]


def _signature(pts: PTS, part: Partition, i: int, tau: int | None) -> tuple:
    comps = _branching_comps(pts, part, tau)
    return (part[i],) + tuple(_lift(pts, comps, i, k) for k in range(len(pts.sigmas)))


def branching_partition(pts: PTS) -> Partition:
    """The coarsest branching bisimulation on ``pts``."""
    tau = _tau(pts)
    part = [0] * pts.n
    count = 1
    while True:
        keys = _lifted_keys(pts, _branching_comps(pts, part, tau))
        part = _renumber([(part[i], keys[i]) for i in range(pts.n)])
        new = max(part, default=-1) + 1
        if new == count:
            return part
        count = new


def _root_comps(pts: PTS, bpart: Partition) -> list[list]:
    return [[(pts.term[i][k], tuple(sorted({(lab, bpart[j]) for lab, j in pts.steps[i][k]})))
             if resolved(pts, i, k) else None
             for k in range(len(pts.sigmas))] for i in range(pts.n)]


def rooted_partition(pts: PTS, bpart: Partition | None = None) -> Partition:
    """Resolved states with equal termination and equal first steps into
    branching classes, and unresolved states with equal masses over those."""
    if bpart is None:
        bpart = branching_partition(pts)
    return _renumber(_lifted_keys(pts, _root_comps(pts, bpart)))


# --------------------------------------------------------------------------
# verdicts

@dataclass
class Verdict:
    equivalent: bool
    evidence: str = ""
    pts: PTS | None = field(default=None, repr=False)

    def __bool__(self) -> bool:
        return self.equivalent

    def __str__(self) -> str:
        head = "equivalent" if self.equivalent else "inequivalent"
        return f"{head}: {self.evidence}" if self.evidence else head


def _explain_rooted(pts: PTS, bpart: Partition, rpart: Partition, a: int, b: int) -> str:
    for k, sigma in enumerate(pts.sigmas):
        where = f" under {sigma}" if len(pts.sigmas) > 1 else ""
        if resolved(pts, a, k) and resolved(pts, b, k):
            if pts.term[a][k] != pts.term[b][k]:
                who = a if pts.term[a][k] else b
                return f"only {pts.names[who]} terminates{where}"
            for x, y in ((a, b), (b, a)):
                have = {(lab, bpart[j]) for lab, j in pts.steps[y][k]}
                for lab, j in pts.steps[x][k]:
                    if (lab, bpart[j]) not in have:
                        return (f"{pts.names[x]} --{pts.labels[lab]}--> {pts.names[j]}{where} "
                                f"is not matched by {pts.names[y]}")
        da, db = _dist_sig(pts, rpart, a, k), _dist_sig(pts, rpart, b, k)
        if da != db:
            ma, mb = dict(da), dict(db)
            for c in sorted(set(ma) | set(mb)):
                if ma.get(c, 0) != mb.get(c, 0):
                    rep = rpart.index(c)
                    return (f"probability of reaching the class of {pts.names[rep]}{where} is "
                            f"{format_rational(ma.get(c, Fraction(0)))} versus "
                            f"{format_rational(mb.get(c, Fraction(0)))}")
    return "the roots are separated after probabilistic choices are resolved"


def _explain_branching(pts: PTS, part: Partition, a: int, b: int) -> str:
    tau = _tau(pts)
    comps = _branching_comps(pts, part, tau)
    for k, sigma in enumerate(pts.sigmas):
        where = f" under {sigma}" if len(pts.sigmas) > 1 else ""
        ca, cb = comps[a][k], comps[b][k]
        if ca is None or cb is None:
            if _dist_sig(pts, part, a, k) != _dist_sig(pts, part, b, k):
                return f"different probability masses over classes{where}"
            continue
        if ca[1] != cb[1]:
            return f"only {pts.names[a if ca[1] else b]} terminates{where}"
        diff = sorted(set(ca[2]) ^ set(cb[2]))
        if diff:
            lab, c = diff[0]
            who = a if (lab, c) in ca[2] else b
            return f"{pts.names[who]} can do {pts.labels[lab]}{where} into a class the other cannot reach"
    return "the states are separated by later refinement steps"


def rooted_equivalent(t1: T.Proc, t2: T.Proc, ctx: T.Context | None = None, *,
                      max_states: int = DEFAULT_MAX_STATES, engine: Engine | None = None) -> Verdict:
    pts = explore([t1, t2], ctx, max_states=max_states, engine=engine)
    a, b = pts.roots
    bpart = branching_partition(pts)
    rpart = rooted_partition(pts, bpart)
    if rpart[a] == rpart[b]:
        return Verdict(True, "", pts)
    return Verdict(False, _explain_rooted(pts, bpart, rpart, a, b), pts)


def branching_equivalent(t1: T.Proc, t2: T.Proc, ctx: T.Context | None = None, *,
                         max_states: int = DEFAULT_MAX_STATES, engine: Engine | None = None) -> Verdict:
    pts = explore([t1, t2], ctx, max_states=max_states, engine=engine)
    a, b = pts.roots
    part = branching_partition(pts)
    if part[a] == part[b]:
        return Verdict(True, "", pts)
    return Verdict(False, _explain_branching(pts, part, a, b), pts)


def interference_free(sigma, t1: T.Proc, t2: T.Proc, ctx: T.Context | None = None, **kw) -> Verdict:
    """``V_sigma(t1 || t2)`` against ``V_sigma(t1) || V_sigma(t2)``."""
    joint = T.Eval(sigma, T.Par(t1, t2))
    apart = T.Par(T.Eval(sigma, t1), T.Eval(sigma, t2))
    return rooted_equivalent(joint, apart, ctx, **kw)


# --------------------------------------------------------------------------
# the oracle

class OracleSizeError(ValueError):
    pass


def _set_partitions(n: int):
    """Restricted growth strings of length n."""
    if n == 0:
        yield []
        return
    a = [0] * n

    def rec(i: int, m: int):
        if i == n:
            yield list(a)
            return
        for v in range(m + 1):
            a[i] = v
            yield from rec(i + 1, max(m, v + 1) if v == m else m)

    yield from rec(1, 1)


def _paths_within(pts: PTS, part: Partition, start: int, k: int, tau: int | None, block: int) -> set[int]:
    """States reachable from ``start`` by internal moves whose every state lies in ``block``."""
    if part[start] != block:
        return set()
    seen = {start}
    stack = [start]
    while stack:
        s = stack.pop()
        nxt = [j for j, p in pts.dist[s][k] if p > 0]
        if tau is not None:
            nxt += [j for lab, j in pts.steps[s][k] if lab == tau]
        for j in nxt:
            if part[j] == block and j not in seen:
                seen.add(j)
                stack.append(j)
    return seen


def is_branching_bisimulation(pts: PTS, part: Partition) -> bool:
    """Check the transfer conditions literally for every related pair: equal
    masses over classes always, steps and termination between resolved states."""
    tau = _tau(pts)
    n, m = pts.n, len(pts.sigmas)
    for k in range(m):
        dsig = [_dist_sig(pts, part, i, k) for i in range(n)]
        for t1 in range(n):
            for t2 in range(n):
                if t1 == t2 or part[t1] != part[t2]:
                    continue
                if dsig[t1] != dsig[t2]:
                    return False
                if not (resolved(pts, t1, k) and resolved(pts, t2, k)):
                    continue
                if pts.term[t1][k] and not pts.term[t2][k]:
                    return False
                path = _paths_within(pts, part, t2, k, tau, part[t1])
                for lab, t1p in pts.steps[t1][k]:
                    ok = False
                    for t2n in path:
                        if any(l2 == lab and part[t2p] == part[t1p] for l2, t2p in pts.steps[t2n][k]):
                            ok = True
                            break
                        if lab == tau and part[t1p] == part[t2n] and not pts.term[t2n][k]:
                            ok = True
                            break
                    if not ok:
                        return False
    return True


def brute_force_partition(pts: PTS, max_states: int = 10) -> Partition:
    """The largest branching bisimulation, by enumerating all equivalences."""
    n = pts.n
    if n > max_states:
        raise OracleSizeError(f"brute force is limited to {max_states} states, got {n}")
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for part in _set_partitions(n):
        if is_branching_bisimulation(pts, part):
            first: dict[int, int] = {}
            for i, b in enumerate(part):
                if b in first:
                    ra, rb = find(first[b]), find(i)
                    if ra != rb:
                        parent[rb] = ra
                else:
                    first[b] = i
    return _renumber([find(i) for i in range(n)])


def minimize(pts: PTS) -> tuple[Partition, int]:
    part = branching_partition(pts)
    return part, max(part, default=-1) + 1


def describe_partition(pts: PTS, part: Partition) -> str:
    lines = []
    for n, members in enumerate(blocks(part)):
        lines.append(f"block {n}: " + ", ".join(pts.names[i] for i in members))
    return "\n".join(lines)


__all__ = [
    "Partition", "Verdict", "branching_partition", "rooted_partition", "rooted_equivalent",
    "branching_equivalent", "interference_free", "brute_force_partition",
    "is_branching_bisimulation", "same_partition", "blocks", "OracleSizeError",
    "describe_partition", "minimize", "resolved",
]
