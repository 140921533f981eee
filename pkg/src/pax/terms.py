"""Process terms.

Every node is hash-consed: constructing a node that already exists returns
the existing object, so equality is identity and terms can be used as memo
keys at no cost.  Nodes are immutable and pickle back into the intern table.
"""

from __future__ import annotations

import itertools
import weakref
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import meadow
from .data import (
    TRUE, Cond, DataUniverse, EvalMap, as_data, canon_bound,
    flex_vars as _data_flex_vars,
)


class TermError(Exception):
    pass


class UnknownVariableError(TermError, KeyError):
    pass


class OpenTermError(TermError):
    """A recursion variable occurs outside a recursive specification."""


_INTERN: "weakref.WeakValueDictionary[tuple, Proc]" = weakref.WeakValueDictionary()


class Proc:
    __slots__ = ("__weakref__", "_pp", "_fv", "_size")
    _fields: tuple[str, ...] = ()

    def __new__(cls, *args):
        args = cls._coerce(*args)
        key = (cls, args)
        node = _INTERN.get(key)
        if node is None:
            node = object.__new__(cls)
            for name, value in zip(cls._fields, args):
                object.__setattr__(node, name, value)
            object.__setattr__(node, "_pp", None)
            object.__setattr__(node, "_fv", None)
            object.__setattr__(node, "_size", None)
            _INTERN[key] = node
        return node

    @classmethod
    def _coerce(cls, *args):
        if len(args) != len(cls._fields):
            raise TypeError(f"{cls.__name__} takes {len(cls._fields)} arguments")
        return args

    def __setattr__(self, name, value):
        raise AttributeError("process terms are immutable")

    def __reduce__(self):
        return (type(self), tuple(getattr(self, f) for f in self._fields))

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    def __repr__(self) -> str:
        from .pretty import pretty
        return f"<{type(self).__name__} {pretty(self)}>"

    def __str__(self) -> str:
        from .pretty import pretty
        return pretty(self)

    def children(self) -> tuple["Proc", ...]:
        return ()

    def rebuild(self, kids: Sequence["Proc"]) -> "Proc":
        return self

    @property
    def size(self) -> int:
        if self._size is None:
            object.__setattr__(self, "_size", 1 + sum(k.size for k in self.children()))
        return self._size


# -- atomic processes --------------------------------------------------------

class Act(Proc):
    """Basic action ``a`` (no data parameters)."""
    __slots__ = ("name",)
    _fields = ("name",)


class Tau(Proc):
    __slots__ = ()


class Delta(Proc):
    __slots__ = ()


class Eps(Proc):
    __slots__ = ()


class PAct(Proc):
    """Data-parameterized action ``a(e1, ..., en)`` with ``n >= 1``."""
    __slots__ = ("name", "args")
    _fields = ("name", "args")

    @classmethod
    def _coerce(cls, name, args):
        args = tuple(as_data(a) for a in args)
        if not args:
            raise TermError("parameterized actions need at least one argument")
        return (name, args)


class Assign(Proc):
    """Assignment action ``v := e``."""
    __slots__ = ("var", "expr")
    _fields = ("var", "expr")

    @classmethod
    def _coerce(cls, var, expr):
        return (var, as_data(expr))


TAU = Tau()
DELTA = Delta()
EPS = Eps()

ACTION_TYPES = (Act, PAct, Assign)


def action(name: str, *args) -> Proc:
    return PAct(name, args) if args else Act(name)


# -- operators ----------------------------------------------------------------

class _Binary(Proc):
    __slots__ = ("left", "right")
    _fields = ("left", "right")

    @classmethod
    def _coerce(cls, left, right):
        _check_proc(left)
        _check_proc(right)
        return (left, right)

    def children(self):
        return (self.left, self.right)

    def rebuild(self, kids):
        return type(self)(*kids)


class Alt(_Binary):
    __slots__ = ()


class Seq(_Binary):
    __slots__ = ()


class Par(_Binary):
    __slots__ = ()


class LMerge(_Binary):
    __slots__ = ()


class CMerge(_Binary):
    __slots__ = ()


class TermTest(Proc):
    """The termination operator (encapsulation of successful termination)."""
    __slots__ = ("body",)
    _fields = ("body",)

    def children(self):
        return (self.body,)

    def rebuild(self, kids):
        return TermTest(kids[0])


class Encap(Proc):
    __slots__ = ("actions", "body")
    _fields = ("actions", "body")

    @classmethod
    def _coerce(cls, actions, body):
        actions = frozenset(actions)
        for a in actions:
            if not isinstance(a, ACTION_TYPES):
                raise TermError(f"encapsulation sets contain atomic actions only, got {a!r}")
        _check_proc(body)
        return (actions, body)

    def children(self):
        return (self.body,)

    def rebuild(self, kids):
        return Encap(self.actions, kids[0])


class Hide(Proc):
    __slots__ = ("actions", "body")
    _fields = ("actions", "body")
    _coerce = Encap._coerce

    def children(self):
        return (self.body,)

    def rebuild(self, kids):
        return Hide(self.actions, kids[0])


class PChoice(Proc):
    """``left`` with probability ``prob``, ``right`` with ``1 - prob``."""
    __slots__ = ("prob", "left", "right")
    _fields = ("prob", "left", "right")

    @classmethod
    def _coerce(cls, prob, left, right):
        _check_proc(left)
        _check_proc(right)
        return (meadow.prob(prob), left, right)

    def children(self):
        return (self.left, self.right)

    def rebuild(self, kids):
        return PChoice(self.prob, *kids)


class Guard(Proc):
    __slots__ = ("cond", "body")
    _fields = ("cond", "body")

    @classmethod
    def _coerce(cls, cond, body):
        _check_proc(body)
        return (canon_bound(cond), body)

    def children(self):
        return (self.body,)

    def rebuild(self, kids):
        return Guard(self.cond, kids[0])


class Eval(Proc):
    __slots__ = ("sigma", "body")
    _fields = ("sigma", "body")

    @classmethod
    def _coerce(cls, sigma, body):
        if not isinstance(sigma, EvalMap):
            sigma = EvalMap(sigma)
        _check_proc(body)
        return (sigma, body)

    def children(self):
        return (self.body,)

    def rebuild(self, kids):
        return Eval(self.sigma, kids[0])


class RecVar(Proc):
    __slots__ = ("name",)
    _fields = ("name",)


class RecConst(Proc):
    """``<X | E>``, the ``X`` component of the solution of ``E``."""
    __slots__ = ("var", "spec")
    _fields = ("var", "spec")

    @classmethod
    def _coerce(cls, var, spec):
        if var not in spec.variables:
            raise TermError(f"{var} is not a variable of specification {spec.name}")
        if spec not in _VALIDATED:
            check_guarded_linear(spec)
            _VALIDATED.add(spec)
        return (var, spec)


_VALIDATED: set = set()


def _check_proc(x) -> None:
    if not isinstance(x, Proc):
        raise TypeError(f"expected a process term, got {x!r}")


# --------------------------------------------------------------------------
# recursive specifications

@dataclass(frozen=True)
class RecSpec:
    """Named finite set of recursion equations ``X = t``."""

    name: str
    equations: tuple[tuple[str, Proc], ...]

    def __post_init__(self):
        names = [x for x, _ in self.equations]
        if len(set(names)) != len(names):
            raise TermError(f"duplicate recursion variable in {self.name}")
        defined = set(names)
        for x, rhs in self.equations:
            for y in rec_vars(rhs):
                if y not in defined:
                    raise TermError(f"{y} occurs in {self.name} but has no equation")

    @classmethod
    def of(cls, name: str, equations: Mapping[str, Proc] | Iterable[tuple[str, Proc]]) -> "RecSpec":
        items = equations.items() if isinstance(equations, Mapping) else equations
        return cls(name, tuple(items))

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(x for x, _ in self.equations)

    def rhs(self, var: str) -> Proc:
        for x, t in self.equations:
            if x == var:
                return t
        raise UnknownVariableError(f"{var} is not a variable of specification {self.name}")

    def const(self, var: str) -> RecConst:
        return RecConst(var, self)

    def __str__(self) -> str:
        from .pretty import pretty_recspec
        return pretty_recspec(self)


def rec_vars(t: Proc) -> set[str]:
    """Free recursion variables of ``t``."""
    out: set[str] = set()
    stack = [t]
    seen = set()
    while stack:
        u = stack.pop()
        if id(u) in seen:
            continue
        seen.add(id(u))
        if isinstance(u, RecVar):
            out.add(u.name)
        stack.extend(u.children())
    return out


def is_closed(t: Proc) -> bool:
    return not rec_vars(t)


def substitute(t: Proc, mapping: Mapping[str, Proc]) -> Proc:
    memo: dict[int, Proc] = {}

    def go(u: Proc) -> Proc:
        r = memo.get(id(u))
        if r is not None:
            return r
        if isinstance(u, RecVar):
            r = mapping.get(u.name, u)
        else:
            kids = u.children()
            r = u.rebuild([go(k) for k in kids]) if kids else u
        memo[id(u)] = r
        return r

    return go(t)


_UNFOLD: dict[tuple, Proc] = {}


def unfold(var: str, spec: RecSpec) -> Proc:
    """Right-hand side of ``var`` with each variable ``Y`` replaced by ``<Y|spec>``."""
    key = (var, spec)
    r = _UNFOLD.get(key)
    if r is None:
        rhs = spec.rhs(var)
        r = substitute(rhs, {y: RecConst(y, spec) for y in spec.variables})
        _UNFOLD[key] = r
    return r


# --------------------------------------------------------------------------
# linear terms and guardedness

def _is_prefix(alpha: Proc) -> bool:
    return isinstance(alpha, ACTION_TYPES) or alpha is TAU


def is_summand(t: Proc) -> bool:
    if not isinstance(t, Guard):
        return False
    b = t.body
    if b is EPS:
        return True
    return isinstance(b, Seq) and _is_prefix(b.left) and isinstance(b.right, RecVar)


def is_linear(t: Proc) -> bool:
    if t is DELTA or is_summand(t):
        return True
    if isinstance(t, Alt):
        return (t.left is not DELTA and t.right is not DELTA
                and is_linear(t.left) and is_linear(t.right))
    if isinstance(t, PChoice):
        return t.prob not in (0, 1) and is_linear(t.left) and is_linear(t.right)
    return False


def summands(t: Proc) -> list[Proc]:
    if is_summand(t):
        return [t]
    if isinstance(t, (Alt, PChoice)):
        return summands(t.left) + summands(t.right)
    return []


class NonLinearError(TermError):
    pass


def unguarded_graph(spec: RecSpec) -> dict[str, set[str]]:
    graph: dict[str, set[str]] = {}
    for x, rhs in spec.equations:
        if not is_linear(rhs):
            raise NonLinearError(f"right-hand side of {x} in {spec.name} is not linear")
        graph[x] = {s.body.right.name for s in summands(rhs)
                    if s.body is not EPS and s.body.left is TAU}
    return graph


def is_guarded_spec(spec: RecSpec) -> bool:
    graph = unguarded_graph(spec)
    state: dict[str, int] = {}

    def cyclic(x: str) -> bool:
        state[x] = 1
        for y in graph.get(x, ()):
            s = state.get(y, 0)
            if s == 1 or (s == 0 and cyclic(y)):
                return True
        state[x] = 2
        return False

    return not any(state.get(x, 0) == 0 and cyclic(x) for x in graph)


def check_guarded_linear(spec: RecSpec) -> None:
    if not is_guarded_spec(spec):
        raise TermError(f"specification {spec.name} has an unguarded cycle")


# --------------------------------------------------------------------------
# right-nested notations

def build_altn(terms: Sequence[Proc]) -> Proc:
    if not terms:
        return DELTA
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = Alt(t, out)
    return out


def build_prc(entries: Sequence[tuple]) -> Proc:
    """Right-nested probabilistic choice over ``(probability, term)`` pairs."""
    if not entries:
        raise TermError("a probabilistic choice needs at least one branch")
    weights = [meadow.prob(p) for p, _ in entries]
    if sum(weights) != 1:
        raise TermError(f"branch probabilities sum to {meadow.format_rational(sum(weights))}, not 1")
    return _prc(weights, [t for _, t in entries])


def _prc(weights: list[Fraction], terms: list[Proc]) -> Proc:
    if len(terms) == 1:
        return terms[0]
    p = weights[0]
    scale = meadow.inv(1 - p)
    rest = [w * scale for w in weights[1:]]
    return PChoice(p, terms[0], _prc(rest, terms[1:]))


def pchoice(p, left: Proc, right: Proc) -> PChoice:
    return PChoice(meadow.prob(p), left, right)


def seq(*terms: Proc) -> Proc:
    """Left-nested sequential composition of one or more terms."""
    out = terms[0]
    for t in terms[1:]:
        out = Seq(out, t)
    return out


def guard(cond: Cond, body: Proc) -> Guard:
    return Guard(cond, body)


# --------------------------------------------------------------------------
# free flexible variables (those read under the ambient evaluation map)

def _action_vars(a: Proc) -> frozenset[str]:
    if isinstance(a, PAct):
        return frozenset().union(*(_data_flex_vars(e) for e in a.args))
    if isinstance(a, Assign):
        return _data_flex_vars(a.expr)
    return frozenset()


_SPEC_FV: dict[RecSpec, frozenset[str]] = {}


def free_flex_vars(t: Proc) -> frozenset[str]:
    """Flexible variables that ``t``'s behaviour depends on via the ambient map.

    Variables under an evaluation operator are evaluated by that operator's
    map and do not count.  Encapsulation and abstraction sets are compared by
    validity and do not read the ambient map either.
    """
    fv = t._fv
    if fv is not None:
        return fv
    if isinstance(t, ACTION_TYPES):
        fv = _action_vars(t)
    elif isinstance(t, Eval):
        fv = frozenset()
    elif isinstance(t, Guard):
        fv = _data_flex_vars(t.cond) | free_flex_vars(t.body)
    elif isinstance(t, RecConst):
        fv = _SPEC_FV.get(t.spec)
        if fv is None:
            fv = frozenset().union(*(free_flex_vars(rhs) for _, rhs in t.spec.equations))
            _SPEC_FV[t.spec] = fv
    else:
        fv = frozenset().union(*(free_flex_vars(k) for k in t.children()))
    object.__setattr__(t, "_fv", fv)
    return fv


def is_eval_rooted(t: Proc) -> bool:
    return isinstance(t, Eval)


def iter_subterms(t: Proc) -> Iterable[Proc]:
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        stack.extend(reversed(u.children()))


def contains_recursion(t: Proc) -> bool:
    return any(isinstance(u, (RecConst, RecVar)) for u in iter_subterms(t))


# --------------------------------------------------------------------------
# communication and the signature

@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


class CommFunction:
    """Partial communication table over basic action names; absent means deadlock."""

    def __init__(self, table: Mapping[tuple[str, str], str] | None = None, symmetric: bool = False):
        t = dict(table or {})
        if symmetric:
            for (a, b), c in list(t.items()):
                t.setdefault((b, a), c)
        self.table: dict[tuple[str, str], str] = t

    def __call__(self, a: str, b: str) -> str | None:
        return self.table.get((a, b))

    def __eq__(self, other):
        return isinstance(other, CommFunction) and self.table == other.table

    def __hash__(self):
        return hash(frozenset(self.table.items()))

    def __repr__(self):
        return f"CommFunction({self.table!r})"

    def names(self) -> set[str]:
        out = set()
        for (a, b), c in self.table.items():
            out.update((a, b, c))
        return out


def validate_comm(gamma: CommFunction, actions: Iterable[str] = ()) -> list[Violation]:
    """Symmetry and associativity of the deadlock-completed table; empty list = ok."""
    out: list[Violation] = []
    for (a, b), c in sorted(gamma.table.items()):
        if c in ("tau", "delta") or a in ("tau", "delta") or b in ("tau", "delta"):
            out.append(Violation("silent", f"gamma({a},{b}) involves tau or delta"))
        other = gamma(b, a)
        if other != c:
            out.append(Violation("symmetry", f"gamma({a},{b}) = {c} but gamma({b},{a}) = {other or 'delta'}"))
    universe = sorted(set(actions) | gamma.names())

    def g(x, y):
        if x is None or y is None:
            return None
        return gamma(x, y)

    for a, b, c in itertools.product(universe, repeat=3):
        left = g(g(a, b), c)
        right = g(a, g(b, c))
        if left != right:
            out.append(Violation("associativity",
                                 f"gamma(gamma({a},{b}),{c}) = {left or 'delta'} "
                                 f"but gamma({a},gamma({b},{c})) = {right or 'delta'}"))
    return out


@dataclass
class Context:
    """Parameters of the theory: communication, data universe, flexible variables."""

    comm: CommFunction = field(default_factory=CommFunction)
    universe: DataUniverse = field(default_factory=DataUniverse)
    variables: tuple[str, ...] = ()
    actions: dict[str, set[int]] = field(default_factory=dict)

    def __post_init__(self):
        self._keys: dict[Proc, tuple] = {}

    def evalmap(self, assignment: Mapping[str, int] | None = None, **kw) -> EvalMap:
        """A total evaluation map over the declared variables (missing ones are 0)."""
        d = {v: 0 for v in self.variables}
        for k, v in {**(assignment or {}), **kw}.items():
            if self.variables and k not in d:
                from .data import UndeclaredVariableError
                raise UndeclaredVariableError(f"undeclared flexible variable {k!r}")
            d[k] = v
        return EvalMap(d)

    def action_key(self, a: Proc) -> tuple:
        """Key shared exactly by data-equivalent actions."""
        k = self._keys.get(a)
        if k is not None:
            return k
        if a is TAU:
            k = ("tau",)
        elif isinstance(a, Act):
            k = ("act", a.name)
        elif isinstance(a, PAct):
            k = ("pact", a.name, tuple(self.universe.semantic_key(e) for e in a.args))
        elif isinstance(a, Assign):
            k = ("assign", a.var, self.universe.semantic_key(a.expr))
        else:
            raise TermError(f"{a!r} is not an action")
        self._keys[a] = k
        return k

    def data_equiv(self, a: Proc, b: Proc) -> bool:
        return self.action_key(a) == self.action_key(b)


def data_equiv(a: Proc, b: Proc, ctx: Context | None = None) -> bool:
    return (ctx or Context()).data_equiv(a, b)


__all__ = [name for name in dir() if not name.startswith("_")] + ["TRUE"]
