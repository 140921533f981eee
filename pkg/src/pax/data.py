"""Data terms, conditions and evaluation maps over a bounded natural-number universe.

Data values are the naturals ``0..bound`` plus the two booleans.  Arithmetic
saturates at the bound: ``a + b`` and ``a * b`` clamp to ``bound``, monus
floors at zero and ``a / 0`` is ``0``.  Every clamp is counted on the
universe so callers can tell when a result is an artifact of the bound.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Union

DEFAULT_BOUND = 3

Value = Union[int, bool]


class DataError(Exception):
    pass


class UnboundVariableError(DataError):
    pass


class UndeclaredVariableError(DataError, KeyError):
    def __str__(self) -> str:
        return self.args[0] if self.args else "undeclared variable"


# --------------------------------------------------------------------------
# data terms

@dataclass(frozen=True)
class Lit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Var:
    """A flexible (program) variable."""
    name: str


@dataclass(frozen=True)
class BVar:
    """A variable bound by a quantifier."""
    name: str


@dataclass(frozen=True)
class App:
    op: str
    args: tuple


DataTerm = Union[Lit, BoolLit, Var, BVar, App]

BTRUE = BoolLit(True)
BFALSE = BoolLit(False)

ARITH_OPS = ("+", "-", "*", "/")
PREDICATES = ("<", ">", "<=", ">=")


def lit(v: Value) -> DataTerm:
    if isinstance(v, bool):
        return BoolLit(v)
    return Lit(v)


def as_data(x) -> DataTerm:
    """Lift Python ints/bools/strings (variable names) to data terms."""
    if isinstance(x, (Lit, BoolLit, Var, BVar, App)):
        return x
    if isinstance(x, bool):
        return BoolLit(x)
    if isinstance(x, int):
        return Lit(x)
    if isinstance(x, str):
        return Var(x)
    raise TypeError(f"not a data term: {x!r}")


def plus(a, b) -> App:
    return App("+", (as_data(a), as_data(b)))


def minus(a, b) -> App:
    return App("-", (as_data(a), as_data(b)))


def times(a, b) -> App:
    return App("*", (as_data(a), as_data(b)))


def divide(a, b) -> App:
    return App("/", (as_data(a), as_data(b)))


def succ(a) -> App:
    return App("succ", (as_data(a),))


def flex_vars(e) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, App):
        return frozenset().union(*(flex_vars(a) for a in e.args))
    if isinstance(e, (Eq, Not, Or)):
        return frozenset().union(*(flex_vars(c) for c in _cond_children(e)))
    if isinstance(e, Exists):
        return flex_vars(e.body)
    return frozenset()


# --------------------------------------------------------------------------
# conditions

@dataclass(frozen=True)
class CFalse:
    pass


@dataclass(frozen=True)
class Eq:
    lhs: DataTerm
    rhs: DataTerm


@dataclass(frozen=True)
class Not:
    arg: "Cond"


@dataclass(frozen=True)
class Or:
    lhs: "Cond"
    rhs: "Cond"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Cond"


Cond = Union[CFalse, Eq, Not, Or, Exists]

FALSE = CFalse()
TRUE = Not(FALSE)


def _cond_children(c) -> tuple:
    if isinstance(c, Eq):
        return (c.lhs, c.rhs)
    if isinstance(c, Not):
        return (c.arg,)
    if isinstance(c, Or):
        return (c.lhs, c.rhs)
    if isinstance(c, Exists):
        return (c.body,)
    return ()


def eq(a, b) -> Eq:
    return Eq(as_data(a), as_data(b))


def conj(a: Cond, b: Cond) -> Cond:
    return Not(Or(Not(a), Not(b)))


def implies(a: Cond, b: Cond) -> Cond:
    return Or(Not(a), b)


def iff(a: Cond, b: Cond) -> Cond:
    return conj(implies(a, b), implies(b, a))


def forall(var: str, body: Cond) -> Cond:
    return Not(Exists(var, Not(body)))


def conj_all(conds: Iterable[Cond]) -> Cond:
    out = None
    for c in conds:
        out = c if out is None else conj(out, c)
    return TRUE if out is None else out


def canon_bound(c, depth: int = 0, env: dict | None = None):
    """Rename quantified variables to ``_1, _2, ...`` by nesting depth.

    Two conditions that differ only in the names of bound variables become
    structurally equal.
    """
    env = env or {}
    if isinstance(c, BVar):
        return BVar(env.get(c.name, c.name))
    if isinstance(c, App):
        return App(c.op, tuple(canon_bound(a, depth, env) for a in c.args))
    if isinstance(c, Eq):
        return Eq(canon_bound(c.lhs, depth, env), canon_bound(c.rhs, depth, env))
    if isinstance(c, Not):
        return Not(canon_bound(c.arg, depth, env))
    if isinstance(c, Or):
        return Or(canon_bound(c.lhs, depth, env), canon_bound(c.rhs, depth, env))
    if isinstance(c, Exists):
        name = f"_{depth + 1}"
        return Exists(name, canon_bound(c.body, depth + 1, {**env, c.var: name}))
    return c


# --------------------------------------------------------------------------
# evaluation maps

class EvalMap(Mapping[str, int]):
    """Immutable assignment of data values to flexible variables."""

    __slots__ = ("_items", "_dict", "_hash")

    def __init__(self, assignment: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        d = dict(assignment)
        for k, v in d.items():
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise DataError(f"evaluation map value for {k} must be a natural, got {v!r}")
        self._items = tuple(sorted(d.items()))
        self._dict = dict(self._items)
        self._hash = hash(self._items)

    def __getitem__(self, key: str) -> int:
        return self._dict[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._dict)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, EvalMap):
            return self._items == other._items
        return NotImplemented

    def __repr__(self) -> str:
        return f"EvalMap({self._dict!r})"

    def __str__(self) -> str:
        return "{" + ", ".join(f"{k}={v}" for k, v in self._items) + "}"

    def __reduce__(self):
        return (EvalMap, (self._items,))

    def items_tuple(self) -> tuple:
        return self._items

    def update(self, var: str, value: int) -> "EvalMap":
        if var not in self._dict:
            raise UndeclaredVariableError(f"undeclared flexible variable {var!r}")
        d = dict(self._dict)
        d[var] = value
        return EvalMap(d)

    def restrict(self, names: Iterable[str]) -> "EvalMap":
        names = set(names)
        return EvalMap((k, v) for k, v in self._items if k in names)


EMPTY_MAP = EvalMap()


def update(sigma: EvalMap, var: str, value: int) -> EvalMap:
    return sigma.update(var, value)


# --------------------------------------------------------------------------
# the universe

@dataclass
class Operator:
    arity: int
    fn: Callable[..., Value]
    result: str = "data"    # "data" or "bool"


@dataclass
class DataUniverse:
    """Finite data domain ``{0..bound}`` with built-in and user operators."""

    bound: int = DEFAULT_BOUND
    operators: dict[str, Operator] = field(default_factory=dict)
    clamp_events: Counter = field(default_factory=Counter, compare=False, repr=False)

    def __post_init__(self):
        if self.bound < 1:
            raise DataError("data bound must be at least 1")
        self._key_cache: dict = {}

    @property
    def values(self) -> range:
        return range(self.bound + 1)

    # -- built-in operators ------------------------------------------------
    def _clamp(self, op: str, x: int) -> int:
        if x > self.bound:
            self.clamp_events[op] += 1
            return self.bound
        if x < 0:
            self.clamp_events[op] += 1
            return 0
        return x

    def apply(self, op: str, args: tuple) -> Value:
        if op in ("+", "-", "*", "/"):
            a, b = args
            _need_nat(op, a, b)
            if op == "+":
                return self._clamp(op, a + b)
            if op == "-":
                return self._clamp(op, a - b)
            if op == "*":
                return self._clamp(op, a * b)
            return 0 if b == 0 else a // b
        if op == "succ":
            (a,) = args
            _need_nat(op, a)
            return self._clamp(op, a + 1)
        if op in PREDICATES:
            a, b = args
            _need_nat(op, a, b)
            return {"<": a < b, ">": a > b, "<=": a <= b, ">=": a >= b}[op]
        if op in self.operators:
            spec = self.operators[op]
            if len(args) != spec.arity:
                raise DataError(f"operator {op} expects {spec.arity} arguments")
            res = spec.fn(*args)
            if spec.result == "data":
                return self._clamp(op, int(res))
            return bool(res)
        raise DataError(f"unknown data operator {op!r}")

    def arity(self, op: str) -> int | None:
        if op in ARITH_OPS or op in PREDICATES:
            return 2
        if op == "succ":
            return 1
        if op in self.operators:
            return self.operators[op].arity
        return None

    def result_sort(self, op: str) -> str:
        if op in PREDICATES:
            return "bool"
        if op in self.operators:
            return self.operators[op].result
        return "data"

    # -- evaluation --------------------------------------------------------
    def eval(self, e: DataTerm, sigma: Mapping[str, int], env: Mapping[str, int] | None = None) -> Value:
        if isinstance(e, Lit):
            return e.value
        if isinstance(e, BoolLit):
            return e.value
        if isinstance(e, Var):
            try:
                return sigma[e.name]
            except KeyError:
                raise UndeclaredVariableError(f"flexible variable {e.name!r} has no value") from None
        if isinstance(e, BVar):
            if env is None or e.name not in env:
                raise UnboundVariableError(f"bound variable {e.name!r} escapes its quantifier")
            return env[e.name]
        if isinstance(e, App):
            return self.apply(e.op, tuple(self.eval(a, sigma, env) for a in e.args))
        raise TypeError(f"not a data term: {e!r}")

    def sat(self, c: Cond, sigma: Mapping[str, int], env: Mapping[str, int] | None = None) -> bool:
        if isinstance(c, CFalse):
            return False
        if isinstance(c, Eq):
            a = self.eval(c.lhs, sigma, env)
            b = self.eval(c.rhs, sigma, env)
            return type(a) is type(b) and a == b
        if isinstance(c, Not):
            return not self.sat(c.arg, sigma, env)
        if isinstance(c, Or):
            return self.sat(c.lhs, sigma, env) or self.sat(c.rhs, sigma, env)
        if isinstance(c, Exists):
            inner = dict(env or {})
            for d in self.values:
                inner[c.var] = d
                if self.sat(c.body, sigma, inner):
                    return True
            return False
        raise TypeError(f"not a condition: {c!r}")

    def evaluate_term(self, e: DataTerm, sigma: Mapping[str, int]) -> DataTerm:
        """``sigma(e)`` as a literal data term."""
        return lit(self.eval(e, sigma))

    # -- validity (the "holds in the data algebra" judgements) ---------------
    def assignments(self, names: Iterable[str]) -> Iterator[EvalMap]:
        names = sorted(names)
        for vals in itertools.product(self.values, repeat=len(names)):
            yield EvalMap(zip(names, vals))

    def semantic_key(self, e) -> tuple:
        """A key equal for two data terms (or conditions) iff they denote the
        same function of the flexible variables, over this universe."""
        key = self._key_cache.get(e)
        if key is not None:
            return key
        names = sorted(flex_vars(e))
        evaluate = self.sat if isinstance(e, (CFalse, Eq, Not, Or, Exists)) else self.eval
        if not names:
            key = ("const", _tag(evaluate(e, EMPTY_MAP)))
        else:
            table = {}
            for vals in itertools.product(self.values, repeat=len(names)):
                table[vals] = _tag(evaluate(e, dict(zip(names, vals))))
            deps = [i for i in range(len(names)) if _depends_on(table, i, self.values)]
            if not deps:
                key = ("const", next(iter(table.values())))
            else:
                rows = []
                for vals in itertools.product(self.values, repeat=len(deps)):
                    full = [0] * len(names)
                    for i, v in zip(deps, vals):
                        full[i] = v
                    rows.append(table[tuple(full)])
                key = ("fn", tuple(names[i] for i in deps), tuple(rows))
        self._key_cache[e] = key
        return key

    def valid_eq(self, a: DataTerm, b: DataTerm) -> bool:
        return self.semantic_key(a) == self.semantic_key(b)

    def valid(self, c: Cond) -> bool:
        return self.semantic_key(c) == ("const", ("b", True))

    def unsatisfiable(self, c: Cond) -> bool:
        return self.semantic_key(c) == ("const", ("b", False))


def _tag(v: Value) -> tuple:
    return ("b", v) if isinstance(v, bool) else ("n", v)


def _depends_on(table: dict, i: int, values: range) -> bool:
    for vals, out in table.items():
        for d in values:
            if d == vals[i]:
                continue
            alt = vals[:i] + (d,) + vals[i + 1:]
            if table[alt] != out:
                return True
    return False


def _need_nat(op: str, *xs) -> None:
    for x in xs:
        if isinstance(x, bool):
            raise DataError(f"operator {op} applied to a boolean")


# --------------------------------------------------------------------------
# module-level conveniences

_DEFAULT = DataUniverse()


def eval_data(sigma: Mapping[str, int], e: DataTerm, universe: DataUniverse | None = None) -> Value:
    return (universe or _DEFAULT).eval(e, sigma)


def eval_cond(sigma: Mapping[str, int], c: Cond, universe: DataUniverse | None = None) -> bool:
    return (universe or _DEFAULT).sat(c, sigma)
