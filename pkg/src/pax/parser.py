"""Reader for ``.pax`` specification files.

A file is a sequence of declarations::

    bound 3;
    vars v, w;
    actions a, b, send(1), recv(1), comm(1);
    comm send | recv -> comm;
    eval init = {v=1, w=0};
    rec E { X = [true] -> a . Y; Y = [v = 0] -> eps; }
    proc P = V{init}(<X | E>) || b;

See ``docs/spec-language.md`` for the full grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from . import meadow
from . import terms as T
from .data import (
    App, BFALSE, BTRUE, BVar, FALSE, TRUE, Eq, Exists, Lit, Not, Or, Var,
    DataUniverse, EvalMap, conj, forall, implies, iff, PREDICATES,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0, path: str | None = None):
        self.message = message
        self.line = line
        self.col = col
        self.path = path
        super().__init__(str(self))

    def __str__(self) -> str:
        where = f"{self.path or '<input>'}:{self.line}:{self.col}"
        return f"{where}: {self.message}"


KEYWORDS = {
    "actions", "comm", "vars", "bound", "rec", "proc", "eval",
    "tau", "delta", "eps", "true", "false", "btrue", "bfalse",
    "exists", "forall", "pc", "encap", "hide", "termtest", "V", "succ",
}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<int>\d+)
  | (?P<lmerge>\|L(?![A-Za-z0-9_']))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym><=>|=>|->|:=|\|\||&&|<=|>=|[|+.\-*/=<>!\[\](){},:;])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, path: str | None = None) -> list[Token]:
    out = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, path)
        kind = m.lastgroup
        s = m.group()
        if kind != "ws":
            if kind == "lmerge":
                kind = "sym"
            out.append(Token(kind, s, line, pos - line_start + 1))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rfind("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


@dataclass
class SpecFile:
    bound: int = 3
    variables: tuple[str, ...] = ()
    actions: dict[str, int] = field(default_factory=dict)
    comm: T.CommFunction = field(default_factory=T.CommFunction)
    evals: dict[str, EvalMap] = field(default_factory=dict)
    specs: dict[str, T.RecSpec] = field(default_factory=dict)
    procs: dict[str, T.Proc] = field(default_factory=dict)

    def context(self) -> T.Context:
        return T.Context(comm=self.comm, universe=DataUniverse(self.bound),
                         variables=self.variables,
                         actions={n: {k} for n, k in self.actions.items()})

    def __getitem__(self, name: str) -> T.Proc:
        return self.procs[name]

    def __eq__(self, other):
        if not isinstance(other, SpecFile):
            return NotImplemented
        return (self.bound == other.bound and self.variables == other.variables
                and self.actions == other.actions and self.comm == other.comm
                and self.evals == other.evals and self.specs == other.specs
                and list(self.procs.items()) == list(other.procs.items()))


class _Parser:
    def __init__(self, text: str, path: str | None = None, base: SpecFile | None = None):
        self.path = path
        self.toks = tokenize(text, path)
        self.i = 0
        self.sf = base if base is not None else SpecFile()
        self.rec_scope: set[str] | None = None
        self.bound_scope: list[str] = []

    # -- token helpers -------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col, self.path)

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("sym", "ident") and t.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self, what: str = "identifier") -> Token:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            raise self.error(f"expected {what}, found {t.text or 'end of input'!r}")
        self.i += 1
        return t

    def integer(self) -> int:
        t = self.tok
        if t.kind != "int":
            raise self.error(f"expected a number, found {t.text or 'end of input'!r}")
        self.i += 1
        return int(t.text)

    # -- names ---------------------------------------------------------------
    def _taken(self, name: str) -> str | None:
        sf = self.sf
        if name in sf.actions:
            return "action"
        if name in sf.variables:
            return "variable"
        if name in sf.procs:
            return "process"
        if name in sf.specs:
            return "recursive specification"
        if name in sf.evals:
            return "evaluation map"
        return None

    def declare(self, tok: Token) -> str:
        kind = self._taken(tok.text)
        if kind:
            raise self.error(f"{tok.text!r} is already declared as a {kind}", tok)
        return tok.text

    # -- file level ----------------------------------------------------------
    def parse_file(self) -> SpecFile:
        while self.tok.kind != "eof":
            t = self.tok
            if self.accept("bound"):
                b = self.integer()
                if b < 1:
                    raise self.error("the data bound must be at least 1", t)
                self.sf.bound = b
            elif self.accept("vars"):
                names = list(self.sf.variables)
                while True:
                    tok = self.ident("variable name")
                    if tok.text.startswith("_"):
                        raise self.error("names starting with '_' are reserved for bound variables", tok)
                    names.append(self.declare(tok))
                    if not self.accept(","):
                        break
                self.sf.variables = tuple(names)
            elif self.accept("actions"):
                while True:
                    tok = self.ident("action name")
                    name = self.declare(tok)
                    arity = 0
                    if self.accept("("):
                        arity = self.integer()
                        self.expect(")")
                    self.sf.actions[name] = arity
                    if not self.accept(","):
                        break
            elif self.accept("comm"):
                self.parse_comm()
            elif self.accept("eval"):
                name = self.declare(self.ident("evaluation map name"))
                self.expect("=")
                self.sf.evals[name] = self.parse_evalmap()
            elif self.accept("rec"):
                self.parse_rec()
            elif self.accept("proc"):
                name = self.declare(self.ident("process name"))
                self.expect("=")
                self.sf.procs[name] = self.parse_proc()
            else:
                raise self.error(f"expected a declaration, found {t.text!r}")
            self.accept(";")
        violations = T.validate_comm(self.sf.comm, self.sf.actions)
        if violations:
            raise ParseError(f"communication function: {violations[0]}", 0, 0, self.path)
        return self.sf

    def parse_comm(self) -> None:
        toks = [self.comm_action()]
        self.expect("|")
        toks.append(self.comm_action())
        self.expect("->")
        res = self.comm_action()
        a, b = toks[0].text, toks[1].text
        arities = {self.sf.actions[a], self.sf.actions[b], self.sf.actions[res.text]}
        if len(arities) != 1:
            raise self.error(f"communication {a} | {b} -> {res.text} mixes arities", res)
        table = self.sf.comm.table
        for key in ((a, b), (b, a)):
            if table.get(key, res.text) != res.text:
                raise self.error(f"conflicting communication for {a} | {b}", toks[0])
            table[key] = res.text

    def comm_action(self) -> Token:
        tok = self.ident("action name")
        if tok.text not in self.sf.actions:
            raise self.error(f"undeclared action {tok.text!r}", tok)
        return tok

    def parse_rec(self) -> None:
        name = self.declare(self.ident("specification name"))
        self.expect("{")
        start = self.i
        names: list[str] = []
        # first pass: collect the variables so equations can refer forward
        depth = 0
        while True:
            t = self.tok
            if t.kind == "eof":
                raise self.error("unterminated recursive specification")
            if t.text == "{" and t.kind == "sym":
                depth += 1
            elif t.text == "}" and t.kind == "sym":
                if depth == 0:
                    break
                depth -= 1
            elif (depth == 0 and t.kind == "ident" and self.peek().text == "="
                  and self.peek().kind == "sym"
                  and (self.i == start or self.toks[self.i - 1].text in (";", "{"))):
                names.append(t.text)
            self.i += 1
        self.i = start
        eqs = []
        self.rec_scope = set(names)
        try:
            while not self.at("}"):
                tok = self.ident("recursion variable")
                if self._taken(tok.text) in ("action", "process", "variable"):
                    raise self.error(f"recursion variable {tok.text!r} clashes with a declared name", tok)
                if any(x == tok.text for x, _ in eqs):
                    raise self.error(f"duplicate recursion variable {tok.text!r}", tok)
                self.expect("=")
                rhs = self.parse_proc()
                eqs.append((tok.text, rhs))
                self.accept(";")
        finally:
            self.rec_scope = None
        self.expect("}")
        try:
            spec = T.RecSpec(name, tuple(eqs))
            T.check_guarded_linear(spec)
        except T.TermError as exc:
            raise self.error(str(exc)) from None
        self.sf.specs[name] = spec

    def parse_evalmap(self) -> EvalMap:
        self.expect("{")
        d = {v: 0 for v in self.sf.variables}
        seen = set()
        if not self.at("}"):
            while True:
                tok = self.ident("variable name")
                if tok.text not in self.sf.variables:
                    raise self.error(f"undeclared flexible variable {tok.text!r}", tok)
                if tok.text in seen:
                    raise self.error(f"variable {tok.text!r} assigned twice", tok)
                seen.add(tok.text)
                self.expect("=")
                vt = self.tok
                val = self.integer()
                if val > self.sf.bound:
                    raise self.error(f"value {val} exceeds the data bound {self.sf.bound}", vt)
                d[tok.text] = val
                if not self.accept(","):
                    break
        self.expect("}")
        return EvalMap(d)

    # -- processes -----------------------------------------------------------
    def parse_proc(self) -> T.Proc:
        t = self.parse_par()
        while self.accept("+"):
            t = T.Alt(t, self.parse_par())
        return t

    def parse_par(self) -> T.Proc:
        t = self.parse_guard()
        while True:
            if self.accept("||"):
                t = T.Par(t, self.parse_guard())
            elif self.accept("|L"):
                t = T.LMerge(t, self.parse_guard())
            elif self.accept("|"):
                t = T.CMerge(t, self.parse_guard())
            else:
                return t

    def parse_guard(self) -> T.Proc:
        if self.accept("["):
            c = self.parse_cond()
            self.expect("]")
            self.expect("->")
            return T.Guard(c, self.parse_guard())
        return self.parse_seq()

    def parse_seq(self) -> T.Proc:
        t = self.parse_atom()
        while self.accept("."):
            t = T.Seq(t, self.parse_atom())
        return t

    def parse_atom(self) -> T.Proc:
        tok = self.tok
        if self.accept("tau"):
            return T.TAU
        if self.accept("delta"):
            return T.DELTA
        if self.accept("eps"):
            return T.EPS
        if self.at("(") and self.peek().kind == "ident" and self.peek(2).text == ":=":
            return self.parse_assign()
        if self.accept("("):
            t = self.parse_proc()
            self.expect(")")
            return t
        if self.accept("pc"):
            return self.parse_pc(tok)
        if self.accept("termtest"):
            self.expect("(")
            t = self.parse_proc()
            self.expect(")")
            return T.TermTest(t)
        if self.at("encap") or self.at("hide"):
            op = self.tok.text
            self.i += 1
            acts = self.parse_action_set()
            self.expect("(")
            t = self.parse_proc()
            self.expect(")")
            return T.Encap(acts, t) if op == "encap" else T.Hide(acts, t)
        if self.accept("V"):
            sigma = self.parse_eval_ref()
            self.expect("(")
            t = self.parse_proc()
            self.expect(")")
            return T.Eval(sigma, t)
        if self.accept("<"):
            x = self.ident("recursion variable")
            self.expect("|")
            s = self.ident("specification name")
            self.expect(">")
            spec = self.sf.specs.get(s.text)
            if spec is None:
                raise self.error(f"undeclared recursive specification {s.text!r}", s)
            if x.text not in spec.variables:
                raise self.error(f"{x.text!r} is not a variable of {s.text}", x)
            return T.RecConst(x.text, spec)
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            name = tok.text
            if self.rec_scope is not None and name in self.rec_scope:
                self.i += 1
                return T.RecVar(name)
            if name in self.sf.procs:
                self.i += 1
                return self.sf.procs[name]
            if name in self.sf.actions:
                return self.parse_action()
            raise self.error(f"undeclared name {name!r}", tok)
        raise self.error(f"expected a process term, found {tok.text or 'end of input'!r}")

    def parse_assign(self) -> T.Assign:
        self.expect("(")
        v = self.ident("variable name")
        if v.text not in self.sf.variables:
            raise self.error(f"undeclared flexible variable {v.text!r}", v)
        self.expect(":=")
        e = self.parse_data()
        self.expect(")")
        return T.Assign(v.text, e)

    def parse_action(self) -> T.Proc:
        tok = self.ident("action name")
        arity = self.sf.actions[tok.text]
        args = []
        if self.accept("("):
            while True:
                args.append(self.parse_data())
                if not self.accept(","):
                    break
            self.expect(")")
        if len(args) != arity:
            raise self.error(f"action {tok.text} expects {arity} argument(s), got {len(args)}", tok)
        return T.action(tok.text, *args)

    def parse_action_set(self) -> frozenset:
        self.expect("{")
        out = []
        if not self.at("}"):
            while True:
                if self.at("("):
                    out.append(self.parse_assign())
                else:
                    tok = self.tok
                    if tok.kind != "ident" or tok.text not in self.sf.actions:
                        raise self.error(f"undeclared action {tok.text!r}")
                    out.append(self.parse_action())
                if not self.accept(","):
                    break
        self.expect("}")
        return frozenset(out)

    def parse_eval_ref(self) -> EvalMap:
        if self.at("{") and self.peek().kind == "ident" and self.peek(2).text == "}":
            name = self.peek()
            if name.text in self.sf.evals:
                self.i += 3
                return self.sf.evals[name.text]
        return self.parse_evalmap()

    def parse_pc(self, start: Token) -> T.Proc:
        self.expect("{")
        entries = []
        while True:
            p = self.parse_probability()
            self.expect(":")
            entries.append((p, self.parse_proc()))
            if not self.accept(","):
                break
        self.expect("}")
        try:
            return T.build_prc(entries)
        except T.TermError as exc:
            raise self.error(str(exc), start) from None

    def parse_probability(self) -> Fraction:
        tok = self.tok
        num = self.integer()
        den = 1
        if self.accept("/"):
            den = self.integer()
            if den == 0:
                raise self.error("zero denominator in probability", tok)
        p = Fraction(num, den)
        if not meadow.is_probability(p):
            raise self.error(f"{meadow.format_rational(p)} is not a probability", tok)
        return p

    # -- conditions ----------------------------------------------------------
    def parse_cond(self):
        if self.at("exists") or self.at("forall"):
            q = self.tok.text
            self.i += 1
            x = self.ident("bound variable")
            self.expect(".")
            self.bound_scope.append(x.text)
            try:
                body = self.parse_cond()
            finally:
                self.bound_scope.pop()
            return Exists(x.text, body) if q == "exists" else forall(x.text, body)
        return self.parse_iff()

    def parse_iff(self):
        c = self.parse_implies()
        while self.accept("<=>"):
            c = iff(c, self.parse_implies())
        return c

    def parse_implies(self):
        c = self.parse_or()
        if self.accept("=>"):
            return implies(c, self.parse_implies_or_quant())
        return c

    def parse_implies_or_quant(self):
        if self.at("exists") or self.at("forall"):
            return self.parse_cond()
        return self.parse_implies()

    def parse_or(self):
        c = self.parse_and()
        while self.accept("||"):
            c = Or(c, self.parse_and())
        return c

    def parse_and(self):
        c = self.parse_not()
        while self.accept("&&"):
            c = conj(c, self.parse_not())
        return c

    def parse_not(self):
        if self.accept("!"):
            return Not(self.parse_not())
        return self.parse_cond_atom()

    def parse_cond_atom(self):
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        if self.at("exists") or self.at("forall"):
            return self.parse_cond()
        if self.at("("):
            save = self.i
            self.i += 1
            try:
                c = self.parse_cond()
                self.expect(")")
                if not self.at("="):
                    return c
            except ParseError:
                pass
            self.i = save
        lhs = self.parse_data()
        self.expect("=")
        rhs = self.parse_data()
        return Eq(lhs, rhs)

    # -- data ----------------------------------------------------------------
    def parse_data(self):
        e = self.parse_sum()
        for op in PREDICATES:
            if self.accept(op):
                return App(op, (e, self.parse_sum()))
        return e

    def parse_sum(self):
        e = self.parse_prod()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.i += 1
            e = App(op, (e, self.parse_prod()))
        return e

    def parse_prod(self):
        e = self.parse_data_atom()
        while self.at("*") or self.at("/"):
            op = self.tok.text
            self.i += 1
            e = App(op, (e, self.parse_data_atom()))
        return e

    def parse_data_atom(self):
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            return Lit(int(tok.text))
        if self.accept("btrue"):
            return BTRUE
        if self.accept("bfalse"):
            return BFALSE
        if self.accept("("):
            e = self.parse_data()
            self.expect(")")
            return e
        if self.accept("succ"):
            self.expect("(")
            e = self.parse_data()
            self.expect(")")
            return App("succ", (e,))
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            self.i += 1
            if tok.text in self.bound_scope:
                return BVar(tok.text)
            if tok.text in self.sf.variables:
                return Var(tok.text)
            raise self.error(f"undeclared data variable {tok.text!r}", tok)
        raise self.error(f"expected a data expression, found {tok.text or 'end of input'!r}")


def parse(text: str, path: str | None = None) -> SpecFile:
    """Parse a whole specification file."""
    return _Parser(text, path).parse_file()


def parse_file(path: str) -> SpecFile:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), path)


def parse_term(text: str, sf: SpecFile | None = None) -> T.Proc:
    """Parse one process term against the declarations of ``sf``."""
    p = _Parser(text, base=sf if sf is not None else SpecFile())
    t = p.parse_proc()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after process term")
    return t


def parse_cond(text: str, sf: SpecFile | None = None):
    p = _Parser(text, base=sf if sf is not None else SpecFile())
    c = p.parse_cond()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after condition")
    return c


def parse_data(text: str, sf: SpecFile | None = None):
    p = _Parser(text, base=sf if sf is not None else SpecFile())
    e = p.parse_data()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after data expression")
    return e


def parse_evalmap_text(text: str) -> EvalMap:
    """Read the ``{v=1, w=0}`` serialization of an evaluation map."""
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ParseError(f"malformed evaluation map {text!r}")
    d = {}
    for part in filter(None, (p.strip() for p in body[1:-1].split(","))):
        name, sep, val = part.partition("=")
        if not sep or not val.strip().isdigit():
            raise ParseError(f"malformed evaluation map entry {part!r}")
        d[name.strip()] = int(val)
    return EvalMap(d)


def spec_with(actions=(), variables=(), comm=None, bound: int = 3, **kw) -> SpecFile:
    """A declaration-only SpecFile for building terms in code and tests."""
    acts = {}
    for a in actions:
        if isinstance(a, tuple):
            acts[a[0]] = a[1]
        else:
            acts[a] = 0
    gamma = comm if isinstance(comm, T.CommFunction) else T.CommFunction(comm or {}, symmetric=True)
    return SpecFile(bound=bound, variables=tuple(variables), actions=acts, comm=gamma, **kw)

