"""Mu-calculus formulas in positive form: AST, parser, printer and analysis.

Concrete syntax::

    true  false  p  !p  X  X_2.1
    f /\\ g    f \\/ g    []f    <>f    mu X. f    nu X. f

Literals are lowercase identifiers, recursion variables are uppercase.  A
variable may carry an index word, written ``BASE_d1.d2...dk``; the empty
word is printed without suffix.  Binders extend as far to the right as
possible.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, fields
from functools import lru_cache
from typing import Iterator

from .errors import FormulaSyntaxError, UnboundVariableError

__all__ = [
    "Literal", "VarName", "Formula", "Top", "Bot", "Lit", "Var", "And", "Or",
    "Box", "Diamond", "Mu", "Nu", "Fixpoint", "TOP", "BOT", "FormulaInfo",
    "parse_formula", "print_formula", "analyze", "unfold", "subformulas",
    "free_vars", "dual", "props", "size", "is_closed",
]

_IDENT = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")


@dataclass(frozen=True, order=True)
class Literal:
    name: str
    negated: bool = False

    def __post_init__(self):
        if not _IDENT.match(self.name) or self.name in _KEYWORDS:
            raise ValueError(f"invalid proposition name {self.name!r}")

    def complement(self) -> Literal:
        return Literal(self.name, not self.negated)

    def __str__(self):
        return ("!" if self.negated else "") + self.name


@dataclass(frozen=True, order=True)
class VarName:
    base: str
    index: tuple[int, ...] = ()

    def extend(self, k: int) -> VarName:
        return VarName(self.base, self.index + (k,))

    def __str__(self):
        if not self.index:
            return self.base
        return self.base + "_" + ".".join(map(str, self.index))


class Formula:
    """Base class of AST nodes.

    Equality is structural; hashes are cached on the node since
    approximants produce deep trees that get hashed repeatedly.
    """

    def _key(self) -> tuple:
        return tuple(getattr(self, f.name) for f in fields(self))

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented if not isinstance(other, Formula) else False
        return hash(self) == hash(other) and self._key() == other._key()

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_hash", h)
            return h

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True, eq=False)
class Top(Formula):
    pass


@dataclass(frozen=True, eq=False)
class Bot(Formula):
    pass


@dataclass(frozen=True, eq=False)
class Lit(Formula):
    lit: Literal


@dataclass(frozen=True, eq=False)
class Var(Formula):
    name: VarName


@dataclass(frozen=True, eq=False)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Box(Formula):
    sub: Formula


@dataclass(frozen=True, eq=False)
class Diamond(Formula):
    sub: Formula


@dataclass(frozen=True, eq=False)
class Fixpoint(Formula):
    var: VarName
    body: Formula


@dataclass(frozen=True, eq=False)
class Mu(Fixpoint):
    pass


@dataclass(frozen=True, eq=False)
class Nu(Fixpoint):
    pass


TOP = Top()
BOT = Bot()


# --------------------------------------------------------------------------
# parsing

_KEYWORDS = {"true", "false", "mu", "nu"}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<and>/\\)
  | (?P<or>\\/)
  | (?P<box>\[\])
  | (?P<dia><>)
  | (?P<not>!)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<var>[A-Z][A-Za-z0-9]*(?:_\d+(?:\.\d+)*)?)
  | (?P<ident>[a-z][a-zA-Z0-9_]*)
  | (?P<dot>\.)
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "ident" and value in _KEYWORDS:
                kind = value
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


def _var_name(token: str) -> VarName:
    base, _, idx = token.partition("_")
    return VarName(base, tuple(int(d) for d in idx.split(".")) if idx else ())


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self, kind: str) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        if tok[0] != kind:
            what = repr(tok[1]) if tok[0] != "eof" else "end of input"
            raise FormulaSyntaxError(f"expected {kind}, found {what}", tok[2])
        self.i += 1
        return tok

    def formula(self) -> Formula:
        left = self.conj()
        while self.peek()[0] == "or":
            self.i += 1
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.peek()[0] == "and":
            self.i += 1
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        kind, value, pos = self.peek()
        if kind == "box":
            self.i += 1
            return Box(self.unary())
        if kind == "dia":
            self.i += 1
            return Diamond(self.unary())
        if kind == "not":
            self.i += 1
            nxt = self.peek()
            if nxt[0] != "ident":
                raise FormulaSyntaxError("negation applied to a non-atom", nxt[2])
            self.i += 1
            return Lit(Literal(nxt[1], True))
        if kind in ("mu", "nu"):
            self.i += 1
            var = _var_name(self.take("var")[1])
            self.take("dot")
            body = self.formula()
            return Mu(var, body) if kind == "mu" else Nu(var, body)
        return self.atom()

    def atom(self) -> Formula:
        kind, value, pos = self.peek()
        self.i += 1
        if kind == "true":
            return TOP
        if kind == "false":
            return BOT
        if kind == "ident":
            return Lit(Literal(value))
        if kind == "var":
            return Var(_var_name(value))
        if kind == "lpar":
            inner = self.formula()
            self.take("rpar")
            return inner
        what = repr(value) if kind != "eof" else "end of input"
        raise FormulaSyntaxError(f"unexpected {what}", pos)


def parse_formula(text: str) -> Formula:
    """Parse the concrete syntax described in the module docstring.

    Raises FormulaSyntaxError (carrying ``pos``) on malformed input.
    """
    p = _Parser(text)
    f = p.formula()
    p.take("eof")
    return f


# --------------------------------------------------------------------------
# printing

def _pr(f: Formula, operand: bool) -> str:
    match f:
        case Top():
            return "true"
        case Bot():
            return "false"
        case Lit(lit):
            return str(lit)
        case Var(name):
            return str(name)
        case And(l, r):
            return f"({_pr(l, True)} /\\ {_pr(r, True)})"
        case Or(l, r):
            return f"({_pr(l, True)} \\/ {_pr(r, True)})"
        case Box(g):
            return "[]" + _pr(g, True)
        case Diamond(g):
            return "<>" + _pr(g, True)
        case Fixpoint(var, body):
            kw = "mu" if isinstance(f, Mu) else "nu"
            s = f"{kw} {var}. {_pr(body, False)}"
            return f"({s})" if operand else s
    raise TypeError(f"not a formula: {f!r}")


def print_formula(f: Formula) -> str:
    return _pr(f, False)


# --------------------------------------------------------------------------
# structure

def subformulas(f: Formula) -> Iterator[Formula]:
    """All subformula occurrences, preorder, left to right."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        match g:
            case And(l, r) | Or(l, r):
                stack.append(r)
                stack.append(l)
            case Box(h) | Diamond(h):
                stack.append(h)
            case Fixpoint(_, body):
                stack.append(body)


@lru_cache(maxsize=65536)
def free_vars(f: Formula) -> frozenset[VarName]:
    match f:
        case Var(name):
            return frozenset([name])
        case And(l, r) | Or(l, r):
            return free_vars(l) | free_vars(r)
        case Box(g) | Diamond(g):
            return free_vars(g)
        case Fixpoint(var, body):
            return free_vars(body) - {var}
    return frozenset()


def is_closed(f: Formula) -> bool:
    return not free_vars(f)


def props(f: Formula) -> frozenset[str]:
    return frozenset(g.lit.name for g in subformulas(f) if isinstance(g, Lit))


def size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


def dual(f: Formula) -> Formula:
    """Swap mu/nu, box/diamond, and/or, true/false; complement literals."""
    match f:
        case Top():
            return BOT
        case Bot():
            return TOP
        case Lit(lit):
            return Lit(lit.complement())
        case Var():
            return f
        case And(l, r):
            return Or(dual(l), dual(r))
        case Or(l, r):
            return And(dual(l), dual(r))
        case Box(g):
            return Diamond(dual(g))
        case Diamond(g):
            return Box(dual(g))
        case Mu(var, body):
            return Nu(var, dual(body))
        case Nu(var, body):
            return Mu(var, dual(body))
    raise TypeError(f"not a formula: {f!r}")


@dataclass(frozen=True)
class FormulaInfo:
    sub: frozenset[Formula]
    vars: frozenset[VarName]
    mu_vars: frozenset[VarName]
    nu_vars: frozenset[VarName]
    free_vars: frozenset[VarName]
    well_formed: bool
    binders: dict[VarName, frozenset[Formula]] = field(repr=False, compare=False)


def analyze(f: Formula) -> FormulaInfo:
    """Compute Sub, the variable sets, free variables and well-formedness.

    A formula is well-formed when each variable has at most one binding
    subformula in Sub(f); Sub is a set, so structurally identical binders
    in different positions count once.
    """
    sub = frozenset(subformulas(f))
    binders: dict[VarName, set[Formula]] = {}
    occurring = set()
    for g in sub:
        if isinstance(g, Var):
            occurring.add(g.name)
        elif isinstance(g, Fixpoint):
            occurring.add(g.var)
            binders.setdefault(g.var, set()).add(g)
    mu_vars = frozenset(v for v, bs in binders.items() if any(isinstance(b, Mu) for b in bs))
    nu_vars = frozenset(v for v, bs in binders.items() if any(isinstance(b, Nu) for b in bs))
    return FormulaInfo(
        sub=sub,
        vars=frozenset(occurring),
        mu_vars=mu_vars,
        nu_vars=nu_vars,
        free_vars=free_vars(f),
        well_formed=all(len(bs) == 1 for bs in binders.values()),
        binders={v: frozenset(bs) for v, bs in binders.items()},
    )


def unfold(x: VarName, f: Formula) -> Formula:
    """Return the body of the unique binder of ``x`` in ``f``."""
    for g in subformulas(f):
        if isinstance(g, Fixpoint) and g.var == x:
            return g.body
    raise UnboundVariableError(f"variable {x} is not bound in {print_formula(f)}")
