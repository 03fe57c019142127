"""Finite modal models: Kripke structures, KMTSs and GTSs.

A GTS has a may relation (pairs) and a must relation whose targets are
nonempty sets of states.  KMTSs are GTSs whose must targets are all
singletons; a Kripke structure is kept as its own type and converted with
:func:`embed_ks` wherever a GTS is required.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Union

from .errors import ModelError
from .formula import Literal

__all__ = [
    "Gts", "Ks", "ModelKind", "Compiled", "parse_model", "serialize_model",
    "validate", "embed_ks", "as_gts", "model_size", "to_dot",
]

_STATE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


class ModelKind(enum.Enum):
    KS = "ks"
    KMTS = "kmts"
    GTS = "gts"

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Compiled:
    """Index-based view of a model: state ``i`` is bit ``1 << i``."""

    names: tuple[str, ...]
    index: dict[str, int]
    may: tuple[int, ...]
    must: tuple[tuple[int, ...], ...]
    pos: dict[str, int]
    neg: dict[str, int]
    labels: tuple[frozenset[Literal], ...]

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def full(self) -> int:
        return (1 << len(self.names)) - 1

    def lit_mask(self, lit: Literal) -> int:
        return (self.neg if lit.negated else self.pos).get(lit.name, 0)

    def mask(self, states: Iterable[str]) -> int:
        m = 0
        for s in states:
            m |= 1 << self.index[s]
        return m

    def unmask(self, m: int) -> frozenset[str]:
        return frozenset(s for i, s in enumerate(self.names) if m >> i & 1)


def _compile(states, may, must, labels) -> Compiled:
    index = {s: i for i, s in enumerate(states)}
    succ = [0] * len(states)
    for s, t in may:
        succ[index[s]] |= 1 << index[t]
    hyper: list[list[int]] = [[] for _ in states]
    for s, targets in must:
        m = 0
        for t in targets:
            m |= 1 << index[t]
        hyper[index[s]].append(m)
    pos: dict[str, int] = {}
    neg: dict[str, int] = {}
    for s, lits in labels.items():
        for lit in lits:
            table = neg if lit.negated else pos
            table[lit.name] = table.get(lit.name, 0) | 1 << index[s]
    return Compiled(
        names=tuple(states),
        index=index,
        may=tuple(succ),
        must=tuple(tuple(sorted(h)) for h in hyper),
        pos=pos,
        neg=neg,
        labels=tuple(labels[s] for s in states),
    )


def _check_states(states: tuple[str, ...]) -> None:
    if not states:
        raise ModelError("a model needs at least one state")
    if len(set(states)) != len(states):
        raise ModelError("duplicate state names")
    for s in states:
        if not isinstance(s, str) or not _STATE.match(s):
            raise ModelError(f"invalid state name {s!r}")


def _normalize_labels(states, ap, labels, total: bool) -> dict[str, frozenset[Literal]]:
    out = {}
    for s in labels:
        if s not in states:
            raise ModelError(f"label for unknown state {s!r}")
    for s in states:
        lits = frozenset(labels.get(s, ()))
        for lit in lits:
            if lit.name not in ap:
                raise ModelError(f"literal {lit} at {s} uses a proposition outside ap")
            if lit.complement() in lits:
                raise ModelError(f"label of {s} contains both {lit.name} and !{lit.name}")
        if total and len(lits) != len(ap):
            missing = sorted(p for p in ap if Literal(p) not in lits and Literal(p, True) not in lits)
            raise ModelError(f"label of {s} is not total (missing {', '.join(missing)})")
        out[s] = lits
    return out


@dataclass(frozen=True, eq=False)
class Gts:
    states: tuple[str, ...]
    init: frozenset[str]
    ap: frozenset[str]
    may: frozenset[tuple[str, str]]
    must: frozenset[tuple[str, frozenset[str]]]
    labels: Mapping[str, frozenset[Literal]] = field(default_factory=dict)
    name: str = "M"

    def __post_init__(self):
        states = tuple(self.states)
        _check_states(states)
        known = set(states)
        init = frozenset(self.init)
        may = frozenset((s, t) for s, t in self.may)
        must = frozenset((s, frozenset(a)) for s, a in self.must)
        ap = frozenset(self.ap)
        if not init <= known:
            raise ModelError(f"initial states {sorted(init - known)} not declared")
        for s, t in may:
            if s not in known or t not in known:
                raise ModelError(f"may edge {s} -> {t} uses an undeclared state")
        for s, a in must:
            if not a:
                raise ModelError(f"must edge from {s} has an empty target set")
            if s not in known or not a <= known:
                raise ModelError(f"must edge from {s} uses an undeclared state")
            for t in a:
                if (s, t) not in may:
                    raise ModelError(f"must {s} -> {{{', '.join(sorted(a))}}} has no matching may {s} -> {t}")
        labels = _normalize_labels(known, ap, self.labels, total=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "init", init)
        object.__setattr__(self, "ap", ap)
        object.__setattr__(self, "may", may)
        object.__setattr__(self, "must", must)
        object.__setattr__(self, "labels", labels)

    def _key(self):
        return (frozenset(self.states), self.init, self.ap, self.may, self.must,
                frozenset(self.labels.items()))

    def __eq__(self, other):
        if not isinstance(other, Gts):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @cached_property
    def compiled(self) -> Compiled:
        return _compile(self.states, self.may, self.must, self.labels)

    def label(self, s: str) -> frozenset[Literal]:
        return self.labels[s]

    def successors(self, s: str) -> list[str]:
        return [t for t in self.states if (s, t) in self.may]

    def hypers(self, s: str) -> list[frozenset[str]]:
        return [a for (u, a) in self.must if u == s]


@dataclass(frozen=True, eq=False)
class Ks:
    states: tuple[str, ...]
    init: frozenset[str]
    ap: frozenset[str]
    trans: frozenset[tuple[str, str]]
    labels: Mapping[str, frozenset[Literal]] = field(default_factory=dict)
    name: str = "K"

    def __post_init__(self):
        states = tuple(self.states)
        _check_states(states)
        known = set(states)
        init = frozenset(self.init)
        trans = frozenset((s, t) for s, t in self.trans)
        ap = frozenset(self.ap)
        if not init <= known:
            raise ModelError(f"initial states {sorted(init - known)} not declared")
        for s, t in trans:
            if s not in known or t not in known:
                raise ModelError(f"transition {s} -> {t} uses an undeclared state")
        labels = _normalize_labels(known, ap, self.labels, total=True)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "init", init)
        object.__setattr__(self, "ap", ap)
        object.__setattr__(self, "trans", trans)
        object.__setattr__(self, "labels", labels)

    def _key(self):
        return (frozenset(self.states), self.init, self.ap, self.trans,
                frozenset(self.labels.items()))

    def __eq__(self, other):
        if not isinstance(other, Ks):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @cached_property
    def compiled(self) -> Compiled:
        return _compile(self.states, self.trans, {(s, frozenset([t])) for s, t in self.trans}, self.labels)

    def label(self, s: str) -> frozenset[Literal]:
        return self.labels[s]

    def successors(self, s: str) -> list[str]:
        return [t for t in self.states if (s, t) in self.trans]


Model = Union[Gts, Ks]


def embed_ks(k: Ks) -> Gts:
    """View a Kripke structure as a GTS with matching may and singleton must."""
    return Gts(
        states=k.states,
        init=k.init,
        ap=k.ap,
        may=k.trans,
        must=frozenset((s, frozenset([t])) for s, t in k.trans),
        labels=k.labels,
        name=k.name,
    )


def as_gts(m: Model) -> Gts:
    return embed_ks(m) if isinstance(m, Ks) else m


def validate(m: Model) -> ModelKind:
    """Classify a model as KS, KMTS or GTS (most specific class)."""
    if isinstance(m, Ks):
        return ModelKind.KS
    if any(len(a) != 1 for _, a in m.must):
        return ModelKind.GTS
    total = all(len(m.labels[s]) == len(m.ap) for s in m.states)
    if total and m.must == frozenset((s, frozenset([t])) for s, t in m.may):
        return ModelKind.KS
    return ModelKind.KMTS


def model_size(m: Model) -> int:
    return len(m.states)


# --------------------------------------------------------------------------
# text format

_MTOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*|//[^\n]*)
  | (?P<arrow>->)
  | (?P<punct>[{}:;,!])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


def _mtokens(text: str) -> list[tuple[str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _MTOKEN.match(text, pos)
        if m is None:
            raise ModelError(f"syntax error: unexpected character {text[pos]!r} at position {pos}")
        if m.lastgroup != "ws":
            out.append((m.group(), pos))
        pos = m.end()
    out.append(("", len(text)))
    return out


class _ModelParser:
    def __init__(self, text: str):
        self.toks = _mtokens(text)
        self.i = 0

    def peek(self) -> str:
        return self.toks[self.i][0]

    def next(self) -> str:
        tok = self.toks[self.i][0]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        tok, pos = self.toks[self.i]
        if tok != value:
            raise ModelError(f"syntax error: expected {value!r}, found {tok or 'end of input'!r} at position {pos}")
        self.i += 1

    def ident(self) -> str:
        tok, pos = self.toks[self.i]
        if not tok or not (tok[0].isalpha() or tok[0] == "_"):
            raise ModelError(f"syntax error: expected identifier, found {tok or 'end of input'!r} at position {pos}")
        self.i += 1
        return tok

    def idlist(self) -> list[str]:
        if self.peek() in (";", "}"):
            return []
        items = [self.ident()]
        while self.peek() == ",":
            self.i += 1
            items.append(self.ident())
        return items

    def literal(self) -> Literal:
        neg = False
        if self.peek() == "!":
            self.i += 1
            neg = True
        name = self.ident()
        try:
            return Literal(name, neg)
        except ValueError as e:
            raise ModelError(str(e)) from None

    def parse(self):
        self.expect("model")
        kind = self.next()
        if kind not in ("gts", "kmts", "ks"):
            raise ModelError(f"syntax error: unknown model kind {kind!r}")
        name = self.ident()
        self.expect("{")
        ap: list[str] = []
        states: list[str] = []
        init: list[str] = []
        labels: dict[str, set[Literal]] = {}
        may: set[tuple[str, str]] = set()
        must: set[tuple[str, frozenset[str]]] = set()
        while self.peek() != "}":
            kw = self.next()
            if kw in ("ap", "states", "init"):
                self.expect(":")
                items = self.idlist()
                {"ap": ap, "states": states, "init": init}[kw].extend(items)
            elif kw == "label":
                s = self.ident()
                self.expect(":")
                lits = labels.setdefault(s, set())
                if self.peek() != ";":
                    lits.add(self.literal())
                    while self.peek() == ",":
                        self.i += 1
                        lits.add(self.literal())
            elif kw in ("may", "trans"):
                s = self.ident()
                self.expect("->")
                for t in self.idlist():
                    may.add((s, t))
            elif kw == "must":
                s = self.ident()
                self.expect("->")
                if self.peek() == "{":
                    self.i += 1
                    targets = self.idlist()
                    self.expect("}")
                else:
                    targets = [self.ident()]
                must.add((s, frozenset(targets)))
            else:
                raise ModelError(f"syntax error: unknown statement {kw!r}")
            self.expect(";")
        self.expect("}")
        self.expect("")
        if not states:
            raise ModelError("a model needs at least one state")
        known = set(states)
        for s in {s for s, _ in may} | {t for _, t in may} | {s for s, _ in must}:
            if s not in known:
                raise ModelError(f"reference to undeclared state {s!r}")
        if kind == "ks":
            singles = {(s, frozenset([t])) for s, t in may}
            if must and must != singles:
                raise ModelError("in a ks model must transitions have to coincide with may transitions")
            return Ks(tuple(states), frozenset(init), frozenset(ap), frozenset(may), labels, name=name)
        g = Gts(tuple(states), frozenset(init), frozenset(ap), frozenset(may), frozenset(must), labels, name=name)
        if kind == "kmts" and validate(g) is ModelKind.GTS:
            raise ModelError("kmts model has a must transition with more than one target")
        return g


def parse_model(text: str) -> Model:
    """Parse the textual model format.

    ::

        model gts G { ap: a; states: s, q; init: s;
          label s: a; label q: !a;
          may s -> s; may s -> q;
          must s -> {s, q}; }

    ``model ks`` returns a :class:`Ks` (edges via ``trans`` or ``may``);
    ``model kmts`` additionally rejects non-singleton must targets.
    """
    return _ModelParser(text).parse()


def _label_text(lits: frozenset[Literal]) -> str:
    return ", ".join(str(l) for l in sorted(lits, key=lambda l: (l.name, l.negated)))


def serialize_model(m: Model) -> str:
    order = {s: i for i, s in enumerate(m.states)}
    if isinstance(m, Ks):
        header = "ks"
        edges = [f"  trans {s} -> {t};" for s, t in sorted(m.trans, key=lambda e: (order[e[0]], order[e[1]]))]
    else:
        header = str(validate(m)).lower()
        if header == "ks":
            header = "kmts"
        edges = [f"  may {s} -> {t};" for s, t in sorted(m.may, key=lambda e: (order[e[0]], order[e[1]]))]
        hypers = sorted(
            ((s, sorted(a, key=order.__getitem__)) for s, a in m.must),
            key=lambda h: (order[h[0]], [order[t] for t in h[1]]),
        )
        edges += [f"  must {s} -> {{{', '.join(a)}}};" for s, a in hypers]
    lines = [f"model {header} {m.name} {{"]
    lines.append(f"  ap: {', '.join(sorted(m.ap))};")
    lines.append(f"  states: {', '.join(m.states)};")
    lines.append(f"  init: {', '.join(s for s in m.states if s in m.init)};")
    lines += [f"  label {s}: {_label_text(m.labels[s])};" for s in m.states if m.labels[s]]
    lines += edges
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_dot(m: Model) -> str:
    """Graphviz rendering: may edges dashed, must edges solid (hyper via a point node)."""
    g = as_gts(m)
    lines = [f'digraph "{g.name}" {{', "  rankdir=LR;"]
    for s in g.states:
        lab = _label_text(g.labels[s])
        shape = "doublecircle" if s in g.init else "circle"
        lines.append(f'  "{s}" [shape={shape}, label="{s}\\n[{lab}]"];')
    singles = {(s, next(iter(a))) for s, a in g.must if len(a) == 1}
    for s, t in sorted(g.may):
        style = "solid" if (s, t) in singles else "dashed"
        lines.append(f'  "{s}" -> "{t}" [style={style}];')
    for k, (s, a) in enumerate(sorted((s, tuple(sorted(a))) for s, a in g.must if len(a) > 1)):
        hub = f"_h{k}"
        lines.append(f'  "{hub}" [shape=point];')
        lines.append(f'  "{s}" -> "{hub}" [arrowhead=none];')
        for t in a:
            lines.append(f'  "{hub}" -> "{t}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
