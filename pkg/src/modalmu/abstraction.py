"""Abstraction settings and model transformations.

* :func:`gtok` replaces every true hypertransition ``p -> A`` by a must
  step into a fresh state ``p_A`` that stands for the whole of ``A``.
* :func:`extend_rho` lifts an abstraction relation across that map.
* :func:`steps_abstraction` collapses a Kripke structure by distance to a
  proposition, giving a KMTS that proves reachability of it.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Literal as Lit, Optional

from .errors import AbstractionError, ModelError
from .models import Gts, Ks, _ModelParser, embed_ks
from .refinement import is_mixed_simulation

__all__ = [
    "AbstractionSetting", "StateMap", "gtok", "extend_rho", "steps",
    "steps_abstraction", "make_setting", "parse_setting", "serialize_setting",
]

GtokMode = Lit["keep-may", "figure-faithful"]


@dataclass(frozen=True)
class AbstractionSetting:
    concrete_states: tuple[str, ...]
    abstract_states: tuple[str, ...]
    rho: frozenset[tuple[str, str]]

    def __post_init__(self):
        rho = frozenset(self.rho)
        c, s = set(self.concrete_states), set(self.abstract_states)
        for a, b in rho:
            if a not in c:
                raise AbstractionError(f"rho pair ({a}, {b}): {a} is not a concrete state")
            if b not in s:
                raise AbstractionError(f"rho pair ({a}, {b}): {b} is not an abstract state")
        object.__setattr__(self, "concrete_states", tuple(self.concrete_states))
        object.__setattr__(self, "abstract_states", tuple(self.abstract_states))
        object.__setattr__(self, "rho", rho)


@dataclass(frozen=True)
class StateMap:
    new_states: dict[frozenset[str], str] = field(default_factory=dict)

    def __len__(self):
        return len(self.new_states)


def _fresh(base: str, taken: set[str]) -> str:
    name, k = base, 1
    while name in taken:
        name = f"{base}_{k}"
        k += 1
    return name


def gtok(g: Gts, mode: GtokMode = "keep-may") -> tuple[Gts, StateMap]:
    """Turn a GTS into a KMTS.

    For each distinct target set ``A`` of a hypertransition with ``|A| >= 2``
    a state ``p_A`` is added, named by concatenating the members of ``A``.
    It is labelled with the intersection of the members' labels and may-steps
    to every original may-successor of a member, plus to ``p_B`` for each
    member's own replaced hypertransition ``B``.  In ``figure-faithful``
    mode the original may edges ``p -> t`` with ``t in A`` are dropped for
    each replaced ``p -> A``, unless a singleton must ``p -> {t}`` remains.
    """
    if mode not in ("keep-may", "figure-faithful"):
        raise ValueError(f"unknown gtok mode {mode!r}")
    order = {s: i for i, s in enumerate(g.states)}
    targets = sorted(
        {a for _, a in g.must if len(a) > 1},
        key=lambda a: sorted(order[t] for t in a),
    )
    taken = set(g.states)
    new_states: dict[frozenset[str], str] = {}
    for a in targets:
        name = _fresh("".join(sorted(a, key=order.__getitem__)), taken)
        taken.add(name)
        new_states[a] = name

    replaced: dict[str, list[frozenset[str]]] = {}
    for s, a in g.must:
        if len(a) > 1:
            replaced.setdefault(s, []).append(a)

    may = set(g.may)
    must = {(s, a) for s, a in g.must if len(a) == 1}
    if mode == "figure-faithful":
        # edges still backing a singleton must stay, or the result is inconsistent
        backed = {(s, t) for s, a in must for t in a}
        for s, hypers in replaced.items():
            for a in hypers:
                may -= {(s, t) for t in a} - backed
    for s, hypers in replaced.items():
        for a in hypers:
            must.add((s, frozenset([new_states[a]])))
            may.add((s, new_states[a]))
    labels = dict(g.labels)
    for a, pa in new_states.items():
        labels[pa] = frozenset.intersection(*(g.labels[p] for p in a))
        for p in a:
            for t in g.successors(p):
                may.add((pa, t))
            for b in replaced.get(p, ()):
                may.add((pa, new_states[b]))
    out = Gts(
        states=g.states + tuple(new_states[a] for a in targets),
        init=g.init,
        ap=g.ap,
        may=frozenset(may),
        must=frozenset(must),
        labels=labels,
        name=f"GtoK_{g.name}",
    )
    return out, StateMap(new_states)


def extend_rho(setting: AbstractionSetting, smap: StateMap,
               sources: Optional[Gts] = None) -> AbstractionSetting:
    """Relate each concrete state to ``p_A`` whenever it is related to a member of ``A``."""
    if sources is not None:
        missing = set(sources.states) - set(setting.abstract_states)
        if missing:
            raise AbstractionError(f"source states {sorted(missing)} are not abstract states of the setting")
    rho = set(setting.rho)
    for a, pa in smap.new_states.items():
        rho |= {(c, pa) for c, p in setting.rho if p in a}
    extra = tuple(pa for pa in smap.new_states.values() if pa not in setting.abstract_states)
    return AbstractionSetting(setting.concrete_states, setting.abstract_states + extra, frozenset(rho))


def steps(k: Ks, prop: str) -> dict[str, Optional[int]]:
    """Length of the shortest path from each state to a ``prop`` state (None if unreachable)."""
    c = k.compiled
    goal = c.pos.get(prop, 0)
    pred: list[list[int]] = [[] for _ in range(c.n)]
    for i, succ in enumerate(c.may):
        for j in range(c.n):
            if succ >> j & 1:
                pred[j].append(i)
    dist: list[Optional[int]] = [None] * c.n
    queue = deque()
    for i in range(c.n):
        if goal >> i & 1:
            dist[i] = 0
            queue.append(i)
    while queue:
        j = queue.popleft()
        for i in pred[j]:
            if dist[i] is None:
                dist[i] = dist[j] + 1
                queue.append(i)
    return {s: dist[i] for i, s in enumerate(c.names)}


def steps_abstraction(k: Ks, prop: str) -> Gts:
    """Collapse ``k`` by distance to ``prop`` into a KMTS.

    Classes ``c0 .. cn`` hold the states at distance ``0 .. n`` where ``n``
    is the largest distance of an initial state; every other state goes to
    ``c_inf``.  Must steps ``ci -> c(i-1)``; may steps wherever a concrete
    transition crosses classes; the overflow class also gets a may
    self-loop.  Labels are intersections over the members.
    """
    if prop not in k.ap:
        raise AbstractionError(f"proposition {prop!r} is not in the model's ap")
    dist = steps(k, prop)
    bad = sorted(s for s in k.init if dist[s] is None)
    if bad:
        raise AbstractionError(f"initial states {bad} cannot reach {prop}")
    n = max((dist[s] for s in k.init), default=0)

    def cls(s: str) -> str:
        d = dist[s]
        return f"c{d}" if d is not None and d <= n else "c_inf"

    members: dict[str, list[str]] = {}
    for s in k.states:
        members.setdefault(cls(s), []).append(s)
    names = [f"c{i}" for i in range(n + 1) if f"c{i}" in members]
    if "c_inf" in members:
        names.append("c_inf")
    may = {(cls(s), cls(t)) for s, t in k.trans}
    if "c_inf" in members:
        may.add(("c_inf", "c_inf"))
    must = {(f"c{i}", frozenset([f"c{i - 1}"])) for i in range(1, n + 1)}
    labels = {c: frozenset.intersection(*(k.labels[s] for s in ms)) for c, ms in members.items()}
    return Gts(
        states=tuple(names),
        init=frozenset(cls(s) for s in k.init),
        ap=k.ap,
        may=frozenset(may),
        must=frozenset(must),
        labels=labels,
        name=f"steps_{k.name}",
    )


def make_setting(concrete_states: Iterable[str], rho: Iterable[tuple[str, str]],
                 abstract_states: Iterable[str], concrete: Optional[Ks] = None,
                 abstract: Optional[Gts] = None) -> AbstractionSetting:
    """Build a setting; with both witness models given, rho must be a mixed simulation.

    Only the part of rho between the states of the two models is checked.
    """
    setting = AbstractionSetting(tuple(concrete_states), tuple(abstract_states), frozenset(rho))
    if concrete is not None and not set(concrete.states) <= set(setting.concrete_states):
        raise AbstractionError("witness concrete model has states outside C")
    if abstract is not None and not set(abstract.states) <= set(setting.abstract_states):
        raise AbstractionError("abstract model has states outside S")
    if concrete is not None and abstract is not None:
        cs, as_ = set(concrete.states), set(abstract.states)
        local = {(a, b) for a, b in setting.rho if a in cs and b in as_}
        if not is_mixed_simulation(embed_ks(concrete), abstract, local):
            raise AbstractionError("rho is not a mixed simulation between the witness and the abstract model")
    return setting


def parse_setting(text: str) -> AbstractionSetting:
    """Parse ``setting NAME { concrete: ...; abstract: ...; rho: c -> s, ...; }``."""
    p = _ModelParser(text)
    p.expect("setting")
    p.ident()
    p.expect("{")
    concrete: list[str] = []
    abstract: list[str] = []
    rho: set[tuple[str, str]] = set()
    while p.peek() != "}":
        kw = p.next()
        p.expect(":")
        if kw == "concrete":
            concrete += p.idlist()
        elif kw == "abstract":
            abstract += p.idlist()
        elif kw == "rho":
            while p.peek() != ";":
                a = p.ident()
                p.expect("->")
                rho.add((a, p.ident()))
                if p.peek() == ",":
                    p.i += 1
        else:
            raise ModelError(f"syntax error: unknown setting entry {kw!r}")
        p.expect(";")
    p.expect("}")
    p.expect("")
    return AbstractionSetting(tuple(concrete), tuple(abstract), frozenset(rho))


def serialize_setting(st: AbstractionSetting, name: str = "rho") -> str:
    co = {s: i for i, s in enumerate(st.concrete_states)}
    ao = {s: i for i, s in enumerate(st.abstract_states)}
    pairs = sorted(st.rho, key=lambda p: (co[p[0]], ao[p[1]]))
    return (
        f"setting {name} {{\n"
        f"  concrete: {', '.join(st.concrete_states)};\n"
        f"  abstract: {', '.join(st.abstract_states)};\n"
        f"  rho: {', '.join(f'{a} -> {b}' for a, b in pairs)};\n"
        "}\n"
    )
