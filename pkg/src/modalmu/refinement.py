"""Mixed simulation between GTSs.

A relation H between the states of ``m1`` (the more concrete side) and
``m2`` is a mixed simulation when every pair satisfies

* label containment ``L2(s2) <= L1(s1)``,
* may-forward: each may step of ``s1`` is answered by a may step of ``s2``
  into H,
* must-backward: each hypertransition of ``s2`` is answered by a
  hypertransition of ``s1`` every member of which is H-related to some
  member of the target set.

Kripke structures are compared through :func:`~modalmu.models.embed_ks`.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .errors import UnknownStateError
from .models import Compiled, Gts, Model, as_gts

__all__ = [
    "SimRelation", "is_mixed_simulation", "maximal_mixed_simulation",
    "leq_mix_state", "leq_mix_model",
]


@dataclass(frozen=True)
class SimRelation:
    left: Gts
    right: Gts
    pairs: frozenset[tuple[str, str]]

    def __post_init__(self):
        pairs = frozenset(self.pairs)
        l, r = set(self.left.states), set(self.right.states)
        for a, b in pairs:
            if a not in l or b not in r:
                raise UnknownStateError(f"pair ({a}, {b}) is not typed over the two models")
        object.__setattr__(self, "pairs", pairs)

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)


def _pair_ok(c1: Compiled, c2: Compiled, rows: list[int], i: int, j: int) -> bool:
    if not c2.labels[j] <= c1.labels[i]:
        return False
    may2 = c2.may[j]
    succ = c1.may[i]
    t = 0
    while succ:
        if succ & 1 and not rows[t] & may2:
            return False
        succ >>= 1
        t += 1
    hypers1 = c1.must[i]
    for a2 in c2.must[j]:
        for a1 in hypers1:
            members, t, ok = a1, 0, True
            while members:
                if members & 1 and not rows[t] & a2:
                    ok = False
                    break
                members >>= 1
                t += 1
            if ok:
                break
        else:
            return False
    return True


def _rows(c1: Compiled, c2: Compiled, pairs: Iterable[tuple[str, str]]) -> list[int]:
    rows = [0] * c1.n
    for a, b in pairs:
        rows[c1.index[a]] |= 1 << c2.index[b]
    return rows


def is_mixed_simulation(m1: Model, m2: Model,
                        h: Union[SimRelation, Iterable[tuple[str, str]]]) -> bool:
    g1, g2 = as_gts(m1), as_gts(m2)
    c1, c2 = g1.compiled, g2.compiled
    pairs = h.pairs if isinstance(h, SimRelation) else frozenset(h)
    for a, b in pairs:
        if a not in c1.index or b not in c2.index:
            raise UnknownStateError(f"pair ({a}, {b}) is not typed over the two models")
    rows = _rows(c1, c2, pairs)
    for i in range(c1.n):
        r = rows[i]
        j = 0
        while r:
            if r & 1 and not _pair_ok(c1, c2, rows, i, j):
                return False
            r >>= 1
            j += 1
    return True


def _max_rows(c1: Compiled, c2: Compiled,
              order: Optional[Sequence[tuple[int, int]]] = None) -> list[int]:
    n1, n2 = c1.n, c2.n
    rows = [0] * n1
    for i in range(n1):
        for j in range(n2):
            if c2.labels[j] <= c1.labels[i]:
                rows[i] |= 1 << j
    # pred[t]: states of m1 whose clauses read row t
    pred: list[set[int]] = [set() for _ in range(n1)]
    for s in range(n1):
        dep = c1.may[s]
        for a in c1.must[s]:
            dep |= a
        t = 0
        while dep:
            if dep & 1:
                pred[t].add(s)
            dep >>= 1
            t += 1
    if order is None:
        order = [(i, j) for i in range(n1) for j in range(n2)]
    work = deque(p for p in order if rows[p[0]] >> p[1] & 1)
    queued = set(work)
    while work:
        i, j = work.popleft()
        queued.discard((i, j))
        if not rows[i] >> j & 1 or _pair_ok(c1, c2, rows, i, j):
            continue
        rows[i] &= ~(1 << j)
        for p in sorted(pred[i]):
            r, q = rows[p], 0
            while r:
                if r & 1 and (p, q) not in queued:
                    queued.add((p, q))
                    work.append((p, q))
                r >>= 1
                q += 1
    return rows


def maximal_mixed_simulation(m1: Model, m2: Model,
                             order: Optional[Sequence[tuple[str, str]]] = None) -> SimRelation:
    """Greatest mixed simulation between ``m1`` and ``m2``.

    Starts from all label-compatible pairs and deletes violating pairs with
    a worklist; ``order`` only fixes the initial processing order (the
    result does not depend on it).
    """
    g1, g2 = as_gts(m1), as_gts(m2)
    c1, c2 = g1.compiled, g2.compiled
    idx = None
    if order is not None:
        idx = [(c1.index[a], c2.index[b]) for a, b in order]
    rows = _max_rows(c1, c2, idx)
    pairs = frozenset(
        (a, b) for i, a in enumerate(c1.names) for j, b in enumerate(c2.names) if rows[i] >> j & 1
    )
    return SimRelation(g1, g2, pairs)


def leq_mix_state(m1: Model, s1: str, m2: Model, s2: str) -> bool:
    g1, g2 = as_gts(m1), as_gts(m2)
    c1, c2 = g1.compiled, g2.compiled
    if s1 not in c1.index:
        raise UnknownStateError(f"unknown state {s1!r} in {g1.name}")
    if s2 not in c2.index:
        raise UnknownStateError(f"unknown state {s2!r} in {g2.name}")
    return bool(_max_rows(c1, c2)[c1.index[s1]] >> c2.index[s2] & 1)


def leq_mix_model(m1: Model, m2: Model) -> bool:
    """Every initial state of ``m1`` is below some initial state of ``m2``."""
    g1, g2 = as_gts(m1), as_gts(m2)
    c1, c2 = g1.compiled, g2.compiled
    rows = _max_rows(c1, c2)
    init2 = c2.mask(g2.init)
    return all(rows[c1.index[s]] & init2 for s in g1.init)
