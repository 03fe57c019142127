"""Vectorised SIS truth sets over many small GTSs at once.

Models share a state count ``n <= 8`` and are stored as numpy columns:
``may[:, s]`` is the may-successor bitmask of state ``s`` and
``must[:, s]`` is a bitmask over target sets (bit ``a - 1`` stands for the
target set with bitmask ``a``).  Only the truth column of SIS is computed;
it never consults the falsity column.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator, Optional, Sequence

import numpy as np

from .formula import And, Bot, Box, Diamond, Fixpoint, Formula, Lit, Mu, Or, Top, Var, free_vars

__all__ = ["GtsBatch", "antichain_batches", "batch_tt", "batch_model", "state_rows"]


@dataclass
class GtsBatch:
    n: int
    may: np.ndarray
    must: np.ndarray
    pos: dict[str, np.ndarray]
    neg: dict[str, np.ndarray]

    def __len__(self):
        return self.may.shape[0]


def _nonempty_subsets(mask: int) -> list[int]:
    return [a for a in range(1, mask + 1) if a & ~mask == 0]


def _antichains(options: list[int]) -> list[tuple[int, ...]]:
    out = []
    for r in range(len(options) + 1):
        for combo in combinations(options, r):
            if all(a & ~b and b & ~a for x, a in enumerate(combo) for b in combo[x + 1:]):
                out.append(combo)
    return out


def state_rows(n: int) -> list[tuple[int, int]]:
    """Per-state (may successors, antichain of must targets as subset bits)."""
    rows = []
    for succ in range(1 << n):
        for chain in _antichains(_nonempty_subsets(succ)):
            rows.append((succ, sum(1 << (a - 1) for a in chain)))
    return rows


def antichain_batches(n: int, ap: Sequence[str]) -> Iterator[tuple[int, GtsBatch]]:
    """One batch per partial labelling: every may relation and antichain must relation."""
    rows = state_rows(n)
    succ = np.array([r[0] for r in rows], dtype=np.uint8)
    hyp = np.array([r[1] for r in rows], dtype=np.uint64 if (1 << n) - 1 > 32 else np.uint32)
    grid = np.array(list(product(range(len(rows)), repeat=n)), dtype=np.int64)
    may = succ[grid]
    must = hyp[grid]
    size = grid.shape[0]
    ap = tuple(sorted(ap))
    for code in range(3 ** (len(ap) * n)):
        pos: dict[str, np.ndarray] = {}
        neg: dict[str, np.ndarray] = {}
        for j, p in enumerate(ap):
            pm = nm = 0
            for s in range(n):
                digit = code // 3 ** (s * len(ap) + j) % 3
                if digit == 1:
                    pm |= 1 << s
                elif digit == 2:
                    nm |= 1 << s
            pos[p] = np.full(size, pm, dtype=np.uint8)
            neg[p] = np.full(size, nm, dtype=np.uint8)
        yield code, GtsBatch(n, may, must, pos, neg)


def _subset_table(n: int) -> np.ndarray:
    # table[u]: bits of all nonempty target sets contained in u
    table = np.zeros(1 << n, dtype=np.uint64)
    for u in range(1 << n):
        table[u] = sum(1 << (a - 1) for a in range(1, 1 << n) if a & ~u == 0)
    return table


def batch_tt(b: GtsBatch, f: Formula) -> np.ndarray:
    """Truth set of the closed formula ``f`` in every model, as uint8 bitmasks."""
    table = _subset_table(b.n).astype(b.must.dtype)
    cache: dict[Formula, np.ndarray] = {}
    size = len(b)
    full = np.uint8((1 << b.n) - 1)
    zero = np.zeros(size, dtype=np.uint8)

    def ev(g: Formula, env: dict) -> np.ndarray:
        closed = not free_vars(g)
        if closed and g in cache:
            return cache[g]
        match g:
            case Top():
                out = np.full(size, full, dtype=np.uint8)
            case Bot():
                out = zero
            case Lit(lit):
                src = b.neg if lit.negated else b.pos
                out = src.get(lit.name, zero)
            case Var(v):
                out = env[v]
            case And(l, r):
                out = ev(l, env) & ev(r, env)
            case Or(l, r):
                out = ev(l, env) | ev(r, env)
            case Box(h):
                u = ev(h, env)
                out = np.zeros(size, dtype=np.uint8)
                for s in range(b.n):
                    out |= ((b.may[:, s] & ~u) == 0).astype(np.uint8) << s
            case Diamond(h):
                inside = table[ev(h, env)]
                out = np.zeros(size, dtype=np.uint8)
                for s in range(b.n):
                    out |= ((b.must[:, s] & inside) != 0).astype(np.uint8) << s
            case Fixpoint(v, body):
                cur = zero if isinstance(g, Mu) else np.full(size, full, dtype=np.uint8)
                # a chain of length n in the powerset lattice stabilises in n steps
                for _ in range(b.n):
                    cur = ev(body, {**env, v: cur})
                out = cur
            case _:
                raise TypeError(f"not a formula: {g!r}")
        if closed:
            cache[g] = out
        return out

    return ev(f, {})


def batch_model(b: GtsBatch, i: int, ap: Optional[Sequence[str]] = None):
    """Rebuild entry ``i`` as a :class:`~modalmu.models.Gts` (for reporting)."""
    from .formula import Literal
    from .models import Gts

    names = tuple(f"s{k}" for k in range(b.n))
    may = {(names[s], names[t]) for s in range(b.n) for t in range(b.n) if int(b.may[i, s]) >> t & 1}
    must = set()
    for s in range(b.n):
        bits = int(b.must[i, s])
        for a in range(1, 1 << b.n):
            if bits >> (a - 1) & 1:
                must.add((names[s], frozenset(names[t] for t in range(b.n) if a >> t & 1)))
    props = sorted(ap if ap is not None else b.pos)
    labels = {}
    for s in range(b.n):
        lits = set()
        for p in props:
            if int(b.pos[p][i]) >> s & 1:
                lits.add(Literal(p))
            if int(b.neg[p][i]) >> s & 1:
                lits.add(Literal(p, True))
        labels[names[s]] = frozenset(lits)
    return Gts(names, frozenset(names[:1]), frozenset(props), frozenset(may), frozenset(must), labels)
