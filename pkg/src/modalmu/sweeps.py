"""Exhaustive bounded experiments over small model universes.

Each sweep returns a :class:`SweepResult` counting the cases examined and
listing the exceptions found.  Two reductions keep the larger sweeps fast;
both are exact for the properties checked:

* isomorphism: a model is skipped unless it is the least of its state
  permutations, which is harmless whenever every state pair is examined;
* antichain musts: a hypertransition whose target contains another target
  of the same source changes neither SIS truth nor mixed simulation.

Smaller models are covered by larger ones through unreachable states
whenever the checked property only looks at reachable structure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterable, Optional, Sequence

import numpy as np

from .approximant import approx, uniform_alpha, witness_check
from .batch import antichain_batches, batch_model, batch_tt
from .corpus import corpus, wf_closed_corpus
from .explorer import EnumUniverse, _is_sim_rows
from .formula import Formula, print_formula
from .models import Compiled, ModelKind
from .mucheck import _ff, _ks, _tt
from .refinement import _max_rows

__all__ = [
    "SweepResult", "sis_consistency_sweep", "ks_agreement_sweep", "soundness_sweep",
    "maxsim_sweep", "witness_sweep", "canonical_models", "is_canonical",
]


@dataclass
class SweepResult:
    cases: int = 0
    exceptions: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.exceptions

    def fail(self, msg: str, limit: int = 20):
        if len(self.exceptions) < limit:
            self.exceptions.append(msg)
        elif self.exceptions[-1] != "...":
            self.exceptions.append("...")


def _key(c: Compiled, perm: Sequence[int]) -> tuple:
    # perm[old] = new
    inv = [0] * c.n
    for old, new in enumerate(perm):
        inv[new] = old

    def remap(mask: int) -> int:
        out = 0
        for old in range(c.n):
            if mask >> old & 1:
                out |= 1 << perm[old]
        return out

    return tuple(
        (
            tuple(sorted((l.name, l.negated) for l in c.labels[old])),
            remap(c.may[old]),
            tuple(sorted(remap(a) for a in c.must[old])),
        )
        for old in inv
    )


def is_canonical(c: Compiled) -> bool:
    """Whether ``c`` is the least member of its isomorphism class."""
    ident = _key(c, range(c.n))
    return all(ident <= _key(c, p) for p in permutations(range(c.n)))


def canonical_models(kind: ModelKind, n: int, ap: Sequence[str],
                     antichain: bool = False) -> list[Compiled]:
    """Structures of one universe up to isomorphism (and redundant musts)."""
    u = EnumUniverse(kind, n, tuple(ap))
    out = []
    for i in range(len(u)):
        c, _ = u.compiled(i)
        if antichain and any(a != b and a & b == a for s in range(c.n) for a in c.must[s] for b in c.must[s]):
            continue
        if is_canonical(c):
            out.append(c)
    return out


def sis_consistency_sweep(max_states: int = 2, ap: Sequence[str] = ("p",),
                          formulas: Optional[Iterable[Formula]] = None) -> SweepResult:
    """No state is in both the truth and the falsity set of any formula."""
    fs = list(formulas) if formulas is not None else corpus()
    res = SweepResult()
    for n in range(1, max_states + 1):
        u = EnumUniverse(ModelKind.GTS, n, tuple(ap))
        for i in range(len(u)):
            c, _ = u.compiled(i)
            for f in fs:
                res.cases += 1
                if _tt(c, f, {}, None) & _ff(c, f, {}, None):
                    res.fail(f"GTS n={n} #{i}: {print_formula(f)}")
    return res


def ks_agreement_sweep(max_states: int = 3, ap: Sequence[str] = ("p",),
                       formulas: Optional[Iterable[Formula]] = None) -> SweepResult:
    """On Kripke structures SIS is two-valued and agrees with the KS semantics."""
    fs = list(formulas) if formulas is not None else corpus()
    res = SweepResult()
    for n in range(1, max_states + 1):
        u = EnumUniverse(ModelKind.KS, n, tuple(ap))
        for i in range(len(u)):
            c, _ = u.compiled(i)
            for f in fs:
                res.cases += 1
                tt, ff, ks = _tt(c, f, {}, None), _ff(c, f, {}, None), _ks(c, f, {}, None)
                if tt | ff != c.full or tt != ks:
                    res.fail(f"KS n={n} #{i}: {print_formula(f)}")
    return res


def _truth_vectors(c: Compiled, fs: list[Formula], sis: bool) -> tuple[list[int], list[int]]:
    pos = [0] * c.n
    neg = [0] * c.n
    for k, f in enumerate(fs):
        if sis:
            tt, ff = _tt(c, f, {}, None), _ff(c, f, {}, None)
        else:
            tt = _ks(c, f, {}, None)
            ff = c.full & ~tt
        for s in range(c.n):
            if tt >> s & 1:
                pos[s] |= 1 << k
            if ff >> s & 1:
                neg[s] |= 1 << k
    return pos, neg


def soundness_sweep(ks_states: int = 3, gts_states: int = 2, ap: Sequence[str] = ("p",),
                    formulas: Optional[Iterable[Formula]] = None) -> SweepResult:
    """Abstract True/False verdicts transfer to every mixed-simulated concrete state.

    Every state pair of every (KS, GTS) pair is checked; Kripke structures
    with fewer states appear as unreachable-state extensions and so do
    smaller GTSs.
    """
    fs = list(formulas) if formulas is not None else corpus()
    concrete = [(c, _truth_vectors(c, fs, sis=False)[0])
                for c in canonical_models(ModelKind.KS, ks_states, ap)]
    abstract = [(c, *_truth_vectors(c, fs, sis=True))
                for c in canonical_models(ModelKind.GTS, gts_states, ap, antichain=True)]
    res = SweepResult()
    for c1, truth in concrete:
        for c2, tt, ff in abstract:
            rows = _max_rows(c1, c2)
            for i in range(c1.n):
                for j in range(c2.n):
                    if not rows[i] >> j & 1:
                        continue
                    res.cases += 1
                    if tt[j] & ~truth[i] or ff[j] & truth[i]:
                        bad = (tt[j] & ~truth[i]) | (ff[j] & truth[i])
                        k = (bad & -bad).bit_length() - 1
                        res.fail(f"{c1.names[i]} <= {c2.names[j]} breaks {print_formula(fs[k])}")
    return res


def maxsim_sweep(n: int = 2, ap: Sequence[str] = ("p",)) -> SweepResult:
    """The computed maximal simulation is a simulation and contains all others.

    Every relation between every pair of ``n``-state GTSs is tested.
    """
    models = canonical_models(ModelKind.GTS, n, ap, antichain=True)
    res = SweepResult()
    pairs = [(i, j) for i in range(n) for j in range(n)]
    for c1, c2 in product(models, repeat=2):
        top = _max_rows(c1, c2)
        if not _is_sim_rows(c1, c2, top):
            res.fail(f"maximal relation is not a simulation: {top}")
        for bits in range(1 << len(pairs)):
            rows = [0] * n
            for k, (i, j) in enumerate(pairs):
                if bits >> k & 1:
                    rows[i] |= 1 << j
            res.cases += 1
            if _is_sim_rows(c1, c2, rows) and any(rows[i] & ~top[i] for i in range(n)):
                res.fail(f"simulation {rows} escapes the maximal one {top}")
    return res


def witness_sweep(max_states: int = 3, ap: Sequence[str] = ("p",),
                  formulas: Optional[Iterable[Formula]] = None) -> SweepResult:
    """Approximants with budget ``|M|`` agree with the formula on every GTS.

    Up to two states every model and designated state goes through
    :func:`~modalmu.approximant.witness_check`.  At three states truth sets
    are compared in bulk; equal truth sets are exactly agreement for every
    choice of initial states.
    """
    fs = list(formulas) if formulas is not None else wf_closed_corpus()
    res = SweepResult()
    for n in range(1, min(max_states, 2) + 1):
        u = EnumUniverse(ModelKind.GTS, n, tuple(ap), pointed=False)
        for i in range(len(u)):
            g = u.model(i)
            for f in fs:
                res.cases += 1
                if not witness_check(g, f).agree:
                    res.fail(f"GTS n={n} #{i}: {print_formula(f)}")
    for n in range(3, max_states + 1):
        approximants = [(f, approx(f, uniform_alpha(f, n))) for f in fs]
        for code, b in antichain_batches(n, tuple(ap)):
            for f, a in approximants:
                res.cases += len(b)
                diff = np.flatnonzero(batch_tt(b, f) != batch_tt(b, a))
                for i in diff[:3]:
                    res.fail(f"GTS n={n} label {code}: {print_formula(f)} on {batch_model(b, int(i))}")
    return res
