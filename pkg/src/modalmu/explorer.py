"""Bounded brute-force oracles over enumerated model universes.

Everything here works inside a finite universe of small models, so set
equalities are only evidence up to the bound; an inequality (with its
witness) holds outright.

Universes enumerate models on exactly ``max_states`` states, ordered by
labelling, then transition bitmap, then (for GTS/KMTS) must choice, then
(for unpointed universes) the designated state.  Smaller structures occur
as the reachable part of larger ones.
"""
from __future__ import annotations

import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterator, Optional, Sequence

from .abstraction import AbstractionSetting
from .errors import ModalMuError, UnknownStateError
from .formula import Formula, Literal, free_vars, print_formula
from .models import Compiled, Gts, Ks, Model, ModelKind, as_gts
from .mucheck import ThreeValued, _ks, _tt, eval_ks
from .refinement import _max_rows, _pair_ok

__all__ = [
    "EnumUniverse", "BoundedGamma", "GammaComparison", "SweepReport",
    "enumerate_models", "universe_index", "gamma_bounded", "gamma_contextual", "compare_gamma",
    "thorough_bounded", "minmodel_bounded", "kmts_sweep", "worker_count",
]


def worker_count() -> int:
    """Parallelism cap from ``MUCHECK_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("MUCHECK_THREADS", "1")))
    except ValueError:
        return 1


def _nonempty_subsets(mask: int) -> list[int]:
    return [a for a in range(1, mask + 1) if a & ~mask == 0]


def _bits(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


@dataclass(frozen=True)
class EnumUniverse:
    kind: ModelKind
    max_states: int
    ap: tuple[str, ...] = ()
    pointed: bool = True
    names: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if self.max_states < 1:
            raise ValueError("max_states must be at least 1")
        object.__setattr__(self, "ap", tuple(sorted(set(self.ap))))
        if self.names is not None:
            names = tuple(self.names)
            if len(names) != self.max_states or len(set(names)) != len(names):
                raise ValueError("names must list max_states distinct states")
            object.__setattr__(self, "names", names)

    @property
    def state_names(self) -> tuple[str, ...]:
        return self.names or tuple(f"s{i}" for i in range(self.max_states))

    @property
    def _edges(self) -> int:
        return self.max_states * self.max_states

    @property
    def _label_count(self) -> int:
        per = 2 if self.kind is ModelKind.KS else 3
        return per ** (len(self.ap) * self.max_states)

    def _must_options(self, succ: int) -> list[int]:
        if self.kind is ModelKind.KMTS:
            return [1 << t for t in _bits(succ)]
        return _nonempty_subsets(succ)

    @cached_property
    def _struct_offsets(self) -> list[int]:
        # offsets[t]: number of (may, must) structures before may bitmap t
        n = self.max_states
        offsets = [0]
        for t in range(1 << self._edges):
            count = 1
            if self.kind is not ModelKind.KS:
                for s in range(n):
                    count <<= len(self._must_options(t >> (s * n) & ((1 << n) - 1)))
            offsets.append(offsets[-1] + count)
        return offsets

    @property
    def _structs(self) -> int:
        return self._struct_offsets[-1]

    def __len__(self) -> int:
        total = self._label_count * self._structs
        return total if self.pointed else total * self.max_states

    @cached_property
    def _label_table(self) -> list[tuple[frozenset[Literal], ...]]:
        n, ap = self.max_states, self.ap
        table = []
        for code in range(self._label_count):
            labels = []
            for s in range(n):
                lits = []
                for j, p in enumerate(ap):
                    if self.kind is ModelKind.KS:
                        digit = code >> (s * len(ap) + j) & 1
                        lits.append(Literal(p, bool(digit)))
                    else:
                        digit = code // 3 ** (s * len(ap) + j) % 3
                        if digit:
                            lits.append(Literal(p, digit == 2))
                labels.append(frozenset(lits))
            table.append(tuple(labels))
        return table

    def _decode(self, i: int) -> tuple[int, int, list[tuple[int, ...]], int]:
        if not 0 <= i < len(self):
            raise IndexError(i)
        n = self.max_states
        point = 0
        if not self.pointed:
            i, point = divmod(i, n)
        label_code, rest = divmod(i, self._structs)
        if self.kind is ModelKind.KS:
            may = rest
            must = [tuple(1 << t for t in _bits(may >> (s * n) & ((1 << n) - 1))) for s in range(n)]
            return label_code, may, must, point
        offsets = self._struct_offsets
        lo, hi = 0, len(offsets) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if offsets[mid] <= rest:
                lo = mid
            else:
                hi = mid
        may = lo
        choice = rest - offsets[may]
        must = []
        for s in range(n):
            options = self._must_options(may >> (s * n) & ((1 << n) - 1))
            radix = 1 << len(options)
            choice, pick = divmod(choice, radix)
            must.append(tuple(a for k, a in enumerate(options) if pick >> k & 1))
        return label_code, may, must, point

    def compiled(self, i: int) -> tuple[Compiled, int]:
        """Index form of model ``i`` and the index of its designated state."""
        label_code, may, must, point = self._decode(i)
        n = self.max_states
        names = self.state_names
        labels = self._label_table[label_code]
        pos: dict[str, int] = {}
        neg: dict[str, int] = {}
        for s, lits in enumerate(labels):
            for lit in lits:
                table = neg if lit.negated else pos
                table[lit.name] = table.get(lit.name, 0) | 1 << s
        c = Compiled(
            names=names,
            index={s: k for k, s in enumerate(names)},
            may=tuple(may >> (s * n) & ((1 << n) - 1) for s in range(n)),
            must=tuple(must),
            pos=pos,
            neg=neg,
            labels=labels,
        )
        return c, point

    def model(self, i: int) -> Model:
        """Model ``i`` with its designated state as the only initial state."""
        c, point = self.compiled(i)
        names = c.names
        may = {(names[s], names[t]) for s in range(c.n) for t in _bits(c.may[s])}
        labels = {names[s]: c.labels[s] for s in range(c.n)}
        init = frozenset([names[point]])
        if self.kind is ModelKind.KS:
            return Ks(names, init, frozenset(self.ap), frozenset(may), labels, name=f"K{i}")
        must = {(names[s], frozenset(names[t] for t in _bits(a))) for s in range(c.n) for a in c.must[s]}
        return Gts(names, init, frozenset(self.ap), frozenset(may), frozenset(must), labels, name=f"M{i}")

    def point(self, i: int) -> str:
        return self.state_names[self._decode(i)[3]]

    def index_of(self, m: Model, point: Optional[str] = None) -> int:
        """Inverse of :meth:`model` for models over this universe's state names."""
        g = as_gts(m)
        names = self.state_names
        if tuple(g.states) != names:
            raise ValueError("model states do not match the universe's state names")
        n = self.max_states
        pos = {s: k for k, s in enumerate(names)}
        label_code = 0
        for s, st in enumerate(names):
            for j, p in enumerate(self.ap):
                if self.kind is ModelKind.KS:
                    if Literal(p, True) in g.labels[st]:
                        label_code |= 1 << (s * len(self.ap) + j)
                else:
                    digit = 1 if Literal(p) in g.labels[st] else 2 if Literal(p, True) in g.labels[st] else 0
                    label_code += digit * 3 ** (s * len(self.ap) + j)
        may = 0
        for a, b in g.may:
            may |= 1 << (pos[a] * n + pos[b])
        rest = may
        if self.kind is not ModelKind.KS:
            rest = self._struct_offsets[may]
            choice, radix = 0, 1
            for s, st in enumerate(names):
                options = self._must_options(may >> (s * n) & ((1 << n) - 1))
                pick = 0
                for a in g.hypers(st):
                    pick |= 1 << options.index(sum(1 << pos[t] for t in a))
                choice += pick * radix
                radix <<= len(options)
            rest += choice
        i = label_code * self._structs + rest
        if not self.pointed:
            i = i * n + pos[point if point is not None else next(iter(sorted(g.init, key=pos.get)))]
        elif point is not None and point != names[0]:
            raise ValueError("pointed universes designate the first state")
        return i

    def lift_index(self, i: int) -> int:
        """Index, one state larger, of model ``i`` plus an isolated extra state.

        The extra state takes labelling digit 0 for every proposition; only
        defined for pointed KS universes.
        """
        if self.kind is not ModelKind.KS or not self.pointed or self.names is not None:
            raise ValueError("lift_index needs a pointed anonymous KS universe")
        label_code, may, _, _ = self._decode(i)
        n, n1 = self.max_states, self.max_states + 1
        new_may = 0
        for s in range(n):
            for t in range(n):
                if may >> (s * n + t) & 1:
                    new_may |= 1 << (s * n1 + t)
        return label_code * (1 << (n1 * n1)) + new_may


def universe_index(k: Ks, point: str, universe: EnumUniverse) -> int:
    """Index of ``<k, point>`` padded with isolated states in a pointed KS universe.

    ``point`` becomes the first state, the others follow in state order and
    padding states take labelling digit 0 for every proposition.
    """
    if universe.kind is not ModelKind.KS or not universe.pointed:
        raise ModalMuError("universe_index needs a pointed KS universe")
    if len(k.states) > universe.max_states:
        raise ModalMuError("structure is larger than the universe bound")
    if point not in k.states:
        raise UnknownStateError(f"unknown state {point!r}")
    if not k.ap <= set(universe.ap):
        raise ModalMuError("universe ap does not cover the structure's propositions")
    order = [point] + [s for s in k.states if s != point]
    names = universe.state_names
    rename = dict(zip(order, names))
    labels = {rename[s]: k.labels[s] | frozenset(Literal(p) for p in universe.ap if p not in k.ap)
              for s in order}
    for extra in names[len(order):]:
        labels[extra] = frozenset(Literal(p) for p in universe.ap)
    padded = Ks(names, frozenset([names[0]]), frozenset(universe.ap),
                frozenset((rename[a], rename[b]) for a, b in k.trans), labels)
    return universe.index_of(padded)


def enumerate_models(universe: EnumUniverse) -> Iterator[Model]:
    for i in range(len(universe)):
        yield universe.model(i)


@dataclass(frozen=True)
class BoundedGamma:
    universe: EnumUniverse
    members: frozenset[int] = field(default_factory=frozenset)

    def __len__(self):
        return len(self.members)

    def __contains__(self, i: int) -> bool:
        return i in self.members

    def models(self) -> list[Model]:
        return [self.universe.model(i) for i in sorted(self.members)]


@dataclass(frozen=True)
class GammaComparison:
    equal: bool
    witness: Optional[int] = None


def _chunks(total: int, parts: int) -> list[tuple[int, int]]:
    step = -(-total // parts)
    return [(lo, min(total, lo + step)) for lo in range(0, total, step)]


def _gamma_range(m: Gts, s: int, universe: EnumUniverse, lo: int, hi: int) -> list[int]:
    c2 = m.compiled
    out = []
    for i in range(lo, hi):
        c1, point = universe.compiled(i)
        if _max_rows(c1, c2)[point] >> s & 1:
            out.append(i)
    return out


def _parallel_members(fn, args: tuple, total: int) -> frozenset[int]:
    workers = worker_count()
    if workers == 1 or total < 256:
        return frozenset(fn(*args, 0, total))
    members: set[int] = set()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, *args, lo, hi) for lo, hi in _chunks(total, workers * 4)]
        for fut in futures:
            members.update(fut.result())
    return frozenset(members)


def gamma_bounded(m: Model, s: str, universe: EnumUniverse) -> BoundedGamma:
    """Members of a KS universe that are below ``<m, s>`` in mixed simulation."""
    g = as_gts(m)
    if universe.kind is not ModelKind.KS:
        raise ModalMuError("concretisations are drawn from a KS universe")
    if not g.ap <= set(universe.ap):
        raise ModalMuError("universe ap does not cover the model's propositions")
    if s not in g.compiled.index:
        raise UnknownStateError(f"unknown state {s!r}")
    members = _parallel_members(_gamma_range, (g, g.compiled.index[s], universe), len(universe))
    return BoundedGamma(universe, members)


def _is_sim_rows(c1: Compiled, c2: Compiled, rows: list[int]) -> bool:
    for i in range(c1.n):
        for j in _bits(rows[i]):
            if not _pair_ok(c1, c2, rows, i, j):
                return False
    return True


def gamma_contextual(setting: AbstractionSetting, m: Model, s: str) -> BoundedGamma:
    """Concretisations of ``<m, s>`` in the context of the setting's relation.

    The universe holds every Kripke structure on exactly the concrete state
    names, pointed at each state in turn; a member must be pointed at a
    state rho-related to ``s`` and rho (restricted to the two state sets)
    must be a mixed simulation.
    """
    g = as_gts(m)
    if not set(g.states) <= set(setting.abstract_states):
        raise ModalMuError("model states must be abstract states of the setting")
    if s not in g.compiled.index:
        raise UnknownStateError(f"unknown state {s!r}")
    universe = EnumUniverse(ModelKind.KS, len(setting.concrete_states), tuple(sorted(g.ap)),
                            pointed=False, names=setting.concrete_states)
    c2 = g.compiled
    local = [(a, b) for a, b in setting.rho if b in c2.index]
    starts = {a for a, b in setting.rho if b == s}
    members = set()
    n = universe.max_states
    for i in range(0, len(universe), n):
        c1, _ = universe.compiled(i)
        rows = [0] * c1.n
        for a, b in local:
            rows[c1.index[a]] |= 1 << c2.index[b]
        if not starts or not _is_sim_rows(c1, c2, rows):
            continue
        for k, name in enumerate(universe.state_names):
            if name in starts:
                members.add(i + k)
    return BoundedGamma(universe, frozenset(members))


def compare_gamma(a: BoundedGamma, b: BoundedGamma) -> GammaComparison:
    if a.universe != b.universe:
        raise ModalMuError("bounded concretisation sets come from different universes")
    diff = a.members ^ b.members
    if not diff:
        return GammaComparison(True)
    return GammaComparison(False, min(diff))


def thorough_bounded(m: Model, s: str, f: Formula, universe: EnumUniverse) -> ThreeValued:
    """Verdict from all bounded concretisations; Unknown when mixed or empty."""
    if free_vars(f):
        raise ModalMuError(f"formula is not closed: {print_formula(f)}")
    gamma = gamma_bounded(m, s, universe)
    if not gamma.members:
        return ThreeValued.UNKNOWN
    sat = 0
    for i in gamma.members:
        c, point = universe.compiled(i)
        sat += _ks(c, f, {}, None) >> point & 1
    if sat == len(gamma.members):
        return ThreeValued.TRUE
    if sat == 0:
        return ThreeValued.FALSE
    return ThreeValued.UNKNOWN


def _minimal_antichains(options: list[int]) -> list[tuple[int, ...]]:
    out = []
    for r in range(len(options) + 1):
        for combo in _combinations(options, r):
            if all(not (a & ~b == 0 or b & ~a == 0) for x, a in enumerate(combo) for b in combo[x + 1:]):
                out.append(combo)
    return out


def _combinations(items: Sequence[int], r: int):
    from itertools import combinations
    return combinations(items, r)


def _gts_structures(n: int, ap: Sequence[str]) -> Iterator[Compiled]:
    """All GTSs on ``n`` states up to redundant hypertransitions.

    A hypertransition whose target contains another target of the same
    source changes neither SIS truth nor mixed simulation, so must
    relations range over antichains only.
    """
    universe = EnumUniverse(ModelKind.GTS, n, tuple(ap))
    names = universe.state_names
    index = {s: k for k, s in enumerate(names)}
    rows = []
    for succ in range(1 << n):
        for chain in _minimal_antichains(_nonempty_subsets(succ)):
            rows.append((succ, chain))
    for label_code in range(universe._label_count):
        labels = universe._label_table[label_code]
        pos: dict[str, int] = {}
        neg: dict[str, int] = {}
        for s, lits in enumerate(labels):
            for lit in lits:
                table = neg if lit.negated else pos
                table[lit.name] = table.get(lit.name, 0) | 1 << s
        for combo in product(rows, repeat=n):
            yield Compiled(
                names=names, index=index,
                may=tuple(r[0] for r in combo), must=tuple(r[1] for r in combo),
                pos=pos, neg=neg, labels=labels,
            )


def minmodel_bounded(f: Formula, k: Ks, max_size: int = 2) -> Optional[int]:
    """Least size of a GTS that mixed-simulates ``k`` and proves ``f``.

    Initial states of the candidate are chosen as its states satisfying
    ``f``, which is the best possible choice.  Returns None when no GTS of
    size at most ``max_size`` works.
    """
    if free_vars(f):
        raise ModalMuError(f"formula is not closed: {print_formula(f)}")
    if not k.init <= eval_ks(k, f):
        raise ModalMuError("the concrete structure does not satisfy the formula")
    ck = k.compiled
    init = [ck.index[s] for s in k.init]
    for n in range(1, max_size + 1):
        if n >= 3:
            warnings.warn(f"minmodel search over {n}-state GTSs enumerates millions of models", RuntimeWarning)
        for cm in _gts_structures(n, sorted(k.ap)):
            tt = _tt(cm, f, {}, None)
            if not tt:
                continue
            if not all(any(cm.labels[j] <= ck.labels[i] for j in _bits(tt)) for i in init):
                continue
            rows = _max_rows(ck, cm)
            if all(rows[i] & tt for i in init):
                return n
    return None


@dataclass
class SweepReport:
    target: BoundedGamma
    candidates: int = 0
    mismatches: int = 0
    matches: list[tuple[int, int]] = field(default_factory=list)
    witnesses: dict[int, int] = field(default_factory=dict)

    @property
    def all_mismatch(self) -> bool:
        return self.candidates > 0 and self.mismatches == self.candidates


def _kmts_range(ks_universe: EnumUniverse, target: frozenset[int], n: int,
                lo: int, hi: int) -> list[tuple[int, Optional[int]]]:
    cand_universe = EnumUniverse(ModelKind.KMTS, n, ks_universe.ap)
    concrete = [ks_universe.compiled(i)[0] for i in range(len(ks_universe))]
    out = []
    for ci in range(lo, hi):
        c2, _ = cand_universe.compiled(ci)
        members = frozenset(i for i, c1 in enumerate(concrete) if _max_rows(c1, c2)[0] & 1)
        diff = members ^ target
        out.append((ci, min(diff) if diff else None))
    return out


def kmts_sweep(m: Model, s: str, size: int, bound: int, ap: Sequence[str]) -> SweepReport:
    """Compare ``<m, s>`` against every pointed KMTS with at most ``size`` states.

    All comparisons use the pointed KS universe with ``bound`` states.  A
    match would be a KMTS with the same bounded concretisations.
    """
    ks_universe = EnumUniverse(ModelKind.KS, bound, tuple(ap))
    target = gamma_bounded(m, s, ks_universe)
    report = SweepReport(target)
    workers = worker_count()
    for n in range(1, size + 1):
        total = len(EnumUniverse(ModelKind.KMTS, n, tuple(ap)))
        if workers == 1:
            results = _kmts_range(ks_universe, target.members, n, 0, total)
        else:
            results = []
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(_kmts_range, ks_universe, target.members, n, lo, hi)
                           for lo, hi in _chunks(total, workers * 4)]
                for fut in futures:
                    results.extend(fut.result())
        for ci, witness in results:
            report.candidates += 1
            if witness is None:
                report.matches.append((n, ci))
            else:
                report.mismatches += 1
                report.witnesses[witness] = report.witnesses.get(witness, 0) + 1
    return report
