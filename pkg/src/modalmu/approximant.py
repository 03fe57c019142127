"""Least-fixpoint-free syntactic approximants.

``approx_var`` unfolds one mu-variable a bounded number of times, replacing
the innermost occurrences by ``false``; other binders are renamed by
appending the current depth to their index word so the copies stay
distinct.  ``approx`` repeats this for every mu-variable, outermost first.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Optional

from .errors import ModalMuError
from .formula import (
    BOT, TOP, And, Bot, Box, Diamond, Fixpoint, Formula, Lit, Mu, Nu, Or, Top,
    Var, VarName, analyze, free_vars, print_formula, subformulas,
)
from .models import Model, as_gts
from .mucheck import sis_masks

__all__ = ["approx_var", "approx", "uniform_alpha", "witness_check", "WitnessReport", "simplify"]

ApproxBudget = Mapping[str, int]


class _Unfolder:
    def __init__(self, x: str, psi: Formula):
        info = analyze(psi)
        if not info.well_formed:
            raise ModalMuError(f"formula is not well-formed: {print_formula(psi)}")
        self.x = x
        self.bodies = {v: next(iter(bs)).body for v, bs in info.binders.items()}
        self.memo: dict = {}

    def run(self, f: Formula, k: int, env: dict[VarName, VarName]) -> Formula:
        fv = free_vars(f)
        key = (f, k, tuple(sorted((v, env[v]) for v in fv if v in env)))
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = self._run(f, k, env)
        return hit

    def _run(self, f: Formula, k: int, env: dict[VarName, VarName]) -> Formula:
        x = self.x
        match f:
            case Top() | Bot() | Lit():
                return f
            case Var(v) if v.base == x:
                if k == 0:
                    return BOT
                try:
                    body = self.bodies[v]
                except KeyError:
                    raise ModalMuError(f"variable {v} is not bound in the source formula") from None
                return self.run(body, k - 1, env)
            case Var(v):
                # occurrences follow the name their binder received
                return Var(env.get(v, v.extend(k)))
            case And(l, r):
                return And(self.run(l, k, env), self.run(r, k, env))
            case Or(l, r):
                return Or(self.run(l, k, env), self.run(r, k, env))
            case Box(g):
                return Box(self.run(g, k, env))
            case Diamond(g):
                return Diamond(self.run(g, k, env))
            case Mu(v, body) if v.base == x:
                if k == 0:
                    return BOT
                return self.run(body, k, env)
            case Fixpoint(v, body):
                new = v.extend(k)
                inner = self.run(body, k, {**env, v: new})
                return Mu(new, inner) if isinstance(f, Mu) else Nu(new, inner)
        raise TypeError(f"not a formula: {f!r}")


def approx_var(f: Formula, x: str, k: int, psi: Formula) -> Formula:
    """Simple ``k``-th approximant of ``f`` for the mu-variable with base name ``x``.

    ``psi`` is the closed well-formed formula that supplies the unfoldings.
    A binder of ``x`` at depth ``k > 0`` is erased and its body processed at
    the same depth.
    """
    if k < 0:
        raise ValueError("approximation depth must be non-negative")
    if isinstance(x, VarName):
        x = x.base
    return _Unfolder(x, psi).run(f, k, {})


def _outermost_mu(f: Formula) -> VarName:
    info = analyze(f)
    mu_binders = [g for g in subformulas(f) if isinstance(g, Mu)]
    inner_subs = {}
    for g in mu_binders:
        if g.var not in inner_subs:
            inner_subs[g.var] = frozenset(subformulas(g.body))
    for g in mu_binders:
        if not any(g in subs for v, subs in inner_subs.items() if v != g.var):
            return g.var
    raise AssertionError(f"no outermost mu-variable in {print_formula(f)}")  # pragma: no cover


def approx(f: Formula, alpha: ApproxBudget, simplified: bool = False) -> Formula:
    """Unfold every mu-variable ``alpha[base]`` times; the result is mu-free."""
    return _approx(f, tuple(sorted(alpha.items())), simplified)


@lru_cache(maxsize=4096)
def _approx(f: Formula, budget: tuple[tuple[str, int], ...], simplified: bool) -> Formula:
    alpha = dict(budget)
    info = analyze(f)
    if not info.well_formed:
        raise ModalMuError(f"formula is not well-formed: {print_formula(f)}")
    remaining = {v.base for v in info.mu_vars}
    missing = remaining - set(alpha)
    if missing:
        raise ModalMuError(f"no budget for mu-variables {sorted(missing)}")
    done: set[str] = set()
    while analyze(f).mu_vars:
        x = _outermost_mu(f).base
        # each pass removes every copy of one base variable
        if x in done:
            raise AssertionError(f"variable {x} reappeared after elimination")  # pragma: no cover
        done.add(x)
        f = approx_var(f, x, alpha[x], f)
    return simplify(f) if simplified else f


def uniform_alpha(f: Formula, k: int) -> dict[str, int]:
    return {v.base: k for v in analyze(f).mu_vars}


def simplify(f: Formula) -> Formula:
    """Propagate true/false through connectives and drop vacuous binders."""
    match f:
        case And(l, r):
            l, r = simplify(l), simplify(r)
            if isinstance(l, Bot) or isinstance(r, Bot):
                return BOT
            if isinstance(l, Top):
                return r
            return l if isinstance(r, Top) else And(l, r)
        case Or(l, r):
            l, r = simplify(l), simplify(r)
            if isinstance(l, Top) or isinstance(r, Top):
                return TOP
            if isinstance(l, Bot):
                return r
            return l if isinstance(r, Bot) else Or(l, r)
        case Diamond(g):
            g = simplify(g)
            return BOT if isinstance(g, Bot) else Diamond(g)
        case Box(g):
            g = simplify(g)
            return TOP if isinstance(g, Top) else Box(g)
        case Fixpoint(v, body):
            body = simplify(body)
            if v not in free_vars(body):
                return body
            return Mu(v, body) if isinstance(f, Mu) else Nu(v, body)
    return f


@dataclass(frozen=True)
class WitnessReport:
    lhs: bool
    rhs: bool
    agree: bool
    approximant: Formula

    def __str__(self):
        return (f"lhs={str(self.lhs).lower()} rhs={str(self.rhs).lower()} "
                f"agree={str(self.agree).lower()}")


def witness_check(g: Model, f: Formula, alpha: Optional[ApproxBudget] = None) -> WitnessReport:
    """Compare truth of ``f`` and of its approximant at all initial states of ``g``.

    The default budget unfolds every mu-variable ``|g|`` times.
    """
    if free_vars(f):
        raise ModalMuError(f"formula is not closed: {print_formula(f)}")
    m = as_gts(g)
    if alpha is None:
        alpha = uniform_alpha(f, len(m.states))
    a = approx(f, alpha)
    init = m.compiled.mask(m.init)
    lhs = sis_masks(m, f)[0] & init == init
    rhs = sis_masks(m, a)[0] & init == init
    return WitnessReport(lhs, rhs, lhs == rhs, a)
