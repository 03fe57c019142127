"""Fixpoint evaluation of mu-calculus formulas.

``eval_ks`` is the ordinary two-valued semantics on Kripke structures.
``eval_sis`` is the standard inductive semantics on GTSs: a truth set and a
falsity set computed by two separate recursive evaluations.  States are
handled as bitmasks internally (see :class:`~modalmu.models.Compiled`).
"""
from __future__ import annotations

import enum
from typing import Callable, Mapping, Optional

from .errors import UnboundVariableError, UnknownStateError, ModalMuError
from .formula import (
    And, Bot, Box, Diamond, Formula, Lit, Mu, Nu, Or, Top, Var, VarName,
    free_vars, print_formula,
)
from .models import Compiled, Gts, Ks, Model, as_gts

__all__ = ["ThreeValued", "eval_ks", "eval_sis", "verdict", "Trace"]

StateSet = frozenset  # frozenset[str]
Environment = Mapping[VarName, frozenset]
# (kind, variable, successive iterates as bitmasks); kind is "lfp" or "gfp"
Trace = list[tuple[str, VarName, list[int]]]


class ThreeValued(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def __str__(self):
        return self.value


def _dia_must(c: Compiled, u: int) -> int:
    # some hypertransition lands entirely inside u
    out = 0
    for i, hypers in enumerate(c.must):
        for a in hypers:
            if a & ~u == 0:
                out |= 1 << i
                break
    return out


def _box_may(c: Compiled, u: int) -> int:
    out = 0
    for i, succ in enumerate(c.may):
        if succ & ~u == 0:
            out |= 1 << i
    return out


def _dia_may(c: Compiled, u: int) -> int:
    out = 0
    for i, succ in enumerate(c.may):
        if succ & u:
            out |= 1 << i
    return out


def _fix(step: Callable[[int], int], start: int, kind: str, var: VarName,
         trace: Optional[Trace]) -> int:
    u = start
    seen = [u] if trace is not None else None
    while True:
        nxt = step(u)
        if nxt == u:
            break
        u = nxt
        if seen is not None:
            seen.append(u)
    if trace is not None:
        trace.append((kind, var, seen))
    return u


def _lookup(env: dict[VarName, int], x: VarName) -> int:
    try:
        return env[x]
    except KeyError:
        raise UnboundVariableError(f"free variable {x} has no binding") from None


def _ks(c: Compiled, f: Formula, env: dict, trace) -> int:
    match f:
        case Top():
            return c.full
        case Bot():
            return 0
        case Lit(lit):
            return c.lit_mask(lit)
        case Var(x):
            return _lookup(env, x)
        case And(l, r):
            return _ks(c, l, env, trace) & _ks(c, r, env, trace)
        case Or(l, r):
            return _ks(c, l, env, trace) | _ks(c, r, env, trace)
        case Diamond(g):
            return _dia_may(c, _ks(c, g, env, trace))
        case Box(g):
            return _box_may(c, _ks(c, g, env, trace))
        case Mu(x, body):
            return _fix(lambda u: _ks(c, body, {**env, x: u}, trace), 0, "lfp", x, trace)
        case Nu(x, body):
            return _fix(lambda u: _ks(c, body, {**env, x: u}, trace), c.full, "gfp", x, trace)
    raise TypeError(f"not a formula: {f!r}")


def _tt(c: Compiled, f: Formula, env: dict, trace) -> int:
    match f:
        case Top():
            return c.full
        case Bot():
            return 0
        case Lit(lit):
            return c.lit_mask(lit)
        case Var(x):
            return _lookup(env, x)
        case And(l, r):
            return _tt(c, l, env, trace) & _tt(c, r, env, trace)
        case Or(l, r):
            return _tt(c, l, env, trace) | _tt(c, r, env, trace)
        case Diamond(g):
            return _dia_must(c, _tt(c, g, env, trace))
        case Box(g):
            return _box_may(c, _tt(c, g, env, trace))
        case Mu(x, body):
            return _fix(lambda u: _tt(c, body, {**env, x: u}, trace), 0, "lfp", x, trace)
        case Nu(x, body):
            return _fix(lambda u: _tt(c, body, {**env, x: u}, trace), c.full, "gfp", x, trace)
    raise TypeError(f"not a formula: {f!r}")


def _ff(c: Compiled, f: Formula, env: dict, trace) -> int:
    match f:
        case Top():
            return 0
        case Bot():
            return c.full
        case Lit(lit):
            return c.lit_mask(lit.complement())
        case Var(x):
            return _lookup(env, x)
        case And(l, r):
            return _ff(c, l, env, trace) | _ff(c, r, env, trace)
        case Or(l, r):
            return _ff(c, l, env, trace) & _ff(c, r, env, trace)
        case Diamond(g):
            return _box_may(c, _ff(c, g, env, trace))
        case Box(g):
            return _dia_must(c, _ff(c, g, env, trace))
        case Mu(x, body):
            return _fix(lambda u: _ff(c, body, {**env, x: u}, trace), c.full, "gfp", x, trace)
        case Nu(x, body):
            return _fix(lambda u: _ff(c, body, {**env, x: u}, trace), 0, "lfp", x, trace)
    raise TypeError(f"not a formula: {f!r}")


def _env_masks(c: Compiled, f: Formula, env: Optional[Environment]) -> dict[VarName, int]:
    env = env or {}
    for x in free_vars(f):
        if x not in env:
            raise UnboundVariableError(f"free variable {x} has no binding")
    out = {}
    for x, states in env.items():
        try:
            out[x] = c.mask(states)
        except KeyError as e:
            raise UnknownStateError(f"environment binds {x} to unknown state {e.args[0]!r}") from None
    return out


def eval_ks(k: Ks, f: Formula, env: Optional[Environment] = None,
            trace: Optional[Trace] = None) -> frozenset[str]:
    """Denotation of ``f`` in the Kripke structure ``k``."""
    c = k.compiled
    return c.unmask(_ks(c, f, _env_masks(c, f, env), trace))


def eval_sis(g: Model, f: Formula, env_tt: Optional[Environment] = None,
             env_ff: Optional[Environment] = None,
             trace: Optional[Trace] = None) -> tuple[frozenset[str], frozenset[str]]:
    """Truth and falsity sets of ``f`` on ``g`` (a Ks is embedded first).

    The two environments are independent; a closed formula needs neither.
    """
    c = as_gts(g).compiled
    tt = _tt(c, f, _env_masks(c, f, env_tt), trace)
    ff = _ff(c, f, _env_masks(c, f, env_ff), trace)
    return c.unmask(tt), c.unmask(ff)


def sis_masks(g: Model, f: Formula) -> tuple[int, int]:
    """Bitmask form of ``eval_sis`` for closed formulas (used by sweeps)."""
    c = as_gts(g).compiled
    return _tt(c, f, {}, None), _ff(c, f, {}, None)


def ks_mask(k: Ks, f: Formula) -> int:
    c = k.compiled
    return _ks(c, f, {}, None)


def verdict(g: Model, s: str, f: Formula) -> ThreeValued:
    if free_vars(f):
        raise ModalMuError(f"formula is not closed: {print_formula(f)}")
    m = as_gts(g)
    if s not in m.compiled.index:
        raise UnknownStateError(f"unknown state {s!r}")
    tt, ff = sis_masks(m, f)
    bit = 1 << m.compiled.index[s]
    if tt & bit:
        return ThreeValued.TRUE
    if ff & bit:
        return ThreeValued.FALSE
    return ThreeValued.UNKNOWN
