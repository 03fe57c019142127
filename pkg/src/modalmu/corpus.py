"""A fixed corpus of formulas over the single proposition ``p``.

It covers every grammar production, both fixpoints, nesting and
alternation, plus two formulas that reuse a variable name for two binders
(not well-formed).
"""
from __future__ import annotations

from .formula import Formula, analyze, free_vars, parse_formula

CORPUS_TEXT: tuple[str, ...] = (
    "true",
    "false",
    "p",
    "!p",
    "p /\\ !p",
    "p \\/ !p",
    "<>true",
    "[]false",
    "<>p",
    "[]p",
    "[]p /\\ <>!p",
    "<>[]p",
    "[]<>!p",
    "mu X. (p \\/ <>X)",
    "mu X. (p \\/ []X)",
    "mu X. (p \\/ ([]X /\\ <>true))",
    "nu X. ([]X /\\ p)",
    "nu X. (<>X /\\ p)",
    "nu X. <>X",
    "mu X. []X",
    "nu X. mu Y. ((<>X /\\ p) \\/ <>Y)",
    "mu X. nu Y. ((p /\\ []Y) \\/ <>X)",
    "mu X. <>((mu Y. (p \\/ <>Y)) \\/ X)",
    "nu X. (p /\\ <>(mu Y. (!p \\/ []Y)))",
    "mu X. (p \\/ (<>X /\\ []X))",
    "nu X. ((mu Y. (p \\/ <>Y)) /\\ []X)",
    "(mu X. p) /\\ (nu X. <>X)",
    "mu X. (!p \\/ <>(p /\\ <>X))",
    "nu X. ([]X /\\ mu Y. (!p \\/ []Y))",
    "<>(nu X. (p /\\ <>X)) \\/ [](mu X. []X)",
)


def corpus() -> list[Formula]:
    return [parse_formula(t) for t in CORPUS_TEXT]


def wf_closed_corpus() -> list[Formula]:
    return [f for f in corpus() if analyze(f).well_formed and not free_vars(f)]
