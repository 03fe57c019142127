import pytest
from hypothesis import given, settings, strategies as st

from modalmu.approximant import approx, approx_var, simplify, uniform_alpha, witness_check
from modalmu.corpus import corpus, wf_closed_corpus
from modalmu.errors import ModalMuError
from modalmu.formula import (
    BOT, TOP, And, Bot, Box, Diamond, Fixpoint, Lit, Mu, Nu, Or, Top, Var, VarName,
    analyze, free_vars, parse_formula, size, subformulas,
)
from modalmu.mucheck import ThreeValued, verdict
from modalmu.models import embed_ks
from strategies import gts_models

X = VarName("X")
REACH = parse_formula("mu X. (p \\/ <>X)")


def table_oracle(f, x, k, psi):
    """Literal rewriting table, with no scoping of outer variables."""
    bodies = {g.var: g.body for g in subformulas(psi) if isinstance(g, Fixpoint)}

    def go(g, k):
        match g:
            case Top() | Bot() | Lit():
                return g
            case Var(v) if v.base == x:
                return BOT if k == 0 else go(bodies[v], k - 1)
            case Var(v):
                return Var(v.extend(k))
            case And(a, b):
                return And(go(a, k), go(b, k))
            case Or(a, b):
                return Or(go(a, k), go(b, k))
            case Box(a):
                return Box(go(a, k))
            case Diamond(a):
                return Diamond(go(a, k))
            case Mu(v, b) if v.base == x:
                return BOT if k == 0 else go(b, k)
            case Mu(v, b):
                return Mu(v.extend(k), go(b, k))
            case Nu(v, b):
                return Nu(v.extend(k), go(b, k))
        raise TypeError(g)

    return go(f, k)


def test_depth_zero_binder():
    assert approx_var(REACH, "X", 0, REACH) == BOT


def test_atom_row():
    assert approx_var(TOP, "X", 5, REACH) == TOP


def test_one_unfolding():
    body = parse_formula("p \\/ <>X")
    assert approx_var(body, "X", 1, REACH) == parse_formula("p \\/ <>(p \\/ <>false)")


# formulas whose unfoldings mention no variable bound outside them, where
# the literal table and the scoped renaming coincide
SIMPLE = [
    "mu X. (p \\/ <>X)",
    "mu X. (p \\/ (<>X /\\ []X))",
    "mu X. <>((mu Y. (p \\/ <>Y)) \\/ X)",
    "mu X. (!p \\/ <>(p /\\ <>X))",
    "mu X. ((nu Y. (p /\\ <>Y)) \\/ []X)",
]


@pytest.mark.parametrize("text", SIMPLE)
@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_matches_table_oracle(text, k):
    psi = parse_formula(text)
    assert approx_var(psi, "X", k, psi) == table_oracle(psi, "X", k, psi)


def test_outer_variables_keep_their_binder():
    # the literal table would re-index Y inside the unfolding and leave it free
    f = parse_formula("nu Y. mu X. (Y \\/ <>X)")
    out = approx(f, {"X": 2})
    assert not free_vars(out) and analyze(out).well_formed and not analyze(out).mu_vars
    assert out == parse_formula("nu Y_2. (Y_2 \\/ <>(Y_2 \\/ <>(Y_2 \\/ <>false)))")


def test_approx_without_mu_is_identity():
    f = parse_formula("nu X. ([]X /\\ l)")
    assert approx(f, {}) == f


def test_approx_shapes():
    assert approx(REACH, {"X": 0}) == BOT
    two = approx(REACH, {"X": 2})
    assert two == parse_formula("p \\/ <>(p \\/ <>(p \\/ <>false))")


def test_uniform_alpha():
    assert uniform_alpha(REACH, 2) == {"X": 2}
    assert uniform_alpha(parse_formula("nu X. ([]X /\\ l)"), 7) == {}
    assert uniform_alpha(parse_formula("mu X. <>((mu Y. (p \\/ <>Y)) \\/ X)"), 3) == {"X": 3, "Y": 3}


def test_errors():
    bad = parse_formula("(mu X. p) /\\ (nu X. <>X)")
    with pytest.raises(ModalMuError):
        approx(bad, {"X": 1})
    with pytest.raises(ModalMuError):
        approx_var(bad, "X", 1, bad)
    with pytest.raises(ModalMuError):
        approx(REACH, {})
    with pytest.raises(ValueError):
        approx_var(REACH, "X", -1, REACH)


@pytest.mark.parametrize("f", wf_closed_corpus(), ids=str)
@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_well_formed_and_mu_free(f, k):
    out = approx(f, uniform_alpha(f, k))
    info = analyze(out)
    assert info.well_formed and not info.mu_vars and not info.free_vars


@pytest.mark.parametrize("f", wf_closed_corpus(), ids=str)
def test_approx_var_preserves_well_formedness(f):
    for x in {v.base for v in analyze(f).mu_vars}:
        for k in range(4):
            assert analyze(approx_var(f, x, k, f)).well_formed


def test_non_well_formed_corpus_entries_are_rejected():
    for f in corpus():
        if not analyze(f).well_formed:
            with pytest.raises(ModalMuError):
                approx(f, uniform_alpha(f, 1))


def test_termination_and_size():
    # nested mu: each pass removes one base name, sizes stay finite
    for f in wf_closed_corpus():
        for k in range(4):
            assert size(approx(f, uniform_alpha(f, k))) < 10_000


def test_witness_examples(fx):
    chain = embed_ks(fx("chain2.ks"))
    rep = witness_check(chain, REACH)
    assert rep.agree and rep.lhs and rep.rhs
    assert witness_check(fx("G.gts"), parse_formula("<>true")).agree
    dead = embed_ks(fx("chain0.ks"))
    rep = witness_check(dead, parse_formula("mu X. (!p \\/ <>X)"))
    assert rep.agree and not rep.lhs


@settings(max_examples=150, deadline=None)
@given(gts_models(max_states=3), st.sampled_from(wf_closed_corpus()), st.integers(0, 3))
def test_approximant_underapproximates(g, f, k):
    # truth of the approximant implies truth of the formula
    a = approx(f, uniform_alpha(f, k))
    for s in g.states:
        if verdict(g, s, a) is ThreeValued.TRUE:
            assert verdict(g, s, f) is ThreeValued.TRUE


@settings(max_examples=100, deadline=None)
@given(gts_models(max_states=3), st.sampled_from(wf_closed_corpus()))
def test_witness_property(g, f):
    assert witness_check(g, f).agree


def test_simplify():
    assert simplify(approx(REACH, {"X": 1})) == parse_formula("p \\/ <>p")
    assert simplify(parse_formula("nu Y. (p /\\ true)")) == parse_formula("p")
    assert simplify(parse_formula("[]true \\/ q")) == TOP
