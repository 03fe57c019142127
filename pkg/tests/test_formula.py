import pytest
from hypothesis import given

from modalmu.errors import FormulaSyntaxError, UnboundVariableError
from modalmu.formula import (
    BOT, TOP, And, Box, Diamond, Lit, Literal, Mu, Nu, Or, Var, VarName,
    analyze, dual, free_vars, is_closed, parse_formula, print_formula, props, size,
    subformulas, unfold,
)
from strategies import formulas, literals

X, Y = VarName("X"), VarName("Y")
p, q, l = Lit(Literal("p")), Lit(Literal("q")), Lit(Literal("l"))


def test_parse_atoms():
    assert parse_formula("true") == TOP
    assert parse_formula("false") == BOT
    assert parse_formula("!p") == Lit(Literal("p", True))


def test_parse_invariance():
    assert parse_formula("nu X. ([]X /\\ l)") == Nu(X, And(Box(Var(X)), l))


def test_parse_reachability():
    assert parse_formula("mu X. (p \\/ <>X)") == Mu(X, Or(p, Diamond(Var(X))))


def test_precedence_and_binder_scope():
    assert parse_formula("p \\/ q /\\ p") == Or(p, And(q, p))
    assert parse_formula("mu X. p \\/ <>X") == Mu(X, Or(p, Diamond(Var(X))))
    assert parse_formula("<>p /\\ []q") == And(Diamond(p), Box(q))
    assert parse_formula("X_2.10") == Var(VarName("X", (2, 10)))


@pytest.mark.parametrize("text, pos", [("p /\\", 4), ("(p", 2), ("mu x. p", 3), ("p q", 2)])
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(FormulaSyntaxError) as e:
        parse_formula(text)
    assert e.value.pos == pos


def test_negation_only_on_atoms():
    with pytest.raises(FormulaSyntaxError, match="non-atom"):
        parse_formula("!(p /\\ q)")
    with pytest.raises(FormulaSyntaxError):
        parse_formula("!X")


@given(formulas)
def test_print_parse_roundtrip(f):
    assert parse_formula(print_formula(f)) == f


@given(literals)
def test_complement_involution(lit):
    assert lit.complement().complement() == lit
    assert lit.complement() != lit


@given(formulas)
def test_dual_involution(f):
    assert dual(dual(f)) == f
    assert free_vars(dual(f)) == free_vars(f)


def test_literal_name_rules():
    with pytest.raises(ValueError):
        Literal("P")
    with pytest.raises(ValueError):
        Literal("mu")


def test_varname_identity():
    assert VarName("X", (1,)) != VarName("X")
    assert VarName("X").extend(2).extend(1) == VarName("X", (2, 1))
    assert str(VarName("X", (2, 1))) == "X_2.1"


def test_analyze_true():
    info = analyze(TOP)
    assert info.sub == {TOP} and not info.vars and info.well_formed


def test_analyze_reachability():
    info = analyze(parse_formula("mu X. (p \\/ <>X)"))
    assert info.mu_vars == {X} and not info.nu_vars
    assert not info.free_vars and info.well_formed


def test_duplicate_binder_is_not_well_formed():
    assert not analyze(parse_formula("(mu X. p) /\\ (nu X. q)")).well_formed


def test_identical_binders_count_once():
    # Sub is a set, so two copies of the same binder are one subformula
    assert analyze(parse_formula("(mu X. <>X) /\\ [](mu X. <>X)")).well_formed


@given(formulas)
def test_analyze_invariants(f):
    info = analyze(f)
    assert info.mu_vars | info.nu_vars <= info.vars
    if info.well_formed:
        assert not info.mu_vars & info.nu_vars
    assert (not info.free_vars) == is_closed(f)
    assert f in info.sub and len(info.sub) <= size(f)


def test_unfold():
    assert unfold(X, parse_formula("mu X. (p \\/ <>X)")) == Or(p, Diamond(Var(X)))
    assert unfold(X, parse_formula("nu X. ([]X /\\ l)")) == And(Box(Var(X)), l)
    with pytest.raises(UnboundVariableError):
        unfold(Y, parse_formula("mu X. (p \\/ <>X)"))


def test_free_vars_and_props():
    f = parse_formula("mu X. (<>Y \\/ (p /\\ X))")
    assert free_vars(f) == {Y}
    assert props(f) == {"p"}
    assert list(subformulas(f))[0] == f
