from itertools import product

import pytest
from hypothesis import given

from modalmu.abstraction import gtok
from modalmu.errors import ModelError
from modalmu.formula import Literal
from modalmu.models import (
    Gts, Ks, ModelKind, embed_ks, model_size, parse_model, serialize_model, to_dot, validate,
)
from strategies import gts_models, ks_models

A, NA = Literal("a"), Literal("a", True)


def test_gadget(fx):
    g = fx("G.gts")
    assert isinstance(g, Gts)
    assert g.states == ("s", "q") and g.init == {"s"}
    assert g.must == {("s", frozenset({"s", "q"}))}
    assert g.labels == {"s": {A}, "q": {NA}}
    assert validate(g) is ModelKind.GTS
    assert model_size(g) == 2


def test_gtok_of_gadget_is_kmts(fx):
    k, _ = gtok(fx("G.gts"), "figure-faithful")
    assert validate(k) is ModelKind.KMTS
    assert model_size(k) == 3


def test_p1_is_ks(fx):
    p1 = fx("p1.ks")
    assert validate(p1) is ModelKind.KS
    g = Gts(("p1",), {"p1"}, {"a"}, {("p1", "p1")}, {("p1", frozenset({"p1"}))}, {"p1": {A}})
    assert validate(g) is ModelKind.KS


@pytest.mark.parametrize("text, msg", [
    ("model gts M { ap: a; states: ; init: ; }", "state"),
    ("model gts M { ap: a; states: s, t; init: s; must s -> {t}; }", "no matching may"),
    ("model gts M { ap: a; states: s; init: s; label s: a, !a; }", "both"),
    ("model gts M { ap: a; states: s; init: s; label s: b; }", "ap"),
    ("model ks M { ap: a; states: s; init: s; }", "total"),
    ("model kmts M { ap: a; states: s, t; init: s; may s -> t, s; must s -> {s, t}; }", "more than one target"),
    ("model gts M { ap: a; states: s; init: s; may s -> }", "syntax"),
])
def test_rejected_inputs(text, msg):
    with pytest.raises(ModelError, match=msg):
        parse_model(text)


def test_must_implies_may_exhaustive():
    # every (may, must) combination on two states: the constructor accepts
    # exactly the consistent ones
    names = ("s", "t")
    edges = [(a, b) for a in names for b in names]
    targets = [(a, frozenset(t)) for a in names for t in ({"s"}, {"t"}, {"s", "t"})]
    for may_bits, must_bits in product(range(16), range(64)):
        may = {e for k, e in enumerate(edges) if may_bits >> k & 1}
        must = {h for k, h in enumerate(targets) if must_bits >> k & 1}
        ok = all((a, b) in may for a, tgt in must for b in tgt)
        try:
            Gts(names, {"s"}, set(), may, must, {})
            accepted = True
        except ModelError:
            accepted = False
        assert accepted == ok


def test_embed_ks_examples(fx):
    dead = Ks(("d",), {"d"}, {"a"}, set(), {"d": {NA}})
    g = embed_ks(dead)
    assert not g.may and not g.must
    chain = embed_ks(fx("p2p3.ks"))
    assert chain.may == {("p2", "p3")} and chain.must == {("p2", frozenset({"p3"}))}
    loop = embed_ks(fx("p1.ks"))
    assert loop.may == {("p1", "p1")} and loop.must == {("p1", frozenset({"p1"}))}


@given(ks_models())
def test_embedding_validates_as_ks(k):
    assert validate(embed_ks(k)) is ModelKind.KS


@given(gts_models(props=("p", "q")))
def test_serialize_roundtrip(g):
    assert parse_model(serialize_model(g)) == g


@given(ks_models())
def test_serialize_roundtrip_ks(k):
    back = parse_model(serialize_model(k))
    assert isinstance(back, Ks) and back == k


def test_kmts_classification(fx):
    assert validate(fx("kmts_pq.gts")) is ModelKind.KMTS
    assert validate(fx("m_all.gts")) is ModelKind.KMTS


def test_dot_export(fx):
    dot = to_dot(fx("G.gts"))
    assert dot.startswith('digraph "G"') and "style=dashed" in dot
