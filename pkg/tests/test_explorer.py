import warnings
from itertools import combinations, product

import pytest

from modalmu.abstraction import AbstractionSetting, extend_rho, gtok
from modalmu.errors import ModalMuError, ModelError
from modalmu.explorer import (
    EnumUniverse, compare_gamma, enumerate_models, gamma_bounded, gamma_contextual,
    kmts_sweep, minmodel_bounded, thorough_bounded, universe_index,
)
from modalmu.formula import Literal, parse_formula
from modalmu.models import Gts, Ks, ModelKind, embed_ks
from modalmu.mucheck import ThreeValued, verdict
from modalmu.refinement import leq_mix_model, leq_mix_state

KS, KMTS, GTS = ModelKind.KS, ModelKind.KMTS, ModelKind.GTS
REACH = parse_formula("mu X. (p \\/ <>X)")


def _dead(negated):
    return Ks(("d",), {"d"}, {"a"}, set(), {"d": {Literal("a", negated)}})


@pytest.mark.parametrize("kind, n, ap, count", [
    (KS, 1, ("a",), 4), (KS, 2, ("a",), 64), (GTS, 1, (), 3),
])
def test_universe_counts(kind, n, ap, count):
    assert len(EnumUniverse(kind, n, ap)) == count


@pytest.mark.parametrize("n, ap", [(1, ()), (1, ("a",)), (2, ()), (2, ("a",)), (3, ("a",))])
def test_ks_count_formula(n, ap):
    assert len(EnumUniverse(KS, n, ap)) == 2 ** (len(ap) * n) * 2 ** (n * n)


def naive_models(kind, n, ap):
    """Generate every labelled structure, keep the consistent ones."""
    names = tuple(f"s{i}" for i in range(n))
    edges = [(a, b) for a in names for b in names]
    hypers = [(a, frozenset(c)) for a in names for r in range(1, n + 1) for c in combinations(names, r)]
    label_choices = [frozenset(), *(frozenset({Literal(p, neg)}) for p in ap for neg in (False, True))]
    out = set()
    for labels in product(label_choices, repeat=n) if len(ap) <= 1 else ():
        for may_bits in range(1 << len(edges)):
            may = frozenset(e for k, e in enumerate(edges) if may_bits >> k & 1)
            for must_bits in range(1 << len(hypers)):
                must = frozenset(h for k, h in enumerate(hypers) if must_bits >> k & 1)
                if kind is KMTS and any(len(a) > 1 for _, a in must):
                    continue
                try:
                    out.add(Gts(names, {"s0"}, frozenset(ap), may, must, dict(zip(names, labels))))
                except ModelError:
                    pass
    return out


@pytest.mark.parametrize("kind, n, ap", [(GTS, 1, ()), (GTS, 1, ("a",)), (KMTS, 1, ("a",)),
                                         (KMTS, 2, ()), (GTS, 2, ())])
def test_enumeration_matches_generate_and_filter(kind, n, ap):
    u = EnumUniverse(kind, n, ap)
    listed = list(enumerate_models(u))
    assert len(listed) == len(u) == len(set(listed))
    assert set(listed) == naive_models(kind, n, ap)


def test_gts_one_state_listing():
    models = list(enumerate_models(EnumUniverse(GTS, 1, ())))
    assert [(len(m.may), len(m.must)) for m in models] == [(0, 0), (1, 0), (1, 1)]


@pytest.mark.parametrize("kind, pointed", [(KS, True), (KS, False), (GTS, True), (KMTS, False)])
def test_index_roundtrip(kind, pointed):
    u = EnumUniverse(kind, 2, ("a",), pointed=pointed)
    for i in range(0, len(u), 7):
        m = u.model(i)
        assert u.index_of(m, u.point(i)) == i


def test_gadget_gamma_members(fx):
    u = EnumUniverse(KS, 2, ("a",))
    gamma = gamma_bounded(fx("G.gts"), "s", u)
    assert universe_index(fx("p1.ks"), "p1", u) in gamma
    assert universe_index(fx("p2p3.ks"), "p2", u) in gamma
    assert universe_index(_dead(False), "d", u) not in gamma
    assert universe_index(_dead(True), "d", u) not in gamma


def test_gamma_matches_definition(fx):
    g = fx("G.gts")
    u = EnumUniverse(KS, 2, ("a",))
    gamma = gamma_bounded(g, "s", u)
    expected = {i for i in range(len(u)) if leq_mix_state(u.model(i), "s0", g, "s")}
    assert gamma.members == expected


def test_mall_abstracts_everything(fx):
    u = EnumUniverse(KS, 1, ())
    assert len(gamma_bounded(fx("m_all.gts"), "s1", u)) == len(u)
    u2 = EnumUniverse(KS, 2, ())
    assert len(gamma_bounded(fx("m_all.gts"), "s1", u2)) == len(u2)


def test_gamma_precondition(fx):
    with pytest.raises(ModalMuError):
        gamma_bounded(fx("G.gts"), "s", EnumUniverse(GTS, 1, ("a",)))
    with pytest.raises(ModalMuError):
        gamma_bounded(fx("G.gts"), "s", EnumUniverse(KS, 1, ()))


def test_gamma_monotone_in_bound(fx):
    g = fx("G.gts")
    for n in (1, 2):
        small = EnumUniverse(KS, n, ("a",))
        big = EnumUniverse(KS, n + 1, ("a",))
        g_small, g_big = gamma_bounded(g, "s", small), gamma_bounded(g, "s", big)
        assert {small.lift_index(i) for i in g_small.members} <= g_big.members


def test_contextual_gadget(fx):
    st = fx("setting_G.rho")
    g = fx("G.gts")
    gamma = gamma_contextual(st, g, "s")
    models = gamma.models()
    assert len(models) == 3
    a, na = Literal("a"), Literal("a", True)
    assert all(m.labels == {"s_C": {a}, "q_C": {na}} and m.init == {"s_C"} for m in models)
    assert {m.trans for m in models} == {
        frozenset({("s_C", "s_C")}), frozenset({("s_C", "q_C")}),
        frozenset({("s_C", "s_C"), ("s_C", "q_C")}),
    }
    for mode in ("keep-may", "figure-faithful"):
        k, smap = gtok(g, mode)
        assert compare_gamma(gamma, gamma_contextual(extend_rho(st, smap, g), k, "s")).equal


def test_contextual_empty_rho(fx):
    st = AbstractionSetting(("s_C", "q_C"), ("s", "q"), frozenset())
    assert len(gamma_contextual(st, fx("G.gts"), "s")) == 0


def test_compare_gamma(fx):
    u = EnumUniverse(KS, 2, ("a",))
    a = gamma_bounded(fx("G.gts"), "s", u)
    assert compare_gamma(a, a).equal
    empty = gamma_bounded(fx("kmts_pq.gts"), "t1", EnumUniverse(KS, 1, ("p", "q")))
    assert compare_gamma(empty, empty).equal
    b = gamma_bounded(fx("m_all.gts"), "s1", EnumUniverse(KS, 2, ("a",)))
    res = compare_gamma(a, b)
    assert not res.equal and res.witness == min(a.members ^ b.members)
    with pytest.raises(ModalMuError):
        compare_gamma(a, empty)


def test_thorough_examples(fx):
    f = parse_formula("[]p /\\ <>!q")
    assert thorough_bounded(fx("kmts_pq.gts"), "t1", f, EnumUniverse(KS, 2, ("p", "q"))) is ThreeValued.FALSE
    u = EnumUniverse(KS, 2, ("a",))
    assert thorough_bounded(fx("G.gts"), "s", parse_formula("true"), u) is ThreeValued.TRUE
    assert thorough_bounded(fx("G.gts"), "s", parse_formula("<>true"), u) is ThreeValued.TRUE


def test_thorough_empty_gamma_is_unknown():
    # x and y must step to each other with clashing labels: no one-state concretisation
    g = Gts(("x", "y"), {"x"}, {"a"}, {("x", "y"), ("y", "x")},
            {("x", frozenset({"y"})), ("y", frozenset({"x"}))},
            {"x": {Literal("a")}, "y": {Literal("a", True)}})
    u1 = EnumUniverse(KS, 1, ("a",))
    assert len(gamma_bounded(g, "x", u1)) == 0
    assert thorough_bounded(g, "x", parse_formula("true"), u1) is ThreeValued.UNKNOWN
    assert thorough_bounded(g, "x", parse_formula("true"), EnumUniverse(KS, 2, ("a",))) is ThreeValued.TRUE


def test_thorough_refines_sis(fx):
    # a definite SIS verdict is confirmed by every bounded concretisation
    u = EnumUniverse(KS, 2, ("a",))
    g = fx("G.gts")
    for text in ("<>true", "a", "<>!a \\/ <>a", "[]a", "nu X. (a /\\ <>X)", "mu X. (!a \\/ <>X)"):
        f = parse_formula(text)
        v = verdict(g, "s", f)
        if v is not ThreeValued.UNKNOWN:
            assert thorough_bounded(g, "s", f, u) is v


def naive_minmodel(f, k, max_size):
    """Generate and test over every GTS and every initial state set."""
    for n in range(1, max_size + 1):
        for m in enumerate_models(EnumUniverse(GTS, n, tuple(sorted(k.ap)))):
            for r in range(1, n + 1):
                for init in combinations(m.states, r):
                    cand = Gts(m.states, set(init), m.ap, m.may, m.must, m.labels)
                    if all(verdict(cand, s, f) is ThreeValued.TRUE for s in init) and \
                            leq_mix_model(embed_ks(k), cand):
                        return n
    return None


def test_minmodel_examples(fx):
    assert minmodel_bounded(REACH, fx("chain0.ks"), 2) == 1
    assert minmodel_bounded(REACH, fx("chain1.ks"), 3) == 2
    assert minmodel_bounded(parse_formula("nu X. (a /\\ []X)"), fx("p1.ks"), 1) == 1


def test_minmodel_against_generate_and_test(fx):
    for name in ("chain0.ks", "chain1.ks"):
        assert minmodel_bounded(REACH, fx(name), 2) == naive_minmodel(REACH, fx(name), 2)
    assert minmodel_bounded(REACH, fx("chain1.ks"), 1) is None is naive_minmodel(REACH, fx("chain1.ks"), 1)


def test_minmodel_growth(fx):
    sizes = [minmodel_bounded(REACH, fx(f"chain{i}.ks"), i + 2) for i in (0, 1)]
    assert sizes == [1, 2]


def test_minmodel_errors(fx):
    with pytest.raises(ModalMuError):
        minmodel_bounded(parse_formula("!p"), fx("chain0.ks"), 1)
    with pytest.raises(ModalMuError):
        minmodel_bounded(parse_formula("<>X"), fx("chain0.ks"), 1)


def test_minmodel_warns_at_three_states(fx):
    with pytest.warns(RuntimeWarning):
        assert minmodel_bounded(REACH, fx("chain2.ks"), 3) == 3


def test_minmodel_silent_below_three(fx):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert minmodel_bounded(REACH, fx("chain1.ks"), 3) == 2


def test_kmts_sweep_counts(fx):
    rep = kmts_sweep(fx("G.gts"), "s", 1, 1, ("a",))
    assert rep.candidates == 9
    assert len(EnumUniverse(KMTS, 2, ("a",))) == 729


def test_kmts_sweep_canonical_witnesses(fx):
    # observed at bound 2: every candidate differs, 12 of them only away from
    # the four canonical concretisations (p1, p2p3 and the deadlocks)
    g = fx("G.gts")
    u = EnumUniverse(KS, 2, ("a",))
    target = gamma_bounded(g, "s", u).members
    canon = {universe_index(fx("p1.ks"), "p1", u), universe_index(fx("p2p3.ks"), "p2", u),
             universe_index(_dead(False), "d", u), universe_index(_dead(True), "d", u)}
    without = 0
    total = 0
    for n in (1, 2):
        cu = EnumUniverse(KMTS, n, ("a",))
        for i in range(len(cu)):
            diff = gamma_bounded(cu.model(i), cu.point(i), u).members ^ target
            assert diff
            without += not diff & canon
            total += 1
    assert (total, without) == (738, 12)


def test_parallel_is_deterministic(fx, monkeypatch):
    g = fx("G.gts")
    u = EnumUniverse(KS, 3, ("a",))
    serial = gamma_bounded(g, "s", u).members
    monkeypatch.setenv("MUCHECK_THREADS", "2")
    assert gamma_bounded(g, "s", u).members == serial
    rep = kmts_sweep(g, "s", 1, 2, ("a",))
    assert rep.candidates == rep.mismatches == 9
