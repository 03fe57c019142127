from itertools import islice

import numpy as np
import pytest

from modalmu.batch import antichain_batches, batch_model, batch_tt, state_rows
from modalmu.corpus import corpus, wf_closed_corpus
from modalmu.explorer import EnumUniverse
from modalmu.formula import analyze, parse_formula
from modalmu.models import ModelKind
from modalmu.mucheck import sis_masks
from modalmu.sweeps import (
    canonical_models, is_canonical, ks_agreement_sweep, maxsim_sweep, sis_consistency_sweep,
    soundness_sweep, witness_sweep,
)


def test_corpus_shape():
    fs = corpus()
    assert len(fs) == 30
    assert len(wf_closed_corpus()) == 28
    assert all(not analyze(f).free_vars for f in wf_closed_corpus())


def test_state_rows_one_state():
    # no successor; self-loop without must; self-loop with must
    assert state_rows(1) == [(0, 0), (1, 0), (1, 1)]


def test_state_rows_are_antichains():
    for succ, bits in state_rows(3):
        targets = [a for a in range(1, 8) if bits >> (a - 1) & 1]
        assert all(a & ~succ == 0 for a in targets)
        assert all(a == b or a & ~b for a in targets for b in targets)


@pytest.mark.parametrize("n", [1, 2])
def test_batch_matches_sis(n):
    fs = wf_closed_corpus() + [parse_formula("<>p /\\ <>!p"), parse_formula("nu X. <>X")]
    for code, b in antichain_batches(n, ("p",)):
        for f in fs:
            got = batch_tt(b, f)
            for i in range(len(b)):
                assert int(got[i]) == sis_masks(batch_model(b, i, ("p",)), f)[0]


def test_batch_sample_three_states():
    f = parse_formula("mu X. (p \\/ <>X)")
    b = next(islice(antichain_batches(3, ("p",)), 5, None))[1]
    got = batch_tt(b, f)
    for i in np.linspace(0, len(b) - 1, 60, dtype=int):
        assert int(got[i]) == sis_masks(batch_model(b, int(i), ("p",)), f)[0]


def test_canonical_counts():
    # simple digraphs with loops on two unlabelled vertices
    assert len(canonical_models(ModelKind.KS, 2, ())) == 10
    assert len(canonical_models(ModelKind.KS, 1, ("p",))) == 4
    u = EnumUniverse(ModelKind.KS, 2, ())
    assert sum(is_canonical(u.compiled(i)[0]) for i in range(len(u))) == 10


def test_small_sweeps_are_clean():
    for res in (sis_consistency_sweep(1), ks_agreement_sweep(2), maxsim_sweep(1),
                soundness_sweep(2, 1), witness_sweep(1)):
        assert res.ok, res.exceptions
        assert res.cases > 0


def test_sweep_catches_broken_checker(monkeypatch):
    import modalmu.sweeps as sw
    monkeypatch.setattr(sw, "_ff", lambda c, f, env, trace: c.full)
    assert not sw.sis_consistency_sweep(1).ok
