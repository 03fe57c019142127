"""Bundled reproduction checks for the worked examples and bounded experiments.

Each check compares an expected summary string with the observed one;
the report is line oriented and in declaration order.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path
from typing import Callable, Optional, Union

from .abstraction import extend_rho, gtok, parse_setting, steps, steps_abstraction
from .explorer import (
    EnumUniverse, compare_gamma, gamma_bounded, gamma_contextual, kmts_sweep,
    minmodel_bounded, thorough_bounded, universe_index,
)
from .formula import Literal, parse_formula
from .models import Ks, ModelKind, embed_ks, parse_model, validate
from .mucheck import ThreeValued, verdict
from .refinement import leq_mix_model, maximal_mixed_simulation
from .sweeps import (
    ks_agreement_sweep, maxsim_sweep, sis_consistency_sweep, soundness_sweep, witness_sweep,
)

__all__ = ["ReproCheck", "ReproReport", "CHECKS", "paper_repro", "load_fixture", "random_reachable_ks"]

REACH = "mu X. (p \\/ <>X)"


@dataclass(frozen=True)
class ReproCheck:
    name: str
    expected: str
    observed: str
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.expected == self.observed

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: expected [{self.expected}] observed [{self.observed}]"


@dataclass(frozen=True)
class ReproReport:
    checks: tuple[ReproCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]


class Fixtures:
    def __init__(self, root: Optional[Union[str, Path]] = None):
        self.root = Path(root) if root is not None else None

    def text(self, name: str) -> str:
        if self.root is not None:
            return (self.root / name).read_text()
        return (files("modalmu") / "fixtures" / name).read_text()

    def model(self, name: str):
        return parse_model(self.text(name))

    def setting(self, name: str):
        return parse_setting(self.text(name))


def load_fixture(name: str, root: Optional[Union[str, Path]] = None):
    fx = Fixtures(root)
    return fx.setting(name) if name.endswith(".rho") else fx.model(name)


def _sweep_summary(res) -> str:
    return "0 exceptions" if res.ok else f"{len(res.exceptions)} exceptions, first: {res.exceptions[0]}"


def check_fixtures(fx: Fixtures) -> tuple[str, str]:
    kinds = {name: validate(fx.model(name)).name for name in (
        "G.gts", "gtok_G_expected.gts", "kmts_pq.gts", "m_all.gts", "k_q1q2.ks",
        "chain0.ks", "chain1.ks", "chain2.ks", "p1.ks", "p2p3.ks")}
    g = fx.model("G.gts")
    observed = ", ".join(f"{k}={v}" for k, v in kinds.items()) + f"; |G|={len(g.states)} hypers={len(g.must)}"
    expected = ("G.gts=GTS, gtok_G_expected.gts=KMTS, kmts_pq.gts=KMTS, m_all.gts=KMTS, "
                "k_q1q2.ks=KS, chain0.ks=KS, chain1.ks=KS, chain2.ks=KS, p1.ks=KS, p2p3.ks=KS; |G|=2 hypers=1")
    return expected, observed


def check_sis_consistency(fx: Fixtures) -> tuple[str, str]:
    return "0 exceptions", _sweep_summary(sis_consistency_sweep())


def check_ks_agreement(fx: Fixtures) -> tuple[str, str]:
    return "0 exceptions", _sweep_summary(ks_agreement_sweep())


def check_soundness(fx: Fixtures) -> tuple[str, str]:
    return "0 exceptions", _sweep_summary(soundness_sweep())


def check_maxsim(fx: Fixtures) -> tuple[str, str]:
    k, mall = fx.model("k_q1q2.ks"), fx.model("m_all.gts")
    rel = maximal_mixed_simulation(k, mall)
    pairs = " ".join(f"{a}:{b}" for a, b in sorted(rel.pairs))
    return ("0 exceptions; q1:s1 q1:s2 q2:s1 q2:s2",
            f"{_sweep_summary(maxsim_sweep())}; {pairs}")


def _deadlock(negated: bool) -> Ks:
    return Ks(("d",), frozenset({"d"}), frozenset({"a"}), frozenset(),
              {"d": frozenset({Literal("a", negated)})})


def check_kmts_sweep(fx: Fixtures) -> tuple[str, str]:
    g = fx.model("G.gts")
    u = EnumUniverse(ModelKind.KS, 2, ("a",))
    gamma = gamma_bounded(g, "s", u)
    members = {
        "p1": universe_index(fx.model("p1.ks"), "p1", u) in gamma,
        "p2p3": universe_index(fx.model("p2p3.ks"), "p2", u) in gamma,
        "dead_a": universe_index(_deadlock(False), "d", u) in gamma,
        "dead_not_a": universe_index(_deadlock(True), "d", u) in gamma,
    }
    report = kmts_sweep(g, "s", size=2, bound=2, ap=("a",))
    observed = (f"{report.mismatches}/{report.candidates} mismatched; "
                + " ".join(f"{k}={'in' if v else 'out'}" for k, v in members.items()))
    return "738/738 mismatched; p1=in p2p3=in dead_a=out dead_not_a=out", observed


def check_gtok(fx: Fixtures) -> tuple[str, str]:
    g = fx.model("G.gts")
    setting = fx.setting("setting_G.rho")
    expected_k = fx.model("gtok_G_expected.gts")
    base = gamma_contextual(setting, g, "s")
    parts = [f"|gamma|={len(base)}"]
    for mode in ("keep-may", "figure-faithful"):
        k, smap = gtok(g, mode)
        other = gamma_contextual(extend_rho(setting, smap, g), k, "s")
        parts.append(f"{mode}={'equal' if compare_gamma(base, other).equal else 'differ'}")
    figure, _ = gtok(g, "figure-faithful")
    parts.append(f"figure={'match' if figure == expected_k else 'differ'}")
    return "|gamma|=3 keep-may=equal figure-faithful=equal figure=match", " ".join(parts)


def check_thorough_gap(fx: Fixtures) -> tuple[str, str]:
    m = fx.model("kmts_pq.gts")
    f = parse_formula("[]p /\\ <>!q")
    parts = [f"sis={verdict(m, 't1', f)}"]
    for bound in (2, 3):
        u = EnumUniverse(ModelKind.KS, bound, ("p", "q"))
        parts.append(f"thorough@{bound}={thorough_bounded(m, 't1', f, u)}")
    return "sis=unknown thorough@2=false thorough@3=false", " ".join(parts)


def check_approximants(fx: Fixtures) -> tuple[str, str]:
    return "0 exceptions", _sweep_summary(witness_sweep())


def check_minmodel(fx: Fixtures) -> tuple[str, str]:
    f = parse_formula(REACH)
    a = minmodel_bounded(f, fx.model("chain0.ks"), 2)
    b = minmodel_bounded(f, fx.model("chain1.ks"), 3)
    return "chain0=1 chain1=2", f"chain0={a} chain1={b}"


def random_reachable_ks(rng: random.Random, max_states: int = 6, prop: str = "p") -> Ks:
    """A random KS whose initial states all reach a ``prop`` state."""
    while True:
        n = rng.randint(1, max_states)
        names = tuple(f"k{i}" for i in range(n))
        trans = frozenset((a, b) for a in names for b in names if rng.random() < 0.3)
        labels = {s: frozenset({Literal(prop, rng.random() < 0.6)}) for s in names}
        probe = Ks(names, frozenset(names[:1]), frozenset({prop}), trans, labels)
        dist = steps(probe, prop)
        reaching = [s for s in names if dist[s] is not None]
        if not reaching:
            continue
        init = frozenset(rng.sample(reaching, rng.randint(1, len(reaching))))
        return Ks(names, init, frozenset({prop}), trans, labels)


def check_steps(fx: Fixtures, count: int = 100, seed: int = 2024) -> tuple[str, str]:
    rng = random.Random(seed)
    f = parse_formula(REACH)
    bad = 0
    for _ in range(count):
        k = random_reachable_ks(rng)
        out = steps_abstraction(k, "p")
        dist = steps(k, "p")
        n = max(dist[s] for s in k.init)
        ok = (validate(out) in (ModelKind.KMTS, ModelKind.KS)
              and leq_mix_model(embed_ks(k), out)
              and all(verdict(out, s, f) is ThreeValued.TRUE for s in out.init)
              and len(out.states) <= n + 2)
        bad += not ok
    return f"{count}/{count} ok", f"{count - bad}/{count} ok"


CHECKS: dict[str, Callable[[Fixtures], tuple[str, str]]] = {
    "fixtures": check_fixtures,
    "sis-consistency": check_sis_consistency,
    "ks-agreement": check_ks_agreement,
    "soundness": check_soundness,
    "maxsim": check_maxsim,
    "kmts-sweep": check_kmts_sweep,
    "gtok": check_gtok,
    "thorough-gap": check_thorough_gap,
    "approximants": check_approximants,
    "minmodel": check_minmodel,
    "steps-abstraction": check_steps,
}


def run_check(name: str, fixtures_dir: Optional[Union[str, Path]] = None) -> ReproCheck:
    fx = Fixtures(fixtures_dir)
    start = time.perf_counter()
    expected, observed = CHECKS[name](fx)
    return ReproCheck(name, expected, observed, time.perf_counter() - start)


def paper_repro(only: Optional[list[str]] = None,
                fixtures_dir: Optional[Union[str, Path]] = None) -> ReproReport:
    names = list(CHECKS) if not only else only
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown check(s): {', '.join(unknown)}")
    return ReproReport(tuple(run_check(n, fixtures_dir) for n in names))
