"""Acceptance criteria.

Each test checks every clause of one criterion, prints a single
``PASS``/``FAIL`` line naming the clauses that failed, and the lines are
repeated in the terminal summary.
"""
import time
from itertools import combinations

import numpy as np
import pytest

import exact
from conftest import edges
from utfsr import networks as nw
from utfsr.errors import UtfsrError
from utfsr.graphs import enumerate_triangles, moral_graph, skeleton
from utfsr.lti import FrequencyGrid, covariances_from_psd
from utfsr.model import causal_graph, psd, validate_utf
from utfsr.oracle import brute_force_md, gen_utf, ols_wiener
from utfsr.reconstruct import (ReconstructionConfig, Status, certify_against_truth,
                               md_edge_removable, moral_bound, utf_sr)
from utfsr.wiener import (DELAYED, PRESENT, RegressorSpec, causal_wiener, cwsep,
                          noncausal_wiener)


class Criterion:
    def __init__(self, request, number, title):
        self.request, self.number, self.title = request, number, title
        self.failures = []
        self.start = time.perf_counter()

    def check(self, ok, clause):
        if not ok:
            self.failures.append(clause)
        return ok

    @property
    def elapsed(self):
        return time.perf_counter() - self.start

    def finish(self):
        verdict = "PASS" if not self.failures else "FAIL"
        line = f"criterion {self.number} {verdict}: {self.title} ({self.elapsed:.1f} s)"
        if self.failures:
            line += " | failed: " + "; ".join(self.failures)
        print(line)
        self.request.config.acceptance_lines.append(line)
        assert not self.failures, line


@pytest.fixture
def criterion(request):
    def make(number, title):
        return Criterion(request, number, title)
    return make


def test_criterion_1_identical_spectra(criterion, grid):
    c = criterion(1, "two different networks share one output spectrum")
    for a, b in [(1.0, 1.0), (2.0, 3.0)]:
        S1 = psd(nw.triangle_network(a, b, -a * b), grid).values
        S2 = psd(nw.triangle_twin(a, b), grid).values
        printed = np.array([[1, a, 0], [a, a * a + 1, b], [0, b, b * b + 1]])
        c.check(np.max(np.abs(S1 - S2)) <= 1e-10, f"spectra differ at a={a}, b={b}")
        c.check(np.max(np.abs(S1 - printed)) <= 1e-10, f"first network off the matrix at a={a}, b={b}")
        c.check(np.max(np.abs(S2 - printed)) <= 1e-10, f"second network off the matrix at a={a}, b={b}")
    c.check(c.elapsed < 1.0, "runtime over 1 s")
    c.finish()


def test_criterion_2_diamond(criterion, grid):
    c = criterion(2, "diamond network is recovered and certified")
    S = psd(nw.diamond(), grid)
    r = utf_sr(S)
    c.check(r.moral_bound.edges == edges((1, 2), (1, 4), (2, 3), (3, 4), (2, 4)), "moral bound")
    c.check(r.status is Status.CERTIFIED_EXACT, f"status {r.status.value}")
    c.check(r.output.edges == edges((1, 2), (1, 4), (2, 3), (3, 4)), "output skeleton")
    c.check(r.removed_edges == [(1, 3)], f"removed {r.removed_edges}")
    ev = r.evidence.get((1, 3))
    conditions_on_y1 = ev is not None and any(
        w is not None and 0 in w.present for w in ev.witnesses().values())
    c.check(conditions_on_y1, "no removal witness conditions on y1")
    R = covariances_from_psd(S, 32)
    c.check(cwsep(R, 1, [0], 3).separated, "cwsep(y2, {y1}, y4) does not hold")
    c.check(c.elapsed < 10.0, "runtime over 10 s")
    c.finish()


def test_criterion_3_cancellation(criterion, grid):
    c = criterion(3, "cancelling diamond is flagged as a lower bound")
    r = utf_sr(psd(nw.diamond(2, 2, 2, -8), grid))
    c.check(r.status is Status.FLAGGED_LOWER_BOUND, f"status {r.status.value}")
    c.check({(2, 3), (1, 3)} <= set(r.removed_edges), f"removed {r.removed_edges}")
    truth = certify_against_truth(r, nw.diamond(2, 2, 2, -8))
    c.check(truth.false_positives == frozenset(), "false positives")
    c.check(c.elapsed < 10.0, "runtime over 10 s")
    c.finish()


def test_criterion_4_hidden_coparent(criterion, grid):
    c = criterion(4, "moral bound step hides the cancelled coparent edge (c = 1)")
    S = psd(nw.hidden_coparent(1.0), grid)
    res = noncausal_wiener(S, 1, [0, 2, 3, 4])
    c.check(res.margin(3) < 1e-6, f"y4 margin estimating y2 is {res.margin(3):.3g}")
    r = utf_sr(S)
    c.check((1, 3) not in r.moral_bound.edges, "moral bound contains {2,4}")
    c.check(r.triangles == [], f"{len(r.triangles)} triangles")
    c.check(r.status is Status.CERTIFIED_EXACT, f"status {r.status.value}")
    R = covariances_from_psd(S, 32)
    c.check(cwsep(R, 2, [], 3).separated, "cwsep(y3, {}, y4) does not hold")
    c.finish()


def test_criterion_5_lower_bound_of_moral_graph(criterion, grid):
    c = criterion(5, "moral bound is strictly below the moral graph")
    m = nw.collider_cancellation(1.0, 1.0)
    g = moral_bound(psd(m, grid))
    c.check(g.edges == edges((1, 3), (1, 4), (2, 3), (2, 4)), f"moral bound {sorted(g.edges)}")
    c.check((0, 1) in moral_graph(causal_graph(m)).edges, "true moral graph lacks {1,2}")
    c.finish()


def _ols_confirms_zero(m, spec, tested, T=10**6):
    est = ols_wiener(m, spec, T, seed=11)
    keys = [k for k in est.coefficients if k[0] == tested and
            (k[1] >= 1 or dict(spec.entries)[tested] == PRESENT)]
    return all(abs(est.coefficients[k]) <= max(1e-3, 5 * est.standard_errors[k]) for k in keys)


def test_criterion_6_feedback_loop(criterion, grid):
    c = criterion(6, "network with a length-four feedback loop")
    m = nw.four_cycle()
    rep = validate_utf(m)
    cycle = all(e in causal_graph(m).edges for e in [(0, 1), (1, 2), (2, 3), (3, 0)])
    c.check(rep.is_utf and cycle, "fixture is not triangle-free with a 4-cycle")
    S = psd(m, grid)
    r = utf_sr(S)
    c.check([t.triangle for t in r.triangles] == [(0, 3, 4)], "triangle set")
    c.check(all(len(t.removable_edges) == 1 for t in r.triangles),
            f"removable counts {[len(t.removable_edges) for t in r.triangles]}")
    c.check(r.status is Status.CERTIFIED_EXACT, f"status {r.status.value}")

    R = covariances_from_psd(S, 32)
    bullets = [
        (RegressorSpec(4, ((3, PRESENT),), 8), 3, lambda: cwsep(R, 4, [], 3)),
        (RegressorSpec(4, ((3, DELAYED),), 8), 3, lambda: cwsep(R, 4, [], 3, delayed=True)),
        (RegressorSpec(3, ((4, DELAYED),), 8), 4, lambda: cwsep(R, 3, [], 4, delayed=True)),
    ]
    for k, (spec, tested, verdict) in enumerate(bullets, 1):
        try:
            confirmed = _ols_confirms_zero(m, spec, tested)
        except UtfsrError as exc:
            print(f"  bullet {k}: oracle unavailable ({type(exc).__name__})")
            confirmed = False
        if confirmed:
            c.check(verdict().separated, f"bullet {k} confirmed by simulation but not by cwsep")
        else:
            print(f"  bullet {k}: not confirmed by simulation; not asserted")
    fp = certify_against_truth(r, m).false_positives
    c.check(fp == frozenset(), f"false positives {sorted(fp)}")
    c.finish()


@pytest.mark.slow
def test_criterion_7_property_suite(criterion):
    c = criterion(7, "random triangle-free networks (100 seeds)")
    certified = 0
    for seed in range(100):
        n = 4 + seed % 5
        m = gen_utf(n, 0.25, 0.3, seed)
        r = utf_sr(psd(m))
        truth = certify_against_truth(r, m)
        sk = skeleton(causal_graph(m))
        mg = moral_graph(causal_graph(m))
        c.check(sk.issubgraph(r.moral_bound) and r.moral_bound.issubgraph(mg), f"seed {seed}: sandwich")
        c.check(truth.false_positives == frozenset(), f"seed {seed}: false positives")
        if r.status is Status.CERTIFIED_EXACT:
            certified += 1
            c.check(truth.false_negatives == frozenset(), f"seed {seed}: wrong certificate")
    print(f"  {certified}/100 certified")
    c.check(certified >= 90, f"only {certified} certified")
    c.check(c.elapsed < 300, "runtime over 5 min")
    c.finish()


def _ols_fixtures():
    return {
        "diamond": nw.diamond(),
        "diamond_cancel": nw.diamond(2, 2, 2, -8),
        "hidden_coparent": nw.hidden_coparent(1.0),
        "collider_cancellation": nw.collider_cancellation(),
        "triangle": nw.triangle_network(),
        "four_cycle_stable": nw.four_cycle(g41=0.25),
    }


@pytest.mark.slow
def test_criterion_8_oracle_equivalence(criterion, grid):
    c = criterion(8, "Wiener filters agree with simulation and exact algebra")
    M = 4
    for name, m in _ols_fixtures().items():
        R = covariances_from_psd(psd(m, grid), 32)
        for target in range(m.n):
            others = [k for k in range(m.n) if k != target]
            spec = RegressorSpec(target, tuple((k, PRESENT) for k in others), M)
            w = causal_wiener(R, spec).coefficients
            est = ols_wiener(m, spec, 10**6, seed=target)
            worst = max(abs(w[k] - est.coefficients[k]) - max(1e-3, 5 * est.standard_errors[k])
                        for k in est.coefficients)
            c.check(worst <= 0, f"{name} target y{target + 1}: excess {worst:.2g}")

    static = {
        "triangle": ([[0, 0, 0], [1, 0, 0], [-1, 1, 0]], [1, 1, 1], nw.triangle_network()),
        "twin": ([[0, 0, 0], [1, 0, 1 / 2], [0, 0, 0]], [1, 1 / 2, 2], nw.triangle_twin()),
        "collider": ([[0, 0, 0, 0], [0, 0, 0, 0], [-1, 1, 0, 0], [1, 1, 0, 0]], [1] * 4,
                     nw.collider_cancellation()),
    }
    for name, (H, noise, m) in static.items():
        Sigma = exact.covariance(H, noise)
        S = psd(m, grid)
        for target in range(m.n):
            others = [k for k in range(m.n) if k != target]
            for size in range(1, len(others) + 1):
                for regs in combinations(others, size):
                    w = exact.regression(Sigma, target, list(regs))
                    res = noncausal_wiener(S, target, regs)
                    for k in regs:
                        zero = res.margin(k) < 1e-6
                        c.check(zero == (w[k] == 0),
                                f"{name}: y{k + 1} estimating y{target + 1} from {regs}")
    c.finish()


def test_criterion_9_neighbourhood_search(criterion):
    c = criterion(9, "neighbourhood-restricted removal matches unrestricted search")
    tested = 0
    for seed in range(25):
        n = 3 + seed % 3
        m = gen_utf(n, 0.6, 0.3, 1000 + seed)
        S = psd(m)
        g = moral_bound(S)
        R = covariances_from_psd(S, 32)
        for edge in sorted({e for t in enumerate_triangles(g) for e in combinations(t, 2)}):
            tested += 1
            a = md_edge_removable(R, g, edge).removable
            b = brute_force_md(m, edge).removable
            c.check(a == b, f"seed {1000 + seed} edge {edge}: restricted {a}, unrestricted {b}")
    print(f"  {tested} triangle edges compared")
    c.check(tested > 0, "no triangle edges were generated")
    c.finish()
