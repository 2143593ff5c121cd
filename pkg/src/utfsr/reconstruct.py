"""Skeleton reconstruction for unidirectional triangle-free networks.

Step one keeps the pair ``{i, j}`` whenever ``y_j`` is not non-causally
Wiener separated from ``y_i`` given every other process. The resulting graph
sits between the true skeleton and the true moral graph, so its only spurious
edges join coparents, and every coparent edge closes a triangle with the
common child. Step two runs three causal separation tests on every triangle
edge, searching conditioning sets inside the neighborhoods of the two
endpoints:

* MD1: some present set ``P`` and delayed set ``D`` make the ``y_i``
  component of the causal filter estimating ``y_j`` from ``y_i, P, D``
  strictly causal;
* MD2: ``y_j`` is causally separated from ``y_i(t-1), y_i(t-2), ...``
  given some present/delayed sets;
* MD3: the same with the roles of ``i`` and ``j`` swapped.

An edge passing all three is removable. A triangle with exactly one removable
edge lost its coparent edge; two or more removable edges mean a true edge was
lost too and the output is only a lower bound of the skeleton.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations

from .errors import NumericalInconsistency, SearchBudgetExceeded
from .graphs import UndirectedGraph, _pair, enumerate_triangles
from .lti import CovarianceSequence, SpectralDensity, covariances_from_psd
from .model import Ldim, causal_graph
from .graphs import skeleton
from .wiener import (
    DEFAULT_EPS,
    DEFAULT_MAX_LAG,
    DELAYED,
    PRESENT,
    RegressorSpec,
    cwsep,
    strictly_causal_component,
    wsep,
)

DEFAULT_SEARCH_CAP = 12


class Status(str, enum.Enum):
    CERTIFIED_EXACT = "CertifiedExact"
    FLAGGED_LOWER_BOUND = "FlaggedLowerBound"
    ASSUMPTION_VIOLATION = "AssumptionViolation"

    @property
    def exit_code(self) -> int:
        return {"CertifiedExact": 0, "FlaggedLowerBound": 3, "AssumptionViolation": 4}[self.value]


@dataclass(frozen=True)
class ReconstructionConfig:
    max_lag: int = DEFAULT_MAX_LAG
    eps: float = DEFAULT_EPS
    search_cap: int = DEFAULT_SEARCH_CAP
    # admit the target's own delayed past into the delayed conditioning pool
    self_lags: bool = False


@dataclass
class EdgeRemovalEvidence:
    edge: tuple[int, int]
    removable: bool
    md1_witness: RegressorSpec | None = None
    md2_witness: RegressorSpec | None = None
    md3_witness: RegressorSpec | None = None
    subsets_searched: int = 0
    low_confidence: bool = False

    def witnesses(self) -> dict:
        return {"md1": self.md1_witness, "md2": self.md2_witness, "md3": self.md3_witness}


@dataclass
class TriangleDiagnostic:
    triangle: tuple[int, int, int]
    removable_edges: list[tuple[int, int]]
    evidence: list[EdgeRemovalEvidence] = field(default_factory=list, repr=False)


@dataclass
class ReconstructionReport:
    input_summary: dict
    moral_bound: UndirectedGraph
    output: UndirectedGraph
    status: Status
    triangles: list[TriangleDiagnostic]
    evidence: dict = field(default_factory=dict, repr=False)
    moral_margins: dict = field(default_factory=dict, repr=False)

    @property
    def removed_edges(self) -> list[tuple[int, int]]:
        return sorted(e for e, ev in self.evidence.items() if ev.removable)

    def to_dict(self) -> dict:
        def one(e):
            return [e[0] + 1, e[1] + 1]

        def spec_dict(spec):
            if spec is None:
                return None
            return {"target": spec.target + 1,
                    "present": [k + 1 for k in spec.present],
                    "delayed": [k + 1 for k in spec.delayed]}

        return {
            "status": self.status.value,
            "input_summary": self.input_summary,
            "moral_bound_edges": [one(e) for e in self.moral_bound.sorted_edges()],
            "output_edges": [one(e) for e in self.output.sorted_edges()],
            "triangles": [
                {
                    "nodes": [v + 1 for v in tri.triangle],
                    "removable_edges": [one(e) for e in tri.removable_edges],
                    "witnesses": {
                        f"{e[0] + 1}-{e[1] + 1}": {k: spec_dict(v) for k, v in ev.witnesses().items()}
                        for e, ev in ((ev.edge, ev) for ev in tri.evidence) if ev.removable
                    },
                }
                for tri in self.triangles
            ],
        }

    def to_dot(self) -> str:
        dot = self.output.to_dot(name="skeleton")
        return f"// status: {self.status.value}\n" + dot


def _moral_bound(S: SpectralDensity, cfg: ReconstructionConfig):
    edges, margins = set(), {}
    for i, j in combinations(range(S.n), 2):
        rest = [k for k in range(S.n) if k not in (i, j)]
        forward = wsep(S, j, rest, i, cfg.eps, cfg.max_lag)
        backward = wsep(S, i, rest, j, cfg.eps, cfg.max_lag)
        if forward.separated != backward.separated:
            raise NumericalInconsistency(
                f"pair (y{i + 1}, y{j + 1}): margins {forward.margin:.3g} and "
                f"{backward.margin:.3g} straddle eps={cfg.eps:g}")
        margins[(i, j)] = forward.margin
        if not forward.separated:
            edges.add((i, j))
    return UndirectedGraph(S.n, frozenset(edges)), margins


def moral_bound(S: SpectralDensity, config: ReconstructionConfig | None = None) -> UndirectedGraph:
    """Graph keeping ``{i, j}`` unless ``y_j`` is non-causally Wiener
    separated from ``y_i`` given all remaining processes."""
    return _moral_bound(S, config or ReconstructionConfig())[0]


def _conditioning_sets(pool, delayed_only=(), present_only=()):
    """Yield ``(present, delayed)`` node tuples by increasing total size;
    within a size, larger present parts come first, then lexicographic
    order. Nodes in ``delayed_only`` can only join the delayed part and
    nodes in ``present_only`` only the present part."""
    ppool = sorted(set(pool) | set(present_only))
    dpool = sorted(set(pool) | set(delayed_only))
    for size in range(len(set(ppool) | set(dpool)) + 1):
        for p in range(min(size, len(ppool)), -1, -1):
            for P in combinations(ppool, p):
                rest = [k for k in dpool if k not in P]
                for D in combinations(rest, size - p):
                    yield P, D


def md_search(R: CovarianceSequence, i: int, j: int, pool, cfg: ReconstructionConfig,
              edge=None) -> EdgeRemovalEvidence:
    """Run the three causal tests for the pair ``(i, j)`` with conditioning
    sets drawn from ``pool``. Stops at the first condition without witness."""
    pool = sorted(set(pool) - {i, j})
    if len(pool) > cfg.search_cap:
        raise SearchBudgetExceeded(
            f"conditioning pool of {len(pool)} nodes exceeds the cap of {cfg.search_cap}")
    ev = EdgeRemovalEvidence(edge=edge or _pair(i, j), removable=False)
    kw = dict(eps=cfg.eps, max_lag=cfg.max_lag)

    def first(test, target=None, tested=None):
        own = (target,) if cfg.self_lags and target is not None else ()
        tested_now = (tested,) if tested is not None else ()
        for P, D in _conditioning_sets(pool, own, tested_now):
            ev.subsets_searched += 1
            verdict = test(P, D)
            if verdict.separated:
                ev.low_confidence |= verdict.low_confidence
                return verdict.witness
        return None

    def cond(P, D):
        return [(k, PRESENT) for k in P] + [(k, DELAYED) for k in D]

    ev.md1_witness = first(lambda P, D: strictly_causal_component(R, j, i, P, D, **kw), j)
    if ev.md1_witness is None:
        return ev
    # the delayed tests may also condition on the tested node's present value
    ev.md2_witness = first(lambda P, D: cwsep(R, j, cond(P, D), i, delayed=True, **kw), j, i)
    if ev.md2_witness is None:
        return ev
    ev.md3_witness = first(lambda P, D: cwsep(R, i, cond(P, D), j, delayed=True, **kw), i, j)
    ev.removable = ev.md3_witness is not None
    return ev


def md_edge_removable(R: CovarianceSequence, g: UndirectedGraph, edge,
                      config: ReconstructionConfig | None = None) -> EdgeRemovalEvidence:
    """Neighborhood-restricted removal test for ``edge`` of ``g``.

    The smaller endpoint plays ``y_i`` and the larger ``y_j``; conditioning
    sets are drawn from ``N(i) | N(j)`` minus the endpoints.
    """
    cfg = config or ReconstructionConfig()
    i, j = _pair(*edge)
    if not g.has_edge(i, j):
        raise ValueError(f"edge {(i, j)} not in graph")
    return md_search(R, i, j, g.neighbors(i) | g.neighbors(j), cfg)


def utf_sr(S: SpectralDensity, config: ReconstructionConfig | None = None) -> ReconstructionReport:
    """Reconstruct the skeleton from an output spectrum and certify it.

    Returns a report whose ``status`` is ``CertifiedExact`` when every
    triangle of the moral bound loses exactly one edge,
    ``FlaggedLowerBound`` when some triangle loses two or more, and
    ``AssumptionViolation`` when some triangle loses none.
    """
    cfg = config or ReconstructionConfig()
    gbar, margins = _moral_bound(S, cfg)
    triangles = enumerate_triangles(gbar)
    to_test = sorted({_pair(a, b) for tri in triangles for a, b in combinations(tri, 2)})
    evidence = {}
    if to_test:
        R = covariances_from_psd(S, cfg.max_lag)
        for e in to_test:
            evidence[e] = md_edge_removable(R, gbar, e, cfg)

    diagnostics = []
    for tri in triangles:
        evs = [evidence[_pair(a, b)] for a, b in combinations(tri, 2)]
        diagnostics.append(TriangleDiagnostic(tri, [ev.edge for ev in evs if ev.removable], evs))

    counts = [len(d.removable_edges) for d in diagnostics]
    if any(c == 0 for c in counts):
        status = Status.ASSUMPTION_VIOLATION
    elif any(c >= 2 for c in counts):
        status = Status.FLAGGED_LOWER_BOUND
    else:
        status = Status.CERTIFIED_EXACT

    output = gbar.without(e for e, ev in evidence.items() if ev.removable)
    summary = {"n": S.n, "grid_size": S.grid.size, "max_lag": cfg.max_lag, "eps": cfg.eps,
               "search_cap": cfg.search_cap, "self_lags": cfg.self_lags}
    return ReconstructionReport(summary, gbar, output, status, diagnostics, evidence, margins)


@dataclass(frozen=True)
class TruthComparison:
    false_positives: frozenset
    false_negatives: frozenset

    @property
    def exact(self) -> bool:
        return not self.false_positives and not self.false_negatives


def certify_against_truth(report: ReconstructionReport, truth: Ldim) -> TruthComparison:
    true_edges = skeleton(causal_graph(truth)).edges
    out = report.output.edges
    return TruthComparison(frozenset(out - true_edges), frozenset(true_edges - out))
