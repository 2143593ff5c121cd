"""Linear dynamic influence models ``y = e + H(z) y`` with diagonal noise
spectrum: graph extraction, model-class validation, exact output spectra and
sample-path simulation."""
from __future__ import annotations

import graphlib
from dataclasses import dataclass
from itertools import combinations

import numba
import numpy as np
from scipy.signal import lfilter

from .errors import AlgebraicLoop, DivergenceDetected
from .graphs import DirectedGraph, UndirectedGraph, enumerate_triangles, skeleton
from .lti import (
    FrequencyGrid,
    RationalTransfer,
    SpectralDensity,
    eval_on_grid,
    matrix_inverse_field,
)

DIVERGENCE_LIMIT = 1e9


@dataclass(frozen=True)
class NoiseChannel:
    """Innovation ``e_i`` with spectrum ``variance * |coloring(e^{iw})|^2``."""

    variance: float = 1.0
    coloring: RationalTransfer | None = None

    def __post_init__(self):
        if not self.variance > 0:
            raise ValueError(f"noise variance must be positive, got {self.variance}")


class Ldim:
    """Linear dynamic influence model.

    Parameters
    ----------
    n : int
        Number of output processes.
    dynamics : dict
        Maps ``(i, j)`` to the transfer function ``H_ji`` carrying ``y_i``
        into ``y_j``. Zero transfers are dropped.
    noise : sequence of NoiseChannel, optional
        One channel per node; white unit-variance noise by default.
    """

    def __init__(self, n: int, dynamics=None, noise=None):
        self.n = int(n)
        dyn = {}
        for (i, j), t in dict(dynamics or {}).items():
            i, j = int(i), int(j)
            if not isinstance(t, RationalTransfer):
                t = RationalTransfer.gain(float(t))
            if t.is_zero():
                continue
            if i == j:
                raise ValueError(f"H must have a zero diagonal (entry at node {i})")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge {(i, j)} outside node range {self.n}")
            dyn[(i, j)] = t
        self.dynamics = dict(sorted(dyn.items()))
        if noise is None:
            noise = [NoiseChannel() for _ in range(self.n)]
        noise = tuple(c if isinstance(c, NoiseChannel) else NoiseChannel(float(c)) for c in noise)
        if len(noise) != self.n:
            raise ValueError(f"need {self.n} noise channels, got {len(noise)}")
        self.noise = noise
        self._zero_lag_order = self._topological_order()

    @classmethod
    def from_matrix(cls, H, noise=None) -> "Ldim":
        """Build from a dense ``H`` where ``H[j][i]`` is the transfer from
        ``y_i`` to ``y_j`` (numbers or :class:`RationalTransfer`)."""
        n = len(H)
        dyn = {(i, j): H[j][i] for j in range(n) for i in range(n) if i != j}
        for j in range(n):
            entry = H[j][j]
            if (isinstance(entry, RationalTransfer) and not entry.is_zero()) or (
                    not isinstance(entry, RationalTransfer) and entry != 0):
                raise ValueError("H must have a zero diagonal")
        return cls(n, dyn, noise)

    def transfer(self, j: int, i: int) -> RationalTransfer:
        """``H_ji``, the transfer from ``y_i`` into ``y_j``."""
        return self.dynamics.get((i, j), RationalTransfer.zero())

    @property
    def max_lag(self) -> int:
        lags = [t.max_lag for t in self.dynamics.values()]
        lags += [c.coloring.max_lag for c in self.noise if c.coloring is not None]
        return max(lags, default=0)

    def zero_lag_graph(self) -> DirectedGraph:
        return DirectedGraph(self.n, frozenset(e for e, t in self.dynamics.items() if t.lag0 != 0.0))

    def _topological_order(self) -> list[int]:
        ts = graphlib.TopologicalSorter({j: set() for j in range(self.n)})
        for i, j in self.zero_lag_graph().edges:
            ts.add(j, i)
        try:
            return list(ts.static_order())
        except graphlib.CycleError as exc:
            raise AlgebraicLoop(f"direct feedthroughs form a loop: {exc.args[1]}") from None

    def __repr__(self):
        return f"Ldim(n={self.n}, edges={sorted(self.dynamics)})"


def causal_graph(m: Ldim) -> DirectedGraph:
    return DirectedGraph(m.n, frozenset(m.dynamics))


@dataclass(frozen=True)
class UtfReport:
    two_cycles: list
    triangles: list

    @property
    def is_utf(self) -> bool:
        return not self.two_cycles and not self.triangles

    def summary(self) -> str:
        if self.is_utf:
            return "UTF: true"
        parts = [f"2-cycle {i + 1},{j + 1}" for i, j in self.two_cycles]
        parts += ["triangle " + ",".join(str(v + 1) for v in tri) for tri in self.triangles]
        return f"UTF: false ({'; '.join(parts)})"


def validate_utf(m: Ldim) -> UtfReport:
    """Report 2-cycles of the causal graph and triangles of its skeleton."""
    g = causal_graph(m)
    return UtfReport(g.two_cycles(), enumerate_triangles(skeleton(g)))


def transfer_field(m: Ldim, grid: FrequencyGrid) -> np.ndarray:
    """``H(e^{iw_k})`` as an array of shape ``(N, n, n)``."""
    H = np.zeros((grid.size, m.n, m.n), dtype=complex)
    for (i, j), t in m.dynamics.items():
        H[:, j, i] = eval_on_grid(t, grid)
    return H


def noise_spectrum(m: Ldim, grid: FrequencyGrid) -> np.ndarray:
    """Diagonal entries of the noise spectrum, shape ``(N, n)``."""
    out = np.empty((grid.size, m.n))
    for i, ch in enumerate(m.noise):
        if ch.coloring is None:
            out[:, i] = ch.variance
        else:
            out[:, i] = ch.variance * np.abs(eval_on_grid(ch.coloring, grid)) ** 2
    if np.any(out <= 0):
        raise ValueError("noise spectrum must be strictly positive on the grid")
    return out


def psd(m: Ldim, grid: FrequencyGrid | None = None) -> SpectralDensity:
    """Output spectrum ``T Phi_e T^H`` with ``T = (I - H)^-1`` at each grid point."""
    grid = grid or FrequencyGrid()
    grid.check_resolution(m.max_lag)
    T = matrix_inverse_field(np.eye(m.n) - transfer_field(m, grid))
    phi_e = noise_spectrum(m, grid)
    S = (T * phi_e[:, None, :]) @ np.conj(np.swapaxes(T, 1, 2))
    S = 0.5 * (S + np.conj(np.swapaxes(S, 1, 2)))
    # exact conjugate symmetry across the grid; the two halves differ by rounding only
    N = grid.size
    S = 0.5 * (S + np.conj(S[(-np.arange(N)) % N]))
    return SpectralDensity(grid, S)


@numba.njit(cache=True)
def _recurse(e, order, in_ptr, in_edges, src, num, den, limit):
    n, T = e.shape
    n_edges = src.shape[0]
    y = np.zeros((n, T))
    u = np.zeros((n_edges, T))
    n_num = num.shape[1]
    n_den = den.shape[1]
    for t in range(T):
        for node in order:
            acc = e[node, t]
            for p in range(in_ptr[node], in_ptr[node + 1]):
                k_edge = in_edges[p]
                s = src[k_edge]
                v = 0.0
                for lag in range(min(n_num, t + 1)):
                    v += num[k_edge, lag] * y[s, t - lag]
                for lag in range(1, min(n_den, t + 1)):
                    v -= den[k_edge, lag] * u[k_edge, t - lag]
                u[k_edge, t] = v
                acc += v
            if abs(acc) > limit:
                return y, t
            y[node, t] = acc
    return y, -1


def simulate(m: Ldim, T: int, seed: int = 0, burn_in: int = 0) -> np.ndarray:
    """Draw an ``(n, T)`` sample path from zero initial conditions.

    Zero-lag terms are evaluated in topological order of the direct
    feedthrough graph. ``burn_in`` extra leading samples are generated and
    discarded.

    Raises
    ------
    DivergenceDetected
        When some ``|y_i(t)|`` exceeds ``1e9``.
    """
    total = int(T) + int(burn_in)
    rng = np.random.default_rng(seed)
    w = rng.standard_normal((m.n, total))
    e = np.empty_like(w)
    for i, ch in enumerate(m.noise):
        if ch.coloring is None:
            e[i] = np.sqrt(ch.variance) * w[i]
        else:
            e[i] = np.sqrt(ch.variance) * lfilter(
                ch.coloring.num.coeffs or (0.0,), ch.coloring.den.coeffs, w[i])

    edges = sorted(m.dynamics.items(), key=lambda kv: (kv[0][1], kv[0][0]))
    n_num = max((len(t.num.coeffs) for _, t in edges), default=1)
    n_den = max((len(t.den.coeffs) for _, t in edges), default=1)
    src = np.array([i for (i, _), _ in edges], dtype=np.int64)
    num = np.zeros((len(edges), n_num))
    den = np.zeros((len(edges), n_den))
    for k, (_, t) in enumerate(edges):
        num[k, :len(t.num.coeffs)] = t.num.coeffs
        den[k, :len(t.den.coeffs)] = t.den.coeffs
    dst = np.array([j for (_, j), _ in edges], dtype=np.int64)
    in_ptr = np.searchsorted(dst, np.arange(m.n + 1)).astype(np.int64)
    in_edges = np.arange(len(edges), dtype=np.int64)
    order = np.array(m._zero_lag_order, dtype=np.int64)

    y, bad_t = _recurse(e, order, in_ptr, in_edges, src.reshape(-1), num, den, DIVERGENCE_LIMIT)
    if bad_t >= 0:
        raise DivergenceDetected(f"|y| exceeded {DIVERGENCE_LIMIT:g} at t={bad_t}")
    return y[:, int(burn_in):]


def collider_pairs(g: DirectedGraph) -> set[tuple[int, int]]:
    """Unordered coparent pairs of ``g``."""
    out = set()
    for child in range(g.n):
        out.update(combinations(sorted(g.parents(child)), 2))
    return out


__all__ = [
    "NoiseChannel", "Ldim", "causal_graph", "UtfReport", "validate_utf", "psd",
    "simulate", "transfer_field", "noise_spectrum", "collider_pairs",
    "DirectedGraph", "UndirectedGraph",
]
