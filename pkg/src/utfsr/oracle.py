"""Independent checks: simulation-based least squares, sample covariances,
random triangle-free network generation and an unrestricted removal search
for small networks."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import AlgebraicLoop, GenerationFailed
from .graphs import UndirectedGraph, _pair, enumerate_triangles
from .lti import CovarianceSequence, FrequencyGrid, RationalTransfer, covariances_from_psd
from .model import Ldim, psd, simulate, validate_utf
from .reconstruct import EdgeRemovalEvidence, ReconstructionConfig, md_search
from .wiener import RegressorSpec

GAIN_LOW, GAIN_HIGH = 0.3, 2.0
_CHUNK = 65536


@dataclass
class OlsEstimate:
    coefficients: dict
    standard_errors: dict
    sample_count: int
    residual_variance: float


def _lagged_columns(y, cols, start, stop):
    return np.stack([y[node, start - lag:stop - lag] for node, lag in cols], axis=1)


def ols_wiener(m: Ldim, spec: RegressorSpec, T: int, seed: int = 0) -> OlsEstimate:
    """Ordinary least squares of ``y_target(t)`` on the lagged regressors of
    ``spec`` over ``T`` simulated samples, after discarding ``10 * maxlag``
    burn-in samples."""
    M = spec.maxlag
    y = simulate(m, T, seed, burn_in=10 * M)
    cols = spec.columns()
    p = len(cols)
    XtX = np.zeros((p, p))
    Xty = np.zeros(p)
    yty = 0.0
    rows = 0
    for start in range(M, T, _CHUNK):
        stop = min(start + _CHUNK, T)
        target = y[spec.target, start:stop]
        yty += target @ target
        rows += stop - start
        if p:
            X = _lagged_columns(y, cols, start, stop)
            XtX += X.T @ X
            Xty += X.T @ target
    if not p:
        return OlsEstimate({}, {}, rows, yty / rows)
    coef = np.linalg.solve(XtX, Xty)
    sigma2 = (yty - coef @ Xty) / (rows - p)
    se = np.sqrt(sigma2 * np.diag(np.linalg.inv(XtX)))
    return OlsEstimate(dict(zip(cols, coef.tolist())), dict(zip(cols, se.tolist())),
                       rows, float(sigma2))


def sample_covariances(y: np.ndarray, M: int) -> np.ndarray:
    """Biased sample estimates of ``R(tau) = E[y(t + tau) y(t)^T]`` for
    ``tau = 0..M``, shape ``(M + 1, n, n)``."""
    n, T = y.shape
    yc = y - y.mean(axis=1, keepdims=True)
    out = np.empty((M + 1, n, n))
    for tau in range(M + 1):
        out[tau] = yc[:, tau:] @ yc[:, :T - tau].T / T
    return out


def covariance_standard_errors(R: CovarianceSequence, T: int, M: int) -> np.ndarray:
    """Asymptotic (Bartlett) standard errors of sample covariances of a
    Gaussian process with covariances ``R``, lags ``0..M``."""
    L = R.lags - M
    if L < 1:
        raise ValueError("R must extend well beyond the lags of interest")
    R2 = R.two_sided()
    mid = R.lags
    taus = np.arange(-L, L + 1)
    n = R.n
    out = np.empty((M + 1, n, n))
    diag = np.diagonal(R2, axis1=1, axis2=2)  # (2K+1, n)
    for h in range(M + 1):
        # sum_tau R_aa(tau) R_bb(tau) + R_ab(tau + h) R_ba(tau - h)
        first = np.einsum("ta,tb->ab", diag[mid + taus], diag[mid + taus])
        second = np.einsum("tab,tba->ab", R2[mid + taus + h], R2[mid + taus - h])
        out[h] = np.sqrt(np.maximum(first + second, 0.0) / T)
    return out


def _random_gain(rng) -> float:
    return float(rng.choice([-1.0, 1.0]) * rng.uniform(GAIN_LOW, GAIN_HIGH))


def _spectral_radius(m: Ldim) -> float:
    # y(t) = H0 y(t) + H1 y(t - 1) + e(t) for gain-or-unit-delay transfers
    H0 = np.zeros((m.n, m.n))
    H1 = np.zeros((m.n, m.n))
    for (i, j), t in m.dynamics.items():
        c = t.num.coeffs
        H0[j, i] = c[0]
        if len(c) > 1:
            H1[j, i] = c[1]
    A = np.linalg.solve(np.eye(m.n) - H0, H1)
    return float(np.max(np.abs(np.linalg.eigvals(A)), initial=0.0))


def gen_utf(n: int, edge_density: float = 0.25, delay_prob: float = 0.3, seed: int = 0,
            max_radius: float | None = 0.6, max_rounds: int = 1000) -> Ldim:
    """Random unidirectional triangle-free network with unit white noise.

    Each unordered pair is an edge with probability ``edge_density``;
    graphs with triangles are redrawn. Every edge gets a random orientation
    and a gain of magnitude in ``[0.3, 2]`` and random sign, multiplied by
    ``z^-1`` with probability ``delay_prob``. Draws whose direct
    feedthroughs form a loop, or whose loop dynamics have spectral radius
    at or above ``max_radius`` (skipped when ``None``), are rejected.
    """
    if not 0 < edge_density <= 1:
        raise ValueError("edge_density must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    pairs = list(combinations(range(n), 2))
    for _ in range(max_rounds):
        chosen = [p for p in pairs if rng.random() < edge_density]
        if enumerate_triangles(UndirectedGraph(n, frozenset(chosen))):
            continue
        dyn = {}
        for a, b in chosen:
            src, dst = (a, b) if rng.random() < 0.5 else (b, a)
            g = _random_gain(rng)
            delayed = rng.random() < delay_prob
            dyn[(src, dst)] = RationalTransfer.delay(1, g) if delayed else RationalTransfer.gain(g)
        try:
            m = Ldim(n, dyn)
        except AlgebraicLoop:
            continue
        if max_radius is not None and n and _spectral_radius(m) >= max_radius:
            continue
        assert validate_utf(m).is_utf
        return m
    raise GenerationFailed(f"no admissible network after {max_rounds} draws")


def brute_force_md(m: Ldim, edge, config: ReconstructionConfig | None = None,
                   grid: FrequencyGrid | None = None) -> EdgeRemovalEvidence:
    """Removal test for ``edge`` searching conditioning sets among all other
    nodes rather than a neighborhood. Meant for networks of at most five
    nodes."""
    cfg = config or ReconstructionConfig()
    R = covariances_from_psd(psd(m, grid), cfg.max_lag)
    i, j = _pair(*edge)
    return md_search(R, i, j, range(m.n), cfg)
