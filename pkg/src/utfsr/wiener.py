"""Non-causal and finite-lag causal Wiener filters, and the separation
predicates built on them.

A filter component is declared zero through a scale-free margin: each
component norm is standardized by ``sqrt(var(regressor) / var(target))``
and divided by the largest standardized norm in the same filter (floored at
``MARGIN_FLOOR`` so that an all-zero filter does not amplify rounding
noise). The component is zero when the margin is below ``eps``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.linalg.lapack import dpocon

from .errors import GramSingular, SingularRegressorSpectrum, TailTooHeavy
from .lti import CovarianceSequence, SpectralDensity

PRESENT = "present"
DELAYED = "delayed"

DEFAULT_MAX_LAG = 32
DEFAULT_EPS = 1e-6
MARGIN_FLOOR = 1e-6
TAIL_RTOL = 1e-6
_TAIL_FLOOR = 1e-12
_COND_MAX = 1e12
_RIDGE = 1e-10


@dataclass(frozen=True)
class RegressorSpec:
    """Which lagged processes a causal filter may use.

    ``present`` entries contribute lags ``0..maxlag`` of their node,
    ``delayed`` entries lags ``1..maxlag``. The target itself may only
    appear as ``delayed``.
    """

    target: int
    entries: tuple = ()
    maxlag: int = DEFAULT_MAX_LAG

    def __post_init__(self):
        entries = tuple((int(node), str(cls)) for node, cls in self.entries)
        object.__setattr__(self, "entries", entries)
        seen = set()
        for node, cls in entries:
            if cls not in (PRESENT, DELAYED):
                raise ValueError(f"unknown lag class {cls!r}")
            if node in seen:
                raise ValueError(f"node {node} listed twice")
            seen.add(node)
            if node == self.target and cls == PRESENT:
                raise ValueError("the target's present value cannot be a regressor")
        if self.maxlag < 1:
            raise ValueError("maxlag must be at least 1")

    @property
    def present(self) -> tuple[int, ...]:
        return tuple(node for node, cls in self.entries if cls == PRESENT)

    @property
    def delayed(self) -> tuple[int, ...]:
        return tuple(node for node, cls in self.entries if cls == DELAYED)

    def columns(self) -> list[tuple[int, int]]:
        cols = []
        for node, cls in self.entries:
            first = 0 if cls == PRESENT else 1
            cols.extend((node, lag) for lag in range(first, self.maxlag + 1))
        return cols

    def as_dict(self) -> dict:
        return {"target": self.target, "present": list(self.present),
                "delayed": list(self.delayed), "maxlag": self.maxlag}


@dataclass
class WienerResult:
    target: int
    coefficients: dict
    residual_variance: float
    component_norms: dict
    zero_lag_magnitude: dict
    target_variance: float
    regressor_variances: dict
    regularized: bool = False
    spec: RegressorSpec | None = None

    def standardized_norm(self, node: int) -> float:
        return self.component_norms[node] * self._scale(node)

    def _scale(self, node: int) -> float:
        if self.target_variance <= 0:
            return 0.0
        return float(np.sqrt(self.regressor_variances[node] / self.target_variance))

    def _reference(self) -> float:
        largest = max((self.standardized_norm(k) for k in self.component_norms), default=0.0)
        return max(largest, MARGIN_FLOOR)

    def margin(self, node: int) -> float:
        """Standardized norm of one component relative to the largest one."""
        return self.standardized_norm(node) / self._reference()

    def past_margin(self, node: int) -> float:
        """Like :meth:`margin` but over the lags ``>= 1`` of ``node`` only."""
        past = [v for (k, lag), v in self.coefficients.items() if k == node and lag >= 1]
        return float(np.sqrt(np.sum(np.square(past)))) * self._scale(node) / self._reference()

    def zero_lag_margin(self, node: int) -> float:
        return self.zero_lag_magnitude[node] * self._scale(node) / self._reference()


@dataclass(frozen=True)
class SeparationVerdict:
    separated: bool
    margin: float
    witness: RegressorSpec | None = None
    tested: int | None = None
    low_confidence: bool = False
    result: WienerResult | None = field(default=None, repr=False, compare=False)

    def as_dict(self) -> dict:
        return {
            "separated": self.separated,
            "margin": self.margin,
            "tested": self.tested,
            "low_confidence": self.low_confidence,
            "witness": self.witness.as_dict() if self.witness else None,
        }


def noncausal_wiener(S: SpectralDensity, target: int, regressors: Iterable[int],
                     max_lag: int = DEFAULT_MAX_LAG) -> WienerResult:
    """Two-sided Wiener filter estimating ``y_target`` from ``regressors``.

    The filter is solved frequency by frequency as
    ``W = S_{t,X} S_{X,X}^{-1}`` and transformed back to lags ``-M..M``.

    Raises
    ------
    SingularRegressorSpectrum
        If ``S_{X,X}`` is numerically singular at some frequency.
    TailTooHeavy
        If more than ``1e-6`` of the standardized filter energy sits at lags
        ``|tau| > M/2``.
    """
    regs = [int(r) for r in regressors]
    if target in regs:
        raise ValueError("target cannot be one of its own regressors")
    if len(set(regs)) != len(regs):
        raise ValueError("duplicate regressors")
    var = S.variances()
    N = S.grid.size
    M = int(max_lag)
    if 2 * M + 1 > N:
        raise ValueError(f"max lag {M} too large for a grid of {N}")
    result = WienerResult(
        target=target, coefficients={}, residual_variance=float(var[target]),
        component_norms={}, zero_lag_magnitude={}, target_variance=float(var[target]),
        regressor_variances={r: float(var[r]) for r in regs},
        spec=RegressorSpec(target, tuple((r, PRESENT) for r in regs), M))
    if not regs:
        return result

    Sxx = S.submatrix(regs, regs)
    Sxt = S.submatrix(regs, [target])
    cond = np.linalg.cond(Sxx)
    bad = np.flatnonzero(~(cond <= _COND_MAX))
    if bad.size:
        raise SingularRegressorSpectrum(
            f"regressor spectrum singular at grid index {bad[0]} (cond {cond[bad[0]]:.3g})")
    # W^H = Sxx^{-1} Sxt for Hermitian Sxx
    W = np.conj(np.linalg.solve(Sxx, Sxt)[:, :, 0])
    taps = np.fft.ifft(W, axis=0).real
    lags = np.fft.fftfreq(N, 1.0 / N).astype(int)

    scale = np.sqrt(var[regs] / var[target]) if var[target] > 0 else np.zeros(len(regs))
    energy = (taps * scale) ** 2
    total = energy.sum()
    tail = energy[np.abs(lags) > M / 2].sum()
    if tail > TAIL_RTOL * max(total, _TAIL_FLOOR):
        raise TailTooHeavy(
            f"non-causal filter tail holds {tail / total:.3g} of its energy beyond lag {M // 2}")

    keep = np.abs(lags) <= M
    residual = var[target] - np.real(np.mean(np.einsum("kr,kr->k", W, Sxt[:, :, 0])))
    result.residual_variance = float(max(residual, 0.0))
    for col, r in enumerate(regs):
        for lag, c in zip(lags[keep], taps[keep, col]):
            result.coefficients[(r, int(lag))] = float(c)
        result.component_norms[r] = float(np.sqrt(np.sum(taps[keep, col] ** 2)))
        result.zero_lag_magnitude[r] = float(abs(taps[0, col]))
    return result


def _gram(R: CovarianceSequence, spec: RegressorSpec):
    cols = spec.columns()
    M = spec.maxlag
    if R.lags < M:
        raise ValueError(f"covariances stored to lag {R.lags}, filter needs {M}")
    R2 = R.two_sided()
    mid = R.lags
    nodes = np.array([c[0] for c in cols], dtype=int)
    lags = np.array([c[1] for c in cols], dtype=int)
    # E[y_a(t - p) y_b(t - q)] = R_ab(q - p); E[y_t(t) y_b(t - q)] = R_tb(q)
    G = R2[mid + lags[None, :] - lags[:, None], nodes[:, None], nodes[None, :]]
    c = R2[mid + lags, spec.target, nodes]
    return cols, G, c


def _solve_spd(G: np.ndarray, c: np.ndarray):
    regularized = False
    try:
        factor = cho_factor(G, lower=True, check_finite=False)
        rcond, info = dpocon(factor[0], np.abs(G).sum(axis=0).max(), uplo="L")
        ok = info == 0 and rcond * _COND_MAX >= 1.0
    except LinAlgError:
        ok = False
    if not ok:
        regularized = True
        G = G + _RIDGE * np.trace(G) * np.eye(len(G))
        try:
            factor = cho_factor(G, lower=True, check_finite=False)
        except LinAlgError as exc:
            raise GramSingular("regressor Gram matrix singular after ridge") from exc
    return cho_solve(factor, c, check_finite=False), regularized


def causal_wiener(R: CovarianceSequence, spec: RegressorSpec) -> WienerResult:
    """Least-squares predictor of ``y_target(t)`` from the lagged regressors
    in ``spec``, solved from the normal equations assembled out of ``R``.

    Regressor Gram matrices with condition estimate above ``1e12`` receive a
    ridge of ``1e-10 * trace`` and the result is marked ``regularized``.
    """
    var = R.variances()
    t = spec.target
    nodes = [node for node, _ in spec.entries]
    result = WienerResult(
        target=t, coefficients={}, residual_variance=float(var[t]), component_norms={},
        zero_lag_magnitude={}, target_variance=float(var[t]),
        regressor_variances={k: float(var[k]) for k in nodes}, spec=spec)
    if not spec.entries:
        return result

    cols, G, c = _gram(R, spec)
    w, regularized = _solve_spd(G, c)
    result.regularized = regularized
    result.residual_variance = float(max(var[t] - c @ w, 0.0))

    M = spec.maxlag
    col_nodes = np.array([cc[0] for cc in cols])
    col_lags = np.array([cc[1] for cc in cols])
    scale = np.sqrt(np.array([var[k] for k in col_nodes]) / var[t]) if var[t] > 0 else 0 * w
    energy = (w * scale) ** 2
    tail = energy[col_lags > M - M // 4].sum()
    total = energy.sum()
    if tail > TAIL_RTOL * max(total, _TAIL_FLOOR):
        raise TailTooHeavy(
            f"causal filter for y{t + 1} keeps {tail / total:.3g} of its energy "
            f"in the last {M // 4} of {M} lags")

    for (node, lag), coef in zip(cols, w):
        result.coefficients[(node, lag)] = float(coef)
    for node, cls in spec.entries:
        sel = col_nodes == node
        result.component_norms[node] = float(np.sqrt(np.sum(w[sel] ** 2)))
        if cls == PRESENT:
            result.zero_lag_magnitude[node] = float(abs(w[sel & (col_lags == 0)][0]))
    return result


def wsep(S: SpectralDensity, j: int, cond: Iterable[int], i: int,
         eps: float = DEFAULT_EPS, max_lag: int = DEFAULT_MAX_LAG) -> SeparationVerdict:
    """Non-causal Wiener separation of ``y_j`` from ``y_i`` given ``cond``."""
    cond = sorted(set(int(k) for k in cond))
    if i == j or i in cond or j in cond:
        raise ValueError("need i != j and neither in the conditioning set")
    res = noncausal_wiener(S, j, cond + [i], max_lag)
    m = res.margin(i)
    return SeparationVerdict(m < eps, m, res.spec, i, False, res)


def cwsep(R: CovarianceSequence, j: int, cond: Iterable, i: int, *, delayed: bool = False,
          eps: float = DEFAULT_EPS, max_lag: int = DEFAULT_MAX_LAG) -> SeparationVerdict:
    """Causal Wiener separation of ``y_j`` from ``y_i`` (or from ``y_i``
    delayed by one step when ``delayed``) given ``cond``.

    ``cond`` holds ``(node, lag_class)`` pairs; bare node indices are taken
    as present. With ``delayed`` the tested node may be the target itself,
    and the tested node may appear in ``cond`` as present; the test then
    concerns its lags from one on, given its current value.
    """
    entries = [(c, PRESENT) if np.isscalar(c) else tuple(c) for c in cond]
    if i == j and not delayed:
        raise ValueError("a target can only be tested against its own past")
    own_present = delayed and (i, PRESENT) in entries
    if any(node == i for node, _ in entries) and not own_present:
        raise ValueError("the tested node cannot also be conditioned on")
    if own_present:
        # y_i(t) is conditioned on and its past y_i(t-1), y_i(t-2), ... is tested
        spec = RegressorSpec(j, tuple(entries), max_lag)
        res = causal_wiener(R, spec)
        m = res.past_margin(i)
    else:
        spec = RegressorSpec(j, tuple(entries) + ((i, DELAYED if delayed else PRESENT),), max_lag)
        res = causal_wiener(R, spec)
        m = res.margin(i)
    return SeparationVerdict(m < eps, m, spec, i, res.regularized, res)


def strictly_causal_component(R: CovarianceSequence, j: int, i: int, Splus: Iterable[int] = (),
                              Sminus: Iterable[int] = (), *, eps: float = DEFAULT_EPS,
                              max_lag: int = DEFAULT_MAX_LAG) -> SeparationVerdict:
    """Whether the ``y_i`` component of the causal filter estimating ``y_j``
    from ``y_i``, present ``Splus`` and delayed ``Sminus`` has no lag-zero
    term. ``separated`` reads as "strictly causal" here."""
    if i == j:
        raise ValueError("the tested node must differ from the target")
    entries = ((i, PRESENT),) + tuple((k, PRESENT) for k in Splus) + tuple(
        (k, DELAYED) for k in Sminus)
    spec = RegressorSpec(j, entries, max_lag)
    res = causal_wiener(R, spec)
    m = res.zero_lag_margin(i)
    return SeparationVerdict(m < eps, m, spec, i, res.regularized, res)
