"""Real-rational transfer functions in the delay operator and per-frequency
matrix algebra on a uniform grid of the unit circle.

Conventions
-----------
A polynomial ``c`` stands for ``c[0] + c[1] z^-1 + ... + c[L] z^-L``. The
grid of size ``N`` holds the points ``z_k = exp(i w_k)``, ``w_k = 2 pi k / N``.
A spectral density relates to its covariance sequence through

    S(w) = sum_tau R(tau) exp(-i w tau),   R(tau) = E[y(t + tau) y(t)^T].
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DenominatorVanishes, ResolutionTooCoarse, SingularAtFrequency

DEFAULT_GRID_SIZE = 1024
DEFAULT_COV_LAGS = 64

_DEN_RTOL = 1e-12
_COND_MAX = 1e12
_INV_RESIDUAL = 1e-10
_IMAG_RTOL = 1e-8


def _trim(coeffs) -> tuple[float, ...]:
    c = [float(x) for x in np.atleast_1d(np.asarray(coeffs, dtype=float))]
    while c and c[-1] == 0.0:
        c.pop()
    return tuple(c)


def _fold(coeffs: np.ndarray, n: int) -> np.ndarray:
    # Lags at or beyond n alias onto lag mod n on an n-point grid.
    out = np.zeros(n)
    for start in range(0, len(coeffs), n):
        chunk = coeffs[start:start + n]
        out[:len(chunk)] += chunk
    return out


@dataclass(frozen=True)
class LaurentPolynomial:
    """Finite polynomial in ``z^-1`` with trailing zeros trimmed."""

    coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))
        if not all(np.isfinite(self.coeffs)):
            raise ValueError("polynomial coefficients must be finite")

    @property
    def degree(self) -> int:
        """Highest delay carried; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return sum(c * z ** (-lag) for lag, c in enumerate(self.coeffs)) + 0 * z

    def on_grid(self, n: int) -> np.ndarray:
        if self.is_zero():
            return np.zeros(n, dtype=complex)
        return np.fft.fft(_fold(np.array(self.coeffs), n))


class RationalTransfer:
    """Scalar transfer function ``num(z) / den(z)`` with ``den`` monic at
    zero lag, i.e. ``den.coeffs[0] == 1``.

    Instances are immutable. The constant denominator coefficient is
    normalized away at construction; a denominator without a constant
    term would describe a non-causal operator and is rejected.
    """

    __slots__ = ("_num", "_den")

    def __init__(self, num=(1.0,), den=(1.0,)):
        num = num if isinstance(num, LaurentPolynomial) else LaurentPolynomial(num)
        den = den if isinstance(den, LaurentPolynomial) else LaurentPolynomial(den)
        if den.is_zero() or den.coeffs[0] == 0.0:
            raise ValueError("denominator needs a nonzero zero-lag coefficient")
        d0 = den.coeffs[0]
        if d0 != 1.0:
            num = LaurentPolynomial([c / d0 for c in num.coeffs])
            den = LaurentPolynomial([c / d0 for c in den.coeffs])
        if num.is_zero():
            den = LaurentPolynomial((1.0,))
        object.__setattr__(self, "_num", num)
        object.__setattr__(self, "_den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalTransfer is immutable")

    @classmethod
    def gain(cls, g: float) -> "RationalTransfer":
        return cls((g,))

    @classmethod
    def delay(cls, lags: int = 1, gain: float = 1.0) -> "RationalTransfer":
        return cls([0.0] * lags + [gain])

    @classmethod
    def zero(cls) -> "RationalTransfer":
        return cls(())

    @property
    def num(self) -> LaurentPolynomial:
        return self._num

    @property
    def den(self) -> LaurentPolynomial:
        return self._den

    def is_zero(self) -> bool:
        return self._num.is_zero()

    @property
    def lag0(self) -> float:
        """Coefficient of the causal expansion at lag zero (direct feedthrough)."""
        return self._num.coeffs[0] if self._num.coeffs else 0.0

    @property
    def max_lag(self) -> int:
        return max(self._num.degree, self._den.degree, 0)

    def is_fir(self) -> bool:
        return self._den.degree == 0

    def __call__(self, z):
        return self._num(z) / self._den(z)

    def __eq__(self, other):
        if not isinstance(other, RationalTransfer):
            return NotImplemented
        return self._num == other._num and self._den == other._den

    def __hash__(self):
        return hash((self._num, self._den))

    def __repr__(self):
        if self.is_fir():
            return f"RationalTransfer({list(self._num.coeffs)})"
        return f"RationalTransfer({list(self._num.coeffs)}, {list(self._den.coeffs)})"

    def eval_on_grid(self, grid: "FrequencyGrid") -> np.ndarray:
        return eval_on_grid(self, grid)

    def impulse_response(self, length: int) -> np.ndarray:
        from scipy.signal import lfilter

        pulse = np.zeros(length)
        pulse[0] = 1.0
        return lfilter(self._num.coeffs or (0.0,), self._den.coeffs, pulse)


@dataclass(frozen=True)
class FrequencyGrid:
    """``size`` equispaced points on the unit circle, starting at w = 0."""

    size: int = DEFAULT_GRID_SIZE

    def __post_init__(self):
        n = int(self.size)
        if n < 2 or n & (n - 1):
            raise ValueError(f"grid size must be a power of two >= 2, got {self.size}")
        object.__setattr__(self, "size", n)

    @cached_property
    def omegas(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.size) / self.size

    @cached_property
    def points(self) -> np.ndarray:
        return np.exp(1j * self.omegas)

    def check_resolution(self, max_lag: int) -> None:
        if self.size < 16 * max_lag:
            raise ResolutionTooCoarse(
                f"grid of {self.size} points too coarse for model lag {max_lag} "
                f"(need at least {16 * max_lag})")


def eval_on_grid(t: RationalTransfer, g: FrequencyGrid) -> np.ndarray:
    """Frequency response of ``t`` at every grid point.

    Raises
    ------
    DenominatorVanishes
        If ``|den(z_k)|`` drops below ``1e-12`` times the largest
        denominator coefficient at some grid index ``k``.
    """
    den = t.den.on_grid(g.size)
    floor = _DEN_RTOL * max(abs(c) for c in t.den.coeffs)
    bad = np.flatnonzero(np.abs(den) < floor)
    if bad.size:
        raise DenominatorVanishes(int(bad[0]))
    return t.num.on_grid(g.size) / den


def matrix_inverse_field(A: np.ndarray) -> np.ndarray:
    """Invert a field of square matrices of shape ``(N, n, n)`` frequency by
    frequency (LU with partial pivoting)."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 3 or A.shape[1] != A.shape[2]:
        raise ValueError(f"expected a (N, n, n) field, got shape {A.shape}")
    n = A.shape[1]
    if n == 0:
        return A.copy()
    cond = np.linalg.cond(A)
    bad = np.flatnonzero(~(cond <= _COND_MAX))
    if bad.size:
        raise SingularAtFrequency(int(bad[0]), float(cond[bad[0]]))
    inv = np.linalg.inv(A)
    eye = np.eye(n)
    resid = np.linalg.norm(A @ inv - eye, axis=(1, 2))
    bad = np.flatnonzero(resid > _INV_RESIDUAL * np.maximum(1.0, cond / 1e4))
    if bad.size:
        raise SingularAtFrequency(int(bad[0]), float(cond[bad[0]]))
    return inv


class SpectralDensity:
    """Hermitian, positive semidefinite matrix spectrum on a frequency grid.

    ``values[k]`` is the spectrum at ``grid.omegas[k]``.
    """

    def __init__(self, grid: FrequencyGrid, values, *, check: bool = True):
        values = np.array(values, dtype=complex)
        if values.ndim == 1:
            values = values[:, None, None]
        if values.ndim != 3 or values.shape[0] != grid.size or values.shape[1] != values.shape[2]:
            raise ValueError(f"values of shape {values.shape} do not fit a grid of {grid.size}")
        values.setflags(write=False)
        self.grid = grid
        self.values = values
        if check:
            self._validate()

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def _validate(self):
        S = self.values
        scale = max(float(np.abs(S).max()), 1.0)
        herm = np.abs(S - np.conj(np.swapaxes(S, 1, 2))).max(initial=0.0)
        if herm > 1e-10 * scale:
            raise ValueError(f"spectrum is not Hermitian (deviation {herm:.3g})")
        N = S.shape[0]
        mirror = S[(-np.arange(N)) % N]
        sym = np.abs(mirror - np.conj(S)).max(initial=0.0)
        if sym > 1e-10 * scale:
            raise ValueError(f"spectrum lacks conjugate symmetry (deviation {sym:.3g})")
        if self.n:
            herm_part = 0.5 * (S + np.conj(np.swapaxes(S, 1, 2)))
            lam = np.linalg.eigvalsh(herm_part)[:, 0]
            trace = np.real(np.trace(S, axis1=1, axis2=2))
            if np.any(lam < -1e-9 * np.maximum(trace, 1e-300)):
                raise ValueError("spectrum is not positive semidefinite")

    def submatrix(self, rows, cols) -> np.ndarray:
        return self.values[:, rows][:, :, cols]

    def variances(self) -> np.ndarray:
        """Zero-lag variance of every channel."""
        return np.real(np.diagonal(self.values, axis1=1, axis2=2).mean(axis=0))

    def __repr__(self):
        return f"SpectralDensity(n={self.n}, grid={self.grid.size})"


class CovarianceSequence:
    """Matrix covariances ``R(tau) = E[y(t + tau) y(t)^T]`` for
    ``|tau| <= lags``, stored for nonnegative lags only."""

    def __init__(self, forward):
        forward = np.array(forward, dtype=float)
        if forward.ndim != 3 or forward.shape[1] != forward.shape[2]:
            raise ValueError("expected an array of shape (M + 1, n, n)")
        R0 = forward[0]
        if not np.allclose(R0, R0.T, rtol=0, atol=1e-10 * max(1.0, np.abs(R0).max(initial=0))):
            raise ValueError("R(0) must be symmetric")
        R0 = 0.5 * (R0 + R0.T)
        forward[0] = R0
        if R0.size:
            lam = np.linalg.eigvalsh(R0)[0]
            if lam < -1e-9 * max(np.trace(R0), 1e-300):
                raise ValueError("R(0) must be positive semidefinite")
        forward.setflags(write=False)
        self.forward = forward

    @property
    def lags(self) -> int:
        return self.forward.shape[0] - 1

    @property
    def n(self) -> int:
        return self.forward.shape[1]

    def __call__(self, tau: int) -> np.ndarray:
        if abs(tau) > self.lags:
            raise IndexError(f"lag {tau} beyond stored range {self.lags}")
        return self.forward[tau] if tau >= 0 else self.forward[-tau].T

    def two_sided(self) -> np.ndarray:
        """Array of shape ``(2M + 1, n, n)``; index ``M + tau`` holds ``R(tau)``."""
        back = np.swapaxes(self.forward[:0:-1], 1, 2)
        return np.concatenate([back, self.forward], axis=0)

    def variances(self) -> np.ndarray:
        return np.diag(self.forward[0]).copy()


def covariances_from_psd(S: SpectralDensity, M: int = DEFAULT_COV_LAGS) -> CovarianceSequence:
    """Inverse discrete transform of a sampled spectrum up to lag ``M``."""
    N = S.grid.size
    if M < 0 or M > N // 4:
        raise ValueError(f"lag count {M} outside [0, N/4] for a grid of {N}")
    full = np.fft.ifft(S.values, axis=0)[:M + 1]
    scale = max(float(np.abs(full.real).max(initial=0.0)), 1e-300)
    if np.abs(full.imag).max(initial=0.0) > _IMAG_RTOL * scale:
        raise ResolutionTooCoarse("covariances carry an imaginary residue; enlarge the grid")
    return CovarianceSequence(full.real)
