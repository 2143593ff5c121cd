"""File formats. Node numbers in every file are 1-based (``y1`` is node 1).

Model files are YAML (JSON is valid YAML)::

    n: 4
    edges:
      - {from: 4, to: 1, num_coeffs: [1.0]}
      - {from: 2, to: 3, num_coeffs: [0, 1.0], den_coeffs: [1, -0.5]}
    noise:
      - {variance: 1.0}
      - {variance: 2.0, coloring_coeffs: [1, 0.5]}

Coefficients run over ``z^0, z^-1, ...``. ``noise`` may be omitted (unit
white noise) and ``coloring_den_coeffs`` may accompany ``coloring_coeffs``.

Spectra are JSON holding only grid indices ``0..N/2``; the other half is
rebuilt by conjugate symmetry on load.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import yaml

from .lti import FrequencyGrid, RationalTransfer, SpectralDensity
from .model import Ldim, NoiseChannel

PSD_FORMAT = "utfsr-psd"
SIG_DIGITS = 12


def _round(x: float) -> float:
    return float(f"{x:.{SIG_DIGITS}g}")


def model_from_dict(doc: dict) -> Ldim:
    n = int(doc["n"])
    dyn = {}
    for e in doc.get("edges") or []:
        src, dst = int(e["from"]) - 1, int(e["to"]) - 1
        if (src, dst) in dyn:
            raise ValueError(f"edge {src + 1}->{dst + 1} listed twice")
        dyn[(src, dst)] = RationalTransfer(e.get("num_coeffs", [1.0]), e.get("den_coeffs", [1.0]))
    noise = None
    if doc.get("noise") is not None:
        noise = []
        for ch in doc["noise"]:
            coloring = None
            if ch.get("coloring_coeffs") is not None:
                coloring = RationalTransfer(ch["coloring_coeffs"], ch.get("coloring_den_coeffs", [1.0]))
            noise.append(NoiseChannel(float(ch.get("variance", 1.0)), coloring))
    return Ldim(n, dyn, noise)


def model_to_dict(m: Ldim) -> dict:
    edges = []
    for (i, j), t in m.dynamics.items():
        e = {"from": i + 1, "to": j + 1, "num_coeffs": list(t.num.coeffs)}
        if not t.is_fir():
            e["den_coeffs"] = list(t.den.coeffs)
        edges.append(e)
    noise = []
    for ch in m.noise:
        d = {"variance": ch.variance}
        if ch.coloring is not None:
            d["coloring_coeffs"] = list(ch.coloring.num.coeffs)
            if not ch.coloring.is_fir():
                d["coloring_den_coeffs"] = list(ch.coloring.den.coeffs)
        noise.append(d)
    return {"n": m.n, "edges": edges, "noise": noise}


def load_model(path) -> Ldim:
    with open(path) as fh:
        return model_from_dict(yaml.safe_load(fh))


def dump_model(m: Ldim, path) -> None:
    Path(path).write_text(yaml.safe_dump(model_to_dict(m), sort_keys=False))


def psd_to_dict(S: SpectralDensity) -> dict:
    N = S.grid.size
    half = []
    for k in range(N // 2 + 1):
        v = S.values[k]
        half.append({
            "k": k,
            "re": [[_round(x) for x in row] for row in v.real],
            "im": [[_round(x) for x in row] for row in v.imag],
        })
    return {"format": PSD_FORMAT, "version": 1, "n": S.n, "grid_size": N, "half": half}


def psd_from_dict(doc: dict) -> SpectralDensity:
    if doc.get("format") != PSD_FORMAT:
        raise ValueError("not a spectral density dump")
    N, n = int(doc["grid_size"]), int(doc["n"])
    grid = FrequencyGrid(N)
    values = np.zeros((N, n, n), dtype=complex)
    for entry in doc["half"]:
        k = int(entry["k"])
        values[k] = np.array(entry["re"], dtype=float) + 1j * np.array(entry["im"], dtype=float)
    for k in range(1, (N + 1) // 2):
        values[N - k] = np.conj(values[k])
    return SpectralDensity(grid, values)


def dump_psd(S: SpectralDensity, path) -> None:
    Path(path).write_text(json.dumps(psd_to_dict(S)))


def load_psd(path) -> SpectralDensity:
    return psd_from_dict(json.loads(Path(path).read_text()))


def load_any(path):
    """Return a :class:`SpectralDensity` for spectrum dumps and an
    :class:`Ldim` for anything else."""
    doc = yaml.safe_load(Path(path).read_text())
    if isinstance(doc, dict) and doc.get("format") == PSD_FORMAT:
        return psd_from_dict(doc)
    return model_from_dict(doc)


def write_samples(y: np.ndarray, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow([f"y{i + 1}" for i in range(y.shape[0])])
    for row in y.T:
        writer.writerow([repr(float(x)) for x in row])


def read_samples(path) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data.T


def psd_from_samples(y: np.ndarray, grid: FrequencyGrid) -> SpectralDensity:
    """Averaged-periodogram (Welch) estimate of the output spectrum."""
    from scipy.signal import csd

    n, T = y.shape
    nper = min(grid.size, T)
    if nper != grid.size:
        raise ValueError(f"need at least {grid.size} samples for a grid of that size")
    values = np.empty((grid.size, n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            # scipy returns E[conj(X_first) X_second]; S_ab = E[Y_a conj(Y_b)]
            _, p = csd(y[b], y[a], fs=1.0, nperseg=nper, return_onesided=False,
                       scaling="density", detrend="constant")
            values[:, a, b] = p
    values = 0.5 * (values + np.conj(np.swapaxes(values, 1, 2)))
    values = 0.5 * (values + np.conj(values[(-np.arange(grid.size)) % grid.size]))
    return SpectralDensity(grid, values)
