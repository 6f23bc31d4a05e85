"""Transmission/reflection spectra over a drive-detuning grid."""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks as _scipy_find_peaks

from .model import SpinState, SystemParams, ValidatedParams, validate
from .steady_state import SingularSystemError, solve_general

__all__ = ["PeakSet", "Spectrum", "emit", "fig3_params", "find_peaks", "read_csv", "sweep"]

CSV_HEADER = ("delta", "T", "R", "L")


def fig3_params(kappa0: float = 1.0, g: float | None = None) -> ValidatedParams:
    """Single-spin-reflection geometry: degenerate resonant modes, emitter on the mirror plane.

    gamma = kappa0 / 10 and kappa1 = 20 kappa0; the coupling ``g`` (default
    10 kappa0) reaches the even mode only.
    """
    g = 10.0 * kappa0 if g is None else g
    return ValidatedParams(
        kappa_e0=kappa0, kappa_o0=kappa0, kappa_e1=20 * kappa0, kappa_o1=20 * kappa0,
        g_e=complex(g), g_o=0j, gamma_s=0.0, gamma_p=kappa0 / 10,
    )


@dataclass(frozen=True)
class Spectrum:
    """``delta`` is the drive detuning from the mean cavity frequency."""

    delta_grid: np.ndarray
    T: np.ndarray
    R: np.ndarray
    L: np.ndarray

    def __post_init__(self):
        n = len(self.delta_grid)
        if not (len(self.T) == len(self.R) == len(self.L) == n):
            raise ValueError("spectrum arrays must have equal length")
        if n > 1 and not np.all(np.diff(self.delta_grid) > 0):
            raise ValueError("delta grid must be strictly increasing")

    def __len__(self) -> int:
        return len(self.delta_grid)


@dataclass(frozen=True)
class PeakSet:
    delta_peak: np.ndarray
    height: np.ndarray

    def __len__(self) -> int:
        return len(self.delta_peak)

    def __iter__(self):
        return iter(zip(self.delta_peak.tolist(), self.height.tolist()))


def sweep(params: SystemParams, spin: SpinState, delta_min: float, delta_max: float, n_points: int) -> Spectrum:
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    if not delta_min < delta_max:
        raise ValueError("delta_min must be < delta_max")
    p = validate(params)
    grid = np.linspace(delta_min, delta_max, int(n_points))
    try:
        s = solve_general(p, p.omega_c + grid, spin)
    except SingularSystemError as exc:
        d = None if exc.omega_l is None else exc.omega_l - p.omega_c
        raise SingularSystemError(f"singular system at delta={d!r}", exc.omega_l) from exc
    return Spectrum(delta_grid=grid, T=s.T, R=s.R, L=s.loss)


def find_peaks(spec: Spectrum, min_prominence: float = 0.01) -> PeakSet:
    """Local maxima of R with prominence >= ``min_prominence * max(R)``.

    Peaks must be strictly above both neighbours; flat tops count once, at
    their midpoint.
    """
    R = np.asarray(spec.R, dtype=float)
    top = R.max() if len(R) else 0.0
    if len(R) < 3 or top <= 0:
        return PeakSet(np.empty(0), np.empty(0))
    idx, _ = _scipy_find_peaks(R, prominence=min_prominence * top)
    return PeakSet(delta_peak=spec.delta_grid[idx].copy(), height=R[idx].copy())


def _format_rows(spec: Spectrum) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in zip(spec.delta_grid, spec.T, spec.R, spec.L):
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def emit(spec: Spectrum, destination: str | os.PathLike) -> str:
    """Write the spectrum as CSV (``delta,T,R,L``); floats use shortest round-trip repr."""
    try:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(_format_rows(spec))
    except OSError as exc:
        raise OSError(f"cannot write spectrum to {os.fspath(destination)}: {exc.strerror}") from exc
    return os.fspath(destination)


def read_csv(path: str | os.PathLike) -> Spectrum:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"unexpected header {rows[0]!r}")
    cols = np.array([[float(v) for v in row] for row in rows[1:]]).T
    return Spectrum(*cols)
