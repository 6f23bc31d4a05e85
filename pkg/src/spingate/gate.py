"""Spin-photon controlled-phase gate built from conditional scattering amplitudes.

Two-qubit basis order is ``(h_up, h_down, v_up, v_down)``: photon polarisation
first, spin second. Only h-polarised light couples to the cavity modes; a
v-polarised photon passes with unit amplitude.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import (
    GAMMA_SWEEP_CASES,
    G_E_DEFAULT,
    SpinState,
    SystemParams,
    case_params,
    validate,
    with_kappa1,
)
from .pulse import PulseWaveform
from .steady_state import solve_general

__all__ = [
    "BASIS",
    "CNOT_PHOTON_CONTROL",
    "ConditionalAmplitudes",
    "FidelityCurve",
    "HADAMARD",
    "IDEAL",
    "apply",
    "concurrence",
    "conditional_amplitudes",
    "fidelity",
    "fidelity_sweep",
    "gate_matrix",
    "matrix_to_json",
    "photon_op",
    "spin_op",
    "truth_table",
]

BASIS = ("h_up", "h_down", "v_up", "v_down")
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
# flips the spin when the photon is h-polarised
CNOT_PHOTON_CONTROL = np.array(
    [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], dtype=complex
)


@dataclass(frozen=True)
class ConditionalAmplitudes:
    t_up: complex
    t_down: complex
    r_up: complex = 0j
    r_down: complex = 0j


IDEAL = ConditionalAmplitudes(1 + 0j, -1 + 0j)


def conditional_amplitudes(
    params: SystemParams,
    omega_l: float = 0.0,
    pulse: PulseWaveform | None = None,
    *,
    check_convention: bool = True,
) -> ConditionalAmplitudes:
    """Transmission/reflection for an h photon with the spin up and down.

    With ``pulse`` the amplitudes are averaged over its power spectrum,
    ``sum |F(w)|**2 t(omega_l + w) / sum |F(w)|**2``, and ``omega_l`` is
    taken from the pulse carrier.
    """
    p = validate(params)
    if check_convention and not np.isclose(p.g_o, -1j * p.g_e, rtol=1e-12, atol=1e-15):
        raise ValueError("gate evaluation needs g_o == -1j * g_e")
    if pulse is None:
        up = solve_general(p, omega_l, SpinState.UP)
        down = solve_general(p, omega_l, SpinState.DOWN)
        return ConditionalAmplitudes(up.t, down.t, up.r, down.r)
    w = pulse.spectral_weights()
    grid = pulse.omega_l + pulse.frequency_grid
    up = solve_general(p, grid, SpinState.UP)
    down = solve_general(p, grid, SpinState.DOWN)
    avg = lambda x: complex(np.sum(w * x))  # noqa: E731
    return ConditionalAmplitudes(avg(up.t), avg(down.t), avg(up.r), avg(down.r))


def fidelity(amps: ConditionalAmplitudes, definition: str = "amplitude_overlap") -> float:
    """Overlap of the actual with the ideal output for (up + down)/sqrt(2) x h.

    ``amplitude_overlap`` is ``|t_up - t_down| / 2``; reflected and lost
    components count as failures. ``probability_overlap`` is its square.
    """
    f = abs(complex(amps.t_up) - complex(amps.t_down)) / 2
    if definition == "amplitude_overlap":
        return f
    if definition == "probability_overlap":
        return f * f
    raise ValueError(f"unknown fidelity definition {definition!r}")


@dataclass(frozen=True)
class FidelityCurve:
    variable: str
    x: np.ndarray
    F: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("x", "F"))
        for x, f in zip(self.x, self.F):
            w.writerow((repr(float(x)), repr(float(f))))
        return buf.getvalue()

    def write_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())


def default_variable(case: str) -> str:
    return "gamma" if case.upper() in GAMMA_SWEEP_CASES else "kappa1"


def fidelity_sweep(
    case: str,
    variable: str,
    grid: Sequence[float],
    g_e_magnitude: float = G_E_DEFAULT,
    definition: str = "amplitude_overlap",
) -> FidelityCurve:
    """Gate fidelity of a case preset as kappa1 or gamma is varied.

    For ``kappa1`` both external rates follow the grid value (Case VII keeps
    kappa_e1 = 1.1 kappa_o1). For ``gamma`` the dephasing is adjusted so that
    gamma_s/2 + gamma_p equals the grid value.
    """
    base, omega_l = case_params(case, g_e_magnitude)
    xs = np.asarray(grid, dtype=float)
    out = np.empty_like(xs)
    for i, x in enumerate(xs):
        if variable == "kappa1":
            p = with_kappa1(base, x, case)
        elif variable == "gamma":
            p = validate(base.with_gamma(x))
        else:
            raise ValueError(f"unknown sweep variable {variable!r}")
        out[i] = fidelity(conditional_amplitudes(p, omega_l), definition)
    return FidelityCurve(variable, xs, out)


def gate_matrix(amps: ConditionalAmplitudes) -> np.ndarray:
    return np.diag([complex(amps.t_up), complex(amps.t_down), 1 + 0j, 1 + 0j])


def photon_op(u: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(u, dtype=complex), np.eye(2))


def spin_op(u: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(2), np.asarray(u, dtype=complex))


def apply(op: np.ndarray, state: np.ndarray) -> np.ndarray:
    op = np.asarray(op, dtype=complex)
    state = np.asarray(state, dtype=complex)
    if op.shape != (4, 4) or state.shape[0] != 4:
        raise ValueError(f"expected a 4x4 operator and 4-component state, got {op.shape} and {state.shape}")
    return op @ state


def concurrence(state: np.ndarray) -> float:
    """Pure-state concurrence ``2 |a00 a11 - a01 a10|`` after renormalisation."""
    a = np.asarray(state, dtype=complex)
    if a.shape != (4,):
        raise ValueError("state must have 4 components")
    n2 = float(np.vdot(a, a).real)
    if n2 == 0:
        raise ValueError("zero-norm state")
    return min(1.0, 2 * abs(a[0] * a[3] - a[1] * a[2]) / n2)


@dataclass(frozen=True)
class TruthRow:
    input: str
    output: np.ndarray
    amplitude: complex
    ideal: complex
    deviation: float


def truth_table(amps: ConditionalAmplitudes = IDEAL) -> list[TruthRow]:
    """Gate action on each basis state against the ideal sign pattern (+, -, +, +)."""
    g = gate_matrix(amps)
    ideal = gate_matrix(IDEAL)
    rows = []
    for i, name in enumerate(BASIS):
        out = g[:, i]
        rows.append(TruthRow(name, out, complex(g[i, i]), complex(ideal[i, i]),
                             float(np.max(np.abs(out - ideal[:, i])))))
    return rows


def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_json(m: np.ndarray) -> list[list[list[float]]]:
    """Row-major nested list of ``[re, im]`` pairs."""
    return [[_pair(z) for z in row] for row in np.asarray(m)]


def truth_table_to_json(rows: list[TruthRow]) -> dict:
    return {
        "basis": list(BASIS),
        "rows": [
            {
                "input": r.input,
                "output": [_pair(z) for z in r.output],
                "amplitude": _pair(r.amplitude),
                "ideal": _pair(r.ideal),
                "deviation": r.deviation,
            }
            for r in rows
        ],
    }


def dumps(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
