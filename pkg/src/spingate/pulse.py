"""Finite-bandwidth photon pulses through the cavity-dipole-cavity system.

Envelopes live in the frame rotating at the carrier ``omega_l``. A spectral
component that varies as ``exp(-1j * w * t)`` drives the system at absolute
frequency ``omega_l + w``, matching the sign of the rotating-frame equations.
The discrete transform pair on a uniform periodic grid is therefore

    F(w_k) = dt * sum_n f(t_n) exp(+1j * w_k * t_n)
    f(t_n) = dw / (2 pi) * sum_k F(w_k) exp(-1j * w_k * t_n)

with ``dw = 2 pi / (N dt)``, so ``sum |f|**2 dt == sum |F|**2 dw / (2 pi)``.

Two propagators are provided and serve as each other's check: spectral
filtering with the steady-state amplitudes, and fixed-step classical RK4
integration of the linearised equations of motion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .model import SpinState, SystemParams, validate
from .steady_state import _drive, _outputs, solve_general, system_matrix

__all__ = [
    "OutputFields",
    "PulseTruncationError",
    "PulseWaveform",
    "StepSizeError",
    "gaussian_pulse",
    "max_rate",
    "propagate_frequency",
    "propagate_time",
    "auto_step",
    "to_csv",
    "to_frequency",
    "to_time",
]

TAIL_TOLERANCE = 1e-8
MAX_STEP_PRODUCT = 0.1


class PulseTruncationError(ValueError):
    pass


class StepSizeError(ValueError):
    pass


def to_frequency(time_grid: np.ndarray, envelope_t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Transform to ascending angular-frequency grid (see module docstring)."""
    n = len(time_grid)
    dt = time_grid[1] - time_grid[0]
    w = 2 * np.pi * np.fft.fftfreq(n, dt)
    spec = dt * n * np.fft.ifft(envelope_t) * np.exp(1j * w * time_grid[0])
    return np.fft.fftshift(w), np.fft.fftshift(spec)


def to_time(time_grid: np.ndarray, freq_grid: np.ndarray, envelope_f: np.ndarray) -> np.ndarray:
    n = len(time_grid)
    dt = time_grid[1] - time_grid[0]
    w = np.fft.ifftshift(freq_grid)
    spec = np.fft.ifftshift(envelope_f) * np.exp(-1j * w * time_grid[0])
    return np.fft.fft(spec) / (n * dt)


@dataclass(frozen=True)
class PulseWaveform:
    time_grid: np.ndarray
    envelope_t: np.ndarray
    frequency_grid: np.ndarray
    envelope_f: np.ndarray
    omega_l: float = 0.0

    @classmethod
    def from_time(cls, time_grid, envelope_t, omega_l: float = 0.0) -> "PulseWaveform":
        time_grid = np.asarray(time_grid, dtype=float)
        envelope_t = np.asarray(envelope_t, dtype=complex)
        n = len(time_grid)
        if n < 2 or n & (n - 1):
            raise ValueError("number of samples must be a power of two")
        freq, spec = to_frequency(time_grid, envelope_t)
        return cls(time_grid, envelope_t, freq, spec, float(omega_l))

    @property
    def dt(self) -> float:
        return float(self.time_grid[1] - self.time_grid[0])

    @property
    def norm(self) -> float:
        return math.sqrt(float(np.sum(np.abs(self.envelope_t) ** 2)) * self.dt)

    def scaled(self, alpha: complex) -> "PulseWaveform":
        return PulseWaveform(self.time_grid, alpha * self.envelope_t, self.frequency_grid,
                             alpha * self.envelope_f, self.omega_l)

    def spectral_weights(self) -> np.ndarray:
        """``|F(w)|**2`` normalised to unit sum."""
        p = np.abs(self.envelope_f) ** 2
        return p / p.sum()


def gaussian_pulse(tau: float, omega_l: float, t_span: float, n_samples: int) -> PulseWaveform:
    """Unit-norm Gaussian envelope ``exp(-t**2 / (4 tau**2))`` centred at t = 0.

    The intensity has standard deviation ``tau`` in time and ``1 / (2 tau)``
    in angular frequency. ``t_span`` is the full window width, sampled
    periodically (endpoint excluded).

    Raises
    ------
    PulseTruncationError
        If more than 1e-8 of the energy lies outside the window, or outside
        the Nyquist band of the sampling.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    n = int(n_samples)
    if n < 2 or n & (n - 1):
        raise ValueError("n_samples must be a power of two")
    if t_span < 8 * tau:
        raise PulseTruncationError(f"t_span={t_span!r} shorter than 8*tau={8 * tau!r}")
    half = t_span / 2
    tail = erfc(half / (math.sqrt(2) * tau))
    if tail > TAIL_TOLERANCE:
        raise PulseTruncationError(f"{tail:.3g} of the pulse energy lies outside the window")
    dt = t_span / n
    nyquist = math.pi / dt
    alias = erfc(nyquist * math.sqrt(2) * tau)
    if alias > TAIL_TOLERANCE:
        raise PulseTruncationError(f"{alias:.3g} of the pulse spectrum lies beyond the Nyquist band")
    t = -half + dt * np.arange(n)
    env = np.exp(-(t**2) / (4 * tau**2)).astype(complex)
    env /= math.sqrt(float(np.sum(np.abs(env) ** 2)) * dt)
    return PulseWaveform.from_time(t, env, omega_l)


@dataclass(frozen=True)
class OutputFields:
    time_grid: np.ndarray
    transmitted: np.ndarray
    reflected: np.ndarray
    norm_t: float
    norm_r: float
    c_e: np.ndarray = field(repr=False, default=None)
    c_o: np.ndarray = field(repr=False, default=None)
    sigma: np.ndarray = field(repr=False, default=None)

    def dissipated(self, params: SystemParams) -> float:
        """Time-integrated intrinsic-cavity and emitter loss."""
        p = validate(params)
        dt = self.time_grid[1] - self.time_grid[0]
        rate = (2 * p.kappa_e0 * np.abs(self.c_e) ** 2 + 2 * p.kappa_o0 * np.abs(self.c_o) ** 2
                + 2 * p.gamma * np.abs(self.sigma) ** 2)
        return float(np.sum(rate) * dt)

    def stored(self) -> float:
        """Energy left inside cavity and emitter at the last sample."""
        return float(abs(self.c_e[-1]) ** 2 + abs(self.c_o[-1]) ** 2 + abs(self.sigma[-1]) ** 2)


def _energy(x: np.ndarray, dt: float) -> float:
    return float(np.sum(np.abs(x) ** 2) * dt)


def propagate_frequency(params: SystemParams, spin: SpinState, pulse: PulseWaveform) -> OutputFields:
    """Scatter every spectral component with the steady-state response."""
    p = validate(params)
    weights = pulse.spectral_weights()
    n = len(weights)
    edge = np.r_[weights[: n // 16], weights[-(n // 16):]].sum()
    if edge > 1e-10:
        raise PulseTruncationError(f"pulse spectrum reaches the edge of the frequency window ({edge:.3g})")
    s = solve_general(p, pulse.omega_l + pulse.frequency_grid, spin)
    t_grid = pulse.time_grid
    back = lambda x: to_time(t_grid, pulse.frequency_grid, x * pulse.envelope_f)  # noqa: E731
    out_t, out_r = back(s.t), back(s.r)
    dt = pulse.dt
    return OutputFields(t_grid, out_t, out_r, _energy(out_t, dt), _energy(out_r, dt),
                        back(s.c_e), back(s.c_o), back(s.sigma))


def max_rate(params: SystemParams, omega_l: float, spin: SpinState = SpinState.UP) -> float:
    """Fastest rate the integrator must resolve at carrier ``omega_l``."""
    m = system_matrix(params, omega_l, spin)
    diag = np.diagonal(m)
    return float(max(np.max(np.abs(diag.real)), np.max(np.abs(diag.imag)), abs(m[0, 2]), abs(m[1, 2])))


def _shifted(pulse: PulseWaveform, shift: float) -> np.ndarray:
    """Band-limited interpolation of the envelope at ``t_n + shift``."""
    return to_time(pulse.time_grid, pulse.frequency_grid,
                   pulse.envelope_f * np.exp(-1j * pulse.frequency_grid * shift))


def propagate_time(params: SystemParams, spin: SpinState, pulse: PulseWaveform, dt: float) -> OutputFields:
    """Integrate the linearised equations of motion with classical RK4.

    The system starts empty at the first sample. ``dt`` must divide the
    sampling interval; inputs at intermediate stage times come from
    band-limited interpolation of the sampled envelope.

    Raises
    ------
    StepSizeError
        If ``dt * max_rate > 0.1`` or ``dt`` does not divide the sampling.
    """
    p = validate(params)
    spin = SpinState.parse(spin)
    rate = max_rate(p, pulse.omega_l, spin)
    if not dt > 0 or dt * rate > MAX_STEP_PRODUCT:
        raise StepSizeError(f"dt={dt!r} too large: dt*max_rate={dt * rate:.3g} > {MAX_STEP_PRODUCT}")
    h = pulse.dt
    sub = round(h / dt)
    if sub < 1 or abs(sub * dt - h) > 1e-9 * h:
        raise StepSizeError(f"dt={dt!r} must divide the sampling interval {h!r}")
    dt = h / sub

    m = system_matrix(p, pulse.omega_l, spin)
    (m00, _, m02), (_, m11, m12), (m20, m21, m22) = (map(complex, row) for row in m)
    b0, b1, _ = map(complex, _drive(p))
    # inputs at t_n + j*dt/2 for j = 0 .. 2*sub - 1
    u = [_shifted(pulse, j * dt / 2).tolist() if j else pulse.envelope_t.tolist() for j in range(2 * sub)]
    u_next = u[0][1:] + [0j]

    def f(c0, c1, c2, x):
        return (b0 * x - m00 * c0 - m02 * c2,
                b1 * x - m11 * c1 - m12 * c2,
                -m20 * c0 - m21 * c1 - m22 * c2)

    n = len(pulse.time_grid)
    ce = np.empty(n, dtype=complex)
    co = np.empty(n, dtype=complex)
    sg = np.empty(n, dtype=complex)
    c0 = c1 = c2 = 0j
    half = dt / 2
    for k in range(n):
        ce[k], co[k], sg[k] = c0, c1, c2
        for j in range(sub):
            x0 = u[2 * j][k]
            xh = u[2 * j + 1][k]
            x1 = u[2 * j + 2][k] if j + 1 < sub else u_next[k]
            k1 = f(c0, c1, c2, x0)
            k2 = f(c0 + half * k1[0], c1 + half * k1[1], c2 + half * k1[2], xh)
            k3 = f(c0 + half * k2[0], c1 + half * k2[1], c2 + half * k2[2], xh)
            k4 = f(c0 + dt * k3[0], c1 + dt * k3[1], c2 + dt * k3[2], x1)
            c0 += dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            c1 += dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            c2 += dt / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])

    out_t, out_r = _outputs(p, ce, co)
    out_t = out_t - 1.0 + pulse.envelope_t
    return OutputFields(pulse.time_grid, out_t, out_r, _energy(out_t, h), _energy(out_r, h), ce, co, sg)


CSV_HEADER = ("t", "re_in", "im_in", "re_out_t", "im_out_t", "re_out_r", "im_out_r")


def to_csv(pulse: PulseWaveform, out: OutputFields) -> str:
    lines = [",".join(CSV_HEADER)]
    for t, a, b, c in zip(pulse.time_grid, pulse.envelope_t, out.transmitted, out.reflected):
        lines.append(",".join(repr(float(v)) for v in (t, a.real, a.imag, b.real, b.imag, c.real, c.imag)))
    return "\n".join(lines) + "\n"


def auto_step(params: SystemParams, spin: SpinState, pulse: PulseWaveform, target: float = 0.02) -> float:
    """Largest divisor of the sampling interval with ``dt * max_rate <= target``."""
    rate = max_rate(params, pulse.omega_l, spin)
    sub = max(1, math.ceil(pulse.dt * rate / target))
    return pulse.dt / sub
