"""Driven steady state of the two cavity modes and the emitter.

Unit amplitude enters at port 1 (left waveguide) and nothing at port 2. In the
frame rotating at the drive frequency, with the emitter linearised
(sigma_z -> -1), the stationary amplitudes satisfy

    (i d_el + kappa_e) c_e + i g_e sigma             = i sqrt(kappa_e1)
    (i d_ol + kappa_o) c_o + i g_o sigma             =   sqrt(kappa_o1)
    (i d_al + gamma) sigma + i (g_e* c_e + g_o* c_o) = 0

and the outputs are

    t = 1 + i sqrt(kappa_e1) c_e - sqrt(kappa_o1) c_o     (port 2, forward)
    r =     i sqrt(kappa_e1) c_e + sqrt(kappa_o1) c_o     (port 1, backward)

The even mode radiates into both ports with the same phase, the odd mode with
opposite signs, and the direct waveguide path swaps ports. This is the one
port convention under which the degenerate, symmetric cavity with
``g_o = -1j * g_e`` reproduces the printed transmission formula
(:func:`transmission_closed_form`) and has identically zero reflection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import SpinState, SystemParams, validate

__all__ = [
    "FluxReport",
    "SingularSystemError",
    "SteadyState",
    "SupermodeView",
    "flux_balance",
    "gaussian_elimination",
    "oracle_solve",
    "phase",
    "solve_general",
    "supermode_transform",
    "system_matrix",
    "transmission_closed_form",
]

# Sign of the odd-mode term in the output relations. Only the self-test's
# negative control ever changes it.
_ODD_OUTPUT_SIGN = 1.0


class SingularSystemError(ArithmeticError):
    """The steady-state system has no unique solution (zero total damping)."""

    def __init__(self, message: str, omega_l: float | None = None):
        super().__init__(message)
        self.omega_l = omega_l


@dataclass(frozen=True)
class SteadyState:
    c_e: np.ndarray | complex
    c_o: np.ndarray | complex
    sigma: np.ndarray | complex
    t: np.ndarray | complex
    r: np.ndarray | complex
    loss_cavity_e: np.ndarray | float
    loss_cavity_o: np.ndarray | float
    loss_emitter: np.ndarray | float

    @property
    def T(self):
        return np.abs(self.t) ** 2

    @property
    def R(self):
        return np.abs(self.r) ** 2

    @property
    def loss(self):
        return self.loss_cavity_e + self.loss_cavity_o + self.loss_emitter


def phase(z):
    """Principal argument in (-pi, pi]; a negative real number maps to +pi even with -0.0 imaginary part."""
    a = np.angle(z)
    return np.where(a == -np.pi, np.pi, a) if np.ndim(a) else (math.pi if a == -math.pi else float(a))


def _couplings(params: SystemParams, spin: SpinState) -> tuple[complex, complex]:
    if SpinState.parse(spin) is SpinState.DOWN:
        return 0j, 0j
    return complex(params.g_e), complex(params.g_o)


def system_matrix(params: SystemParams, omega_l, spin: SpinState = SpinState.UP) -> np.ndarray:
    """Steady-state coefficient matrices, shape ``(..., 3, 3)`` over ``omega_l``."""
    p = validate(params)
    g_e, g_o = _couplings(p, spin)
    w = np.asarray(omega_l, dtype=float)
    m = np.zeros(w.shape + (3, 3), dtype=complex)
    m[..., 0, 0] = 1j * (p.omega_e - w) + p.kappa_e
    m[..., 1, 1] = 1j * (p.omega_o - w) + p.kappa_o
    m[..., 2, 2] = 1j * (p.omega_a - w) + p.gamma
    m[..., 0, 2] = 1j * g_e
    m[..., 1, 2] = 1j * g_o
    m[..., 2, 0] = 1j * np.conj(g_e)
    m[..., 2, 1] = 1j * np.conj(g_o)
    return m


def _drive(params: SystemParams) -> np.ndarray:
    return np.array([1j * math.sqrt(params.kappa_e1), math.sqrt(params.kappa_o1), 0.0])


def _outputs(params: SystemParams, c_e, c_o):
    a = 1j * math.sqrt(params.kappa_e1) * c_e
    b = _ODD_OUTPUT_SIGN * math.sqrt(params.kappa_o1) * c_o
    return 1.0 + a - b, a + b


def _assemble(p, c_e, c_o, sigma) -> SteadyState:
    t, r = _outputs(p, c_e, c_o)
    return SteadyState(
        c_e=c_e,
        c_o=c_o,
        sigma=sigma,
        t=t,
        r=r,
        loss_cavity_e=2 * p.kappa_e0 * np.abs(c_e) ** 2,
        loss_cavity_o=2 * p.kappa_o0 * np.abs(c_o) ** 2,
        loss_emitter=2 * p.gamma * np.abs(sigma) ** 2,
    )


def _first_bad(omega_l: np.ndarray, mask: np.ndarray) -> float:
    return float(np.broadcast_to(omega_l, mask.shape)[mask].flat[0])


def solve_general(params: SystemParams, omega_l, spin: SpinState = SpinState.UP) -> SteadyState:
    """Steady state for drive frequency ``omega_l`` (scalar or array).

    Array input returns arrays of the same shape. For spin down the emitter
    is decoupled and ``sigma`` is exactly zero.

    Raises
    ------
    SingularSystemError
        If the coefficient matrix is singular at some drive frequency, which
        needs zero damping in the driven subspace.
    """
    p = validate(params)
    spin = SpinState.parse(spin)
    w = np.asarray(omega_l, dtype=float)
    scalar = w.ndim == 0
    m = system_matrix(p, w, spin)
    b = _drive(p)

    if spin is SpinState.DOWN:
        d_e, d_o = m[..., 0, 0], m[..., 1, 1]
        bad = (d_e == 0) | (d_o == 0)
        if np.any(bad):
            wb = _first_bad(w, bad)
            raise SingularSystemError(f"undamped cavity mode on resonance at omega_l={wb!r}", wb)
        c_e = b[0] / d_e
        c_o = b[1] / d_o
        sigma = np.zeros_like(c_e)
    else:
        det = np.linalg.det(m)
        scale = np.max(np.abs(m), axis=(-2, -1)) ** 3
        bad = ~(np.abs(det) > 1e-14 * scale)
        if np.any(bad):
            wb = _first_bad(w, bad)
            raise SingularSystemError(f"singular steady-state system at omega_l={wb!r}", wb)
        x = np.linalg.solve(m, np.broadcast_to(b, m.shape[:-1])[..., None])[..., 0]
        c_e, c_o, sigma = x[..., 0], x[..., 1], x[..., 2]

    if scalar:
        c_e, c_o, sigma = complex(c_e), complex(c_o), complex(sigma)
    return _assemble(p, c_e, c_o, sigma)


def transmission_closed_form(kappa0, kappa1, g_e_mag, gamma, delta, Delta, spin: SpinState = SpinState.UP):
    """Forward transmission of the degenerate symmetric cavity.

    ``t = (kappa - 2 kappa1 - i delta + lam) / (kappa - i delta + lam)`` with
    ``lam = 2 |g_e|**2 / (i (Delta - delta) + gamma)`` and ``kappa = kappa0 +
    kappa1``; spin down has ``lam = 0``. Reflection is identically zero in
    this geometry. Where the emitter denominator vanishes with nonzero
    coupling, ``lam`` is infinite and ``t`` takes its limit 1.
    """
    spin = SpinState.parse(spin)
    kappa = kappa0 + kappa1
    delta = np.asarray(delta, dtype=float)
    g2 = 0.0 if spin is SpinState.DOWN else abs(g_e_mag) ** 2
    cav = kappa - 1j * delta
    if g2 == 0.0:
        t = (cav - 2 * kappa1) / cav
    else:
        a = 1j * (Delta - delta) + gamma
        # t = (a*cav - 2*kappa1*a + 2g2) / (a*cav + 2g2), finite at a == 0
        num = a * (cav - 2 * kappa1) + 2 * g2
        den = a * cav + 2 * g2
        t = num / den
    return complex(t) if t.ndim == 0 else t


@dataclass(frozen=True)
class SupermodeView:
    c_plus: complex
    c_minus: complex
    g_plus: complex
    g_minus: complex
    driven: str
    coupling_to_driven: float


def supermode_transform(params: SystemParams, state: SteadyState) -> SupermodeView:
    """Express the cavity state in the travelling-wave basis.

    ``c_pm = (c_e +- i c_o) / sqrt(2)`` and ``g_pm = (g_e -+ i g_o) / sqrt(2)``,
    which keeps ``g_e c_e + g_o c_o = g_+ c_+ + g_- c_-``. Port 1 drives only
    ``c_+``; ``coupling_to_driven`` is the magnitude of the emitter's coupling
    to ``c_+`` in the equations actually solved, ``|g_e + i g_o| / sqrt(2)``.
    """
    s2 = math.sqrt(2.0)
    g_e, g_o = complex(params.g_e), complex(params.g_o)
    return SupermodeView(
        c_plus=(state.c_e + 1j * state.c_o) / s2,
        c_minus=(state.c_e - 1j * state.c_o) / s2,
        g_plus=(g_e - 1j * g_o) / s2,
        g_minus=(g_e + 1j * g_o) / s2,
        driven="+",
        coupling_to_driven=abs(g_e + 1j * g_o) / s2,
    )


@dataclass(frozen=True)
class FluxReport:
    transmitted: float
    reflected: float
    loss_cavity_e: float
    loss_cavity_o: float
    loss_emitter: float
    residual: float


def flux_balance(state: SteadyState, params: SystemParams | None = None) -> FluxReport:
    """Energy bookkeeping per unit input flux; ``residual`` should vanish."""
    T, R = state.T, state.R
    return FluxReport(
        transmitted=T,
        reflected=R,
        loss_cavity_e=state.loss_cavity_e,
        loss_cavity_o=state.loss_cavity_o,
        loss_emitter=state.loss_emitter,
        residual=1.0 - T - R - state.loss_cavity_e - state.loss_cavity_o - state.loss_emitter,
    )


def gaussian_elimination(a: list[list[complex]], b: list[complex]) -> list[complex]:
    """Solve a small dense complex system with partial pivoting (pure Python)."""
    n = len(b)
    a = [list(map(complex, row)) for row in a]
    b = list(map(complex, b))
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(a[i][k]))
        if a[piv][k] == 0:
            raise SingularSystemError("matrix is singular")
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            b[k], b[piv] = b[piv], b[k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
                b[i] -= f * b[k]
    x = [0j] * n
    for k in range(n - 1, -1, -1):
        acc = b[k]
        for j in range(k + 1, n):
            acc -= a[k][j] * x[j]
        x[k] = acc / a[k][k]
    return x


def oracle_solve(params: SystemParams, omega_l: float, spin: SpinState = SpinState.UP) -> SteadyState:
    """Independent scalar reference for :func:`solve_general`.

    Rebuilds the equations row by row and solves them by elimination; meant
    for tests and the self-test only.
    """
    p = validate(params)
    up = SpinState.parse(spin) is SpinState.UP
    ge = complex(p.g_e) if up else 0j
    go = complex(p.g_o) if up else 0j
    se, so = math.sqrt(p.kappa_e1), math.sqrt(p.kappa_o1)
    rows = [
        [complex(p.kappa_e0 + p.kappa_e1, p.omega_e - omega_l), 0j, 1j * ge],
        [0j, complex(p.kappa_o0 + p.kappa_o1, p.omega_o - omega_l), 1j * go],
        [1j * ge.conjugate(), 1j * go.conjugate(), complex(p.gamma_s / 2 + p.gamma_p, p.omega_a - omega_l)],
    ]
    c_e, c_o, sigma = gaussian_elimination(rows, [1j * se, complex(so), 0j])
    left = 1j * se * c_e + _ODD_OUTPUT_SIGN * so * c_o
    right = 1 + 1j * se * c_e - _ODD_OUTPUT_SIGN * so * c_o
    return SteadyState(
        c_e=c_e,
        c_o=c_o,
        sigma=sigma,
        t=right,
        r=left,
        loss_cavity_e=2 * p.kappa_e0 * abs(c_e) ** 2,
        loss_cavity_o=2 * p.kappa_o0 * abs(c_o) ** 2,
        loss_emitter=2 * (p.gamma_s / 2 + p.gamma_p) * abs(sigma) ** 2,
    )
