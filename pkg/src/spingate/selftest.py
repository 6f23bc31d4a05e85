"""Randomised consistency checks shared by the CLI ``selftest`` and the test suite."""

from __future__ import annotations

import contextlib
import time
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from . import steady_state
from .model import SpinState, ValidatedParams
from .steady_state import flux_balance, oracle_solve, solve_general, transmission_closed_form

__all__ = [
    "CheckResult",
    "corrupted_convention",
    "random_degenerate",
    "random_general",
    "random_lossless",
    "random_pulse_case",
    "run_selftest",
    "timed_selftest",
]


def _loguniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def random_degenerate(rng: np.random.Generator) -> tuple[ValidatedParams, float, SpinState]:
    """Degenerate symmetric cavity with g_o = -1j g_e, plus a drive frequency and spin."""
    kappa0 = _loguniform(rng, 1e-3, 10.0)
    kappa1 = _loguniform(rng, 1e-2, 100.0)
    g = _loguniform(rng, 1e-2, 100.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    omega_c = rng.uniform(-10, 10)
    params = ValidatedParams(
        omega_e=omega_c,
        omega_o=omega_c,
        omega_a=omega_c + rng.uniform(-20, 20),
        kappa_e0=kappa0,
        kappa_o0=kappa0,
        kappa_e1=kappa1,
        kappa_o1=kappa1,
        g_e=complex(g),
        g_o=complex(-1j * g),
        gamma_s=_loguniform(rng, 1e-4, 1.0),
        gamma_p=_loguniform(rng, 1e-3, 10.0),
    )
    omega_l = omega_c + rng.uniform(-3, 3) * (kappa0 + kappa1 + abs(g))
    return params, omega_l, SpinState.UP if rng.random() < 0.5 else SpinState.DOWN


def random_general(rng: np.random.Generator) -> tuple[ValidatedParams, float, SpinState]:
    """Unconstrained draw; every fourth one is a Case IV/VII-like mismatched cavity."""
    kind = rng.integers(4)
    ge = _loguniform(rng, 1e-2, 50.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    if kind == 0:
        split = rng.uniform(1, 10)
        ke1 = _loguniform(rng, 1.0, 60.0)
        params = ValidatedParams(
            omega_e=split, omega_o=-split, omega_a=rng.uniform(-2, 2),
            kappa_e0=_loguniform(rng, 0.05, 1.0), kappa_o0=_loguniform(rng, 0.05, 1.0),
            kappa_e1=ke1, kappa_o1=ke1 / rng.uniform(1.0, 1.5),
            g_e=complex(ge), g_o=complex(-1j * ge), gamma_s=0.002, gamma_p=_loguniform(rng, 0.01, 10.0),
        )
    else:
        go = _loguniform(rng, 1e-2, 50.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        params = ValidatedParams(
            omega_e=rng.uniform(-10, 10), omega_o=rng.uniform(-10, 10), omega_a=rng.uniform(-10, 10),
            kappa_e0=_loguniform(rng, 1e-3, 10.0), kappa_o0=_loguniform(rng, 1e-3, 10.0),
            kappa_e1=_loguniform(rng, 1e-3, 50.0), kappa_o1=_loguniform(rng, 1e-3, 50.0),
            g_e=complex(ge), g_o=complex(go),
            gamma_s=_loguniform(rng, 1e-4, 1.0), gamma_p=_loguniform(rng, 1e-3, 10.0),
        )
    scale = params.kappa_e + params.kappa_o + abs(ge)
    omega_l = params.omega_c + rng.uniform(-2, 2) * scale
    return params, omega_l, SpinState.UP if rng.random() < 0.75 else SpinState.DOWN


def random_lossless(rng: np.random.Generator) -> tuple[ValidatedParams, float, SpinState]:
    """No intrinsic cavity loss and no emitter decay; only the waveguide drains energy."""
    ge = _loguniform(rng, 1e-2, 20.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    go = _loguniform(rng, 1e-2, 20.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    params = ValidatedParams(
        omega_e=rng.uniform(-5, 5), omega_o=rng.uniform(-5, 5), omega_a=rng.uniform(-5, 5),
        kappa_e1=_loguniform(rng, 0.1, 20.0), kappa_o1=_loguniform(rng, 0.1, 20.0),
        g_e=complex(ge), g_o=complex(go), gamma_s=0.0, gamma_p=0.0,
    )
    return params, rng.uniform(-30, 30), SpinState.UP if rng.random() < 0.5 else SpinState.DOWN


def random_pulse_case(rng: np.random.Generator, tau_kappa: float = 10.0):
    """Random moderately damped system, spin and a band-limited Gaussian pulse.

    ``tau * kappa_e == tau_kappa``. The window leaves room for the slowest
    mode to ring down so that the periodic spectral method and the
    start-from-rest integrator describe the same physical situation.
    """
    from .pulse import gaussian_pulse

    ge = rng.uniform(0, 2) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    go = rng.uniform(0, 2) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    params = ValidatedParams(
        omega_e=rng.uniform(-1, 1), omega_o=rng.uniform(-1, 1), omega_a=rng.uniform(-1, 1),
        kappa_e0=rng.uniform(0.05, 0.5), kappa_o0=rng.uniform(0.05, 0.5),
        kappa_e1=rng.uniform(0.5, 2.0), kappa_o1=rng.uniform(0.5, 2.0),
        g_e=complex(ge), g_o=complex(go), gamma_s=0.002, gamma_p=rng.uniform(0.3, 2.0),
    )
    spin = SpinState.UP if rng.random() < 0.75 else SpinState.DOWN
    tau = tau_kappa / params.kappa_e
    slowest = min(params.kappa_e, params.kappa_o, params.gamma)
    t_span = 2 * (8 * tau + 30 / slowest)
    n = 1 << int(np.ceil(np.log2(t_span / (tau / 2))))
    return params, spin, gaussian_pulse(tau, rng.uniform(-1, 1), t_span, n)


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))


def oracle_error(params, omega_l, spin) -> float:
    s = solve_general(params, omega_l, spin)
    o = oracle_solve(params, omega_l, spin)
    return max(_rel([s.c_e, s.c_o, s.sigma], [o.c_e, o.c_o, o.sigma]), _rel([s.t, s.r], [o.t, o.r]))


def closed_form_error(params, omega_l, spin) -> tuple[float, float]:
    """(|t_general - t_closed|, |r_general|) for a degenerate symmetric draw."""
    s = solve_general(params, omega_l, spin)
    t_cf = transmission_closed_form(
        params.kappa_e0, params.kappa_e1, abs(params.g_e), params.gamma,
        omega_l - params.omega_c, params.omega_a - params.omega_c, spin,
    )
    return abs(s.t - t_cf), abs(s.r)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    draws: int

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: worst={self.worst:.3e} tol={self.tolerance:.0e} draws={self.draws}"


def _check(name: str, draw: Callable, metric: Callable, tol: float, n: int, rng) -> CheckResult:
    worst = 0.0
    for _ in range(n):
        worst = max(worst, metric(*draw(rng)))
    return CheckResult(name, bool(worst < tol), worst, tol, n)


@contextlib.contextmanager
def corrupted_convention() -> Iterator[None]:
    """Flip the odd-mode output sign; a negative control for the self-test."""
    saved = steady_state._ODD_OUTPUT_SIGN
    steady_state._ODD_OUTPUT_SIGN = -saved
    try:
        yield
    finally:
        steady_state._ODD_OUTPUT_SIGN = saved


def run_selftest(seed: int = 0, n: int = 1000) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    residual = lambda p, w, s: abs(flux_balance(solve_general(p, w, s)).residual)  # noqa: E731

    def unitarity(p, w, s):
        st = solve_general(p, w, s)
        return abs(st.T + st.R - 1.0)

    return [
        _check("oracle equivalence", random_general, oracle_error, 1e-12, n, rng),
        _check("closed-form equivalence", random_degenerate, lambda *a: closed_form_error(*a)[0], 1e-12, n, rng),
        _check("reflection nullity", random_degenerate, lambda *a: closed_form_error(*a)[1], 1e-12, n, rng),
        _check("flux balance", random_general, residual, 1e-10, n, rng),
        _check("lossless unitarity", random_lossless, unitarity, 1e-10, n, rng),
    ]


def timed_selftest(seed: int = 0, n: int = 1000) -> tuple[list[CheckResult], float]:
    start = time.perf_counter()
    results = run_selftest(seed, n)
    return results, time.perf_counter() - start
