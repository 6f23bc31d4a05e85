"""Physical parameters of the cavity-dipole-cavity system.

Every rate, coupling and frequency offset is an *amplitude* rate in rad/ns.
The quoted "GHz" figures of the lead-sulphide regime (kappa0 = 0.1, |g| = 30,
gamma_p = 1, ...) are used as these numbers directly: all dimensionless
outputs depend only on ratios such as g**2 / (kappa * gamma) and
kappa0 / kappa1, so no 2*pi factor is applied anywhere.

Frequencies are stored as offsets from an arbitrary reference zero so that a
single parameter set can be swept over drive frequency ``omega_l``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Mapping

from scipy.constants import speed_of_light

__all__ = [
    "CASE_IDS",
    "DetuningSet",
    "ParameterError",
    "SpinState",
    "SystemParams",
    "ValidatedParams",
    "case_params",
    "detunings",
    "load_params",
    "params_from_dict",
    "params_to_dict",
    "q_to_kappa",
    "validate",
]

GAMMA_S_DEFAULT = 0.002
GAMMA_P_DEFAULT = 1.0
G_E_DEFAULT = 30.0

_RATE_FIELDS = ("kappa_e0", "kappa_o0", "kappa_e1", "kappa_o1", "gamma_s", "gamma_p")
_COMPLEX_FIELDS = ("g_e", "g_o")


class ParameterError(ValueError):
    """Invalid physical parameter; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class SpinState(str, enum.Enum):
    UP = "up"
    DOWN = "down"

    @classmethod
    def parse(cls, value: "SpinState | str") -> "SpinState":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ParameterError("spin", f"expected 'up' or 'down', got {value!r}") from None


@dataclass(frozen=True)
class SystemParams:
    omega_e: float = 0.0
    omega_o: float = 0.0
    omega_a: float = 0.0
    kappa_e0: float = 0.0
    kappa_o0: float = 0.0
    kappa_e1: float = 0.0
    kappa_o1: float = 0.0
    g_e: complex = 0j
    g_o: complex = 0j
    gamma_s: float = GAMMA_S_DEFAULT
    gamma_p: float = GAMMA_P_DEFAULT

    @property
    def kappa_e(self) -> float:
        return self.kappa_e0 + self.kappa_e1

    @property
    def kappa_o(self) -> float:
        return self.kappa_o0 + self.kappa_o1

    @property
    def gamma(self) -> float:
        """Total emitter coherence decay, half the radiative rate plus dephasing."""
        return self.gamma_s / 2 + self.gamma_p

    @property
    def omega_c(self) -> float:
        """Mean cavity frequency; the true common frequency when degenerate."""
        return (self.omega_e + self.omega_o) / 2

    @property
    def degenerate(self) -> bool:
        return self.omega_e == self.omega_o

    def with_gamma(self, gamma: float) -> "SystemParams":
        """Copy with total emitter decay set to ``gamma``, keeping gamma_s."""
        return replace(self, gamma_p=gamma - self.gamma_s / 2)

    def scaled(self, factor: float) -> "SystemParams":
        """Multiply every rate, coupling and frequency offset by ``factor``."""
        return type(self)(**{f.name: getattr(self, f.name) * factor for f in fields(self)})


@dataclass(frozen=True)
class ValidatedParams(SystemParams):
    """A :class:`SystemParams` that has passed :func:`validate`."""

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in _COMPLEX_FIELDS:
                value = complex(value)
                if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                    raise ParameterError(f.name, "must be finite")
            else:
                if isinstance(value, complex):
                    raise ParameterError(f.name, "must be real")
                value = float(value)
                if not math.isfinite(value):
                    raise ParameterError(f.name, "must be finite")
                if f.name in _RATE_FIELDS and value < 0:
                    raise ParameterError(f.name, f"rate must be >= 0, got {value!r}")
            object.__setattr__(self, f.name, value)
        if self.gamma < 0:
            raise ParameterError("gamma_p", "gamma_s/2 + gamma_p must be >= 0")


def validate(params: SystemParams) -> ValidatedParams:
    if isinstance(params, ValidatedParams):
        return params
    return ValidatedParams(**{f.name: getattr(params, f.name) for f in fields(SystemParams)})


@dataclass(frozen=True)
class DetuningSet:
    delta_el: float
    delta_ol: float
    delta_al: float
    delta: float
    Delta: float
    degenerate: bool


def detunings(params: SystemParams, omega_l: float) -> DetuningSet:
    """Rotating-frame detunings at drive frequency ``omega_l``.

    ``delta`` (drive minus cavity) and ``Delta`` (emitter minus cavity) are
    taken relative to the mean cavity frequency; ``degenerate`` is False when
    the two modes differ, in which case they are only a convenient summary.
    """
    p = validate(params)
    return DetuningSet(
        delta_el=p.omega_e - omega_l,
        delta_ol=p.omega_o - omega_l,
        delta_al=p.omega_a - omega_l,
        delta=omega_l - p.omega_c,
        Delta=p.omega_a - p.omega_c,
        degenerate=p.degenerate,
    )


def q_to_kappa(Q: float, wavelength_nm: float) -> float:
    """Amplitude decay rate kappa = omega / (2 Q) in rad/ns.

    >>> round(q_to_kappa(1e6, 1550.0), 4)
    0.6077
    """
    if not Q > 0:
        raise ParameterError("Q", "must be positive")
    if not wavelength_nm > 0:
        raise ParameterError("wavelength", "must be positive")
    if math.isinf(Q):
        return 0.0
    omega = 2 * math.pi * speed_of_light / (wavelength_nm * 1e-9) * 1e-9
    return omega / (2 * Q)


# Per-case overrides relative to the operating point omega_l = 0.  kappa1 is
# a function of |g_e| because several cases pin it to the coupling strength.
_CASES: dict[str, dict[str, Any]] = {
    "I": dict(kappa_e0=0.1, kappa_o0=0.1, d_el=0.0, d_ol=0.0, d_al=0.0, k1=(1.0, 1.0)),
    "II": dict(kappa_e0=1.0, kappa_o0=1.0, d_el=0.0, d_ol=0.0, d_al=0.0, k1=(1.0, 1.0)),
    "III": dict(kappa_e0=1.0, kappa_o0=1.0, d_el=0.0, d_ol=0.0, d_al=5.0, k1=(1.0, 1.0)),
    "IV": dict(kappa_e0=0.1, kappa_o0=0.1, d_el=5.0, d_ol=-5.0, d_al=0.0, k1=(1.0, 1.0)),
    "V": dict(kappa_e0=1.0, kappa_o0=1.0, d_el=0.0, d_ol=0.0, d_al=0.0, k1=(1.0, 1.0)),
    "VI": dict(kappa_e0=1.0, kappa_o0=1.0, d_el=0.0, d_ol=0.0, d_al=5.0, k1=(1.0, 1.0)),
    "VII": dict(kappa_e0=0.2, kappa_o0=0.1, d_el=5.0, d_ol=-5.0, d_al=1.0, k1=(1.0, 1 / 1.1)),
}
CASE_IDS = tuple(_CASES)

# Cases whose kappa1 is pinned to g_e; their natural sweep variable is gamma.
GAMMA_SWEEP_CASES = ("V", "VI", "VII")


def case_params(case: str, g_e_magnitude: float = G_E_DEFAULT) -> tuple[ValidatedParams, float]:
    """Parameter preset for one of the gate cases I..VII and its drive frequency.

    The drive sits at ``omega_l = 0`` and the mode/emitter offsets equal the
    case detunings. kappa1 defaults to ``g_e_magnitude`` (the operating point
    for the kappa1-swept cases, the pinned value for V-VII). The odd-mode
    coupling is ``-1j * g_e`` so the emitter couples to the driven supermode.
    """
    key = str(case).upper()
    if key not in _CASES:
        raise ParameterError("case", f"unknown case {case!r}; expected one of {', '.join(CASE_IDS)}")
    if not g_e_magnitude > 0:
        raise ParameterError("g_e_magnitude", "must be positive")
    c = _CASES[key]
    g = float(g_e_magnitude)
    params = ValidatedParams(
        omega_e=c["d_el"],
        omega_o=c["d_ol"],
        omega_a=c["d_al"],
        kappa_e0=c["kappa_e0"],
        kappa_o0=c["kappa_o0"],
        kappa_e1=g * c["k1"][0],
        kappa_o1=g * c["k1"][1],
        g_e=complex(g, 0.0),
        g_o=complex(0.0, -g),
        gamma_s=GAMMA_S_DEFAULT,
        gamma_p=GAMMA_P_DEFAULT,
    )
    return params, 0.0


def with_kappa1(params: SystemParams, kappa1: float, case: str | None = None) -> ValidatedParams:
    """Set the external decay; Case VII keeps its kappa_e1 = 1.1 kappa_o1 ratio."""
    ratio = _CASES[case.upper()]["k1"][1] if case else 1.0
    return validate(replace(params, kappa_e1=kappa1, kappa_o1=kappa1 * ratio))


def _encode(value: Any) -> Any:
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def params_to_dict(params: SystemParams) -> dict[str, Any]:
    """JSON-ready mapping; complex couplings become ``[re, im]`` pairs."""
    return {k: _encode(v) for k, v in asdict(params).items()}


def params_from_dict(data: Mapping[str, Any]) -> ValidatedParams:
    known = {f.name for f in fields(SystemParams)}
    unknown = set(data) - known
    if unknown:
        raise ParameterError(sorted(unknown)[0], "unknown parameter field")
    kwargs: dict[str, Any] = {}
    for key, value in data.items():
        if key in _COMPLEX_FIELDS:
            if isinstance(value, (list, tuple)):
                if len(value) != 2:
                    raise ParameterError(key, "complex value must be [re, im]")
                value = complex(float(value[0]), float(value[1]))
            elif isinstance(value, Mapping):
                value = complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
        if isinstance(value, bool) or not isinstance(value, (int, float, complex)):
            raise ParameterError(key, f"expected a number, got {value!r}")
        kwargs[key] = value
    return ValidatedParams(**kwargs)


def load_params(text: str) -> ValidatedParams:
    return params_from_dict(json.loads(text))
