"""Physical parameters of the moving qubit and their dimensionless form.

All frequencies are angular (rad/s). The dynamics only depend on ratios to
the Markovian decay rate ``gamma``, so every downstream routine consumes
:class:`DimensionlessParams` and measures time in units of ``1/gamma``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from .errors import ConfigError, InvalidParameterError

#: largest accepted velocity ratio v/c (non-relativistic guard)
BETA_MAX = 1e-3

#: 85Rb Rydberg microwave qubit: decay rate in 1/s
RB_GAMMA = 33.3
#: 85Rb Rydberg qubit transition frequency, 1.53 GHz, converted to rad/s
RB_OMEGA0 = 2.0 * math.pi * 1.53e9
#: omega0 / gamma for the figure parameter sets
RB_OMEGA0_OVER_GAMMA = RB_OMEGA0 / RB_GAMMA

PARAM_KEYS = ("gamma", "lambda_width", "delta", "omega0", "beta")


@dataclass(frozen=True)
class CavityQubitParams:
    """Physical inputs of the qubit/cavity model.

    Parameters
    ----------
    gamma : float
        Decay rate of the qubit in the Markovian, flat-spectrum limit (rad/s).
    lambda_width : float
        Spectral width of the Lorentzian cavity coupling (rad/s).
    delta : float
        Detuning ``omega0 - omega_n`` between qubit and cavity centre (rad/s).
    omega0 : float
        Qubit transition frequency (rad/s).
    beta : float
        Velocity ratio ``v/c``.
    """

    gamma: float = RB_GAMMA
    lambda_width: float = 0.01 * RB_GAMMA
    delta: float = 0.0
    omega0: float = RB_OMEGA0
    beta: float = 0.0

    def __post_init__(self):
        for name in PARAM_KEYS:
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be a finite real number, got {value!r}")
        if self.gamma <= 0:
            raise InvalidParameterError(f"gamma must be > 0, got {self.gamma}")
        if self.lambda_width <= 0:
            raise InvalidParameterError(f"lambda_width must be > 0, got {self.lambda_width}")
        if self.omega0 <= 0:
            raise InvalidParameterError(f"omega0 must be > 0, got {self.omega0}")
        if not 0 <= self.beta < BETA_MAX:
            raise InvalidParameterError(f"beta must lie in [0, {BETA_MAX}), got {self.beta}")

    @classmethod
    def from_ratios(cls, lambda_ratio, beta=0.0, delta_ratio=0.0,
                    omega0_ratio=RB_OMEGA0_OVER_GAMMA, gamma=RB_GAMMA):
        """Build parameters from ratios to ``gamma``."""
        return cls(gamma=gamma, lambda_width=lambda_ratio * gamma,
                   delta=delta_ratio * gamma, omega0=omega0_ratio * gamma,
                   beta=beta)

    def with_(self, **changes) -> "CavityQubitParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DimensionlessParams:
    """Reduced quantities driving the amplitude equation.

    ``lambda_bar_over_gamma`` is ``(lambda - i delta)/gamma``,
    ``theta_over_gamma`` is ``beta (lambda_bar + i omega0)/gamma`` and
    ``u_plus``/``u_minus`` are ``lambda_bar +/- theta`` in units of gamma.
    """

    y1: float
    y2: float
    y3: float
    beta: float
    lambda_bar_over_gamma: complex
    theta_over_gamma: complex
    u_plus: complex
    u_minus: complex

    @classmethod
    def from_ratios(cls, y1, y2, y3=0.0, beta=0.0) -> "DimensionlessParams":
        y1, y2, y3, beta = float(y1), float(y2), float(y3), float(beta)
        lam_bar = complex(y1, -y3)
        theta = beta * complex(y1, y2 - y3)
        u_plus = complex((1 + beta) * y1, beta * y2 - (1 + beta) * y3)
        u_minus = complex((1 - beta) * y1, -beta * y2 - (1 - beta) * y3)
        return cls(y1, y2, y3, beta, lam_bar, theta, u_plus, u_minus)


def to_dimensionless(p: CavityQubitParams) -> DimensionlessParams:
    """Convert physical parameters to ratios of the decay rate.

    The parameter invariants are enforced when ``p`` is constructed, so an
    :class:`InvalidParameterError` surfaces there.
    """
    if not isinstance(p, CavityQubitParams):
        raise InvalidParameterError(f"expected CavityQubitParams, got {type(p).__name__}")
    return DimensionlessParams.from_ratios(
        p.lambda_width / p.gamma, p.omega0 / p.gamma, p.delta / p.gamma, p.beta)


def _coerce(key, raw):
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"parameter {key!r} is not a number: {raw!r}") from None


def parse_params_text(text: str, base: CavityQubitParams | None = None) -> CavityQubitParams:
    """Parse a JSON object or flat ``key=value`` text into parameters.

    Unknown keys raise :class:`ConfigError`; missing keys keep the value of
    ``base`` (the Rb figure defaults when omitted). ``#`` starts a comment in
    the key=value form.
    """
    base = base or CavityQubitParams()
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON parameter file: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("JSON parameter file must hold an object")
    else:
        data = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            data[key] = value
    unknown = sorted(set(data) - set(PARAM_KEYS))
    if unknown:
        raise ConfigError(f"unknown parameter keys: {', '.join(unknown)}")
    values = {k: _coerce(k, v) for k, v in data.items()}
    try:
        return replace(base, **values)
    except InvalidParameterError as exc:
        raise ConfigError(str(exc)) from None


def load_params(path, base: CavityQubitParams | None = None) -> CavityQubitParams:
    """Read parameters from a config file (see :func:`parse_params_text`)."""
    return parse_params_text(Path(path).read_text(encoding="utf-8"), base)
