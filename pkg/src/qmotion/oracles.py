"""Brute-force solvers used to check the residue solution.

None of these routines touch the characteristic cubic:

* :func:`volterra_solve` integrates the integro-differential amplitude
  equation directly with product trapezoidal quadrature,
* :func:`discrete_mode_solve` integrates the Schroedinger equation of the
  qubit coupled to a finite comb of cavity modes,
* :func:`kernel_quadrature` evaluates the continuum kernel integral over the
  Lorentzian spectral density numerically,
* :func:`stationary_amplitude` is the closed form for a qubit at rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .amplitude import memory_kernel
from .errors import ConfigError, QuadratureError, RecurrenceGuardError
from .params import CavityQubitParams, DimensionlessParams, to_dimensionless

TWO_PI = 2.0 * math.pi

# alias suppression demanded of the tau-dependent interference term: the
# first discrete-grid alias must sit this many cavity lifetimes past t_max
_ALIAS_LIFETIMES = 30.0


@dataclass(frozen=True)
class Trajectory:
    """Sampled amplitude history.

    ``amplitude`` is the rotating-frame amplitude; ``lab_amplitude`` (when
    available) carries the ``exp(-i omega0 t)`` phase and ``norm`` the total
    probability of the closed qubit+modes system.
    """

    gt: np.ndarray
    amplitude: np.ndarray
    lab_amplitude: np.ndarray | None = None
    norm: np.ndarray | None = None
    derivative: np.ndarray | None = None


@dataclass(frozen=True)
class VolterraConfig:
    t_max: float = 25.0
    dt: float = 1e-3

    def __post_init__(self):
        if not (self.t_max > 0 and self.dt > 0):
            raise ConfigError("VolterraConfig needs t_max > 0 and dt > 0")
        if self.dt > 1e-2:
            raise ConfigError(f"Volterra step dt={self.dt:g} exceeds 1e-2")
        if self.t_max / self.dt > 1e7:
            raise ConfigError("Volterra grid would exceed 1e7 steps")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))


def volterra_solve(dp: DimensionlessParams, cfg: VolterraConfig, kernel=None) -> Trajectory:
    """Integrate ``dA/dt = -int_0^t K(t-t') A(t') dt'`` with ``A(0) = 1``.

    The memory integral uses the product trapezoidal rule and the outer
    derivative the trapezoidal rule, so the scheme is second order; the
    implicit diagonal term is solved in closed form at each step. Because the
    kernel depends on the lag only, it is sampled once and each step is one
    dot product against the amplitude history (O(N**2) in total).

    Parameters
    ----------
    dp : DimensionlessParams
    cfg : VolterraConfig
    kernel : callable, optional
        ``K(s)`` in units of gamma**2 for an array of scaled lags; defaults
        to :func:`qmotion.amplitude.memory_kernel`.
    """
    if not isinstance(cfg, VolterraConfig):
        raise ConfigError("cfg must be a VolterraConfig")
    n = cfg.n_steps
    h = cfg.t_max / n
    s = np.arange(n + 1) * h
    K = np.asarray(memory_kernel(dp, s) if kernel is None else kernel(s), dtype=complex)
    K_rev = np.ascontiguousarray(K[::-1])
    A = np.empty(n + 1, dtype=complex)
    A[0] = 1.0
    k0 = K[0]
    denom = 1.0 + 0.25 * h * h * k0
    memory = np.zeros(n + 1, dtype=complex)  # int_0^t K(t-t') A(t') dt'
    for m in range(1, n + 1):
        # sum_{j=1}^{m-1} K[m-j] A[j] via the reversed kernel
        history = 0.5 * K[m] * A[0] + np.dot(K_rev[n - m + 1:n], A[1:m])
        partial = h * history
        A[m] = (A[m - 1] - 0.5 * h * (memory[m - 1] + partial)) / denom
        memory[m] = partial + 0.5 * h * k0 * A[m]
    return Trajectory(gt=s, amplitude=A, derivative=-memory)


#: longest Volterra run accepted by :func:`volterra_on_grid`
MAX_FALLBACK_STEPS = 200_000


def volterra_on_grid(dp: DimensionlessParams, gt, max_step=1e-3) -> Trajectory:
    """Amplitude and its derivative on a uniform grid starting at zero.

    Used where the residue expansion is unavailable (coincident roots). The
    solver step divides the grid spacing and is at most ``max_step``.

    Raises
    ------
    ConfigError
        If the grid is not uniform from zero, or the run would exceed
        ``MAX_FALLBACK_STEPS`` steps.
    """
    gt = np.asarray(gt, dtype=float)
    if gt.size < 2 or gt[0] != 0 or not np.allclose(np.diff(gt), gt[1] - gt[0]):
        raise ConfigError("volterra_on_grid needs a uniform grid starting at 0")
    spacing = gt[1] - gt[0]
    sub = max(1, math.ceil(spacing / max_step - 1e-9))
    steps = (gt.size - 1) * sub
    if steps > MAX_FALLBACK_STEPS:
        raise ConfigError(f"Volterra fallback would need {steps} steps "
                          f"(limit {MAX_FALLBACK_STEPS})")
    traj = volterra_solve(dp, VolterraConfig(t_max=float(gt[-1]), dt=spacing / sub))
    return Trajectory(gt=gt, amplitude=traj.amplitude[::sub], derivative=traj.derivative[::sub])


def spectral_density(p: CavityQubitParams, omega):
    """Lorentzian spectral density ``J(omega)`` in rad/s."""
    omega = np.asarray(omega, dtype=float)
    lam = p.lambda_width
    out = p.gamma * lam**2 / (TWO_PI * ((p.omega0 - omega - p.delta) ** 2 + lam**2))
    return out[()] if out.ndim == 0 else out


def _lorentz_fourier(k, window):
    """``int_{-W}^{W} exp(-i k u) / (1 + u**2) du`` by adaptive quadrature."""
    weight = lambda u: 1.0 / (1.0 + u * u)  # noqa: E731
    total = 0.0j
    for lo, hi in ((-window, 0.0), (0.0, window)):
        if k == 0.0:
            parts = [(integrate.quad(weight, lo, hi, points=[0.0] if lo < 0 < hi else None,
                                     limit=500, epsabs=0.0, epsrel=1e-12, full_output=1), 1.0)]
        else:
            parts = [
                (integrate.quad(weight, lo, hi, weight="cos", wvar=k, limit=2000,
                                epsabs=0.0, epsrel=1e-12, full_output=1), 1.0),
                (integrate.quad(weight, lo, hi, weight="sin", wvar=k, limit=2000,
                                epsabs=0.0, epsrel=1e-12, full_output=1), -1.0j),
            ]
        for result, factor in parts:
            value, abserr = result[0], result[1]
            if len(result) > 3 and abserr > 1e-9 * max(1.0, abs(value)):
                raise QuadratureError(f"kernel quadrature did not converge: {result[3]}")
            total += factor * value
    return total


def kernel_quadrature(p: CavityQubitParams, t, t_prime, window=1e4) -> complex:
    """Memory kernel ``F(t, t')`` (rad^2/s^2) by numerical frequency integration.

    The mode-shape product ``sin[w(beta t - tau)] sin[w(beta t' - tau)]`` is
    expanded into ``cos(w beta (t-t'))/2`` minus a term carrying ``2 w tau``;
    the latter averages to zero in the long-cavity limit and is dropped. The
    remaining Lorentzian Fourier integrals run over ``omega_n +/- window*lambda``
    around the spectral peak.

    Raises
    ------
    QuadratureError
        If the adaptive quadrature reports non-convergence.
    """
    if not t >= t_prime >= 0:
        raise ValueError("kernel_quadrature needs t >= t' >= 0")
    if window < 1e3:
        raise ValueError("quadrature window must be at least 1e3 spectral widths")
    s = float(t - t_prime)
    lam = p.lambda_width
    omega_n = p.omega0 - p.delta
    prefactor = p.gamma * lam / TWO_PI
    total = 0.0j
    for sign in (+1.0, -1.0):
        # cos(w beta s) = sum over +/- of exp(+/- i w beta s) / 2
        phase = np.exp(1j * (sign * omega_n * p.beta * s + p.delta * s))
        k = lam * (1.0 - sign * p.beta) * s
        total += 0.25 * phase * _lorentz_fourier(k, window)
    return complex(prefactor * total)


@dataclass(frozen=True)
class ModeGrid:
    """Finite comb of cavity modes around the cavity centre frequency.

    ``window_halfwidth`` is in units of lambda; ``tau`` (mirror transit time),
    ``dt`` and ``t_max`` are scaled by gamma. Samples are returned every
    ``sample_every`` steps.
    """

    n_modes: int = 8000
    window_halfwidth: float = 40.0
    tau: float = 1e4
    dt: float = 5e-3
    t_max: float = 25.0
    sample_every: int = 10

    def spacing(self, y1: float) -> float:
        return 2.0 * self.window_halfwidth * y1 / self.n_modes

    def check(self, y1: float):
        """Raise if the grid is invalid for spectral width ``y1``."""
        if self.n_modes < 100:
            raise ConfigError(f"n_modes must be >= 100, got {self.n_modes}")
        if self.window_halfwidth < 20:
            raise ConfigError(f"window_halfwidth must be >= 20, got {self.window_halfwidth}")
        if not (self.dt > 0 and self.t_max > 0 and self.tau > 0 and self.sample_every >= 1):
            raise ConfigError("ModeGrid needs positive dt, t_max, tau and sample_every")
        spacing = self.spacing(y1)
        if spacing * self.t_max >= TWO_PI / 4:
            raise RecurrenceGuardError(
                f"mode spacing {spacing:g} too coarse for horizon {self.t_max:g}: "
                "recurrence inside a quarter period")
        # the tau term is a Lorentzian Fourier transform at time ~2 tau; on
        # a discrete comb it reappears every 2 pi / spacing
        period = TWO_PI / spacing
        offset = math.fmod(2.0 * self.tau, period)
        alias = min(offset, period - offset)
        if alias - self.t_max < _ALIAS_LIFETIMES / y1:
            raise RecurrenceGuardError(
                f"tau={self.tau:g} puts the mirror interference alias {alias:.4g} "
                f"within {_ALIAS_LIFETIMES:g}/y1 of the horizon")


def discrete_mode_solve(p: CavityQubitParams, grid: ModeGrid, coupling_scale=1.0) -> Trajectory:
    """Integrate the single-excitation Schroedinger equation on a mode comb.

    Modes sit at the midpoints of a uniform grid over
    ``omega_n +/- window_halfwidth * lambda`` with couplings
    ``sqrt(J(omega_k) d_omega)`` and mode shape
    ``sin[omega_k (beta t - tau)]``. The equations are written in the
    interaction picture (each amplitude rotates at its own frequency) and
    advanced with classical fixed-step RK4.

    ``coupling_scale`` multiplies every coupling; 0 decouples the qubit.

    Raises
    ------
    ConfigError, RecurrenceGuardError
        If the grid is invalid for these parameters.
    """
    dp = to_dimensionless(p)
    grid.check(dp.y1)
    n_steps = int(round(grid.t_max / grid.dt))
    h = grid.t_max / n_steps
    dx = grid.spacing(dp.y1)
    x = -grid.window_halfwidth * dp.y1 + (np.arange(grid.n_modes) + 0.5) * dx
    detuning = x - dp.y3  # omega_k - omega0
    omega_k = dp.y2 - dp.y3 + x
    coupling = coupling_scale * np.sqrt(dx * dp.y1**2 / (TWO_PI * (x * x + dp.y1**2)))
    # only the phase of omega_k tau modulo 2 pi matters
    tau_phase = np.mod(omega_k * grid.tau, TWO_PI)
    doppler = omega_k * dp.beta

    def rhs(t, a, b):
        g = coupling * np.sin(doppler * t - tau_phase) * np.exp(-1j * detuning * t)
        return -1j * (g * b).sum(), -1j * np.conj(g) * a

    a = 1.0 + 0.0j
    b = np.zeros(grid.n_modes, dtype=complex)
    n_out = n_steps // grid.sample_every + 1
    gt = np.empty(n_out)
    amp = np.empty(n_out, dtype=complex)
    norm = np.empty(n_out)
    gt[0], amp[0], norm[0] = 0.0, a, 1.0
    out = 1
    for step in range(1, n_steps + 1):
        t = (step - 1) * h
        ka1, kb1 = rhs(t, a, b)
        ka2, kb2 = rhs(t + h / 2, a + h / 2 * ka1, b + h / 2 * kb1)
        ka3, kb3 = rhs(t + h / 2, a + h / 2 * ka2, b + h / 2 * kb2)
        ka4, kb4 = rhs(t + h, a + h * ka3, b + h * kb3)
        a = a + h / 6 * (ka1 + 2 * ka2 + 2 * ka3 + ka4)
        b = b + h / 6 * (kb1 + 2 * kb2 + 2 * kb3 + kb4)
        if step % grid.sample_every == 0:
            gt[out] = step * h
            amp[out] = a
            norm[out] = abs(a) ** 2 + np.vdot(b, b).real
            out += 1
    gt, amp, norm = gt[:out], amp[:out], norm[:out]
    lab = amp * np.exp(-1j * dp.y2 * gt)
    return Trajectory(gt=gt, amplitude=amp, lab_amplitude=lab, norm=norm)


def stationary_amplitude(dp: DimensionlessParams, gt):
    """Closed-form amplitude and ``(1/gamma) dA/dt`` for a qubit at rest.

    At ``beta = 0`` the amplitude solves ``A'' + lambda_bar A' + (y1/4) A = 0``
    with ``A(0) = 1, A'(0) = 0``, giving
    ``exp(-lambda_bar t/2)[cosh(D t/2) + (lambda_bar/D) sinh(D t/2)]`` with
    ``D = sqrt(lambda_bar**2 - y1)``.
    """
    if dp.beta != 0:
        raise ValueError("stationary_amplitude is only valid for beta = 0")
    gt = np.asarray(gt, dtype=float)
    a = dp.lambda_bar_over_gamma / 2.0
    w = np.sqrt(complex(dp.lambda_bar_over_gamma**2 - dp.y1)) / 2.0
    if abs(w) < 1e-9:
        decay = np.exp(-a * gt)
        amp = decay * (1.0 + a * gt)
        deriv = -(dp.y1 / 4.0) * gt * decay
    else:
        grow = np.exp((w - a) * gt)
        fall = np.exp((-w - a) * gt)
        amp = 0.5 * (1.0 + a / w) * grow + 0.5 * (1.0 - a / w) * fall
        deriv = -(dp.y1 / (8.0 * w)) * (grow - fall)
    if amp.ndim == 0:
        return amp[()], deriv[()]
    return amp, deriv
