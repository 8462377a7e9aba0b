"""Qubit observables derived from the amplitude solution.

The reduced dynamics is an amplitude-damping map: the excited population is
scaled by ``|A|**2`` and the coherence by ``A``, where the lab-frame amplitude
``A = A_rot exp(-i omega0 t)``. The exact master equation has a
time-dependent Lamb shift ``Omega`` and decay rate ``Gamma`` given by the
imaginary and real parts of ``-2 dA/dt / A``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .amplitude import AmplitudeSolution, amplitude_at, amplitude_derivative_at
from .errors import AmplitudeZeroError, InvalidParameterError

#: |A| below which the log-derivative rates are reported as singular
AMPLITUDE_FLOOR = 1e-12

_STATE_TOL = 1e-9

SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
EXCITED_PROJECTOR = SIGMA_PLUS @ SIGMA_MINUS


@dataclass(frozen=True)
class QubitState:
    """Qubit density matrix in the ``{|a>, |b>}`` basis.

    Only the excited population and the ``a-b`` coherence are stored; the
    rest follows from hermiticity and unit trace.
    """

    rho_aa: float
    rho_ab: complex

    def __post_init__(self):
        if not -_STATE_TOL <= self.rho_aa <= 1 + _STATE_TOL:
            raise InvalidParameterError(f"population {self.rho_aa} outside [0, 1]")
        if abs(self.rho_ab) ** 2 > self.rho_aa * (1 - self.rho_aa) + _STATE_TOL:
            raise InvalidParameterError("coherence violates positivity")

    @classmethod
    def from_amplitudes(cls, alpha, beta) -> "QubitState":
        """Pure state ``alpha|a> + beta|b>`` (normalised on the way in)."""
        norm = np.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        alpha, beta = alpha / norm, beta / norm
        return cls(float(abs(alpha) ** 2), complex(alpha * np.conj(beta)))

    @classmethod
    def from_matrix(cls, rho) -> "QubitState":
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (2, 2) or not np.allclose(rho, rho.conj().T, atol=_STATE_TOL):
            raise InvalidParameterError("density matrix must be a 2x2 Hermitian array")
        if abs(np.trace(rho) - 1) > _STATE_TOL:
            raise InvalidParameterError("density matrix must have unit trace")
        return cls(float(rho[0, 0].real), complex(rho[0, 1]))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.rho_aa, self.rho_ab],
                         [np.conj(self.rho_ab), 1 - self.rho_aa]], dtype=complex)


def lab_amplitude(sol: AmplitudeSolution, gt):
    """Lab-frame amplitude ``A_rot(gt) exp(-i y2 gt)``."""
    gt = np.asarray(gt, dtype=float)
    return amplitude_at(sol, gt) * np.exp(-1j * sol.dp.y2 * gt)


def evolve_state(rho0: QubitState, sol: AmplitudeSolution, gt: float) -> QubitState:
    """Apply the amplitude-damping map at scaled time ``gt``."""
    A = complex(lab_amplitude(sol, gt))
    pop = rho0.rho_aa * abs(A) ** 2
    # rounding can push |A| a hair above one
    pop = min(max(pop, 0.0), 1.0)
    return QubitState(pop, rho0.rho_ab * A)


def coherence(state: QubitState) -> float:
    """l1-norm of coherence, the sum of both off-diagonal magnitudes."""
    return 2.0 * abs(state.rho_ab)


def coherence_series(sol: AmplitudeSolution, gt, rho0: QubitState | None = None):
    """``C(gt)`` for many times; defaults to the balanced superposition."""
    rho_ab = 0.5 if rho0 is None else rho0.rho_ab
    return 2.0 * abs(rho_ab) * np.abs(amplitude_at(sol, gt))


def _log_derivative(sol, gt):
    A = amplitude_at(sol, gt)
    if np.any(np.abs(A) <= AMPLITUDE_FLOOR):
        raise AmplitudeZeroError(f"|A| <= {AMPLITUDE_FLOOR:g}: rates diverge at gt={gt}")
    return amplitude_derivative_at(sol, gt) / A


def decay_rate(sol: AmplitudeSolution, gt):
    """``Gamma/gamma = -2 Re[A'/A]`` (the omega0 phase drops out).

    Raises
    ------
    AmplitudeZeroError
        Where ``|A| <= AMPLITUDE_FLOOR``.
    """
    return -2.0 * np.real(_log_derivative(sol, gt))


def lamb_shift(sol: AmplitudeSolution, gt):
    """``Omega/gamma = 2 y2 - 2 Im[A_rot'/A_rot]``.

    Raises
    ------
    AmplitudeZeroError
        Where ``|A| <= AMPLITUDE_FLOOR``.
    """
    return 2.0 * sol.dp.y2 - 2.0 * np.imag(_log_derivative(sol, gt))


@dataclass(frozen=True)
class RateSeries:
    """Rates on a time grid; singular samples are NaN and flagged."""

    gt: np.ndarray
    gamma_over_gamma: np.ndarray
    omega_over_gamma: np.ndarray
    singular: np.ndarray


def rates_from_samples(gt, A, dA, y2) -> RateSeries:
    """Rates from sampled rotating-frame amplitude and derivative."""
    A = np.asarray(A, dtype=complex)
    singular = np.abs(A) <= AMPLITUDE_FLOOR
    ratio = np.where(singular, complex(np.nan, np.nan), np.asarray(dA) / np.where(singular, 1.0, A))
    return RateSeries(np.asarray(gt, dtype=float), -2.0 * ratio.real,
                      2.0 * y2 - 2.0 * ratio.imag, singular)


def rate_series(sol: AmplitudeSolution, gt) -> RateSeries:
    """Decay rate and Lamb shift on a grid, tagging zeros of the amplitude."""
    gt = np.asarray(gt, dtype=float)
    return rates_from_samples(gt, amplitude_at(sol, gt), amplitude_derivative_at(sol, gt),
                              sol.dp.y2)


def master_equation_rhs(rho, omega_over_gamma, gamma_over_gamma):
    """Right-hand side of the time-local master equation (units of gamma)."""
    P = EXCITED_PROJECTOR
    unitary = -0.5j * omega_over_gamma * (P @ rho - rho @ P)
    dissipator = 0.5 * gamma_over_gamma * (
        2 * SIGMA_MINUS @ rho @ SIGMA_PLUS - P @ rho - rho @ P)
    return unitary + dissipator


def master_equation_residual(sol: AmplitudeSolution, rho0: QubitState, gt: float) -> float:
    """Max-entry mismatch between ``d rho/dt`` and the master-equation RHS.

    The derivative of the evolved state is taken analytically. Both sides are
    compared in the frame co-rotating at ``omega0``: there the free precession
    cancels exactly, which keeps rounding from the huge ``omega0/gamma`` out
    of the residual. The frame change is unitary, so the norm is unchanged.

    Raises
    ------
    AmplitudeZeroError
        Where ``|A| <= AMPLITUDE_FLOOR``.
    """
    A = complex(amplitude_at(sol, gt))
    dA = complex(amplitude_derivative_at(sol, gt))
    if abs(A) <= AMPLITUDE_FLOOR:
        raise AmplitudeZeroError(f"|A| <= {AMPLITUDE_FLOOR:g} at gt={gt}")
    rho_aa = rho0.rho_aa * abs(A) ** 2
    rho_ab = rho0.rho_ab * A
    rho = np.array([[rho_aa, rho_ab], [np.conj(rho_ab), 1 - rho_aa]], dtype=complex)
    d_aa = rho0.rho_aa * 2.0 * (np.conj(A) * dA).real
    d_ab = rho0.rho_ab * dA
    rho_dot = np.array([[d_aa, d_ab], [np.conj(d_ab), -d_aa]], dtype=complex)
    log_d = dA / A
    shift_rot = -2.0 * log_d.imag  # Omega - 2 omega0
    rate = -2.0 * log_d.real
    return float(np.max(np.abs(rho_dot - master_equation_rhs(rho, shift_rot, rate))))
