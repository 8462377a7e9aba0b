"""Analytic excited-state amplitude of the moving qubit.

The rotating-frame amplitude obeys ``dA/dt = -int_0^t F(t-t') A(t') dt'``
with the two-exponential kernel returned by :func:`memory_kernel`. Its
Laplace transform is a ratio of a quadratic and a cubic polynomial, so
``A(t)`` is a sum of three exponentials whose rates are the roots of the
characteristic cubic and whose weights are the residues at those roots.

Times are scaled, ``gt = gamma * t``; rates are in units of ``gamma``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DegenerateRootsError
from .params import DimensionlessParams

#: relative separation below which two roots count as coincident. A true
#: double root comes back split by about sqrt(eps) ~ 1.5e-8 of its size, and
#: residue cancellation loses eps/separation, so the cut sits well above both.
DEGENERACY_RTOL = 1e-6

_NEWTON_STEPS = 3


def cubic_coefficients(dp: DimensionlessParams):
    """Coefficients ``(c2, c1, c0)`` of the monic characteristic cubic.

    ``q**3 + c2 q**2 + c1 q + c0 = 0`` with ``c2 = 2 lambda_bar``,
    ``c1 = u_plus u_minus + y1/4`` and ``c0 = y1 lambda_bar / 4``.
    """
    lam_bar = dp.lambda_bar_over_gamma
    c2 = 2.0 * lam_bar
    c1 = dp.u_plus * dp.u_minus + dp.y1 / 4.0
    c0 = dp.y1 * lam_bar / 4.0
    return complex(c2), complex(c1), complex(c0)


@dataclass(frozen=True)
class CubicRoots:
    """Roots of the characteristic cubic, sorted by real then imaginary part."""

    q1: complex
    q2: complex
    q3: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.q1, self.q2, self.q3], dtype=complex)

    def min_separation(self) -> float:
        q = self.as_array()
        return min(abs(a - b) for a, b in combinations(q, 2))


def _polish(q, c2, c1, c0):
    # Newton steps on the original cubic; eigenvalues alone lose relative
    # accuracy on roots much smaller than the largest one.
    for _ in range(_NEWTON_STEPS):
        p = ((q + c2) * q + c1) * q + c0
        dp = (3.0 * q + 2.0 * c2) * q + c1
        if dp == 0:
            break
        step = p / dp
        q_new = q - step
        p_new = ((q_new + c2) * q_new + c1) * q_new + c0
        if abs(p_new) >= abs(p):
            break
        q = q_new
    return q


def solve_cubic(c2, c1, c0) -> CubicRoots:
    """Roots of ``q**3 + c2 q**2 + c1 q + c0``.

    Companion-matrix eigenvalues followed by Newton polishing of each root.

    Raises
    ------
    DegenerateRootsError
        If two roots are closer than ``DEGENERACY_RTOL * max|q|``.
    ValueError
        If a coefficient is not finite.
    """
    coeffs = np.array([c2, c1, c0], dtype=complex)
    if not np.all(np.isfinite(coeffs)):
        raise ValueError(f"cubic coefficients must be finite, got {coeffs}")
    companion = np.zeros((3, 3), dtype=complex)
    companion[0, :] = -coeffs
    companion[1, 0] = companion[2, 1] = 1.0
    raw = np.linalg.eigvals(companion)
    polished = np.array([_polish(complex(q), *coeffs) for q in raw])
    order = np.lexsort((polished.imag, polished.real))
    roots = CubicRoots(*(complex(polished[i]) for i in order))
    scale = float(np.max(np.abs(polished)))
    if roots.min_separation() <= DEGENERACY_RTOL * scale:
        raise DegenerateRootsError(
            f"characteristic roots coincide within {DEGENERACY_RTOL:g} relative: {roots}",
            roots=roots)
    return roots


@dataclass(frozen=True)
class AmplitudeSolution:
    """Residue expansion ``A(gt) = sum_i r_i exp(q_i gt)``."""

    roots: CubicRoots
    r1: complex
    r2: complex
    r3: complex
    dp: DimensionlessParams

    @property
    def rates(self) -> np.ndarray:
        return self.roots.as_array()

    @property
    def residues(self) -> np.ndarray:
        return np.array([self.r1, self.r2, self.r3], dtype=complex)

    def envelope(self, gt):
        """Upper bound ``sum_i |r_i| exp(Re q_i gt)`` on ``|A(gt)|``."""
        gt = np.asarray(gt, dtype=float)
        bound = np.exp(np.multiply.outer(gt, self.rates.real)) @ np.abs(self.residues)
        return bound[()] if bound.ndim == 0 else bound


def amplitude_solution(dp: DimensionlessParams) -> AmplitudeSolution:
    """Solve the characteristic cubic and form the three residue weights.

    Raises
    ------
    DegenerateRootsError
        Propagated from :func:`solve_cubic`.
    """
    roots = solve_cubic(*cubic_coefficients(dp))
    q1, q2, q3 = roots.q1, roots.q2, roots.q3
    up, um = dp.u_plus, dp.u_minus
    r1 = (q1 + up) * (q1 + um) / ((q1 - q2) * (q1 - q3))
    r2 = -(q2 + up) * (q2 + um) / ((q1 - q2) * (q2 - q3))
    r3 = (q3 + up) * (q3 + um) / ((q1 - q3) * (q2 - q3))
    return AmplitudeSolution(roots, complex(r1), complex(r2), complex(r3), dp)


def _expand(sol: AmplitudeSolution, gt, weights):
    gt = np.asarray(gt, dtype=float)
    out = np.exp(np.multiply.outer(gt, sol.rates)) @ weights
    return out[()] if out.ndim == 0 else out


def amplitude_at(sol: AmplitudeSolution, gt):
    """Rotating-frame amplitude at scaled time(s) ``gt``."""
    return _expand(sol, gt, sol.residues)


def amplitude_derivative_at(sol: AmplitudeSolution, gt):
    """``(1/gamma) dA/dt`` at scaled time(s) ``gt``."""
    return _expand(sol, gt, sol.residues * sol.rates)


def memory_kernel(dp: DimensionlessParams, s):
    """Continuum memory kernel ``F/gamma**2`` at scaled lag ``s >= 0``.

    Equal to ``(y1/4) cosh(theta s) exp(-lambda_bar s)``, evaluated as
    ``(y1/8)[exp(-u_minus s) + exp(-u_plus s)]`` so large lags cannot
    overflow the cosh.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("memory kernel lag must be non-negative")
    out = (dp.y1 / 8.0) * (np.exp(-dp.u_minus * s) + np.exp(-dp.u_plus * s))
    return out[()] if out.ndim == 0 else out
