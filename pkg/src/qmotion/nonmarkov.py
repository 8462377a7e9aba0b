"""Trace-distance dynamics and the BLP non-Markovianity measure.

For an antipodal pair of pure initial states with Bloch vectors
``+/-(sin t cos p, sin t sin p, cos t)`` the amplitude-damping map gives

    D(t) = sqrt(cos(t)**2 x**2 + sin(t)**2 x),   x = |A(t)|**2,

so ``dD/dt`` has the sign of ``dx/dt`` for every pair. Revival intervals are
therefore located once from ``dx/dt = 2 Re[conj(A) A']`` and the measure is
the telescoped sum of ``D(end) - D(start)`` over them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .amplitude import amplitude_at, amplitude_derivative_at, amplitude_solution
from .errors import DegenerateRootsError, HorizonWarning, QMotionError, ScanResolutionWarning
from .oracles import volterra_on_grid
from .params import CavityQubitParams, to_dimensionless

DEFAULT_HORIZON = 100.0
#: hard cap on automatic horizons (scaled time)
MAX_HORIZON = 5e4
DEFAULT_SCAN_STEP = 1e-3
#: bisection resolution of interval endpoints (scaled time)
ENDPOINT_RESOLUTION = 1e-8
#: |A| envelope below which the tail is negligible (|A|**2 < 1e-6)
TAIL_AMPLITUDE = 1e-3

_CHUNK = 1 << 17


@dataclass(frozen=True)
class StatePair:
    """Antipodal pure states with polar angle ``theta`` and azimuth ``phi``."""

    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi / 2 + 1e-15:
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta}")

    def states(self):
        """The two initial density matrices as 2x2 arrays."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        off = 0.5 * s * complex(math.cos(self.phi), -math.sin(self.phi))
        rho1 = np.array([[0.5 * (1 + c), off], [np.conj(off), 0.5 * (1 - c)]])
        rho2 = np.array([[0.5 * (1 - c), -off], [-np.conj(off), 0.5 * (1 + c)]])
        return rho1, rho2


@dataclass(frozen=True)
class NonMarkovResult:
    n_measure: float
    intervals: tuple = ()
    theta_opt: float = 0.0
    horizon: float = DEFAULT_HORIZON
    warnings: tuple = field(default=())


def trace_distance(rho1, rho2) -> float:
    """Half the trace norm of ``rho1 - rho2`` for arbitrary density matrices."""
    diff = np.asarray(rho1, dtype=complex) - np.asarray(rho2, dtype=complex)
    return 0.5 * float(np.abs(np.linalg.eigvalsh(diff)).sum())


def _distance_from_population(x, theta):
    c2, s2 = math.cos(theta) ** 2, math.sin(theta) ** 2
    return np.sqrt(c2 * x * x + s2 * x)


def trace_distance_at(sol, pair: StatePair, gt):
    """Trace distance of the evolved pair at scaled time(s) ``gt``."""
    x = np.abs(amplitude_at(sol, gt)) ** 2
    return _distance_from_population(x, pair.theta)


def population_slope(sol, gt):
    """``d|A|**2/d(gt)`` from the analytic derivative."""
    return 2.0 * np.real(np.conj(amplitude_at(sol, gt)) * amplitude_derivative_at(sol, gt))


def trace_distance_rate(sol, pair: StatePair, gt):
    """``sigma = dD/d(gt)`` by the chain rule through ``x = |A|**2``."""
    x = np.abs(amplitude_at(sol, gt)) ** 2
    dx = population_slope(sol, gt)
    c2, s2 = math.cos(pair.theta) ** 2, math.sin(pair.theta) ** 2
    D = np.sqrt(c2 * x * x + s2 * x)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(D > 0, (2 * c2 * x + s2) * dx / (2 * np.where(D > 0, D, 1.0)), 0.0)
    return out[()] if np.ndim(out) == 0 else out


def auto_horizon(sol, floor=DEFAULT_HORIZON, cap=MAX_HORIZON):
    """Scaled horizon after which revivals are absent or negligible.

    The horizon is the earlier of two times, but never below ``floor``:
    the time where the amplitude envelope ``sum |r_i| exp(Re q_i t)`` falls
    below ``TAIL_AMPLITUDE``, and the time after which the slowest exponential
    provably dominates ``d|A|**2/dt`` so ``|A|`` is monotone from then on.
    Returns ``(horizon, warning_or_None)``; the warning is set when ``cap``
    binds.
    """
    q, r = sol.rates, np.abs(sol.residues)
    t_tail = math.inf
    if np.all(q.real < 0):
        f = lambda t: float(sol.envelope(t)) - TAIL_AMPLITUDE  # noqa: E731
        hi = floor
        while f(hi) > 0 and hi < 64 * cap:
            hi *= 2
        t_tail = hi if f(hi) > 0 else (brentq(f, 0.0, hi, xtol=1e-6) if f(0.0) > 0 else 0.0)

    t_mono = math.inf
    order = np.argsort(q.real)
    s = order[-1]
    gap = q.real[s] - q.real[order[-2]]
    if q.real[s] < 0 and gap > 1e-12 * abs(q[s]):
        lead = 2.0 * abs(q.real[s]) * r[s] ** 2
        pairs = [(i, j) for i in range(3) for j in range(3) if (i, j) != (s, s)]
        weights = np.array([r[i] * r[j] * abs(q[i] + np.conj(q[j])) for i, j in pairs])
        rates = np.array([q.real[i] + q.real[j] - 2 * q.real[s] for i, j in pairs])
        g = lambda t: float(weights @ np.exp(rates * t)) - lead  # noqa: E731
        hi = floor
        while g(hi) >= 0 and hi < 64 * cap:
            hi *= 2
        if g(hi) < 0:
            t_mono = brentq(g, 0.0, hi, xtol=1e-6) if g(0.0) >= 0 else 0.0

    horizon = max(floor, min(t_tail, t_mono))
    if horizon > cap:
        return cap, (f"horizon capped at gt={cap:g}; revivals may continue "
                     f"(tail time {t_tail:.4g}, monotone time {t_mono:.4g})")
    return horizon, None


def _scan_extrema(sol, gt_max, dt_scan):
    """Brackets of sign changes of d|A|^2/dt on a uniform scan grid."""
    n = max(1, int(math.ceil(gt_max / dt_scan)))
    h = gt_max / n
    q, r = sol.rates, sol.residues
    rq = r * q
    base = np.exp(np.outer(np.arange(_CHUNK) * h, q))
    ups, downs = [], []
    prev_pos = False  # sigma(0) = 0: the scan starts non-increasing
    for start in range(0, n + 1, _CHUNK):
        m = min(_CHUNK, n + 1 - start)
        E = base[:m] * np.exp(q * (start * h))
        A = E @ r
        dA = E @ rq
        pos = 2.0 * np.real(np.conj(A) * dA) > 0
        if start == 0:
            pos[0] = False
        flags = np.concatenate(([prev_pos], pos))
        change = np.nonzero(flags[1:] != flags[:-1])[0]  # sample start+k-1 -> start+k
        idx = start + change
        rising = pos[change]
        ups.append(idx[rising])
        downs.append(idx[~rising])
        prev_pos = bool(pos[-1])
    ups = np.concatenate(ups)
    downs = np.concatenate(downs)
    return h, ups, downs


def _refine(sol, idx, h):
    """Bisect each bracket ``[(i-1)h, ih]`` to the endpoint resolution."""
    lo = (idx - 1) * h
    hi = idx * h
    if lo.size == 0:
        return lo
    s_lo = population_slope(sol, lo) > 0
    while np.max(hi - lo) > ENDPOINT_RESOLUTION:
        mid = 0.5 * (lo + hi)
        s_mid = population_slope(sol, mid) > 0
        same = s_mid == s_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def revival_times(sol, gt_max, dt_scan=DEFAULT_SCAN_STEP):
    """Start/end times of all maximal intervals where ``|A|`` increases.

    Returns ``(starts, ends, messages)``. An interval still open at
    ``gt_max`` ends there.
    """
    if not 0 < dt_scan <= 1e-2:
        raise ValueError(f"dt_scan must lie in (0, 1e-2], got {dt_scan}")
    if gt_max <= 0:
        raise ValueError("gt_max must be positive")
    h, ups, downs = _scan_extrema(sol, gt_max, dt_scan)
    starts = _refine(sol, ups, h)
    ends = _refine(sol, downs, h)
    if ends.size < starts.size:
        ends = np.append(ends, gt_max)
    messages = []
    extrema = np.sort(np.concatenate([starts, ends[ends < gt_max]]))
    if extrema.size > 1 and np.min(np.diff(extrema)) < 4 * dt_scan:
        msg = (f"adjacent extrema {np.min(np.diff(extrema)):.3g} apart, "
               f"closer than 4*dt_scan={4 * dt_scan:g}")
        warnings.warn(msg, ScanResolutionWarning, stacklevel=3)
        messages.append(msg)
    return starts, ends, messages


def _intervals_for(sol, theta, starts, ends):
    x_s = np.abs(amplitude_at(sol, starts)) ** 2
    x_e = np.abs(amplitude_at(sol, ends)) ** 2
    d_s = _distance_from_population(x_s, theta)
    d_e = _distance_from_population(x_e, theta)
    return tuple((float(a), float(b), float(c), float(d))
                 for a, b, c, d in zip(starts, ends, d_s, d_e) if d > c)


def detect_revivals(sol, pair: StatePair, gt_max, dt_scan=DEFAULT_SCAN_STEP):
    """Maximal intervals where the pair's trace distance grows.

    Each entry is ``(gt_start, gt_end, D_start, D_end)``; endpoints are
    refined by bisection to ``ENDPOINT_RESOLUTION``.
    """
    starts, ends, _ = revival_times(sol, gt_max, dt_scan)
    return list(_intervals_for(sol, pair.theta, starts, ends))


def _resolve_horizon(sol, gt_max):
    if gt_max is None:
        return auto_horizon(sol)
    gt_max = float(gt_max)
    tail_ok = abs(amplitude_at(sol, gt_max)) ** 2 < TAIL_AMPLITUDE**2
    if not tail_ok and gt_max < DEFAULT_HORIZON:
        return gt_max, (f"horizon gt={gt_max:g} is shorter than {DEFAULT_HORIZON:g} "
                        "and the amplitude tail is not negligible")
    return gt_max, None


def blp_measure(sol, pair: StatePair = StatePair(), gt_max=None,
                dt_scan=DEFAULT_SCAN_STEP) -> NonMarkovResult:
    """BLP measure for one antipodal pair.

    ``gt_max=None`` selects the horizon with :func:`auto_horizon`. The sum is
    telescoped exactly over the revival intervals, no quadrature of sigma.
    """
    horizon, note = _resolve_horizon(sol, gt_max)
    messages = [note] if note else []
    if note:
        warnings.warn(note, HorizonWarning, stacklevel=2)
    starts, ends, scan_msgs = revival_times(sol, horizon, dt_scan)
    intervals = _intervals_for(sol, pair.theta, starts, ends)
    total = float(sum(d_e - d_s for _, _, d_s, d_e in intervals))
    return NonMarkovResult(total, intervals, pair.theta, horizon, tuple(messages + scan_msgs))


def _golden_max(f, a, b, tol):
    invphi = (math.sqrt(5) - 1) / 2
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def maximize_over_pairs(sol, gt_max=None, n_theta=64, dt_scan=DEFAULT_SCAN_STEP) -> NonMarkovResult:
    """Maximise the BLP measure over antipodal pairs.

    The measure is evaluated on ``n_theta`` polar angles in ``[0, pi/2]`` and
    the best one is refined by golden-section search to 1e-6. The azimuth is
    irrelevant (the distance only sees ``|rho_ab|``).
    """
    if n_theta < 32:
        raise ValueError("n_theta must be at least 32")
    horizon, note = _resolve_horizon(sol, gt_max)
    messages = [note] if note else []
    if note:
        warnings.warn(note, HorizonWarning, stacklevel=2)
    starts, ends, scan_msgs = revival_times(sol, horizon, dt_scan)
    x_s = np.abs(amplitude_at(sol, starts)) ** 2
    x_e = np.abs(amplitude_at(sol, ends)) ** 2

    def measure(theta):
        gain = _distance_from_population(x_e, theta) - _distance_from_population(x_s, theta)
        return float(gain[gain > 0].sum())

    grid = np.linspace(0.0, math.pi / 2, n_theta)
    values = np.array([measure(t) for t in grid])
    k = int(np.argmax(values))
    best_theta, best = float(grid[k]), float(values[k])
    if best > 0:
        a, b = grid[max(k - 1, 0)], grid[min(k + 1, n_theta - 1)]
        theta, value = _golden_max(measure, a, b, 1e-6)
        if value > best:
            best_theta, best = float(theta), value
    intervals = _intervals_for(sol, best_theta, starts, ends)
    return NonMarkovResult(best, intervals, best_theta, horizon, tuple(messages + scan_msgs))


@dataclass(frozen=True)
class SweepRow:
    beta: float
    lambda_ratio: float
    n_measure: float
    n_max: float
    theta_opt: float
    horizon: float
    error: str | None = None


#: Volterra step used for sweep points with coincident roots
FALLBACK_STEP = 2e-3


def blp_measure_sampled(x, theta) -> float:
    """Sum of the positive increments of ``D`` along sampled ``x = |A|**2``.

    The telescoped measure restricted to a sampling grid; exact when every
    monotone stretch of ``x`` starts and ends on a sample.
    """
    d = np.diff(_distance_from_population(np.asarray(x, dtype=float), theta))
    return float(d[d > 0].sum())


def _fallback_point(p, pair, gt_max, maximize):
    """Sweep row for coincident roots, sampled from the Volterra solver."""
    horizon = DEFAULT_HORIZON if gt_max is None else float(gt_max)
    n = int(math.ceil(horizon / FALLBACK_STEP))
    traj = volterra_on_grid(to_dimensionless(p), np.linspace(0.0, horizon, n + 1),
                            max_step=FALLBACK_STEP)
    x = np.abs(traj.amplitude) ** 2
    n_pair = blp_measure_sampled(x, pair.theta)
    best, theta_opt = n_pair, pair.theta
    if maximize:
        grid = np.linspace(0.0, math.pi / 2, 64)
        values = [blp_measure_sampled(x, t) for t in grid]
        k = int(np.argmax(values))
        best, theta_opt = max(values[k], n_pair), float(grid[k])
    return SweepRow(p.beta, p.lambda_width / p.gamma, n_pair, best, theta_opt, horizon,
                    "coincident characteristic roots; sampled Volterra solution used")


def _sweep_point(p: CavityQubitParams, pair, gt_max, maximize, dt_scan):
    lam_ratio = p.lambda_width / p.gamma
    try:
        try:
            sol = amplitude_solution(to_dimensionless(p))
        except DegenerateRootsError:
            return _fallback_point(p, pair, gt_max, maximize)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", (HorizonWarning, ScanResolutionWarning))
            res = blp_measure(sol, pair, gt_max, dt_scan)
            best = maximize_over_pairs(sol, gt_max, dt_scan=dt_scan) if maximize else res
    except (QMotionError, ValueError) as exc:
        return SweepRow(p.beta, lam_ratio, math.nan, math.nan, math.nan, math.nan,
                        f"{type(exc).__name__}: {exc}")
    note = "; ".join(res.warnings) or None
    return SweepRow(p.beta, lam_ratio, res.n_measure, best.n_measure, best.theta_opt,
                    res.horizon, note)


def sweep_beta(p_base: CavityQubitParams, beta_grid: Sequence[float], gt_max=None,
               pair: StatePair = StatePair(), maximize=True,
               dt_scan=DEFAULT_SCAN_STEP) -> list[SweepRow]:
    """Non-Markovianity against velocity at fixed cavity parameters.

    Rows follow the input order. A failing point (for instance degenerate
    roots) is recorded with NaN values and its error message.
    """
    beta_grid = [float(b) for b in beta_grid]
    if any(b2 < b1 for b1, b2 in zip(beta_grid, beta_grid[1:])):
        raise ValueError("beta grid must be sorted ascending")
    rows = []
    for beta in beta_grid:
        try:
            p = p_base.with_(beta=beta)
        except QMotionError as exc:
            rows.append(SweepRow(beta, p_base.lambda_width / p_base.gamma, math.nan,
                                 math.nan, math.nan, math.nan, str(exc)))
            continue
        rows.append(_sweep_point(p, pair, gt_max, maximize, dt_scan))
    return rows


@dataclass(frozen=True)
class LambdaSweep:
    rows: list
    #: beta -> largest lambda/gamma with N above threshold (None if never)
    thresholds: dict


def sweep_lambda(p_base: CavityQubitParams, lambda_grid: Sequence[float],
                 beta_values: Sequence[float], gt_max=None,
                 pair: StatePair = StatePair(), threshold=1e-3, maximize=False,
                 dt_scan=DEFAULT_SCAN_STEP) -> LambdaSweep:
    """Non-Markovianity against ``lambda/gamma`` for several velocities.

    For each velocity, the largest grid ratio with ``N > threshold`` is
    refined by root finding against the next grid point, giving the
    crossing ratio where the measure drops below ``threshold``.
    """
    lambda_grid = [float(x) for x in lambda_grid]
    if any(x <= 0 for x in lambda_grid) or any(
            b <= a for a, b in zip(lambda_grid, lambda_grid[1:])):
        raise ValueError("lambda grid must be positive and strictly increasing")
    rows, thresholds = [], {}
    for beta in beta_values:
        beta = float(beta)
        measures = []
        for ratio in lambda_grid:
            p = p_base.with_(lambda_width=ratio * p_base.gamma, beta=beta)
            row = _sweep_point(p, pair, gt_max, maximize, dt_scan)
            rows.append(row)
            measures.append(row.n_measure)
        above = [i for i, n in enumerate(measures) if n > threshold]
        if not above:
            thresholds[beta] = None
            continue
        i = above[-1]
        if i + 1 == len(lambda_grid) or math.isnan(measures[i + 1]):
            thresholds[beta] = lambda_grid[i]
            continue

        def excess(ratio, beta=beta):
            p = p_base.with_(lambda_width=ratio * p_base.gamma, beta=beta)
            n = _sweep_point(p, pair, gt_max, False, dt_scan).n_measure
            return (n if not math.isnan(n) else 0.0) - threshold

        thresholds[beta] = brentq(excess, lambda_grid[i], lambda_grid[i + 1], xtol=1e-10)
    return LambdaSweep(rows, thresholds)


def _positive_trapezoid(sol, pair, t0, t1, n):
    t = np.linspace(t0, t1, n + 1)
    return np.trapezoid(np.maximum(trace_distance_rate(sol, pair, t), 0.0), t, axis=-1)


def blp_measure_quadrature(sol, pair: StatePair, gt_max, dt=1e-3, refine=4096):
    """Trapezoidal integral of ``max(sigma, 0)`` over ``[0, gt_max]``.

    An independent check on :func:`blp_measure`; it samples the analytic
    rate on a uniform grid and never looks for interval endpoints. Cells
    whose end samples differ in sign hold the kinks of ``max(sigma, 0)``
    (and, where the amplitude passes through zero, a jump of ``sigma``),
    so those cells are re-integrated on ``refine`` sub-steps.
    """
    n = max(1, int(math.ceil(gt_max / dt)))
    h = gt_max / n
    total = 0.0
    for start in range(0, n + 1, _CHUNK):
        # overlap one sample so the cell between chunks is counted once
        t = np.arange(max(start - 1, 0), min(start + _CHUNK, n + 1)) * h
        sigma = trace_distance_rate(sol, pair, t)
        pos = np.maximum(sigma, 0.0)
        cells = 0.5 * h * (pos[1:] + pos[:-1])
        flip = np.flatnonzero(np.sign(sigma[1:]) != np.sign(sigma[:-1]))
        if flip.size:
            cells[flip] = [_positive_trapezoid(sol, pair, t[k], t[k + 1], refine) for k in flip]
        total += float(cells.sum())
    return float(total)
