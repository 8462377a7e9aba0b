"""Oracle comparisons behind ``qmotion validate``.

Every comparison returns a plain dict so the report serialises to JSON
directly. Failures are reported, never raised.
"""

from __future__ import annotations

import numpy as np

from .amplitude import amplitude_at, amplitude_solution, memory_kernel
from .errors import QMotionError
from .oracles import (ModeGrid, VolterraConfig, discrete_mode_solve, kernel_quadrature,
                      stationary_amplitude, volterra_solve)
from .params import CavityQubitParams, DimensionlessParams, to_dimensionless

VOLTERRA_TOL = 1e-5
DISCRETE_MODE_TOL = 2e-2
NORM_TOL = 1e-8
KERNEL_RTOL = 1e-3
CLOSED_FORM_TOL = 1e-8

#: omega0/gamma used by the Volterra cross-check
VOLTERRA_Y2 = 4.595e7
VOLTERRA_LAMBDAS = (0.01, 0.1, 3.0)
VOLTERRA_BETAS = tuple(b * 1e-9 for b in (0.0, 0.05, 0.1, 0.3, 0.5, 1.0))

CHECKS = ("closed-form", "volterra", "discrete-mode", "kernel")


def _summary(name, tolerance, cases, error=None):
    finite = [c["max_error"] for c in cases if c["max_error"] is not None]
    worst = max(finite) if finite else None
    passed = error is None and all(c["passed"] for c in cases)
    out = {"name": name, "tolerance": tolerance, "max_error": worst,
           "passed": passed, "cases": cases}
    if error:
        out["error"] = error
    return out


def check_closed_form(t_max=50.0, dt=1e-2):
    cases = []
    gt = np.linspace(0.0, t_max, int(round(t_max / dt)) + 1)
    for y1 in VOLTERRA_LAMBDAS:
        for y3 in (0.0, 0.5):
            dp = DimensionlessParams.from_ratios(y1, VOLTERRA_Y2, y3, 0.0)
            exact, _ = stationary_amplitude(dp, gt)
            err = float(np.max(np.abs(amplitude_at(amplitude_solution(dp), gt) - exact)))
            cases.append({"lambda_ratio": y1, "delta_ratio": y3, "max_error": err,
                          "passed": err < CLOSED_FORM_TOL})
    return _summary("closed-form", CLOSED_FORM_TOL, cases)


def check_volterra(dt=1e-3, t_max=25.0, lambdas=VOLTERRA_LAMBDAS, betas=VOLTERRA_BETAS,
                   y2=VOLTERRA_Y2):
    try:
        cfg = VolterraConfig(t_max=t_max, dt=dt)
    except QMotionError as exc:
        return _summary("volterra", VOLTERRA_TOL, [], error=str(exc))
    cases = []
    for y1 in lambdas:
        for beta in betas:
            dp = DimensionlessParams.from_ratios(y1, y2, 0.0, beta)
            traj = volterra_solve(dp, cfg)
            err = float(np.max(np.abs(traj.amplitude - amplitude_at(amplitude_solution(dp), traj.gt))))
            cases.append({"lambda_ratio": y1, "beta": beta, "max_error": err,
                          "passed": err < VOLTERRA_TOL})
    return _summary("volterra", VOLTERRA_TOL, cases)


def check_discrete_mode(grid: ModeGrid | None = None, lambda_ratio=0.1, betas=(0.0, 1e-9)):
    grid = grid or ModeGrid()
    cases = []
    for beta in betas:
        p = CavityQubitParams.from_ratios(lambda_ratio, beta=beta)
        try:
            traj = discrete_mode_solve(p, grid)
        except QMotionError as exc:
            return _summary("discrete-mode", DISCRETE_MODE_TOL, cases, error=str(exc))
        exact = np.abs(amplitude_at(amplitude_solution(to_dimensionless(p)), traj.gt))
        err = float(np.max(np.abs(np.abs(traj.lab_amplitude) - exact)))
        drift = float(np.max(np.abs(traj.norm - 1.0)))
        cases.append({"lambda_ratio": lambda_ratio, "beta": beta, "max_error": err,
                      "norm_drift": drift,
                      "passed": err < DISCRETE_MODE_TOL and drift < NORM_TOL})
    return _summary("discrete-mode", DISCRETE_MODE_TOL, cases)


KERNEL_POINTS = ((0.01, 1e-9, 0.0), (0.1, 0.5e-9, 0.0), (3.0, 0.0, 0.5))


def check_kernel(n_lags=20, seed=20180517, points=KERNEL_POINTS):
    rng = np.random.default_rng(seed)
    cases = []
    for y1, beta, y3 in points:
        p = CavityQubitParams.from_ratios(y1, beta=beta, delta_ratio=y3)
        dp = to_dimensionless(p)
        # lags where the kernel is still above exp(-5) of its peak
        lags = rng.uniform(0.0, min(25.0, 5.0 / y1), n_lags)
        errs = []
        try:
            for s in lags:
                quad = kernel_quadrature(p, s / p.gamma, 0.0)
                exact = complex(memory_kernel(dp, s)) * p.gamma**2
                errs.append(abs(quad - exact) / abs(exact))
        except QMotionError as exc:
            return _summary("kernel", KERNEL_RTOL, cases, error=str(exc))
        err = float(max(errs))
        cases.append({"lambda_ratio": y1, "beta": beta, "delta_ratio": y3,
                      "max_error": err, "passed": err < KERNEL_RTOL})
    return _summary("kernel", KERNEL_RTOL, cases)


def run_validation(checks=CHECKS, dt=1e-3):
    """Run the named oracle comparisons and collect a JSON-ready report."""
    runners = {
        "closed-form": check_closed_form,
        "volterra": lambda: check_volterra(dt=dt),
        "discrete-mode": check_discrete_mode,
        "kernel": check_kernel,
    }
    unknown = [c for c in checks if c not in runners]
    if unknown:
        raise ValueError(f"unknown checks: {', '.join(unknown)}")
    comparisons = [runners[name]() for name in checks]
    return {"passed": all(c["passed"] for c in comparisons), "comparisons": comparisons}
