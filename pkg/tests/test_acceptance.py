"""Acceptance gates for the library and the CLI.

Each test carries ``@pytest.mark.criterion(n)``; the terminal summary prints
one PASS/FAIL line per criterion. The tolerances below are acceptance
constants, deliberately kept here and not imported from the package.
"""

import math

import numpy as np
import pytest

from qmotion.amplitude import amplitude_at, amplitude_solution, cubic_coefficients, memory_kernel
from qmotion.cli import main
from qmotion.dynamics import (
    QubitState,
    evolve_state,
    master_equation_residual,
    rate_series,
)
from qmotion.nonmarkov import (
    StatePair,
    blp_measure,
    blp_measure_quadrature,
    detect_revivals,
    sweep_beta,
    sweep_lambda,
)
from qmotion.oracles import ModeGrid, VolterraConfig, discrete_mode_solve, kernel_quadrature, volterra_solve
from qmotion.params import RB_OMEGA0_OVER_GAMMA, CavityQubitParams, DimensionlessParams, to_dimensionless
from qmotion.presets import PRESETS

VOLTERRA_TOL = 1e-5
DISCRETE_MODE_TOL = 2e-2
NORM_DRIFT_TOL = 1e-8
CLOSED_FORM_TOL = 1e-8
KERNEL_RTOL = 1e-3
VIETA_TOL = 1e-10
RESIDUE_SUM_TOL = 1e-9
AMPLITUDE_BOUND_TOL = 1e-6
STATE_TOL = 1e-9
MASTER_EQ_TOL = 1e-8
TWO_METHOD_TOL = 1e-6

# criterion 1 fixes omega0/gamma explicitly; everything else uses the Rb value
Y2_VOLTERRA = 4.595e7
Y2 = RB_OMEGA0_OVER_GAMMA
NANO = 1e-9


def solution(lambda_ratio, beta=0.0, delta_ratio=0.0, y2=Y2):
    return amplitude_solution(DimensionlessParams.from_ratios(lambda_ratio, y2, delta_ratio, beta))


# ----------------------------------------------------------------- 1


@pytest.mark.criterion(1)
@pytest.mark.parametrize("lambda_ratio", [0.01, 0.1, 3.0])
@pytest.mark.parametrize("beta", [0.0, 0.05 * NANO, 0.1 * NANO, 0.3 * NANO, 0.5 * NANO, 1.0 * NANO])
def test_volterra_matches_analytic(lambda_ratio, beta):
    dp = DimensionlessParams.from_ratios(lambda_ratio, Y2_VOLTERRA, 0.0, beta)
    traj = volterra_solve(dp, VolterraConfig(t_max=25.0, dt=1e-3))
    assert traj.gt[-1] == pytest.approx(25.0)
    err = np.max(np.abs(traj.amplitude - amplitude_at(amplitude_solution(dp), traj.gt)))
    assert err < VOLTERRA_TOL


# ----------------------------------------------------------------- 2


@pytest.mark.criterion(2)
@pytest.mark.parametrize("beta", [0.0, 1e-9])
def test_discrete_modes_match_analytic(beta):
    p = CavityQubitParams.from_ratios(0.1, beta=beta)
    traj = discrete_mode_solve(p, ModeGrid(n_modes=8000, window_halfwidth=40.0, t_max=25.0))
    exact = np.abs(amplitude_at(amplitude_solution(to_dimensionless(p)), traj.gt))
    assert np.max(np.abs(np.abs(traj.lab_amplitude) - exact)) < DISCRETE_MODE_TOL
    assert np.max(np.abs(traj.norm - 1.0)) < NORM_DRIFT_TOL


# ----------------------------------------------------------------- 3


def closed_form(lambda_ratio, delta_ratio, gt):
    lam_bar = complex(lambda_ratio, -delta_ratio)
    D = np.sqrt(lam_bar**2 - lambda_ratio + 0j)
    return np.exp(-lam_bar * gt / 2) * (np.cosh(D * gt / 2) + lam_bar / D * np.sinh(D * gt / 2))


@pytest.mark.criterion(3)
@pytest.mark.parametrize("lambda_ratio", [0.01, 0.1, 3.0])
@pytest.mark.parametrize("delta_ratio", [0.0, 0.5])
def test_stationary_closed_form(lambda_ratio, delta_ratio):
    gt = np.linspace(0.0, 50.0, 50001)
    err = np.abs(amplitude_at(solution(lambda_ratio, 0.0, delta_ratio), gt)
                 - closed_form(lambda_ratio, delta_ratio, gt))
    assert np.max(err) < CLOSED_FORM_TOL


# ----------------------------------------------------------------- 4


@pytest.mark.criterion(4)
@pytest.mark.parametrize("lambda_ratio, beta, delta_ratio",
                         [(0.01, 1e-9, 0.0), (0.1, 0.5e-9, 0.0), (3.0, 0.0, 0.5)])
def test_kernel_matches_quadrature(lambda_ratio, beta, delta_ratio):
    p = CavityQubitParams.from_ratios(lambda_ratio, beta=beta, delta_ratio=delta_ratio)
    dp = to_dimensionless(p)
    rng = np.random.default_rng(1729)
    # lags within five correlation times, where the kernel is not yet negligible
    lags = rng.uniform(0.0, min(25.0, 5.0 / lambda_ratio), 20)
    for s in lags:
        t = s / p.gamma
        quad = kernel_quadrature(p, 2.0 * t, t)  # depends on the lag only
        exact = complex(memory_kernel(dp, s)) * p.gamma**2
        assert abs(quad - exact) / abs(exact) < KERNEL_RTOL


# ----------------------------------------------------------------- 5


def random_params(rng, n):
    for _ in range(n):
        y1 = 10 ** rng.uniform(-3, 1)
        y3 = rng.uniform(-2, 2)
        beta = 0.0 if rng.random() < 0.2 else 10 ** rng.uniform(-12, -6)
        y2 = (Y2_VOLTERRA, Y2)[rng.integers(2)]
        yield DimensionlessParams.from_ratios(y1, y2, y3, beta)


@pytest.mark.criterion(5)
def test_vieta_and_residue_sum():
    rng = np.random.default_rng(5)
    for dp in random_params(rng, 1000):
        sol = amplitude_solution(dp)
        c2, c1, c0 = cubic_coefficients(dp)
        q = sol.rates
        # compare on the natural scale of the roots
        scale = max(abs(c2), abs(c1) ** 0.5, abs(c0) ** (1 / 3))
        assert abs(q.sum() + c2) / scale < VIETA_TOL
        assert abs(q[0] * q[1] + q[0] * q[2] + q[1] * q[2] - c1) / scale**2 < VIETA_TOL
        assert abs(q.prod() + c0) / scale**3 < VIETA_TOL
        assert abs(sol.residues.sum() - 1.0) < RESIDUE_SUM_TOL


@pytest.mark.criterion(5)
def test_amplitude_bound_and_state_validity():
    rng = np.random.default_rng(6)
    for dp in random_params(rng, 1000):
        sol = amplitude_solution(dp)
        t = rng.uniform(0.0, 200.0, 4)
        assert np.max(np.abs(amplitude_at(sol, t))) <= 1.0 + AMPLITUDE_BOUND_TOL
        # random mixed state: a convex mix of a pure state and the identity
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        pure = QubitState.from_amplitudes(a, b)
        w = rng.uniform()
        rho0 = QubitState(w * pure.rho_aa + (1 - w) * 0.5, w * pure.rho_ab)
        rho = evolve_state(rho0, sol, float(t[0])).matrix
        assert abs(np.trace(rho) - 1.0) < STATE_TOL
        assert np.allclose(rho, rho.conj().T, atol=STATE_TOL)
        assert np.min(np.linalg.eigvalsh(rho)) > -STATE_TOL


@pytest.mark.criterion(5)
def test_master_equation_residual():
    rng = np.random.default_rng(8)
    for dp in random_params(rng, 1000):
        sol = amplitude_solution(dp)
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        rho0 = QubitState.from_amplitudes(a, b)
        gt = float(rng.uniform(0.0, 50.0))
        assert master_equation_residual(sol, rho0, gt) < MASTER_EQ_TOL


# ----------------------------------------------------------------- 6


@pytest.mark.criterion(6)
def test_markovian_regime():
    sol = solution(3.0)
    for theta in (0.0, math.pi / 4, math.pi / 2):
        pair = StatePair(theta)
        assert detect_revivals(sol, pair, 100.0) == []
        res = blp_measure(sol, pair)
        assert res.intervals == ()
        assert res.n_measure == 0.0
    gt = np.linspace(0.1, 50.0, 5000)[1:]
    assert np.all(rate_series(sol, gt).gamma_over_gamma > 0)


# ----------------------------------------------------------------- 7

FIG2_BETAS = [k * 0.1 * NANO for k in range(11)]


@pytest.mark.criterion(7)
def test_non_markovianity_decreases_with_velocity():
    p = CavityQubitParams.from_ratios(0.01)
    rows = sweep_beta(p, FIG2_BETAS, pair=StatePair(0.0), maximize=False)
    n = np.array([r.n_measure for r in rows])
    assert np.all(np.isfinite(n))
    assert n[-1] < n[0]
    assert FIG2_BETAS[int(np.argmin(n))] > 0


# ----------------------------------------------------------------- 8


@pytest.mark.criterion(8)
def test_threshold_width_shrinks_with_velocity():
    p = CavityQubitParams.from_ratios(0.01)
    sweep = sweep_lambda(p, PRESETS["fig3"]["lambda_ratio"], [0.0, 0.1 * NANO],
                         pair=StatePair(0.0), threshold=1e-3)
    at_rest, moving = sweep.thresholds[0.0], sweep.thresholds[0.1 * NANO]
    assert at_rest is not None and moving is not None
    assert moving < at_rest


# ----------------------------------------------------------------- 9


def mean_coherence(lambda_ratio, beta):
    gt = np.linspace(0.0, 50.0, 50001)
    C = np.abs(amplitude_at(solution(lambda_ratio, beta), gt))
    return np.trapezoid(C, gt) / 50.0


@pytest.mark.criterion(9)
@pytest.mark.parametrize("lambda_ratio, betas", [
    (0.01, [0.0, 0.5 * NANO, 1.0 * NANO]),
    (3.0, [0.0, 50 * NANO, 100 * NANO]),
])
def test_motion_protects_coherence(lambda_ratio, betas):
    means = [mean_coherence(lambda_ratio, b) for b in betas]
    assert means[0] < means[1] < means[2]


# ----------------------------------------------------------------- 10


def first_two_minima(beta):
    gt = np.arange(0.0, 400.0, 1e-3)
    g = rate_series(solution(0.01, beta), gt).gamma_over_gamma
    inner = g[1:-1]
    is_min = (inner < g[:-2]) & (inner <= g[2:]) & np.isfinite(inner)
    idx = np.flatnonzero(is_min)[:2] + 1
    assert idx.size == 2
    return gt[idx]


@pytest.mark.criterion(10)
def test_decay_rate_pseudoperiod_shrinks():
    spacings = [np.diff(first_two_minima(b))[0] for b in (0.05 * NANO, 0.1 * NANO, 1.0 * NANO)]
    assert spacings[0] > spacings[1] > spacings[2]


# ----------------------------------------------------------------- 11


@pytest.mark.criterion(11)
@pytest.mark.parametrize("lambda_ratio", [0.01, 0.1, 0.5, 3.0])
@pytest.mark.parametrize("beta", [0.0, 0.1 * NANO, 1.0 * NANO])
def test_two_methods_for_blp_measure(lambda_ratio, beta):
    sol = solution(lambda_ratio, beta)
    for theta in (0.0, math.pi / 4, math.pi / 2):
        pair = StatePair(theta)
        res = blp_measure(sol, pair)
        quad = blp_measure_quadrature(sol, pair, res.horizon)
        assert abs(res.n_measure - quad) < TWO_METHOD_TOL


# ----------------------------------------------------------------- 12


@pytest.mark.criterion(12)
@pytest.mark.parametrize("preset", sorted(PRESETS))
def test_presets_are_deterministic(preset, tmp_path):
    command = PRESETS[preset]["command"]
    outputs = []
    for run in ("first", "second"):
        out = tmp_path / f"{run}.csv"
        assert main([command, "--preset", preset, "--out", str(out), "--plot"]) == 0
        outputs.append((out.read_bytes(), out.with_suffix(".svg").read_bytes()))
    assert outputs[0] == outputs[1]
    assert main([command, "--preset", preset, "--format", "json",
                 "--out", str(tmp_path / "a.json")]) == 0
    assert main([command, "--preset", preset, "--format", "json",
                 "--out", str(tmp_path / "b.json")]) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
