# %% [markdown]
# # Information backflow and the BLP measure
#
# The trace distance of an antipodal pair depends on time only through
# ``x = |A|**2``, so the growth intervals are found once and the measure is a
# telescoped sum over them. We sweep the velocity at lambda = 0.01 gamma and
# the cavity width at three velocities.

# %%
import numpy as np

from qmotion import CavityQubitParams, StatePair, amplitude_solution, blp_measure, to_dimensionless
from qmotion.nonmarkov import blp_measure_quadrature, sweep_beta, sweep_lambda

# %% [markdown]
# ## Two routes to the same number

# %%
sol = amplitude_solution(to_dimensionless(CavityQubitParams.from_ratios(0.01)))
for theta in (0.0, np.pi / 4, np.pi / 2):
    res = blp_measure(sol, StatePair(theta))
    quad = blp_measure_quadrature(sol, StatePair(theta), res.horizon)
    print(f"theta = {theta:.3f}: telescoped {res.n_measure:.9f}  quadrature {quad:.9f}  "
          f"({len(res.intervals)} revivals up to gt = {res.horizon:.0f})")

# %% [markdown]
# ## Velocity sweep

# %%
betas = [k * 0.1e-9 for k in range(11)]
for row in sweep_beta(CavityQubitParams.from_ratios(0.01), betas):
    print(f"beta = {row.beta:8.1e}  N = {row.n_measure:.4f}  max over pairs = {row.n_max:.4f}")

# %% [markdown]
# ## Width sweep
#
# The last width with noticeable backflow (N > 1e-3) moves down as the qubit
# speeds up.

# %%
widths = [0.01] + [round(0.05 * k, 2) for k in range(1, 21)]
sweep = sweep_lambda(CavityQubitParams.from_ratios(0.01), widths, [0.0, 0.05e-9, 0.1e-9])
for beta, threshold in sweep.thresholds.items():
    print(f"beta = {beta:7.2g}: N drops below 1e-3 at lambda/gamma = {threshold:.6f}")
