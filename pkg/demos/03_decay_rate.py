# %% [markdown]
# # The time-dependent decay rate
#
# ``Gamma(t) = -2 Re[A'/A]`` goes negative whenever the excitation flows back
# from the cavity, and diverges where the amplitude vanishes. The spacing of
# its dips shrinks as the qubit moves faster.

# %%
import numpy as np

from qmotion import CavityQubitParams, amplitude_solution, rate_series, to_dimensionless

gt = np.arange(0.0, 400.0, 1e-3)

# %%
for beta in (0.05e-9, 0.1e-9, 1e-9):
    sol = amplitude_solution(to_dimensionless(CavityQubitParams.from_ratios(0.01, beta)))
    g = rate_series(sol, gt).gamma_over_gamma
    dips = np.flatnonzero((g[1:-1] < g[:-2]) & (g[1:-1] <= g[2:])) + 1
    first, second = gt[dips[:2]]
    print(f"beta = {beta:7.2g}: first dips at {first:7.2f}, {second:7.2f}  "
          f"spacing {second - first:6.2f}  min Gamma {np.nanmin(g):+.3f}")

# %% [markdown]
# In the wide cavity the rate at rest climbs to the constant ``3 - sqrt(6)``
# set by the slowest root.

# %%
sol = amplitude_solution(to_dimensionless(CavityQubitParams.from_ratios(3.0)))
print("Gamma(40) =", rate_series(sol, [40.0]).gamma_over_gamma[0], " 3 - sqrt(6) =", 3 - 6**0.5)
