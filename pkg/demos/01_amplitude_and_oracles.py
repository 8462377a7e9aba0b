# %% [markdown]
# # The excited-state amplitude and its brute-force checks
#
# A qubit at rest inside a Lorentzian cavity decays like a damped oscillator
# when the cavity is narrow (lambda < gamma) and monotonically when it is wide.
# Motion along the cavity axis splits the memory kernel into two Doppler
# shifted exponentials, which turns the second-order problem into a cubic one.
# Here we solve it from the three roots and compare against two solvers that
# never see the cubic.

# %%
import numpy as np

from qmotion import CavityQubitParams, amplitude_at, amplitude_solution, to_dimensionless
from qmotion.oracles import ModeGrid, VolterraConfig, discrete_mode_solve, volterra_solve

# %% [markdown]
# ## Roots and residues
#
# With lambda = 0.1 gamma the qubit at rest has one root at ``-lambda_bar``
# carrying no weight; a velocity of 1e-9 c gives it a small share.

# %%
for beta in (0.0, 1e-9):
    p = CavityQubitParams.from_ratios(0.1, beta=beta)
    sol = amplitude_solution(to_dimensionless(p))
    print(f"beta = {beta:g}")
    for q, r in zip(sol.rates, sol.residues):
        print(f"   q = {q.real:+.6f} {q.imag:+.6f}i   r = {r.real:+.6f} {r.imag:+.6f}i")
    print(f"   sum of residues = {sol.residues.sum():.12f}")

# %% [markdown]
# ## Volterra solver
#
# The integro-differential equation integrated directly on a 1e-3 grid.

# %%
dp = to_dimensionless(CavityQubitParams.from_ratios(0.1, beta=1e-9))
traj = volterra_solve(dp, VolterraConfig(t_max=25.0, dt=1e-3))
exact = amplitude_at(amplitude_solution(dp), traj.gt)
print("max |A_residue - A_volterra| =", np.max(np.abs(traj.amplitude - exact)))

# %% [markdown]
# ## Many discrete modes
#
# 2000 modes within 20 widths of the cavity centre give a closed system whose
# norm is conserved; its qubit amplitude approaches the continuum result as
# the comb gets denser (8000 modes and 40 widths reach about 1e-5).

# %%
p = CavityQubitParams.from_ratios(0.1, beta=1e-9)
grid = ModeGrid(n_modes=2000, window_halfwidth=20.0, t_max=25.0)
modes = discrete_mode_solve(p, grid)
exact = np.abs(amplitude_at(amplitude_solution(to_dimensionless(p)), modes.gt))
print("max ||A_modes| - |A|| =", np.max(np.abs(np.abs(modes.amplitude) - exact)))
print("norm drift           =", np.max(np.abs(modes.norm - 1.0)))
