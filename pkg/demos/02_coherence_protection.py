# %% [markdown]
# # Motion slows the loss of coherence
#
# For the balanced superposition the l1 coherence is simply ``|A(t)|``. We
# compare a qubit at rest with moving ones in a narrow cavity
# (lambda = 0.01 gamma, strong memory) and in a wide one (lambda = 3 gamma).

# %%
from pathlib import Path

import numpy as np

from qmotion import CavityQubitParams, amplitude_solution, coherence_series, to_dimensionless
from qmotion.io import Table, render_svg

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)


def coherence_table(lambda_ratio, betas, t_max):
    gt = np.linspace(0.0, t_max, 4001)
    cols = [gt]
    for beta in betas:
        sol = amplitude_solution(to_dimensionless(CavityQubitParams.from_ratios(lambda_ratio, beta)))
        cols.append(coherence_series(sol, gt))
    names = ["gt"] + [f"C@beta={b:g}" for b in betas]
    return Table(names, np.column_stack(cols), {"title": f"lambda/gamma = {lambda_ratio}", "ylabel": "C"})


# %% [markdown]
# ## Narrow cavity
#
# Collapses and revivals at rest; with increasing speed the curve stays closer
# to one.

# %%
narrow = coherence_table(0.01, [0.0, 0.5e-9, 1e-9], 400.0)
for name, col in zip(narrow.columns[1:], narrow.data[:, 1:].T):
    print(f"{name:16s} mean C over [0, 400] = {col.mean():.4f}")
(out / "coherence_narrow.svg").write_text(render_svg(narrow))

# %% [markdown]
# ## Wide cavity
#
# The decay is exponential-like, and much larger velocities are needed to
# hold the coherence.

# %%
wide = coherence_table(3.0, [0.0, 50e-9, 100e-9], 20.0)
for name, col in zip(wide.columns[1:], wide.data[:, 1:].T):
    print(f"{name:16s} C(20) = {col[-1]:.4f}")
(out / "coherence_wide.svg").write_text(render_svg(wide))
