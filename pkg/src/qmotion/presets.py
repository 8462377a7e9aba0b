"""Named parameter sets for the standard sweeps and trajectories.

All presets use the 85Rb Rydberg qubit (gamma = 33.3 /s,
omega0 = 2 pi x 1.53 GHz) with zero detuning. Time windows are chosen to show several
collapse/revival cycles.
"""

from __future__ import annotations


PRESETS = {
    "fig2a": {
        "command": "nonmarkov",
        "lambda_ratio": [0.01],
        "beta": [float(f"{x / 10}e-9") for x in range(11)],
    },
    "fig2b": {
        "command": "nonmarkov",
        "lambda_ratio": [0.1],
        "beta": [float(f"{x / 10}e-9") for x in range(11)],
    },
    "fig3": {
        "command": "nonmarkov",
        "lambda_ratio": [0.01] + [round(0.05 * k, 2) for k in range(1, 21)],
        "beta": [0.0, 5e-11, 1e-10],
    },
    "fig4a": {
        "command": "coherence",
        "lambda_ratio": [0.01],
        "beta": [0.0, 5e-11, 1e-10],
        "t_max": 400.0,
        "dt": 0.05,
    },
    "fig4b": {
        "command": "coherence",
        "lambda_ratio": [0.01],
        "beta": [3e-10, 5e-10, 1e-09],
        "t_max": 400.0,
        "dt": 0.05,
    },
    "fig5": {
        "command": "decay-rate",
        "lambda_ratio": [0.01],
        "beta": [0.0, 5e-11, 1e-10, 1e-09],
        "t_max": 400.0,
        "dt": 0.05,
    },
    "fig6a": {
        "command": "coherence",
        "lambda_ratio": [3.0],
        "beta": [0.0, 5e-10, 1e-09],
        "t_max": 20.0,
        "dt": 0.01,
    },
    "fig6b": {
        "command": "coherence",
        "lambda_ratio": [3.0],
        "beta": [1e-08, 5e-08, 1e-07],
        "t_max": 20.0,
        "dt": 0.01,
    },
    "fig7": {
        "command": "decay-rate",
        "lambda_ratio": [3.0],
        "beta": [0.0, 5e-10, 1e-09, 1e-08, 5e-08, 1e-07],
        "t_max": 20.0,
        "dt": 0.01,
        "yscale": "log",
    },
}
