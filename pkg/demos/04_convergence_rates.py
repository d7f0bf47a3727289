"""Measured convergence orders of the fast reaction limit.

Runs the eps sweep with delta = eps^1.5 and well-prepared data, fits log-log
slopes in three topologies and writes a chart next to this script.
"""

from pathlib import Path

import numpy as np

from fastslow import (
    ModelParams,
    SpectralField,
    build_grid,
    convergence_study,
    critical_map_u_of_v,
    theoretical_constants,
)
from fastslow.output import emit_svg

grid = build_grid(np.pi, 64)
x = grid.nodes
v_in = SpectralField.from_values(grid, 0.35 * (1 + 0.6 * np.cos(x) + 0.2 * np.cos(2 * x)))
consts = theoretical_constants(ModelParams(d=1.0, delta=0.0, eps=1e-2, kappa=1.0),
                               M=v_in.sobolev_norm(2))
kappa = 0.8 * consts.kappa_bound
p = ModelParams(d=1.0, delta=0.0, eps=1e-2, kappa=kappa, a=1.0, b=1.0, c=1.0)
u_in = critical_map_u_of_v(v_in, kappa)

report = convergence_study(
    p, u_in, v_in, [1e-2, 3e-3, 1e-3, 3e-4], T=0.5, delta_rule={"type": "power", "p": 1.5}
)
print("eps        delta      E_LinfL2    E_L2H1      E_LinfH2")
for r in report.runs:
    print(f"{r.eps:.1e}  {r.delta:.2e}  {r.norms.E_LinfL2:.3e}  "
          f"{r.norms.E_L2H1:.3e}  {r.norms.E_LinfH2:.3e}")
print("fitted orders:", {k: round(v, 3) for k, v in report.orders.items()})

out = Path(__file__).with_name("rates.svg")
emit_svg(
    {
        "eps": [r.eps for r in report.runs],
        "E_LinfL2": [r.norms.E_LinfL2 for r in report.runs],
        "E_L2H1": [r.norms.E_L2H1 for r in report.runs],
        "E_LinfH2": [r.norms.E_LinfH2 for r in report.runs],
    },
    out,
    x_column="eps",
    log_log=True,
)
print(f"wrote {out}")
