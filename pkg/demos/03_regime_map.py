"""Map of asymptotic outcomes over growth rate and inspection pressure.

A coarser grid than the acceptance sweep keeps this demo around ten seconds;
the structure is the same: depletion for slowly growing pools, a coexistence
wedge, an all-defector region for fast pools under weak inspection, and the
desired region above the analytic pressure curve.
"""

from collections import Counter
from pathlib import Path

import numpy as np

from commons_mrac import GameParams, regime_thresholds, sweep_phase_plane
from commons_mrac.cli import REGIME_COLORS
from commons_mrac import svg

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

params = GameParams(r=0.6, alpha=0.5, beta=0.5, n_players=100,
                    r_max=100.0, b_max=0.5, p_star=0.09)
r_grid = np.linspace(0.3, 1.0, 15)
pbeta_grid = np.linspace(0.0, 0.15, 13)

regime_map = sweep_phase_plane(params, r_grid, pbeta_grid, horizon=3000.0)

thr = regime_thresholds(params)
print(f"extraction-rate verticals: e_c = {thr.e_c}, e_d = {thr.e_d}")
print(f"desired-region curve: p_hat*beta = {params.alpha * params.b_max:g}"
      f" * (1 - {thr.e_c:g}/r)")
print()
counts = Counter(label.value for row in regime_map.labels for label in row)
for label, n in sorted(counts.items()):
    print(f"  {label:25s} {n:4d} cells")

colors = [[REGIME_COLORS[lab] for lab in row] for row in regime_map.labels]
legend = [(lab.value, color) for lab, color in REGIME_COLORS.items()]
svg.heatmap(
    OUT / "03_regime_map.svg",
    "asymptotic regimes over (r, p_hat*beta)",
    regime_map.r_values,
    regime_map.pbeta_values,
    colors,
    legend,
    x_label="resource growth rate r",
    y_label="inspection pressure p_hat*beta",
)
print()
print("wrote", OUT / "03_regime_map.svg")
