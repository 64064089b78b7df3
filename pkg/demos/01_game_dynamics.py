"""Tour of the harvested-commons game itself: vector field, equilibria, and
how the inspection intensity decides the long-run outcome.

Writes demos/output/01_outcomes.svg comparing a sufficient and an
insufficient inspection level for the same moderately-growing pool.
"""

from pathlib import Path

from commons_mrac import (
    FixedInspection,
    GameParams,
    Phase,
    PopState,
    Schedule,
    classify_regime,
    fixed_points,
    integrate,
    plant_rhs,
    regime_thresholds,
    svg,
)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

params = GameParams(r=0.6, alpha=0.5, beta=0.5, n_players=100,
                    r_max=100.0, b_max=0.5, p_star=0.09)

print("A pool of capacity", params.r_max, "regrows at rate", params.r)
print("All-cooperator extraction pressure e_c =", params.gain_rate_coop)
print("All-defector extraction pressure  e_d =", params.gain_rate_defect)
print("Sustainable all-cooperator stock      =", round(params.desired_stock, 4))
print()

thr = regime_thresholds(params)
print(f"Full cooperation is reachable when the inspection probability exceeds "
      f"p_upper = {thr.p_upper:.6g} (and r > e_c = {thr.e_c:g}).")
print()

for p_hat in (0.09, 0.07):
    print(f"inspection p_hat = {p_hat}:")
    for fp in fixed_points(params, p_hat):
        residual = plant_rhs(params, fp.point, p_hat)
        print(f"  {fp.kind.value:20s} ({fp.point.x:8.4f}, {fp.point.y:8.4f})"
              f"  valid={fp.valid}  |rhs|~{max(abs(residual[0]), abs(residual[1])):.1e}")
    label = classify_regime(params, p_hat, horizon=3000.0)
    print(f"  asymptotic regime from a mid-box start: {label.value}")
    print()

series = []
for p_hat in (0.09, 0.07):
    sched = Schedule((Phase(0.0, 800.0, FixedInspection(p_hat)),))
    traj = integrate(params, sched, 0.5, 50.0, 0.5, 50.0, p_hat, stride=20)
    series.append((f"y, p_hat={p_hat}", traj.t, traj.y))

svg.line_chart(
    OUT / "01_outcomes.svg",
    "resource stock under sufficient vs insufficient inspection",
    series,
    x_label="t",
    y_label="resource stock",
)
print("wrote", OUT / "01_outcomes.svg")
print("With p_hat above the threshold the stock settles at the sustainable",
      "level; below it, the population slides to the coexistence point with",
      "fewer cooperators and a poorer pool.")
