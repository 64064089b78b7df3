"""The headline experiment: an unannounced drop of the inspection intensity
derails the commons, and the adaptive law steers it back.

Reproduces the moderate-growth scenario (preset ``example1``): inspection at
its preset value until t=1000, a drop to 0.07 until t=3000, adaptation
afterwards.  Writes the three standard charts to demos/output/.
"""

from pathlib import Path

from commons_mrac import PopState, detect_convergence, get_preset, integrate, svg

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

cfg = get_preset("example1")
params = cfg.params
traj = integrate(params, cfg.schedule, cfg.x0, cfg.y0, cfg.xm0, cfg.ym0,
                 cfg.p_hat0, cfg.step, cfg.horizon, clamp_p=cfg.clamp_p, stride=10)

target = PopState(1.0, params.desired_stock)
print("target equilibrium:", (1.0, round(target.y, 4)))
for i, phase in enumerate(cfg.schedule.phases):
    mask = traj.phase_index == i
    j = mask.nonzero()[0][-1]
    print(f"phase {i} ends at t={traj.t[j]:7.1f}: "
          f"x={traj.x[j]:.6f} y={traj.y[j]:.4f} p_hat={traj.p_hat[j]:.6f}")

converged, settle = detect_convergence(traj, target)
print(f"recovered: {converged}, settled at t = {settle}")
print(f"inspection intensity stayed within [{traj.p_hat_min:.4f}, {traj.p_hat_max:.4f}]")
print(f"terminal tracking error: ({traj.e1[-1]:.2e}, {traj.e2[-1]:.2e})")

boundaries = [p.t_end for p in cfg.schedule.phases[:-1]]
svg.stacked_chart(
    OUT / "02_states.svg",
    "inspection dropout and adaptive recovery",
    [
        ("cooperator fraction", [("x", traj.t, traj.x), ("x_m", traj.t, traj.x_m)]),
        ("resource stock", [("y", traj.t, traj.y), ("y_m", traj.t, traj.y_m)]),
    ],
    x_label="t",
    vlines=boundaries,
)
svg.line_chart(
    OUT / "02_errors.svg",
    "tracking error",
    [("e1", traj.t, traj.e1), ("e2", traj.t, traj.e2)],
    x_label="t", y_label="error", vlines=boundaries,
)
svg.line_chart(
    OUT / "02_inspection.svg",
    "inspection intensity",
    [("p_hat", traj.t, traj.p_hat)],
    x_label="t", y_label="p_hat", vlines=boundaries,
)
for name in ("02_states.svg", "02_errors.svg", "02_inspection.svg"):
    print("wrote", OUT / name)
