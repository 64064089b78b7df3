"""Command-line front end.

Subcommands: ``simulate`` (run a scenario, write the trajectory CSV, print a
summary), ``sweep`` (regime map over a parameter grid), ``roa`` (gain matrix
and attraction-estimate report) and ``plot`` (SVG charts from a trajectory
CSV).  Every run is deterministic; there is no randomness anywhere, which is
what the ``--seedless`` flag documents.

Exit codes: 0 success or informative report, 1 usage/configuration error,
2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, replace

import numpy as np

from .config import ScenarioConfig, load_config, save_config
from .controller import (
    ControllerState,
    ErrorVector,
    ReferenceUnstableError,
    check_admissible,
    lyapunov_value,
    reference_matrix,
    solve_lyapunov,
)
from .game import GameParams, PopState, fixed_points, regime_thresholds
from .presets import get_preset
from .roa import AttractionEstimate, compute_roa, maximize_m
from .simulate import (
    DEFAULT_ADAPT_RATE,
    IntegrationError,
    Phase,
    RegimeLabel,
    Schedule,
    Trajectory,
    detect_convergence,
    integrate,
    normalized_distance,
    sweep_phase_plane,
)
from . import svg

__all__ = ["main", "CSV_HEADER", "RunSummary", "write_trajectory_csv", "read_trajectory_csv"]

CSV_HEADER = ["t", "x", "y", "x_m", "y_m", "p_hat", "e1", "e2", "V", "phase"]

EPSILON_SEARCH_GRID = tuple(np.geomspace(1e-9, 0.9, 46))

REGIME_COLORS = {
    RegimeLabel.DESIRED: "#2ca02c",
    RegimeLabel.ALL_DEFECT_SUSTAINED: "#d62728",
    RegimeLabel.COEXISTENCE: "#f2c14e",
    RegimeLabel.DEPLETED: "#7f7f7f",
    RegimeLabel.BOUNDARY: "#dddddd",
    RegimeLabel.NON_CONVERGENT: "#9467bd",
}


def _g17(v: float) -> str:
    return f"{v:.17g}"


def write_trajectory_csv(traj: Trajectory, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for i in range(len(traj)):
            writer.writerow(
                [_g17(traj.t[i]), _g17(traj.x[i]), _g17(traj.y[i]),
                 _g17(traj.x_m[i]), _g17(traj.y_m[i]), _g17(traj.p_hat[i]),
                 _g17(traj.e1[i]), _g17(traj.e2[i]), _g17(traj.v_lyap[i]),
                 int(traj.phase_index[i])]
            )


def read_trajectory_csv(path: str) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        cols: list[list[float]] = [[] for _ in CSV_HEADER]
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(CSV_HEADER):
                raise ValueError(f"{path}: malformed CSV at row {lineno}: {len(row)} fields")
            try:
                for c, v in zip(cols, row):
                    c.append(float(v))
            except ValueError:
                raise ValueError(f"{path}: malformed CSV at row {lineno}: non-numeric field") from None
    if not cols[0]:
        raise ValueError(f"{path}: no data rows")
    out = {name: np.array(c) for name, c in zip(CSV_HEADER, cols)}
    out["phase"] = out["phase"].astype(int)
    return out


# ---------------------------------------------------------------------------
# Run summary
# ---------------------------------------------------------------------------


@dataclass
class RunSummary:
    """Measured outcomes of a run next to their analytic targets."""

    config: ScenarioConfig
    target: PopState
    phase_terminals: list[tuple[int, str, float, float, float]]  # idx, desc, x, y, dist
    converged: bool
    settle_time: float | None
    terminal_error: tuple[float, float]
    regime: str
    p_hat_range: tuple[float, float]
    p_hat_in_range: bool
    roa: AttractionEstimate | None
    admissible: bool | None
    admissible_slack: float | None
    max_dv_below_m: float | None

    def format(self) -> str:
        cfg = self.config
        p = cfg.params
        thr = regime_thresholds(p)
        lines = [
            f"scenario: {cfg.name}",
            (
                f"params: r={p.r:g} alpha={p.alpha:g} beta={p.beta:g} n={p.n_players} "
                f"r_max={p.r_max:g} b_max={p.b_max:g} p_star={p.p_star:g}"
            ),
            "analytic targets:",
            f"  desired outcome: (1, {self.target.y:.10g})",
            (
                f"  thresholds: e_c={thr.e_c:.10g} e_d={thr.e_d:.10g} "
                f"p_upper={thr.p_upper:.10g} p_lower={thr.p_lower:.10g}"
            ),
            "phases:",
        ]
        for idx, desc, x, y, dist in self.phase_terminals:
            lines.append(
                f"  {idx} {desc}: terminal (x={x:.8g}, y={y:.8g}), "
                f"distance to target {dist:.3e}"
            )
        lines += [
            "measured:",
            f"  converged to target: {'yes' if self.converged else 'no'}"
            + (f" (settled at t={self.settle_time:.6g})" if self.settle_time is not None else ""),
            f"  terminal tracking error: e1={self.terminal_error[0]:.3e} e2={self.terminal_error[1]:.3e}",
            f"  terminal regime: {self.regime}",
            (
                f"  p_hat range: [{self.p_hat_range[0]:.6g}, {self.p_hat_range[1]:.6g}]"
                f" (within [0,1]: {'yes' if self.p_hat_in_range else 'NO'})"
            ),
        ]
        if self.roa is not None:
            est = self.roa
            g = est.gains
            lines += [
                f"controller (epsilon={est.epsilon:g}, b={est.b:g}):",
                f"  Q = [[{g.q11:.10g}, {g.q12:.10g}], [{g.q12:.10g}, {g.q22:.10g}]]",
                f"  lambda_min(Q)={est.lambda_min_q:.10g}  ||Q||_F={est.q_frobenius:.10g}",
                (
                    f"  k={est.k:.10g} K={est.big_k:.10g} m={est.m:.10g} c={est.c:.10g}"
                    f" usable={'yes' if est.usable else 'no'}"
                ),
            ]
            if self.admissible is not None:
                lines.append(
                    f"  admissible at adaptive start (strict): "
                    f"{'yes' if self.admissible else 'no'} (slack={self.admissible_slack:.6g})"
                )
            if self.max_dv_below_m is not None:
                lines.append(
                    f"  max V increase per sample inside ||e|| < m: {self.max_dv_below_m:.3e}"
                )
        return "\n".join(lines)


def _phase_description(phase: Phase) -> str:
    from .simulate import AdaptiveInspection, FixedInspection

    if isinstance(phase.mode, FixedInspection):
        mode = f"fixed p_hat={phase.mode.p_hat:g}"
    else:
        mode = f"adaptive (rate={phase.mode.adapt_rate:g})"
    return f"[{phase.t_start:g}, {phase.t_end:g}) {mode}"


def _nearest_regime(params: GameParams, p_hat: float, x: float, y: float, tol: float = 1e-2) -> str:
    from .simulate import _KIND_TO_LABEL

    best = None
    best_d = float("inf")
    for fp in fixed_points(params, p_hat):
        if not fp.valid:
            continue
        d = max(abs(x - fp.point.x), abs(y - fp.point.y) / params.r_max)
        if d < best_d:
            best_d = d
            best = _KIND_TO_LABEL[fp.kind]
    if best is None or best_d >= tol:
        return RegimeLabel.NON_CONVERGENT.value
    return best.value


def build_summary(config: ScenarioConfig, traj: Trajectory) -> RunSummary:
    params = config.params
    target = PopState(1.0, params.desired_stock)
    phase_terminals = []
    for i, phase in enumerate(traj.schedule.phases):
        mask = traj.phase_mask(i)
        if not mask.any():
            continue
        j = np.nonzero(mask)[0][-1]
        dist = float(
            normalized_distance(traj.x[j : j + 1], traj.y[j : j + 1], target, params.r_max)[0]
        )
        phase_terminals.append((i, _phase_description(phase), float(traj.x[j]), float(traj.y[j]), dist))

    window = min(100.0, (traj.t[-1] - traj.t[0]) / 2.0)
    converged, settle = detect_convergence(traj, target, tol=1e-3, window=window)
    regime = _nearest_regime(params, float(traj.p_hat[-1]), float(traj.x[-1]), float(traj.y[-1]))

    est = None
    admissible = None
    slack = None
    max_dv = None
    if traj.gains is not None:
        est = compute_roa(params, traj.gains, traj.adapt_rate, config.epsilon, config.error_bound)
        adaptive_idx = len(traj.schedule.phases) - 1
        if traj.schedule.adaptive_mode is not None:
            mask = traj.phase_mask(adaptive_idx)
            if mask.any():
                j0 = np.nonzero(mask)[0][0]
                ctrl = ControllerState(
                    gains=traj.gains,
                    a=traj.adapt_rate,
                    p_hat=float(traj.p_hat[j0]),
                    p_star=params.p_star,
                )
                e0 = ErrorVector(float(traj.e1[j0]), float(traj.e2[j0]))
                admissible, slack = check_admissible(ctrl, e0, est)
                sel = np.zeros(len(traj), dtype=bool)
                sel[j0:] = True
                enorm = np.hypot(traj.e1, traj.e2)
                below = sel & (enorm < est.m)
                pair = below[:-1] & below[1:]
                if pair.any():
                    dv = traj.v_lyap[1:][pair] - traj.v_lyap[:-1][pair]
                    max_dv = float(dv.max())
    return RunSummary(
        config=config,
        target=target,
        phase_terminals=phase_terminals,
        converged=converged,
        settle_time=settle,
        terminal_error=(float(traj.e1[-1]), float(traj.e2[-1])),
        regime=regime,
        p_hat_range=(traj.p_hat_min, traj.p_hat_max),
        p_hat_in_range=not traj.p_hat_violation,
        roa=est,
        admissible=admissible,
        admissible_slack=slack,
        max_dv_below_m=max_dv,
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _resolve_config(args) -> ScenarioConfig:
    if getattr(args, "config", None):
        cfg = load_config(args.config)
    elif getattr(args, "preset", None):
        cfg = get_preset(args.preset)
    else:
        raise ValueError("one of --preset or --config is required")
    if getattr(args, "step", None) is not None:
        cfg = replace(cfg, step=args.step)
    if getattr(args, "stride", None) is not None:
        cfg = replace(cfg, stride=args.stride)
    if getattr(args, "clamp_p", False):
        cfg = replace(cfg, clamp_p=True)
    if getattr(args, "horizon", None) is not None and args.horizon != cfg.horizon:
        phases = list(cfg.schedule.phases)
        last = phases[-1]
        if args.horizon <= last.t_start:
            raise ValueError(
                f"--horizon {args.horizon} would not leave room for the final phase "
                f"starting at {last.t_start}"
            )
        phases[-1] = Phase(last.t_start, args.horizon, last.mode)
        cfg = replace(cfg, schedule=Schedule(tuple(phases)))
    return cfg


def _run_config(cfg: ScenarioConfig) -> Trajectory:
    return integrate(
        cfg.params,
        cfg.schedule,
        cfg.x0,
        cfg.y0,
        cfg.xm0,
        cfg.ym0,
        cfg.p_hat0,
        cfg.step,
        cfg.horizon,
        clamp_p=cfg.clamp_p,
        stride=cfg.stride,
    )


def cmd_simulate(args) -> int:
    cfg = _resolve_config(args)
    traj = _run_config(cfg)
    write_trajectory_csv(traj, args.out)
    print(build_summary(cfg, traj).format())
    print(f"trajectory written to {args.out}")
    return 0


def cmd_roa(args) -> int:
    cfg = _resolve_config(args)
    params = cfg.params
    gains = solve_lyapunov(reference_matrix(params))
    mode = cfg.schedule.adaptive_mode
    a = mode.adapt_rate if mode is not None else DEFAULT_ADAPT_RATE
    epsilon = args.epsilon if args.epsilon is not None else cfg.epsilon
    b = args.error_bound if args.error_bound is not None else cfg.error_bound
    est = compute_roa(params, gains, a, epsilon, b)
    lines = [
        f"scenario: {cfg.name}",
        f"Q = [[{gains.q11:.10g}, {gains.q12:.10g}], [{gains.q12:.10g}, {gains.q22:.10g}]]",
        f"lambda_min(Q) = {est.lambda_min_q:.10g}",
        f"||Q||_F = {est.q_frobenius:.10g}",
        f"k1 = {est.k1:.10g}  k2 = {est.k2:.10g}  k3 = {est.k3:.10g}  k = {est.k:.10g}",
        f"l1 = {est.l1:.10g}  l2 = {est.l2:.10g}  K = {est.big_k:.10g}",
        f"epsilon = {est.epsilon:g}  b = {est.b:g}",
        f"m = {est.m:.10g}",
        f"c = lambda_min(Q) m^2 = {est.c:.10g}",
    ]
    if not est.usable:
        lines.append(
            "unusable estimate: 1 - k*epsilon <= 0 at this epsilon; "
            "the ball radius formula is non-positive"
        )
    best = maximize_m(params, gains, a, b, EPSILON_SEARCH_GRID)
    lines.append(
        f"largest radius over epsilon grid: m = {best.m:.10g} at epsilon = {best.epsilon:.6g}"
    )
    ctrl = ControllerState(gains=gains, a=a, p_hat=cfg.p_hat0, p_star=params.p_star)
    e0 = ErrorVector(cfg.x0 - cfg.xm0, cfg.y0 - cfg.ym0)
    lhs = lyapunov_value(ctrl, e0)
    verdict, slack = check_admissible(ctrl, e0, est)
    lines.append(
        f"initial condition check (strict, configured epsilon): "
        f"V(e0, ptilde0) = {lhs:.10g} -> "
        f"{'admissible' if verdict else 'not admissible'} (slack = {slack:.10g})"
    )
    if not est.usable:
        verdict_best, slack_best = check_admissible(ctrl, e0, best)
        lines.append(
            f"initial condition check at the grid's best epsilon: "
            f"{'admissible' if verdict_best else 'not admissible'} (slack = {slack_best:.10g})"
        )
    print("\n".join(lines))
    return 0


def cmd_sweep(args) -> int:
    if args.preset:
        params = get_preset(args.preset).params
    elif args.config:
        params = load_config(args.config).params
    else:
        params = get_preset("example1").params
    r_grid = np.linspace(args.r_min, args.r_max, args.r_count)
    pbeta_grid = np.linspace(args.pbeta_min, args.pbeta_max, args.pbeta_count)
    regime_map = sweep_phase_plane(params, r_grid, pbeta_grid, args.horizon, args.step)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "p_beta", "label"])
        for r, pb, label in regime_map.rows():
            writer.writerow([_g17(r), _g17(pb), label.value])
    print(f"regime map written to {args.out}")
    if args.svg:
        colors = [
            [REGIME_COLORS[regime_map.labels[i][j]] for j in range(len(regime_map.pbeta_values))]
            for i in range(len(regime_map.r_values))
        ]
        legend = [(label.value, REGIME_COLORS[label]) for label in RegimeLabel]
        svg.heatmap(
            args.svg,
            "asymptotic regimes over (r, p_hat*beta)",
            regime_map.r_values,
            regime_map.pbeta_values,
            colors,
            legend,
            x_label="resource growth rate r",
            y_label="inspection pressure p_hat*beta",
        )
        print(f"heat map written to {args.svg}")
    return 0


def cmd_plot(args) -> int:
    data = read_trajectory_csv(args.infile)
    t = data["t"]
    changes = np.nonzero(np.diff(data["phase"]) != 0)[0]
    vlines = [float(t[i + 1]) for i in changes]
    states_path = f"{args.out}_states.svg"
    errors_path = f"{args.out}_errors.svg"
    inspection_path = f"{args.out}_inspection.svg"
    svg.stacked_chart(
        states_path,
        "cooperation level and resource stock",
        [
            ("cooperator fraction", [("x", t, data["x"]), ("x_m", t, data["x_m"])]),
            ("resource stock", [("y", t, data["y"]), ("y_m", t, data["y_m"])]),
        ],
        x_label="t",
        vlines=vlines,
    )
    svg.line_chart(
        errors_path,
        "tracking error",
        [("e1 = x - x_m", t, data["e1"]), ("e2 = y - y_m", t, data["e2"])],
        x_label="t",
        y_label="error",
        vlines=vlines,
    )
    svg.line_chart(
        inspection_path,
        "inspection intensity",
        [("p_hat", t, data["p_hat"])],
        x_label="t",
        y_label="p_hat",
        vlines=vlines,
    )
    for p in (states_path, errors_path, inspection_path):
        print(f"chart written to {p}")
    return 0


def cmd_export_config(args) -> int:
    cfg = get_preset(args.preset)
    save_config(cfg, args.out)
    print(f"config written to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1, not argparse's default 2 (2 is reserved for
    # numerical failures)
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_scenario_args(sub, with_overrides: bool = True) -> None:
    sub.add_argument("--preset", choices=["example1", "example2", "example3"],
                     help="built-in scenario")
    sub.add_argument("--config", help="path to a scenario config JSON file")
    if with_overrides:
        sub.add_argument("--step", type=float, help="integrator step override")
        sub.add_argument("--horizon", type=float,
                         help="extend or shorten the final phase to end here")
        sub.add_argument("--stride", type=int, help="sample stride override")
        sub.add_argument("--clamp-p", dest="clamp_p", action="store_true",
                         help="project the inspection intensity onto [0, 1]")
    sub.add_argument("--seedless", action="store_true",
                     help="accepted for symmetry; all runs are deterministic and use no RNG")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="commons-mrac",
                     description="adaptive inspection control for a harvested commons")
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="run a scenario and write its trajectory CSV")
    _add_scenario_args(sim)
    sim.add_argument("--out", default="trajectory.csv", help="trajectory CSV path")
    sim.set_defaults(func=cmd_simulate)

    roa = subs.add_parser("roa", help="gain matrix and region-of-attraction report")
    _add_scenario_args(roa, with_overrides=False)
    roa.add_argument("--epsilon", type=float, help="reference-offset bound override")
    roa.add_argument("--error-bound", dest="error_bound", type=float,
                     help="assumed error-norm bound override")
    roa.set_defaults(func=cmd_roa)

    sweep = subs.add_parser("sweep", help="regime map over a (r, p_hat*beta) grid")
    sweep.add_argument("--preset", choices=["example1", "example2", "example3"],
                       help="base parameters source (default example1)")
    sweep.add_argument("--config", help="base parameters from a config file")
    sweep.add_argument("--r-min", type=float, default=0.3)
    sweep.add_argument("--r-max", type=float, default=1.0)
    sweep.add_argument("--r-count", type=int, default=36)
    sweep.add_argument("--pbeta-min", type=float, default=0.0)
    sweep.add_argument("--pbeta-max", type=float, default=0.15)
    sweep.add_argument("--pbeta-count", type=int, default=31)
    sweep.add_argument("--horizon", type=float, default=5000.0)
    sweep.add_argument("--step", type=float, default=0.01)
    sweep.add_argument("--out", default="regime_map.csv")
    sweep.add_argument("--svg", help="also write a heat map SVG here")
    sweep.add_argument("--seedless", action="store_true",
                       help="accepted for symmetry; all runs are deterministic and use no RNG")
    sweep.set_defaults(func=cmd_sweep)

    plot = subs.add_parser("plot", help="SVG charts from a trajectory CSV")
    plot.add_argument("--in", dest="infile", required=True, help="trajectory CSV path")
    plot.add_argument("--out", default="trajectory", help="output path prefix")
    plot.set_defaults(func=cmd_plot)

    export = subs.add_parser("export-config", help="write a preset as a config JSON file")
    export.add_argument("--preset", required=True,
                        choices=["example1", "example2", "example3"])
    export.add_argument("--out", required=True)
    export.set_defaults(func=cmd_export_config)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (IntegrationError, ReferenceUnstableError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
