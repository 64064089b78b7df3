"""Coupled plant/reference/controller integration under piecewise inspection
schedules, convergence detection, and regime classification over grids.

The integrator is a classical 4th-order fixed-step scheme (default step
0.01): the dynamics are smooth and non-stiff for the parameter ranges of
interest, and a fixed step makes phase boundaries land exactly on grid
points and keeps every run bit-reproducible.  States are integrated
directly; tracking errors are derived from the recorded states, never
integrated separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import _kernels
from .controller import (
    GainMatrix,
    ReferenceUnstableError,
    reference_matrix,
    solve_lyapunov,
)
from .game import (
    FixedPointKind,
    GameParams,
    PopState,
    fixed_points,
    regime_thresholds,
)

__all__ = [
    "DEFAULT_STEP",
    "DEFAULT_ADAPT_RATE",
    "IntegrationError",
    "FixedInspection",
    "AdaptiveInspection",
    "Phase",
    "Schedule",
    "Trajectory",
    "RegimeLabel",
    "RegimeMap",
    "integrate",
    "detect_convergence",
    "classify_regime",
    "sweep_phase_plane",
    "normalized_distance",
]

DEFAULT_STEP = 0.01
# Adaptation rate assumed for the V column of runs whose schedule has no
# adaptive phase (V needs some rate for its parameter-error term).
DEFAULT_ADAPT_RATE = 1e-5

_STATUS_MESSAGES = {
    _kernels.STATUS_X_BOX: "cooperator fraction left [0, 1] beyond tolerance",
    _kernels.STATUS_Y_BOX: "resource stock went negative beyond tolerance",
    _kernels.STATUS_NONFINITE: "state became non-finite",
}


class IntegrationError(RuntimeError):
    """The integrator aborted: step-size failure or invalid setup."""


@dataclass(frozen=True)
class FixedInspection:
    """Inspection intensity held constant on a phase."""

    p_hat: float


@dataclass(frozen=True)
class AdaptiveInspection:
    """Inspection intensity driven by the adaptive law on a phase.

    The intensity continues from its value at the phase start.  When no
    gain matrix is supplied it is solved from the game parameters.
    """

    adapt_rate: float
    gains: GainMatrix | None = None

    def __post_init__(self) -> None:
        if not self.adapt_rate > 0.0:
            raise ValueError("adapt_rate must be positive")


@dataclass(frozen=True)
class Phase:
    t_start: float
    t_end: float
    mode: FixedInspection | AdaptiveInspection

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t_start) and math.isfinite(self.t_end)):
            raise ValueError("phase times must be finite")
        if self.t_end < self.t_start:
            raise ValueError("phase must not end before it starts")

    @property
    def length(self) -> float:
        return self.t_end - self.t_start


@dataclass(frozen=True)
class Schedule:
    """Contiguous, increasing phases; at most one adaptive phase, last."""

    phases: tuple[Phase, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "phases", tuple(self.phases))
        if not self.phases:
            raise ValueError("schedule needs at least one phase")
        for prev, nxt in zip(self.phases, self.phases[1:]):
            if nxt.t_start != prev.t_end:
                raise ValueError(
                    f"phases must be contiguous: got gap between t={prev.t_end} and t={nxt.t_start}"
                )
        adaptive = [i for i, p in enumerate(self.phases) if isinstance(p.mode, AdaptiveInspection)]
        if len(adaptive) > 1:
            raise ValueError("at most one adaptive phase is allowed")
        if adaptive and adaptive[0] != len(self.phases) - 1:
            raise ValueError("the adaptive phase must be the last one")

    @property
    def t_start(self) -> float:
        return self.phases[0].t_start

    @property
    def t_end(self) -> float:
        return self.phases[-1].t_end

    @property
    def adaptive_mode(self) -> AdaptiveInspection | None:
        mode = self.phases[-1].mode
        return mode if isinstance(mode, AdaptiveInspection) else None


@dataclass
class Trajectory:
    """Time-indexed record of one integration run.

    e1/e2 are derived from the recorded states, so the tracking identity
    e = (x - x_m, y - y_m) holds exactly by construction.  v_lyap is NaN
    when the linearised reference is not Hurwitz (no gain matrix exists).
    """

    params: GameParams
    schedule: Schedule
    step: float
    stride: int
    clamp_p: bool
    gains: GainMatrix | None
    adapt_rate: float
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    x_m: np.ndarray
    y_m: np.ndarray
    p_hat: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    v_lyap: np.ndarray
    phase_index: np.ndarray
    p_hat_min: float
    p_hat_max: float
    p_hat_violation: bool
    clamp_hits: int
    scheme: str = "rk4-fixed"

    def __len__(self) -> int:
        return len(self.t)

    def terminal_state(self) -> PopState:
        return PopState(float(self.x[-1]), float(self.y[-1]))

    def phase_mask(self, index: int) -> np.ndarray:
        return self.phase_index == index

    def slice_time(self, t_lo: float, t_hi: float) -> "Trajectory":
        """Shallow copy restricted to samples with t_lo <= t <= t_hi."""
        keep = (self.t >= t_lo - 1e-12) & (self.t <= t_hi + 1e-12)
        if not keep.any():
            raise ValueError("empty time slice")
        out = replace(self)
        for name in ("t", "x", "y", "x_m", "y_m", "p_hat", "e1", "e2", "v_lyap", "phase_index"):
            setattr(out, name, getattr(self, name)[keep])
        return out


def _phase_step_counts(schedule: Schedule, step: float) -> np.ndarray:
    counts = np.empty(len(schedule.phases), dtype=np.int64)
    for i, phase in enumerate(schedule.phases):
        n = round(phase.length / step)
        if abs(n * step - phase.length) > 1e-9 * max(1.0, phase.length):
            raise IntegrationError(
                f"step {step} does not divide phase {i} "
                f"[{phase.t_start}, {phase.t_end}) of length {phase.length}"
            )
        counts[i] = n
    return counts


def integrate(
    params: GameParams,
    schedule: Schedule,
    x0: float,
    y0: float,
    xm0: float,
    ym0: float,
    p_hat0: float,
    step: float = DEFAULT_STEP,
    horizon: float | None = None,
    *,
    clamp_p: bool = False,
    stride: int = 1,
) -> Trajectory:
    """Integrate the coupled system over the schedule.

    The first sample equals the initial conditions (with the first phase's
    fixed inspection value applied, since a fixed phase owns its start
    time).  In fixed phases the inspection intensity is constant; in the
    adaptive phase it follows the update law, optionally projected onto
    [0, 1] when clamp_p is set.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    if stride < 1:
        raise ValueError("stride must be at least 1")
    if schedule.t_start != 0.0:
        raise IntegrationError("schedule must start at t = 0")
    if horizon is not None and abs(schedule.t_end - horizon) > 1e-9:
        raise IntegrationError(
            f"schedule ends at {schedule.t_end}, which does not cover horizon {horizon}"
        )
    for name, v, hi in (("x0", x0, 1.0), ("xm0", xm0, 1.0), ("y0", y0, params.r_max), ("ym0", ym0, params.r_max)):
        if not math.isfinite(v) or v < 0.0 or v > hi:
            raise ValueError(f"initial condition {name}={v} outside [0, {hi}]")
    if not math.isfinite(p_hat0):
        raise ValueError("p_hat0 must be finite")

    counts = _phase_step_counts(schedule, step)
    adaptive_mode = schedule.adaptive_mode
    gains: GainMatrix | None
    if adaptive_mode is not None:
        adapt_rate = adaptive_mode.adapt_rate
        gains = adaptive_mode.gains or solve_lyapunov(reference_matrix(params))
    else:
        adapt_rate = DEFAULT_ADAPT_RATE
        try:
            gains = solve_lyapunov(reference_matrix(params))
        except ReferenceUnstableError:
            gains = None

    total = int(counts.sum())
    n_samples = total // stride + 1 + (1 if total % stride else 0)
    t_out = np.empty(n_samples)
    x_out = np.empty(n_samples)
    y_out = np.empty(n_samples)
    xm_out = np.empty(n_samples)
    ym_out = np.empty(n_samples)
    p_out = np.empty(n_samples)
    phase_out = np.empty(n_samples, dtype=np.int64)

    phase_adaptive = np.array(
        [1 if isinstance(p.mode, AdaptiveInspection) else 0 for p in schedule.phases],
        dtype=np.int64,
    )
    phase_p = np.array(
        [p.mode.p_hat if isinstance(p.mode, FixedInspection) else 0.0 for p in schedule.phases]
    )
    q11 = gains.q11 if gains is not None else 0.0
    q12 = gains.q12 if gains is not None else 0.0

    status, fail_step, p_min, p_max, clamp_hits = _kernels.integrate_coupled(
        params.r, params.alpha, params.beta, float(params.n_players),
        params.r_max, params.b_max, params.p_star,
        q11, q12, adapt_rate, clamp_p,
        x0, y0, xm0, ym0, p_hat0, step,
        counts, phase_adaptive, phase_p, stride,
        t_out, x_out, y_out, xm_out, ym_out, p_out, phase_out,
    )
    if status != _kernels.STATUS_OK:
        raise IntegrationError(
            f"{_STATUS_MESSAGES[status]} at step {fail_step} (t = {fail_step * step:g}); "
            "this indicates step-size failure or an out-of-range configuration"
        )

    e1 = x_out - xm_out
    e2 = y_out - ym_out
    if gains is not None:
        p_tilde = p_out - params.p_star
        v_lyap = (
            gains.q11 * e1 * e1
            + 2.0 * gains.q12 * e1 * e2
            + gains.q22 * e2 * e2
            + p_tilde * p_tilde / adapt_rate
        )
    else:
        v_lyap = np.full_like(e1, np.nan)

    return Trajectory(
        params=params,
        schedule=schedule,
        step=step,
        stride=stride,
        clamp_p=clamp_p,
        gains=gains,
        adapt_rate=adapt_rate,
        t=t_out,
        x=x_out,
        y=y_out,
        x_m=xm_out,
        y_m=ym_out,
        p_hat=p_out,
        e1=e1,
        e2=e2,
        v_lyap=v_lyap,
        phase_index=phase_out,
        p_hat_min=p_min,
        p_hat_max=p_max,
        p_hat_violation=(p_min < 0.0 or p_max > 1.0),
        clamp_hits=int(clamp_hits),
    )


def normalized_distance(x: np.ndarray, y: np.ndarray, target: PopState, r_max: float) -> np.ndarray:
    """Box metric used for convergence and classification: the cooperator
    fraction is compared as-is, the stock relative to carrying capacity."""
    return np.maximum(np.abs(x - target.x), np.abs(y - target.y) / r_max)


def detect_convergence(
    traj: Trajectory,
    target: PopState,
    tol: float = 1e-3,
    window: float = 100.0,
) -> tuple[bool, float | None]:
    """Whether the run settled at ``target``, and since when.

    Converged means the normalized distance stays below ``tol`` over the
    trailing ``window`` time units; the settle time is the earliest sample
    time after which the distance never re-exceeds ``tol``.
    """
    if tol <= 0.0 or window <= 0.0:
        raise ValueError("tol and window must be positive")
    span = traj.t[-1] - traj.t[0]
    if window > span:
        raise ValueError(f"window {window} longer than trajectory span {span}")
    dist = normalized_distance(traj.x, traj.y, target, traj.params.r_max)
    in_window = traj.t >= traj.t[-1] - window
    converged = bool(dist[in_window].max() < tol)
    if not converged:
        return False, None
    above = np.nonzero(dist >= tol)[0]
    settle_idx = 0 if len(above) == 0 else above[-1] + 1
    return True, float(traj.t[settle_idx])


class RegimeLabel(Enum):
    DESIRED = "desired"
    ALL_DEFECT_SUSTAINED = "all-defect-sustained"
    COEXISTENCE = "coexistence-interior"
    DEPLETED = "depleted"
    BOUNDARY = "boundary/undetermined"
    NON_CONVERGENT = "non-convergent"


_KIND_TO_LABEL = {
    FixedPointKind.ORIGIN: RegimeLabel.DEPLETED,
    FixedPointKind.ALL_COOP_DEPLETED: RegimeLabel.DEPLETED,
    FixedPointKind.ALL_DEFECT: RegimeLabel.ALL_DEFECT_SUSTAINED,
    FixedPointKind.ALL_COOP_SUSTAINED: RegimeLabel.DESIRED,
    FixedPointKind.INTERIOR: RegimeLabel.COEXISTENCE,
}


def classify_regime(
    params: GameParams,
    p_hat: float,
    horizon: float = 5000.0,
    step: float = DEFAULT_STEP,
    *,
    x0: float = 0.5,
    y0: float | None = None,
    tol: float = 1e-2,
    window: float = 100.0,
    var_tol: float = 1e-6,
) -> RegimeLabel:
    """Asymptotic outcome of the plant at constant inspection intensity.

    Integrates from an interior start (default mid-box) to the horizon,
    then snaps the terminal state to the nearest valid fixed point within
    ``tol`` (normalized).  A trailing window whose normalized variance
    exceeds ``var_tol`` is labelled non-convergent rather than snapped,
    and so is a terminal state near no fixed point.
    """
    if y0 is None:
        y0 = params.r_max / 2.0
    n_steps = round(horizon / step)
    win_steps = min(n_steps, round(window / step))
    status, x_end, y_end, sx, sy, sxx, syy = _kernels.integrate_plant(
        params.r, params.alpha, params.beta, float(params.n_players),
        params.r_max, params.b_max, p_hat, x0, y0, step, n_steps, win_steps,
    )
    if status != _kernels.STATUS_OK:
        raise IntegrationError(_STATUS_MESSAGES[status])
    cnt = float(win_steps)
    var_x = max(sxx / cnt - (sx / cnt) ** 2, 0.0)
    var_y = max(syy / cnt - (sy / cnt) ** 2, 0.0)
    if max(var_x, var_y / params.r_max ** 2) > var_tol:
        return RegimeLabel.NON_CONVERGENT
    best_label = None
    best_dist = math.inf
    for fp in fixed_points(params, p_hat):
        if not fp.valid:
            continue
        d = max(abs(x_end - fp.point.x), abs(y_end - fp.point.y) / params.r_max)
        if d < best_dist:
            best_dist = d
            best_label = _KIND_TO_LABEL[fp.kind]
    if best_label is None or best_dist >= tol:
        return RegimeLabel.NON_CONVERGENT
    return best_label


@dataclass
class RegimeMap:
    """Grid of regime labels over (r, p_hat * beta)."""

    r_values: np.ndarray
    pbeta_values: np.ndarray
    labels: list[list[RegimeLabel]]

    def rows(self):
        """Yield (r, p_beta, label) row-major with r outermost."""
        for i, r in enumerate(self.r_values):
            for j, pb in enumerate(self.pbeta_values):
                yield float(r), float(pb), self.labels[i][j]


def _half_spacing(grid: np.ndarray) -> float:
    if len(grid) < 2:
        return 0.0
    return float(np.diff(grid).min()) / 2.0


def sweep_phase_plane(
    params_base: GameParams,
    r_grid,
    pbeta_grid,
    horizon: float = 5000.0,
    step: float = DEFAULT_STEP,
) -> RegimeMap:
    """Regime label per cell of the (r, p_hat*beta) grid.

    Cells within half a grid spacing of an analytic threshold (the growth
    rates e_c, e_d, or either inspection-pressure curve) are labelled
    boundary/undetermined instead of being classified: arbitrarily slow
    transients there make any simulated label unreliable.
    """
    r_values = np.asarray(sorted(r_grid), dtype=float)
    pbeta_values = np.asarray(sorted(pbeta_grid), dtype=float)
    if len(r_values) == 0 or len(pbeta_values) == 0:
        raise ValueError("grids must be non-empty")
    if r_values[0] <= 0.0:
        raise ValueError("growth rates must be positive")
    eps_r = _half_spacing(r_values)
    eps_p = _half_spacing(pbeta_values)
    labels: list[list[RegimeLabel]] = []
    for r in r_values:
        params = replace(params_base, r=float(r))
        thr = regime_thresholds(params)
        curve_c = thr.p_upper * params.beta
        curve_d = thr.p_lower * params.beta
        row = []
        for pb in pbeta_values:
            near_threshold = (
                abs(r - thr.e_c) < eps_r
                or abs(r - thr.e_d) < eps_r
                or abs(pb - curve_c) < eps_p
                or abs(pb - curve_d) < eps_p
            )
            if near_threshold:
                row.append(RegimeLabel.BOUNDARY)
            else:
                row.append(classify_regime(params, float(pb) / params.beta, horizon, step))
        labels.append(row)
    return RegimeMap(r_values=r_values, pbeta_values=pbeta_values, labels=labels)
