"""Model constants, vector fields, fixed points and growth-regime thresholds
of the inspected-harvest commons game.

A population of ``n_players`` harvesters splits into cooperators (fraction
``x``) who respect a stock-proportional quota and defectors who overharvest
by a factor ``1 + alpha``.  The resource stock ``y`` regrows logistically
toward the carrying capacity ``r_max``.  Defectors caught by institutional
inspection (probability ``p_hat`` per unit time) pay a fine ``beta``, which
couples the strategy dynamics to the inspection intensity:

    dx/dt = x (1 - x) [p_hat * beta - alpha * b_max * y / r_max]
    dy/dt = r y (1 - y / r_max) - n (y / r_max) b_max [1 + (1 - x) alpha]

The all-cooperator sustainable equilibrium ``(1, r_max - n b_max / r)`` is
the governance target throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "GameParams",
    "PopState",
    "FixedPoint",
    "FixedPointKind",
    "RegimeThresholds",
    "plant_rhs",
    "reference_rhs",
    "fixed_points",
    "regime_thresholds",
]

# Boundary snap width for states produced by the fixed-step integrator.
SNAP_TOL = 1e-9


@dataclass(frozen=True)
class GameParams:
    """Static model constants.

    r          intrinsic resource growth rate (1/time)
    alpha      defection severity: defectors harvest (1 + alpha) x the quota
    beta       fine charged to a detected defector (payoff units)
    n_players  population size
    r_max      carrying capacity of the resource pool (resource units)
    b_max      maximal legal per-capita harvest rate at full stock
    p_star     preset institutional inspection probability per unit time
    """

    r: float
    alpha: float
    beta: float
    n_players: int
    r_max: float
    b_max: float
    p_star: float

    def __post_init__(self) -> None:
        vals = (self.r, self.alpha, self.beta, self.r_max, self.b_max, self.p_star)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("game parameters must be finite")
        if min(self.r, self.alpha, self.beta, self.r_max, self.b_max) <= 0:
            raise ValueError("r, alpha, beta, r_max and b_max must be positive")
        if self.n_players < 1:
            raise ValueError("n_players must be at least 1")
        if not 0.0 < self.p_star < 1.0:
            raise ValueError("p_star must lie strictly inside (0, 1)")

    # Derived rates ---------------------------------------------------------

    @property
    def gain_rate_coop(self) -> float:
        """Extraction pressure of an all-cooperator population (1/time)."""
        return self.n_players * self.b_max / self.r_max

    @property
    def gain_rate_defect(self) -> float:
        """Extraction pressure of an all-defector population (1/time)."""
        return self.n_players * self.b_max * (1.0 + self.alpha) / self.r_max

    def legal_harvest(self, y: float) -> float:
        """Per-capita quota at stock level y."""
        return self.b_max * y / self.r_max

    def defector_harvest(self, y: float) -> float:
        """Per-capita intake of a defector at stock level y."""
        return self.legal_harvest(y) * (1.0 + self.alpha)

    @property
    def desired_stock(self) -> float:
        """Resource level of the all-cooperator sustainable equilibrium."""
        return self.r_max - self.n_players * self.b_max / self.r


@dataclass(frozen=True)
class PopState:
    """A point of the co-evolutionary state space.

    x  cooperator fraction (dimensionless)
    y  resource stock (resource units)

    Values within ``SNAP_TOL`` of the natural boundaries (x in {0, 1},
    y = 0) are snapped onto them; the dynamics are invariant there, so a
    hair-width excursion is integrator noise, not model behaviour.  Values
    farther outside are kept verbatim: fixed-point coordinates may lie
    off the simplex and are then reported as invalid rather than rejected.
    """

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("state coordinates must be finite")
        if -SNAP_TOL <= self.x < 0.0:
            object.__setattr__(self, "x", 0.0)
        elif 1.0 < self.x <= 1.0 + SNAP_TOL:
            object.__setattr__(self, "x", 1.0)
        if -SNAP_TOL <= self.y < 0.0:
            object.__setattr__(self, "y", 0.0)


class FixedPointKind(Enum):
    ORIGIN = "origin"
    ALL_COOP_DEPLETED = "all-coop-depleted"
    ALL_DEFECT = "all-defect"
    ALL_COOP_SUSTAINED = "all-coop-sustained"
    INTERIOR = "interior"


@dataclass(frozen=True)
class FixedPoint:
    """An equilibrium of the plant, with validity relative to the state box
    [0, 1] x [0, r_max]."""

    point: PopState
    kind: FixedPointKind
    valid: bool


@dataclass(frozen=True)
class RegimeThresholds:
    """Growth-rate and inspection-probability thresholds separating the
    qualitative outcomes of the game.

    e_c, e_d   extraction pressure of all-cooperator / all-defector
               populations (1/time)
    p_upper    inspection probability above which full cooperation with a
               sustained stock is reachable (requires r > e_c)
    p_lower    analogous threshold built from the defector rate
    """

    e_c: float
    e_d: float
    p_upper: float
    p_lower: float


def plant_rhs(params: GameParams, state: PopState, p_hat: float) -> tuple[float, float]:
    """Velocity (dx/dt, dy/dt) of the game under inspection intensity p_hat.

    Total on finite inputs; p_hat outside [0, 1] is accepted so callers can
    probe diagnostic scenarios, and is flagged by the simulator instead.
    """
    if not math.isfinite(p_hat):
        raise ValueError("p_hat must be finite")
    x, y = state.x, state.y
    dx = x * (1.0 - x) * (p_hat * params.beta - params.alpha * params.b_max * y / params.r_max)
    dy = params.r * y * (1.0 - y / params.r_max) - params.n_players * (
        y / params.r_max
    ) * params.b_max * (1.0 + (1.0 - x) * params.alpha)
    return dx, dy


def reference_rhs(params: GameParams, state: PopState) -> tuple[float, float]:
    """Velocity of the reference model: the same game with the inspection
    intensity held at its preset value p_star."""
    return plant_rhs(params, state, params.p_star)


def _in_box(p: PopState, params: GameParams) -> bool:
    return 0.0 <= p.x <= 1.0 and 0.0 <= p.y <= params.r_max


def fixed_points(params: GameParams, p_hat: float) -> list[FixedPoint]:
    """All five equilibria of the plant at constant p_hat.

    The interior (coexistence) point may coincide with a vertex point when
    its x-coordinate degenerates to 0 or 1; both entries are still returned,
    coincidence being visible from the coordinates themselves.
    """
    n, a, bm, rm, r = params.n_players, params.alpha, params.b_max, params.r_max, params.r
    y_defect = rm - n * bm * (1.0 + a) / r
    interior_x = 1.0 + 1.0 / a - r * rm / (a * bm * n) + p_hat * params.beta * rm * r / (n * a * a * bm * bm)
    interior_y = rm * p_hat * params.beta / (a * bm)
    entries = [
        (PopState(0.0, 0.0), FixedPointKind.ORIGIN),
        (PopState(1.0, 0.0), FixedPointKind.ALL_COOP_DEPLETED),
        (PopState(0.0, y_defect), FixedPointKind.ALL_DEFECT),
        (PopState(1.0, params.desired_stock), FixedPointKind.ALL_COOP_SUSTAINED),
        (PopState(interior_x, interior_y), FixedPointKind.INTERIOR),
    ]
    return [FixedPoint(p, kind, _in_box(p, params)) for p, kind in entries]


def regime_thresholds(params: GameParams) -> RegimeThresholds:
    """Thresholds of the (r, p_hat) regime map for this parameter set."""
    e_c = params.gain_rate_coop
    e_d = params.gain_rate_defect
    ab = params.alpha * params.b_max
    p_upper = (1.0 / params.beta - e_c / (params.r * params.beta)) * ab
    p_lower = (1.0 / params.beta - e_d / (params.r * params.beta)) * ab
    return RegimeThresholds(e_c=e_c, e_d=e_d, p_upper=p_upper, p_lower=p_lower)
