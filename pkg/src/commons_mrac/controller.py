"""Tracking-error machinery and the adaptive inspection law.

Plant and reference model share the all-cooperator equilibrium.  Shifting
both by that equilibrium (``s = x - 1``, ``v = y - desired_stock``) turns the
game into polynomial dynamics whose linear part is a constant lower-triangular
matrix ``a_m``.  The tracking error ``e = (s - s_m, v - v_m)`` then obeys

    de/dt = [a_m + b_m(t) + c_m(t)] e  -  b_p * ptilde * beta * (s + s^2)  +  f(e)

where the time-varying blocks ``b_m``/``c_m`` are built from the reference
offsets, ``b_p = (1, 0)^T`` routes the inspection error ``ptilde = p_hat -
p_star`` into the strategy channel, and ``f`` collects the terms at least
quadratic in ``e``.

The inspection intensity is adapted as

    d p_hat / dt = a * (e' Q b_p) * beta * x * (x - 1)

with ``Q`` the positive-definite solution of ``a_m' Q + Q a_m = -I``; this
choice cancels the parameter-error terms in the derivative of the quadratic
function ``V = e' Q e + ptilde^2 / a`` exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .game import GameParams, PopState, plant_rhs

__all__ = [
    "ShiftedState",
    "ErrorVector",
    "GainMatrix",
    "ControllerState",
    "ErrorSystemMatrices",
    "ReferenceUnstableError",
    "shift",
    "unshift",
    "shifted_rhs",
    "assemble_matrices",
    "remainder_f",
    "error_rhs",
    "solve_lyapunov",
    "p_hat_dot",
    "check_admissible",
    "lyapunov_value",
    "reference_matrix",
]

LYAPUNOV_RESIDUAL_TOL = 1e-9


class ReferenceUnstableError(RuntimeError):
    """The linearised reference dynamics are not Hurwitz, so no
    positive-definite gain matrix exists."""


@dataclass(frozen=True)
class ShiftedState:
    """State expressed relative to the all-cooperator equilibrium:
    s = x - 1, v = y - desired_stock."""

    s: float
    v: float


@dataclass(frozen=True)
class ErrorVector:
    """Tracking error between plant and reference, e1 = s - s_m = x - x_m,
    e2 = v - v_m = y - y_m."""

    e1: float
    e2: float

    def norm2(self) -> float:
        return math.hypot(self.e1, self.e2)


@dataclass(frozen=True)
class GainMatrix:
    """Symmetric positive-definite 2x2 weighting matrix of the error norm.

    q11 weighs the (dimensionless) strategy channel and q22 the resource
    channel; because the channels differ in physical scale by orders of
    magnitude, so do the entries.  No normalisation is applied.
    """

    q11: float
    q12: float
    q22: float

    def __post_init__(self) -> None:
        if not (self.q11 > 0.0 and self.q11 * self.q22 - self.q12 * self.q12 > 0.0):
            raise ValueError("gain matrix must be positive definite")

    def as_array(self) -> np.ndarray:
        return np.array([[self.q11, self.q12], [self.q12, self.q22]])

    @property
    def lambda_min(self) -> float:
        """Smaller eigenvalue, from the closed-form 2x2 formula.

        Computed through the larger root: the direct (tr - sqrt(disc))/2
        cancels catastrophically when the entries differ by orders of
        magnitude, as they do here.
        """
        tr = self.q11 + self.q22
        det = self.q11 * self.q22 - self.q12 * self.q12
        disc = math.hypot(self.q11 - self.q22, 2.0 * self.q12)
        return det / (0.5 * (tr + disc))

    @property
    def frobenius(self) -> float:
        return math.sqrt(self.q11 ** 2 + 2.0 * self.q12 ** 2 + self.q22 ** 2)


@dataclass(frozen=True)
class ControllerState:
    """Adaptive-law configuration plus the current inspection intensity."""

    gains: GainMatrix
    a: float
    p_hat: float
    p_star: float

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise ValueError("adaptation rate a must be positive")

    @property
    def p_tilde(self) -> float:
        return self.p_hat - self.p_star


@dataclass(frozen=True)
class ErrorSystemMatrices:
    """Blocks of the error equation at given reference offsets.

    a_m    constant lower-triangular linear part (2x2)
    b_m_t  block linear in the reference offsets (2x2)
    c_m_t  block quadratic in the reference offsets; second row is zero
    b_p    constant input column (1, 0)^T

    The remainder vector is a function of the error itself and is computed
    by :func:`remainder_f`, not stored here.
    """

    a_m: np.ndarray
    b_m_t: np.ndarray
    c_m_t: np.ndarray
    b_p: np.ndarray


def shift(params: GameParams, state: PopState) -> ShiftedState:
    """Express a state relative to the all-cooperator equilibrium."""
    return ShiftedState(state.x - 1.0, state.y - params.desired_stock)


def unshift(params: GameParams, w: ShiftedState) -> PopState:
    """Inverse of :func:`shift`."""
    return PopState(w.s + 1.0, w.v + params.desired_stock)


def _strategy_gain(params: GameParams) -> float:
    """Coefficient alpha*b_max - alpha*n*b_max^2/(r_max*r): the strategy
    channel's self-coupling before the inspection fine is subtracted."""
    return params.alpha * params.b_max - params.alpha * params.n_players * params.b_max ** 2 / (
        params.r_max * params.r
    )


def shifted_rhs(params: GameParams, w: ShiftedState, p_hat: float) -> tuple[float, float]:
    """Velocity (ds/dt, dv/dt) of the equilibrium-shifted plant.

    Equal to the plant velocity at the unshifted state, since the shift is
    constant in time.
    """
    if not math.isfinite(p_hat):
        raise ValueError("p_hat must be finite")
    c = _strategy_gain(params) - p_hat * params.beta
    ab_r = params.alpha * params.b_max / params.r_max
    s, v = w.s, w.v
    ds = c * s + c * s * s + ab_r * s * v + ab_r * s * s * v
    dv = (
        (params.alpha * params.b_max * params.n_players
         - params.alpha * params.n_players ** 2 * params.b_max ** 2 / (params.r_max * params.r)) * s
        + (params.n_players * params.b_max / params.r_max - params.r) * v
        - params.r / params.r_max * v * v
        + params.alpha * params.n_players * params.b_max / params.r_max * s * v
    )
    return ds, dv


def reference_matrix(params: GameParams) -> np.ndarray:
    """Constant linear part a_m of the shifted reference dynamics."""
    a11 = _strategy_gain(params) - params.p_star * params.beta
    a21 = params.alpha * params.b_max * params.n_players - params.alpha * params.n_players ** 2 * params.b_max ** 2 / (
        params.r_max * params.r
    )
    a22 = params.n_players * params.b_max / params.r_max - params.r
    return np.array([[a11, 0.0], [a21, a22]])


def assemble_matrices(params: GameParams, ref_shifted: ShiftedState) -> ErrorSystemMatrices:
    """Error-system blocks at reference offsets (s_m, v_m)."""
    a_m = reference_matrix(params)
    a11 = a_m[0, 0]
    ab_r = params.alpha * params.b_max / params.r_max
    anb_r = params.alpha * params.n_players * params.b_max / params.r_max
    sm, vm = ref_shifted.s, ref_shifted.v
    b_m = np.array(
        [
            [2.0 * a11 * sm + ab_r * vm, ab_r * sm],
            [anb_r * vm, -2.0 * params.r / params.r_max * vm + anb_r * sm],
        ]
    )
    c_m = np.array([[2.0 * ab_r * sm * vm, ab_r * sm * sm], [0.0, 0.0]])
    b_p = np.array([1.0, 0.0])
    return ErrorSystemMatrices(a_m=a_m, b_m_t=b_m, c_m_t=c_m, b_p=b_p)


def remainder_f(params: GameParams, e: ErrorVector, ref_shifted: ShiftedState) -> np.ndarray:
    """Terms of the error dynamics at least quadratic in the error."""
    a11 = _strategy_gain(params) - params.p_star * params.beta
    ab_r = params.alpha * params.b_max / params.r_max
    anb_r = params.alpha * params.n_players * params.b_max / params.r_max
    e1, e2 = e.e1, e.e2
    sm, vm = ref_shifted.s, ref_shifted.v
    f1 = a11 * e1 * e1 + ab_r * ((1.0 + 2.0 * sm) * e1 * e2 + vm * e1 * e1 + e1 * e1 * e2)
    f2 = -params.r / params.r_max * e2 * e2 + anb_r * e1 * e2
    return np.array([f1, f2])


def error_rhs(
    params: GameParams,
    e: ErrorVector,
    ref_shifted: ShiftedState,
    plant_shifted: ShiftedState,
    ctrl: ControllerState,
) -> np.ndarray:
    """Velocity of the tracking error, evaluated from the block form.

    The passed error must equal plant_shifted - ref_shifted; silent drift
    between the two representations is the most likely integration bug, so
    the consistency is recomputed here rather than trusted.
    """
    d1 = plant_shifted.s - ref_shifted.s
    d2 = plant_shifted.v - ref_shifted.v
    scale = max(1.0, abs(d1), abs(d2))
    if abs(e.e1 - d1) > 1e-12 * scale or abs(e.e2 - d2) > 1e-12 * scale:
        raise ValueError("error vector inconsistent with the shifted states")
    mats = assemble_matrices(params, ref_shifted)
    ev = np.array([e.e1, e.e2])
    s = plant_shifted.s
    drive = ctrl.p_tilde * params.beta * (s + s * s)
    return (mats.a_m + mats.b_m_t + mats.c_m_t) @ ev - mats.b_p * drive + remainder_f(
        params, e, ref_shifted
    )


def solve_lyapunov(a_m: np.ndarray) -> GainMatrix:
    """Positive-definite Q with a_m' Q + Q a_m = -I for lower-triangular a_m.

    The three scalar equations are solved in closed form:

        2 a11 q11 + 2 a21 q12 = -1
        (a11 + a22) q12 + a21 q22 = 0
        2 a22 q22 = -1
    """
    a_m = np.asarray(a_m, dtype=float)
    if a_m.shape != (2, 2):
        raise ValueError("a_m must be 2x2")
    if abs(a_m[0, 1]) > 0.0:
        raise ValueError("closed-form solve expects a lower-triangular matrix")
    a11, a21, a22 = a_m[0, 0], a_m[1, 0], a_m[1, 1]
    if not (a11 < 0.0 and a22 < 0.0):
        raise ReferenceUnstableError(
            "reference system unstable: check r > e_c and p* > p_upper"
        )
    if a11 + a22 == 0.0:
        raise ArithmeticError("singular Lyapunov solve: a11 + a22 = 0")
    q22 = -1.0 / (2.0 * a22)
    q12 = -a21 * q22 / (a11 + a22)
    q11 = (-1.0 - 2.0 * a21 * q12) / (2.0 * a11)
    q = GainMatrix(q11=q11, q12=q12, q22=q22)
    res = a_m.T @ q.as_array() + q.as_array() @ a_m + np.eye(2)
    if np.abs(res).max() >= LYAPUNOV_RESIDUAL_TOL:
        raise ArithmeticError(f"Lyapunov residual {np.abs(res).max():.3e} above tolerance")
    return q


def p_hat_dot(ctrl: ControllerState, e: ErrorVector, x: float, beta: float) -> float:
    """Adaptation velocity of the inspection intensity.

    Exactly zero at the strategy-pure states x = 0 and x = 1 and at zero
    tracking error: the law only learns while cooperators and defectors
    coexist and the plant deviates from the reference.
    """
    return ctrl.a * (ctrl.gains.q11 * e.e1 + ctrl.gains.q12 * e.e2) * beta * x * (x - 1.0)


def lyapunov_value(ctrl: ControllerState, e: ErrorVector) -> float:
    """V = e' Q e + ptilde^2 / a; positive definite in (e, ptilde)."""
    g = ctrl.gains
    pt = ctrl.p_tilde
    return g.q11 * e.e1 ** 2 + 2.0 * g.q12 * e.e1 * e.e2 + g.q22 * e.e2 ** 2 + pt * pt / ctrl.a


def check_admissible(ctrl: ControllerState, e0: ErrorVector, roa) -> tuple[bool, float]:
    """Whether (e0, ptilde0) starts inside the estimated region of attraction.

    The condition is strict: V(e0, ptilde0) < lambda_min(Q) * m^2.  Returns
    the verdict together with the slack (bound minus left-hand side).  An
    unusable estimate (non-positive ball radius) certifies nothing, so its
    bound counts as zero.
    """
    if roa.gains is not None and roa.gains != ctrl.gains:
        raise ValueError("attraction estimate was computed for a different gain matrix")
    lhs = lyapunov_value(ctrl, e0)
    bound = roa.lambda_min_q * roa.m * roa.m if roa.m > 0.0 else 0.0
    return lhs < bound, bound - lhs
