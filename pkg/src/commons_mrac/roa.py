"""Explicit region-of-attraction estimate for the adaptive inspection law.

The derivative of V = e'Qe + ptilde^2/a along the closed loop is bounded by

    dV/dt <= -||e||^2 [ 1 - k*eps - 2 ||Q||_F K ||e|| ]

where ``eps`` bounds the reference offsets |s_m|, |v_m| after their
transient, ``k`` collects the Frobenius norm of the time-varying blocks'
contribution, and ``K = sqrt(l1 + l2)`` bounds the quadratic remainder under
an assumed error bound ``||e|| < b``.  Inside the ball ``||e|| < m`` with

    m = min( (1 - k*eps) / (2 ||Q||_F K),  b )

V is non-increasing, and the sublevel set {V < c}, c = lambda_min(Q) m^2,
is an estimate of the region of attraction.

Two caveats are inherited from the construction and kept as-is rather than
silently corrected: the offset bound eps formally holds only after the
reference transient, and the resource-channel bound treats the squared
offset term linearly in eps (valid because eps < 1 is required anyway).
The estimate is sufficient-only and usually very conservative; nothing is
claimed about initial conditions outside it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .controller import GainMatrix, _strategy_gain
from .game import GameParams

__all__ = ["AttractionEstimate", "compute_k", "compute_K", "compute_roa", "maximize_m"]


@dataclass(frozen=True)
class AttractionEstimate:
    """Bound constants and resulting attraction-ball radius for one (Q, a).

    epsilon       assumed bound on the reference offsets (0 < epsilon < 1)
    b             assumed bound on the error norm
    k1, k2, k3    entrywise bounds of the time-varying blocks, k their norm
    l1, l2        remainder bounds per channel, big_k = sqrt(l1 + l2)
    m             radius of the ball where V is non-increasing
    c             sublevel value lambda_min(Q) * m^2
    usable        True iff 1 - k*epsilon > 0 (otherwise m is non-positive)
    """

    epsilon: float
    b: float
    k1: float
    k2: float
    k3: float
    k: float
    l1: float
    l2: float
    big_k: float
    m: float
    c: float
    lambda_min_q: float
    q_frobenius: float
    usable: bool
    gains: GainMatrix | None = None
    a: float | None = None


def compute_k(params: GameParams, q: GainMatrix, epsilon: float) -> tuple[float, float, float, float]:
    """Coefficients (k1, k2, k3) bounding the time-varying blocks' entries
    per unit of offset bound, and k = sqrt(k1^2 + 2 k2^2 + k3^2).

    k itself does not depend on epsilon; the argument is kept so the call
    mirrors the other constants' signatures.
    """
    del epsilon
    a11 = _strategy_gain(params) - params.p_star * params.beta
    ab_r = params.alpha * params.b_max / params.r_max
    anb_r = params.alpha * params.n_players * params.b_max / params.r_max
    n = params.n_players
    q11, q12, q22 = q.q11, q.q12, q.q22
    k1 = 4.0 * q11 * abs(a11) + 6.0 * q11 * ab_r + 2.0 * abs(q12) * anb_r
    k2 = (
        2.0 * abs(q12 * a11)
        + (2.0 * q11 + n * abs(q12) + 2.0 * abs(q12) + n * q22) * ab_r
        + abs(q12) * 2.0 * params.r / params.r_max
    )
    k3 = (4.0 * abs(q12) + 2.0 * n * q22) * ab_r + q22 * 4.0 * params.r / params.r_max
    k = math.sqrt(k1 * k1 + 2.0 * k2 * k2 + k3 * k3)
    return k1, k2, k3, k


def compute_K(params: GameParams, epsilon: float, b: float) -> tuple[float, float, float]:
    """Remainder-bound coefficients (l1, l2) and big_k = sqrt(l1 + l2)."""
    a11 = _strategy_gain(params) - params.p_star * params.beta
    ab_r = params.alpha * params.b_max / params.r_max
    l1 = (
        a11 * a11
        + 2.0 * abs(a11) * ab_r
        + epsilon * (16.0 * ab_r * ab_r + 6.0 * abs(a11) * ab_r)
        + b * (2.0 * abs(a11) + (2.0 + 6.0 * epsilon) * ab_r * ab_r)
        + b * b * ab_r * ab_r
    )
    l2 = (params.r / params.r_max - params.alpha * params.n_players * params.b_max / params.r_max) ** 2
    return l1, l2, math.sqrt(l1 + l2)


def compute_roa(
    params: GameParams,
    q: GainMatrix,
    a: float,
    epsilon: float,
    b: float,
) -> AttractionEstimate:
    """Full attraction estimate for gain matrix q and adaptation rate a.

    When 1 - k*epsilon <= 0 the radius formula is non-positive and the
    estimate is returned flagged unusable instead of raising: an over-large
    epsilon is an answerable query, not a programming error.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie strictly inside (0, 1)")
    if not b > 0.0:
        raise ValueError("error bound b must be positive")
    if not a > 0.0:
        raise ValueError("adaptation rate a must be positive")
    k1, k2, k3, k = compute_k(params, q, epsilon)
    l1, l2, big_k = compute_K(params, epsilon, b)
    margin = 1.0 - k * epsilon
    m = min(margin / (2.0 * q.frobenius * big_k), b)
    lam = q.lambda_min
    return AttractionEstimate(
        epsilon=epsilon,
        b=b,
        k1=k1,
        k2=k2,
        k3=k3,
        k=k,
        l1=l1,
        l2=l2,
        big_k=big_k,
        m=m,
        c=lam * m * m,
        lambda_min_q=lam,
        q_frobenius=q.frobenius,
        usable=margin > 0.0,
        gains=q,
        a=a,
    )


def maximize_m(
    params: GameParams,
    q: GainMatrix,
    a: float,
    b: float,
    grid: Sequence[float],
) -> AttractionEstimate:
    """Largest-radius estimate over a grid of offset bounds.

    Ties break toward the smaller epsilon, making the result deterministic
    for any grid ordering.
    """
    if len(grid) == 0:
        raise ValueError("epsilon grid must not be empty")
    best: AttractionEstimate | None = None
    for eps in sorted(grid):
        est = compute_roa(params, q, a, eps, b)
        if best is None or est.m > best.m:
            best = est
    return best
