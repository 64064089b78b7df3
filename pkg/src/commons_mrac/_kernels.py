"""JIT-compiled fixed-step integration kernels.

Classical 4th-order scheme throughout.  ``fastmath`` stays off: the
reference channel must be bit-reproducible across runs that differ only in
plant initial conditions or schedule, which rules out operation reordering.

Status codes returned by the kernels:
    0  completed
    1  x (or x_m) left [0, 1] beyond the snap tolerance
    2  y (or y_m) went negative beyond the snap tolerance
    3  a state became non-finite
"""

from __future__ import annotations

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_X_BOX = 1
STATUS_Y_BOX = 2
STATUS_NONFINITE = 3

_SNAP = 1e-9
# Decaying states are flushed to the invariant boundary once they reach the
# bottom of the normal float range: subnormal arithmetic costs ~100x and a
# population of 1e-300 is extinct by any reading.
_FLUSH = 1e-300


@njit(cache=True)
def _rhs5(r, alpha, beta, n, rm, bm, pstar, q11, q12, adapt_rate, adaptive, clamp,
          x, y, xm, ym, ph):
    gx = x * (1.0 - x) * (ph * beta - alpha * bm * y / rm)
    gy = r * y * (1.0 - y / rm) - n * (y / rm) * bm * (1.0 + (1.0 - x) * alpha)
    gxm = xm * (1.0 - xm) * (pstar * beta - alpha * bm * ym / rm)
    gym = r * ym * (1.0 - ym / rm) - n * (ym / rm) * bm * (1.0 + (1.0 - xm) * alpha)
    gp = 0.0
    if adaptive:
        gp = adapt_rate * (q11 * (x - xm) + q12 * (y - ym)) * beta * x * (x - 1.0)
        if clamp and ((ph >= 1.0 and gp > 0.0) or (ph <= 0.0 and gp < 0.0)):
            gp = 0.0
    return gx, gy, gxm, gym, gp


@njit(cache=True)
def integrate_coupled(r, alpha, beta, n, rm, bm, pstar,
                      q11, q12, adapt_rate, clamp,
                      x0, y0, xm0, ym0, p0, h,
                      phase_steps, phase_adaptive, phase_p, stride,
                      t_out, x_out, y_out, xm_out, ym_out, p_out, phase_out):
    """Advance (x, y, x_m, y_m, p_hat) over the phase table, recording every
    ``stride``-th step plus the final one.

    Returns (status, step_of_failure, p_min, p_max, clamp_hits).  Samples at
    a phase boundary carry the index of the phase that ends there; the
    inspection jump of a following fixed phase shows up from the next sample.
    """
    x, y, xm, ym, ph = x0, y0, xm0, ym0, p0
    total = 0
    for i in range(phase_steps.shape[0]):
        total += phase_steps[i]
    step = 0
    si = 0
    p_min = ph
    p_max = ph
    clamp_hits = 0
    for pi in range(phase_steps.shape[0]):
        adaptive = phase_adaptive[pi] == 1
        if not adaptive:
            ph = phase_p[pi]
            if ph < p_min:
                p_min = ph
            if ph > p_max:
                p_max = ph
        if pi == 0:
            t_out[0] = 0.0
            x_out[0] = x
            y_out[0] = y
            xm_out[0] = xm
            ym_out[0] = ym
            p_out[0] = ph
            phase_out[0] = 0
            si = 1
        for _ in range(phase_steps[pi]):
            k1 = _rhs5(r, alpha, beta, n, rm, bm, pstar, q11, q12, adapt_rate,
                       adaptive, clamp, x, y, xm, ym, ph)
            k2 = _rhs5(r, alpha, beta, n, rm, bm, pstar, q11, q12, adapt_rate,
                       adaptive, clamp,
                       x + 0.5 * h * k1[0], y + 0.5 * h * k1[1],
                       xm + 0.5 * h * k1[2], ym + 0.5 * h * k1[3],
                       ph + 0.5 * h * k1[4])
            k3 = _rhs5(r, alpha, beta, n, rm, bm, pstar, q11, q12, adapt_rate,
                       adaptive, clamp,
                       x + 0.5 * h * k2[0], y + 0.5 * h * k2[1],
                       xm + 0.5 * h * k2[2], ym + 0.5 * h * k2[3],
                       ph + 0.5 * h * k2[4])
            k4 = _rhs5(r, alpha, beta, n, rm, bm, pstar, q11, q12, adapt_rate,
                       adaptive, clamp,
                       x + h * k3[0], y + h * k3[1],
                       xm + h * k3[2], ym + h * k3[3],
                       ph + h * k3[4])
            x += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
            y += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
            xm += h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
            ym += h / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
            ph += h / 6.0 * (k1[4] + 2.0 * k2[4] + 2.0 * k3[4] + k4[4])
            step += 1
            if adaptive and clamp:
                if ph > 1.0:
                    ph = 1.0
                    clamp_hits += 1
                elif ph < 0.0:
                    ph = 0.0
                    clamp_hits += 1
            if not (np.isfinite(x) and np.isfinite(y) and np.isfinite(xm)
                    and np.isfinite(ym) and np.isfinite(ph)):
                return STATUS_NONFINITE, step, p_min, p_max, clamp_hits
            if x < 0.0:
                if x >= -_SNAP:
                    x = 0.0
                else:
                    return STATUS_X_BOX, step, p_min, p_max, clamp_hits
            elif x > 1.0:
                if x <= 1.0 + _SNAP:
                    x = 1.0
                else:
                    return STATUS_X_BOX, step, p_min, p_max, clamp_hits
            if xm < 0.0:
                if xm >= -_SNAP:
                    xm = 0.0
                else:
                    return STATUS_X_BOX, step, p_min, p_max, clamp_hits
            elif xm > 1.0:
                if xm <= 1.0 + _SNAP:
                    xm = 1.0
                else:
                    return STATUS_X_BOX, step, p_min, p_max, clamp_hits
            if y < 0.0:
                if y >= -_SNAP:
                    y = 0.0
                else:
                    return STATUS_Y_BOX, step, p_min, p_max, clamp_hits
            if ym < 0.0:
                if ym >= -_SNAP:
                    ym = 0.0
                else:
                    return STATUS_Y_BOX, step, p_min, p_max, clamp_hits
            if x < _FLUSH:
                x = 0.0
            if y < _FLUSH:
                y = 0.0
            if xm < _FLUSH:
                xm = 0.0
            if ym < _FLUSH:
                ym = 0.0
            if ph < p_min:
                p_min = ph
            if ph > p_max:
                p_max = ph
            if step % stride == 0 or step == total:
                t_out[si] = step * h
                x_out[si] = x
                y_out[si] = y
                xm_out[si] = xm
                ym_out[si] = ym
                p_out[si] = ph
                phase_out[si] = pi
                si += 1
    return STATUS_OK, step, p_min, p_max, clamp_hits


@njit(cache=True)
def integrate_plant(r, alpha, beta, n, rm, bm, p_hat, x0, y0, h, n_steps, win_steps):
    """Advance the plant alone at constant inspection intensity, accumulating
    first and second moments over the trailing window.

    Returns (status, x_end, y_end, sum_x, sum_y, sum_xx, sum_yy).
    """
    x, y = x0, y0
    sx = 0.0
    sy = 0.0
    sxx = 0.0
    syy = 0.0
    win_start = n_steps - win_steps
    for step in range(1, n_steps + 1):
        k1x = x * (1.0 - x) * (p_hat * beta - alpha * bm * y / rm)
        k1y = r * y * (1.0 - y / rm) - n * (y / rm) * bm * (1.0 + (1.0 - x) * alpha)
        x2 = x + 0.5 * h * k1x
        y2 = y + 0.5 * h * k1y
        k2x = x2 * (1.0 - x2) * (p_hat * beta - alpha * bm * y2 / rm)
        k2y = r * y2 * (1.0 - y2 / rm) - n * (y2 / rm) * bm * (1.0 + (1.0 - x2) * alpha)
        x3 = x + 0.5 * h * k2x
        y3 = y + 0.5 * h * k2y
        k3x = x3 * (1.0 - x3) * (p_hat * beta - alpha * bm * y3 / rm)
        k3y = r * y3 * (1.0 - y3 / rm) - n * (y3 / rm) * bm * (1.0 + (1.0 - x3) * alpha)
        x4 = x + h * k3x
        y4 = y + h * k3y
        k4x = x4 * (1.0 - x4) * (p_hat * beta - alpha * bm * y4 / rm)
        k4y = r * y4 * (1.0 - y4 / rm) - n * (y4 / rm) * bm * (1.0 + (1.0 - x4) * alpha)
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        if not (np.isfinite(x) and np.isfinite(y)):
            return STATUS_NONFINITE, x, y, sx, sy, sxx, syy
        if x < 0.0:
            if x >= -_SNAP:
                x = 0.0
            else:
                return STATUS_X_BOX, x, y, sx, sy, sxx, syy
        elif x > 1.0:
            if x <= 1.0 + _SNAP:
                x = 1.0
            else:
                return STATUS_X_BOX, x, y, sx, sy, sxx, syy
        if y < 0.0:
            if y >= -_SNAP:
                y = 0.0
            else:
                return STATUS_Y_BOX, x, y, sx, sy, sxx, syy
        if x < _FLUSH:
            x = 0.0
        if y < _FLUSH:
            y = 0.0
        if step > win_start:
            sx += x
            sy += y
            sxx += x * x
            syy += y * y
    return STATUS_OK, x, y, sx, sy, sxx, syy
