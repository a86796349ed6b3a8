"""Jitted inner loops for the optimizer.

The cost objective and the Nelder-Mead iteration are mirrored here in
numba-compiled form for the sweep and threshold searches, which evaluate
the objective tens of millions of times.  The pure-Python versions in
cascade/optimizer remain the reference implementations; the test suite
checks the two paths agree.  If numba is unavailable the package falls
back to the pure-Python path transparently.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap if not (args and callable(args[0])) else args[0]


@njit(cache=True)
def game_cost(phi1, phi2, s, theta, w, d, scaled, p_dp, p_m):
    """Cost of the cascade at (phi1, phi2, s); mirrors cascade.game_cost_fn."""
    d21 = phi2 - phi1
    c21 = math.cos(d21)
    s21 = math.sin(d21)
    c21sq = c21 * c21
    root = math.sqrt(max(0.0, 1.0 - s * s))
    tr_e0 = s * s
    tr_e1 = (1.0 - s * s) * c21sq + s21 * s21
    p_w = 0.0
    p_d = 0.0
    for i in range(2):
        beta = 0.0 if i == 0 else theta
        cb = math.cos(beta - phi1)
        sb = math.sin(beta - phi1)
        e0_pure = s * s * cb * cb
        amp = root * cb * c21 + sb * s21
        t0 = (1.0 - p_dp) * e0_pure + 0.5 * p_dp * tr_e0
        te1 = (1.0 - p_dp) * amp * amp + 0.5 * p_dp * tr_e1
        tn = 1.0 - t0
        p_rec_g0 = t0 * (1.0 - p_m) + tn * p_m
        w_cont = t0 * p_m + tn * (1.0 - p_m)
        w1 = p_m * c21sq * t0 + (1.0 - p_m) * te1
        p_rec_g1 = w1 * (1.0 - p_m) + (w_cont - w1) * p_m
        p_rec_d = w1 * p_m + (w_cont - w1) * (1.0 - p_m)
        if i == 0:
            p_w += 0.5 * p_rec_g1
        else:
            p_w += 0.5 * p_rec_g0
        p_d += 0.5 * p_rec_d
    if scaled:
        return p_w / d + p_d
    return w * p_w + d * p_d


@njit(cache=True)
def _objective(u1, u2, u3, theta, w, d, scaled, p_dp, p_m):
    s = 0.5 * (1.0 + math.tanh(u3))
    if s < 0.0:
        s = 0.0
    elif s > 1.0:
        s = 1.0
    return game_cost(u1, u2, s, theta, w, d, scaled, p_dp, p_m)


@njit(cache=True)
def nelder_mead_cost(
    x0a,
    x0b,
    x0c,
    step,
    theta,
    w,
    d,
    scaled,
    p_dp,
    p_m,
    value_tol,
    point_tol,
    max_evals,
):
    """Nelder-Mead on the transformed cost objective from one start point.

    Mirrors optimizer.nelder_mead with reflection 1.0, expansion 2.0,
    contraction 0.5, shrink 0.5.  Returns (u1, u2, u3, f, evaluations,
    converged).
    """
    n = 3
    pts = np.empty((4, 3))
    for i in range(4):
        pts[i, 0] = x0a
        pts[i, 1] = x0b
        pts[i, 2] = x0c
    for i in range(n):
        pts[i + 1, i] += step
    vals = np.empty(4)
    for i in range(4):
        vals[i] = _objective(pts[i, 0], pts[i, 1], pts[i, 2], theta, w, d, scaled, p_dp, p_m)
    evals = 4
    tmp = np.empty(3)
    cen = np.empty(3)
    xr = np.empty(3)
    xx = np.empty(3)

    converged = False
    while evals < max_evals:
        # insertion sort of the 4 vertices by value
        for i in range(1, 4):
            for j in range(n):
                tmp[j] = pts[i, j]
            fv = vals[i]
            j = i - 1
            while j >= 0 and vals[j] > fv:
                pts[j + 1] = pts[j]
                vals[j + 1] = vals[j]
                j -= 1
            for m in range(n):
                pts[j + 1, m] = tmp[m]
            vals[j + 1] = fv
        f_spread = vals[3] - vals[0]
        x_spread = 0.0
        for i in range(1, 4):
            for j in range(n):
                diff = abs(pts[i, j] - pts[0, j])
                if diff > x_spread:
                    x_spread = diff
        if f_spread < value_tol and x_spread < point_tol:
            converged = True
            break
        for j in range(n):
            cen[j] = (pts[0, j] + pts[1, j] + pts[2, j]) / 3.0
            xr[j] = cen[j] + (cen[j] - pts[3, j])
        fr = _objective(xr[0], xr[1], xr[2], theta, w, d, scaled, p_dp, p_m)
        evals += 1
        if fr < vals[0]:
            for j in range(n):
                xx[j] = cen[j] + 2.0 * (cen[j] - pts[3, j])
            fe = _objective(xx[0], xx[1], xx[2], theta, w, d, scaled, p_dp, p_m)
            evals += 1
            if fe < fr:
                pts[3] = xx
                vals[3] = fe
            else:
                pts[3] = xr
                vals[3] = fr
        elif fr < vals[2]:
            pts[3] = xr
            vals[3] = fr
        else:
            if fr < vals[3]:
                for j in range(n):
                    xx[j] = cen[j] + 0.5 * (xr[j] - cen[j])
            else:
                for j in range(n):
                    xx[j] = cen[j] + 0.5 * (pts[3, j] - cen[j])
            fc = _objective(xx[0], xx[1], xx[2], theta, w, d, scaled, p_dp, p_m)
            evals += 1
            if fc < min(fr, vals[3]):
                pts[3] = xx
                vals[3] = fc
            else:
                for i in range(1, 4):
                    for j in range(n):
                        pts[i, j] = pts[0, j] + 0.5 * (pts[i, j] - pts[0, j])
                    vals[i] = _objective(
                        pts[i, 0], pts[i, 1], pts[i, 2], theta, w, d, scaled, p_dp, p_m
                    )
                evals += n
    if not converged:
        f_spread = vals.max() - vals.min()
        converged = f_spread <= 1e-6

    i_best = 0
    for i in range(1, 4):
        if vals[i] < vals[i_best]:
            i_best = i
    return pts[i_best, 0], pts[i_best, 1], pts[i_best, 2], vals[i_best], evals, converged
