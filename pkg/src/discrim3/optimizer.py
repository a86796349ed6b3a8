"""Derivative-free minimization of the game cost over (phi1, phi2, s).

The cost landscape is nonconvex, so the minimizer is a multi-start
Nelder-Mead over unconstrained coordinates (u1, u2, u3) with phi1 = u1,
phi2 = u2 (periodic, no constraint needed) and s = (1 + tanh(u3))/2.
Boundary optima at s = 1 are caught by evaluating the two projective
embeddings of the cascade directly.  On top of that sit the parameter
sweeps, the violation maximization over k, and the noise-threshold
bisections.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels, bounds
from .bounds import CostMode, CostWeights, StatePair
from .cascade import IDEAL, CascadeParams, NoiseModel, game_cost_fn
from .qmath import _wrap_pi

GOLDEN = 0.5 * (math.sqrt(5.0) - 1.0)

# Final restarts are considered to have found the same optimum when their
# values agree to this tolerance.
AGREE_TOL = 1e-9


@dataclass(frozen=True)
class NelderMeadResult:
    x: tuple[float, ...]
    fun: float
    evaluations: int
    converged: bool


@dataclass(frozen=True)
class OptimizationResult:
    best_params: CascadeParams
    best_cost: float
    restarts_agreeing: int
    evaluations: int
    converged: bool


@dataclass(frozen=True)
class ViolationRecord:
    theta: float
    k: float
    c_mh: float
    c_min: float
    delta: float
    noise: NoiseModel
    mode: CostMode


@dataclass(frozen=True)
class ThresholdResult:
    channel: str
    threshold: float
    bracket: tuple[float, float]
    theta_at_peak: float
    degenerate: bool = False


def nelder_mead(
    objective,
    simplex,
    value_tol: float = 1e-12,
    point_tol: float = 1e-10,
    max_evals: int = 100_000,
) -> NelderMeadResult:
    """Standard Nelder-Mead from a seed simplex of n+1 points.

    Coefficients: reflection 1.0, expansion 2.0, contraction 0.5,
    shrink 0.5.  Terminates when the simplex value spread is below
    value_tol and the point spread below point_tol, or at max_evals.
    Non-convergence (cap hit with value spread above 1e-6) is flagged,
    not raised.
    """
    pts = [list(map(float, p)) for p in simplex]
    n = len(pts[0])
    if len(pts) != n + 1:
        raise ValueError("seed simplex must have n+1 points")
    vals = [objective(*p) for p in pts]
    evals = len(pts)

    def spread():
        f_spread = max(vals) - min(vals)
        best = pts[vals.index(min(vals))]
        x_spread = max(
            max(abs(p[i] - best[i]) for i in range(n)) for p in pts
        )
        return f_spread, x_spread

    converged = False
    while evals < max_evals:
        order = sorted(range(n + 1), key=lambda i: vals[i])
        pts = [pts[i] for i in order]
        vals = [vals[i] for i in order]
        f_spread, x_spread = spread()
        if f_spread < value_tol and x_spread < point_tol:
            converged = True
            break
        centroid = [sum(p[i] for p in pts[:-1]) / n for i in range(n)]
        worst = pts[-1]
        xr = [centroid[i] + (centroid[i] - worst[i]) for i in range(n)]
        fr = objective(*xr)
        evals += 1
        if fr < vals[0]:
            xe = [centroid[i] + 2.0 * (centroid[i] - worst[i]) for i in range(n)]
            fe = objective(*xe)
            evals += 1
            if fe < fr:
                pts[-1], vals[-1] = xe, fe
            else:
                pts[-1], vals[-1] = xr, fr
        elif fr < vals[-2]:
            pts[-1], vals[-1] = xr, fr
        else:
            if fr < vals[-1]:
                xc = [centroid[i] + 0.5 * (xr[i] - centroid[i]) for i in range(n)]
            else:
                xc = [centroid[i] + 0.5 * (worst[i] - centroid[i]) for i in range(n)]
            fc = objective(*xc)
            evals += 1
            if fc < min(fr, vals[-1]):
                pts[-1], vals[-1] = xc, fc
            else:
                best = pts[0]
                for i in range(1, n + 1):
                    pts[i] = [best[j] + 0.5 * (pts[i][j] - best[j]) for j in range(n)]
                    vals[i] = objective(*pts[i])
                evals += n
    else:
        f_spread, _ = spread()
        converged = f_spread <= 1e-6

    i_best = vals.index(min(vals))
    return NelderMeadResult(tuple(pts[i_best]), vals[i_best], evals, converged)


def _s_from_u(u3: float) -> float:
    return min(1.0, max(0.0, 0.5 * (1.0 + math.tanh(u3))))


def _deterministic_starts(pair: StatePair, weights: CostWeights) -> list[tuple[float, float, float]]:
    """Seed points: the two projective embeddings (near s=1) and a midpoint."""
    _, angle_a = bounds.cost_strategy_a(pair, weights)
    _, angle_b = bounds.cost_strategy_b(pair, weights)
    half = 0.5 * pair.theta
    return [
        (angle_a, angle_a + 0.5 * math.pi, 3.0),
        (angle_b, angle_b, 3.0),
        (half, half + 0.5 * math.pi, 0.0),
    ]


def minimize_cost(
    pair: StatePair,
    weights: CostWeights,
    noise: NoiseModel = IDEAL,
    seed: int = 0,
    n_random: int = 16,
    extra_starts: tuple[tuple[float, float, float], ...] = (),
    fast: bool = True,
) -> OptimizationResult:
    """Global cost minimum over cascade parameters by multi-start Nelder-Mead.

    Starts from the two projective embeddings, a mid-strength point,
    n_random seeded random points, and any extra_starts (e.g. warm
    starts from a neighboring grid point).  The exact s=1 projective
    configurations are always evaluated directly, so the result never
    exceeds the best projective cost.  With fast=True (default) the
    inner loop runs through the jitted kernel when numba is available;
    both paths implement the identical iteration.
    """
    cost_fn = game_cost_fn(pair.theta, weights, noise)

    def objective(u1: float, u2: float, u3: float) -> float:
        return cost_fn(u1, u2, _s_from_u(u3))

    use_kernel = fast and _kernels.HAVE_NUMBA
    if weights.mode is CostMode.SCALED:
        kw, kd, scaled = 1.0, weights.k, True
    else:
        kw, kd, scaled = weights.w, weights.d, False

    starts = _deterministic_starts(pair, weights) + list(extra_starts)
    if n_random > 0:
        rng = np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFF, 0x5EED]))
        for _ in range(n_random):
            starts.append(
                (
                    rng.uniform(-math.pi, math.pi),
                    rng.uniform(-math.pi, math.pi),
                    rng.uniform(-2.0, 2.0),
                )
            )

    step = 0.25
    best: NelderMeadResult | None = None
    finals: list[float] = []
    total_evals = 0
    all_converged = True
    for x0 in starts:
        if use_kernel:
            u1, u2, u3, fun, evals, conv = _kernels.nelder_mead_cost(
                x0[0], x0[1], x0[2], step, pair.theta, kw, kd, scaled,
                noise.p_dp, noise.p_m, 1e-12, 1e-10, 100_000,
            )
            res = NelderMeadResult((u1, u2, u3), fun, int(evals), bool(conv))
        else:
            simplex = [x0] + [
                tuple(x0[j] + (step if j == i else 0.0) for j in range(3))
                for i in range(3)
            ]
            res = nelder_mead(objective, simplex)
        total_evals += res.evaluations
        all_converged = all_converged and res.converged
        finals.append(res.fun)
        if best is None or res.fun < best.fun:
            best = res

    assert best is not None
    u1, u2, u3 = best.x
    best_cost = best.fun
    best_params = CascadeParams(_wrap_pi(u1), _wrap_pi(u2), _s_from_u(u3))

    # Exact projective embeddings (s = 1): guess-both uses phi2 = phi1 + pi/2,
    # guess-one uses phi2 = phi1.  These catch boundary optima the tanh
    # transform can only approach.
    _, angle_a = bounds.cost_strategy_a(pair, weights)
    _, angle_b = bounds.cost_strategy_b(pair, weights)
    for phi1, phi2 in ((angle_a, angle_a + 0.5 * math.pi), (angle_b, angle_b)):
        value = cost_fn(phi1, phi2, 1.0)
        total_evals += 1
        if value < best_cost:
            best_cost = value
            best_params = CascadeParams(_wrap_pi(phi1), _wrap_pi(phi2), 1.0)

    agreeing = sum(1 for f in finals if f <= best_cost + AGREE_TOL)
    return OptimizationResult(
        best_params=best_params,
        best_cost=best_cost,
        restarts_agreeing=max(1, agreeing),
        evaluations=total_evals,
        converged=all_converged,
    )


def _mh_cost(theta: float, k: float, mode: CostMode) -> float:
    pair = StatePair(theta)
    value, _ = bounds.mh_bound(pair, CostWeights.from_k(k, mode))
    return value


def violation_at(
    theta: float,
    k: float,
    noise: NoiseModel = IDEAL,
    mode: CostMode = CostMode.ABSOLUTE,
    seed: int = 0,
    n_random: int = 16,
    extra_starts: tuple[tuple[float, float, float], ...] = (),
) -> tuple[ViolationRecord, OptimizationResult]:
    """One grid point: optimal cost, ideal projective bound, and their gap."""
    pair = StatePair(theta)
    weights = CostWeights.from_k(k, mode)
    result = minimize_cost(
        pair, weights, noise, seed=seed, n_random=n_random, extra_starts=extra_starts
    )
    c_mh = _mh_cost(theta, k, mode)
    record = ViolationRecord(
        theta=theta,
        k=k,
        c_mh=c_mh,
        c_min=result.best_cost,
        delta=c_mh - result.best_cost,
        noise=noise,
        mode=mode,
    )
    return record, result


def _sweep_point(args) -> tuple:
    theta, k, p_dp, p_m, mode, seed, index, n_random = args
    noise = NoiseModel(p_dp, p_m)
    record, result = violation_at(
        theta,
        k,
        noise,
        CostMode(mode),
        seed=_point_seed(seed, index),
        n_random=n_random,
    )
    return index, record, result


def _point_seed(run_seed: int, index: int) -> int:
    # Independent, reproducible stream per grid point.
    return int(np.random.SeedSequence([run_seed & 0xFFFFFFFF, index]).generate_state(1)[0])


def sweep(
    theta_list,
    k_grid,
    noise: NoiseModel = IDEAL,
    mode: CostMode = CostMode.ABSOLUTE,
    seed: int = 0,
    jobs: int = 1,
    n_random: int = 8,
) -> list[ViolationRecord]:
    """Violation records over the (theta, k) grid, row-major theta then k.

    Grid points are independent tasks seeded by (run seed, grid index),
    so serial and parallel execution give identical output.
    """
    if not theta_list or not k_grid:
        raise ValueError("theta and k grids must be non-empty")
    tasks = []
    index = 0
    for theta in theta_list:
        for k in k_grid:
            tasks.append((theta, k, noise.p_dp, noise.p_m, mode.value, seed, index, n_random))
            index += 1
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, tasks, chunksize=8))
    else:
        results = [_sweep_point(t) for t in tasks]
    results.sort(key=lambda r: r[0])
    return [record for _, record, _ in results]


def max_violation(
    theta: float,
    noise: NoiseModel = IDEAL,
    seed: int = 0,
    mode: CostMode = CostMode.ABSOLUTE,
    n_random: int = 4,
    coarse_points: int = 25,
) -> tuple[float, float]:
    """(k_star, delta_max): the k maximizing the bound violation at this theta.

    Coarse grid around the projective kink k_opt(theta), then
    golden-section refinement.  If no violation exists anywhere on the
    grid (orthogonal states, or noise past threshold), k_star is
    reported as 0.0 with the (possibly negative or zero) best delta.
    """
    k_kink = bounds.k_opt(theta)
    lo = max(1e-3, k_kink - 0.15)
    hi = min(0.55, k_kink + 0.15)
    if hi <= lo:
        hi = lo + 0.1

    cache: dict[float, float] = {}

    def delta(k: float) -> float:
        if k not in cache:
            record, _ = violation_at(
                theta, k, noise, mode, seed=seed, n_random=n_random
            )
            cache[k] = record.delta
        return cache[k]

    ks = list(np.linspace(lo, hi, coarse_points))
    deltas = [delta(k) for k in ks]
    i_best = int(np.argmax(deltas))
    if deltas[i_best] < 1e-8:
        return 0.0, deltas[i_best]

    a = ks[max(0, i_best - 1)]
    b = ks[min(len(ks) - 1, i_best + 1)]
    # Golden-section maximization of delta on [a, b].
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = delta(x1), delta(x2)
    while b - a > 2e-4:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = delta(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = delta(x2)
    k_star = x1 if f1 >= f2 else x2
    return k_star, max(f1, f2)


def global_max_violation(
    noise: NoiseModel,
    seed: int = 0,
    n_theta: int = 50,
    n_random: int = 2,
) -> tuple[float, float]:
    """(theta_at_peak, delta_max) maximized over theta at the given noise."""
    thetas = np.linspace(0.05, 0.5 * math.pi, n_theta)
    best_theta, best_delta = thetas[0], -math.inf
    deltas = []
    for theta in thetas:
        _, d = max_violation(theta, noise, seed=seed, n_random=n_random, coarse_points=13)
        deltas.append(d)
        if d > best_delta:
            best_theta, best_delta = float(theta), d
    # Golden-section refinement of the peak over theta.
    i = int(np.argmax(deltas))
    a = float(thetas[max(0, i - 1)])
    b = float(thetas[min(len(thetas) - 1, i + 1)])

    def dmax(theta: float) -> float:
        _, d = max_violation(theta, noise, seed=seed, n_random=n_random, coarse_points=13)
        return d

    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = dmax(x1), dmax(x2)
    for _ in range(8):
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = dmax(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = dmax(x2)
    if f1 >= f2 and f1 > best_delta:
        best_theta, best_delta = x1, f1
    elif f2 > best_delta:
        best_theta, best_delta = x2, f2
    return best_theta, best_delta


def noise_threshold(
    channel: str,
    seed: int = 0,
    n_theta: int = 50,
    tol: float = 5e-4,
) -> ThresholdResult:
    """Noise level at which the globally maximal violation vanishes.

    Bisection on the noise probability of the best violation over theta.
    If the violation never vanishes inside the bracket, the search is
    degenerate and the bracket's upper bound is returned flagged.
    """
    if channel == "depolarize":
        upper = 0.3

        def make_noise(p: float) -> NoiseModel:
            return NoiseModel(p_dp=p)

    elif channel == "misidentify":
        upper = 0.2

        def make_noise(p: float) -> NoiseModel:
            return NoiseModel(p_m=p)

    else:
        raise ValueError(f"unknown channel {channel!r}")

    theta_peak, delta_hi = global_max_violation(make_noise(upper), seed=seed, n_theta=n_theta)
    if delta_hi > 0.0:
        return ThresholdResult(channel, upper, (0.0, upper), theta_peak, degenerate=True)

    lo, hi = 0.0, upper
    theta_peak, delta_lo = global_max_violation(make_noise(0.0), seed=seed, n_theta=n_theta)
    if delta_lo <= 0.0:
        return ThresholdResult(channel, 0.0, (0.0, upper), theta_peak, degenerate=True)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        theta_mid, delta_mid = global_max_violation(make_noise(mid), seed=seed, n_theta=n_theta)
        if delta_mid > 0.0:
            lo = mid
            theta_peak = theta_mid
        else:
            hi = mid
    return ThresholdResult(channel, 0.5 * (lo + hi), (lo, hi), theta_peak)


def k_hb(theta: float, seed: int = 0, tol: float = 1e-4) -> float:
    """Crossover k above which the optimal cost equals the Helstrom bound.

    Located by bisection on whether the optimizer still beats the
    Helstrom value (1 - sin theta)/2 by more than 1e-8.
    """
    hb = bounds.helstrom(theta)

    def beats_hb(k: float) -> bool:
        record, _ = violation_at(theta, k, seed=seed, n_random=4)
        return record.c_min < hb - 1e-8

    lo, hi = 1e-3, 0.5
    if not beats_hb(lo):
        return lo
    if beats_hb(hi):
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if beats_hb(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
