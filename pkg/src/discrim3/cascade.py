"""Three-outcome cascaded measurement and its game probabilities.

The measurement is a cascade of two binary stages: a partial projection
of strength s onto |phi1> (outcome -> guess psi0), followed, on the
continue branch, by a full projection onto |phi2> (outcome -> guess
psi1; the remaining outcome is a decline).  The three operators are

    M0 = s |phi1><phi1|
    M1 = |phi2><phi2| sqrt(1 - s^2 |phi1><phi1|)
    Md = sqrt(1 - |phi2><phi2|) sqrt(1 - s^2 |phi1><phi1|)

and their POVM elements M†M sum to the identity.  Noise enters in two
ways: depolarization of the prepared state with probability p_dp, and
independent flips of each binary classical readout with probability p_m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bounds import CostMode, CostWeights, StatePair
from .qmath import (
    IDENTITY,
    DensityMatrix,
    Mat2,
    PlaneState,
    Sym2,
    conjugate,
    projector,
    psd_sqrt,
    trace_product,
)


@dataclass(frozen=True)
class CascadeParams:
    """Angles of the two stages and the first-stage strength s in [0, 1]."""

    phi1: float
    phi2: float
    s: float

    def __post_init__(self):
        if not (0.0 <= self.s <= 1.0):
            raise ValueError(f"strength s must lie in [0, 1], got {self.s!r}")


@dataclass(frozen=True)
class NoiseModel:
    """Depolarization probability and per-readout misidentification probability."""

    p_dp: float = 0.0
    p_m: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.p_dp <= 1.0):
            raise ValueError(f"p_dp must lie in [0, 1], got {self.p_dp!r}")
        if not (0.0 <= self.p_m <= 0.5):
            raise ValueError(f"p_m must lie in [0, 0.5], got {self.p_m!r}")

    @property
    def is_ideal(self) -> bool:
        return self.p_dp == 0.0 and self.p_m == 0.0


IDEAL = NoiseModel(0.0, 0.0)


@dataclass(frozen=True)
class MeasurementTriple:
    """The three measurement operators and their POVM elements M†M.

    The raw operators m1 and md are products of non-commuting symmetric
    factors and are not symmetric in general, so they are stored as
    general 2x2 matrices; the POVM elements e = M†M are symmetric.
    """

    m0: Mat2
    m1: Mat2
    md: Mat2
    e0: Sym2
    e1: Sym2
    ed: Sym2


@dataclass(frozen=True)
class OutcomeProbabilities:
    p_c: float
    p_w: float
    p_d: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p_c, self.p_w, self.p_d)


def back_action(params: CascadeParams) -> Sym2:
    """sqrt(1 - s^2 |phi1><phi1|), the state change on the continue branch."""
    p1 = projector(PlaneState(params.phi1))
    return psd_sqrt(IDENTITY - p1.scale(params.s * params.s))


def build_triple(params: CascadeParams) -> MeasurementTriple:
    """Construct the cascade operators and POVM elements for given parameters."""
    p1 = projector(PlaneState(params.phi1))
    p2 = projector(PlaneState(params.phi2))
    n = back_action(params)
    n_mat = Mat2.from_sym(n)
    m0 = Mat2.from_sym(p1.scale(params.s))
    m1 = Mat2.from_sym(p2) @ n_mat
    md = Mat2.from_sym(psd_sqrt(IDENTITY - p2)) @ n_mat
    return MeasurementTriple(m0, m1, md, m0.gram(), m1.gram(), md.gram())


def ideal_probabilities(pair: StatePair, params: CascadeParams) -> OutcomeProbabilities:
    """Game probabilities (p_c, p_w, p_d) for noiseless play."""
    return noisy_probabilities(pair, params, IDEAL)


def noisy_probabilities(
    pair: StatePair, params: CascadeParams, noise: NoiseModel
) -> OutcomeProbabilities:
    """Game probabilities with depolarization and readout misidentification.

    Each prepared state is depolarized to (1-p_dp) rho + p_dp I/2.  The
    stage-1 binary record flips with probability p_m; if the (possibly
    wrong) record says "continue", stage 2 is applied to the true
    post-measurement state of whichever stage-1 branch occurred, and the
    stage-2 record flips with probability p_m as well.  All branch
    weights are kept unnormalized, so empty branches contribute zero
    without special-casing.
    """
    p1 = projector(PlaneState(params.phi1))
    p2 = projector(PlaneState(params.phi2))
    n = back_action(params)
    e0 = p1.scale(params.s * params.s)
    e1 = conjugate(n, p2)
    pm = noise.p_m

    declared = []
    for psi in (pair.psi0, pair.psi1):
        rho = DensityMatrix.pure(psi).depolarize(noise.p_dp)
        q0 = trace_product(e0, rho.m)  # stage-1 "guess psi0" branch weight
        qn = 1.0 - q0
        # Unnormalized stage-2 "guess psi1" weights for each physical branch:
        # branch guess0 (record flipped to continue): M0 rho M0 = s^2 P1 rho P1.
        w1_from_g0 = params.s * params.s * trace_product(p2, conjugate(p1, rho.m))
        w1_from_cont = trace_product(e1, rho.m)
        p_rec_g0 = q0 * (1.0 - pm) + qn * pm
        w_cont = q0 * pm + qn * (1.0 - pm)
        w1 = pm * w1_from_g0 + (1.0 - pm) * w1_from_cont
        p_rec_g1 = w1 * (1.0 - pm) + (w_cont - w1) * pm
        p_rec_d = w1 * pm + (w_cont - w1) * (1.0 - pm)
        declared.append((p_rec_g0, p_rec_g1, p_rec_d))

    (g0_0, g1_0, d_0), (g0_1, g1_1, d_1) = declared
    return OutcomeProbabilities(
        p_c=0.5 * (g0_0 + g1_1),
        p_w=0.5 * (g1_0 + g0_1),
        p_d=0.5 * (d_0 + d_1),
    )


def cost(probs: OutcomeProbabilities, weights: CostWeights) -> float:
    """Evaluate the game cost: w*p_w + d*p_d, or p_w/k + p_d in scaled mode."""
    if weights.mode is CostMode.SCALED:
        k = weights.k
        if k == 0:
            raise ValueError("scaled cost undefined at k = 0")
        return probs.p_w / k + probs.p_d
    return weights.w * probs.p_w + weights.d * probs.p_d


def game_probability_fn(theta: float, p_dp: float, p_m: float):
    """Fast closed-form (p_c, p_w, p_d) as a function of (phi1, phi2, s).

    Algebraically identical to noisy_probabilities (cross-checked by the
    test suite) but free of matrix construction, for use in optimizer
    inner loops.
    """
    cos = math.cos
    sin = math.sin

    def probs(phi1: float, phi2: float, s: float) -> tuple[float, float, float]:
        d21 = phi2 - phi1
        c21 = cos(d21)
        s21 = sin(d21)
        c21sq = c21 * c21
        root = math.sqrt(max(0.0, 1.0 - s * s))
        tr_e0 = s * s
        tr_e1 = (1.0 - s * s) * c21sq + s21 * s21
        out = []
        for beta in (0.0, theta):
            cb = cos(beta - phi1)
            sb = sin(beta - phi1)
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
            out.append((p_rec_g0, p_rec_g1, p_rec_d))
        (g0_0, g1_0, d_0), (g0_1, g1_1, d_1) = out
        return (0.5 * (g0_0 + g1_1), 0.5 * (g1_0 + g0_1), 0.5 * (d_0 + d_1))

    return probs


def game_cost_fn(theta: float, weights: CostWeights, noise: NoiseModel):
    """Fast cost(phi1, phi2, s) closure built on game_probability_fn."""
    probs = game_probability_fn(theta, noise.p_dp, noise.p_m)
    if weights.mode is CostMode.SCALED:
        inv_k = 1.0 / weights.k

        def cost_fn(phi1: float, phi2: float, s: float) -> float:
            _, p_w, p_d = probs(phi1, phi2, s)
            return p_w * inv_k + p_d

    else:
        w, d = weights.w, weights.d

        def cost_fn(phi1: float, phi2: float, s: float) -> float:
            _, p_w, p_d = probs(phi1, phi2, s)
            return w * p_w + d * p_d

    return cost_fn
