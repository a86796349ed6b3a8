"""Projective-strategy bounds for the three-outcome discrimination game.

Two pure states |psi0> = |0> and |psi1> = cos(theta)|0> + sin(theta)|1>
are prepared with equal probability.  The player may guess either state
or decline, and pays cost C = w*p_wrong + d*p_decline.  With projective
measurements only two strategies matter: guess on both outcomes
("guess_both") or treat one outcome as a non-guess ("guess_one").  The
pointwise minimum over the two is the modified Helstrom bound; the kink
where the strategies tie is where nonprojective measurements gain the
most.  This module evaluates all of that in closed form, cross-checkable
against the 2x2 eigenvalue routines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .qmath import IDENTITY, PlaneState, Sym2, eig_bounds, projector


class CostMode(str, Enum):
    ABSOLUTE = "absolute"  # C = w*p_w + d*p_d
    SCALED = "scaled"      # C/k = p_w/k + p_d  (normalized weights)


class StrategyVariant(str, Enum):
    GUESS_BOTH = "guess_both"
    GUESS_ONE = "guess_one"


@dataclass(frozen=True)
class CostWeights:
    """Penalty weights for wrong guesses (w) and declined guesses (d)."""

    w: float
    d: float
    mode: CostMode = CostMode.ABSOLUTE

    def __post_init__(self):
        if self.w < 0 or self.d < 0 or self.w + self.d <= 0:
            raise ValueError("weights must be nonnegative with w + d > 0")
        if self.mode is CostMode.SCALED and self.d <= 0:
            raise ValueError("scaled mode requires d > 0")

    @property
    def k(self) -> float:
        if self.w <= 0:
            raise ValueError("k = d/w undefined for w = 0")
        return self.d / self.w

    @classmethod
    def from_k(cls, k: float, mode: CostMode = CostMode.ABSOLUTE) -> "CostWeights":
        return cls(w=1.0, d=k, mode=mode)


@dataclass(frozen=True)
class StatePair:
    """The two states to discriminate, separated by angle theta in (0, pi/2]."""

    theta: float

    def __post_init__(self):
        if not (0.0 < self.theta <= 0.5 * math.pi):
            raise ValueError(f"theta must lie in (0, pi/2], got {self.theta!r}")

    @property
    def psi0(self) -> PlaneState:
        return PlaneState(0.0)

    @property
    def psi1(self) -> PlaneState:
        return PlaneState(self.theta)


@dataclass(frozen=True)
class ProjectiveStrategy:
    variant: StrategyVariant
    basis_angle: float


def helstrom(theta: float, w: float = 1.0) -> float:
    """Minimum cost when a guess is mandatory: w*(1 - |sin theta|)/2."""
    return 0.5 * w * (1.0 - abs(math.sin(theta)))


def _error_operator(pair: StatePair) -> Sym2:
    """(1 + |psi1><psi1| - |psi0><psi0|)/2, whose min eigenvalue is min p_w."""
    return (IDENTITY + projector(pair.psi1) - projector(pair.psi0)).scale(0.5)


def cost_strategy_a(pair: StatePair, weights: CostWeights) -> tuple[float, float]:
    """Minimum cost of the guess-both strategy and its basis angle.

    Equals w*(1 - |sin theta|)/2, the Helstrom value; p_d = 0 so d never
    enters.
    """
    lo, _, angle = eig_bounds(_error_operator(pair))
    return weights.w * lo, angle


def _decline_operator(pair: StatePair, weights: CostWeights) -> Sym2:
    p0 = projector(pair.psi0)
    p1 = projector(pair.psi1)
    return p1.scale(0.5 * weights.w) + (IDENTITY - (p0 + p1).scale(0.5)).scale(weights.d)


def cost_strategy_b(pair: StatePair, weights: CostWeights) -> tuple[float, float]:
    """Minimum cost of the guess-one strategy and its basis angle.

    The cost at basis angle alpha is the expectation of the operator
    w*|psi1><psi1|/2 + d*(1 - (|psi0><psi0| + |psi1><psi1|)/2) in the
    guess direction, so the minimum is its smallest eigenvalue.
    """
    lo, _, angle = eig_bounds(_decline_operator(pair, weights))
    return lo, angle


def cost_strategy_b_closed(theta: float, w: float, d: float) -> float:
    """Closed form (w+2d)/4 - sqrt([(w-2d)/4]^2 + d(w-d)sin^2(theta)/4)."""
    quarter = 0.25 * (w - 2.0 * d)
    root = math.sqrt(quarter * quarter + 0.25 * d * (w - d) * math.sin(theta) ** 2)
    return 0.25 * (w + 2.0 * d) - root


def mh_bound(pair: StatePair, weights: CostWeights) -> tuple[float, ProjectiveStrategy]:
    """Modified Helstrom bound: best projective cost and the winning strategy.

    Ties go to guess_both.  In scaled mode the returned cost is divided
    by k (the bound on p_w/k + p_d).
    """
    cost_a, angle_a = cost_strategy_a(pair, weights)
    cost_b, angle_b = cost_strategy_b(pair, weights)
    if cost_a <= cost_b:
        cost, strategy = cost_a, ProjectiveStrategy(StrategyVariant.GUESS_BOTH, angle_a)
    else:
        cost, strategy = cost_b, ProjectiveStrategy(StrategyVariant.GUESS_ONE, angle_b)
    if weights.mode is CostMode.SCALED:
        cost /= weights.k
    return cost, strategy


def k_opt(theta: float) -> float:
    """Cost ratio k = d/w at which the two projective strategies tie.

    This is also where nonprojective measurements beat the projective
    bound by the most.
    """
    if not (0.0 < theta <= 0.5 * math.pi):
        raise ValueError(f"theta must lie in (0, pi/2], got {theta!r}")
    sin_t = abs(math.sin(theta))
    cos_t = math.cos(theta)
    return 0.5 * (1.0 + (math.sqrt(1.0 + 3.0 * cos_t * cos_t) - 2.0) / sin_t)


def ideal_nonprojective_cost(pair: StatePair, k: float) -> float:
    """Analytic minimum cost k[k - (1-k)cos(theta)]/(2k - 1) (normalized w=1).

    Valid only below the crossover into the Helstrom regime; values that
    come out negative or above the Helstrom bound are out of range.
    """
    if k <= 0 or k >= 0.5:
        raise ValueError(f"k={k!r} outside the nonprojective regime (0, 0.5)")
    cos_t = math.cos(pair.theta)
    value = k * (k - (1.0 - k) * cos_t) / (2.0 * k - 1.0)
    if value < 0.0 or value > helstrom(pair.theta) + 1e-12:
        raise ValueError(f"cost formula out of its validity range at k={k!r}")
    return value
