"""Trial-level simulation of the discrimination game.

Independent oracle for the analytic probability pipeline: every trial
draws a preparation, optionally depolarizes it, samples the stage-1
partial measurement by the Born rule, flips the binary record with
probability p_m, and (when the record says continue) samples the stage-2
projective measurement on the true post-measurement state, again with a
possible record flip.  Branch probabilities are computed directly from
the measurement operators, never from the analytic game-probability
formulas being checked.

RNG: numpy PCG64.  Worker w of a run with seed S uses
default_rng(SeedSequence([S, w])), and per-worker draws happen in a
fixed array order (preparation, depolarization, stage-1 Born, stage-1
flip, stage-2 Born, stage-2 flip, one uniform per trial each), so
tallies are reproducible and independent of how workers are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import StatePair
from .cascade import CascadeParams, NoiseModel
from .qmath import (
    IDENTITY,
    DensityMatrix,
    PlaneState,
    conjugate,
    projector,
    psd_sqrt,
    trace_product,
)

RNG_ALGORITHM = "numpy-pcg64/seedseq([seed, worker])"


@dataclass(frozen=True)
class TrialConfig:
    pair: StatePair
    params: CascadeParams
    noise: NoiseModel = field(default_factory=NoiseModel)
    trials: int = 100_000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class TrialTally:
    n_correct: int
    n_wrong: int
    n_decline: int
    trials: int
    estimates: tuple[float, float, float]
    std_errors: tuple[float, float, float]


def _branch_tables(config: TrialConfig):
    """Born-rule tables indexed by (prep, depolarized, stage-1 outcome).

    q0[prep, depol] is the stage-1 guess-psi0 probability; r1[prep,
    depol, outcome1] is the stage-2 guess-psi1 probability on the true
    post-measurement state of that branch.  Empty branches get r1 = 0;
    they are never sampled.
    """
    params = config.params
    p1 = projector(PlaneState(params.phi1))
    p2 = projector(PlaneState(params.phi2))
    n = psd_sqrt(IDENTITY - p1.scale(params.s * params.s))
    e0 = p1.scale(params.s * params.s)

    q0 = np.zeros((2, 2))
    r1 = np.zeros((2, 2, 2))
    for prep, psi in enumerate((config.pair.psi0, config.pair.psi1)):
        for depol, rho in enumerate((DensityMatrix.pure(psi), DensityMatrix.mixed())):
            q = trace_product(e0, rho.m)
            q0[prep, depol] = q
            # Physical guess-psi0 branch: post-state is P1 rho P1 / tr,
            # so the stage-2 probability is just tr(P2 P1).
            if q > 0.0:
                r1[prep, depol, 1] = trace_product(p2, p1)
            n_rho_n = conjugate(n, rho.m)
            qn = n_rho_n.trace()
            if qn > 0.0:
                r1[prep, depol, 0] = trace_product(p2, n_rho_n) / qn
    return q0, r1


def _simulate_worker(config: TrialConfig, worker: int, n: int, q0, r1):
    rng = np.random.default_rng(np.random.SeedSequence([config.seed & 0xFFFFFFFF, worker]))
    prep = rng.integers(0, 2, size=n)
    depol = (rng.random(n) < config.noise.p_dp).astype(np.int64)
    born1 = rng.random(n)
    flip1 = rng.random(n) < config.noise.p_m
    born2 = rng.random(n)
    flip2 = rng.random(n) < config.noise.p_m

    outcome1 = born1 < q0[prep, depol]            # physical stage-1 result
    record1 = outcome1 ^ flip1                    # declared "guess psi0"?
    outcome2 = born2 < r1[prep, depol, outcome1.astype(np.int64)]
    record2 = outcome2 ^ flip2                    # declared "guess psi1"?

    guess0 = record1
    guess1 = ~record1 & record2
    decline = ~record1 & ~record2
    correct = (guess0 & (prep == 0)) | (guess1 & (prep == 1))
    wrong = (guess0 | guess1) & ~correct
    return int(correct.sum()), int(wrong.sum()), int(decline.sum())


def simulate(config: TrialConfig) -> TrialTally:
    """Run the full game for config.trials trials and tally declared outcomes."""
    q0, r1 = _branch_tables(config)
    base, extra = divmod(config.trials, config.workers)
    counts = [0, 0, 0]
    for worker in range(config.workers):
        n = base + (1 if worker < extra else 0)
        if n == 0:
            continue
        c, w, d = _simulate_worker(config, worker, n, q0, r1)
        counts[0] += c
        counts[1] += w
        counts[2] += d
    total = config.trials
    estimates = tuple(c / total for c in counts)
    std_errors = tuple(math.sqrt(p * (1.0 - p) / total) for p in estimates)
    return TrialTally(
        n_correct=counts[0],
        n_wrong=counts[1],
        n_decline=counts[2],
        trials=total,
        estimates=estimates,
        std_errors=std_errors,
    )
