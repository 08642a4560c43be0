# src/oracle/montecarlo.py
"""
Empirical and exact tails of X ~ Bin(t, 1/2) around its mean:

    Pr[|2X - t| > delta]
"""

from dataclasses import dataclass
from math import ceil, floor, sqrt

import numpy as np
from scipy.stats import binom

from common.config import default_seed
from common.errors import ValidationError

MIN_TRIALS = 10 ** 4


@dataclass(frozen=True)
class TailEstimate:
    t: int
    delta: float
    trials: int
    estimate: float
    sigma: float

    @property
    def lower(self):
        return max(0.0, self.estimate - 3 * self.sigma)

    @property
    def upper(self):
        return min(1.0, self.estimate + 3 * self.sigma)

    def to_json(self):
        return {"t": self.t, "delta": self.delta, "trials": self.trials,
                "estimate": self.estimate, "sigma": self.sigma,
                "band": [self.lower, self.upper]}


def chernoff_montecarlo(t, delta, trials=10 ** 5, seed=None):
    if t < 1:
        raise ValidationError("t must be at least 1")
    if trials < MIN_TRIALS:
        raise ValidationError(f"need at least {MIN_TRIALS} trials, got {trials}")
    rng = np.random.default_rng(default_seed() if seed is None else seed)
    draws = rng.binomial(t, 0.5, size=trials)
    hits = np.abs(2 * draws - t) > delta
    estimate = float(hits.mean())
    sigma = sqrt(estimate * (1 - estimate) / trials)
    return TailEstimate(t, float(delta), trials, estimate, sigma)


def chernoff_exact_tail(t, delta):
    """
    Exact Pr[|2X - t| > delta]: X > (t + delta)/2 or X < (t - delta)/2.
    """
    if t < 1:
        raise ValidationError("t must be at least 1")
    if delta < 0:
        raise ValidationError("delta must be non-negative")
    upper = binom.sf(floor((t + delta) / 2), t, 0.5)
    lower = binom.cdf(ceil((t - delta) / 2) - 1, t, 0.5)
    return float(upper + lower)
