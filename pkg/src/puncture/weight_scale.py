# src/puncture/weight_scale.py
"""
Weight-scale puncturing for one dyadic layer of the sparsifier.

The layer holds moonflower-free members with sizes in (w, 2w]. Choosing

    a = min{1/4, theta * eta^2 * w / (B * k * log2(n0/k))},   p = choose_p(a)

and running the trace-emptying process leaves at most |I| * exp(theta eta^2 w)
distinct traces outside I. Each result also carries the 2^h exception budget,
the size bound for |I| and log2|F| / (2w) against the layer-size bound.
"""

from dataclasses import dataclass, replace
from math import exp, log2

from common import report
from common.config import DEFAULT_CONSTANTS, default_seed
from common.errors import ValidationError
from cover.entropy import choose_p, exception_budget
from puncture.one_step import trace_puncture_to_empty


@dataclass(frozen=True)
class WeightScaleResult:
    I: frozenset
    residual: int
    residual_bound: float
    attained: bool
    a: float
    p: float
    seed: int
    attempts: int
    trace: object = None
    M_budget: float = None
    size_bound: float = None
    layer_ratio: float = None
    layer_bound: float = None

    @property
    def M_measured(self):
        return self.trace.M_measured if self.trace is not None else 0

    @property
    def within_size_bound(self):
        return self.size_bound is None or len(self.I) <= self.size_bound

    def to_json(self):
        return {
            "I": sorted(self.I),
            "residual": self.residual,
            "residual_bound": self.residual_bound,
            "attained": self.attained,
            "a": self.a,
            "p": self.p,
            "seed": self.seed,
            "attempts": self.attempts,
            "M_measured": self.M_measured,
            "M_budget": self.M_budget,
            "size_bound": self.size_bound,
            "within_size_bound": self.within_size_bound,
            "layer_ratio": self.layer_ratio,
            "layer_bound": self.layer_bound,
        }


def layer_size_bound(k, w, C_lay=1.0):
    """Bound on log2|F| / w for a k-moonflower-free family of width w"""
    if k < 1 or w < 1:
        raise ValidationError("k and w must be positive")
    if w <= k:
        return C_lay * (1 + log2(k / w))
    return C_lay


def weight_scale_size_bound(k, w, eta, theta, log_size, c0=1.0):
    """
    Reported size bound for the punctured set:

        c0 * k * log2(w) / (theta eta^2) * (1 + log|F|/w) * max(1, log2(k log2(w) / (theta eta^2 w)))

    log2(w) is floored at 1 so that w = 1 does not collapse the bound to 0.
    """
    lw = max(1.0, log2(w))
    scale = k * lw / (theta * eta ** 2)
    return c0 * scale * (1 + log_size / w) * max(1.0, log2(scale / w))


def layer_level(n0, k, w, eta, theta, B=1.0):
    """The target a for a layer with support size n0"""
    if n0 <= k:
        return 0.25
    return min(0.25, theta * eta ** 2 * w / (B * k * log2(n0 / k)))


def _check_size(result, w):
    if not result.within_size_bound:
        report.warn(f"layer w={w}: |I|={len(result.I)} above the size bound {result.size_bound:.3g}")
    return result


def weight_scale_puncture(fam, k, w, eta, theta, B=1.0, seed=None, max_retries=50, mode="float",
                          constants=DEFAULT_CONSTANTS):
    """
    Puncture a (w, 2w] layer until the residual trace count is at most
    |I| * exp(theta eta^2 w).

    Parameters:
    -----------
    fam : SetFamily
        The layer; members have sizes in (w, 2w]
    k : int
        Moonflower parameter of the code (NRD + 1)
    w : int
        Lower end of the layer
    eta, theta : float
        Per-round error in (0, 1/4) and exponent fraction in (0, 1)
    seed : int, optional
        First seed; retries use seed + 1, seed + 2, ...
    constants : Constants
        c0 for the |I| size bound, C_lay for the layer-size bound

    Returns:
    --------
    WeightScaleResult
        attained is False when every retry missed; the best run is returned
    """
    if not 0 < eta < 0.25:
        raise ValidationError(f"eta must lie in (0, 1/4), got {eta}")
    if not 0 < theta < 1:
        raise ValidationError(f"theta must lie in (0, 1), got {theta}")
    if k < 1 or w < 1:
        raise ValidationError("k and w must be positive")
    if max_retries < 1:
        raise ValidationError("max_retries must be at least 1")
    seed = default_seed() if seed is None else seed

    nonempty = [m for m in fam.members if m]
    if not nonempty:
        return WeightScaleResult(frozenset(), 0, 0.0, True, 0.25, choose_p(0.25), seed, 0)

    n0 = len(fam.support())
    a = layer_level(n0, k, w, eta, theta, B)
    p = choose_p(a)
    growth = exp(theta * eta ** 2 * w)
    M = exception_budget(n0, k, p, B)
    log_size = log2(len(nonempty))
    bounds = {
        "M_budget": M,
        "size_bound": weight_scale_size_bound(k, w, eta, theta, log_size, constants.c0),
        "layer_ratio": log_size / (2 * w),
        "layer_bound": layer_size_bound(k, 2 * w, constants.C_lay),
    }

    best = None
    for attempt in range(max_retries):
        run_seed = seed + attempt
        trace = trace_puncture_to_empty(fam, p, M=M, seed=run_seed, max_retries=1, mode=mode, width=2 * w)
        bound = len(trace.I) * growth
        result = WeightScaleResult(trace.I, trace.residual, bound, trace.residual <= bound,
                                   a, p, run_seed, attempt + 1, trace, **bounds)
        if best is None or (result.attained, -result.residual) > (best.attained, -best.residual):
            best = result
        if result.attained:
            return _check_size(result, w)
    best = replace(best, attempts=max_retries)
    report.warn(f"layer w={w}: residual {best.residual} above {best.residual_bound:.3g} "
                f"after {max_retries} seeds")
    return _check_size(best, w)
