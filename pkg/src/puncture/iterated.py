# src/puncture/iterated.py
"""
Iterated puncturing: repeat the one-step reduction on the covered subfamily
until the family is provably small or the universe stops shrinking.

Two regimes, picked by comparing the member width w with k:

  w <= k   cover level from a = w log2(4k/w) / (32 B k log2(n_i/k)),
           delta = 2^-(w+4); stop when |F_i| <= (Ck/w)^w, when fewer than
           30% of the members survive, or after 2^w rounds.
  w > k    cover level from a = log2(4w/k) / (C_level log2(n_r/k)), delta = 1/4;
           stop when |F_r| <= 4 t (4w/k)^(k/64), or one round after
           L_r = log2(n_r/k) falls to C1 log2(w/k).

Every reduction runs against the exception budget M = 2^h(n_i, k, p), and the
round rows carry both the measured M and that budget.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, log2

import pandas as pd

from common import report
from common.config import DEFAULT_CONSTANTS, default_seed, to_fraction
from common.errors import RetriesExhausted, ValidationError
from cover.entropy import choose_p, exception_budget
from puncture.one_step import ReductionConfig, one_step_reduce, step_budget
from setfam.closure import sauer_shelah_bound
from setfam.family import SetFamily

SURVIVAL_FLOOR = 0.3

ROUND_COLUMNS = ["round", "universe", "family", "a", "p", "delta", "t", "I_size",
                 "covered", "survival", "seed", "attained", "M_measured", "M_budget"]


def extremal_bound(k, w, C):
    """(Ck/w)^w when w <= k, (Cw/k)^k otherwise, as an exact Fraction"""
    if k < 1 or w < 1:
        raise ValidationError(f"k and w must be positive, got k={k}, w={w}")
    C = to_fraction(C)
    if C <= 0:
        raise ValidationError("C must be positive")
    if w <= k:
        return (C * k / w) ** w
    return (C * w / k) ** k


@dataclass(frozen=True)
class IteratedReport:
    regime: str
    k: int
    w: int
    initial_size: int
    rounds: pd.DataFrame
    U_end: frozenset
    final_family: SetFamily
    stop_reason: str
    extremal: Fraction
    counting_bound: int
    constants: dict = field(default_factory=dict)

    @property
    def final_size(self):
        return len(self.final_family)

    @property
    def survival(self):
        if self.initial_size == 0:
            return 1.0
        return self.final_size / self.initial_size

    @property
    def bound_holds(self):
        return self.initial_size <= self.extremal

    def to_json(self):
        return {
            "regime": self.regime,
            "k": self.k,
            "w": self.w,
            "initial_size": self.initial_size,
            "final_size": self.final_size,
            "U_end": sorted(self.U_end),
            "survival": self.survival,
            "stop_reason": self.stop_reason,
            "extremal_bound": float(self.extremal),
            "bound_holds": self.bound_holds,
            "counting_bound": self.counting_bound,
            "constants": self.constants,
            "rounds": self.rounds.to_dict(orient="records"),
        }


def _small_regime_level(n_i, k, w, B):
    if n_i <= k:
        return 0.25
    return min(0.25, w * log2(4 * k / w) / (32 * B * k * log2(n_i / k)))


def _large_regime_level(n_r, k, w, C_level):
    if n_r <= k:
        return 0.25
    return min(0.25, log2(4 * w / k) / (C_level * log2(n_r / k)))


def _row(i, fam, initial, a, p, delta, t, trace, M=None):
    return {
        "round": i,
        "universe": len(fam.support()),
        "family": len(fam),
        "a": a,
        "p": p,
        "delta": delta,
        "t": t,
        "I_size": len(trace.I) if trace else None,
        "covered": trace.covered_count if trace else None,
        "survival": len(fam) / initial,
        "seed": trace.seed if trace else None,
        "attained": trace.attained_bound if trace else None,
        "M_measured": trace.M_measured if trace else None,
        "M_budget": M,
    }


def _reduce(fam, p, delta, M, cfg_seed, max_retries, mode, B, theta):
    cfg = ReductionConfig(p=p, delta=delta, B=B, theta=theta, max_retries=max_retries,
                          seed=cfg_seed, mode=mode)
    trace = one_step_reduce(fam, cfg, M=M)
    if not trace.attained_bound:
        raise RetriesExhausted(f"one-step reduction missed its bound after {max_retries} seeds",
                               best=trace, attempts=max_retries)
    return trace


def _iterate_small_width(fam, k, w, constants, seed, max_retries, mode, rows):
    bound = extremal_bound(k, w, constants.C)
    initial = len(fam)
    current = fam
    for i in range(2 ** w):
        n_i = len(current.support())
        if len(current) <= bound:
            rows.append(_row(i, current, initial, None, None, None, None, None))
            return current, "size_bound"
        if len(current) / initial < SURVIVAL_FLOOR:
            rows.append(_row(i, current, initial, None, None, None, None, None))
            return current, "survival"
        a = _small_regime_level(n_i, k, w, constants.B)
        p = choose_p(a)
        delta = 2.0 ** -(w + 4)
        t = step_budget(n_i, w, p, delta)
        M = exception_budget(n_i, k, p, constants.B)
        trace = _reduce(current, p, delta, M, seed + 1000 * i, max_retries, mode, constants.B, constants.theta)
        rows.append(_row(i, current, initial, a, p, delta, t, trace, M))
        if len(trace.I) >= n_i:
            return current, "stall"
        current = current.covered_by(trace.I)
    return current, "round_cap"


def _iterate_large_width(fam, k, w, constants, seed, max_retries, mode, rows):
    initial = len(fam)
    floor_level = constants.C1 * log2(w / k)
    n0 = len(fam.support())
    L0 = log2(n0 / k) if n0 > k else 0.0
    cap = 2 + max(0, ceil(log2(L0 / floor_level))) if L0 > 0 else 2
    exceptions = (4 * w / k) ** (k / 64)
    current = fam
    for r in range(cap):
        n_r = len(current.support())
        L_r = log2(n_r / k) if n_r > k else 0.0
        a = _large_regime_level(n_r, k, w, constants.C_level)
        p = choose_p(a)
        t = step_budget(n_r, w, p, 0.25)
        M = exception_budget(n_r, k, p, constants.B)
        if len(current) <= 4 * t * exceptions:
            rows.append(_row(r, current, initial, a, p, 0.25, t, None, M))
            return current, r, "size_bound"
        trace = _reduce(current, p, 0.25, M, seed + 1000 * r, max_retries, mode, constants.B, constants.theta)
        rows.append(_row(r, current, initial, a, p, 0.25, t, trace, M))
        if len(trace.I) >= n_r:
            return current, r, "stall"
        current = current.covered_by(trace.I)
        if L_r <= floor_level:
            return current, r + 1, "entropy_small"
    return current, cap, "round_cap"


def iterated_puncture(fam, k, w, constants=DEFAULT_CONSTANTS, seed=None, max_retries=50, mode="float"):
    """
    Run iterated puncturing on a k-moonflower-free family of w-sets.

    Parameters:
    -----------
    fam : SetFamily
        Members of size at most w
    k, w : int
        Moonflower parameter and member width
    constants : Constants
        C for the extremal bound, C1 and C_level for the large-width regime, B and theta
    seed : int, optional
        Round i seeds its retries from seed + 1000 * i

    Returns:
    --------
    IteratedReport
        Per-round rows, final universe and family, stop reason and bounds

    Raises:
    -------
    RetriesExhausted
        A one-step reduction missed its bound on every seed
    """
    if k < 1 or w < 1:
        raise ValidationError(f"k and w must be positive, got k={k}, w={w}")
    if fam.max_set_size() > w:
        raise ValidationError(f"family has a member larger than w={w}")
    seed = default_seed() if seed is None else seed
    bound = extremal_bound(k, w, constants.C)
    rows = []
    fam = fam.nonempty()

    report.step(f"Iterated puncturing: |F|={len(fam)}, k={k}, w={w}")
    if len(fam) == 0:
        regime, final, reason, counting = "empty", fam, "empty", 0
    elif w == 1:
        # any k distinct singletons form a k-moonflower
        regime, final, reason = "singleton", fam, "singleton"
        counting = k - 1
        if len(fam) > k - 1:
            report.warn(f"{len(fam)} singletons exceed k-1={k - 1}; family is not {k}-moonflower-free")
    elif w <= k:
        regime = "w<=k"
        final, reason = _iterate_small_width(fam, k, w, constants, seed, max_retries, mode, rows)
        counting = 4 * sauer_shelah_bound(len(final.support()), w)
    else:
        regime = "w>k"
        final, R, reason = _iterate_large_width(fam, k, w, constants, seed, max_retries, mode, rows)
        counting = 2 ** (R + 1) * sauer_shelah_bound(len(final.support()), k - 1)

    result = IteratedReport(regime, k, w, len(fam), pd.DataFrame(rows, columns=ROUND_COLUMNS),
                            final.support(), final, reason, bound, counting, constants.to_dict())
    if result.bound_holds:
        report.ok(f"{regime}: stopped on {reason}, |U_end|={len(result.U_end)}, "
                  f"survival {result.survival:.2f}")
    else:
        report.warn(f"|F|={len(fam)} exceeds the extremal bound {float(bound):.4g} at C={constants.C}")
    return result
