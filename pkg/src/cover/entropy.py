# src/cover/entropy.py
"""
Entropy of member distributions and the parameter helpers of the smoothness
bound. All logarithms are base 2.
"""

from dataclasses import dataclass
from math import inf, log2

from common.config import FLOAT_TOL
from common.errors import ValidationError
from setfam.closure import DEFAULT_CLOSURE_CAP, union_closure


def _weights(D):
    if hasattr(D, "weights"):
        return list(D.weights.values())
    if isinstance(D, dict):
        return list(D.values())
    return list(D)


def entropy_bits(D):
    """Shannon entropy in bits; zero-probability terms contribute nothing"""
    values = [float(v) for v in _weights(D)]
    if any(v < -FLOAT_TOL for v in values):
        raise ValidationError("distribution has negative weight")
    if abs(sum(values) - 1.0) > 1e-6:
        raise ValidationError(f"distribution sums to {sum(values)}, not 1")
    return sum(-v * log2(v) for v in values if v > 0)


def phi_rate(p):
    """phi(p) = p * log2(1/p)"""
    if p <= 0:
        return 0.0
    return p * log2(1 / p)


def choose_p(a):
    """p = a / (4 log2(4/a)); guarantees phi(p) <= a for a in (0, 1/4]"""
    if not 0 < a <= 0.25:
        raise ValidationError(f"target a must lie in (0, 1/4], got {a}")
    return a / (4 * log2(4 / a))


def h_bound(n, k, p, B=1.0):
    """Entropy budget h(n, k, p) = B * k * log2(n/k) * phi(p)"""
    if k < 1 or n < k:
        raise ValidationError(f"need n >= k >= 1, got n={n}, k={k}")
    if not 0 < p < 1:
        raise ValidationError(f"p must lie in (0, 1), got {p}")
    if B <= 0:
        raise ValidationError("B must be positive")
    return B * k * log2(n / k) * phi_rate(p)


def exception_budget(n, k, p, B=1.0):
    """2^h(n, k, p), the per-step budget on peeled traces; 1 when n <= k"""
    if n <= k:
        return 1.0
    h = h_bound(n, k, p, B)
    return 2.0 ** h if h < 1024 else inf


@dataclass(frozen=True)
class AmplificationReport:
    entropy: float
    closure_size: int
    phi_rate: float
    ratio: float

    def to_json(self):
        return {"entropy_bits": self.entropy, "closure_size": self.closure_size,
                "phi_rate": self.phi_rate, "ratio": self.ratio}


def amplification_diagnostic(fam, D, p, cap=DEFAULT_CLOSURE_CAP):
    """
    Measured H(D) / (phi(p) * log2 |U(F)|) for a p-smooth D on F.

    This is an empirical estimate of the amplification constant, reported
    and never compared with a threshold.
    """
    if not 0 < p < 1:
        raise ValidationError(f"p must lie in (0, 1), got {p}")
    if float(D.max_hit(fam)) > p + FLOAT_TOL:
        raise ValidationError("D is not p-smooth on this family")
    H = entropy_bits(D)
    size = len(union_closure(fam, cap=cap))
    denom = phi_rate(p) * log2(size) if size > 1 else 0.0
    if denom == 0:
        ratio = 0.0 if H == 0 else inf
    else:
        ratio = H / denom
    return AmplificationReport(H, size, phi_rate(p), ratio)
