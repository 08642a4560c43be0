# src/cover/phi.py
"""
The covering game on a family F.

The cover player picks a distribution Q on coordinates, the smooth player a
distribution D on members. Phi(F) is the common value of

    max_Q min_{T in F} Q(T)       (cover side)
    min_D max_i Pr_{T~D}[i in T]  (smooth side)

Both sides are solved as separate LPs and returned together so callers can
check the duality gap.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from common.config import FLOAT_TOL, to_fraction
from common.errors import ValidationError
from cover.simplex import check_mode, solve_lp


def _encode(value):
    if isinstance(value, Fraction):
        return {"num": value.numerator, "den": value.denominator}
    return float(value)


def _decode(value):
    if isinstance(value, dict):
        return Fraction(value["num"], value["den"])
    return float(value)


@dataclass(frozen=True)
class Distribution:
    """Probability weights on coordinates (zero weights omitted)"""
    weights: dict = field(default_factory=dict)

    def total(self):
        return sum(self.weights.values())

    def mass(self, coords):
        return sum((self.weights.get(i, 0) for i in coords), 0)

    def support(self):
        return frozenset(i for i, v in self.weights.items() if v > 0)

    def to_json(self):
        return {str(i): _encode(v) for i, v in sorted(self.weights.items())}

    @classmethod
    def from_json(cls, data):
        return cls({int(i): _decode(v) for i, v in data.items()})


@dataclass(frozen=True)
class FamilyDistribution:
    """Probability weights on member indices of a family"""
    weights: dict = field(default_factory=dict)

    def total(self):
        return sum(self.weights.values())

    def hit_probability(self, fam, i):
        return sum((v for j, v in self.weights.items() if i in fam[j]), 0)

    def max_hit(self, fam):
        return max((self.hit_probability(fam, i) for i in fam.support()), default=0)

    def values(self):
        return list(self.weights.values())

    def to_json(self):
        return {str(j): _encode(v) for j, v in sorted(self.weights.items())}

    @classmethod
    def from_json(cls, data):
        return cls({int(j): _decode(v) for j, v in data.items()})


@dataclass(frozen=True)
class PhiResult:
    value: object
    primal: object
    dual: object
    cover: Distribution
    smooth: Optional[FamilyDistribution]
    mode: str
    degenerate: bool = False
    has_empty_member: bool = False

    @property
    def duality_gap(self):
        return abs(self.primal - self.dual)

    def covers(self, p):
        """True when Phi >= p (within FLOAT_TOL in float mode)"""
        if self.mode == "exact":
            return self.value >= to_fraction(p)
        return self.value >= float(p) - FLOAT_TOL

    def to_json(self):
        return {
            "phi": _encode(self.value),
            "primal": _encode(self.primal),
            "dual": _encode(self.dual),
            "cover": self.cover.to_json(),
            "smooth": self.smooth.to_json() if self.smooth is not None else None,
            "mode": self.mode,
            "degenerate": self.degenerate,
            "has_empty_member": self.has_empty_member,
        }


def _clean(values, mode):
    if mode == "exact":
        return list(values)
    return [max(0.0, float(v)) for v in values]


def _cover_side(fam, coords, mode):
    """max v  s.t.  v - sum_{i in T} Q_i <= 0 for all T,  sum Q = 1"""
    nq = len(coords)
    pos = {x: j for j, x in enumerate(coords)}
    c = [0] * nq + [1]
    A_ub = []
    for m in fam.members:
        row = [0] * (nq + 1)
        for x in m:
            row[pos[x]] = -1
        row[nq] = 1
        A_ub.append(row)
    sol = solve_lp(c, A_ub, [0] * len(fam), [[1] * nq + [0]], [1], mode=mode)
    if not sol.optimal:
        raise RuntimeError(f"cover LP returned {sol.status}")
    q = _clean(sol.x[:nq], mode)
    return sol.value, Distribution({x: v for x, v in zip(coords, q) if v != 0})


def _smooth_side(fam, coords, mode):
    """min u  s.t.  sum_{T ∋ i} D_T - u <= 0 for all i,  sum D = 1"""
    nd = len(fam)
    c = [0] * nd + [-1]
    A_ub = []
    for x in coords:
        row = [1 if x in m else 0 for m in fam.members] + [-1]
        A_ub.append(row)
    sol = solve_lp(c, A_ub, [0] * len(coords), [[1] * nd + [0]], [1], mode=mode)
    if not sol.optimal:
        raise RuntimeError(f"smooth LP returned {sol.status}")
    d = _clean(sol.x[:nd], mode)
    return -sol.value, FamilyDistribution({j: v for j, v in enumerate(d) if v != 0})


def phi_value(fam, mode="exact"):
    """
    Phi(F) with an optimal cover Q and an optimal smooth D.

    Degenerate inputs:
      - empty family: Phi = 1 (vacuous minimum), Q a point mass, D None,
        flagged degenerate
      - a member equal to the empty set forces Phi = 0 (flagged)
    """
    check_mode(mode)
    one = Fraction(1) if mode == "exact" else 1.0
    zero = one - one
    point = Distribution({0: one}) if fam.n > 0 else Distribution({})

    if len(fam) == 0:
        return PhiResult(one, one, one, point, None, mode, degenerate=True)

    coords = sorted(fam.support())
    empty = fam.has_empty_member()
    if not coords:
        # the family is {∅}
        return PhiResult(zero, zero, zero, point, FamilyDistribution({0: one}), mode,
                         has_empty_member=True)

    primal, cover = _cover_side(fam, coords, mode)
    dual, smooth = _smooth_side(fam, coords, mode)
    return PhiResult(primal, primal, dual, cover, smooth, mode, has_empty_member=empty)


def _check_level(p):
    if not 0 < p < 1:
        raise ValidationError(f"cover level p must lie in (0, 1), got {p}")


def smooth_distribution(fam, p, mode="exact"):
    """
    A p-smooth distribution on F when Phi(F) < p; None when F is p-covered.
    """
    _check_level(p)
    result = phi_value(fam, mode=mode)
    if result.covers(p):
        return None
    return result.smooth


def covers_all(fam, Q, p, mode="exact"):
    """Certificate check: Q(T) >= p for every member T"""
    if mode == "exact":
        p = to_fraction(p)
        return all(Q.mass(m) >= p for m in fam.members)
    return all(Q.mass(m) >= float(p) - FLOAT_TOL for m in fam.members)
