# src/cover/peel.py
"""
Exceptional-set peeling: remove a few members so the rest is p-covered.

If F is not p-covered, take the p-smooth distribution nu* with the smallest
largest atom tau*. The members carrying mass tau* form the exceptional set
S; there are at most 1/tau* <= 2^H(nu*) of them, and F minus S is p-covered.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from common import report
from common.config import to_fraction
from common.errors import ValidationError
from cover.entropy import entropy_bits
from cover.phi import Distribution, FamilyDistribution, covers_all, phi_value
from cover.simplex import check_mode, solve_lp

TIE_TOL = 1e-9


@dataclass(frozen=True)
class PeelResult:
    exceptional: frozenset
    cover: Distribution
    tau_star: object
    entropy_bits: float
    p: object
    mode: str
    nu: Optional[FamilyDistribution] = None
    rounds: int = 0

    @property
    def already_covered(self):
        return self.rounds == 0

    def remainder(self, fam):
        return fam.without(self.exceptional)

    def certifies(self, fam):
        """Q(T) >= p on every member outside the exceptional set"""
        return covers_all(self.remainder(fam), self.cover, self.p, mode=self.mode)

    def to_json(self):
        tau = self.tau_star
        if isinstance(tau, Fraction):
            tau = {"num": tau.numerator, "den": tau.denominator}
        elif tau is not None:
            tau = float(tau)
        return {
            "exceptional": sorted(self.exceptional),
            "cover": self.cover.to_json(),
            "tau_star": tau,
            "entropy_bits": self.entropy_bits,
            "p": float(self.p),
            "rounds": self.rounds,
            "mode": self.mode,
        }


def min_linf_smooth(fam, p, mode="exact"):
    """
    nu* = argmin ||nu||_inf over p-smooth distributions on fam:

        min tau  s.t.  sum_{T ∋ i} nu_T <= p,  nu_T <= tau,  sum nu = 1
    """
    m = len(fam)
    coords = sorted(fam.support())
    c = [0] * m + [-1]
    A_ub, b_ub = [], []
    for x in coords:
        A_ub.append([1 if x in t else 0 for t in fam.members] + [0])
        b_ub.append(p)
    for j in range(m):
        row = [0] * (m + 1)
        row[j] = 1
        row[m] = -1
        A_ub.append(row)
        b_ub.append(0)
    sol = solve_lp(c, A_ub, b_ub, [[1] * m + [0]], [1], mode=mode)
    if not sol.optimal:
        raise RuntimeError(f"min-l_inf smooth LP returned {sol.status}; family is p-covered?")
    nu = sol.x[:m]
    if mode == "float":
        nu = [max(0.0, v) for v in nu]
    return nu, -sol.value


def peel_exceptional(fam, p, mode="exact"):
    """
    Exceptional set S and a cover Q certifying that F minus S is p-covered.

    In exact arithmetic one peel suffices. In float mode near-ties can leave
    an uncovered remainder, so the peel repeats on what is left until the
    cover certificate holds; `rounds` records how many peels ran, and
    tau_star / entropy_bits describe the first one.
    """
    check_mode(mode)
    if not 0 < p <= 1:
        raise ValidationError(f"cover level p must lie in (0, 1], got {p}")
    level = to_fraction(p) if mode == "exact" else float(p)

    active = list(range(len(fam)))
    exceptional = set()
    first = None
    rounds = 0
    while True:
        sub = fam.subfamily(active)
        phi = phi_value(sub, mode=mode)
        if phi.covers(level):
            break
        rounds += 1
        nu, tau = min_linf_smooth(sub, level, mode=mode)
        if mode == "exact":
            peeled = [j for j, v in enumerate(nu) if v == tau]
        else:
            peeled = [j for j, v in enumerate(nu) if v >= tau * (1 - TIE_TOL)]
        if first is None:
            first = (FamilyDistribution({active[j]: v for j, v in enumerate(nu) if v != 0}), tau)
        exceptional |= {active[j] for j in peeled}
        active = [a for a in active if a not in exceptional]

    if rounds > 1:
        report.warn(f"peel needed {rounds} rounds to certify the remainder")
    if first is None:
        return PeelResult(frozenset(), phi.cover, None, 0.0, level, mode, None, 0)
    nu, tau = first
    return PeelResult(frozenset(exceptional), phi.cover, tau, entropy_bits(nu), level, mode, nu, rounds)
