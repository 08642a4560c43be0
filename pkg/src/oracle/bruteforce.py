# src/oracle/bruteforce.py
"""
Brute-force ground truth for the acceptance checks.

Each engine enumerates its definition directly and shares no search logic
with the production solvers it is compared against. Budgets fail closed:
an engine that would exceed its budget raises instead of approximating.
"""

import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional

from common.config import to_fraction
from common.errors import BudgetExceeded, ValidationError
from oracle.lp import simplex


@dataclass(frozen=True)
class OracleBudget:
    max_subsets: int = 1 << 22
    max_lp_vars: int = 64
    time_cap: Optional[float] = None

    def __post_init__(self):
        if self.max_subsets <= 0 or self.max_lp_vars <= 0:
            raise ValidationError("oracle budgets must be positive")
        if self.time_cap is not None and self.time_cap <= 0:
            raise ValidationError("time_cap must be positive")


@dataclass
class OracleResult:
    value: object
    witness: object = None
    budget_used: dict = field(default_factory=dict)

    def to_json(self):
        return {"value": _plain(self.value), "witness": _plain(self.witness),
                "budget_used": self.budget_used}


def _plain(obj):
    if isinstance(obj, Fraction):
        return {"num": obj.numerator, "den": obj.denominator}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [_plain(v) for v in items]
    return obj


class _Meter:
    def __init__(self, budget, what):
        self.budget = budget
        self.what = what
        self.count = 0
        self.start = time.monotonic()

    def tick(self, best=None):
        self.count += 1
        if self.count > self.budget.max_subsets:
            raise BudgetExceeded(f"{self.what}: enumeration exceeded {self.budget.max_subsets} subsets",
                                 best=best, used=self.count)
        if self.budget.time_cap is not None and time.monotonic() - self.start > self.budget.time_cap:
            raise BudgetExceeded(f"{self.what}: time cap {self.budget.time_cap}s exceeded",
                                 best=best, used=self.count)


def _all_have_private(sets):
    counts = Counter(x for s in sets for x in s)
    return all(any(counts[x] == 1 for x in s) for s in sets)


def mf_bruteforce(fam, budget=OracleBudget()):
    """
    Largest subfamily in which every set has a private element.

    Enumerates subfamilies in index order, extending only those that pass
    the private-element test (the property is inherited by subfamilies, so
    no moonflower is skipped).
    """
    sets = [set(m) for m in fam.members if m]
    meter = _Meter(budget, "mf_bruteforce")
    best = {"value": 0, "petals": ()}

    def extend(start, chosen):
        for j in range(start, len(sets)):
            meter.tick(best["value"])
            trial = chosen + [j]
            if _all_have_private([sets[i] for i in trial]):
                if len(trial) > best["value"]:
                    best["value"] = len(trial)
                    best["petals"] = tuple(trial)
                extend(j + 1, trial)

    extend(0, [])
    petals = [sorted(sets[i]) for i in best["petals"]]
    return OracleResult(best["value"], petals, {"subsets": meter.count})


def _non_redundant(codewords, coords):
    for i in coords:
        if not any(i in c and not (c & (coords - {i})) for c in codewords):
            return False
    return True


def nrd_bruteforce(code, budget=OracleBudget()):
    """
    Largest coordinate set I such that every i in I has a codeword equal to
    the unit vector e_i on I.
    """
    codewords = [set(c) for c in code.codewords]
    support = sorted(set().union(*codewords)) if codewords else []
    meter = _Meter(budget, "nrd_bruteforce")
    best = {"value": 0, "coords": ()}

    def extend(start, chosen):
        for j in range(start, len(support)):
            meter.tick(best["value"])
            trial = chosen | {support[j]}
            if _non_redundant(codewords, trial):
                if len(trial) > best["value"]:
                    best["value"] = len(trial)
                    best["coords"] = tuple(sorted(trial))
                extend(j + 1, trial)

    extend(0, set())
    return OracleResult(best["value"], list(best["coords"]), {"subsets": meter.count})


def phi_exact(fam, budget=OracleBudget()):
    """
    Phi(F) from the LP  max sum_T x_T  s.t.  sum_{T ∋ i} x_T <= 1,  x >= 0.

    Its optimum z* is 1/Phi: scaling an optimal x by 1/z* gives the smooth
    distribution, and the optimal dual y scaled by 1/z* gives the cover.
    """
    members = list(fam.members)
    if not members:
        return OracleResult(Fraction(1), {"degenerate": True}, {"lp_vars": 0})
    if any(not m for m in members):
        j = next(i for i, m in enumerate(members) if not m)
        return OracleResult(Fraction(0), {"smooth": {j: Fraction(1)}, "cover": {},
                                          "primal": Fraction(0), "dual": Fraction(0)},
                            {"lp_vars": 0})
    coords = sorted(set().union(*members))
    n_vars = len(members) + len(coords)
    if n_vars > budget.max_lp_vars:
        raise BudgetExceeded(f"phi_exact: {n_vars} LP variables exceed {budget.max_lp_vars}",
                             used=n_vars)
    A = [[1 if x in m else 0 for m in members] for x in coords]
    b = [1] * len(coords)
    c = [1] * len(members)
    status, x, z, y = simplex(A, b, c)
    if status != "optimal":
        raise RuntimeError(f"phi_exact LP returned {status}")
    primal_total = sum(x)
    dual_total = sum(y)
    smooth = {j: v / primal_total for j, v in enumerate(x) if v != 0}
    cover = {coords[i]: v / dual_total for i, v in enumerate(y) if v != 0}
    witness = {"smooth": smooth, "cover": cover,
               "primal": 1 / primal_total, "dual": 1 / dual_total}
    return OracleResult(1 / z, witness, {"lp_vars": n_vars})


def _feasible_weights(codewords, T, epsilon):
    """
    alpha >= 0 on T with (1-eps) wt(x) <= sum_{i in T ∩ x} alpha_i <= (1+eps) wt(x)
    for every nonzero codeword x, or None.
    """
    T = list(T)
    A, b = [], []
    for x in codewords:
        w = len(x)
        if w == 0:
            continue
        row = [1 if i in x else 0 for i in T]
        if not any(row):
            return None
        A.append(row)
        b.append((1 + epsilon) * w)
        A.append([-v for v in row])
        b.append(-(1 - epsilon) * w)
    if not A:
        return {i: Fraction(0) for i in T}
    status, alpha, _, _ = simplex(A, b, [0] * len(T))
    if status != "optimal":
        return None
    return dict(zip(T, alpha))


def min_sparsifier_bruteforce(code, epsilon, budget=OracleBudget()):
    """
    Minimum |T| over weighted coordinate sets (T, alpha) that epsilon-sparsify
    the code, searched by increasing |T| over supp(code).
    """
    eps = to_fraction(epsilon)
    if eps < 0:
        raise ValidationError("epsilon must be non-negative")
    codewords = [set(c) for c in code.codewords]
    support = sorted(set().union(*codewords)) if codewords else []
    meter = _Meter(budget, "min_sparsifier_bruteforce")
    for size in range(0, len(support) + 1):
        for T in combinations(support, size):
            meter.tick()
            alpha = _feasible_weights(codewords, T, eps)
            if alpha is not None:
                return OracleResult(size, {"T": list(T), "alpha": alpha}, {"subsets": meter.count})
    raise RuntimeError("identity weights on the support always sparsify; search cannot fail")
